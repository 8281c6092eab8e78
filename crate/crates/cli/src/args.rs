use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Axiom checks, ball topologies, r-Cauchy analysis and fixed-point
/// certification for M-metric spaces.
///
/// SPACE arguments are `corpus:<name>` or a path to a JSON space file
/// `{"points": [...], "sigma": [[...], ...]}`.
///
/// Exit status: 0 when the reported property is verified, 1 when it is
/// violated (a witness is printed), 2 on usage or input errors.
#[derive(Debug, Parser)]
#[command(name = "mmetric", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Comparison tolerance. Defaults to 1e-9 for table checks and 1e-6 for
    /// sequences, certificates and the solver.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    MMetric,
    PartialMetric,
    Metric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeriveKind {
    SigmaStar,
    InducedPartial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertKind {
    #[value(name = "c_r")]
    CR,
    #[value(name = "phi_r")]
    PhiR,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Solve,
    Banach,
    Kannan,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a table and report every axiom with its first witness.
    Validate {
        space: String,
        /// Exact rational arithmetic (file values are read onto a 2^-20 grid).
        #[arg(long)]
        exact: bool,
        /// Exit 1 unless the table is at least this class.
        #[arg(long, value_enum, default_value_t = ClassArg::MMetric)]
        require: ClassArg,
    },
    /// Print sigma* or the induced partial metric as a space file.
    Derive {
        space: String,
        #[arg(long, value_enum)]
        kind: DeriveKind,
    },
    /// Generate a random M-metric (or partial-metric) space file.
    Gen {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long)]
        partial: bool,
        /// Keep self-distances pairwise distinct.
        #[arg(long)]
        distinct_diag: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Open sets and separation of the topology generated by a ball family.
    Topology {
        space: String,
        /// asadi, m_open, induced_p or standard_p.
        #[arg(long, default_value = "m_open")]
        family: String,
        #[arg(long)]
        exact: bool,
    },
    /// Compare the topologies of two ball families on one space.
    TopologyCompare {
        space: String,
        #[arg(long, default_value = "m_open")]
        left: String,
        #[arg(long, default_value = "induced_p")]
        right: String,
        #[arg(long)]
        exact: bool,
    },
    /// A single ball.
    Ball {
        space: String,
        #[arg(long, default_value = "m_open")]
        family: String,
        #[arg(long)]
        point: String,
        #[arg(long)]
        eps: f64,
    },
    /// r-Cauchy verdict for a sequence of point labels.
    Sequence {
        space: String,
        /// Comma-separated labels. Optional for corpus sequences.
        #[arg(long)]
        terms: Option<String>,
        #[arg(long, default_value_t = 16)]
        window: usize,
        /// Also test this point as a (special) limit.
        #[arg(long)]
        limit: Option<String>,
    },
    /// Analyse the orbit of a map system.
    Orbit {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 64)]
        len: usize,
        #[arg(long, default_value_t = 16)]
        window: usize,
    },
    /// Orbital c_r- or phi_r-contraction certificate.
    Certify {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, value_enum)]
        kind: CertKind,
        #[arg(long)]
        c: Option<String>,
        #[arg(long, default_value = "0")]
        r: String,
        /// linear:<slope>, power:<scale>:<exponent> or table:<t>=<v>,<t>=<v>,...
        #[arg(long)]
        phi: Option<String>,
        #[arg(long, default_value_t = 64)]
        depth: usize,
    },
    /// Fixed-point solver with Banach and Kannan front-ends.
    Fixpoint {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, value_enum, default_value_t = Mode::Solve)]
        mode: Mode,
        #[arg(long)]
        k: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Branch tried first by `solve`.
        #[arg(long)]
        hint: Option<String>,
    },
    /// Named spaces and map systems.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Random-table property checks: generated M-metrics, induced partial
    /// metrics, sigma* of partial metrics and topology inclusion.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Largest table size; sizes cycle through 1..=n.
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CorpusAction {
    List,
    /// Write the JSON space file of a finite entry.
    Emit {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate every expectation of an entry.
    Check {
        name: String,
        #[arg(long)]
        exact: bool,
    },
}

/// A map system: a corpus map system, a finite space with `--map`, or a
/// functional corpus space with an affine map `--alpha x + --beta`.
#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    #[arg(long)]
    pub system: String,
    /// Base point: a label on finite spaces, a number on functional ones.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Total map on a finite space, as `from=to` pairs: `a=b,b=a`.
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
}
