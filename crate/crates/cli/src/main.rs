mod args;
mod output;
mod system;

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use mmetric::contraction::{check_c_r, check_phi_r, Phi};
use mmetric::corpus::{self, parse_scalar, Payload};
use mmetric::derived::{induce_partial_with_tol, sigma_star_with_tol};
use mmetric::fixedpoint::{analyze_orbit, banach, kannan, solve, Branch};
use mmetric::sequences::{cauchy_analyze, is_limit, SequencePrefix};
use mmetric::spacegen::{gen_m_metric, gen_partial_metric, GenConfig};
use mmetric::topology::{compare, generate_topology, BallFamily, Balls, Relation, Separation};
use mmetric::{classify, Class, Error, FiniteSpace, MapSystem, Rational, Result, Scalar, Space};

use args::{CertKind, ClassArg, Cli, Command, CorpusAction, DeriveKind, Mode};
use output::{classification, classification_text, num, trim_orbit, Report};
use system::{corpus_name, load_exact, load_space, resolve, System};

const TABLE_TOL: f64 = 1e-9;
const ITERATIVE_TOL: f64 = 1e-6;

macro_rules! on_system {
    ($sys:expr, $s:ident => $body:expr) => {
        match $sys {
            System::Finite($s) => $body,
            System::Functional($s) => $body,
        }
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let _ = writeln!(io::stdout(), "{}", report.render(cli.format));
            if report.verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Precondition { .. }
        | Error::NotMMetric(_)
        | Error::NotPartialMetric(_)
        | Error::NotRCauchy(_)
        | Error::NoSpecialLimit
        | Error::NotSpecialLimit(_)
        | Error::AmbiguousSpecialLimit(..)
        | Error::PhiContract(_)
        | Error::NotComplete(_)
        | Error::NoDeclaredBound(_) => 1,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let table_tol = cli.tol.unwrap_or(TABLE_TOL);
    let iter_tol = cli.tol.unwrap_or(ITERATIVE_TOL);
    if table_tol < 0.0 || !table_tol.is_finite() {
        return Err(Error::InvalidConfig("--tol must be a nonnegative number".into()));
    }
    match &cli.command {
        Command::Validate { space, exact, require } => validate(space, *exact, *require, table_tol),
        Command::Derive { space, kind } => derive(space, *kind, table_tol),
        Command::Gen {
            n,
            partial,
            distinct_diag,
            out,
        } => gen(*n, *partial, *distinct_diag, cli.seed, out.as_deref()),
        Command::Topology { space, family, exact } => topology(space, family, *exact),
        Command::TopologyCompare {
            space,
            left,
            right,
            exact,
        } => topology_compare(space, left, right, *exact),
        Command::Ball {
            space,
            family,
            point,
            eps,
        } => ball(space, family, point, *eps),
        Command::Sequence {
            space,
            terms,
            window,
            limit,
        } => sequence(space, terms.as_deref(), *window, limit.as_deref(), iter_tol),
        Command::Orbit { system, len, window } => {
            let sys = resolve(system)?;
            on_system!(&sys, s => orbit(s, *len, *window, iter_tol))
        }
        Command::Certify {
            system,
            kind,
            c,
            r,
            phi,
            depth,
        } => {
            let sys = resolve(system)?;
            on_system!(&sys, s => certify(s, *kind, c.as_deref(), r, phi.as_deref(), *depth, iter_tol))
        }
        Command::Fixpoint {
            system,
            mode,
            k,
            max_iter,
            hint,
        } => {
            let sys = resolve(system)?;
            let hint = hint.as_deref().map(str::parse::<Branch>).transpose()?;
            on_system!(&sys, s => fixpoint(s, *mode, k.as_deref(), *max_iter, hint, iter_tol))
        }
        Command::Corpus { action } => match action {
            CorpusAction::List => Ok(corpus_list()),
            CorpusAction::Emit { name, out } => corpus_emit(name, out.as_deref()),
            CorpusAction::Check { name, exact } => corpus_check(name, *exact, table_tol),
        },
        Command::Fuzz { trials, n } => fuzz(*trials, *n, cli.seed, table_tol),
    }
}

fn required(c: ClassArg) -> Class {
    match c {
        ClassArg::MMetric => Class::MMetric,
        ClassArg::PartialMetric => Class::PartialMetric,
        ClassArg::Metric => Class::Metric,
    }
}

fn validate(spec: &str, exact: bool, require: ClassArg, tol: f64) -> Result<Report> {
    let need = required(require);
    let (mut json, text, class) = if exact {
        let r = classify(&load_exact(spec)?, Rational::from_integer(0))?;
        (classification(&r), classification_text(&r), r.class)
    } else {
        let r = classify(&load_space(spec)?, tol)?;
        (classification(&r), classification_text(&r), r.class)
    };
    json["space"] = json!(spec);
    json["required"] = json!(need.as_str());
    Ok(Report::new(json, text, class.at_least(need)))
}

fn space_value(space: &FiniteSpace<f64>) -> Value {
    serde_json::from_str(&space.to_json()).expect("space files are valid JSON")
}

fn table_text(space: &FiniteSpace<f64>) -> String {
    let mut out = String::new();
    for (i, row) in space.table().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>8}")).collect();
        out.push_str(&format!("{:>6} {}\n", space.label_of(i), cells.join(" ")));
    }
    out
}

fn derive(spec: &str, kind: DeriveKind, tol: f64) -> Result<Report> {
    let space = load_space(spec)?;
    let derived = match kind {
        DeriveKind::SigmaStar => sigma_star_with_tol(&space, tol)?,
        DeriveKind::InducedPartial => induce_partial_with_tol(&space, tol)?,
    };
    Ok(Report::new(space_value(&derived), table_text(&derived), true))
}

fn gen(n: usize, partial: bool, distinct_diag: bool, seed: u64, out: Option<&Path>) -> Result<Report> {
    let cfg = GenConfig {
        ensure_distinct_diag: distinct_diag,
        ..GenConfig::new(n, seed)
    };
    let space = if partial {
        gen_partial_metric::<f64>(&cfg)?
    } else {
        gen_m_metric::<f64>(&cfg)?
    };
    if let Some(path) = out {
        fs::write(path, space.to_json())?;
    }
    Ok(Report::new(space_value(&space), table_text(&space), true))
}

fn family(text: &str) -> Result<BallFamily> {
    text.parse()
}

fn open_sets_text(sets: &[Vec<String>]) -> String {
    sets.iter()
        .map(|s| format!("{{{}}}", s.join(", ")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn topology_report<S: Scalar>(space: &FiniteSpace<S>, fam: BallFamily) -> Result<Report> {
    let t = generate_topology(space, fam)?;
    let sets = t.open_sets();
    let sep = t.separation();
    let json = json!({
        "family": fam.as_str(),
        "open_sets": sets,
        "count": sets.len(),
        "separation": sep.to_string(),
    });
    let text = format!(
        "family: {fam}\nopen sets ({}): {}\nseparation: {sep}\n",
        sets.len(),
        open_sets_text(&sets)
    );
    Ok(Report::new(json, text, sep != Separation::NotT0))
}

fn topology(spec: &str, fam: &str, exact: bool) -> Result<Report> {
    let fam = family(fam)?;
    if exact {
        topology_report(&load_exact(spec)?, fam)
    } else {
        topology_report(&load_space(spec)?, fam)
    }
}

fn compare_report<S: Scalar>(space: &FiniteSpace<S>, l: BallFamily, r: BallFamily) -> Result<Report> {
    let c = compare(space, l, r)?;
    let json = json!({
        "left": l.as_str(),
        "right": r.as_str(),
        "relation": c.relation.as_str(),
        "only_left": c.only_left,
        "only_right": c.only_right,
    });
    let text = format!(
        "{l} vs {r}: {}\nonly {l}: {}\nonly {r}: {}\n",
        c.relation,
        open_sets_text(&c.only_left),
        open_sets_text(&c.only_right)
    );
    Ok(Report::new(json, text, c.relation != Relation::Incomparable))
}

fn topology_compare(spec: &str, l: &str, r: &str, exact: bool) -> Result<Report> {
    let (l, r) = (family(l)?, family(r)?);
    if exact {
        compare_report(&load_exact(spec)?, l, r)
    } else {
        compare_report(&load_space(spec)?, l, r)
    }
}

fn ball(spec: &str, fam: &str, point: &str, eps: f64) -> Result<Report> {
    let space = load_space(spec)?;
    let fam = family(fam)?;
    let x = space.index_of(point)?;
    let members: Vec<String> = Balls::new(&space, fam)?
        .ball(x, eps)?
        .into_iter()
        .map(|i| space.label_of(i).to_string())
        .collect();
    let json = json!({ "family": fam.as_str(), "center": point, "eps": eps, "ball": members });
    let text = format!("B_{fam}({point}, {eps}) = {{{}}}\n", members.join(", "));
    Ok(Report::new(json, text, true))
}

fn sequence(spec: &str, terms: Option<&str>, window: usize, limit: Option<&str>, tol: f64) -> Result<Report> {
    let (space, stored) = match corpus_name(spec).map(corpus::get).transpose()? {
        Some(entry) => match entry.payload {
            Payload::Sequence { space, terms } => (space, Some(terms)),
            _ => (load_space(spec)?, None),
        },
        None => (load_space(spec)?, None),
    };
    let idx = match (terms, stored) {
        (Some(t), _) => t
            .split(',')
            .map(|l| space.index_of(l.trim()))
            .collect::<Result<Vec<_>>>()?,
        (None, Some(stored)) => stored,
        (None, None) => return Err(Error::InvalidConfig("--terms is required for this space".into())),
    };
    let seq = SequencePrefix::new(&space, idx)?;
    let verdict = cauchy_analyze(&seq, window, tol)?;
    let mut json = json!({ "length": seq.len(), "verdict": verdict });
    let mut text = format!(
        "length: {}\nverdict: {}\ntail spread: {}\n",
        seq.len(),
        status_text(&verdict.status),
        verdict.tail_spread
    );
    if !verdict.diagnostics.levels.is_empty() {
        text.push_str(&format!("levels: {:?}\n", verdict.diagnostics.levels));
    }
    let mut verified = verdict.is_r_cauchy();
    if let Some(label) = limit {
        let a = space.index_of(label)?;
        let lv = is_limit(&seq, &verdict, &a, tol)?;
        json["limit"] = json!({ "point": label, "verdict": lv });
        text.push_str(&format!(
            "{label}: limit {} special {} residual {}\n",
            lv.is_limit, lv.is_special_limit, lv.residual
        ));
        verified &= lv.is_limit;
    }
    Ok(Report::new(json, text, verified))
}

fn status_text<S: Scalar>(s: &mmetric::CauchyStatus<S>) -> String {
    match s {
        mmetric::CauchyStatus::RCauchy { r } => format!("r_cauchy (r = {r})"),
        mmetric::CauchyStatus::NotCauchy => "not_cauchy".into(),
        mmetric::CauchyStatus::Inconclusive => "inconclusive".into(),
    }
}

fn orbit<Sp: Space<f64>>(sys: &MapSystem<f64, Sp>, len: usize, window: usize, tol: f64) -> Result<Report> {
    let o = analyze_orbit(sys, len, window, tol)?;
    let mut json = json!({ "system": sys.name(), "orbit": o });
    trim_orbit(&mut json);
    let text = format!(
        "system: {}\nverdict: {}\nspecial limit: {}\n",
        sys.name(),
        status_text(&o.cauchy.status),
        o.special_limit_label.as_deref().unwrap_or("none")
    );
    Ok(Report::new(json, text, o.special_limit.is_some()))
}

fn parse_phi(text: &str) -> Result<Phi<f64>> {
    let bad = || Error::InvalidConfig(format!("--phi: cannot parse `{text}`"));
    let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
    match kind {
        "linear" => Ok(Phi::Linear { slope: parse_scalar(rest)? }),
        "power" => {
            let (scale, exp) = rest.split_once(':').ok_or_else(bad)?;
            Ok(Phi::Power {
                scale: parse_scalar(scale)?,
                exponent: exp.parse().map_err(|_| bad())?,
            })
        }
        "table" => {
            let knots = rest
                .split(',')
                .map(|kv| {
                    let (t, v) = kv.split_once('=').ok_or_else(bad)?;
                    Ok((parse_scalar(t)?, parse_scalar(v)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Phi::Table { knots })
        }
        _ => Err(bad()),
    }
}

fn certify<Sp: Space<f64>>(
    sys: &MapSystem<f64, Sp>,
    kind: CertKind,
    c: Option<&str>,
    r: &str,
    phi: Option<&str>,
    depth: usize,
    tol: f64,
) -> Result<Report> {
    let r: f64 = parse_scalar(r)?;
    let cert = match kind {
        CertKind::CR => {
            let c = c.ok_or_else(|| Error::InvalidConfig("--c is required for c_r".into()))?;
            check_c_r(sys, parse_scalar(c)?, r, depth, tol)?
        }
        CertKind::PhiR => {
            let phi = phi.ok_or_else(|| Error::InvalidConfig("--phi is required for phi_r".into()))?;
            check_phi_r(sys, &parse_phi(phi)?, r, depth, tol)?
        }
    };
    let mut text = format!(
        "system: {}\ncertificate: {}\ndepth: {}\nviolations: {}\n",
        sys.name(),
        if cert.holds() { "holds" } else { "none" },
        cert.checked_depth,
        cert.violations.len()
    );
    for v in cert.violations.iter().take(5) {
        text.push_str(&format!("  ({}, {}): {} > {}\n", v.i, v.j, v.lhs, v.rhs));
    }
    let json = json!({ "system": sys.name(), "certificate": cert });
    Ok(Report::new(json, text, cert.holds()))
}

fn fixpoint<Sp: Space<f64> + Clone>(
    sys: &MapSystem<f64, Sp>,
    mode: Mode,
    k: Option<&str>,
    max_iter: usize,
    hint: Option<Branch>,
    tol: f64,
) -> Result<Report> {
    let mode_name = match mode {
        Mode::Solve => "solve",
        Mode::Banach => "banach",
        Mode::Kannan => "kannan",
    };
    let k = || -> Result<f64> {
        let k = k.ok_or_else(|| Error::InvalidConfig(format!("--k is required for {mode_name}")))?;
        parse_scalar(k)
    };
    let outcome = match mode {
        Mode::Solve => solve(sys, max_iter, tol, hint),
        Mode::Banach => banach(sys, k()?, max_iter, tol),
        Mode::Kannan => kannan(sys, k()?, max_iter, tol),
    };
    let result = match outcome {
        Ok(r) => r,
        Err(Error::Precondition {
            condition,
            x,
            y,
            lhs,
            rhs,
        }) => {
            let json = json!({
                "system": sys.name(),
                "mode": mode_name,
                "branch": "none",
                "point": Value::Null,
                "failure": "precondition violated",
                "precondition": { "condition": condition, "x": x, "y": y, "lhs": lhs, "rhs": rhs },
            });
            let text = format!("precondition {condition} violated at ({x}, {y}): {lhs} > {rhs}\n");
            return Ok(Report::new(json, text, false));
        }
        Err(e) => return Err(e),
    };
    let unique = result.uniqueness.as_ref().is_none_or(|u| u.unique);
    let mut json = json!({ "system": sys.name(), "mode": mode_name, "result": result });
    trim_orbit(&mut json);
    let mut text = format!(
        "system: {}\nmode: {mode_name}\npoint: {}\nbranch: {}\n",
        sys.name(),
        result.point_label.as_deref().unwrap_or("none"),
        result.branch
    );
    if let Some(res) = result.residual {
        text.push_str(&format!("residual: {res}\n"));
    }
    if let Some(u) = &result.uniqueness {
        text.push_str(&format!(
            "uniqueness ({}, {} starts): {}\n",
            u.method,
            u.starts,
            if u.unique { "unique" } else { "NOT unique" }
        ));
    }
    if let Some(why) = &result.failure {
        text.push_str(&format!("failure: {why}\n"));
    }
    Ok(Report::new(json, text, result.is_verified() && unique))
}

fn corpus_list() -> Report {
    let entries = corpus::list();
    let text = entries
        .iter()
        .map(|e| format!("{:<18} {:<17} {}\n", e.name, e.kind.as_str(), e.description))
        .collect::<String>();
    Report::new(json!(entries), text, true)
}

fn corpus_emit(name: &str, out: Option<&Path>) -> Result<Report> {
    let text = corpus::emit(name)?;
    if let Some(path) = out {
        fs::write(path, &text)?;
    }
    let json: Value = serde_json::from_str(&text)?;
    Ok(Report::new(json, text, true))
}

fn corpus_check(name: &str, exact: bool, tol: f64) -> Result<Report> {
    let outcomes = if exact {
        corpus::check(&corpus::get_exact(name)?, Rational::from_integer(0))?
    } else {
        corpus::check(&corpus::get(name)?, tol)?
    };
    let text = outcomes
        .iter()
        .map(|o| {
            format!(
                "{} {:<24} expected {:<20} got {}\n",
                if o.pass { "PASS" } else { "FAIL" },
                o.property,
                o.expected,
                o.actual
            )
        })
        .collect::<String>();
    let verified = outcomes.iter().all(|o| o.pass);
    Ok(Report::new(json!({ "entry": name, "checks": outcomes }), text, verified))
}

fn fuzz(trials: usize, n_max: usize, seed: u64, tol: f64) -> Result<Report> {
    if n_max == 0 {
        return Err(Error::InvalidConfig("--n must be at least 1".into()));
    }
    let mut failures: Vec<Value> = Vec::new();
    for t in 0..trials {
        let trial_seed = seed.wrapping_add(t as u64);
        let cfg = GenConfig::new(1 + t % n_max, trial_seed);
        let m = gen_m_metric::<f64>(&cfg)?;
        let mut fail = |property: &str, detail: String| {
            failures.push(json!({ "seed": trial_seed, "n": cfg.n, "property": property, "detail": detail }));
        };
        let class = classify(&m, tol)?.class;
        if !class.at_least(Class::MMetric) {
            fail("generated_is_m_metric", class.to_string());
            continue;
        }
        let induced = classify(&induce_partial_with_tol(&m, tol)?, tol)?.class;
        if !induced.at_least(Class::PartialMetric) {
            fail("induced_is_partial_metric", induced.to_string());
        }
        let p = gen_partial_metric::<f64>(&cfg)?;
        let star = classify(&sigma_star_with_tol(&p, tol)?, tol)?.class;
        if star != Class::Metric {
            fail("sigma_star_of_partial_is_metric", star.to_string());
        }
        let rel = compare(&m, BallFamily::MOpen, BallFamily::InducedP)?.relation;
        if !matches!(rel, Relation::Equal | Relation::LeftStrictlyCoarser) {
            fail("m_open_within_induced_p", rel.to_string());
        }
    }
    let text = format!(
        "trials: {trials}\nfailures: {}\n{}",
        failures.len(),
        failures.iter().map(|f| format!("  {f}\n")).collect::<String>()
    );
    let json = json!({ "trials": trials, "seed": seed, "failures": failures, "tolerance": num(tol) });
    let ok = failures.is_empty();
    Ok(Report::new(json, text, ok))
}
