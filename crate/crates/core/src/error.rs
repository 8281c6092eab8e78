use thiserror::Error;

/// Errors raised by space construction, analysis and solving.
///
/// Numeric payloads are rendered to strings so the error type does not depend
/// on the scalar type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("a space needs at least one point")]
    EmptySpace,

    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),

    #[error("distance table row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("distance table is not symmetric at ({x}, {y}): sigma({x},{y}) = {xy} but sigma({y},{x}) = {yx}")]
    Asymmetric {
        x: String,
        y: String,
        xy: String,
        yx: String,
    },

    #[error("distance table entry ({x}, {y}) is not finite")]
    NonFinite { x: String, y: String },

    #[error("input is not an M-metric (it classifies as {0})")]
    NotMMetric(String),

    #[error("input is not a partial metric (it classifies as {0})")]
    NotPartialMetric(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("generator gave up after {0} attempts")]
    ResampleBudgetExhausted(usize),

    #[error("topology enumeration is capped at {cap} points, space has {n}")]
    TooManyPoints { n: usize, cap: usize },

    #[error("ball radius must be positive, got {0}")]
    NonPositiveRadius(String),

    #[error("sequence prefix of length {len} is too short for window {window} (need at least {needed})")]
    PrefixTooShort {
        len: usize,
        window: usize,
        needed: usize,
    },

    #[error("orbit not r-Cauchy: {0}")]
    NotRCauchy(String),

    #[error("`{0}` is not a special limit of the sequence")]
    NotSpecialLimit(String),

    #[error("distinct points `{0}` and `{1}` both pass the special-limit test; tolerance too loose")]
    AmbiguousSpecialLimit(String, String),

    #[error("no special limit found for the orbit")]
    NoSpecialLimit,

    #[error("parameter {name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("phi violates its contract: {0}")]
    PhiContract(String),

    #[error("functional space `{0}` declares no lower bound")]
    NoDeclaredBound(String),

    #[error("point {0} lies outside the domain")]
    OutsideDomain(String),

    #[error("precondition {condition} violated at ({x}, {y}): {lhs} > {rhs}")]
    Precondition {
        condition: &'static str,
        x: String,
        y: String,
        lhs: String,
        rhs: String,
    },

    #[error("space `{0}` is not declared complete")]
    NotComplete(String),

    #[error("unknown corpus entry `{0}`")]
    UnknownCorpusEntry(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
