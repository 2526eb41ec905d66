use thiserror::Error;

use crate::space::Point;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("point {point} out of range for a space on {n} points")]
    OutOfRange { point: Point, n: usize },

    #[error("linear-space axiom violated at pair ({}, {}): witnesses {witnesses:?}", pair.0, pair.1)]
    AxiomViolation { pair: (Point, Point), witnesses: Vec<Point> },

    #[error("invalid line {line:?}: {reason}")]
    InvalidLine { line: Vec<Point>, reason: String },

    #[error("sets overlap in {0:?}")]
    Overlap(Vec<Point>),

    #[error("{what}: size {size} exceeds limit {limit}")]
    SizeLimit { what: &'static str, size: usize, limit: usize },

    #[error("base is not a strong substructure")]
    NotStrong,

    #[error("extension is not a primitive 0-extension over the base")]
    NotZeroPrimitive,

    #[error("F and E induce different structures on the shared set")]
    BaseMismatch,

    #[error("bound {bound} is below the size {needed} of a good pair in play")]
    BoundTooSmall { needed: usize, bound: usize },

    #[error("no copy available for identification of {code} (violations: {violations:?})")]
    NoIdentification { code: String, violations: Vec<String> },

    #[error("set {0:?} is not d-closed")]
    NotClosed(Vec<Point>),

    #[error("pair ({0}, {1}) does not lie on a 3-point line")]
    PairNotOnTriple(Point, Point),

    #[error("incidence structure is not a linear space: {0}")]
    AxiomFailure(String),

    #[error("invalid mu function: {0}")]
    InvalidMu(String),

    #[error("cannot decode canonical code {0:?}")]
    BadCode(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub fn is_size_limit(&self) -> bool {
        matches!(self, Error::SizeLimit { .. })
    }
}
