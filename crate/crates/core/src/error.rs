use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground set size {n} is outside the supported range 1..=128")]
    GroundSetTooLarge { n: usize },

    #[error("element {element} is outside [1, {n}]")]
    ElementOutOfRange { element: u64, n: usize },

    #[error("element {element} appears twice in one set")]
    DuplicateElement { element: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("set {set} appears more than once")]
    DuplicateMember { set: String },

    #[error("member {set} has {found} elements, expected {expected}")]
    WrongCardinality { set: String, expected: usize, found: usize },

    #[error("members live on different ground sets ({expected} vs {found})")]
    GroundSetMismatch { expected: usize, found: usize },

    #[error("family is not {k}-uniform")]
    NotUniform { k: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("the family is empty")]
    EmptyFamily,

    #[error("member {index} ({set}) is shattered: it has no witness set")]
    ShatteredMember { index: usize, set: String },

    #[error("invalid witness for member {index}: {reason}")]
    InvalidWitness { index: usize, reason: String },

    #[error("assignment is not total: {0}")]
    AssignmentNotTotal(String),

    #[error("covering precondition fails at member {set}: contains only {found} of the required {required} sets")]
    CoveringFails { set: String, found: usize, required: usize },

    #[error("family is not intersecting: {a} and {b} are disjoint")]
    NotIntersecting { a: String, b: String },

    #[error("every witness must have size exactly 1; member {index} has a witness of size {size}")]
    WitnessSizeNotOne { index: usize, size: usize },

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("matrix side {side} exceeds the limit of {limit}")]
    MatrixTooLarge { side: usize, limit: usize },

    #[error("coefficient matrix is rank deficient ({rank} < {side})")]
    RankDeficient { rank: usize, side: usize, kernel: Vec<String> },

    #[error("certified bound violated: |F| = {size} > {bound}")]
    BoundViolated { size: usize, bound: i128 },

    #[error("certificate mismatch: {0}")]
    CertificateMismatch(String),

    #[error("search budget exhausted after {nodes} nodes; best found {best} is only a lower bound")]
    BudgetExceeded { best: usize, nodes: u64, best_family: Vec<Vec<usize>> },

    #[error("search space too large: {0}")]
    TooLarge(String),

    #[error("io: {0}")]
    Io(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
