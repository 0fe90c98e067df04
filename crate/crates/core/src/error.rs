use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("continuity class {0} not implemented (conjecture-dependent)")]
    UnsupportedContinuity(u32),

    #[error("1/2-rule unsupported: continuity {continuity} with degree {degree} needs the alternating node-count family")]
    HalfRuleUnsupported { continuity: u32, degree: u32 },

    #[error("degree {degree} too small for continuity {continuity}")]
    DegreeTooSmall { continuity: u32, degree: u32 },

    #[error("dirac vector has {got} entries, expected {expected}")]
    DiracLength { expected: usize, got: usize },

    #[error("dirac vector entries must be finite")]
    NonFiniteDirac,

    #[error("stretch factor must be positive and finite, got {0}")]
    InvalidStretch(f64),

    #[error("recursion map pole at n = {n}: |Gamma| = {gamma:e}")]
    RecursionPole { n: f64, gamma: f64 },

    #[error("recursion parameter n = {0} is in the excluded set")]
    ExcludedDegree(f64),

    #[error("pole of the recursion map while marching into subinterval {subinterval}: {source}")]
    MarchPole {
        subinterval: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("singular weight denominator at node {node} ({detail})")]
    SingularWeight { node: f64, detail: &'static str },

    #[error("cannot place a node at {x0}: |M_n(x0)| = {value:e} is too small")]
    OmegaSingular { x0: f64, value: f64 },

    #[error("omega policy {0} not available for continuity 1: the rule has no free parameter and omega must be zero")]
    OmegaNotFree(String),

    #[error("zero coefficient vector in projective space")]
    DegenerateProjective,

    #[error("indeterminacy point of the connection map")]
    Indeterminate,

    #[error(
        "fixed-point iteration did not converge after {iterations} steps (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("middle index {middle} out of range 1..={subintervals}")]
    MiddleOutOfRange { middle: usize, subintervals: usize },

    #[error("basis index {index} out of range (dimension {dimension})")]
    BasisIndex { index: usize, dimension: usize },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("polynomial of degree {0} has no roots to extract")]
    DegreeTooLowForRoots(usize),

    #[error("unknown table id {0} (expected 1..=5)")]
    UnknownTable(u32),

    #[error("malformed rule document: {0}")]
    MalformedDocument(String),
}
