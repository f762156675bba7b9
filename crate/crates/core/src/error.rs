use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("validation of `{check}` failed at {point:?}: defect {defect:e}")]
    Validation {
        check: String,
        point: Vec<f64>,
        defect: f64,
    },
    #[error("cometric is singular at {point:?}")]
    SingularG { point: Vec<f64> },
    #[error("no J field declared")]
    MissingJ,
    #[error("J is not an f-structure here: |J^3 + J| = {defect:e}")]
    NotFStructure { defect: f64 },
    #[error("metric restricted to the leaf is indefinite")]
    IndefiniteRestriction,
    #[error("bivector is degenerate at {point:?}")]
    DegeneratePi { point: Vec<f64> },
    #[error("rank of pi changes near {point:?}")]
    RankDrop { point: Vec<f64> },
    #[error("vector is not tangent to the leaf (residual {residual:e})")]
    NotLeafTangent { residual: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown gallery entry `{0}`")]
    UnknownEntry(String),
    #[error("differential of the map is rank deficient at {point:?}")]
    RankDeficient { point: Vec<f64> },
    #[error("omega^n wedge eta vanishes at the base point")]
    DegenerateCosymplectic,
    #[error("`{form}` is not closed: defect {defect:e}")]
    NotClosed { form: String, defect: f64 },
    #[error("trajectory left the validity box at t = {time}")]
    LeftValidityBox { time: f64 },
    #[error("{0}")]
    Invalid(String),
}
