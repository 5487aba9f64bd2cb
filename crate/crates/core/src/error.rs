use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("depth {depth} exceeds the configured maximum {max}")]
    DepthTooLarge { depth: u32, max: u32 },

    #[error("index {index} is out of range for level {level}")]
    IndexOutOfRange { level: u32, index: u64 },

    #[error("the root interval has no parent")]
    RootHasNoParent,

    #[error("non-finite integrand value {value} at node {node} (z = {z})")]
    NonFiniteIntegrand { node: usize, z: Complex64, value: f64 },

    #[error("interval at level {level} is deeper than mesh depth {depth}")]
    BeyondMesh { level: u32, depth: u32 },

    #[error("grid mismatch: expected {expected}, found {found}")]
    GridMismatch { expected: String, found: String },

    #[error("intervals are not adjacent")]
    NotAdjacent,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("overflow in {0}")]
    Overflow(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn parse_err(what: &'static str, input: &str) -> LabError {
    LabError::Parse {
        what,
        input: input.to_string(),
    }
}
