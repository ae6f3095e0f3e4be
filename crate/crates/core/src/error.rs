use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension n must be at least 1")]
    InvalidDimension,

    #[error("dimension mismatch: expected n = {expected}, found n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid frame index {index} for n = {n}")]
    InvalidFrameIndex { index: String, n: usize },

    #[error("grid too short: {nodes} nodes, at least {required} required")]
    GridTooShort { nodes: usize, required: usize },

    #[error("non-uniform grid: spacing at node {node} is {spacing:e}, expected {expected:e}")]
    NonUniformGrid {
        node: usize,
        spacing: f64,
        expected: f64,
    },

    #[error("field has {found} samples but the trajectory has {expected} nodes")]
    FieldLength { expected: usize, found: usize },

    #[error("invalid initial value problem: {0}")]
    InvalidIvp(String),

    #[error("invariant breach at node {node}: {quantity} drifted by {drift:e}")]
    InvariantBreach {
        node: usize,
        quantity: &'static str,
        drift: f64,
    },

    #[error("invalid curve spec: {0}")]
    InvalidSpec(String),

    #[error("rotation rate λ = q − 2cosθ = {0:e} is below 1e-9 in magnitude; use the λ = 0 branch")]
    DegenerateRotation(f64),

    #[error("zero velocity at node {0}")]
    DegenerateVelocity(usize),

    #[error("sinθ = {0:e} is too small for the frame formulas; treat the curve as an integral curve of ξ")]
    SingularAngle(f64),

    #[error("invalid helix data: {0}")]
    InvalidHelix(String),

    #[error("malformed trajectory CSV at line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
