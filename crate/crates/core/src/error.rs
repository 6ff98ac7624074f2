use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0}: expected 2 or 3 (or 4 for generic meshes)")]
    UnsupportedDimension(usize),

    #[error("invalid resolution: {0}")]
    InvalidResolution(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate cell {cell}: signed volume {volume:e}")]
    DegenerateCell { cell: usize, volume: f64 },

    #[error("parse error at {locus}: {message}")]
    Parse { locus: String, message: String },

    #[error("form degree {degree} out of range for dimension {dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("objects belong to different complexes")]
    ComplexMismatch,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid boundary partition: {0}")]
    InvalidPartition(String),

    #[error("invalid slicing: {0}")]
    InvalidSlicing(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    EigenNoConvergence { iterations: usize, residual: f64 },

    #[error("harmonic dimension mismatch in degree {degree}: eigen route {eigen}, exact route {exact}")]
    TopologyMismatch { degree: usize, eigen: usize, exact: usize },

    #[error("no interior degrees of freedom: the constrained space is empty")]
    NoInteriorDofs,

    #[error("{message}")]
    SingularForm {
        message: String,
        eigenvalue: f64,
        eigenvector: Vec<f64>,
        skew_matrix: Option<Vec<Vec<f64>>>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("constant must be positive, got {0}")]
    NonPositiveConstant(f64),

    #[error("material tensor not uniformly positive: det = {det:e} at cell {cell}")]
    MaterialNotPositive { cell: usize, det: f64 },

    #[error("integer overflow in exact elimination")]
    IntegerOverflow,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
