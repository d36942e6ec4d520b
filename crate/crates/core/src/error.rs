use thiserror::Error;

/// Failure modes shared across the crate.
#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("grid axis {axis} has even size {size}; sizes must be odd so the frequency lattice is symmetric")]
    EvenGridSize { axis: usize, size: usize },

    #[error("grid axis {axis} has nonpositive length {length}")]
    NonPositiveLength { axis: usize, length: f64 },

    #[error("grid must have at least one axis and no zero-size axis")]
    EmptyGrid,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("value length {got} does not match grid with {expected} sites")]
    LengthMismatch { expected: usize, got: usize },

    #[error("point {0:?} is not on the frequency lattice of the tabulated symbol")]
    OffLattice(Vec<f64>),

    #[error("axis {axis} under-resolved: frequency spacing {spacing} exceeds {required} (one eighth of the cap width)")]
    UnderResolved {
        axis: usize,
        spacing: f64,
        required: f64,
    },

    #[error("initial vector vanishes after projection onto the region")]
    ZeroInit,

    #[error("eigenpair has not converged; rerun with a larger iteration budget")]
    NotConverged,

    #[error("output should be real but has relative imaginary part {rel}")]
    ResidualImaginary { rel: f64 },

    #[error("{0}")]
    BadParameter(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("certificate is corrupted: {0}")]
    CorruptCertificate(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SpectralError>;
