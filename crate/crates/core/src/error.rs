use thiserror::Error;

/// Errors raised by the geometry, shape and CLI layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is rank deficient (smallest/largest singular value ratio {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("singular linear system")]
    Singular,

    #[error("SVD did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("not a Stiefel point: ||x^T x - I||_F = {defect:e}")]
    NotStiefel { defect: f64 },

    #[error("not a tangent vector: ||x^T v + v^T x||_F = {defect:e}")]
    NotTangent { defect: f64 },

    #[error("not horizontal: ||x^T h||_F = {defect:e}")]
    NotHorizontal { defect: f64 },

    #[error("embedding is not an isometry: ||E^T E - I||_F = {defect:e}")]
    NotAnIsometry { defect: f64 },

    #[error("ambient dimension {ambient} is smaller than 2p = {required}")]
    AmbientTooSmall { ambient: usize, required: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("need at least {required} samples, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("sample times are not uniformly spaced")]
    NonUniformSpacing,

    #[error("shooting did not converge (best endpoint residual {best_residual:e})")]
    NoConvergence { best_residual: f64 },

    #[error("consecutive samples {index} and {next} are {gap} apart (limit 0.5)", next = .index + 1)]
    ResolutionTooCoarse { index: usize, gap: f64 },

    #[error("principal angles are only defined for unoriented subspaces")]
    OrientedUnsupported,

    #[error("orientation flags of the two points differ")]
    OrientationMismatch,

    #[error("curve needs at least 8 samples, got {0}")]
    TooFewPoints(usize),

    #[error("edge {index} has length {length:e}, below 1e-12 of the total length")]
    DegenerateEdge { index: usize, length: f64 },

    #[error("edge direction turns by a half-turn at sample {0}; sampling too coarse")]
    BranchFailure(usize),

    #[error("frame polish moved the frame by {displacement:e} (limit 1e-3)")]
    PolishTooLarge { displacement: f64 },

    #[error("curves have different sample counts ({0} vs {1})")]
    ResolutionMismatch(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
