use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FucikError {
    #[error("unsupported discretization: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("fields live on different discretizations")]
    DiscretizationMismatch,
    #[error("cannot project the zero field onto the unit sphere")]
    ZeroField,
    #[error("auxiliary direction is parallel to the ground state")]
    DegeneratePath,
    #[error("eigen iteration did not converge after {0} steps")]
    EigenNoConvergence(usize),
    #[error("mountain pass stalled: grad_norm {grad_norm:.3e} after {iterations} iterations")]
    MountainPassStalled { grad_norm: f64, iterations: usize },
    #[error("newton did not converge: residual {residual:.3e} after {iterations} iterations")]
    NewtonStalled { residual: f64, iterations: usize },
    #[error("field does not change sign")]
    NotSignChanging,
    #[error("mountain-pass geometry not detected at the sampled radii")]
    GeometryNotDetected,
    #[error("descent left the ball repeatedly; rerun the geometry scan")]
    BallExit,
    #[error("singular linear system")]
    Singular,
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, FucikError>;

impl From<std::io::Error> for FucikError {
    fn from(e: std::io::Error) -> Self {
        FucikError::Io(e.to_string())
    }
}

impl From<csv::Error> for FucikError {
    fn from(e: csv::Error) -> Self {
        FucikError::Malformed(e.to_string())
    }
}
