use thiserror::Error;

/// Errors raised by the geometry, operator, spectrum and partition layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mask has no interior points: {0}")]
    EmptyMask(String),

    #[error("masks or fields live on different grids")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("ring radii are not strictly interleaved: {0}")]
    BadRadii(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("field vanishes identically")]
    ZeroField,

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("requested {requested} eigenpairs but only {available} degrees of freedom exist")]
    TooManyEigenpairs { requested: usize, available: usize },

    #[error("partition cells overlap (cells {0} and {1})")]
    OverlappingCells(usize, usize),

    #[error("cell {0} collapsed and could not be reseeded")]
    CellCollapse(usize),

    #[error("sigma estimate needs at least 3 sweep radii, got {0}")]
    InsufficientSweep(usize),

    #[error("no valid bracket: {0}")]
    BracketInvalid(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("partition state is not converged")]
    NotConverged,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical kernels, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::CellCollapse(_))
    }

    /// Short machine-readable name used in error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyMask(_) => "EmptyMask",
            Error::GridMismatch => "GridMismatch",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::InvalidRegion(_) => "InvalidRegion",
            Error::BadRadii(_) => "BadRadii",
            Error::InvalidPotential(_) => "InvalidPotential",
            Error::ZeroField => "ZeroField",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::TooManyEigenpairs { .. } => "TooManyEigenpairs",
            Error::OverlappingCells(..) => "OverlappingCells",
            Error::CellCollapse(_) => "CellCollapse",
            Error::InsufficientSweep(_) => "InsufficientSweep",
            Error::BracketInvalid(_) => "BracketInvalid",
            Error::WindowTooSmall(_) => "WindowTooSmall",
            Error::NotConverged => "NotConverged",
            Error::Precondition(_) => "Precondition",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
