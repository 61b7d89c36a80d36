use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    #[error("holes {0} and {1} overlap or touch")]
    OverlappingHoles(usize, usize),
    #[error("hole {0} is not compactly contained in the unit disk")]
    HoleOutsideDisk(usize),
    #[error("annulus radius {0} must lie in (0, 1)")]
    BadAnnulusRadius(f64),
    #[error("bad resolution: {0}")]
    BadResolution(String),
    #[error("collar parameter {0} is outside (0, 1]")]
    EpsilonTooLarge(f64),
    #[error("evaluation point {0} is within the quadrature guard band of the boundary")]
    PointTooCloseToBoundary(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("|nu| reaches {found}, bound is {kappa}")]
    KappaViolated { found: f64, kappa: f64 },
    #[error("field vanishes identically")]
    ZeroField,
    #[error("iterative solve stalled after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("bad data: {0}")]
    BadData(String),
    #[error("linear system is singular (smallest singular values {0:?})")]
    SingularSystem(Vec<f64>),
    #[error("boundary data fails the compatibility condition; periods {0:?}")]
    CompatibilityViolated(Vec<f64>),
    #[error("flux data has nonzero total mean {0:e}")]
    MeanNotZero(f64),
    #[error("conjugate data could not be made compatible")]
    CompatibilityUnreachable,
    #[error("trace basis is ill-conditioned (smallest Gram eigenvalue {0:e})")]
    IllConditioned(f64),
    #[error("constraint budget {budget:e} is below the attainable infimum {infimum:e}")]
    BudgetUnreachable { budget: f64, infimum: f64 },
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("operation not supported on this domain: {0}")]
    UnsupportedDomain(String),
}

pub type Result<T> = std::result::Result<T, HardyError>;
