use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("flow swallowed: trajectory came within {guard:e} of the driving point at t = {time}")]
    FlowSwallowed { time: f64, guard: f64 },
    #[error("time {t} outside [0, {total}]")]
    InvalidTime { t: f64, total: f64 },
    #[error("backward flow diverged: {0}")]
    TraceDiverged(String),
    #[error("point {0} is on or inside the hull")]
    OutsideDomain(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("curve is not simple: segments {0} and {1} cross")]
    NotSimple(usize, usize),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("root is not an endpoint of the arc")]
    RootNotEndpoint,
    #[error("curve is not closed")]
    NotClosed,
    #[error("curve is not a bounded Jordan curve: {0}")]
    NotJordan(String),
    #[error("quadrature did not reach tolerance {tol:e} (estimate {err:e} after {cells} cells)")]
    GridTooCoarse { tol: f64, err: f64, cells: usize },
    #[error("tangent undefined at sample {0}")]
    TangentUndefined(usize),
    #[error("welding failed: {0}")]
    NumericalWeldFailure(String),
    #[error("welding not monotone at sample {0}")]
    MonotonicityViolated(usize),
    #[error("welding unstable: {0}")]
    WeldingUnstable(String),
    #[error("derivative unstable at {0}")]
    DerivativeUnstable(String),
    #[error("integral diverging: {0}")]
    IntegralDiverging(String),
    #[error("zeta tail not converged: residual {residual:e}")]
    TailNotConverged { residual: f64 },
    #[error("quadrature failed: {0}")]
    QuadratureFailed(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
