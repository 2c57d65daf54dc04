use thiserror::Error;

/// Errors raised by the PDE solver.
#[derive(Debug, Error)]
pub enum PdeError {
    /// Newton iteration on an implicit stage did not reach the requested
    /// residual: the nonlinearity is too stiff for the step size.
    #[error("newton-divergence: residual {residual:e} > tol {tol:e} after {iters} iterations at time step {step}")]
    NewtonDivergence {
        step: usize,
        iters: usize,
        residual: f64,
        tol: f64,
    },
    /// The tridiagonal Newton system lost diagonal dominance to the point of
    /// numerical singularity.
    #[error("singular-jacobian: pivot {pivot:e} at row {row}, time step {step}")]
    SingularJacobian { step: usize, row: usize, pivot: f64 },
}

/// Construction-time violations of the problem invariants.
#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("ic-boundary-violation: y0 must vanish at x=0 and x=1 (got y0(0)={at0:e}, y0(1)={at1:e})")]
    IcBoundaryViolation { at0: f64, at1: f64 },
    #[error("ic-range-violation: Ybox [{ymin}, {ymax}] does not strictly contain the range of y0 [{lo}, {hi}]")]
    IcRangeViolation { ymin: f64, ymax: f64, lo: f64, hi: f64 },
    #[error("lipschitz-underestimate: L_Y={given} is below the sampled bound {sampled} of df/dy on the box")]
    LipschitzUnderestimate { given: f64, sampled: f64 },
    #[error("invalid-horizon: T must be positive (got {0})")]
    InvalidHorizon(f64),
    #[error("invalid-box: {0}")]
    InvalidBox(String),
    #[error("nonpolynomial-variable: {poly} may only use variables {allowed}")]
    ForbiddenVariable { poly: String, allowed: String },
}

/// Errors from measure-level operations.
#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("grid-mismatch: fields live on different grids ({a} vs {b})")]
    GridMismatch { a: String, b: String },
    #[error("weights-not-normalized: cell ({i},{j}) has total weight {total} (expected 1 within {tol:e})")]
    WeightsNotNormalized { i: usize, j: usize, total: f64, tol: f64 },
    #[error("solver: {0}")]
    Solver(String),
}

/// Errors from the moment-relaxation layer.
#[derive(Debug, Error)]
pub enum RelaxError {
    #[error("degree-too-small: 2d = {two_d} cannot hold {what} of degree {deg}")]
    DegreeTooSmall { two_d: usize, what: String, deg: usize },
    #[error("numerical-breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("not-optimal: operation requires an optimal solution (status {0})")]
    NotOptimal(String),
}
