//! Problem definition and finite-difference solver for the scalar semilinear
//! reaction-diffusion equation
//!
//! ```text
//! ∂_t y − ∂_xx y = f(t, x, y)   on (0,T] × (0,1),
//! y(t,0) = y(t,1) = 0,           y(0,x) = y0(x),
//! ```
//!
//! together with the discrete weak-form and energy residuals of its
//! solutions and the Grönwall stability check for perturbed initial data.
//!
//! Discretization: method of lines with the 3-point Laplacian,
//! Crank–Nicolson by default (implicit Euler as fallback), Newton on the
//! nonlinear stage with a direct tridiagonal solve.

use crate::config;
use crate::error::{PdeError, ProblemError};
use crate::grid::{Field2, SpaceTimeGrid};
use crate::poly::{Polynomial, Var};
use crate::quad::trapezoid_1d;
use crate::testfn::{SpaceTestFn, TimeTestFn};
use crate::Scalar;

/// Closed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<S: Scalar> {
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: S, hi: S) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, v: S) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn width(&self) -> S {
        self.hi - self.lo
    }

    pub fn inflated(&self, factor: S) -> Self {
        let pad = self.width() * factor;
        Interval::new(self.lo - pad, self.hi + pad)
    }
}

/// Box for the derivative coordinates `(z0, z1) = (∂_t y, ∂_x y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBox<S: Scalar> {
    pub z0: Interval<S>,
    pub z1: Interval<S>,
}

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    CrankNicolson,
    ImplicitEuler,
}

impl Scheme {
    pub fn tag(self) -> &'static str {
        match self {
            Scheme::CrankNicolson => "crank-nicolson",
            Scheme::ImplicitEuler => "implicit-euler",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "crank-nicolson" => Some(Scheme::CrankNicolson),
            "implicit-euler" => Some(Scheme::ImplicitEuler),
            _ => None,
        }
    }
}

/// Problem data: horizon, polynomial reaction term and initial datum, state
/// and derivative boxes, one-sided Lipschitz constant.
///
/// The reaction term is restricted to polynomials (the measure relaxation
/// needs polynomial data); `r_exponent` records the integrability exponent
/// of the functional setting for documentation and is not used by the
/// numerics.
#[derive(Debug, Clone)]
pub struct PdeProblem<S: Scalar> {
    pub horizon: S,
    pub f: Polynomial<S>,
    pub y0: Polynomial<S>,
    pub ybox: Interval<S>,
    pub zbox: DerivativeBox<S>,
    pub l_y: S,
    pub r_exponent: f64,
}

impl<S: Scalar> PdeProblem<S> {
    pub fn new(
        horizon: S,
        f: Polynomial<S>,
        y0: Polynomial<S>,
        ybox: Interval<S>,
        zbox: DerivativeBox<S>,
        l_y: S,
        r_exponent: f64,
    ) -> Result<Self, ProblemError> {
        if horizon <= S::zero() {
            return Err(ProblemError::InvalidHorizon(horizon.to_f64().unwrap_or(f64::NAN)));
        }
        if !f.uses_only(&[Var::T, Var::X, Var::Y]) {
            return Err(ProblemError::ForbiddenVariable {
                poly: "f".into(),
                allowed: "t, x, y".into(),
            });
        }
        if !y0.uses_only(&[Var::X]) {
            return Err(ProblemError::ForbiddenVariable { poly: "y0".into(), allowed: "x".into() });
        }
        // Coefficient-level boundary check: y0(0) is the constant term,
        // y0(1) the coefficient sum.
        let at0 = y0.constant_term();
        let at1 = y0.coefficient_sum();
        if at0 != S::zero() || at1 != S::zero() {
            return Err(ProblemError::IcBoundaryViolation {
                at0: at0.to_f64().unwrap_or(f64::NAN),
                at1: at1.to_f64().unwrap_or(f64::NAN),
            });
        }
        if ybox.lo >= ybox.hi {
            return Err(ProblemError::InvalidBox("Ybox must have lo < hi".into()));
        }
        if zbox.z0.lo >= zbox.z0.hi || zbox.z1.lo >= zbox.z1.hi {
            return Err(ProblemError::InvalidBox("Zbox must have lo < hi per axis".into()));
        }
        let (r0, r1) = range_of_y0(&y0);
        if r0 <= ybox.lo || r1 >= ybox.hi {
            return Err(ProblemError::IcRangeViolation {
                ymin: ybox.lo.to_f64().unwrap_or(f64::NAN),
                ymax: ybox.hi.to_f64().unwrap_or(f64::NAN),
                lo: r0.to_f64().unwrap_or(f64::NAN),
                hi: r1.to_f64().unwrap_or(f64::NAN),
            });
        }
        let sampled = estimate_lipschitz(&f, horizon, ybox);
        if l_y < sampled - S::of(1e-12) {
            return Err(ProblemError::LipschitzUnderestimate {
                given: l_y.to_f64().unwrap_or(f64::NAN),
                sampled: sampled.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(PdeProblem { horizon, f, y0, ybox, zbox, l_y, r_exponent })
    }

    /// Convenience constructor that derives `L_Y` from the sampled bound.
    pub fn with_estimated_lipschitz(
        horizon: S,
        f: Polynomial<S>,
        y0: Polynomial<S>,
        ybox: Interval<S>,
        zbox: DerivativeBox<S>,
    ) -> Result<Self, ProblemError> {
        let l_y = estimate_lipschitz(&f, horizon, ybox);
        Self::new(horizon, f, y0, ybox, zbox, l_y, 2.0)
    }

    pub fn y0_samples(&self, grid: &SpaceTimeGrid<S>) -> Vec<S> {
        (0..grid.cols())
            .map(|j| self.y0.eval_txy(S::zero(), grid.x(j), S::zero()))
            .collect()
    }
}

/// Range of the initial datum over a dense sampling of `[0,1]`
/// (1025 nodes including both endpoints).
fn range_of_y0<S: Scalar>(y0: &Polynomial<S>) -> (S, S) {
    let n = 1024;
    let mut lo = S::infinity();
    let mut hi = S::neg_infinity();
    for j in 0..=n {
        let x = S::of_usize(j) / S::of_usize(n);
        let v = y0.eval_txy(S::zero(), x, S::zero());
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Upper bound for `∂f/∂y` over `[0,T] × [0,1] × Ybox`, sampled on a
/// 64×64×64 lattice and clipped below at zero: the constant entering the
/// exponential weights and the Grönwall bound only needs to dominate the
/// one-sided Lipschitz modulus.
pub fn estimate_lipschitz<S: Scalar>(f: &Polynomial<S>, horizon: S, ybox: Interval<S>) -> S {
    let fy = f.differentiate(Var::Y);
    if fy.is_zero() {
        return S::zero();
    }
    let n = config::LIPSCHITZ_SAMPLES;
    let mut max = S::zero();
    for it in 0..n {
        let t = horizon * S::of_usize(it) / S::of_usize(n - 1);
        for ix in 0..n {
            let x = S::of_usize(ix) / S::of_usize(n - 1);
            for iy in 0..n {
                let y = ybox.lo + ybox.width() * S::of_usize(iy) / S::of_usize(n - 1);
                max = max.max(fy.eval_txy(t, x, y));
            }
        }
    }
    max.max(S::zero())
}

/// Discrete solution: nodal state values and second-order-consistent
/// derivative tables.
#[derive(Debug, Clone)]
pub struct FieldSolution<S: Scalar> {
    pub y: Field2<S>,
    pub dty: Field2<S>,
    pub dxy: Field2<S>,
    pub grid: SpaceTimeGrid<S>,
    pub scheme: Scheme,
    /// Set when a value left `Ybox` during the march; the solve still
    /// returns its data.
    pub range_escape: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions<S: Scalar> {
    pub scheme: Scheme,
    pub newton_tol: S,
    pub newton_max_iter: usize,
}

impl<S: Scalar> Default for SolveOptions<S> {
    fn default() -> Self {
        SolveOptions {
            scheme: Scheme::CrankNicolson,
            newton_tol: S::of(config::NEWTON_TOL),
            newton_max_iter: config::NEWTON_MAX_ITER,
        }
    }
}

/// Solve the problem on the grid, sampling the polynomial initial datum.
pub fn solve<S: Scalar>(
    problem: &PdeProblem<S>,
    grid: &SpaceTimeGrid<S>,
    opts: SolveOptions<S>,
) -> Result<FieldSolution<S>, PdeError> {
    let y0 = problem.y0_samples(grid);
    solve_from_samples(problem, grid, opts, &y0)
}

/// Solve with tabulated initial data (validation entry point: lets exact
/// non-polynomial eigenfunctions like `sin(πx)` drive oracle tests while the
/// problem definition itself stays polynomial).
pub fn solve_from_samples<S: Scalar>(
    problem: &PdeProblem<S>,
    grid: &SpaceTimeGrid<S>,
    opts: SolveOptions<S>,
    y0_row: &[S],
) -> Result<FieldSolution<S>, PdeError> {
    assert_eq!(y0_row.len(), grid.cols(), "initial data must cover all space nodes");
    assert!(opts.newton_tol > S::zero());
    let nx = grid.nx;
    let dt = grid.dt;
    let fy = problem.f.differentiate(Var::Y);

    let mut y = Field2::zeros(grid.rows(), grid.cols());
    y.row_mut(0).copy_from_slice(y0_row);
    y[(0, 0)] = S::zero();
    y[(0, nx + 1)] = S::zero();

    // Damped startup for the trapezoidal scheme: the first two steps run as
    // implicit-Euler half-steps, which kills the weakly damped transient
    // that otherwise pollutes the time-derivative table near t = 0.
    let startup_steps = match opts.scheme {
        Scheme::CrankNicolson => 2,
        Scheme::ImplicitEuler => 0,
    };

    for step in 0..grid.nt {
        let t_old = grid.t(step);
        let prev = y.row(step).to_vec();
        let next = if step < startup_steps && opts.scheme == Scheme::CrankNicolson {
            let half = dt * S::half();
            let mid = advance_stage(problem, grid, &fy, &prev, t_old, half, S::one(), opts, step)?;
            advance_stage(problem, grid, &fy, &mid, t_old + half, half, S::one(), opts, step)?
        } else {
            let theta = match opts.scheme {
                Scheme::CrankNicolson => S::half(),
                Scheme::ImplicitEuler => S::one(),
            };
            advance_stage(problem, grid, &fy, &prev, t_old, dt, theta, opts, step)?
        };
        y.row_mut(step + 1).copy_from_slice(&next);
    }

    let (dty, dxy) = compute_derivatives(&y, grid);
    let mut range_escape = false;
    for i in 0..grid.rows() {
        for v in y.row(i) {
            if !problem.ybox.contains(*v) {
                range_escape = true;
            }
        }
    }
    Ok(FieldSolution { y, dty, dxy, grid: grid.clone(), scheme: opts.scheme, range_escape })
}

/// One θ-stage of length `dt` from `t_old`: solve
/// `u − θ·dt·(Lu + f(t_new, u)) = prev + (1−θ)·dt·(L prev + f(t_old, prev))`
/// by Newton with a direct tridiagonal solve.
#[allow(clippy::too_many_arguments)]
fn advance_stage<S: Scalar>(
    problem: &PdeProblem<S>,
    grid: &SpaceTimeGrid<S>,
    fy: &Polynomial<S>,
    prev: &[S],
    t_old: S,
    dt: S,
    theta: S,
    opts: SolveOptions<S>,
    step: usize,
) -> Result<Vec<S>, PdeError> {
    let nx = grid.nx;
    let dx2 = grid.dx * grid.dx;
    let t_new = t_old + dt;
    let explicit_weight = (S::one() - theta) * dt;

    let mut explicit = vec![S::zero(); nx + 2];
    for j in 1..=nx {
        let lap = (prev[j - 1] - S::two() * prev[j] + prev[j + 1]) / dx2;
        let fe = problem.f.eval_txy(t_old, grid.x(j), prev[j]);
        explicit[j] = prev[j] + explicit_weight * (lap + fe);
    }

    let mut u = prev.to_vec();
    u[0] = S::zero();
    u[nx + 1] = S::zero();
    let mut rhs = vec![S::zero(); nx];
    let mut diag = vec![S::zero(); nx];
    let mut off = vec![S::zero(); nx];

    let mut residual = S::infinity();
    for _iter in 0..=opts.newton_max_iter {
        residual = S::zero();
        for j in 1..=nx {
            let lap = (u[j - 1] - S::two() * u[j] + u[j + 1]) / dx2;
            let fv = problem.f.eval_txy(t_new, grid.x(j), u[j]);
            let g = u[j] - dt * theta * (lap + fv) - explicit[j];
            rhs[j - 1] = -g;
            residual = residual.max(g.abs());
        }
        if residual <= opts.newton_tol {
            break;
        }
        for j in 1..=nx {
            let fyv = fy.eval_txy(t_new, grid.x(j), u[j]);
            diag[j - 1] = S::one() + S::two() * dt * theta / dx2 - dt * theta * fyv;
            off[j - 1] = -dt * theta / dx2;
        }
        let delta = thomas_solve(&off, &mut diag.clone(), &off, &mut rhs.clone())
            .map_err(|(row, pivot)| PdeError::SingularJacobian { step, row, pivot })?;
        for j in 1..=nx {
            u[j] += delta[j - 1];
        }
    }
    if residual > opts.newton_tol {
        return Err(PdeError::NewtonDivergence {
            step,
            iters: opts.newton_max_iter,
            residual: residual.to_f64().unwrap_or(f64::NAN),
            tol: opts.newton_tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(u)
}

/// Thomas algorithm for a tridiagonal system; reports the failing pivot.
fn thomas_solve<S: Scalar>(
    lower: &[S],
    diag: &mut [S],
    upper: &[S],
    rhs: &mut [S],
) -> Result<Vec<S>, (usize, f64)> {
    let n = diag.len();
    let tiny = S::of(1e-300);
    for k in 1..n {
        if diag[k - 1].abs() <= tiny {
            return Err((k - 1, diag[k - 1].to_f64().unwrap_or(0.0)));
        }
        let m = lower[k] / diag[k - 1];
        diag[k] = diag[k] - m * upper[k - 1];
        rhs[k] = rhs[k] - m * rhs[k - 1];
    }
    if diag[n - 1].abs() <= tiny {
        return Err((n - 1, diag[n - 1].to_f64().unwrap_or(0.0)));
    }
    let mut x = vec![S::zero(); n];
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for k in (0..n - 1).rev() {
        x[k] = (rhs[k] - upper[k] * x[k + 1]) / diag[k];
    }
    Ok(x)
}

/// Second-order derivative tables: central differences at interior nodes,
/// one-sided second-order stencils on the first/last row and column.
pub fn compute_derivatives<S: Scalar>(
    y: &Field2<S>,
    grid: &SpaceTimeGrid<S>,
) -> (Field2<S>, Field2<S>) {
    let rows = grid.rows();
    let cols = grid.cols();
    assert_eq!(y.rows(), rows);
    assert_eq!(y.cols(), cols);
    let two_dt = S::two() * grid.dt;
    let two_dx = S::two() * grid.dx;
    let three = S::of(3.0);
    let four = S::of(4.0);

    let dty = Field2::from_fn(rows, cols, |i, j| {
        if i == 0 {
            (-three * y[(0, j)] + four * y[(1, j)] - y[(2, j)]) / two_dt
        } else if i == rows - 1 {
            (three * y[(i, j)] - four * y[(i - 1, j)] + y[(i - 2, j)]) / two_dt
        } else {
            (y[(i + 1, j)] - y[(i - 1, j)]) / two_dt
        }
    });
    let dxy = Field2::from_fn(rows, cols, |i, j| {
        if j == 0 {
            (-three * y[(i, 0)] + four * y[(i, 1)] - y[(i, 2)]) / two_dx
        } else if j == cols - 1 {
            (three * y[(i, j)] - four * y[(i, j - 1)] + y[(i, j - 2)]) / two_dx
        } else {
            (y[(i, j + 1)] - y[(i, j - 1)]) / two_dx
        }
    });
    (dty, dxy)
}

/// Evaluate a polynomial in `(t, x, y, z0, z1)` at every node of a solution,
/// substituting the solution's state and derivative tables. Shared by the
/// solution-level residuals and, through the Dirac lift, by the
/// measure-level suites, so that the two routes agree bit for bit.
pub fn eval_on_solution<S: Scalar>(sol: &FieldSolution<S>, g: &Polynomial<S>) -> Field2<S> {
    let grid = &sol.grid;
    Field2::from_fn(grid.rows(), grid.cols(), |i, j| {
        g.eval(&[grid.t(i), grid.x(j), sol.y[(i, j)], sol.dty[(i, j)], sol.dxy[(i, j)]])
    })
}

pub(crate) mod weakform {
    //! Quadrature assembly of the weak-form entries, shared between the
    //! solution-level residuals and the measure-level suites.

    use super::*;

    /// `∬ φ (v·a + v′·b − v·c) dx dt` by composite trapezoid.
    pub fn weak_entry<S: Scalar>(
        grid: &SpaceTimeGrid<S>,
        phi: &[S],
        v: &[S],
        dv: &[S],
        a: &Field2<S>,
        b: &Field2<S>,
        c: &Field2<S>,
    ) -> S {
        let wt = grid.time_weights();
        let wx = grid.space_weights();
        let mut acc = S::zero();
        for i in 0..grid.rows() {
            let mut row = S::zero();
            for j in 0..grid.cols() {
                let integrand = v[j] * a[(i, j)] + dv[j] * b[(i, j)] - v[j] * c[(i, j)];
                row = row + wx[j] * integrand;
            }
            acc = acc + wt[i] * (phi[i] * row);
        }
        acc
    }

    /// `∬ (φ·a − ½ φ′·b − φ·c) dx dt` by composite trapezoid.
    pub fn dissipation_entry<S: Scalar>(
        grid: &SpaceTimeGrid<S>,
        phi: &[S],
        dphi: &[S],
        a: &Field2<S>,
        b: &Field2<S>,
        c: &Field2<S>,
    ) -> S {
        let wt = grid.time_weights();
        let wx = grid.space_weights();
        let mut acc = S::zero();
        for i in 0..grid.rows() {
            let mut row = S::zero();
            for j in 0..grid.cols() {
                let integrand =
                    phi[i] * a[(i, j)] - S::half() * dphi[i] * b[(i, j)] - phi[i] * c[(i, j)];
                row = row + wx[j] * integrand;
            }
            acc = acc + wt[i] * row;
        }
        acc
    }

    /// `∬ (∂ψ·a + ψ·b) dx dt` for ψ(t,x) = φ(t)v(x); the caller picks which
    /// factor is differentiated.
    pub fn ibp_entry<S: Scalar>(
        grid: &SpaceTimeGrid<S>,
        phi_a: &[S],
        v_a: &[S],
        phi_b: &[S],
        v_b: &[S],
        a: &Field2<S>,
        b: &Field2<S>,
    ) -> S {
        let wt = grid.time_weights();
        let wx = grid.space_weights();
        let mut acc = S::zero();
        for i in 0..grid.rows() {
            let mut row = S::zero();
            for j in 0..grid.cols() {
                row = row + wx[j] * (phi_a[i] * v_a[j] * a[(i, j)] + phi_b[i] * v_b[j] * b[(i, j)]);
            }
            acc = acc + wt[i] * row;
        }
        acc
    }
}

fn poly_z0<S: Scalar>() -> Polynomial<S> {
    Polynomial::var(Var::Z0)
}

fn poly_z1<S: Scalar>() -> Polynomial<S> {
    Polynomial::var(Var::Z1)
}

/// Weak-formulation residual `∬ φ (v ∂_t y + v′ ∂_x y − v f(t,x,y)) dx dt`.
///
/// Vanishes at the order of the scheme for a converged solve as the grid is
/// refined.
pub fn weak_residual<S: Scalar>(
    sol: &FieldSolution<S>,
    problem: &PdeProblem<S>,
    v: &SpaceTestFn<S>,
    phi: &TimeTestFn<S>,
) -> S {
    let grid = &sol.grid;
    let (phi_v, _) = phi.sample(grid.nt, grid.dt);
    let (v_v, dv_v) = v.sample(grid.nx, grid.dx);
    let a = eval_on_solution(sol, &poly_z0());
    let b = eval_on_solution(sol, &poly_z1());
    let c = eval_on_solution(sol, &problem.f);
    weakform::weak_entry(grid, &phi_v, &v_v, &dv_v, &a, &b, &c)
}

/// First energy-identity residual: the weak formulation of `y²` with the
/// source `2 y f − 2 (∂_x y)²`, i.e.
/// `∬ φ (v ∂_t(y²) + v′ ∂_x(y²) − 2 v y f + 2 v (∂_x y)²) dx dt`.
pub fn energy_residual_m2<S: Scalar>(
    sol: &FieldSolution<S>,
    problem: &PdeProblem<S>,
    v: &SpaceTestFn<S>,
    phi: &TimeTestFn<S>,
) -> S {
    let grid = &sol.grid;
    let (phi_v, _) = phi.sample(grid.nt, grid.dt);
    let (v_v, dv_v) = v.sample(grid.nx, grid.dx);
    let y = Polynomial::var(Var::Y);
    let two_y = y.scale(S::two());
    let a_poly = &two_y * &poly_z0(); // ∂_t(y²) = 2 y ∂_t y
    let b_poly = &two_y * &poly_z1(); // ∂_x(y²) = 2 y ∂_x y
    let c_poly = &(&two_y * &problem.f) - &poly_z1().pow(2).scale(S::two());
    let a = eval_on_solution(sol, &a_poly);
    let b = eval_on_solution(sol, &b_poly);
    let c = eval_on_solution(sol, &c_poly);
    weakform::weak_entry(grid, &phi_v, &v_v, &dv_v, &a, &b, &c)
}

/// Second energy-identity (dissipation) residual:
/// `∬ φ (∂_t y)² − ½ φ′ (∂_x y)² − φ ∂_t y · f dx dt`.
pub fn energy_residual_dissipation<S: Scalar>(
    sol: &FieldSolution<S>,
    problem: &PdeProblem<S>,
    phi: &TimeTestFn<S>,
) -> S {
    let grid = &sol.grid;
    let (phi_v, dphi_v) = phi.sample(grid.nt, grid.dt);
    let a = eval_on_solution(sol, &poly_z0().pow(2));
    let b = eval_on_solution(sol, &poly_z1().pow(2));
    let c = eval_on_solution(sol, &(&poly_z0() * &problem.f));
    weakform::dissipation_entry(grid, &phi_v, &dphi_v, &a, &b, &c)
}

/// Result of the perturbed-initial-data stability check.
#[derive(Debug, Clone)]
pub struct GronwallCheck<S: Scalar> {
    /// `‖y1(t_i) − y2(t_i)‖²_{L²}`
    pub lhs: Vec<S>,
    /// `e^{2 t_i (L_Y − C_Ω)} ‖Δy0‖²_{L²}`
    pub rhs: Vec<S>,
    pub ok: bool,
}

/// Solve with `y0` and `y0 + perturbation` and compare the squared L²
/// distance of the trajectories against the exponential envelope
/// `e^{2t(L_Y − C_Ω)}‖Δy0‖²`, with a fixed relative discretization slack.
pub fn gronwall_stability_check<S: Scalar>(
    problem: &PdeProblem<S>,
    grid: &SpaceTimeGrid<S>,
    perturbation: &Polynomial<S>,
    c_omega: S,
) -> Result<GronwallCheck<S>, PdeError> {
    assert!(perturbation.uses_only(&[Var::X]), "perturbation must be a polynomial in x");
    assert_eq!(perturbation.constant_term(), S::zero(), "perturbation must vanish at x=0");
    assert_eq!(perturbation.coefficient_sum(), S::zero(), "perturbation must vanish at x=1");

    let opts = SolveOptions::default();
    let base = solve(problem, grid, opts)?;
    let y0p: Vec<S> = (0..grid.cols())
        .map(|j| {
            let x = grid.x(j);
            problem.y0.eval_txy(S::zero(), x, S::zero())
                + perturbation.eval_txy(S::zero(), x, S::zero())
        })
        .collect();
    let pert = solve_from_samples(problem, grid, opts, &y0p)?;

    let mut lhs = Vec::with_capacity(grid.rows());
    for i in 0..grid.rows() {
        let sq: Vec<S> = (0..grid.cols())
            .map(|j| {
                let d = base.y[(i, j)] - pert.y[(i, j)];
                d * d
            })
            .collect();
        lhs.push(trapezoid_1d(&sq, grid.dx));
    }
    let rate = S::two() * (problem.l_y - c_omega);
    let rhs: Vec<S> = (0..grid.rows()).map(|i| (rate * grid.t(i)).exp() * lhs[0]).collect();
    let slack = S::one() + S::of(config::GRONWALL_SLACK);
    let ok = lhs
        .iter()
        .zip(rhs.iter())
        .all(|(&l, &r)| l <= r * slack + S::of(1e-300));
    Ok(GronwallCheck { lhs, rhs, ok })
}

/// One enlargement pass for the state box: solve once, inflate the observed
/// range by 20 %, and re-derive the Lipschitz constant on the new box.
pub fn enlarge_ybox<S: Scalar>(
    problem: &PdeProblem<S>,
    grid: &SpaceTimeGrid<S>,
) -> Result<PdeProblem<S>, PdeError> {
    let sol = solve(problem, grid, SolveOptions::default())?;
    let lo = sol.y.min();
    let hi = sol.y.max();
    let observed = Interval::new(lo, hi);
    let pad = observed.width().max(S::of(1e-6));
    let ybox = Interval::new(lo - S::of(0.2) * pad, hi + S::of(0.2) * pad);
    let l_y = estimate_lipschitz(&problem.f, problem.horizon, ybox);
    Ok(PdeProblem { ybox, l_y, ..problem.clone() })
}

/// Derivative box from the observed derivative range of a solve, inflated by
/// 50 % per side.
pub fn derive_zbox<S: Scalar>(sol: &FieldSolution<S>) -> DerivativeBox<S> {
    let box_of = |f: &Field2<S>| {
        let iv = Interval::new(f.min(), f.max());
        let pad = iv.width().max(S::of(1e-6));
        Interval::new(iv.lo - S::half() * pad, iv.hi + S::half() * pad)
    };
    DerivativeBox { z0: box_of(&sol.dty), z1: box_of(&sol.dxy) }
}
