//! Shared fixtures: the heat and Allen–Cahn problems on the unit interval,
//! the tabulated eigenfunction initial data used for validation, and the
//! closed-form heat oracle.
#![allow(dead_code)] // each integration test uses its own subset

use mvpde::grid::SpaceTimeGrid;
use mvpde::pde::{
    solve_from_samples, DerivativeBox, FieldSolution, Interval, PdeProblem, SolveOptions,
};
use mvpde::poly::{Polynomial, Var};

pub const PI: f64 = std::f64::consts::PI;

/// `y0 = x(1−x)`
pub fn parabola_ic() -> Polynomial<f64> {
    let x = Polynomial::var(Var::X);
    &x - &x.pow(2)
}

/// `y0 = 16 x³(1−x)³`: vanishes with its Laplacian at both boundary points,
/// so the solve has full startup regularity and the residual suites see
/// clean second-order decay. Peak value 0.25 at the center.
pub fn smooth_ic() -> Polynomial<f64> {
    let x = Polynomial::var(Var::X);
    let one_minus = &Polynomial::one() - &x;
    (&x.pow(3) * &one_minus.pow(3)).scale(16.0)
}

/// Pure heat problem `f = 0`, compatible initial datum, `T = 0.25`.
pub fn heat_problem() -> PdeProblem<f64> {
    PdeProblem::with_estimated_lipschitz(
        0.25,
        Polynomial::zero(),
        smooth_ic(),
        Interval::new(-0.1, 0.35),
        DerivativeBox { z0: Interval::new(-8.0, 8.0), z1: Interval::new(-1.6, 1.6) },
    )
    .unwrap()
}

/// Heat problem with the parabola datum `x(1−x)` (kept for the assembly
/// ledger and the stability-check fixtures).
pub fn heat_parabola_problem() -> PdeProblem<f64> {
    PdeProblem::with_estimated_lipschitz(
        0.25,
        Polynomial::zero(),
        parabola_ic(),
        Interval::new(-0.1, 0.35),
        DerivativeBox { z0: Interval::new(-3.0, 3.0), z1: Interval::new(-1.6, 1.6) },
    )
    .unwrap()
}

/// Bistable reaction `f = y − y³`, compatible initial datum, `T = 0.5`.
pub fn allen_cahn_problem() -> PdeProblem<f64> {
    let y = Polynomial::var(Var::Y);
    PdeProblem::with_estimated_lipschitz(
        0.5,
        &y - &y.pow(3),
        smooth_ic(),
        Interval::new(-0.1, 0.6),
        DerivativeBox { z0: Interval::new(-8.0, 8.0), z1: Interval::new(-1.6, 1.6) },
    )
    .unwrap()
}

/// Allen–Cahn with the parabola datum, the configuration of the
/// Richardson self-oracle example.
pub fn allen_cahn_parabola_problem() -> PdeProblem<f64> {
    let y = Polynomial::var(Var::Y);
    PdeProblem::with_estimated_lipschitz(
        0.5,
        &y - &y.pow(3),
        parabola_ic(),
        Interval::new(-0.1, 0.6),
        DerivativeBox { z0: Interval::new(-3.0, 3.0), z1: Interval::new(-1.6, 1.6) },
    )
    .unwrap()
}

/// Cubic reaction `f = y³`, `y0 = 0`: the configuration whose unique
/// solution is identically zero while the symmetric two-atom field meets
/// every first-moment constraint.
pub fn cubic_zero_problem(horizon: f64) -> PdeProblem<f64> {
    PdeProblem::with_estimated_lipschitz(
        horizon,
        Polynomial::var(Var::Y).pow(3),
        Polynomial::zero(),
        Interval::new(-0.75, 0.75),
        DerivativeBox { z0: Interval::new(-4.0, 4.0), z1: Interval::new(-4.0, 4.0) },
    )
    .unwrap()
}

/// Tabulated `sin(πx)` initial data on a grid.
pub fn sine_ic_samples(grid: &SpaceTimeGrid<f64>) -> Vec<f64> {
    (0..grid.cols()).map(|j| (PI * grid.x(j)).sin()).collect()
}

/// Solve the heat problem from tabulated `sin(πx)` data; the continuum
/// solution is `e^{−π²t} sin(πx)`.
pub fn solve_heat_sine(grid: &SpaceTimeGrid<f64>) -> FieldSolution<f64> {
    let problem = heat_validation_problem();
    let ic = sine_ic_samples(grid);
    solve_from_samples(&problem, grid, SolveOptions::default(), &ic).unwrap()
}

/// Heat problem with a box wide enough for the unit-amplitude eigenfunction.
pub fn heat_validation_problem() -> PdeProblem<f64> {
    PdeProblem::with_estimated_lipschitz(
        0.25,
        Polynomial::zero(),
        parabola_ic(),
        Interval::new(-0.2, 1.2),
        DerivativeBox { z0: Interval::new(-12.0, 12.0), z1: Interval::new(-4.0, 4.0) },
    )
    .unwrap()
}

pub fn exact_heat(t: f64, x: f64) -> f64 {
    (-PI * PI * t).exp() * (PI * x).sin()
}

pub fn exact_heat_dt(t: f64, x: f64) -> f64 {
    -PI * PI * exact_heat(t, x)
}

pub fn exact_heat_dx(t: f64, x: f64) -> f64 {
    PI * (-PI * PI * t).exp() * (PI * x).cos()
}

/// Max-norm error of a solve against the closed-form heat solution.
pub fn heat_max_error(sol: &FieldSolution<f64>) -> f64 {
    let grid = &sol.grid;
    let mut err = 0.0_f64;
    for i in 0..grid.rows() {
        for j in 0..grid.cols() {
            err = err.max((sol.y[(i, j)] - exact_heat(grid.t(i), grid.x(j))).abs());
        }
    }
    err
}
