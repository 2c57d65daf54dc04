//! Residual suites for measure-valued solution candidates.
//!
//! A Young field is held against the discrete counterparts of four
//! constraint groups:
//!
//! * integration-by-parts identities linking `⟨β(y)⟩` with `⟨z β'(y)⟩`,
//! * the first-moment (m1) family: weak formulation, boundary and initial
//!   conditions,
//! * the second-moment (m2) family plus the dissipation identity,
//! * the dual-heat concentration certificate `∬ ŵ · g dx dt` built from a
//!   backward-source heat solve.
//!
//! On a Dirac lift every suite entry collapses to the corresponding
//! solution-level residual; on the symmetric two-atom field the m1 family
//! vanishes by exact cancellation while the m2 family stays bounded away
//! from zero, which is what separates the two notions of admissibility.

use rayon::prelude::*;

use crate::error::MeasureError;
use crate::grid::{Field2, SpaceTimeGrid};
use crate::pde::{
    self, weakform, DerivativeBox, FieldSolution, Interval, PdeProblem, SolveOptions,
};
use crate::poly::{Polynomial, Var};
use crate::quad::trapezoid_2d;
use crate::report::{Family, ResidualEntry, ResidualReport};
use crate::testfn::{SpaceTestFn, StateTestFn, TimeTestFn};
use crate::young::{squared_error_density, weighted_error_density, YoungField};
use crate::Scalar;

/// IBP residual in time for ψ(t,x) = φ(t)v(x):
/// `∬ φ′ v ⟨β(y)⟩ + φ v ⟨z0 β′(y)⟩ dx dt`.
pub fn ibp_residual_time<S: Scalar>(
    field: &YoungField<S>,
    beta: &StateTestFn<S>,
    phi: &TimeTestFn<S>,
    v: &SpaceTestFn<S>,
) -> S {
    let grid = &field.grid;
    let (phi_v, dphi_v) = phi.sample(grid.nt, grid.dt);
    let (v_v, _) = v.sample(grid.nx, grid.dx);
    let a = field.pair(&beta.beta);
    let b = field.pair(&(&Polynomial::var(Var::Z0) * &beta.beta_prime));
    weakform::ibp_entry(grid, &dphi_v, &v_v, &phi_v, &v_v, &a, &b)
}

/// IBP residual in space: `∬ φ v′ ⟨β(y)⟩ + φ v ⟨z1 β′(y)⟩ dx dt`.
pub fn ibp_residual_space<S: Scalar>(
    field: &YoungField<S>,
    beta: &StateTestFn<S>,
    phi: &TimeTestFn<S>,
    v: &SpaceTestFn<S>,
) -> S {
    let grid = &field.grid;
    let (phi_v, _) = phi.sample(grid.nt, grid.dt);
    let (v_v, dv_v) = v.sample(grid.nx, grid.dx);
    let a = field.pair(&beta.beta);
    let b = field.pair(&(&Polynomial::var(Var::Z1) * &beta.beta_prime));
    weakform::ibp_entry(grid, &phi_v, &dv_v, &phi_v, &v_v, &a, &b)
}

/// Both IBP families over a `β × φ × v` basis; entry indices are
/// `[beta, phi, v]`.
pub fn ibp_residual_suite<S: Scalar>(
    field: &YoungField<S>,
    state_basis: &[StateTestFn<S>],
    time_basis: &[TimeTestFn<S>],
    space_basis: &[SpaceTestFn<S>],
) -> Vec<ResidualReport<S>> {
    let grid = &field.grid;
    let mut idx = Vec::new();
    for b in 0..state_basis.len() {
        for p in 0..time_basis.len() {
            for q in 0..space_basis.len() {
                idx.push((b, p, q));
            }
        }
    }
    let time_entries: Vec<ResidualEntry<S>> = idx
        .par_iter()
        .map(|&(b, p, q)| ResidualEntry {
            indices: vec![b, p, q],
            value: ibp_residual_time(field, &state_basis[b], &time_basis[p], &space_basis[q]),
        })
        .collect();
    let space_entries: Vec<ResidualEntry<S>> = idx
        .par_iter()
        .map(|&(b, p, q)| ResidualEntry {
            indices: vec![b, p, q],
            value: ibp_residual_space(field, &state_basis[b], &time_basis[p], &space_basis[q]),
        })
        .collect();
    vec![
        ResidualReport::new(Family::IbpTime, grid, time_entries),
        ResidualReport::new(Family::IbpSpace, grid, space_entries),
    ]
}

fn boundary_max<S: Scalar>(arr: &Field2<S>) -> S {
    let mut max = S::zero();
    for i in 0..arr.rows() {
        max = max.max(arr[(i, 0)].abs());
        max = max.max(arr[(i, arr.cols() - 1)].abs());
    }
    max
}

fn initial_max_against<S: Scalar>(
    arr: &Field2<S>,
    grid: &SpaceTimeGrid<S>,
    target: impl Fn(S) -> S,
) -> S {
    let mut max = S::zero();
    for j in 0..grid.cols() {
        max = max.max((arr[(0, j)] - target(grid.x(j))).abs());
    }
    max
}

/// First-moment constraint family: weak entries
/// `∬ φ (v ⟨z0⟩ + v′ ⟨z1⟩ − v ⟨f⟩) dx dt` for every basis pair (the weak
/// derivatives of `m1` are the `z`-moments), plus the boundary and initial
/// deviations of `m1`.
pub fn mv_residual_suite<S: Scalar>(
    field: &YoungField<S>,
    problem: &PdeProblem<S>,
    time_basis: &[TimeTestFn<S>],
    space_basis: &[SpaceTestFn<S>],
) -> Vec<ResidualReport<S>> {
    assert!(!time_basis.is_empty() && !space_basis.is_empty());
    let grid = &field.grid;
    let a = field.pair(&Polynomial::var(Var::Z0));
    let b = field.pair(&Polynomial::var(Var::Z1));
    let c = field.pair(&problem.f);
    let m1 = field.pair(&Polynomial::var(Var::Y));

    let mut idx = Vec::new();
    for p in 0..time_basis.len() {
        for q in 0..space_basis.len() {
            idx.push((p, q));
        }
    }
    let weak_entries: Vec<ResidualEntry<S>> = idx
        .par_iter()
        .map(|&(p, q)| {
            let (phi_v, _) = time_basis[p].sample(grid.nt, grid.dt);
            let (v_v, dv_v) = space_basis[q].sample(grid.nx, grid.dx);
            ResidualEntry {
                indices: vec![p, q],
                value: weakform::weak_entry(grid, &phi_v, &v_v, &dv_v, &a, &b, &c),
            }
        })
        .collect();

    let ic = initial_max_against(&m1, grid, |x| problem.y0.eval_txy(S::zero(), x, S::zero()));
    let bc = boundary_max(&m1);
    vec![
        ResidualReport::new(Family::M1Weak, grid, weak_entries),
        ResidualReport::new(
            Family::M1Ic,
            grid,
            vec![ResidualEntry { indices: vec![], value: ic }],
        ),
        ResidualReport::new(
            Family::M1Bc,
            grid,
            vec![ResidualEntry { indices: vec![], value: bc }],
        ),
    ]
}

/// Second-moment constraint family and the dissipation identity: weak
/// entries `∬ φ (v ⟨2yz0⟩ + v′ ⟨2yz1⟩ − v m̂_f) dx dt`, boundary/initial
/// deviations of `m2` against `y0²`, and
/// `∬ φ ⟨z0²⟩ − ½ φ′ ⟨z1²⟩ − φ ⟨z0 f⟩ dx dt` per time test function.
pub fn emv_residual_suite<S: Scalar>(
    field: &YoungField<S>,
    problem: &PdeProblem<S>,
    time_basis: &[TimeTestFn<S>],
    space_basis: &[SpaceTestFn<S>],
) -> Vec<ResidualReport<S>> {
    assert!(!time_basis.is_empty() && !space_basis.is_empty());
    let grid = &field.grid;
    let y = Polynomial::var(Var::Y);
    let z0 = Polynomial::var(Var::Z0);
    let z1 = Polynomial::var(Var::Z1);
    let two_y = y.scale(S::two());
    let a = field.pair(&(&two_y * &z0));
    let b = field.pair(&(&two_y * &z1));
    let mfhat = &(&two_y * &problem.f) - &z1.pow(2).scale(S::two());
    let c = field.pair(&mfhat);
    let m2 = field.pair(&y.pow(2));

    let mut idx = Vec::new();
    for p in 0..time_basis.len() {
        for q in 0..space_basis.len() {
            idx.push((p, q));
        }
    }
    let weak_entries: Vec<ResidualEntry<S>> = idx
        .par_iter()
        .map(|&(p, q)| {
            let (phi_v, _) = time_basis[p].sample(grid.nt, grid.dt);
            let (v_v, dv_v) = space_basis[q].sample(grid.nx, grid.dx);
            ResidualEntry {
                indices: vec![p, q],
                value: weakform::weak_entry(grid, &phi_v, &v_v, &dv_v, &a, &b, &c),
            }
        })
        .collect();

    let dz0sq = field.pair(&z0.pow(2));
    let dz1sq = field.pair(&z1.pow(2));
    let dz0f = field.pair(&(&z0 * &problem.f));
    let diss_entries: Vec<ResidualEntry<S>> = (0..time_basis.len())
        .into_par_iter()
        .map(|p| {
            let (phi_v, dphi_v) = time_basis[p].sample(grid.nt, grid.dt);
            ResidualEntry {
                indices: vec![p],
                value: weakform::dissipation_entry(grid, &phi_v, &dphi_v, &dz0sq, &dz1sq, &dz0f),
            }
        })
        .collect();

    let ic = initial_max_against(&m2, grid, |x| {
        let v = problem.y0.eval_txy(S::zero(), x, S::zero());
        v * v
    });
    let bc = boundary_max(&m2);
    vec![
        ResidualReport::new(Family::M2Weak, grid, weak_entries),
        ResidualReport::new(
            Family::M2Ic,
            grid,
            vec![ResidualEntry { indices: vec![], value: ic }],
        ),
        ResidualReport::new(
            Family::M2Bc,
            grid,
            vec![ResidualEntry { indices: vec![], value: bc }],
        ),
        ResidualReport::new(Family::Dissipation, grid, diss_entries),
    ]
}

/// Output of the dual-heat certificate.
#[derive(Debug, Clone)]
pub struct CertificateReport<S: Scalar> {
    /// `∬ ŵ · g dx dt` with `ŵ = e^{−2tL_Y} ⟨(y−y*)²⟩`; vanishes for the
    /// Dirac lift of the reference and is positive for non-concentrated
    /// fields paired with a nontrivial nonnegative source.
    pub integral: S,
    /// Solution of the auxiliary heat problem with source `g(T−t, x)`.
    pub phi_g: Field2<S>,
    /// Minimum of `phi_g`; the discrete weak maximum principle keeps it
    /// nonnegative up to rounding.
    pub min_phi_g: S,
}

/// Concentration certificate: solve
/// `∂_t φ_g − ∂_xx φ_g = g(T−t,x)`, `φ_g(0)=0`, Dirichlet, and evaluate
/// `∬ ŵ g dx dt`.
///
/// The source must be nonnegative with vanishing boundary trace; the solve
/// reuses the reaction-diffusion machinery with the reaction term set to the
/// time-reversed source.
pub fn dual_heat_certificate<S: Scalar>(
    field: &YoungField<S>,
    reference: &FieldSolution<S>,
    problem: &PdeProblem<S>,
    g_source: &Polynomial<S>,
) -> Result<CertificateReport<S>, MeasureError> {
    assert!(g_source.uses_only(&[Var::T, Var::X]), "source must be a polynomial in (t, x)");
    let grid = &field.grid;
    if !field.same_grid(&reference.grid) {
        return Err(MeasureError::GridMismatch {
            a: grid.shape_label(),
            b: reference.grid.shape_label(),
        });
    }
    // g ≥ 0 on the grid (up to expansion rounding at the boundary zeros)
    for i in 0..grid.rows() {
        for j in 0..grid.cols() {
            debug_assert!(
                g_source.eval_txy(grid.t(i), grid.x(j), S::zero()) >= -S::of(1e-9),
                "certificate source must be nonnegative"
            );
        }
    }

    let w = squared_error_density(field, reference)?;
    let w_hat = weighted_error_density(&w, grid, problem.l_y);
    let integrand = Field2::from_fn(grid.rows(), grid.cols(), |i, j| {
        w_hat[(i, j)] * g_source.eval_txy(grid.t(i), grid.x(j), S::zero())
    });
    let integral = trapezoid_2d(grid, &integrand);

    // auxiliary heat problem with the time-reversed source as reaction term
    let reversed = g_source.substitute(
        Var::T,
        &(&Polynomial::constant(grid.horizon) - &Polynomial::var(Var::T)),
    );
    let big = S::of(1e30);
    let aux = PdeProblem::new(
        grid.horizon,
        reversed,
        Polynomial::zero(),
        Interval::new(-big, big),
        DerivativeBox { z0: Interval::new(-big, big), z1: Interval::new(-big, big) },
        S::zero(),
        2.0,
    )
    .expect("auxiliary heat problem is well formed");
    let phi_sol = pde::solve(&aux, grid, SolveOptions::default())
        .map_err(|e| MeasureError::Solver(e.to_string()))?;
    let min_phi_g = phi_sol.y.min();
    Ok(CertificateReport { integral, phi_g: phi_sol.y, min_phi_g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::{space_basis, state_basis, time_basis, BasisFamily};
    use crate::young::{counterexample_field, lift_dirac, BumpSpec};

    fn zero_problem(horizon: f64) -> PdeProblem<f64> {
        PdeProblem::with_estimated_lipschitz(
            horizon,
            Polynomial::zero(),
            Polynomial::zero(),
            Interval::new(-1.0, 1.0),
            DerivativeBox { z0: Interval::new(-1.0, 1.0), z1: Interval::new(-1.0, 1.0) },
        )
        .unwrap()
    }

    fn cubic_problem(horizon: f64) -> PdeProblem<f64> {
        // f = y³ with boxes containing the counterexample bump range
        PdeProblem::with_estimated_lipschitz(
            horizon,
            Polynomial::var(Var::Y).pow(3),
            Polynomial::zero(),
            Interval::new(-0.75, 0.75),
            DerivativeBox { z0: Interval::new(-4.0, 4.0), z1: Interval::new(-4.0, 4.0) },
        )
        .unwrap()
    }

    #[test]
    fn dirac_lift_of_zero_solution_gives_zero_everywhere() {
        let problem = zero_problem(1.0);
        let grid = SpaceTimeGrid::new(1.0, 8, 7);
        let sol = pde::solve(&problem, &grid, SolveOptions::default()).unwrap();
        let field = lift_dirac(&sol);
        let tb = time_basis(BasisFamily::PolyBump, 3, 1.0);
        let sb = space_basis(BasisFamily::PolyBump, 3);
        for report in mv_residual_suite(&field, &problem, &tb, &sb) {
            assert_eq!(report.max_abs, 0.0, "{:?}", report.family);
        }
        for report in emv_residual_suite(&field, &problem, &tb, &sb) {
            assert_eq!(report.max_abs, 0.0, "{:?}", report.family);
        }
        let st = state_basis(2);
        for report in ibp_residual_suite(&field, &st[1..].to_vec(), &tb, &sb) {
            // β without constant term vanishes at the zero atom
            assert_eq!(report.max_abs, 0.0, "{:?}", report.family);
        }
    }

    #[test]
    fn counterexample_m1_family_vanishes_m2_does_not() {
        let horizon = 1.0;
        let problem = cubic_problem(horizon);
        let grid = SpaceTimeGrid::new(horizon, 32, 31);
        let field = counterexample_field(&grid, BumpSpec::with_peak(0.5, horizon));
        let tb = time_basis(BasisFamily::PolyBump, 4, horizon);
        let sb = space_basis(BasisFamily::Sine, 4);
        let mv = mv_residual_suite(&field, &problem, &tb, &sb);
        for report in &mv {
            assert!(report.max_abs <= 1e-10, "{:?}: {}", report.family, report.max_abs);
        }
        let emv = emv_residual_suite(&field, &problem, &tb, &sb);
        let m2_weak = emv.iter().find(|r| r.family == Family::M2Weak).unwrap();
        assert!(m2_weak.max_abs > 1e-4, "m2 weak entries should be macroscopic: {}", m2_weak.max_abs);
    }

    #[test]
    fn certificate_zero_for_dirac_lift() {
        let problem = zero_problem(1.0);
        let grid = SpaceTimeGrid::new(1.0, 16, 15);
        let sol = pde::solve(&problem, &grid, SolveOptions::default()).unwrap();
        let field = lift_dirac(&sol);
        let g = BumpSpec::with_peak(1.0, 1.0).polynomial(1.0);
        let report = dual_heat_certificate(&field, &sol, &problem, &g).unwrap();
        assert_eq!(report.integral, 0.0);
        assert!(report.min_phi_g >= -1e-10, "max principle violated: {}", report.min_phi_g);
    }

    #[test]
    fn certificate_positive_for_counterexample_and_matches_closed_form() {
        let horizon = 1.0;
        let problem = cubic_problem(horizon);
        let grid = SpaceTimeGrid::new(horizon, 48, 47);
        let sol = pde::solve(&problem, &grid, SolveOptions::default()).unwrap();
        let field = counterexample_field(&grid, BumpSpec::with_peak(0.5, horizon));
        let g_src = BumpSpec::with_peak(1.0, horizon).polynomial(horizon);
        let report = dual_heat_certificate(&field, &sol, &problem, &g_src).unwrap();
        assert!(report.integral > 0.0);

        // same-rule quadrature of the closed forms: w = g², ŵ = e^{-2tL} g²
        let g = BumpSpec::with_peak(0.5, horizon).polynomial(horizon);
        let l_y = problem.l_y;
        let closed = Field2::from_fn(grid.rows(), grid.cols(), |i, j| {
            let t = grid.t(i);
            let x = grid.x(j);
            let gv: f64 = g.eval_txy(t, x, 0.0);
            let gs = g_src.eval_txy(t, x, 0.0);
            (-2.0 * t * l_y).exp() * gv * gv * gs
        });
        let oracle = trapezoid_2d(&grid, &closed);
        let rel = (report.integral - oracle).abs() / oracle.abs();
        assert!(rel <= 1e-8, "relative deviation {rel}");
    }

    #[test]
    fn certificate_zero_source() {
        let problem = zero_problem(1.0);
        let grid = SpaceTimeGrid::new(1.0, 8, 7);
        let sol = pde::solve(&problem, &grid, SolveOptions::default()).unwrap();
        let field = counterexample_field(&grid, BumpSpec::with_peak(0.2, 1.0));
        let report = dual_heat_certificate(&field, &sol, &problem, &Polynomial::zero()).unwrap();
        assert_eq!(report.integral, 0.0);
    }
}
