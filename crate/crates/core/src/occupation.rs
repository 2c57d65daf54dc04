//! Occupation-measure lifts on `Q_T × Y × Z` with boundary measures on the
//! three components of `∂Q_T`, and the corresponding identity residuals.
//!
//! The boundary of `Q_T = [0,T] × [0,1]` splits into the initial slice
//! `{0}×[0,1]`, the terminal slice `{T}×[0,1]`, and the lateral part
//! `[0,T]×{0,1}`. Outward normals in the `(t,x)` plane: `(−1,0)` on the
//! initial slice, `(+1,0)` on the terminal slice, `(0,−1)` at `x=0` and
//! `(0,+1)` at `x=1`. The surface measure is one-dimensional Lebesgue on
//! each component, so the component masses are `1`, `1` and `2T`.
//!
//! Corner points belong to two components at once but carry zero surface
//! measure; the convention here keeps them in every adjacent component's
//! quadrature, with atoms built from the same solution traces so that
//! reassigning a corner between components changes nothing.

use crate::error::MeasureError;
use crate::pde::{weakform, FieldSolution, PdeProblem};
use crate::poly::{Polynomial, Var};
use crate::quad::{gauss_legendre, trapezoid_1d, trapezoid_2d};
use crate::report::{Family, ResidualEntry, ResidualReport};
use crate::testfn::TimeTestFn;
use crate::young::{CellMeasure, YoungField};
use crate::Scalar;

/// Boundary component of `∂Q_T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryComponent {
    /// `{0} × [0,1]`
    Initial,
    /// `{T} × [0,1]`
    Terminal,
    /// `[0,T] × {0,1}`
    Lateral,
}

/// Normals and surface masses of the decomposition, instantiated for the
/// interval domain.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryDecomposition<S: Scalar> {
    pub horizon: S,
}

impl<S: Scalar> BoundaryDecomposition<S> {
    pub fn new(horizon: S) -> Self {
        BoundaryDecomposition { horizon }
    }

    /// Time component of the outward normal.
    pub fn eta0(&self, c: BoundaryComponent) -> S {
        match c {
            BoundaryComponent::Initial => -S::one(),
            BoundaryComponent::Terminal => S::one(),
            BoundaryComponent::Lateral => S::zero(),
        }
    }

    /// Space component of the outward normal on the lateral part;
    /// `right = true` is the `x = 1` line.
    pub fn eta1(&self, c: BoundaryComponent, right: bool) -> S {
        match c {
            BoundaryComponent::Lateral => {
                if right {
                    S::one()
                } else {
                    -S::one()
                }
            }
            _ => S::zero(),
        }
    }

    /// Surface measure of the component.
    pub fn sigma_mass(&self, c: BoundaryComponent) -> S {
        match c {
            BoundaryComponent::Initial | BoundaryComponent::Terminal => S::one(),
            BoundaryComponent::Lateral => S::two() * self.horizon,
        }
    }
}

/// Interior Young field together with per-component boundary measures, each
/// cell a probability measure so the `(t,x)`-marginals are the discrete
/// Lebesgue and surface measures.
#[derive(Debug, Clone)]
pub struct OccupationLift<S: Scalar> {
    pub interior: YoungField<S>,
    /// along `x` at `t = 0`
    pub q1: Vec<CellMeasure<S>>,
    /// along `x` at `t = T`
    pub q2: Vec<CellMeasure<S>>,
    /// along `t` at `x = 0`
    pub q3_left: Vec<CellMeasure<S>>,
    /// along `t` at `x = 1`
    pub q3_right: Vec<CellMeasure<S>>,
}

/// Direction of the occupation integration-by-parts identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Time,
    Space,
}

/// Build the lift of a Young field over a solution: boundary atoms are the
/// solution traces, with the lateral atoms pinned to the Dirichlet value
/// `(0, 0, ∂_x y)`.
pub fn lift_occupation<S: Scalar>(
    field: &YoungField<S>,
    sol: &FieldSolution<S>,
) -> Result<OccupationLift<S>, MeasureError> {
    if !field.same_grid(&sol.grid) {
        return Err(MeasureError::GridMismatch {
            a: field.grid.shape_label(),
            b: sol.grid.shape_label(),
        });
    }
    let grid = &sol.grid;
    let nt = grid.nt;
    let last = grid.cols() - 1;
    let q1 = (0..grid.cols())
        .map(|j| CellMeasure::dirac(sol.y[(0, j)], sol.dty[(0, j)], sol.dxy[(0, j)]))
        .collect();
    let q2 = (0..grid.cols())
        .map(|j| CellMeasure::dirac(sol.y[(nt, j)], sol.dty[(nt, j)], sol.dxy[(nt, j)]))
        .collect();
    let q3_left = (0..grid.rows())
        .map(|i| CellMeasure::dirac(S::zero(), S::zero(), sol.dxy[(i, 0)]))
        .collect();
    let q3_right = (0..grid.rows())
        .map(|i| CellMeasure::dirac(S::zero(), S::zero(), sol.dxy[(i, last)]))
        .collect();
    Ok(OccupationLift { interior: field.clone(), q1, q2, q3_right, q3_left })
}

impl<S: Scalar> OccupationLift<S> {
    /// Pairing of a polynomial against one initial/terminal boundary
    /// component: trapezoid in `x` of the per-cell expectations.
    fn pair_time_slice(&self, cells: &[CellMeasure<S>], t: S, g: &Polynomial<S>) -> S {
        let grid = &self.interior.grid;
        let vals: Vec<S> = (0..grid.cols())
            .map(|j| cells[j].pair(t, grid.x(j), g))
            .collect();
        trapezoid_1d(&vals, grid.dx)
    }

    /// Pairing against one lateral line (`x = 0` or `x = 1`): trapezoid in
    /// `t`.
    fn pair_lateral(&self, right: bool, g: &Polynomial<S>) -> S {
        let grid = &self.interior.grid;
        let x = if right { S::one() } else { S::zero() };
        let cells = if right { &self.q3_right } else { &self.q3_left };
        let vals: Vec<S> = (0..grid.rows()).map(|i| cells[i].pair(grid.t(i), x, g)).collect();
        trapezoid_1d(&vals, grid.dt)
    }

    /// Total interior mass `∬ ⟨1⟩ dx dt`.
    pub fn interior_mass(&self) -> S {
        let ones = self.interior.pair(&Polynomial::one());
        trapezoid_2d(&self.interior.grid, &ones)
    }

    /// Masses of the three boundary measures `(∂Q1, ∂Q2, ∂Q3)`.
    pub fn boundary_masses(&self) -> (S, S, S) {
        let one = Polynomial::one();
        let t_end = self.interior.grid.horizon;
        (
            self.pair_time_slice(&self.q1, S::zero(), &one),
            self.pair_time_slice(&self.q2, t_end, &one),
            self.pair_lateral(false, &one) + self.pair_lateral(true, &one),
        )
    }
}

/// Occupation integration-by-parts residual for a polynomial test function
/// `φ(t,x,y)`:
/// time direction `∫(∂_tφ + z0 ∂_yφ) dμ̂ − ∫ φ η0 dμ̂_∂`,
/// space direction `∫(∂_xφ + z1 ∂_yφ) dμ̂ − ∫ φ η1 dμ̂_∂`.
pub fn occupation_ibp_residual<S: Scalar>(
    lift: &OccupationLift<S>,
    phi: &Polynomial<S>,
    direction: Direction,
) -> S {
    assert!(phi.uses_only(&[Var::T, Var::X, Var::Y]), "test function must be polynomial in (t,x,y)");
    let grid = &lift.interior.grid;
    let horizon = grid.horizon;
    match direction {
        Direction::Time => {
            let integrand =
                &phi.differentiate(Var::T) + &(&Polynomial::var(Var::Z0) * &phi.differentiate(Var::Y));
            let interior = trapezoid_2d(grid, &lift.interior.pair(&integrand));
            let boundary = lift.pair_time_slice(&lift.q2, horizon, phi)
                - lift.pair_time_slice(&lift.q1, S::zero(), phi);
            interior - boundary
        }
        Direction::Space => {
            let integrand =
                &phi.differentiate(Var::X) + &(&Polynomial::var(Var::Z1) * &phi.differentiate(Var::Y));
            let interior = trapezoid_2d(grid, &lift.interior.pair(&integrand));
            let boundary = lift.pair_lateral(true, phi) - lift.pair_lateral(false, phi);
            interior - boundary
        }
    }
}

/// Occupation weak-formulation residual for `φ(t,x,y)`:
/// `∫ [φ (z0 − f) + (∂_xφ + z1 ∂_yφ) z1] dμ̂ − ∫ φ z1 η1 dμ̂_∂`.
pub fn occupation_weak_residual<S: Scalar>(
    lift: &OccupationLift<S>,
    problem: &PdeProblem<S>,
    phi: &Polynomial<S>,
) -> S {
    assert!(phi.uses_only(&[Var::T, Var::X, Var::Y]));
    let grid = &lift.interior.grid;
    let z0 = Polynomial::var(Var::Z0);
    let z1 = Polynomial::var(Var::Z1);
    let integrand = &(phi * &(&z0 - &problem.f))
        + &(&(&phi.differentiate(Var::X) + &(&z1 * &phi.differentiate(Var::Y))) * &z1);
    let interior = trapezoid_2d(grid, &lift.interior.pair(&integrand));
    let phi_z1 = phi * &z1;
    let boundary = lift.pair_lateral(true, &phi_z1) - lift.pair_lateral(false, &phi_z1);
    interior - boundary
}

/// Occupation dissipation residual for `φ ∈ C¹[0,T]` (no vanishing
/// requirement):
/// `∫ [φ z0² − ½ φ′ z1² − φ z0 f] dμ̂ + ½ ∫ φ z1² η0 dμ̂_∂`.
///
/// The interior part reuses the same quadrature kernel as the second energy
/// identity, so for test functions vanishing at both endpoints the value
/// agrees with the corresponding dissipation entry to rounding.
pub fn occupation_dissipation_residual<S: Scalar>(
    lift: &OccupationLift<S>,
    problem: &PdeProblem<S>,
    phi: &TimeTestFn<S>,
) -> S {
    let grid = &lift.interior.grid;
    let (phi_v, dphi_v) = phi.sample(grid.nt, grid.dt);
    let z0 = Polynomial::var(Var::Z0);
    let z1 = Polynomial::var(Var::Z1);
    let a = lift.interior.pair(&z0.pow(2));
    let b = lift.interior.pair(&z1.pow(2));
    let c = lift.interior.pair(&(&z0 * &problem.f));
    let interior = weakform::dissipation_entry(grid, &phi_v, &dphi_v, &a, &b, &c);

    let z1sq = z1.pow(2);
    let horizon = grid.horizon;
    let boundary = S::half()
        * (phi.value(horizon) * lift.pair_time_slice(&lift.q2, horizon, &z1sq)
            - phi.value(S::zero()) * lift.pair_time_slice(&lift.q1, S::zero(), &z1sq));
    interior + boundary
}

/// Initial, boundary, and normalization constraint residuals.
///
/// * initial: `∂Q1` pairings of `x^b y^c` against the exact integrals
///   `∫ x^b y0(x)^c dx`;
/// * lateral: pairings of `t^a x^e y^c` (`e ≤ 1`) against
///   `∫ φ(t,x,0) dσ`;
/// * normalization: pairings of `t^a x^b` against `∫ ψ dσ` per component.
pub fn marginal_residuals<S: Scalar>(
    lift: &OccupationLift<S>,
    problem: &PdeProblem<S>,
    max_degree: usize,
) -> Vec<ResidualReport<S>> {
    let grid = &lift.interior.grid;
    let horizon = grid.horizon;

    // ∫ x^b y0(x)^c dx in factored form with a Gauss rule of sufficient
    // order: exact for the polynomial integrand, stable for high powers
    let deg_y0 = problem.y0.total_degree().max(1);
    let gl_order = (max_degree * (deg_y0 + 1)) / 2 + 2;
    let (gl_nodes, gl_weights) = gauss_legendre::<S>(gl_order);
    let ic_exact = |b: usize, c: usize| -> S {
        let mut acc = S::zero();
        for (node, weight) in gl_nodes.iter().zip(gl_weights.iter()) {
            let x = (*node + S::one()) * S::half();
            let y = problem.y0.eval_txy(S::zero(), x, S::zero());
            acc = acc + *weight * x.powi(b as i32) * y.powi(c as i32);
        }
        acc * S::half()
    };
    let mut ic_entries = Vec::new();
    for total in 0..=max_degree {
        for b in 0..=total {
            let c = total - b;
            let phi = &Polynomial::var(Var::X).pow(b) * &Polynomial::var(Var::Y).pow(c);
            let pairing = lift.pair_time_slice(&lift.q1, S::zero(), &phi);
            let exact = ic_exact(b, c);
            ic_entries.push(ResidualEntry { indices: vec![b, c], value: pairing - exact });
        }
    }

    let mut bc_entries = Vec::new();
    for a in 0..=max_degree {
        for e in 0..=1usize.min(max_degree.saturating_sub(a)) {
            for c in 0..=max_degree.saturating_sub(a + e) {
                let phi = &(&Polynomial::var(Var::T).pow(a) * &Polynomial::var(Var::X).pow(e))
                    * &Polynomial::var(Var::Y).pow(c);
                let pairing = lift.pair_lateral(false, &phi) + lift.pair_lateral(true, &phi);
                // φ(t, x, 0) integrated over both lateral lines
                let phi0 = phi.eval_var(Var::Y, S::zero());
                let exact = (&phi0.eval_var(Var::X, S::zero()) + &phi0.eval_var(Var::X, S::one()))
                    .integrate_var(Var::T, S::zero(), horizon)
                    .constant_term();
                bc_entries.push(ResidualEntry { indices: vec![a, e, c], value: pairing - exact });
            }
        }
    }

    let mut norm_entries = Vec::new();
    for a in 0..=max_degree {
        for b in 0..=max_degree - a {
            let psi = &Polynomial::var(Var::T).pow(a) * &Polynomial::var(Var::X).pow(b);
            // initial component: t = 0
            let v1 = lift.pair_time_slice(&lift.q1, S::zero(), &psi)
                - psi
                    .eval_var(Var::T, S::zero())
                    .integrate_var(Var::X, S::zero(), S::one())
                    .constant_term();
            // terminal component: t = T
            let v2 = lift.pair_time_slice(&lift.q2, horizon, &psi)
                - psi
                    .eval_var(Var::T, horizon)
                    .integrate_var(Var::X, S::zero(), S::one())
                    .constant_term();
            // lateral component
            let v3 = lift.pair_lateral(false, &psi) + lift.pair_lateral(true, &psi)
                - (&psi.eval_var(Var::X, S::zero()) + &psi.eval_var(Var::X, S::one()))
                    .integrate_var(Var::T, S::zero(), horizon)
                    .constant_term();
            norm_entries.push(ResidualEntry { indices: vec![1, a, b], value: v1 });
            norm_entries.push(ResidualEntry { indices: vec![2, a, b], value: v2 });
            norm_entries.push(ResidualEntry { indices: vec![3, a, b], value: v3 });
        }
    }

    vec![
        ResidualReport::new(Family::OccIc, grid, ic_entries),
        ResidualReport::new(Family::OccBc, grid, bc_entries),
        ResidualReport::new(Family::OccNormalization, grid, norm_entries),
    ]
}

/// Residual suite over all monomials `t^a x^b y^c` of total degree ≤
/// `max_degree` for the three occupation identities that quantify over
/// polynomial test functions.
pub fn occupation_identity_suite<S: Scalar>(
    lift: &OccupationLift<S>,
    problem: &PdeProblem<S>,
    max_degree: usize,
    time_basis: &[TimeTestFn<S>],
) -> Vec<ResidualReport<S>> {
    let grid = &lift.interior.grid;
    let mut monos = Vec::new();
    for total in 0..=max_degree {
        for a in 0..=total {
            for b in 0..=total - a {
                let c = total - a - b;
                monos.push((a, b, c));
            }
        }
    }
    let phi_of = |(a, b, c): (usize, usize, usize)| {
        &(&Polynomial::var(Var::T).pow(a) * &Polynomial::var(Var::X).pow(b))
            * &Polynomial::var(Var::Y).pow(c)
    };
    let ibp_t: Vec<ResidualEntry<S>> = monos
        .iter()
        .map(|&m| ResidualEntry {
            indices: vec![m.0, m.1, m.2],
            value: occupation_ibp_residual(lift, &phi_of(m), Direction::Time),
        })
        .collect();
    let ibp_x: Vec<ResidualEntry<S>> = monos
        .iter()
        .map(|&m| ResidualEntry {
            indices: vec![m.0, m.1, m.2],
            value: occupation_ibp_residual(lift, &phi_of(m), Direction::Space),
        })
        .collect();
    let weak: Vec<ResidualEntry<S>> = monos
        .iter()
        .map(|&m| ResidualEntry {
            indices: vec![m.0, m.1, m.2],
            value: occupation_weak_residual(lift, problem, &phi_of(m)),
        })
        .collect();
    let diss: Vec<ResidualEntry<S>> = time_basis
        .iter()
        .enumerate()
        .map(|(p, phi)| ResidualEntry {
            indices: vec![p],
            value: occupation_dissipation_residual(lift, problem, phi),
        })
        .collect();
    let mut out = vec![
        ResidualReport::new(Family::OccIbpTime, grid, ibp_t),
        ResidualReport::new(Family::OccIbpSpace, grid, ibp_x),
        ResidualReport::new(Family::OccWeak, grid, weak),
        ResidualReport::new(Family::OccDissipation, grid, diss),
    ];
    out.extend(marginal_residuals(lift, problem, max_degree));
    out
}
