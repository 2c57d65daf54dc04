//! Parametrized atomic probability measures on the state-derivative space
//! `Y × Z`: one finitely-supported measure per grid node, the discrete
//! counterpart of a Young measure `μ_{(t,x)}`.
//!
//! Atoms make every pairing with a polynomial exact in the measure variable:
//! the only quadrature left anywhere is over the `(t,x)` grid. This is
//! enough for all verification targets — Dirac lifts of solutions, the
//! symmetric two-atom field below, and moment-vector extractions.

use crate::error::MeasureError;
use crate::grid::{Field2, SpaceTimeGrid};
use crate::pde::FieldSolution;
use crate::poly::{Polynomial, Var};
use crate::Scalar;

/// Weighted point mass at `(y, z0, z1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<S: Scalar> {
    pub y: S,
    pub z0: S,
    pub z1: S,
    pub weight: S,
}

/// Probability measure of one grid cell: finitely many atoms with weights
/// summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMeasure<S: Scalar> {
    pub atoms: Vec<Atom<S>>,
}

pub const WEIGHT_TOL: f64 = 1e-12;

impl<S: Scalar> CellMeasure<S> {
    pub fn dirac(y: S, z0: S, z1: S) -> Self {
        CellMeasure { atoms: vec![Atom { y, z0, z1, weight: S::one() }] }
    }

    pub fn total_weight(&self) -> S {
        self.atoms.iter().fold(S::zero(), |acc, a| acc + a.weight)
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_weight() - S::one()).abs() <= S::of(WEIGHT_TOL)
    }

    /// `⟨μ, g⟩ = Σ_k w_k g(t, x, y_k, z0_k, z1_k)`, exact in the measure
    /// variable.
    pub fn pair(&self, t: S, x: S, g: &Polynomial<S>) -> S {
        self.atoms
            .iter()
            .fold(S::zero(), |acc, a| acc + a.weight * g.eval(&[t, x, a.y, a.z0, a.z1]))
    }
}

/// Per-cell measures over the whole space-time grid.
#[derive(Debug, Clone)]
pub struct YoungField<S: Scalar> {
    pub grid: SpaceTimeGrid<S>,
    cells: Vec<CellMeasure<S>>,
}

impl<S: Scalar> YoungField<S> {
    pub fn from_fn(
        grid: &SpaceTimeGrid<S>,
        mut f: impl FnMut(usize, usize) -> CellMeasure<S>,
    ) -> Result<Self, MeasureError> {
        let mut cells = Vec::with_capacity(grid.rows() * grid.cols());
        for i in 0..grid.rows() {
            for j in 0..grid.cols() {
                let cell = f(i, j);
                if !cell.is_normalized() {
                    return Err(MeasureError::WeightsNotNormalized {
                        i,
                        j,
                        total: cell.total_weight().to_f64().unwrap_or(f64::NAN),
                        tol: WEIGHT_TOL,
                    });
                }
                cells.push(cell);
            }
        }
        Ok(YoungField { grid: grid.clone(), cells })
    }

    pub fn cell(&self, i: usize, j: usize) -> &CellMeasure<S> {
        &self.cells[i * self.grid.cols() + j]
    }

    pub fn cell_mut(&mut self, i: usize, j: usize) -> &mut CellMeasure<S> {
        &mut self.cells[i * self.grid.cols() + j]
    }

    pub fn same_grid(&self, other: &SpaceTimeGrid<S>) -> bool {
        self.grid == *other
    }

    /// `(t,x) ↦ ⟨μ_{(t,x)}, g⟩` over the whole grid.
    pub fn pair(&self, g: &Polynomial<S>) -> Field2<S> {
        let grid = &self.grid;
        Field2::from_fn(grid.rows(), grid.cols(), |i, j| {
            self.cell(i, j).pair(grid.t(i), grid.x(j), g)
        })
    }
}

/// Grid arrays of the moment quantities entering the constraint families:
/// first and second `y`-moments, the two source terms, and the derivative
/// moments.
#[derive(Debug, Clone)]
pub struct MomentFields<S: Scalar> {
    /// ⟨y⟩
    pub m1: Field2<S>,
    /// ⟨y²⟩
    pub m2: Field2<S>,
    /// ⟨f(t,x,y)⟩
    pub mf: Field2<S>,
    /// 2⟨y f⟩ − 2⟨z1²⟩
    pub mfhat: Field2<S>,
    /// ⟨z0⟩
    pub mz0: Field2<S>,
    /// ⟨z0²⟩
    pub mz0sq: Field2<S>,
    /// ⟨z1²⟩ (the squared space-derivative norm in one dimension)
    pub mzbarsq: Field2<S>,
}

/// Lift a solution to its Dirac field: one atom
/// `(y, ∂_t y, ∂_x y)` of weight one per cell.
pub fn lift_dirac<S: Scalar>(sol: &FieldSolution<S>) -> YoungField<S> {
    YoungField::from_fn(&sol.grid, |i, j| {
        CellMeasure::dirac(sol.y[(i, j)], sol.dty[(i, j)], sol.dxy[(i, j)])
    })
    .expect("dirac cells are normalized by construction")
}

/// Assemble the seven moment arrays of a field.
pub fn moments<S: Scalar>(
    field: &YoungField<S>,
    f: &Polynomial<S>,
) -> MomentFields<S> {
    let y = Polynomial::var(Var::Y);
    let z1 = Polynomial::var(Var::Z1);
    let yf = &y * f;
    let mfhat_poly = &yf.scale(S::two()) - &z1.pow(2).scale(S::two());
    MomentFields {
        m1: field.pair(&y),
        m2: field.pair(&y.pow(2)),
        mf: field.pair(f),
        mfhat: field.pair(&mfhat_poly),
        mz0: field.pair(&Polynomial::var(Var::Z0)),
        mz0sq: field.pair(&Polynomial::var(Var::Z0).pow(2)),
        mzbarsq: field.pair(&z1.pow(2)),
    }
}

/// Squared-error density `w(t,x) = ⟨μ, (y − y_ref)²⟩`, summed atom by atom
/// so nonnegativity holds exactly. The equivalent three-term expansion
/// `m2 − 2 y_ref m1 + y_ref²` is kept for cross-checks.
pub fn squared_error_density<S: Scalar>(
    field: &YoungField<S>,
    reference: &FieldSolution<S>,
) -> Result<Field2<S>, MeasureError> {
    if !field.same_grid(&reference.grid) {
        return Err(MeasureError::GridMismatch {
            a: field.grid.shape_label(),
            b: reference.grid.shape_label(),
        });
    }
    let grid = &field.grid;
    Ok(Field2::from_fn(grid.rows(), grid.cols(), |i, j| {
        let y_ref = reference.y[(i, j)];
        field.cell(i, j).atoms.iter().fold(S::zero(), |acc, a| {
            let d = a.y - y_ref;
            acc + a.weight * d * d
        })
    }))
}

/// Exponentially weighted error density `ŵ(t,x) = e^{−2 t L_Y} w(t,x)`;
/// never exceeds `w` pointwise since `L_Y ≥ 0`.
pub fn weighted_error_density<S: Scalar>(
    w: &Field2<S>,
    grid: &SpaceTimeGrid<S>,
    l_y: S,
) -> Field2<S> {
    Field2::from_fn(w.rows(), w.cols(), |i, j| {
        (-S::two() * grid.t(i) * l_y).exp() * w[(i, j)]
    })
}

/// Closed-form space-time bump `g(t,x) = A·t²(T−t)²·x²(1−x)²`: vanishes to
/// second order on the whole boundary of `[0,T]×[0,1]`, so its lift honors
/// the homogeneous initial and boundary data while staying polynomial.
#[derive(Debug, Clone, Copy)]
pub struct BumpSpec<S: Scalar> {
    pub amplitude: S,
}

impl<S: Scalar> BumpSpec<S> {
    pub fn new(amplitude: S) -> Self {
        BumpSpec { amplitude }
    }

    /// Amplitude chosen so the bump peaks at `peak` in the center of the
    /// box.
    pub fn with_peak(peak: S, horizon: S) -> Self {
        let half_t = horizon * S::half();
        let center = half_t.powi(2) * half_t.powi(2) * S::of(1.0 / 16.0);
        BumpSpec { amplitude: peak / center }
    }

    pub fn polynomial(&self, horizon: S) -> Polynomial<S> {
        let t = Polynomial::var(Var::T);
        let x = Polynomial::var(Var::X);
        let tm = &Polynomial::constant(horizon) - &t;
        let xm = &Polynomial::one() - &x;
        (&(&t.pow(2) * &tm.pow(2)) * &(&x.pow(2) * &xm.pow(2))).scale(self.amplitude)
    }

    /// Peak value `A (T/2)⁴ / 16` attained at `(T/2, 1/2)`.
    pub fn peak_value(&self, horizon: S) -> S {
        let half_t = horizon * S::half();
        self.amplitude * half_t.powi(4) * S::of(1.0 / 16.0)
    }
}

/// The symmetric two-atom field
/// `μ = ½ δ_{(g, ∂_t g, ∂_x g)} + ½ δ_{(−g, −∂_t g, −∂_x g)}`.
///
/// Its first moment and every odd-in-`y` source moment vanish identically,
/// so all first-moment constraints hold although the field concentrates
/// nowhere `g ≠ 0`; only the second-moment and dissipation families expose
/// it.
pub fn counterexample_field<S: Scalar>(
    grid: &SpaceTimeGrid<S>,
    bump: BumpSpec<S>,
) -> YoungField<S> {
    let g = bump.polynomial(grid.horizon);
    let gt = g.differentiate(Var::T);
    let gx = g.differentiate(Var::X);
    let half = S::half();
    YoungField::from_fn(grid, |i, j| {
        let t = grid.t(i);
        let x = grid.x(j);
        let gv = g.eval_txy(t, x, S::zero());
        let gtv = gt.eval_txy(t, x, S::zero());
        let gxv = gx.eval_txy(t, x, S::zero());
        CellMeasure {
            atoms: vec![
                Atom { y: gv, z0: gtv, z1: gxv, weight: half },
                Atom { y: -gv, z0: -gtv, z1: -gxv, weight: half },
            ],
        }
    })
    .expect("two half-weights are normalized")
}

/// Sup norms of the three concentration defects
/// `(⟨(y−y*)²⟩, ⟨(z1−∂_x y*)²⟩, ⟨(z0−∂_t y*)²⟩)`: all three vanish exactly
/// when the field is the Dirac lift of the reference.
pub fn marginal_concentration_report<S: Scalar>(
    field: &YoungField<S>,
    reference: &FieldSolution<S>,
) -> Result<(S, S, S), MeasureError> {
    if !field.same_grid(&reference.grid) {
        return Err(MeasureError::GridMismatch {
            a: field.grid.shape_label(),
            b: reference.grid.shape_label(),
        });
    }
    let grid = &field.grid;
    let mut sup_w = S::zero();
    let mut sup_zbar = S::zero();
    let mut sup_z0 = S::zero();
    for i in 0..grid.rows() {
        for j in 0..grid.cols() {
            let cell = field.cell(i, j);
            let (mut wy, mut wz1, mut wz0) = (S::zero(), S::zero(), S::zero());
            for a in &cell.atoms {
                let dy = a.y - reference.y[(i, j)];
                let dz1 = a.z1 - reference.dxy[(i, j)];
                let dz0 = a.z0 - reference.dty[(i, j)];
                wy = wy + a.weight * dy * dy;
                wz1 = wz1 + a.weight * dz1 * dz1;
                wz0 = wz0 + a.weight * dz0 * dz0;
            }
            sup_w = sup_w.max(wy);
            sup_zbar = sup_zbar.max(wz1);
            sup_z0 = sup_z0.max(wz0);
        }
    }
    Ok((sup_w, sup_zbar, sup_z0))
}
