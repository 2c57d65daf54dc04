//! Numerically integrated moment vectors of occupation lifts, in the
//! coordinate system of an assembled relaxation. Used as warm starts, as
//! feasibility witnesses, and for the PSD property of genuine measures.

use crate::occupation::OccupationLift;
use crate::poly::{Monomial, Var};
use crate::quad::trapezoid_1d;
use crate::young::CellMeasure;
use crate::Scalar;

use super::assemble::RelaxationProblem;
use super::basis::MeasureId;

/// Evaluate a working-coordinate monomial at an atom of a cell located at
/// `(t, x)`.
fn atom_monomial<S: Scalar>(
    rp: &RelaxationProblem<S>,
    mono: &Monomial,
    t: S,
    x: S,
    y: S,
    z0: S,
    z1: S,
) -> S {
    let coords = [
        rp.maps[Var::T as usize].to_scaled(t),
        rp.maps[Var::X as usize].to_scaled(x),
        rp.maps[Var::Y as usize].to_scaled(y),
        rp.maps[Var::Z0 as usize].to_scaled(z0),
        rp.maps[Var::Z1 as usize].to_scaled(z1),
    ];
    mono.eval(&coords)
}

fn cell_moment<S: Scalar>(
    rp: &RelaxationProblem<S>,
    mono: &Monomial,
    cell: &CellMeasure<S>,
    t: S,
    x: S,
) -> S {
    cell.atoms
        .iter()
        .fold(S::zero(), |acc, a| acc + a.weight * atom_monomial(rp, mono, t, x, a.y, a.z0, a.z1))
}

/// Integrate the lift into a full moment vector for the relaxation's
/// variable layout (trapezoid in `(t,x)`, exact in the measure variables).
pub fn lift_moments<S: Scalar>(rp: &RelaxationProblem<S>, lift: &OccupationLift<S>) -> Vec<S> {
    let grid = &lift.interior.grid;
    let wt = grid.time_weights();
    let wx = grid.space_weights();
    let mut m = vec![S::zero(); rp.n_moments];

    // interior
    let basis = rp.basis(MeasureId::Interior);
    let off = rp.offset(MeasureId::Interior);
    for (k, mono) in basis.monomials.iter().enumerate() {
        let mut acc = S::zero();
        for i in 0..grid.rows() {
            let t = grid.t(i);
            let mut row = S::zero();
            for j in 0..grid.cols() {
                row = row + wx[j] * cell_moment(rp, mono, lift.interior.cell(i, j), t, grid.x(j));
            }
            acc = acc + wt[i] * row;
        }
        m[off + k] = acc;
    }

    // initial and terminal slices
    for (id, cells, t) in [
        (MeasureId::InitialSlice, &lift.q1, S::zero()),
        (MeasureId::TerminalSlice, &lift.q2, grid.horizon),
    ] {
        let basis = rp.basis(id);
        let off = rp.offset(id);
        for (k, mono) in basis.monomials.iter().enumerate() {
            let vals: Vec<S> = (0..grid.cols())
                .map(|j| cell_moment(rp, mono, &cells[j], t, grid.x(j)))
                .collect();
            m[off + k] = trapezoid_1d(&vals, grid.dx);
        }
    }

    // lateral component: both lines
    let basis = rp.basis(MeasureId::Lateral);
    let off = rp.offset(MeasureId::Lateral);
    for (k, mono) in basis.monomials.iter().enumerate() {
        let left: Vec<S> = (0..grid.rows())
            .map(|i| cell_moment(rp, mono, &lift.q3_left[i], grid.t(i), S::zero()))
            .collect();
        let right: Vec<S> = (0..grid.rows())
            .map(|i| cell_moment(rp, mono, &lift.q3_right[i], grid.t(i), S::one()))
            .collect();
        m[off + k] = trapezoid_1d(&left, grid.dt) + trapezoid_1d(&right, grid.dt);
    }
    m
}
