//! Monomial bases, variable scaling, and measure-specific monomial
//! reductions for the moment relaxation.
//!
//! Four measures carry moment variables: the interior occupation measure on
//! `Q_T × Y × Z` and the three boundary measures. Each has its own reduced
//! monomial basis:
//!
//! * interior — all five variables;
//! * initial/terminal slices — `t` is pinned (to `0` or `T`), leaving four
//!   variables; pinned powers turn into scalar multipliers;
//! * lateral component — `x` is supported on `{0,1}`, so `x² = x` on the
//!   support and every `x` power reduces to exponent ≤ 1 (in scaled
//!   coordinates `u_x² = 1`, i.e. exponents reduce mod 2).
//!
//! Moments can be kept either in the original coordinates or affinely
//! rescaled so every variable ranges over `[−1,1]`; the rescaled form is the
//! default (localizing polynomials become `1 − u²`, conditioning improves).

use std::collections::BTreeMap;

use crate::pde::PdeProblem;
use crate::poly::{Monomial, Polynomial, Var, NUM_VARS};
use crate::Scalar;

/// Identifies one of the four measures in the relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MeasureId {
    Interior = 0,
    InitialSlice = 1,
    TerminalSlice = 2,
    Lateral = 3,
}

impl MeasureId {
    pub const ALL: [MeasureId; 4] = [
        MeasureId::Interior,
        MeasureId::InitialSlice,
        MeasureId::TerminalSlice,
        MeasureId::Lateral,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MeasureId::Interior => "interior",
            MeasureId::InitialSlice => "initial",
            MeasureId::TerminalSlice => "terminal",
            MeasureId::Lateral => "lateral",
        }
    }
}

/// `original = alpha + beta · scaled`
#[derive(Debug, Clone, Copy)]
pub struct AffineMap<S: Scalar> {
    pub alpha: S,
    pub beta: S,
}

impl<S: Scalar> AffineMap<S> {
    pub fn identity() -> Self {
        AffineMap { alpha: S::zero(), beta: S::one() }
    }

    /// Pure dilation mapping the interval inside `[−1, 1]`. Offsets are
    /// avoided deliberately: an offset-affine substitution mixes moment
    /// orders through binomial expansion, which degrades the mutual
    /// conditioning of the equality rows; a dilation keeps every row's
    /// monomial structure intact while normalizing magnitudes.
    pub fn dilation_for(lo: S, hi: S) -> Self {
        let beta = lo.abs().max(hi.abs()).max(S::of(1e-30));
        AffineMap { alpha: S::zero(), beta }
    }

    pub fn to_scaled(&self, original: S) -> S {
        (original - self.alpha) / self.beta
    }

    pub fn from_scaled(&self, scaled: S) -> S {
        self.alpha + self.beta * scaled
    }
}

/// Scaling maps for all five variables, in `Var` order.
pub fn scaling_maps<S: Scalar>(problem: &PdeProblem<S>, rescale: bool) -> [AffineMap<S>; NUM_VARS] {
    if !rescale {
        return [AffineMap::identity(); NUM_VARS];
    }
    [
        AffineMap::dilation_for(S::zero(), problem.horizon),
        AffineMap::dilation_for(S::zero(), S::one()),
        AffineMap::dilation_for(problem.ybox.lo, problem.ybox.hi),
        AffineMap::dilation_for(problem.zbox.z0.lo, problem.zbox.z0.hi),
        AffineMap::dilation_for(problem.zbox.z1.lo, problem.zbox.z1.hi),
    ]
}

/// Substitute the affine maps into a polynomial given in original
/// coordinates, producing its expression over the scaled variables.
pub fn to_scaled_poly<S: Scalar>(
    p: &Polynomial<S>,
    maps: &[AffineMap<S>; NUM_VARS],
) -> Polynomial<S> {
    let mut out = p.clone();
    for v in Var::ALL {
        let map = maps[v as usize];
        if map.alpha == S::zero() && map.beta == S::one() {
            continue;
        }
        let repl = Polynomial::univariate(v, &[map.alpha, map.beta]);
        out = out.substitute(v, &repl);
    }
    out
}

/// Reduced monomial basis of one measure.
#[derive(Debug, Clone)]
pub struct MeasureBasis<S: Scalar> {
    pub id: MeasureId,
    /// Pinned value of `t` in working coordinates for the slice measures.
    pinned_t: Option<S>,
    /// Whether `x` satisfies the two-point support reduction `x² = x`
    /// (the working-coordinate support stays `{0, 1}` since the unit
    /// interval needs no dilation).
    lateral_x: bool,
    /// Pinned value of `y` in working coordinates (the lateral measure is
    /// supported on the Dirichlet trace `y = 0`).
    pinned_y: Option<S>,
    pub monomials: Vec<Monomial>,
    pub index: BTreeMap<Monomial, usize>,
}

impl<S: Scalar> MeasureBasis<S> {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Reduce a monomial in working coordinates to the measure's basis form:
    /// returns the scalar multiplier and the reduced monomial, or `None`
    /// when the functional is identically zero on the support.
    pub fn reduce(&self, mono: &Monomial) -> Option<(S, Monomial)> {
        let mut exps = mono.0;
        let mut mult = S::one();
        if let Some(pin) = self.pinned_t {
            let a = exps[Var::T as usize];
            if a > 0 {
                let factor = pin.powi(a as i32);
                if factor == S::zero() {
                    return None;
                }
                mult = mult * factor;
                exps[Var::T as usize] = 0;
            }
        }
        if self.lateral_x {
            let e = exps[Var::X as usize];
            if e > 1 {
                exps[Var::X as usize] = 1;
            }
        }
        if let Some(pin) = self.pinned_y {
            let c = exps[Var::Y as usize];
            if c > 0 {
                let factor = pin.powi(c as i32);
                if factor == S::zero() {
                    return None;
                }
                mult = mult * factor;
                exps[Var::Y as usize] = 0;
            }
        }
        Some((mult, Monomial(exps)))
    }

    pub fn position(&self, mono: &Monomial) -> Option<usize> {
        self.index.get(mono).copied()
    }
}

fn enumerate_monomials(
    max_degree: usize,
    allowed: &[Var],
    x_cap_one: bool,
) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = [0u8; NUM_VARS];
    fn rec(
        allowed: &[Var],
        pos: usize,
        remaining: usize,
        x_cap_one: bool,
        exps: &mut [u8; NUM_VARS],
        out: &mut Vec<Monomial>,
    ) {
        if pos == allowed.len() {
            out.push(Monomial(*exps));
            return;
        }
        let v = allowed[pos];
        let cap = if x_cap_one && v == Var::X { remaining.min(1) } else { remaining };
        for e in 0..=cap {
            exps[v as usize] = e as u8;
            rec(allowed, pos + 1, remaining - e, x_cap_one, exps, out);
            exps[v as usize] = 0;
        }
    }
    rec(allowed, 0, max_degree, x_cap_one, &mut exps, &mut out);
    out.sort();
    out
}

/// Build the reduced moment basis of a measure up to total degree `2d`.
pub fn measure_basis<S: Scalar>(
    id: MeasureId,
    two_d: usize,
    horizon: S,
    maps: &[AffineMap<S>; NUM_VARS],
) -> MeasureBasis<S> {
    let t_map = maps[Var::T as usize];
    let (allowed, x_cap, pinned_t, lateral): (&[Var], bool, Option<S>, bool) = match id {
        MeasureId::Interior => (&Var::ALL, false, None, false),
        MeasureId::InitialSlice => (
            &[Var::X, Var::Y, Var::Z0, Var::Z1],
            false,
            Some(t_map.to_scaled(S::zero())),
            false,
        ),
        MeasureId::TerminalSlice => (
            &[Var::X, Var::Y, Var::Z0, Var::Z1],
            false,
            Some(t_map.to_scaled(horizon)),
            false,
        ),
        // the Dirichlet trace pins y = 0 on the lateral component, so its
        // basis lives on (t, x∈{0,1}, z0, z1)
        MeasureId::Lateral => (&[Var::T, Var::X, Var::Z0, Var::Z1], true, None, true),
    };
    let pinned_y = match id {
        MeasureId::Lateral => Some(maps[Var::Y as usize].to_scaled(S::zero())),
        _ => None,
    };
    let monomials = enumerate_monomials(two_d, allowed, x_cap);
    let index = monomials.iter().enumerate().map(|(k, m)| (*m, k)).collect();
    MeasureBasis { id, pinned_t, lateral_x: lateral, monomials, index, pinned_y }
}

/// Variables that carry a localizing box constraint for each measure
/// (pinned variables contribute an identically-zero localizing matrix and
/// are skipped).
pub fn localizing_vars(id: MeasureId) -> &'static [Var] {
    match id {
        MeasureId::Interior => &[Var::T, Var::X, Var::Y, Var::Z0, Var::Z1],
        MeasureId::InitialSlice | MeasureId::TerminalSlice => {
            &[Var::X, Var::Y, Var::Z0, Var::Z1]
        }
        MeasureId::Lateral => &[Var::T, Var::Z0, Var::Z1],
    }
}

/// Box polynomial of one variable in the working coordinates:
/// `(hi' − u)(u − lo')` with the interval endpoints mapped through the
/// dilation (identity endpoints give the original `t(T−t)`, `x(1−x)`,
/// `(hi−y)(y−lo)`, … polynomials).
pub fn box_polynomial<S: Scalar>(
    v: Var,
    maps: &[AffineMap<S>; NUM_VARS],
    problem: &PdeProblem<S>,
) -> Polynomial<S> {
    let (lo, hi) = match v {
        Var::T => (S::zero(), problem.horizon),
        Var::X => (S::zero(), S::one()),
        Var::Y => (problem.ybox.lo, problem.ybox.hi),
        Var::Z0 => (problem.zbox.z0.lo, problem.zbox.z0.hi),
        Var::Z1 => (problem.zbox.z1.lo, problem.zbox.z1.hi),
    };
    let map = maps[v as usize];
    let (lo, hi) = (map.to_scaled(lo), map.to_scaled(hi));
    let u = Polynomial::var(v);
    &(&Polynomial::constant(hi) - &u) * &(&u - &Polynomial::constant(lo))
}

/// Monomial basis (degree ≤ `deg`) indexing the rows of a moment or
/// localizing matrix of the given measure.
pub fn matrix_row_basis<S: Scalar>(basis: &MeasureBasis<S>, deg: usize) -> Vec<Monomial> {
    basis
        .monomials
        .iter()
        .filter(|m| m.total_degree() <= deg)
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{DerivativeBox, Interval, PdeProblem};

    fn toy_problem() -> PdeProblem<f64> {
        PdeProblem::with_estimated_lipschitz(
            1.0,
            Polynomial::zero(),
            Polynomial::zero(),
            Interval::new(-1.0, 1.0),
            DerivativeBox { z0: Interval::new(-2.0, 2.0), z1: Interval::new(-2.0, 2.0) },
        )
        .unwrap()
    }

    fn maps(rescale: bool) -> [AffineMap<f64>; NUM_VARS] {
        scaling_maps(&toy_problem(), rescale)
    }

    #[test]
    fn interior_basis_counts() {
        // degree ≤ 4 in 5 variables: C(9,5) = 126
        let b = measure_basis::<f64>(MeasureId::Interior, 4, 1.0, &maps(true));
        assert_eq!(b.len(), 126);
        // degree ≤ 2: C(7,5) = 21
        let rows = matrix_row_basis(&b, 2);
        assert_eq!(rows.len(), 21);
    }

    #[test]
    fn slice_basis_counts() {
        // 4 variables, degree ≤ 4: C(8,4) = 70
        let b = measure_basis::<f64>(MeasureId::InitialSlice, 4, 1.0, &maps(true));
        assert_eq!(b.len(), 70);
    }

    #[test]
    fn lateral_basis_counts() {
        // (t, x ≤ 1, z0, z1): C(7,3) + C(6,3) = 35 + 20 = 55
        let b = measure_basis::<f64>(MeasureId::Lateral, 4, 1.0, &maps(true));
        assert_eq!(b.len(), 55);
    }

    #[test]
    fn slice_reductions_pin_t() {
        // initial slice at t = 0: any t power kills the functional
        let b = measure_basis::<f64>(MeasureId::InitialSlice, 4, 1.0, &maps(false));
        assert!(b.reduce(&Monomial([2, 0, 0, 0, 0])).is_none());
        // terminal slice at t = T = 2 (unscaled): multiplier T^a
        let problem = PdeProblem::with_estimated_lipschitz(
            2.0,
            Polynomial::zero(),
            Polynomial::zero(),
            Interval::new(-1.0, 1.0),
            DerivativeBox { z0: Interval::new(-2.0, 2.0), z1: Interval::new(-2.0, 2.0) },
        )
        .unwrap();
        let m = scaling_maps(&problem, false);
        let terminal = measure_basis::<f64>(MeasureId::TerminalSlice, 4, 2.0, &m);
        let (mult, red) = terminal.reduce(&Monomial([3, 0, 1, 0, 0])).unwrap();
        assert_eq!(mult, 8.0); // T³ = 2³
        assert_eq!(red, Monomial([0, 0, 1, 0, 0]));
        // scaled: the terminal pin maps to u_t = 1
        let ms = scaling_maps(&problem, true);
        let terminal = measure_basis::<f64>(MeasureId::TerminalSlice, 4, 2.0, &ms);
        let (mult, _) = terminal.reduce(&Monomial([3, 0, 1, 0, 0])).unwrap();
        assert_eq!(mult, 1.0);
    }

    #[test]
    fn lateral_reduction_pins_x_and_y() {
        let b = measure_basis::<f64>(MeasureId::Lateral, 4, 1.0, &maps(true));
        // x^k = x for k ≥ 1 on {0,1}
        let (m1, r1) = b.reduce(&Monomial([0, 3, 0, 0, 0])).unwrap();
        assert_eq!((m1, r1), (1.0, Monomial([0, 1, 0, 0, 0])));
        // y ≡ 0 on the Dirichlet trace kills y powers
        assert!(b.reduce(&Monomial([0, 0, 2, 0, 0])).is_none());
    }

    #[test]
    fn dilation_keeps_monomial_structure() {
        let problem = toy_problem();
        let m = scaling_maps(&problem, true);
        let p = &Polynomial::<f64>::var(Var::Z0).pow(2) * &Polynomial::var(Var::T);
        let scaled = to_scaled_poly(&p, &m);
        // a dilation rescales coefficients without creating new terms
        assert_eq!(scaled.num_terms(), 1);
        let (_, &coeff) = scaled.terms().next().unwrap();
        assert!((coeff - 4.0).abs() < 1e-14); // β_z0² · β_t = 4 · 1
    }
}
