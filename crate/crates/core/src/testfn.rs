//! Test-function families for the weak-form residual suites.
//!
//! Space test functions vanish at `x ∈ {0,1}` (the `H¹₀` requirement), time
//! test functions vanish at `t ∈ {0,T}` (compact support in time), and state
//! test functions are polynomials `β(y)` with their derivative carried along.
//! Two interchangeable realizations (sine and polynomial bump) cross-check
//! basis dependence of the suites.

use crate::poly::{Polynomial, Var};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisFamily {
    Sine,
    PolyBump,
}

/// φ(t) with φ(0) = φ(T) = 0 and a closed-form derivative.
///
/// The polynomial bump is evaluated in factored form `t²(T−t)²·q(t)` so the
/// endpoint zeros are exact in floating point.
#[derive(Debug, Clone)]
pub enum TimeTestFn<S: Scalar> {
    /// `t²(T−t)²·q(t)`
    PolyBump { q: Polynomial<S>, dq: Polynomial<S>, horizon: S },
    /// `sin(kπt/T)`
    Sine { k: usize, horizon: S },
}

impl<S: Scalar> TimeTestFn<S> {
    pub fn poly_bump(horizon: S, q: &Polynomial<S>) -> Self {
        assert!(q.uses_only(&[Var::T]), "q must be a polynomial in t");
        TimeTestFn::PolyBump { q: q.clone(), dq: q.differentiate(Var::T), horizon }
    }

    pub fn sine(k: usize, horizon: S) -> Self {
        assert!(k >= 1);
        TimeTestFn::Sine { k, horizon }
    }

    pub fn value(&self, t: S) -> S {
        match self {
            TimeTestFn::PolyBump { q, horizon, .. } => {
                let s = *horizon - t;
                let qv = q.eval(&[t, S::zero(), S::zero(), S::zero(), S::zero()]);
                t * t * s * s * qv
            }
            TimeTestFn::Sine { k, horizon } => (S::of_usize(*k) * S::PI() * t / *horizon).sin(),
        }
    }

    pub fn deriv(&self, t: S) -> S {
        match self {
            TimeTestFn::PolyBump { q, dq, horizon } => {
                let s = *horizon - t;
                let pt = [t, S::zero(), S::zero(), S::zero(), S::zero()];
                let qv = q.eval(&pt);
                let dqv = dq.eval(&pt);
                S::two() * t * s * s * qv - S::two() * t * t * s * qv + t * t * s * s * dqv
            }
            TimeTestFn::Sine { k, horizon } => {
                let w = S::of_usize(*k) * S::PI() / *horizon;
                w * (w * t).cos()
            }
        }
    }

    /// Nodal samples of (φ, φ') over the time axis.
    pub fn sample(&self, nt: usize, dt: S) -> (Vec<S>, Vec<S>) {
        let mut v = Vec::with_capacity(nt + 1);
        let mut d = Vec::with_capacity(nt + 1);
        for i in 0..=nt {
            let t = dt * S::of_usize(i);
            v.push(self.value(t));
            d.push(self.deriv(t));
        }
        (v, d)
    }
}

/// v(x) with v(0) = v(1) = 0 and a closed-form derivative.
#[derive(Debug, Clone)]
pub enum SpaceTestFn<S: Scalar> {
    /// `x(1−x)·q(x)`, evaluated in factored form for exact endpoint zeros
    PolyBump { q: Polynomial<S>, dq: Polynomial<S> },
    /// `sin(kπx)`
    Sine { k: usize },
}

impl<S: Scalar> SpaceTestFn<S> {
    pub fn poly_bump(q: &Polynomial<S>) -> Self {
        assert!(q.uses_only(&[Var::X]), "q must be a polynomial in x");
        SpaceTestFn::PolyBump { q: q.clone(), dq: q.differentiate(Var::X) }
    }

    pub fn sine(k: usize) -> Self {
        assert!(k >= 1);
        SpaceTestFn::Sine { k }
    }

    pub fn value(&self, x: S) -> S {
        match self {
            SpaceTestFn::PolyBump { q, .. } => {
                let qv = q.eval(&[S::zero(), x, S::zero(), S::zero(), S::zero()]);
                x * (S::one() - x) * qv
            }
            SpaceTestFn::Sine { k } => (S::of_usize(*k) * S::PI() * x).sin(),
        }
    }

    pub fn deriv(&self, x: S) -> S {
        match self {
            SpaceTestFn::PolyBump { q, dq } => {
                let pt = [S::zero(), x, S::zero(), S::zero(), S::zero()];
                let qv = q.eval(&pt);
                let dqv = dq.eval(&pt);
                (S::one() - S::two() * x) * qv + x * (S::one() - x) * dqv
            }
            SpaceTestFn::Sine { k } => {
                let w = S::of_usize(*k) * S::PI();
                w * (w * x).cos()
            }
        }
    }

    /// Nodal samples of (v, v') over all space nodes.
    pub fn sample(&self, nx: usize, dx: S) -> (Vec<S>, Vec<S>) {
        let mut v = Vec::with_capacity(nx + 2);
        let mut d = Vec::with_capacity(nx + 2);
        for j in 0..=nx + 1 {
            let x = dx * S::of_usize(j);
            v.push(self.value(x));
            d.push(self.deriv(x));
        }
        (v, d)
    }
}

/// β(y) with β' derived; the state-direction test function.
#[derive(Debug, Clone)]
pub struct StateTestFn<S: Scalar> {
    pub beta: Polynomial<S>,
    pub beta_prime: Polynomial<S>,
}

impl<S: Scalar> StateTestFn<S> {
    pub fn new(beta: Polynomial<S>) -> Self {
        assert!(beta.uses_only(&[Var::Y]), "beta must be a polynomial in y");
        let beta_prime = beta.differentiate(Var::Y);
        StateTestFn { beta, beta_prime }
    }

    /// `y^k`
    pub fn monomial(k: usize) -> Self {
        Self::new(Polynomial::var(Var::Y).pow(k))
    }
}

pub fn time_basis<S: Scalar>(family: BasisFamily, n: usize, horizon: S) -> Vec<TimeTestFn<S>> {
    (0..n)
        .map(|j| match family {
            BasisFamily::Sine => TimeTestFn::sine(j + 1, horizon),
            BasisFamily::PolyBump => {
                TimeTestFn::poly_bump(horizon, &Polynomial::var(Var::T).pow(j))
            }
        })
        .collect()
}

pub fn space_basis<S: Scalar>(family: BasisFamily, n: usize) -> Vec<SpaceTestFn<S>> {
    (0..n)
        .map(|j| match family {
            BasisFamily::Sine => SpaceTestFn::sine(j + 1),
            BasisFamily::PolyBump => SpaceTestFn::poly_bump(&Polynomial::var(Var::X).pow(j)),
        })
        .collect()
}

/// `{1, y, y², …, y^max_degree}`
pub fn state_basis<S: Scalar>(max_degree: usize) -> Vec<StateTestFn<S>> {
    (0..=max_degree).map(StateTestFn::monomial).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn endpoints_vanish() {
        let horizon = 0.7_f64;
        for f in time_basis::<f64>(BasisFamily::PolyBump, 4, horizon) {
            assert_eq!(f.value(0.0), 0.0);
            assert_eq!(f.value(horizon), 0.0);
        }
        for f in space_basis::<f64>(BasisFamily::PolyBump, 4) {
            assert_eq!(f.value(0.0), 0.0);
            assert_eq!(f.value(1.0), 0.0);
        }
        for f in space_basis::<f64>(BasisFamily::Sine, 4) {
            assert_eq!(f.value(0.0), 0.0);
            assert!(f.value(1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let horizon = 1.0;
        let h = 1e-6;
        for f in time_basis::<f64>(BasisFamily::PolyBump, 3, horizon) {
            let t = 0.4;
            let fd = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
            assert_abs_diff_eq!(f.deriv(t), fd, epsilon = 1e-7);
        }
        for f in space_basis::<f64>(BasisFamily::Sine, 3) {
            let x = 0.3;
            let fd = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
            assert_abs_diff_eq!(f.deriv(x), fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn state_basis_shape() {
        let basis = state_basis::<f64>(3);
        assert_eq!(basis.len(), 4);
        assert_eq!(basis[0].beta_prime.num_terms(), 0); // d/dy 1 = 0
        assert_eq!(basis[3].beta.degree_in(crate::poly::Var::Y), 3);
    }
}
