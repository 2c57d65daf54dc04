//! Quadrature rules: composite trapezoid on the solution grid (the rule all
//! residual suites share, matching the order of the scheme) and
//! Gauss–Legendre for oracle-grade integration of closed forms.

use crate::grid::{trapezoid_weights, Field2, SpaceTimeGrid};
use crate::Scalar;

/// Composite trapezoid of nodal values over the full space-time grid.
pub fn trapezoid_2d<S: Scalar>(grid: &SpaceTimeGrid<S>, values: &Field2<S>) -> S {
    debug_assert_eq!(values.rows(), grid.rows());
    debug_assert_eq!(values.cols(), grid.cols());
    let wt = grid.time_weights();
    let wx = grid.space_weights();
    let mut acc = S::zero();
    for i in 0..grid.rows() {
        let row = values.row(i);
        let mut rs = S::zero();
        for j in 0..grid.cols() {
            rs = rs + wx[j] * row[j];
        }
        acc = acc + wt[i] * rs;
    }
    acc
}

/// Composite trapezoid of a slice sampled uniformly with spacing `h`.
pub fn trapezoid_1d<S: Scalar>(values: &[S], h: S) -> S {
    let w = trapezoid_weights(values.len(), h);
    values
        .iter()
        .zip(w.iter())
        .fold(S::zero(), |acc, (&v, &wi)| acc + wi * v)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
///
/// Nodes via Newton iteration on the Legendre recurrence; standard
/// oracle-grade machinery, exact for polynomials of degree `2n-1`.
pub fn gauss_legendre<S: Scalar>(n: usize) -> (Vec<S>, Vec<S>) {
    assert!(n >= 1);
    let mut nodes = vec![S::zero(); n];
    let mut weights = vec![S::zero(); n];
    let nf = S::of_usize(n);
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess
        let guess = (S::PI() * (S::of_usize(i) + S::of(0.75)) / (nf + S::half())).cos();
        let mut x = guess;
        let mut dp = S::zero();
        for _ in 0..100 {
            // Legendre P_n(x) and its derivative by recurrence
            let mut p0 = S::one();
            let mut p1 = x;
            for k in 2..=n {
                let kf = S::of_usize(k);
                let p2 = ((S::two() * kf - S::one()) * x * p1 - (kf - S::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - S::one());
            let dx = p1 / dp;
            x = x - dx;
            if dx.abs() <= S::of(1e-15) * (S::one() + x.abs()) {
                break;
            }
        }
        let w = S::two() / ((S::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Legendre integral of `f` over `[a, b]` with `n` nodes.
pub fn gauss_integrate<S: Scalar>(n: usize, a: S, b: S, f: impl Fn(S) -> S) -> S {
    let (nodes, weights) = gauss_legendre::<S>(n);
    let mid = (a + b) * S::half();
    let hal = (b - a) * S::half();
    let mut acc = S::zero();
    for (x, w) in nodes.iter().zip(weights.iter()) {
        acc = acc + *w * f(mid + hal * *x);
    }
    acc * hal
}

/// Tensor-product Gauss–Legendre integral of `f(t, x)` over
/// `[0,T] × [0,1]`.
pub fn gauss_integrate_2d<S: Scalar>(n: usize, horizon: S, f: impl Fn(S, S) -> S) -> S {
    let (nodes, weights) = gauss_legendre::<S>(n);
    let tm = horizon * S::half();
    let xm = S::half();
    let mut acc = S::zero();
    for (ti, wi) in nodes.iter().zip(weights.iter()) {
        let t = tm + tm * *ti;
        let mut inner = S::zero();
        for (xj, wj) in nodes.iter().zip(weights.iter()) {
            let x = xm + xm * *xj;
            inner = inner + *wj * f(t, x);
        }
        acc = acc + *wi * inner;
    }
    acc * tm * xm
}
