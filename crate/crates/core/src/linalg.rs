//! Dense and sparse linear-algebra kernels used by the conic solver:
//! Cholesky factorization, a symmetric eigensolver (Householder
//! tridiagonalization + implicit-shift QL), CSR matrices and a
//! Jacobi-preconditioned conjugate-gradient solve.
//!
//! Everything is deterministic: fixed iteration orders, no randomness.

use crate::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone)]
pub struct DenseMat<S: Scalar> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> DenseMat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[S], y: &mut [S]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = S::zero();
            for j in 0..self.cols {
                acc = acc + row[j] * x[j];
            }
            y[i] = acc;
        }
    }

    /// `y = Aᵀ x`
    pub fn matvec_t(&self, x: &[S], y: &mut [S]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(y.len(), self.cols);
        for v in y.iter_mut() {
            *v = S::zero();
        }
        for i in 0..self.rows {
            let row = self.row(i);
            let xi = x[i];
            for j in 0..self.cols {
                y[j] += row[j] * xi;
            }
        }
    }
}

/// Cholesky factorization `A = L Lᵀ` of a symmetric positive definite
/// matrix.
pub struct Cholesky<S: Scalar> {
    n: usize,
    l: Vec<S>,
}

impl<S: Scalar> Cholesky<S> {
    pub fn new(n: usize, a: &[S]) -> Result<Self, String> {
        assert_eq!(a.len(), n * n);
        let mut l = a.to_vec();
        for j in 0..n {
            let mut d = l[j * n + j];
            for k in 0..j {
                let v = l[j * n + k];
                d = d - v * v;
            }
            if d <= S::zero() {
                return Err(format!(
                    "cholesky pivot {} nonpositive: {:e}",
                    j,
                    d.to_f64().unwrap_or(f64::NAN)
                ));
            }
            let dj = d.sqrt();
            l[j * n + j] = dj;
            for i in j + 1..n {
                let mut s = l[i * n + j];
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / dj;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                l[i * n + j] = S::zero();
            }
        }
        Ok(Cholesky { n, l })
    }

    /// Solve `A x = b` by forward/back substitution.
    pub fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s = s - self.l[i * n + k] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s = s - self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }
}

/// Symmetric eigendecomposition `A = V diag(λ) Vᵀ`.
pub struct SymEigen<S: Scalar> {
    pub values: Vec<S>,
    /// Row-major; column `k` holds the eigenvector of `values[k]`.
    pub vectors: Vec<S>,
    pub n: usize,
}

/// Householder reduction to tridiagonal form followed by implicit-shift QL.
/// Adequate for the moment and localizing blocks (orders up to a few
/// hundred). Input must be finite.
pub fn sym_eigen<S: Scalar>(n: usize, a: &[S]) -> SymEigen<S> {
    assert_eq!(a.len(), n * n);
    debug_assert!(a.iter().all(|v| v.is_finite()), "eigensolver needs finite input");
    let mut z = a.to_vec();
    let mut d = vec![S::zero(); n];
    let mut e = vec![S::zero(); n];
    tred2(n, &mut z, &mut d, &mut e);
    tqli(n, &mut d, &mut e, &mut z);
    SymEigen { values: d, vectors: z, n }
}

fn tred2<S: Scalar>(n: usize, z: &mut [S], d: &mut [S], e: &mut [S]) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = S::zero();
        if l > 0 {
            let mut scale = S::zero();
            for k in 0..=l {
                scale = scale + z[i * n + k].abs();
            }
            if scale == S::zero() {
                e[i] = z[i * n + l];
            } else {
                for k in 0..=l {
                    z[i * n + k] = z[i * n + k] / scale;
                    h = h + z[i * n + k] * z[i * n + k];
                }
                let mut f = z[i * n + l];
                let g = if f >= S::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h = h - f * g;
                z[i * n + l] = f - g;
                f = S::zero();
                for j in 0..=l {
                    z[j * n + i] = z[i * n + j] / h;
                    let mut g2 = S::zero();
                    for k in 0..=j {
                        g2 = g2 + z[j * n + k] * z[i * n + k];
                    }
                    for k in j + 1..=l {
                        g2 = g2 + z[k * n + j] * z[i * n + k];
                    }
                    e[j] = g2 / h;
                    f = f + e[j] * z[i * n + j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let fj = z[i * n + j];
                    let gj = e[j] - hh * fj;
                    e[j] = gj;
                    for k in 0..=j {
                        z[j * n + k] = z[j * n + k] - fj * e[k] - gj * z[i * n + k];
                    }
                }
            }
        } else {
            e[i] = z[i * n + l];
        }
        d[i] = h;
    }
    d[0] = S::zero();
    e[0] = S::zero();
    for i in 0..n {
        if d[i] != S::zero() {
            for j in 0..i {
                let mut g = S::zero();
                for k in 0..i {
                    g = g + z[i * n + k] * z[k * n + j];
                }
                for k in 0..i {
                    z[k * n + j] = z[k * n + j] - g * z[k * n + i];
                }
            }
        }
        d[i] = z[i * n + i];
        z[i * n + i] = S::one();
        for j in 0..i {
            z[j * n + i] = S::zero();
            z[i * n + j] = S::zero();
        }
    }
}

fn tqli<S: Scalar>(n: usize, d: &mut [S], e: &mut [S], z: &mut [S]) {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = S::zero();
    // deflation floor: off-diagonals this far below the matrix scale are
    // negligible even when the adjacent diagonal entries vanish exactly
    // (degenerate zero blocks otherwise stall the shift iteration)
    let scale = d
        .iter()
        .chain(e.iter())
        .fold(S::zero(), |acc, v| acc.max(v.abs()));
    let floor = scale * S::of(1e-18);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= S::epsilon() * dd + floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 100, "eigen iteration did not converge");
            let mut g = (d[l + 1] - d[l]) / (S::two() * e[l]);
            let mut r = hypot(g, S::one());
            g = d[m] - d[l] + e[l] / (g + sign(r, g));
            let (mut s, mut c) = (S::one(), S::one());
            let mut p = S::zero();
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == S::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = S::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + S::two() * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = S::zero();
        }
    }
}

fn hypot<S: Scalar>(a: S, b: S) -> S {
    (a * a + b * b).sqrt()
}

fn sign<S: Scalar>(a: S, b: S) -> S {
    if b >= S::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Sparse matrix in compressed-sparse-row form.
#[derive(Debug, Clone)]
pub struct Csr<S: Scalar> {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<S>,
}

impl<S: Scalar> Csr<S> {
    /// Build from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, S)>,
    ) -> Self {
        use std::collections::BTreeMap;
        let mut rows: Vec<BTreeMap<usize, S>> = vec![BTreeMap::new(); n_rows];
        for (i, j, v) in triplets {
            let e = rows[i].entry(j).or_insert_with(S::zero);
            *e = *e + v;
        }
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for r in rows {
            for (j, v) in r {
                if v != S::zero() {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Csr { n_rows, n_cols, row_ptr, cols, vals }
    }

    pub fn matvec(&self, x: &[S], y: &mut [S]) {
        debug_assert_eq!(x.len(), self.n_cols);
        debug_assert_eq!(y.len(), self.n_rows);
        for i in 0..self.n_rows {
            let mut acc = S::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc = acc + self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<S> {
        let mut d = vec![S::zero(); self.n_rows.min(self.n_cols)];
        for i in 0..self.n_rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] == i {
                    d[i] = self.vals[k];
                }
            }
        }
        d
    }
}

/// Jacobi-preconditioned conjugate gradients for an SPD CSR system.
/// Returns the solution and the iteration count.
pub fn pcg<S: Scalar>(a: &Csr<S>, b: &[S], rel_tol: S, max_iter: usize) -> (Vec<S>, usize) {
    let n = b.len();
    let diag = a.diagonal();
    let inv_d: Vec<S> = diag
        .iter()
        .map(|&d| if d > S::zero() { S::one() / d } else { S::one() })
        .collect();
    let mut x = vec![S::zero(); n];
    let mut r = b.to_vec();
    let bnorm = norm2(b);
    if bnorm == S::zero() {
        return (x, 0);
    }
    let mut z: Vec<S> = r.iter().zip(inv_d.iter()).map(|(&ri, &di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![S::zero(); n];
    for iter in 0..max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= S::zero() {
            return (x, iter);
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm2(&r) <= rel_tol * bnorm {
            return (x, iter + 1);
        }
        for i in 0..n {
            z[i] = r[i] * inv_d[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    (x, max_iter)
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b.iter()).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm2<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

pub fn norm_inf<S: Scalar>(a: &[S]) -> S {
    a.iter().fold(S::zero(), |acc, v| acc.max(v.abs()))
}
