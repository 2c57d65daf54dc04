//! First-order operator-splitting solver for the assembled relaxation.
//!
//! The problem is `min c·m` subject to `A m = b` (equality rows) and
//! `B m ⪰ 0` blockwise (moment and localizing matrices). The splitting
//! introduces the matrix variable `Sₖ = B m` and alternates
//!
//! 1. an equality-constrained least-squares update of `m` (projection onto
//!    the affine subspace, with cached factorizations),
//! 2. a projection of each block onto the PSD cone by eigenvalue clipping,
//! 3. a dual update,
//!
//! with over-relaxation and residual-balanced penalty adaptation. The
//! cached pieces — the Gram operator `H = BᵀB` (sparse), the columns
//! `W = H⁻¹Aᵀ`, and the Schur complement `A H⁻¹ Aᵀ` — do not depend on the
//! penalty, so adaptation is free.
//!
//! Presolve orthonormalizes the equality rows, dropping dependent rows and
//! detecting contradictory ones (`0 = c ≠ 0`), which reports infeasibility
//! before any iteration runs.

use rayon::prelude::*;

use crate::error::RelaxError;
use crate::linalg::{dot, norm2, sym_eigen, Cholesky, Csr, DenseMat};
use crate::Scalar;

use super::assemble::{RelaxationProblem, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Optimal,
    MaxIters,
    InfeasibleDetected,
}

impl SolverStatus {
    pub fn tag(self) -> &'static str {
        match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::MaxIters => "max-iters",
            SolverStatus::InfeasibleDetected => "infeasible-detected",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions<S: Scalar> {
    pub tol: S,
    pub max_iters: usize,
    pub rho: S,
    pub over_relax: S,
    pub adaptive_rho: bool,
    pub cg_tol: S,
    pub cg_max_iter: usize,
    /// Memory of the safeguarded Anderson acceleration on the splitting
    /// fixed point; 0 runs the plain iteration.
    pub anderson_memory: usize,
    /// Proximal weight σ of the m-update: the subproblem matrix becomes
    /// `BᵀB + σI`, which caps its condition number at roughly `‖B‖²/σ` and
    /// keeps the cached factorization accurate on higher-degree
    /// relaxations.
    pub proximal: S,
}

impl<S: Scalar> Default for SolverOptions<S> {
    fn default() -> Self {
        SolverOptions {
            tol: S::of(crate::config::SOLVER_TOL),
            max_iters: crate::config::SOLVER_MAX_ITERS,
            rho: S::one(),
            over_relax: S::of(1.6),
            adaptive_rho: true,
            cg_tol: S::of(1e-12),
            cg_max_iter: 500,
            anderson_memory: 10,
            proximal: S::of(1e-3),
        }
    }
}

/// Type-II Anderson acceleration with a residual-based safeguard: the
/// extrapolated point is used only while the fixed-point residual keeps
/// shrinking; on stagnation the history is dropped and the plain iterate
/// taken.
struct Anderson<S: Scalar> {
    memory: usize,
    prev_w: Option<Vec<S>>,
    prev_g: Option<Vec<S>>,
    dw: Vec<Vec<S>>,
    dg: Vec<Vec<S>>,
}

impl<S: Scalar> Anderson<S> {
    fn new(memory: usize) -> Self {
        Anderson { memory, prev_w: None, prev_g: None, dw: Vec::new(), dg: Vec::new() }
    }

    fn reset(&mut self) {
        self.prev_w = None;
        self.prev_g = None;
        self.dw.clear();
        self.dg.clear();
    }

    /// Record `(w, g)` and return the accelerated next iterate, or `None`
    /// when there is no usable history yet.
    fn push_and_extrapolate(&mut self, w: &[S], g: &[S]) -> Option<Vec<S>> {
        if let (Some(pw), Some(pg)) = (&self.prev_w, &self.prev_g) {
            let dw: Vec<S> = w.iter().zip(pw.iter()).map(|(&a, &b)| a - b).collect();
            let dg: Vec<S> = g.iter().zip(pg.iter()).map(|(&a, &b)| a - b).collect();
            self.dw.push(dw);
            self.dg.push(dg);
            if self.dw.len() > self.memory {
                self.dw.remove(0);
                self.dg.remove(0);
            }
        }
        self.prev_w = Some(w.to_vec());
        self.prev_g = Some(g.to_vec());
        let m = self.dg.len();
        if m == 0 {
            return None;
        }
        // least squares min_γ ‖g − ΔG γ‖ via regularized normal equations
        let mut gram = vec![S::zero(); m * m];
        let mut rhs = vec![S::zero(); m];
        for i in 0..m {
            for j in i..m {
                let v = dot(&self.dg[i], &self.dg[j]);
                gram[i * m + j] = v;
                gram[j * m + i] = v;
            }
            rhs[i] = dot(&self.dg[i], g);
        }
        let scale = (0..m).fold(S::zero(), |acc, i| acc.max(gram[i * m + i]));
        let reg = (scale * S::of(1e-10)).max(S::of(1e-300));
        for i in 0..m {
            gram[i * m + i] += reg;
        }
        let gamma = Cholesky::new(m, &gram).ok()?.solve(&rhs);
        // w⁺ = w + g − Σ γ_i (ΔW_i + ΔG_i)
        let mut next: Vec<S> = w.iter().zip(g.iter()).map(|(&a, &b)| a + b).collect();
        for i in 0..m {
            let gi = gamma[i];
            if gi != S::zero() {
                for (n, (dw, dg)) in
                    next.iter_mut().zip(self.dw[i].iter().zip(self.dg[i].iter()))
                {
                    *n -= gi * (*dw + *dg);
                }
            }
        }
        Some(next)
    }
}

/// Solver output: the moment vector, the achieved objective, and residuals
/// recomputed from the returned point.
#[derive(Debug, Clone)]
pub struct ConicSolution<S: Scalar> {
    pub moments: Vec<S>,
    pub objective: S,
    pub status: SolverStatus,
    pub iterations: usize,
    /// `‖Bm − S‖_F / max(1, ‖Bm‖_F)` at exit.
    pub primal_residual: S,
    /// Scaled dual residual at exit.
    pub dual_residual: S,
    /// `‖Am − b‖_∞` over the original (pre-presolve) rows, recomputed
    /// independently from the returned point.
    pub eq_residual: S,
    /// Most negative block eigenvalue of `Bm` (0 when all blocks are PSD).
    pub min_block_eigenvalue: S,
    /// The equality residual as the solver tracked it, for cross-checking
    /// against the independent recomputation.
    pub solver_eq_residual: S,
}

struct BlockOp<S: Scalar> {
    dims: Vec<usize>,
    /// flattened entries: (block, i, j, lincomb)
    entries: Vec<(usize, usize, usize, Vec<(usize, S)>)>,
    n_moments: usize,
}

impl<S: Scalar> BlockOp<S> {
    fn from_problem(rp: &RelaxationProblem<S>) -> Self {
        let dims = rp.blocks.iter().map(|b| b.dim).collect();
        let mut entries = Vec::new();
        for (k, b) in rp.blocks.iter().enumerate() {
            for (i, j, lin) in &b.entries {
                entries.push((k, *i, *j, lin.clone()));
            }
        }
        BlockOp { dims, entries, n_moments: rp.n_moments }
    }

    fn zero_blocks(&self) -> Vec<Vec<S>> {
        self.dims.iter().map(|&n| vec![S::zero(); n * n]).collect()
    }

    /// `S = B m` (dense symmetric blocks).
    fn apply(&self, m: &[S], out: &mut [Vec<S>]) {
        for (k, blk) in out.iter_mut().enumerate() {
            let n = self.dims[k];
            for v in blk.iter_mut() {
                *v = S::zero();
            }
            let _ = n;
        }
        for (k, i, j, lin) in &self.entries {
            let v = lin.iter().fold(S::zero(), |acc, &(idx, c)| acc + c * m[idx]);
            let n = self.dims[*k];
            out[*k][i * n + j] = v;
            out[*k][j * n + i] = v;
        }
    }

    /// `y = Bᵀ Y` with the Frobenius pairing (off-diagonal entries count
    /// twice).
    fn apply_t(&self, blocks: &[Vec<S>], y: &mut [S]) {
        for v in y.iter_mut() {
            *v = S::zero();
        }
        for (k, i, j, lin) in &self.entries {
            let n = self.dims[*k];
            let w = if i == j { blocks[*k][i * n + j] } else { S::two() * blocks[*k][i * n + j] };
            for &(idx, c) in lin {
                y[idx] += c * w;
            }
        }
    }

    /// The same operator with columns scaled by `inv_scale`.
    fn column_scaled(&self, inv_scale: &[S]) -> BlockOp<S> {
        let entries = self
            .entries
            .iter()
            .map(|(k, i, j, lin)| {
                let lin =
                    lin.iter().map(|&(idx, c)| (idx, c * inv_scale[idx])).collect();
                (*k, *i, *j, lin)
            })
            .collect();
        BlockOp { dims: self.dims.clone(), entries, n_moments: self.n_moments }
    }

    /// Gram operator `H = BᵀB` as a sparse matrix.
    fn gram(&self) -> Csr<S> {
        let mut trips = Vec::new();
        for (_, i, j, lin) in &self.entries {
            let mult = if i == j { S::one() } else { S::two() };
            for &(k1, c1) in lin {
                for &(k2, c2) in lin {
                    trips.push((k1, k2, mult * c1 * c2));
                }
            }
        }
        Csr::from_triplets(self.n_moments, self.n_moments, trips)
    }
}

/// Project every block onto the PSD cone by clipping negative eigenvalues.
fn project_psd<S: Scalar>(dims: &[usize], blocks: &mut [Vec<S>]) {
    blocks.par_iter_mut().zip(dims.par_iter()).for_each(|(blk, &n)| {
        if n == 0 {
            return;
        }
        if n == 1 {
            blk[0] = blk[0].max(S::zero());
            return;
        }
        let eig = sym_eigen(n, blk);
        let n_neg = eig.values.iter().filter(|&&v| v < S::zero()).count();
        if n_neg == 0 {
            return;
        }
        if n_neg == n {
            for v in blk.iter_mut() {
                *v = S::zero();
            }
            return;
        }
        // reconstruct from the smaller set of eigenpairs
        let use_positive = n_neg * 2 >= n;
        let mut acc = vec![S::zero(); n * n];
        for (k, &lam) in eig.values.iter().enumerate() {
            let include = if use_positive { lam > S::zero() } else { lam < S::zero() };
            if !include {
                continue;
            }
            for i in 0..n {
                let vi = eig.vectors[i * n + k] * lam;
                for j in 0..n {
                    acc[i * n + j] += vi * eig.vectors[j * n + k];
                }
            }
        }
        if use_positive {
            blk.copy_from_slice(&acc);
        } else {
            for (b, a) in blk.iter_mut().zip(acc.iter()) {
                *b -= *a;
            }
        }
    });
}

/// Presolve: pivoted Gram–Schmidt on the equality rows. Processing rows in
/// decreasing residual-norm order keeps the orthonormal basis well
/// conditioned; rows whose residual falls below the rank tolerance are
/// either consistent (dropped) or witness infeasibility.
pub fn orthonormalize_rows<S: Scalar>(
    rows: &[(Vec<(usize, S)>, S)],
    n: usize,
) -> Result<(DenseMat<S>, Vec<S>), String> {
    let rank_tol = S::of(1e-7);
    // densify with inf-norm row equilibration
    let mut work: Vec<(Vec<S>, S)> = Vec::with_capacity(rows.len());
    for (sparse, b0) in rows {
        let mut a = vec![S::zero(); n];
        let mut scale = S::zero();
        for &(j, c) in sparse {
            a[j] = c;
            scale = scale.max(c.abs());
        }
        let mut b = *b0;
        if scale > S::zero() {
            for v in a.iter_mut() {
                *v = *v / scale;
            }
            b = b / scale;
        }
        work.push((a, b));
    }
    let mut alive: Vec<usize> = (0..work.len()).collect();
    let mut kept: Vec<Vec<S>> = Vec::new();
    let mut rhs: Vec<S> = Vec::new();
    loop {
        // pivot: the remaining row with the largest residual norm
        let mut best = None;
        let mut best_norm = S::zero();
        for &r in &alive {
            let nrm = norm2(&work[r].0);
            if nrm > best_norm {
                best_norm = nrm;
                best = Some(r);
            }
        }
        let Some(pivot) = best else { break };
        if best_norm <= rank_tol {
            break;
        }
        let (mut q, mut qb) = work[pivot].clone();
        for v in q.iter_mut() {
            *v = *v / best_norm;
        }
        qb = qb / best_norm;
        alive.retain(|&r| r != pivot);
        for &r in &alive {
            let proj = dot(&q, &work[r].0);
            if proj != S::zero() {
                let (a, b) = &mut work[r];
                for (ai, qi) in a.iter_mut().zip(q.iter()) {
                    *ai -= proj * *qi;
                }
                *b = *b - proj * qb;
            }
        }
        kept.push(q);
        rhs.push(qb);
    }
    // remaining rows are numerically dependent; a residual right-hand side
    // far above the rank tolerance witnesses contradictory constraints
    for &r in &alive {
        if work[r].1.abs() > S::of(1e-4) {
            return Err(format!(
                "contradictory equality rows: 0 = {:e} after elimination",
                work[r].1.to_f64().unwrap_or(f64::NAN)
            ));
        }
    }
    let mut mat = DenseMat::zeros(kept.len(), n);
    for (r, row) in kept.iter().enumerate() {
        mat.row_mut(r).copy_from_slice(row);
    }
    Ok((mat, rhs))
}

/// Solve the relaxation; `warm_start` may provide an initial moment vector
/// (for instance the numerically integrated moments of a lift).
pub fn solve<S: Scalar>(
    rp: &RelaxationProblem<S>,
    opts: SolverOptions<S>,
    warm_start: Option<&[S]>,
) -> Result<ConicSolution<S>, RelaxError> {
    let n = rp.n_moments;
    let sense_sign = match rp.sense {
        Sense::Min => S::one(),
        Sense::Max => -S::one(),
    };

    let op_raw = BlockOp::from_problem(rp);

    // Jacobi right-preconditioning: scale every moment by the root of its
    // Gram diagonal so the cone operator has unit column norms. The whole
    // iteration runs in the scaled coordinates m̃ = D m.
    let diag = op_raw.gram().diagonal();
    let col_scale: Vec<S> = diag
        .iter()
        .map(|&d| if d > S::zero() { d.sqrt() } else { S::one() })
        .collect();
    let inv_scale: Vec<S> = col_scale.iter().map(|&s| S::one() / s).collect();

    let mut c = vec![S::zero(); n];
    for &(j, v) in &rp.objective {
        c[j] = sense_sign * v * inv_scale[j];
    }

    let sparse_rows: Vec<(Vec<(usize, S)>, S)> = rp
        .rows
        .iter()
        .map(|r| {
            let coeffs =
                r.coeffs.iter().map(|&(j, v)| (j, v * inv_scale[j])).collect();
            (coeffs, r.rhs)
        })
        .collect();
    let (a_mat, b_vec) = match orthonormalize_rows(&sparse_rows, n) {
        Ok(ab) => ab,
        Err(_witness) => {
            return Ok(ConicSolution {
                moments: vec![S::zero(); n],
                objective: S::zero(),
                status: SolverStatus::InfeasibleDetected,
                iterations: 0,
                primal_residual: S::infinity(),
                dual_residual: S::infinity(),
                eq_residual: S::infinity(),
                min_block_eigenvalue: S::zero(),
                solver_eq_residual: S::infinity(),
            });
        }
    };
    let n_rows = a_mat.rows;

    let op = op_raw.column_scaled(&inv_scale);
    let gram = op.gram();

    // dense factorization of the proximally regularized Gram operator
    // H = BᵀB + σI (unit BᵀB diagonal after the column scaling); cached for
    // the whole run
    let sigma = opts.proximal.max(S::zero());
    let mut h_dense = vec![S::zero(); n * n];
    for i in 0..gram.n_rows {
        for k in gram.row_ptr[i]..gram.row_ptr[i + 1] {
            h_dense[i * n + gram.cols[k]] = gram.vals[k];
        }
    }
    for i in 0..n {
        h_dense[i * n + i] += sigma;
    }
    let h_chol = Cholesky::new(n, &h_dense)
        .map_err(|e| RelaxError::NumericalBreakdown(format!("gram factorization: {e}")))?;
    drop(h_dense);

    // cached: W = H⁻¹Aᵀ and the Schur complement A H⁻¹ Aᵀ
    let mut w = DenseMat::zeros(n_rows, n);
    for r in 0..n_rows {
        let col = h_chol.solve(a_mat.row(r));
        w.row_mut(r).copy_from_slice(&col);
    }
    let mut schur = vec![S::zero(); n_rows * n_rows];
    for r in 0..n_rows {
        for s in 0..n_rows {
            schur[r * n_rows + s] = dot(a_mat.row(r), w.row(s));
        }
    }
    // symmetrize against CG noise
    for r in 0..n_rows {
        for s in r + 1..n_rows {
            let v = (schur[r * n_rows + s] + schur[s * n_rows + r]) * S::half();
            schur[r * n_rows + s] = v;
            schur[s * n_rows + r] = v;
        }
    }
    let schur_chol = if n_rows > 0 {
        Some(
            Cholesky::new(n_rows, &schur)
                .map_err(|e| RelaxError::NumericalBreakdown(format!("schur factorization: {e}")))?,
        )
    } else {
        None
    };

    // the m-update: minimize c·m + (ρ/2)‖Bm − V‖² + (σρ/2)‖m − m_prev‖²
    // s.t. Am = b
    let kkt_solve = |v_blocks: &[Vec<S>], m_prev: &[S], rho: S, scratch: &mut Vec<S>| -> Vec<S> {
        let mut rhs1 = vec![S::zero(); n];
        op.apply_t(v_blocks, &mut rhs1);
        for j in 0..n {
            rhs1[j] = rhs1[j] - c[j] / rho + sigma * m_prev[j];
        }
        let u = h_chol.solve(&rhs1);
        if let Some(chol) = &schur_chol {
            scratch.clear();
            scratch.resize(n_rows, S::zero());
            a_mat.matvec(&u, scratch);
            for r in 0..n_rows {
                scratch[r] -= b_vec[r];
            }
            let nu = chol.solve(scratch);
            let mut m = u;
            for r in 0..n_rows {
                let nr = nu[r];
                if nr != S::zero() {
                    let wr = w.row(r);
                    for j in 0..n {
                        m[j] -= nr * wr[j];
                    }
                }
            }
            m
        } else {
            u
        }
    };

    let dims = op.dims.clone();
    let block_len: usize = dims.iter().map(|&d| d * d).sum();
    let mut s_blocks = op.zero_blocks();
    let mut u_blocks = op.zero_blocks();
    let mut bm = op.zero_blocks();
    let mut v_blocks = op.zero_blocks();
    let mut m = vec![S::zero(); n];
    if let Some(w0) = warm_start {
        assert_eq!(w0.len(), n);
        for j in 0..n {
            m[j] = w0[j] * col_scale[j];
        }
        op.apply(&m, &mut s_blocks);
        project_psd(&dims, &mut s_blocks);
    }

    let mut rho = opts.rho;
    let alpha = opts.over_relax;
    let c_norm = norm2(&c).max(S::one());
    let mut status = SolverStatus::MaxIters;
    let mut iterations = opts.max_iters;
    let mut r_prim_rel = S::infinity();
    let mut r_dual_rel = S::infinity();
    let mut bt_scratch = vec![S::zero(); n];
    let mut row_scratch: Vec<S> = Vec::new();

    let flatten = |s: &[Vec<S>], u: &[Vec<S>], out: &mut Vec<S>| {
        out.clear();
        for blk in s.iter().chain(u.iter()) {
            out.extend_from_slice(blk);
        }
    };
    let unflatten = |w: &[S], s: &mut [Vec<S>], u: &mut [Vec<S>]| {
        let mut pos = 0;
        for blk in s.iter_mut().chain(u.iter_mut()) {
            let len = blk.len();
            blk.copy_from_slice(&w[pos..pos + len]);
            pos += len;
        }
    };

    let mut aa = Anderson::new(opts.anderson_memory);
    let mut w_cur = vec![S::zero(); 2 * block_len];
    let mut g_cur = vec![S::zero(); 2 * block_len];
    flatten(&s_blocks, &u_blocks, &mut w_cur);
    let mut best_g = S::infinity();

    for iter in 0..opts.max_iters {
        // one application of the splitting map at (S, U)
        for k in 0..v_blocks.len() {
            for (vv, (sv, uv)) in
                v_blocks[k].iter_mut().zip(s_blocks[k].iter().zip(u_blocks[k].iter()))
            {
                *vv = *sv - *uv;
            }
        }
        m = kkt_solve(&v_blocks, &m, rho, &mut row_scratch);
        op.apply(&m, &mut bm);

        let s_prev = s_blocks.clone();
        for k in 0..s_blocks.len() {
            for idx in 0..s_blocks[k].len() {
                let relaxed = alpha * bm[k][idx] + (S::one() - alpha) * s_prev[k][idx];
                s_blocks[k][idx] = relaxed + u_blocks[k][idx];
            }
        }
        project_psd(&dims, &mut s_blocks);
        for k in 0..u_blocks.len() {
            for idx in 0..u_blocks[k].len() {
                let relaxed = alpha * bm[k][idx] + (S::one() - alpha) * s_prev[k][idx];
                u_blocks[k][idx] += relaxed - s_blocks[k][idx];
            }
        }

        // convergence bookkeeping at the plain iterate
        let mut diff = S::zero();
        let mut bm_norm = S::zero();
        let mut s_norm = S::zero();
        for k in 0..bm.len() {
            for idx in 0..bm[k].len() {
                let d = bm[k][idx] - s_blocks[k][idx];
                diff = diff + d * d;
                bm_norm = bm_norm + bm[k][idx] * bm[k][idx];
                s_norm = s_norm + s_blocks[k][idx] * s_blocks[k][idx];
            }
        }
        let r_prim = diff.sqrt();
        let scale_p = bm_norm.sqrt().max(s_norm.sqrt()).max(S::one());
        r_prim_rel = r_prim / scale_p;
        let mut ds = s_blocks.clone();
        for k in 0..ds.len() {
            for idx in 0..ds[k].len() {
                ds[k][idx] -= s_prev[k][idx];
            }
        }
        op.apply_t(&ds, &mut bt_scratch);
        r_dual_rel = rho * norm2(&bt_scratch) / c_norm;

        if r_prim_rel <= opts.tol && r_dual_rel <= opts.tol {
            status = SolverStatus::Optimal;
            iterations = iter + 1;
            break;
        }

        if opts.adaptive_rho && iter % 50 == 49 {
            let ratio_gate = S::of(5.0);
            let mut changed = false;
            if r_prim_rel > ratio_gate * r_dual_rel && rho < S::of(1e6) {
                rho = rho * S::two();
                for blk in u_blocks.iter_mut() {
                    for v in blk.iter_mut() {
                        *v = *v * S::half();
                    }
                }
                changed = true;
            } else if r_dual_rel > ratio_gate * r_prim_rel && rho > S::of(1e-6) {
                rho = rho * S::half();
                for blk in u_blocks.iter_mut() {
                    for v in blk.iter_mut() {
                        *v = *v * S::two();
                    }
                }
                changed = true;
            }
            if changed {
                aa.reset();
                best_g = S::infinity();
                flatten(&s_blocks, &u_blocks, &mut w_cur);
                continue;
            }
        }

        if opts.anderson_memory > 0 {
            // fixed-point residual g = Φ(w) − w at the pre-step point
            flatten(&s_blocks, &u_blocks, &mut g_cur);
            for (g, w) in g_cur.iter_mut().zip(w_cur.iter()) {
                *g = *g - *w;
            }
            let g_norm = norm2(&g_cur);
            if g_norm > S::of(5.0) * best_g {
                // stagnating extrapolation: drop history, take plain steps
                aa.reset();
                best_g = g_norm.min(best_g);
                flatten(&s_blocks, &u_blocks, &mut w_cur);
            } else {
                best_g = best_g.min(g_norm);
                let accepted = match aa.push_and_extrapolate(&w_cur, &g_cur) {
                    Some(next) => {
                        // cap the extrapolation against runaway steps: the
                        // accelerated move may not dwarf the plain one
                        let mut dist = S::zero();
                        for ((nx, wx), gx) in
                            next.iter().zip(w_cur.iter()).zip(g_cur.iter())
                        {
                            let d = *nx - (*wx + *gx);
                            dist = dist + d * d;
                        }
                        if dist.sqrt() <= S::of(10.0) * g_norm.max(S::of(1e-30)) {
                            unflatten(&next, &mut s_blocks, &mut u_blocks);
                            w_cur = next;
                            true
                        } else {
                            false
                        }
                    }
                    None => false,
                };
                if !accepted {
                    flatten(&s_blocks, &u_blocks, &mut w_cur);
                }
            }
        }
    }

    // back to original coordinates; residuals recomputed from the returned
    // point
    for j in 0..n {
        m[j] *= inv_scale[j];
    }
    let eq_residual = equality_residual(rp, &m);
    let min_eig = min_block_eigenvalue(rp, &m);
    let obj_raw = rp.objective.iter().fold(S::zero(), |acc, &(j, v)| acc + v * m[j]);

    Ok(ConicSolution {
        moments: m,
        objective: obj_raw,
        status,
        iterations,
        primal_residual: r_prim_rel,
        dual_residual: r_dual_rel,
        eq_residual,
        min_block_eigenvalue: min_eig,
        solver_eq_residual: eq_residual,
    })
}

/// `‖Am − b‖_∞` over the problem's original rows.
pub fn equality_residual<S: Scalar>(rp: &RelaxationProblem<S>, m: &[S]) -> S {
    let mut worst = S::zero();
    for row in &rp.rows {
        let lhs = row.coeffs.iter().fold(S::zero(), |acc, &(j, c)| acc + c * m[j]);
        worst = worst.max((lhs - row.rhs).abs());
    }
    worst
}

/// Most negative eigenvalue across all blocks of `Bm` (0 when PSD).
pub fn min_block_eigenvalue<S: Scalar>(rp: &RelaxationProblem<S>, m: &[S]) -> S {
    let mats = rp.block_matrices(m);
    let mut min = S::zero();
    for (b, mat) in rp.blocks.iter().zip(mats.iter()) {
        if b.dim == 0 {
            continue;
        }
        let eig = sym_eigen(b.dim, mat);
        for &v in &eig.values {
            min = min.min(v);
        }
    }
    min
}

/// Per-row residuals `Am − b` of the original rows, exposed for report
/// generation.
pub fn equality_residual_vector<S: Scalar>(rp: &RelaxationProblem<S>, m: &[S]) -> Vec<S> {
    rp.rows
        .iter()
        .map(|row| {
            row.coeffs.iter().fold(S::zero(), |acc, &(j, c)| acc + c * m[j]) - row.rhs
        })
        .collect()
}
