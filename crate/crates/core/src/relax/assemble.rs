//! Assembly of the finite-degree moment relaxation: equality rows from the
//! occupation-measure identity families instantiated on monomial test
//! functions, moment and localizing positivity blocks per measure, and a
//! linear objective.

use std::collections::BTreeMap;

use crate::error::RelaxError;
use crate::pde::PdeProblem;
use crate::poly::{Monomial, Polynomial, Var, NUM_VARS};
use crate::quad::gauss_legendre;
use crate::Scalar;

use super::basis::{
    box_polynomial, localizing_vars, matrix_row_basis, measure_basis, scaling_maps,
    to_scaled_poly, AffineMap, MeasureBasis, MeasureId,
};

/// Optimization sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    pub fn tag(self) -> &'static str {
        match self {
            Sense::Min => "min",
            Sense::Max => "max",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AssembleOptions {
    /// Affinely rescale all variables to `[−1,1]` boxes before assembly.
    pub rescale: bool,
    /// Keep only the first-moment content: drops the dissipation family and
    /// restricts the PDE identity to test functions constant in `y`. Used
    /// to demonstrate the relaxation gap the second-order constraints
    /// close.
    pub first_order_only: bool,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions { rescale: true, first_order_only: false }
    }
}

/// One equality row `Σ coeffs·m = rhs`.
#[derive(Debug, Clone)]
pub struct Row<S: Scalar> {
    pub family: &'static str,
    /// Monomial test function that generated the row, for audit.
    pub label: String,
    pub coeffs: Vec<(usize, S)>,
    pub rhs: S,
}

/// Kind of a positivity block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Moment,
    Localizing(Var),
}

/// One PSD block: entry `(i,j)` of the matrix is the linear functional
/// `Σ coeff·m[idx]` of the global moment vector.
#[derive(Debug, Clone)]
pub struct PsdBlock<S: Scalar> {
    pub measure: MeasureId,
    pub kind: BlockKind,
    pub dim: usize,
    /// Upper-triangle entries `(i, j, lincomb)` with `i ≤ j`.
    pub entries: Vec<(usize, usize, Vec<(usize, S)>)>,
}

/// Per-family row bookkeeping: emitted rows and rows skipped because an
/// instantiation would reference a moment beyond degree `2d` (skipped rows
/// are recorded, never silently truncated).
#[derive(Debug, Clone, Default)]
pub struct AssemblyLedger {
    pub families: BTreeMap<&'static str, FamilyCount>,
    pub skipped_labels: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FamilyCount {
    pub emitted: usize,
    /// Instantiations that would reference a moment beyond degree `2d`.
    pub skipped: usize,
    /// Rows satisfied identically by the support pinning of a boundary
    /// measure (`t` on the slices, `x ∈ {0,1}` and `y = 0` laterally).
    pub pinned: usize,
}

impl AssemblyLedger {
    fn emit(&mut self, family: &'static str) {
        self.families.entry(family).or_default().emitted += 1;
    }

    fn skip(&mut self, family: &'static str, label: String) {
        self.families.entry(family).or_default().skipped += 1;
        self.skipped_labels.push(format!("{family}: {label}"));
    }

    fn pin(&mut self, family: &'static str) {
        self.families.entry(family).or_default().pinned += 1;
    }

    pub fn count(&self, family: &str) -> FamilyCount {
        self.families.get(family).copied().unwrap_or_default()
    }
}

/// The assembled finite-degree relaxation.
#[derive(Debug, Clone)]
pub struct RelaxationProblem<S: Scalar> {
    pub degree: usize,
    pub problem: PdeProblem<S>,
    pub rescaled: bool,
    pub maps: [AffineMap<S>; NUM_VARS],
    pub bases: Vec<MeasureBasis<S>>,
    pub offsets: [usize; 4],
    pub n_moments: usize,
    pub rows: Vec<Row<S>>,
    pub blocks: Vec<PsdBlock<S>>,
    pub objective: Vec<(usize, S)>,
    pub objective_poly: Polynomial<S>,
    pub sense: Sense,
    pub ledger: AssemblyLedger,
}

impl<S: Scalar> RelaxationProblem<S> {
    pub fn basis(&self, id: MeasureId) -> &MeasureBasis<S> {
        &self.bases[id as usize]
    }

    pub fn offset(&self, id: MeasureId) -> usize {
        self.offsets[id as usize]
    }

    /// Global index of a reduced monomial of a measure.
    pub fn global_index(&self, id: MeasureId, mono: &Monomial) -> Option<usize> {
        self.basis(id).position(mono).map(|k| self.offset(id) + k)
    }

    /// Linear functional `m ↦ ∫ p dμ` over a measure, with `p` in original
    /// coordinates. Fails when a referenced moment exceeds degree `2d`.
    pub fn pair_row(&self, id: MeasureId, p: &Polynomial<S>) -> Result<Vec<(usize, S)>, RelaxError> {
        let scaled = to_scaled_poly(p, &self.maps);
        // accumulate (sum, largest contribution) so that coefficients that
        // cancel to rounding noise are recognized and dropped rather than
        // surviving as spurious tiny constraints
        let mut acc: BTreeMap<usize, (S, S)> = BTreeMap::new();
        for (mono, &coeff) in scaled.terms() {
            let Some((mult, red)) = self.basis(id).reduce(mono) else {
                continue;
            };
            let Some(idx) = self.global_index(id, &red) else {
                return Err(RelaxError::DegreeTooSmall {
                    two_d: 2 * self.degree,
                    what: format!("moment {} of measure {}", red, id.label()),
                    deg: red.total_degree(),
                });
            };
            let contr = coeff * mult;
            let e = acc.entry(idx).or_insert((S::zero(), S::zero()));
            e.0 = e.0 + contr;
            e.1 = e.1.max(contr.abs());
        }
        Ok(prune_cancellation(acc))
    }

    /// Value of `∫ p dμ` for a moment vector.
    pub fn evaluate(&self, id: MeasureId, p: &Polynomial<S>, m: &[S]) -> Result<S, RelaxError> {
        let row = self.pair_row(id, p)?;
        Ok(row.iter().fold(S::zero(), |acc, &(k, c)| acc + c * m[k]))
    }

    /// Append a raw equality row (for stress tests and custom pinning).
    pub fn push_equality_row(&mut self, label: &str, coeffs: Vec<(usize, S)>, rhs: S) {
        self.rows.push(Row { family: "custom", label: label.to_string(), coeffs, rhs });
        self.ledger.emit("custom");
    }

    /// Dense evaluation of all PSD blocks at a moment vector.
    pub fn block_matrices(&self, m: &[S]) -> Vec<Vec<S>> {
        self.blocks
            .iter()
            .map(|b| {
                let n = b.dim;
                let mut mat = vec![S::zero(); n * n];
                for (i, j, lin) in &b.entries {
                    let v = lin.iter().fold(S::zero(), |acc, &(k, c)| acc + c * m[k]);
                    mat[i * n + j] = v;
                    mat[j * n + i] = v;
                }
                mat
            })
            .collect()
    }
}

struct RowBuilder<'a, S: Scalar> {
    rp: &'a RelaxationProblem<S>,
}

impl<'a, S: Scalar> RowBuilder<'a, S> {
    /// Sum of measure pairings; `parts` lists `(measure, polynomial, sign)`.
    fn build(
        &self,
        parts: &[(MeasureId, &Polynomial<S>, S)],
    ) -> Result<Vec<(usize, S)>, RelaxError> {
        let mut acc: BTreeMap<usize, (S, S)> = BTreeMap::new();
        for (id, p, sign) in parts {
            for (idx, c) in self.rp.pair_row(*id, p)? {
                let contr = c * *sign;
                let e = acc.entry(idx).or_insert((S::zero(), S::zero()));
                e.0 = e.0 + contr;
                e.1 = e.1.max(contr.abs());
            }
        }
        Ok(prune_cancellation(acc))
    }
}

/// Keep accumulated coefficients whose magnitude is significant against the
/// contributions that formed them; pure cancellation residue is dropped.
fn prune_cancellation<S: Scalar>(acc: BTreeMap<usize, (S, S)>) -> Vec<(usize, S)> {
    let noise = S::of(1e-11);
    acc.into_iter()
        .filter_map(|(idx, (sum, max_contr))| {
            if sum == S::zero() || sum.abs() <= noise * max_contr {
                None
            } else {
                Some((idx, sum))
            }
        })
        .collect()
}

fn monomials_txy(max_total: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for total in 0..=max_total {
        for a in 0..=total {
            for b in 0..=total - a {
                out.push((a, b, total - a - b));
            }
        }
    }
    out
}

fn txy_poly<S: Scalar>(a: usize, b: usize, c: usize) -> Polynomial<S> {
    &(&Polynomial::var(Var::T).pow(a) * &Polynomial::var(Var::X).pow(b))
        * &Polynomial::var(Var::Y).pow(c)
}

/// Assemble the degree-`d` relaxation with objective `∫ objective dμ̂` over
/// the interior measure.
///
/// Equality families (test functions are monomials `t^a x^b y^c`):
///
/// * `ibp-t`, `ibp-x` — integration by parts against each boundary normal,
///   `deg φ + 1 ≤ 2d`;
/// * `pde` — the weak-formulation identity,
///   `deg φ + max(1, deg f) + 1 ≤ 2d`;
/// * `dissipation` — `φ = t^a`, `a ≤ 2d−2`, instantiations that would
///   overflow `2d` are skipped and recorded;
/// * `ic` — initial-slice moments of `x^b y^c` pinned to the exact
///   integrals `∫ x^b y0(x)^c dx`;
/// * `bc` — lateral moments of `t^a x^e y^c`, `c ≥ 1`, pinned to zero
///   (the Dirichlet trace);
/// * `normalization` — pure `(t,x)` moments of each boundary measure pinned
///   to the surface-measure integrals.
pub fn assemble<S: Scalar>(
    problem: &PdeProblem<S>,
    d: usize,
    objective: Polynomial<S>,
    sense: Sense,
    opts: AssembleOptions,
) -> Result<RelaxationProblem<S>, RelaxError> {
    assert!(d >= 1);
    let two_d = 2 * d;
    let deg_f = problem.f.total_degree().max(1);
    for (what, deg) in [
        ("reaction term f plus transport", problem.f.total_degree() + 1),
        ("objective", objective.total_degree()),
    ] {
        if deg > two_d {
            return Err(RelaxError::DegreeTooSmall { two_d, what: what.into(), deg });
        }
    }

    let maps = scaling_maps(problem, opts.rescale);
    let bases: Vec<MeasureBasis<S>> = MeasureId::ALL
        .iter()
        .map(|&id| measure_basis(id, two_d, problem.horizon, &maps))
        .collect();
    let mut offsets = [0usize; 4];
    let mut n = 0;
    for (k, b) in bases.iter().enumerate() {
        offsets[k] = n;
        n += b.len();
    }

    let mut rp = RelaxationProblem {
        degree: d,
        problem: problem.clone(),
        rescaled: opts.rescale,
        maps,
        bases,
        offsets,
        n_moments: n,
        rows: Vec::new(),
        blocks: Vec::new(),
        objective: Vec::new(),
        objective_poly: objective.clone(),
        sense,
        ledger: AssemblyLedger::default(),
    };

    // --- positivity blocks -------------------------------------------------
    let mut blocks = Vec::new();
    for &id in &MeasureId::ALL {
        let basis = rp.basis(id).clone();
        let moment_rows = matrix_row_basis(&basis, d);
        blocks.push(build_block(&rp, id, BlockKind::Moment, &moment_rows, &Polynomial::one()));
        if d >= 1 {
            let loc_rows = matrix_row_basis(&basis, d - 1);
            if !loc_rows.is_empty() {
                for &v in localizing_vars(id) {
                    // the box polynomial is expressed directly in working
                    // coordinates, matching the entries built by reduce()
                    let q = box_polynomial(v, &rp.maps, problem);
                    blocks.push(build_block(&rp, id, BlockKind::Localizing(v), &loc_rows, &q));
                }
            }
        }
    }
    rp.blocks = blocks;

    // --- equality rows ------------------------------------------------------
    let builder = RowBuilder { rp: &rp };
    let mut rows = Vec::new();
    let mut ledger = AssemblyLedger::default();
    let z0 = Polynomial::<S>::var(Var::Z0);
    let z1 = Polynomial::<S>::var(Var::Z1);
    let eta1 = Polynomial::univariate(Var::X, &[-S::one(), S::two()]); // 2x − 1

    // integration by parts, time and space
    for &(a, b, c) in monomials_txy(two_d.saturating_sub(1)).iter() {
        let phi = txy_poly::<S>(a, b, c);
        let interior_t = &phi.differentiate(Var::T) + &(&z0 * &phi.differentiate(Var::Y));
        match builder.build(&[
            (MeasureId::Interior, &interior_t, S::one()),
            (MeasureId::InitialSlice, &phi, S::one()),
            (MeasureId::TerminalSlice, &phi, -S::one()),
        ]) {
            Ok(coeffs) => {
                ledger.emit("ibp-t");
                rows.push(Row { family: "ibp-t", label: format!("t^{a} x^{b} y^{c}"), coeffs, rhs: S::zero() });
            }
            Err(_) => ledger.skip("ibp-t", format!("t^{a} x^{b} y^{c}")),
        }
        let interior_x = &phi.differentiate(Var::X) + &(&z1 * &phi.differentiate(Var::Y));
        let phi_eta = &phi * &eta1;
        match builder.build(&[
            (MeasureId::Interior, &interior_x, S::one()),
            (MeasureId::Lateral, &phi_eta, -S::one()),
        ]) {
            Ok(coeffs) => {
                ledger.emit("ibp-x");
                rows.push(Row { family: "ibp-x", label: format!("t^{a} x^{b} y^{c}"), coeffs, rhs: S::zero() });
            }
            Err(_) => ledger.skip("ibp-x", format!("t^{a} x^{b} y^{c}")),
        }
    }

    // weak-formulation identity
    let pde_cap = two_d.saturating_sub(1 + deg_f);
    for &(a, b, c) in monomials_txy(pde_cap).iter() {
        if opts.first_order_only && c > 0 {
            continue;
        }
        let phi = txy_poly::<S>(a, b, c);
        let transport = &phi * &(&z0 - &problem.f);
        let gradient = &(&phi.differentiate(Var::X) + &(&z1 * &phi.differentiate(Var::Y))) * &z1;
        let interior = &transport + &gradient;
        let boundary = &(&phi * &z1) * &eta1;
        match builder.build(&[
            (MeasureId::Interior, &interior, S::one()),
            (MeasureId::Lateral, &boundary, -S::one()),
        ]) {
            Ok(coeffs) => {
                ledger.emit("pde");
                rows.push(Row { family: "pde", label: format!("t^{a} x^{b} y^{c}"), coeffs, rhs: S::zero() });
            }
            Err(_) => ledger.skip("pde", format!("t^{a} x^{b} y^{c}")),
        }
    }

    // dissipation identity, φ = t^a
    if !opts.first_order_only && two_d >= 2 {
        for a in 0..=two_d - 2 {
            let phi = Polynomial::<S>::var(Var::T).pow(a);
            let dphi = phi.differentiate(Var::T);
            let interior = &(&(&phi * &z0.pow(2)) - &(&dphi * &z1.pow(2)).scale(S::half()))
                - &(&(&phi * &z0) * &problem.f);
            let half_z1sq_phi = (&phi * &z1.pow(2)).scale(S::half());
            match builder.build(&[
                (MeasureId::Interior, &interior, S::one()),
                (MeasureId::TerminalSlice, &half_z1sq_phi, S::one()),
                (MeasureId::InitialSlice, &half_z1sq_phi, -S::one()),
            ]) {
                Ok(coeffs) => {
                    ledger.emit("dissipation");
                    rows.push(Row { family: "dissipation", label: format!("t^{a}"), coeffs, rhs: S::zero() });
                }
                Err(_) => ledger.skip("dissipation", format!("t^{a}")),
            }
        }
    }

    // initial-condition rows: exact integrals ∫ x^b y0^c dx, evaluated in
    // factored form by a Gauss rule of sufficient order (expanding y0^c
    // first would cancel catastrophically for high powers)
    let deg_y0 = problem.y0.total_degree().max(1);
    let gl_order = (two_d * (deg_y0 + 1)) / 2 + 2;
    let (gl_nodes, gl_weights) = gauss_legendre::<S>(gl_order);
    let ic_rhs = |b: usize, c: usize| -> S {
        let mut acc = S::zero();
        for (node, weight) in gl_nodes.iter().zip(gl_weights.iter()) {
            let x = (*node + S::one()) * S::half();
            let y = problem.y0.eval_txy(S::zero(), x, S::zero());
            acc = acc + *weight * x.powi(b as i32) * y.powi(c as i32);
        }
        acc * S::half()
    };
    for total in 0..=two_d {
        for b in 0..=total {
            let c = total - b;
            let phi = &Polynomial::<S>::var(Var::X).pow(b) * &Polynomial::var(Var::Y).pow(c);
            let rhs = ic_rhs(b, c);
            match builder.build(&[(MeasureId::InitialSlice, &phi, S::one())]) {
                Ok(coeffs) => {
                    ledger.emit("ic");
                    rows.push(Row { family: "ic", label: format!("x^{b} y^{c}"), coeffs, rhs });
                }
                Err(_) => ledger.skip("ic", format!("x^{b} y^{c}")),
            }
        }
    }

    // lateral Dirichlet rows: y-moments vanish; with the trace support
    // pinned at y = 0 these hold identically and are recorded, not emitted
    for a in 0..=two_d {
        for e in 0..=1usize.min(two_d - a) {
            for c in 1..=two_d.saturating_sub(a + e) {
                let phi = &(&Polynomial::<S>::var(Var::T).pow(a) * &Polynomial::var(Var::X).pow(e))
                    * &Polynomial::var(Var::Y).pow(c);
                match builder.build(&[(MeasureId::Lateral, &phi, S::one())]) {
                    Ok(coeffs) if coeffs.is_empty() => ledger.pin("bc"),
                    Ok(coeffs) => {
                        ledger.emit("bc");
                        rows.push(Row { family: "bc", label: format!("t^{a} x^{e} y^{c}"), coeffs, rhs: S::zero() });
                    }
                    Err(_) => ledger.skip("bc", format!("t^{a} x^{e} y^{c}")),
                }
            }
        }
    }

    // normalization rows per component
    let horizon = problem.horizon;
    for b in 0..=two_d {
        let psi = Polynomial::<S>::var(Var::X).pow(b);
        let rhs = S::one() / S::of_usize(b + 1);
        if let Ok(coeffs) = builder.build(&[(MeasureId::InitialSlice, &psi, S::one())]) {
            ledger.emit("normalization");
            rows.push(Row { family: "normalization", label: format!("initial x^{b}"), coeffs, rhs });
        }
        if let Ok(coeffs) = builder.build(&[(MeasureId::TerminalSlice, &psi, S::one())]) {
            ledger.emit("normalization");
            rows.push(Row { family: "normalization", label: format!("terminal x^{b}"), coeffs, rhs });
        }
    }
    for a in 0..=two_d {
        for e in 0..=1usize.min(two_d - a) {
            let psi = &Polynomial::<S>::var(Var::T).pow(a) * &Polynomial::var(Var::X).pow(e);
            // ∫0^T t^a dt · (contribution of both lines: x=0 adds 0^e, x=1 adds 1)
            let t_int = horizon.powi(a as i32 + 1) / S::of_usize(a + 1);
            let rhs = if e == 0 { S::two() * t_int } else { t_int };
            if let Ok(coeffs) = builder.build(&[(MeasureId::Lateral, &psi, S::one())]) {
                ledger.emit("normalization");
                rows.push(Row { family: "normalization", label: format!("lateral t^{a} x^{e}"), coeffs, rhs });
            }
        }
    }

    // objective over the interior measure
    let objective_row = rp.pair_row(MeasureId::Interior, &objective)?;

    rp.rows = rows;
    rp.ledger = ledger;
    rp.objective = objective_row;
    Ok(rp)
}

/// Entries of a moment or localizing matrix: rows indexed by a degree-capped
/// monomial basis, entry `(α,β) = Σ_γ q_γ · m[reduce(α+β+γ)]`.
fn build_block<S: Scalar>(
    rp: &RelaxationProblem<S>,
    id: MeasureId,
    kind: BlockKind,
    row_basis: &[Monomial],
    q: &Polynomial<S>,
) -> PsdBlock<S> {
    let basis = rp.basis(id);
    let dim = row_basis.len();
    let mut entries = Vec::with_capacity(dim * (dim + 1) / 2);
    for i in 0..dim {
        for j in i..dim {
            let prod = row_basis[i].checked_mul(&row_basis[j]);
            let mut lin: BTreeMap<usize, S> = BTreeMap::new();
            for (gamma, &qc) in q.terms() {
                let full = prod.checked_mul(gamma);
                if let Some((mult, red)) = basis.reduce(&full) {
                    let idx = rp
                        .global_index(id, &red)
                        .expect("block entries stay within degree 2d by construction");
                    let e = lin.entry(idx).or_insert_with(S::zero);
                    *e = *e + qc * mult;
                }
            }
            let lin: Vec<(usize, S)> =
                lin.into_iter().filter(|(_, c)| *c != S::zero()).collect();
            if !lin.is_empty() {
                entries.push((i, j, lin));
            }
        }
    }
    PsdBlock { measure: id, kind, dim, entries }
}
