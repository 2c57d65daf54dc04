//! Export of an assembled relaxation to the sparse SDPA exchange text
//! format (`.dat-s`), so external conic solvers can cross-check the
//! in-house one.
//!
//! Layout: the primal variables are the moments `m`. Every PSD block of the
//! relaxation becomes one block of the SDPA block structure; the equality
//! rows `a·m = b` are encoded as a trailing diagonal block holding the pairs
//! `a·m − b ≥ 0` and `b − a·m ≥ 0`. With `F_0` carrying the constants and
//! `F_j` the coefficient patterns, the exported problem is
//! `min Σ c_j m_j  s.t.  Σ_j m_j F_j − F_0 ⪰ 0`.

use std::fmt::Write as _;

use crate::Scalar;

use super::assemble::{BlockKind, RelaxationProblem, Sense};

/// Render the `.dat-s` text.
pub fn to_sdpa_sparse<S: Scalar>(rp: &RelaxationProblem<S>) -> String {
    let n_vars = rp.n_moments;
    let n_psd = rp.blocks.len();
    let n_eq = rp.rows.len();
    let mut s = String::new();
    let _ = writeln!(s, "* moment relaxation export, degree {}", rp.degree);
    let _ = writeln!(
        s,
        "* objective sense: {} (coefficients below are for minimization)",
        rp.sense.tag()
    );
    let _ = writeln!(s, "* blocks 1..{n_psd}: moment/localizing matrices; final diagonal block: paired equality slacks");
    for (k, b) in rp.blocks.iter().enumerate() {
        let kind = match b.kind {
            BlockKind::Moment => "moment".to_string(),
            BlockKind::Localizing(v) => format!("localizing {}", v.name()),
        };
        let _ = writeln!(s, "* block {} = {} {} (dim {})", k + 1, b.measure.label(), kind, b.dim);
    }
    let _ = writeln!(s, "{n_vars}");
    let _ = writeln!(s, "{}", n_psd + 1);
    let mut sizes: Vec<String> = rp.blocks.iter().map(|b| b.dim.to_string()).collect();
    sizes.push(format!("-{}", 2 * n_eq.max(1)));
    let _ = writeln!(s, "{}", sizes.join(" "));

    // objective vector (minimization form)
    let sign = match rp.sense {
        Sense::Min => S::one(),
        Sense::Max => -S::one(),
    };
    let mut c = vec![S::zero(); n_vars];
    for &(j, v) in &rp.objective {
        c[j] = sign * v;
    }
    let c_line: Vec<String> = c.iter().map(|v| format!("{:e}", v.to_f64().unwrap_or(0.0))).collect();
    let _ = writeln!(s, "{}", c_line.join(" "));

    // PSD block entries: F_j gets the coefficient of moment j at (i,j)
    for (k, b) in rp.blocks.iter().enumerate() {
        let blkno = k + 1;
        for (i, j, lin) in &b.entries {
            for &(var, coeff) in lin {
                let _ = writeln!(
                    s,
                    "{} {} {} {} {:e}",
                    var + 1,
                    blkno,
                    i + 1,
                    j + 1,
                    coeff.to_f64().unwrap_or(0.0)
                );
            }
        }
    }

    // equality rows as paired diagonal entries in the last block
    let eq_blk = n_psd + 1;
    for (r, row) in rp.rows.iter().enumerate() {
        let pos = 2 * r + 1;
        let neg = 2 * r + 2;
        for &(var, coeff) in &row.coeffs {
            let cf = coeff.to_f64().unwrap_or(0.0);
            let _ = writeln!(s, "{} {} {} {} {:e}", var + 1, eq_blk, pos, pos, cf);
            let _ = writeln!(s, "{} {} {} {} {:e}", var + 1, eq_blk, neg, neg, -cf);
        }
        let rhs = row.rhs.to_f64().unwrap_or(0.0);
        if rhs != 0.0 {
            let _ = writeln!(s, "0 {} {} {} {:e}", eq_blk, pos, pos, rhs);
            let _ = writeln!(s, "0 {} {} {} {:e}", eq_blk, neg, neg, -rhs);
        }
    }
    s
}
