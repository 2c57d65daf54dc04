//! Columnar CSV artifacts with JSON headers.
//!
//! All writers are deterministic: fixed row order, shortest-round-trip float
//! formatting, and JSON with sorted keys, so identical inputs produce
//! byte-identical files.

use std::fmt::Write as _;

use serde_json::json;

use crate::occupation::OccupationLift;
use crate::pde::FieldSolution;
use crate::relax::BoundsRow;
use crate::young::YoungField;
use crate::Scalar;

fn fmt<S: Scalar>(v: S) -> String {
    // shortest round-trip representation of the f64 value
    format!("{}", v.to_f64().unwrap_or(f64::NAN))
}

/// Columnar CSV `(t, x, y, dty, dxy)`, row-major in time.
pub fn solution_csv<S: Scalar>(sol: &FieldSolution<S>) -> String {
    let grid = &sol.grid;
    let mut out = String::from("t,x,y,dty,dxy\n");
    for i in 0..grid.rows() {
        for j in 0..grid.cols() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt(grid.t(i)),
                fmt(grid.x(j)),
                fmt(sol.y[(i, j)]),
                fmt(sol.dty[(i, j)]),
                fmt(sol.dxy[(i, j)])
            );
        }
    }
    out
}

/// JSON header describing a solution artifact; `problem_hash` ties the
/// artifact to the configuration that produced it.
pub fn solution_header<S: Scalar>(sol: &FieldSolution<S>, problem_hash: &str) -> String {
    let grid = &sol.grid;
    let v = json!({
        "grid": {
            "nt": grid.nt,
            "nx": grid.nx,
            "horizon": grid.horizon.to_f64(),
            "dt": grid.dt.to_f64(),
            "dx": grid.dx.to_f64(),
        },
        "scheme": sol.scheme.tag(),
        "range_escape": sol.range_escape,
        "problem_hash": problem_hash,
    });
    serde_json::to_string_pretty(&v).expect("header serializes")
}

/// CSV `(t, x, atom_index, weight, y, z0, z1)` of a Young field.
pub fn young_field_csv<S: Scalar>(field: &YoungField<S>) -> String {
    let grid = &field.grid;
    let mut out = String::from("t,x,atom_index,weight,y,z0,z1\n");
    for i in 0..grid.rows() {
        for j in 0..grid.cols() {
            for (k, a) in field.cell(i, j).atoms.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    fmt(grid.t(i)),
                    fmt(grid.x(j)),
                    k,
                    fmt(a.weight),
                    fmt(a.y),
                    fmt(a.z0),
                    fmt(a.z1)
                );
            }
        }
    }
    out
}

/// Boundary CSVs of an occupation lift: initial and terminal slices indexed
/// by `x`, the lateral component by `(t, x)` with `x ∈ {0,1}`.
pub fn boundary_csvs<S: Scalar>(lift: &OccupationLift<S>) -> (String, String, String) {
    let grid = &lift.interior.grid;
    let slice = |cells: &[crate::young::CellMeasure<S>]| {
        let mut out = String::from("x,atom_index,weight,y,z0,z1\n");
        for (j, cell) in cells.iter().enumerate() {
            for (k, a) in cell.atoms.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    fmt(grid.x(j)),
                    k,
                    fmt(a.weight),
                    fmt(a.y),
                    fmt(a.z0),
                    fmt(a.z1)
                );
            }
        }
        out
    };
    let q1 = slice(&lift.q1);
    let q2 = slice(&lift.q2);
    let mut q3 = String::from("t,x,atom_index,weight,y,z0,z1\n");
    for (side, cells) in [(0usize, &lift.q3_left), (1usize, &lift.q3_right)] {
        for (i, cell) in cells.iter().enumerate() {
            for (k, a) in cell.atoms.iter().enumerate() {
                let _ = writeln!(
                    q3,
                    "{},{},{},{},{},{},{}",
                    fmt(grid.t(i)),
                    side,
                    k,
                    fmt(a.weight),
                    fmt(a.y),
                    fmt(a.z0),
                    fmt(a.z1)
                );
            }
        }
    }
    (q1, q2, q3)
}

/// Bounds table CSV `(objective_id, d, sense, value, gap, reference)`: one
/// line per solved sense.
pub fn bounds_csv<S: Scalar>(rows: &[BoundsRow<S>]) -> String {
    let mut out = String::from("objective_id,d,sense,value,gap,reference\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},min,{},{},{}",
            r.objective_id,
            r.degree,
            fmt(r.lower),
            fmt(r.gap),
            fmt(r.reference)
        );
        let _ = writeln!(
            out,
            "{},{},max,{},{},{}",
            r.objective_id,
            r.degree,
            fmt(r.upper),
            fmt(r.gap),
            fmt(r.reference)
        );
    }
    out
}

/// FNV-1a hash of a canonical byte representation, rendered as 16 hex
/// digits; used to fingerprint configurations inside artifacts.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}
