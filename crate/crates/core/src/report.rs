//! Residual reports: one report per constraint family, each entry indexed by
//! the test-function basis that produced it.

use serde_json::json;

use crate::grid::SpaceTimeGrid;
use crate::Scalar;

/// Constraint family a residual entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    IbpTime,
    IbpSpace,
    M1Weak,
    M1Ic,
    M1Bc,
    M2Weak,
    M2Ic,
    M2Bc,
    Dissipation,
    Certificate,
    OccIbpTime,
    OccIbpSpace,
    OccWeak,
    OccDissipation,
    OccIc,
    OccBc,
    OccNormalization,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::IbpTime => "ibp-time",
            Family::IbpSpace => "ibp-space",
            Family::M1Weak => "m1-weak",
            Family::M1Ic => "m1-ic",
            Family::M1Bc => "m1-bc",
            Family::M2Weak => "m2-weak",
            Family::M2Ic => "m2-ic",
            Family::M2Bc => "m2-bc",
            Family::Dissipation => "dissipation",
            Family::Certificate => "certificate",
            Family::OccIbpTime => "occupation-ibp-time",
            Family::OccIbpSpace => "occupation-ibp-space",
            Family::OccWeak => "occupation-weak",
            Family::OccDissipation => "occupation-dissipation",
            Family::OccIc => "occupation-ic",
            Family::OccBc => "occupation-bc",
            Family::OccNormalization => "occupation-normalization",
        }
    }
}

/// One residual with the basis indices that generated it.
#[derive(Debug, Clone)]
pub struct ResidualEntry<S: Scalar> {
    pub indices: Vec<usize>,
    pub value: S,
}

/// Residual norms for one constraint family with grid provenance.
#[derive(Debug, Clone)]
pub struct ResidualReport<S: Scalar> {
    pub family: Family,
    pub entries: Vec<ResidualEntry<S>>,
    pub max_abs: S,
    pub l2: S,
    pub grid_label: String,
    pub h2: S,
}

impl<S: Scalar> ResidualReport<S> {
    pub fn new(family: Family, grid: &SpaceTimeGrid<S>, entries: Vec<ResidualEntry<S>>) -> Self {
        let max_abs = entries
            .iter()
            .fold(S::zero(), |acc, e| acc.max(e.value.abs()));
        let l2 = entries
            .iter()
            .fold(S::zero(), |acc, e| acc + e.value * e.value)
            .sqrt();
        ResidualReport {
            family,
            entries,
            max_abs,
            l2,
            grid_label: grid.shape_label(),
            h2: grid.h2(),
        }
    }

    pub fn passes(&self, tol: S) -> bool {
        self.max_abs <= tol
    }

    pub fn to_json(&self, tol: S) -> serde_json::Value {
        json!({
            "family": self.family.tag(),
            "grid": self.grid_label,
            "h2": self.h2.to_f64(),
            "tolerance": tol.to_f64(),
            "pass": self.passes(tol),
            "max": self.max_abs.to_f64(),
            "l2": self.l2.to_f64(),
            "entries": self.entries.iter().map(|e| json!({
                "indices": e.indices,
                "value": e.value.to_f64(),
            })).collect::<Vec<_>>(),
        })
    }
}
