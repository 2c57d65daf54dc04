//! Finite-degree moment relaxations of the occupation-measure identities.
//!
//! An assembled relaxation carries moment variables for the interior
//! occupation measure and the three boundary measures, equality rows from
//! the identity families instantiated on monomial test functions, and PSD
//! moment/localizing blocks certifying support in the problem boxes.
//! Solving min/max pairs over a linear objective yields convergent bounds on
//! linear functionals of the solution: the feasible set at degree `d+1`
//! projects into the one at degree `d`, so lower bounds are nondecreasing
//! and upper bounds nonincreasing along the hierarchy.

mod assemble;
mod basis;
mod bounds;
mod lift;
mod sdpa;
mod solver;

pub use assemble::{
    assemble, AssembleOptions, AssemblyLedger, BlockKind, FamilyCount, PsdBlock,
    RelaxationProblem, Row, Sense,
};
pub use basis::{
    box_polynomial, localizing_vars, measure_basis, scaling_maps, to_scaled_poly, AffineMap,
    MeasureBasis, MeasureId,
};
pub use bounds::{
    bounds_report, extract_first_moments, reference_first_moments, reference_functional,
    BoundsRow, FirstMoment,
};
pub use lift::lift_moments;
pub use sdpa::to_sdpa_sparse;
pub use solver::{
    equality_residual, equality_residual_vector, min_block_eigenvalue, orthonormalize_rows,
    solve, ConicSolution, SolverOptions, SolverStatus,
};
