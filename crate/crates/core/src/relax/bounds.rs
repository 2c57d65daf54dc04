//! Bound tables over objectives and relaxation degrees, and first-moment
//! extraction from solved relaxations.

use crate::error::RelaxError;
use crate::occupation::lift_occupation;
use crate::pde::{eval_on_solution, FieldSolution, PdeProblem};
use crate::poly::{Polynomial, Var};
use crate::quad::trapezoid_2d;
use crate::young::lift_dirac;
use crate::Scalar;

use super::assemble::{assemble, AssembleOptions, RelaxationProblem, Sense};
use super::basis::MeasureId;
use super::lift::lift_moments;
use super::solver::{solve, ConicSolution, SolverOptions, SolverStatus};

/// One line of the bounds table.
#[derive(Debug, Clone)]
pub struct BoundsRow<S: Scalar> {
    pub objective_id: String,
    pub degree: usize,
    pub lower: S,
    pub upper: S,
    pub gap: S,
    pub reference: S,
    pub lower_status: SolverStatus,
    pub upper_status: SolverStatus,
}

/// Reference value `∬ obj(t,x,y*,∂_t y*,∂_x y*) dx dt` of a linear
/// functional along a solution.
pub fn reference_functional<S: Scalar>(sol: &FieldSolution<S>, objective: &Polynomial<S>) -> S {
    let vals = eval_on_solution(sol, objective);
    trapezoid_2d(&sol.grid, &vals)
}

/// Run min and max relaxations for every objective and degree; gaps shrink
/// as the degree grows (nested hierarchy).
pub fn bounds_report<S: Scalar>(
    problem: &PdeProblem<S>,
    objectives: &[(String, Polynomial<S>)],
    degrees: &[usize],
    reference: &FieldSolution<S>,
    assemble_opts: AssembleOptions,
    solver_opts: SolverOptions<S>,
) -> Result<Vec<BoundsRow<S>>, RelaxError> {
    // the reference solution's lift seeds every solve: the near-feasible
    // start skips the cold-start transient of the proximal splitting
    let ref_lift = lift_occupation(&lift_dirac(reference), reference)
        .expect("lift of the reference solution");
    let mut out = Vec::new();
    for (id, objective) in objectives {
        let reference_value = reference_functional(reference, objective);
        for &d in degrees {
            let rp_min = assemble(problem, d, objective.clone(), Sense::Min, assemble_opts)?;
            let warm = lift_moments(&rp_min, &ref_lift);
            let low = solve(&rp_min, solver_opts, Some(&warm))?;
            let rp_max = assemble(problem, d, objective.clone(), Sense::Max, assemble_opts)?;
            let high = solve(&rp_max, solver_opts, Some(&warm))?;
            out.push(BoundsRow {
                objective_id: id.clone(),
                degree: d,
                lower: low.objective,
                upper: high.objective,
                gap: high.objective - low.objective,
                reference: reference_value,
                lower_status: low.status,
                upper_status: high.status,
            });
        }
    }
    Ok(out)
}

/// Extracted first moment `∫ t^a x^b y dμ̂`.
#[derive(Debug, Clone)]
pub struct FirstMoment<S: Scalar> {
    pub t_exp: usize,
    pub x_exp: usize,
    pub value: S,
}

/// Read the first moments in `y` from a solved relaxation, for all
/// `t^a x^b` weights with `a + b + 1 ≤ 2d`.
pub fn extract_first_moments<S: Scalar>(
    solution: &ConicSolution<S>,
    rp: &RelaxationProblem<S>,
) -> Result<Vec<FirstMoment<S>>, RelaxError> {
    if solution.status == SolverStatus::InfeasibleDetected {
        return Err(RelaxError::NotOptimal(solution.status.tag().into()));
    }
    let cap = 2 * rp.degree - 1;
    let mut out = Vec::new();
    for total in 0..=cap {
        for a in 0..=total {
            let b = total - a;
            let p = &(&Polynomial::<S>::var(Var::T).pow(a) * &Polynomial::var(Var::X).pow(b))
                * &Polynomial::var(Var::Y);
            let value = rp.evaluate(MeasureId::Interior, &p, &solution.moments)?;
            out.push(FirstMoment { t_exp: a, x_exp: b, value });
        }
    }
    Ok(out)
}

/// Reference first moments of a solution for comparison with extracted
/// ones.
pub fn reference_first_moments<S: Scalar>(
    sol: &FieldSolution<S>,
    degree: usize,
) -> Vec<FirstMoment<S>> {
    let cap = 2 * degree - 1;
    let mut out = Vec::new();
    for total in 0..=cap {
        for a in 0..=total {
            let b = total - a;
            let p = &(&Polynomial::<S>::var(Var::T).pow(a) * &Polynomial::var(Var::X).pow(b))
                * &Polynomial::var(Var::Y);
            out.push(FirstMoment { t_exp: a, x_exp: b, value: reference_functional(sol, &p) });
        }
    }
    out
}
