//! Solver and residual oracles: closed-form separation-of-variables
//! solutions, Richardson self-refinement, and convergence-order windows.

mod common;

use common::*;
use mvpde::config;
use mvpde::grid::{Field2, SpaceTimeGrid};
use mvpde::pde::{
    compute_derivatives, derive_zbox, energy_residual_dissipation, energy_residual_m2,
    enlarge_ybox, gronwall_stability_check, solve, solve_from_samples, weak_residual, Interval,
    PdeProblem, Scheme, SolveOptions,
};
use mvpde::poly::{Polynomial, Var};
use mvpde::quad::trapezoid_1d;
use mvpde::testfn::{space_basis, time_basis, BasisFamily, SpaceTestFn, TimeTestFn};

#[test]
fn heat_solution_matches_separation_of_variables() {
    // frozen calibration: err(64×64) ≈ HEAT_ERROR_COEFF · (dx²+dt²)
    let grid = SpaceTimeGrid::new(0.25, 64, 64);
    let sol = solve_heat_sine(&grid);
    let err = heat_max_error(&sol);
    let bound = config::CALIBRATION_SAFETY * config::HEAT_ERROR_COEFF * grid.h2();
    assert!(err <= bound, "err {err:e} > bound {bound:e}");
    assert!(err > 0.0);
}

#[test]
fn heat_convergence_order_is_second() {
    let mut errors = Vec::new();
    for n in [32usize, 64, 128] {
        let grid = SpaceTimeGrid::new(0.25, n, n);
        errors.push(heat_max_error(&solve_heat_sine(&grid)));
    }
    let order1 = (errors[0] / errors[1]).log2();
    let order2 = (errors[1] / errors[2]).log2();
    for order in [order1, order2] {
        assert!((1.7..=2.3).contains(&order), "observed order {order}");
    }
}

#[test]
fn refinement_factor_within_second_order_window() {
    let coarse = SpaceTimeGrid::new(0.25, 48, 47);
    let fine = coarse.refined(2);
    let e1 = heat_max_error(&solve_heat_sine(&coarse));
    let e2 = heat_max_error(&solve_heat_sine(&fine));
    let factor = e1 / e2;
    assert!((3.2..=4.8).contains(&factor), "refinement factor {factor}");
}

#[test]
fn zero_data_gives_zero_solution() {
    let problem = cubic_zero_problem(1.0);
    let grid = SpaceTimeGrid::new(1.0, 16, 15);
    let sol = solve(&problem, &grid, SolveOptions::default()).unwrap();
    assert_eq!(sol.y.max_abs(), 0.0);
    assert!(!sol.range_escape);
}

#[test]
fn allen_cahn_matches_richardson_self_oracle() {
    let problem = allen_cahn_parabola_problem();
    let coarse = SpaceTimeGrid::new(0.5, 32, 31);
    let fine = coarse.refined(4);
    let sol_c = solve(&problem, &coarse, SolveOptions::default()).unwrap();
    let sol_f = solve(&problem, &fine, SolveOptions::default()).unwrap();
    assert!(!sol_c.range_escape && !sol_f.range_escape);
    // value at (T, 1/2): coarse node (32, 16) vs fine node (128, 64)
    let v_c = sol_c.y[(32, 16)];
    let v_f = sol_f.y[(128, 64)];
    // fine solve is 16× more accurate; the difference is the coarse error
    let tol = 2.0 * config::CALIBRATION_SAFETY * config::HEAT_ERROR_COEFF * coarse.h2();
    assert!((v_c - v_f).abs() <= tol, "coarse {v_c} fine {v_f}");
}

#[test]
fn linear_reaction_reproduces_shifted_eigenvalue() {
    // f = λy with λ = 1: solution e^{(λ−π²)t} sin(πx) from tabulated data
    let lambda = 1.0;
    let problem = PdeProblem::with_estimated_lipschitz(
        0.25,
        Polynomial::var(Var::Y).scale(lambda),
        parabola_ic(),
        Interval::new(-0.2, 1.2),
        mvpde::pde::DerivativeBox {
            z0: Interval::new(-12.0, 12.0),
            z1: Interval::new(-4.0, 4.0),
        },
    )
    .unwrap();
    let grid = SpaceTimeGrid::new(0.25, 64, 64);
    let ic = sine_ic_samples(&grid);
    let sol = solve_from_samples(&problem, &grid, SolveOptions::default(), &ic).unwrap();
    let mut err = 0.0_f64;
    for i in 0..grid.rows() {
        for j in 0..grid.cols() {
            let exact = ((lambda - PI * PI) * grid.t(i)).exp() * (PI * grid.x(j)).sin();
            err = err.max((sol.y[(i, j)] - exact).abs());
        }
    }
    assert!(err <= config::CALIBRATION_SAFETY * config::HEAT_ERROR_COEFF * grid.h2(), "err {err:e}");
}

#[test]
fn implicit_euler_is_first_order_in_time() {
    let opts = SolveOptions { scheme: Scheme::ImplicitEuler, ..SolveOptions::default() };
    let problem = heat_validation_problem();
    let mut errors = Vec::new();
    for nt in [64usize, 128, 256] {
        // fine fixed space grid so the time error dominates
        let grid = SpaceTimeGrid::new(0.25, nt, 511);
        let ic = sine_ic_samples(&grid);
        let sol = solve_from_samples(&problem, &grid, opts, &ic).unwrap();
        errors.push(heat_max_error(&sol));
    }
    let order = (errors[0] / errors[1]).log2();
    assert!((0.7..=1.3).contains(&order), "implicit-euler time order {order}");
}

#[test]
fn derivatives_reproduce_low_degree_polynomials_exactly() {
    let grid = SpaceTimeGrid::<f64>::new(1.0, 10, 9);
    // y = x(1−x), constant in time
    let table = Field2::from_fn(grid.rows(), grid.cols(), |_, j| {
        let x = grid.x(j);
        x * (1.0 - x)
    });
    let (dty, dxy) = compute_derivatives(&table, &grid);
    for i in 0..grid.rows() {
        for j in 0..grid.cols() {
            assert!(dty[(i, j)].abs() <= 1e-13);
            let expect = 1.0 - 2.0 * grid.x(j);
            assert!((dxy[(i, j)] - expect).abs() <= 1e-12, "at ({i},{j})");
        }
    }
    // y = t: unit time derivative everywhere, one-sided rows included
    let table = Field2::from_fn(grid.rows(), grid.cols(), |i, _| grid.t(i));
    let (dty, _) = compute_derivatives(&table, &grid);
    for i in 0..grid.rows() {
        for j in 0..grid.cols() {
            assert!((dty[(i, j)] - 1.0).abs() <= 1e-12);
        }
    }
    // mixed degree-2 polynomial t² + tx reproduced exactly
    let table = Field2::from_fn(grid.rows(), grid.cols(), |i, j| {
        let (t, x) = (grid.t(i), grid.x(j));
        t * t + t * x
    });
    let (dty, dxy) = compute_derivatives(&table, &grid);
    for i in 0..grid.rows() {
        for j in 0..grid.cols() {
            let (t, x) = (grid.t(i), grid.x(j));
            assert!((dty[(i, j)] - (2.0 * t + x)).abs() <= 1e-12);
            assert!((dxy[(i, j)] - t).abs() <= 1e-12);
        }
    }
}

#[test]
fn tabulated_heat_derivative_table_is_second_order() {
    let grid = SpaceTimeGrid::<f64>::new(0.25, 64, 64);
    let table = Field2::from_fn(grid.rows(), grid.cols(), |i, j| exact_heat(grid.t(i), grid.x(j)));
    let (_, dxy) = compute_derivatives(&table, &grid);
    let mut err = 0.0_f64;
    for i in 0..grid.rows() {
        for j in 0..grid.cols() {
            err = err.max((dxy[(i, j)] - exact_heat_dx(grid.t(i), grid.x(j))).abs());
        }
    }
    // |∂_x³ y| ≤ π³: central stencil error π³dx²/6, one-sided π³dx²/3
    let dx2 = grid.dx * grid.dx;
    assert!(err <= PI.powi(3) * dx2 / 3.0 * 1.5, "err {err:e}");
}

#[test]
fn weak_residual_vanishes_for_exact_solution_tables() {
    let problem = heat_validation_problem();
    let v = SpaceTestFn::sine(1);
    let phi = TimeTestFn::poly_bump(0.25, &Polynomial::one());
    let mut residuals = Vec::new();
    for n in [32usize, 64] {
        let grid = SpaceTimeGrid::new(0.25, n, n);
        let sol = solve_heat_sine(&grid);
        residuals.push(weak_residual(&sol, &problem, &v, &phi).abs());
    }
    assert!(residuals[1] <= config::tol_residual(&SpaceTimeGrid::new(0.25, 64, 64)));
    let ratio = residuals[0] / residuals[1];
    assert!(ratio >= 3.0, "weak residual refinement ratio {ratio}");
}

#[test]
fn weak_residual_zero_for_zero_solution() {
    let problem = cubic_zero_problem(1.0);
    let grid = SpaceTimeGrid::new(1.0, 12, 11);
    let sol = solve(&problem, &grid, SolveOptions::default()).unwrap();
    let v = SpaceTestFn::poly_bump(&Polynomial::one());
    let phi = TimeTestFn::poly_bump(1.0, &Polynomial::one());
    assert_eq!(weak_residual(&sol, &problem, &v, &phi), 0.0);
    assert_eq!(energy_residual_m2(&sol, &problem, &v, &phi), 0.0);
    assert_eq!(energy_residual_dissipation(&sol, &problem, &phi), 0.0);
}

#[test]
fn allen_cahn_residuals_decay_at_second_order() {
    let problem = allen_cahn_problem();
    let tb = time_basis::<f64>(BasisFamily::PolyBump, 5, 0.5);
    let sb = space_basis::<f64>(BasisFamily::Sine, 2);
    let grids = [SpaceTimeGrid::new(0.5, 24, 23), SpaceTimeGrid::new(0.5, 48, 47)];
    let mut max_res = [0.0_f64; 2];
    for (k, grid) in grids.iter().enumerate() {
        let sol = solve(&problem, grid, SolveOptions::default()).unwrap();
        for phi in &tb {
            for v in &sb {
                max_res[k] = max_res[k].max(weak_residual(&sol, &problem, v, phi).abs());
                max_res[k] = max_res[k].max(energy_residual_m2(&sol, &problem, v, phi).abs());
            }
            max_res[k] = max_res[k].max(energy_residual_dissipation(&sol, &problem, phi).abs());
        }
    }
    let ratio = max_res[0] / max_res[1];
    assert!(
        (2.8..=6.0).contains(&ratio),
        "residual refinement ratio {ratio} (coarse {:e}, fine {:e})",
        max_res[0],
        max_res[1]
    );
}

#[test]
fn energy_residuals_small_on_exact_heat_tables() {
    let problem = heat_validation_problem();
    let grid = SpaceTimeGrid::new(0.25, 64, 64);
    let sol = solve_heat_sine(&grid);
    let v = SpaceTestFn::sine(1);
    let phi = TimeTestFn::poly_bump(0.25, &Polynomial::one());
    let r1 = energy_residual_m2(&sol, &problem, &v, &phi).abs();
    let r2 = energy_residual_dissipation(&sol, &problem, &phi).abs();
    let tol = config::tol_residual(&grid);
    assert!(r1 <= tol, "energy residual {r1:e} > {tol:e}");
    assert!(r2 <= tol, "dissipation residual {r2:e} > {tol:e}");
}

#[test]
fn gronwall_zero_perturbation_is_trivially_stable() {
    let problem = heat_parabola_problem();
    let grid = SpaceTimeGrid::new(0.25, 32, 31);
    let check = gronwall_stability_check(
        &problem,
        &grid,
        &Polynomial::zero(),
        config::POINCARE_UNIT_INTERVAL,
    )
    .unwrap();
    assert!(check.ok);
    assert!(check.lhs.iter().all(|&v| v == 0.0));
}

#[test]
fn gronwall_heat_decays_at_poincare_rate() {
    let problem = heat_parabola_problem();
    let grid = SpaceTimeGrid::new(0.25, 64, 64);
    let pert = parabola_ic().scale(1e-3);
    let check =
        gronwall_stability_check(&problem, &grid, &pert, config::POINCARE_UNIT_INTERVAL).unwrap();
    assert!(check.ok, "heat Grönwall bound violated");
    // eigenfunction-expansion oracle: every mode decays at least like
    // e^{-2π²t}
    let expected_last = (-2.0 * PI * PI * 0.25).exp() * check.lhs[0];
    assert!(check.lhs[grid.nt] <= expected_last * 1.05);
}

#[test]
fn gronwall_allen_cahn_bound_holds() {
    let problem = allen_cahn_problem();
    assert!((problem.l_y - 1.0).abs() <= 1e-9, "L_Y should be 1 for f = y - y³");
    let grid = SpaceTimeGrid::new(0.5, 64, 64);
    for eps in [1e-3, 1e-2] {
        let pert = parabola_ic().scale(eps);
        let check =
            gronwall_stability_check(&problem, &grid, &pert, config::POINCARE_UNIT_INTERVAL)
                .unwrap();
        assert!(check.ok, "Allen-Cahn Grönwall bound violated at eps={eps}");
    }
}

#[test]
fn ybox_enlargement_and_zbox_derivation() {
    let problem = allen_cahn_problem();
    let grid = SpaceTimeGrid::new(0.5, 32, 31);
    let enlarged = enlarge_ybox(&problem, &grid).unwrap();
    let sol = solve(&enlarged, &grid, SolveOptions::default()).unwrap();
    assert!(!sol.range_escape);
    let zbox = derive_zbox(&sol);
    assert!(zbox.z0.contains(sol.dty.min()) && zbox.z0.contains(sol.dty.max()));
    assert!(zbox.z1.contains(sol.dxy.min()) && zbox.z1.contains(sol.dxy.max()));
}

#[test]
fn dirichlet_rows_exactly_zero_and_l2_norm_decays() {
    let problem = allen_cahn_problem();
    let grid = SpaceTimeGrid::new(0.5, 32, 31);
    let sol = solve(&problem, &grid, SolveOptions::default()).unwrap();
    for i in 0..grid.rows() {
        assert_eq!(sol.y[(i, 0)], 0.0);
        assert_eq!(sol.y[(i, grid.cols() - 1)], 0.0);
    }
    // sanity: the L² profile stays bounded
    let last: Vec<f64> = sol.y.row(grid.nt).iter().map(|v| v * v).collect();
    assert!(trapezoid_1d(&last, grid.dx).is_finite());
}

#[test]
fn newton_divergence_is_reported() {
    // a strongly superlinear reaction with a single permitted iteration
    let y = Polynomial::var(Var::Y);
    let problem = PdeProblem::with_estimated_lipschitz(
        0.5,
        y.pow(3).scale(500.0),
        parabola_ic(),
        Interval::new(-5.0, 5.0),
        mvpde::pde::DerivativeBox {
            z0: Interval::new(-100.0, 100.0),
            z1: Interval::new(-100.0, 100.0),
        },
    )
    .unwrap();
    let grid = SpaceTimeGrid::new(0.5, 4, 15);
    let opts = SolveOptions { newton_max_iter: 1, ..SolveOptions::default() };
    match solve(&problem, &grid, opts) {
        Err(mvpde::error::PdeError::NewtonDivergence { residual, tol, .. }) => {
            assert!(residual > tol);
        }
        other => panic!("expected newton divergence, got {other:?}"),
    }
}

#[test]
fn singular_jacobian_is_reported() {
    // pick a linear reaction rate that zeroes the Jacobian diagonal:
    // 1 + 2·dt·θ/dx² − dt·θ·c = 0
    let grid = SpaceTimeGrid::<f64>::new(0.5, 4, 15);
    let theta = 0.5;
    let dt = grid.dt;
    let dx2 = grid.dx * grid.dx;
    let c = (1.0 + 2.0 * dt * theta / dx2) / (dt * theta);
    let problem = PdeProblem::with_estimated_lipschitz(
        0.5,
        Polynomial::var(Var::Y).scale(c),
        parabola_ic(),
        Interval::new(-1e6, 1e6),
        mvpde::pde::DerivativeBox {
            z0: Interval::new(-1e9, 1e9),
            z1: Interval::new(-1e9, 1e9),
        },
    )
    .unwrap();
    match solve(&problem, &grid, SolveOptions::default()) {
        Err(mvpde::error::PdeError::SingularJacobian { .. }) => {}
        other => panic!("expected singular jacobian, got {other:?}"),
    }
}
