//! Command implementations: solve, verify, relax, convergence-study.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use mvpde::config as defaults;
use mvpde::emv::{dual_heat_certificate, emv_residual_suite, ibp_residual_suite, mv_residual_suite};
use mvpde::grid::SpaceTimeGrid;
use mvpde::io;
use mvpde::occupation::{lift_occupation, occupation_identity_suite};
use mvpde::pde::{solve as pde_solve, FieldSolution, PdeProblem, SolveOptions};
use mvpde::relax::{
    assemble, bounds_report, to_sdpa_sparse, AssembleOptions, Sense, SolverOptions,
};
use mvpde::report::ResidualReport;
use mvpde::testfn::{space_basis, state_basis, time_basis, BasisFamily};
use mvpde::young::{counterexample_field, lift_dirac, BumpSpec, YoungField};
use mvpde::Real;

use crate::config::{ConfigError, RunConfig};

/// Command failure: configuration errors exit with 2, numerical failures
/// with 1.
#[derive(Debug)]
pub enum CmdError {
    Config(ConfigError),
    Numerical { tag: String, detail: String },
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Config(_) => 2,
            CmdError::Numerical { .. } => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CmdError::Config(e) => json!({"error": e.tag, "detail": e.detail}),
            CmdError::Numerical { tag, detail } => json!({"error": tag, "detail": detail}),
        }
    }
}

impl From<ConfigError> for CmdError {
    fn from(e: ConfigError) -> Self {
        CmdError::Config(e)
    }
}

fn numerical(err: impl std::fmt::Display) -> CmdError {
    let msg = err.to_string();
    let tag = msg.split(':').next().unwrap_or("numerical-failure").to_string();
    CmdError::Numerical { tag, detail: msg }
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CmdError> {
    fs::create_dir_all(dir).map_err(numerical)?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(numerical)?;
    Ok(path)
}

fn solve_options(config: &RunConfig) -> Result<SolveOptions<Real>, CmdError> {
    Ok(SolveOptions {
        scheme: config.scheme()?,
        newton_tol: config.tolerances.newton_tol,
        newton_max_iter: defaults::NEWTON_MAX_ITER,
    })
}

fn run_solve(
    config: &RunConfig,
    grid: &SpaceTimeGrid<Real>,
) -> Result<(PdeProblem<Real>, FieldSolution<Real>), CmdError> {
    let problem = config.problem()?;
    let sol = pde_solve(&problem, grid, solve_options(config)?).map_err(numerical)?;
    Ok((problem, sol))
}

/// `solve`: write the solution CSV and its JSON header.
pub fn cmd_solve(config: &RunConfig, out: &Path) -> Result<(), CmdError> {
    let grid = SpaceTimeGrid::new(config.problem.horizon, config.grid.nt, config.grid.nx);
    let (_, sol) = run_solve(config, &grid)?;
    let hash = config.hash();
    write_artifact(out, "solution.csv", &io::solution_csv(&sol))?;
    write_artifact(out, "solution.json", &io::solution_header(&sol, &hash))?;
    println!("solve: grid {} scheme {} range_escape {}", grid.shape_label(), sol.scheme.tag(), sol.range_escape);
    Ok(())
}

fn basis_family(name: &str) -> Result<BasisFamily, CmdError> {
    match name {
        "sine" => Ok(BasisFamily::Sine),
        "poly-bump" => Ok(BasisFamily::PolyBump),
        other => Err(ConfigError::new("unknown-basis-family", other).into()),
    }
}

fn suite_field(
    config: &RunConfig,
    grid: &SpaceTimeGrid<Real>,
    sol: &FieldSolution<Real>,
) -> Result<YoungField<Real>, CmdError> {
    match config.suite.field.as_str() {
        "dirac" => Ok(lift_dirac(sol)),
        "counterexample" => Ok(counterexample_field(
            grid,
            BumpSpec::with_peak(config.suite.bump_peak, grid.horizon),
        )),
        other => Err(ConfigError::new("unknown-suite-field", other).into()),
    }
}

/// `verify`: run every residual suite on the configured field, write one
/// JSON report per family, and print a pass/fail summary line per family.
pub fn cmd_verify(config: &RunConfig, out: &Path) -> Result<(), CmdError> {
    let grid = SpaceTimeGrid::new(config.problem.horizon, config.grid.nt, config.grid.nx);
    let (problem, sol) = run_solve(config, &grid)?;
    let field = suite_field(config, &grid, &sol)?;
    let tol = config.tolerances.residual_coeff * grid.h2();

    let tb = time_basis::<Real>(
        basis_family(&config.suite.time_family)?,
        config.suite.time_basis,
        grid.horizon,
    );
    let sb = space_basis::<Real>(basis_family(&config.suite.space_family)?, config.suite.space_basis);
    let st = state_basis::<Real>(config.suite.state_max_degree);

    let mut reports: Vec<ResidualReport<Real>> = Vec::new();
    reports.extend(mv_residual_suite(&field, &problem, &tb, &sb));
    reports.extend(emv_residual_suite(&field, &problem, &tb, &sb));
    reports.extend(ibp_residual_suite(&field, &st, &tb, &sb));
    let lift = lift_occupation(&field, &sol).map_err(numerical)?;
    reports.extend(occupation_identity_suite(&lift, &problem, config.suite.occupation_degree, &tb));

    let hash = config.hash();
    let mut summary = Vec::new();
    for report in &reports {
        let name = report.family.tag();
        let pass = report.passes(tol);
        println!("verify: {name:<26} {}  max {:.3e}  tol {:.3e}", if pass { "PASS" } else { "FAIL" }, report.max_abs, tol);
        let mut value = report.to_json(tol);
        value["config_hash"] = json!(hash);
        write_artifact(out, &format!("verify_{name}.json"), &serde_json::to_string_pretty(&value).unwrap())?;
        summary.push(json!({"family": name, "pass": pass, "max": report.max_abs}));
    }

    // concentration certificate against the solved reference
    let g_src = BumpSpec::with_peak(1.0, grid.horizon).polynomial(grid.horizon);
    let cert = dual_heat_certificate(&field, &sol, &problem, &g_src).map_err(numerical)?;
    let pass = cert.integral <= tol;
    println!(
        "verify: {:<26} {}  value {:.3e}  tol {:.3e}  min_phi_g {:.3e}",
        "certificate",
        if pass { "PASS" } else { "FAIL" },
        cert.integral,
        tol,
        cert.min_phi_g
    );
    let cert_json = json!({
        "family": "certificate",
        "config_hash": hash,
        "value": cert.integral,
        "tolerance": tol,
        "pass": pass,
        "min_phi_g": cert.min_phi_g,
        "grid": grid.shape_label(),
    });
    write_artifact(out, "verify_certificate.json", &serde_json::to_string_pretty(&cert_json).unwrap())?;
    summary.push(json!({"family": "certificate", "pass": pass, "max": cert.integral}));

    let summary_json = json!({"config_hash": hash, "tolerance": tol, "families": summary});
    write_artifact(out, "verify_summary.json", &serde_json::to_string_pretty(&summary_json).unwrap())?;

    // the verified measure field and its boundary components
    write_artifact(out, "field.csv", &io::young_field_csv(&field))?;
    let field_header = json!({
        "grid": grid.shape_label(),
        "kind": config.suite.field,
        "config_hash": hash,
    });
    write_artifact(out, "field.json", &serde_json::to_string_pretty(&field_header).unwrap())?;
    let (q1, q2, q3) = io::boundary_csvs(&lift);
    write_artifact(out, "boundary_initial.csv", &q1)?;
    write_artifact(out, "boundary_terminal.csv", &q2)?;
    write_artifact(out, "boundary_lateral.csv", &q3)?;
    Ok(())
}

/// `relax`: bounds over the configured objectives and degrees.
pub fn cmd_relax(config: &RunConfig, out: &Path) -> Result<(), CmdError> {
    let grid = SpaceTimeGrid::new(config.problem.horizon, config.grid.nt, config.grid.nx);
    let (problem, _) = run_solve(config, &grid)?;
    let fine = grid.refined(config.relax.reference_refine.max(1));
    let reference = pde_solve(&problem, &fine, solve_options(config)?).map_err(numerical)?;

    let objective = config.objective_poly()?;
    let opts = AssembleOptions {
        rescale: config.relax.rescale,
        first_order_only: config.relax.first_order_only,
    };
    let solver_opts = SolverOptions {
        tol: config.relax.solver_tol,
        max_iters: config.relax.max_iters,
        ..SolverOptions::default()
    };
    let rows = bounds_report(
        &problem,
        &[("objective".to_string(), objective.clone())],
        &config.relax.degrees,
        &reference,
        opts,
        solver_opts,
    )
    .map_err(numerical)?;
    for row in &rows {
        println!(
            "relax: d={} bounds [{:.6}, {:.6}] gap {:.3e} reference {:.6} ({}, {})",
            row.degree,
            row.lower,
            row.upper,
            row.gap,
            row.reference,
            row.lower_status.tag(),
            row.upper_status.tag()
        );
    }
    let mut csv = io::bounds_csv(&rows);
    csv.push_str(&format!("# config_hash={}\n", config.hash()));
    write_artifact(out, "bounds.csv", &csv)?;

    if config.relax.export_sdpa {
        for &d in &config.relax.degrees {
            for sense in [Sense::Min, Sense::Max] {
                let rp = assemble(&problem, d, objective.clone(), sense, opts).map_err(numerical)?;
                write_artifact(
                    out,
                    &format!("relax_d{}_{}.dat-s", d, sense.tag()),
                    &to_sdpa_sparse(&rp),
                )?;
            }
        }
    }
    Ok(())
}

/// `convergence-study`: solve and measure residuals on three nested grids,
/// fit the observed order, and hold it to the configured window.
pub fn cmd_convergence_study(config: &RunConfig, out: &Path) -> Result<(), CmdError> {
    let problem = config.problem()?;
    let base = SpaceTimeGrid::new(config.problem.horizon, config.grid.nt, config.grid.nx);
    let grids = [base.clone(), base.refined(2), base.refined(4)];
    let tb = time_basis::<Real>(
        basis_family(&config.suite.time_family)?,
        config.suite.time_basis,
        base.horizon,
    );
    let sb = space_basis::<Real>(basis_family(&config.suite.space_family)?, config.suite.space_basis);

    let mut worst: Vec<Real> = Vec::new();
    let mut h2s: Vec<Real> = Vec::new();
    for grid in &grids {
        let sol = pde_solve(&problem, grid, solve_options(config)?).map_err(numerical)?;
        let field = lift_dirac(&sol);
        let mut max = 0.0_f64;
        for report in mv_residual_suite(&field, &problem, &tb, &sb) {
            max = max.max(report.max_abs);
        }
        for report in emv_residual_suite(&field, &problem, &tb, &sb) {
            max = max.max(report.max_abs);
        }
        worst.push(max);
        h2s.push(grid.h2());
    }

    let mut csv = String::from("grid,nt,nx,h2,worst_residual,observed_order\n");
    let mut orders = Vec::new();
    for (k, grid) in grids.iter().enumerate() {
        let order = if k == 0 || worst[k] == 0.0 || worst[k - 1] == 0.0 {
            None
        } else {
            Some((worst[k - 1] / worst[k]).log2())
        };
        if let Some(o) = order {
            orders.push(o);
        }
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            grid.shape_label(),
            grid.nt,
            grid.nx,
            h2s[k],
            worst[k],
            order.map(|o| o.to_string()).unwrap_or_else(|| "exact".into())
        ));
    }
    csv.push_str(&format!("# config_hash={}\n", config.hash()));
    write_artifact(out, "convergence.csv", &csv)?;

    if worst.iter().all(|&w| w == 0.0) {
        println!("convergence-study: residuals identically zero (exact)");
        return Ok(());
    }
    let [lo, hi] = config.tolerances.order_window;
    for &o in &orders {
        println!("convergence-study: observed order {o:.3} (window [{lo}, {hi}])");
        if o < lo || o > hi {
            return Err(CmdError::Numerical {
                tag: "order-out-of-window".into(),
                detail: format!("observed order {o:.3} outside [{lo}, {hi}]"),
            });
        }
    }
    Ok(())
}
