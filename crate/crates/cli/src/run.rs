//! Command execution. Every run writes into its own directory: the config
//! echo, command-specific tables, `summary.json`, and `timing.json` (the only
//! file that differs between identical runs).

use std::path::{Path, PathBuf};
use std::time::Instant;

use chlab::dynamics::{detect_breaking, max_relative_drift, simulate_until, CHParams, Termination};
use chlab::peakon::{peakon_field, simulate_peakons_recorded, PeakonState};
use chlab::Grid1D;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::checks::{self, FORMULA_TOLERANCES, INVARIANCE_TOLERANCE};
use crate::config::{Command, RunConfig};
use crate::error::{CliError, Outcome, Result};
use crate::output::{diagnostics_csv, table_csv, trajectory_csv, RunDir};

pub const DEFAULT_OUTPUT: &str = "chlab-output";

/// Command-line settings that are not part of the configuration file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: u64,
    pub fail_on_breaking: bool,
    /// Print progress and tables to stdout.
    pub verbose: bool,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub outcome: Outcome,
    pub dir: PathBuf,
    pub summary: Value,
}

/// Run a validated configuration.
pub fn run(config: &RunConfig, options: &RunOptions) -> Result<RunReport> {
    let root = options
        .out
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    match config.command {
        Command::Sweep => run_sweep(config, &root, options),
        _ => run_single(config, &root, options),
    }
}

fn run_single(config: &RunConfig, root: &Path, options: &RunOptions) -> Result<RunReport> {
    let started = Instant::now();
    let dir = RunDir::create(root)?;
    dir.write_json("config.json", config)?;
    let (outcome, summary) = match config.command {
        Command::Simulate => simulate(config, &dir, options)?,
        Command::Peakon => peakon(config, &dir)?,
        Command::Scale => scale(config, &dir, options)?,
        Command::VerifyLinear => verify_linear(config, &dir, options)?,
        Command::VerifyVariational => verify_variational(config, &dir, options)?,
        Command::Sweep => unreachable!("sweeps are dispatched separately"),
    };
    dir.write_json("summary.json", &summary)?;
    dir.write_json("timing.json", &json!({ "wall_clock_seconds": started.elapsed().as_secs_f64() }))?;
    Ok(RunReport {
        outcome,
        dir: dir.path().to_path_buf(),
        summary,
    })
}

pub fn equation_params(config: &RunConfig, grid: Grid1D) -> Result<CHParams> {
    let params = match &config.coefficient {
        Some(f) => f.params(&grid)?,
        None => CHParams::classic(grid, config.kappa.unwrap_or(0.0)),
    };
    Ok(params.with_dealias(config.dealias))
}

fn simulate(config: &RunConfig, dir: &RunDir, options: &RunOptions) -> Result<(Outcome, Value)> {
    let grid = Grid1D::new(config.grid.length, config.grid.n)?;
    let params = equation_params(config, grid)?;
    let initial = config
        .initial
        .as_ref()
        .ok_or_else(|| CliError::validation("simulate needs an `initial` condition"))?;
    let u0 = initial.sample(&grid)?;
    let stop = options.fail_on_breaking.then_some(config.breaking_threshold);
    let sim = simulate_until(&u0, &params, config.dt, config.t_final, config.record_every, stop)?;

    dir.write_text("trajectory.csv", &trajectory_csv(&sim.trajectory))?;
    dir.write_text("diagnostics.csv", &diagnostics_csv(&sim.diagnostics))?;

    let breaking_time = detect_breaking(&sim.diagnostics, config.breaking_threshold);
    let outcome = match (&sim.termination, breaking_time) {
        (Termination::BlowUp { .. }, _) => Outcome::BlowUp,
        (_, Some(_)) if options.fail_on_breaking => Outcome::BlowUp,
        _ => Outcome::Success,
    };
    let drift = |f: fn(&chlab::dynamics::DiagnosticRecord) -> Option<f64>| max_relative_drift(&sim.diagnostics, f);
    let summary = json!({
        "command": "simulate",
        "n": config.grid.n,
        "L": config.grid.length,
        "dt": config.dt,
        "T": config.t_final,
        "generalized": !params.is_classic(),
        "records": sim.diagnostics.len(),
        "final_time": sim.last().time,
        "termination": sim.termination,
        "max_relative_drift": {
            "M0": drift(|r| Some(r.m0)),
            "E": drift(|r| Some(r.energy)),
            "H3": drift(|r| r.h3),
        },
        "breaking_threshold": config.breaking_threshold,
        "breaking_time": breaking_time,
        "stability_warnings": sim.warnings.len(),
        "exit_code": outcome.code(),
    });
    if options.verbose {
        println!(
            "simulate: {} records to t = {}, breaking time {:?}",
            sim.diagnostics.len(),
            sim.last().time,
            breaking_time
        );
    }
    Ok((outcome, summary))
}

fn peakon(config: &RunConfig, dir: &RunDir) -> Result<(Outcome, Value)> {
    let pc = config
        .peakons
        .as_ref()
        .ok_or_else(|| CliError::validation("peakon needs a `peakons` section"))?;
    let s0 = PeakonState::new(pc.positions.clone(), pc.momenta.clone(), 0.0, pc.domain)?;
    let run = simulate_peakons_recorded(&s0, config.dt, config.t_final, config.record_every)?;

    let rows: Vec<Vec<String>> = run
        .trajectory
        .iter()
        .flat_map(|s| {
            (0..s.len()).map(move |i| vec![s.t.to_string(), i.to_string(), s.q[i].to_string(), s.p[i].to_string()])
        })
        .collect();
    dir.write_text("peakons.csv", &table_csv(&["t", "index", "q", "p"], &rows))?;
    let h: Vec<Vec<String>> = run
        .hamiltonian
        .iter()
        .map(|(t, h)| vec![t.to_string(), h.to_string()])
        .collect();
    dir.write_text("hamiltonian.csv", &table_csv(&["t", "H"], &h))?;
    let grid = Grid1D::new(config.grid.length, config.grid.n)?;
    let fields = run
        .trajectory
        .iter()
        .map(|s| peakon_field(s, &grid))
        .collect::<chlab::Result<Vec<_>>>()?;
    dir.write_text("trajectory.csv", &trajectory_csv(&fields))?;

    let outcome = if run.collision.is_some() {
        Outcome::BlowUp
    } else {
        Outcome::Success
    };
    let end = run.last();
    let summary = json!({
        "command": "peakon",
        "domain": pc.domain,
        "dt": config.dt,
        "T": config.t_final,
        "records": run.trajectory.len(),
        "final_time": end.t,
        "final_positions": end.q,
        "final_momenta": end.p,
        "max_relative_drift": { "H": run.max_relative_energy_drift() },
        "collision": run.collision.as_ref().map(|c| json!({
            "i": c.i, "j": c.j, "distance": c.distance, "time": c.time
        })),
        "exit_code": outcome.code(),
    });
    Ok((outcome, summary))
}

fn scale(config: &RunConfig, dir: &RunDir, options: &RunOptions) -> Result<(Outcome, Value)> {
    let physical = config
        .physical
        .ok_or_else(|| CliError::validation("scale needs a `physical` section"))?;
    let report = checks::scale_report(&physical)?;
    dir.write_json("scale.json", &report)?;
    let outcome = if report.round_trip_passed {
        Outcome::Success
    } else {
        Outcome::VerificationFailed
    };
    if options.verbose {
        println!(
            "eps = {}, delta = {}, kappa (irrotational) = {}, kappa (shear) = {}",
            report.eps, report.delta, report.kappa_irrotational, report.kappa_shear
        );
    }
    let summary = json!({
        "command": "scale",
        "kappa_irrotational": report.kappa_irrotational,
        "kappa_shear": report.kappa_shear,
        "round_trip_error": report.round_trip_error,
        "exit_code": outcome.code(),
    });
    Ok((outcome, summary))
}

fn verify_linear(config: &RunConfig, dir: &RunDir, options: &RunOptions) -> Result<(Outcome, Value)> {
    let linear = config.linear.clone().unwrap_or_default();
    let rows = checks::linear_suite(&linear, &config.physical_or_default())?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let x = &r.residuals;
            vec![
                r.case.clone(),
                x.momentum.to_string(),
                x.hydrostatic.to_string(),
                x.mass.to_string(),
                x.surface_kinematic.to_string(),
                x.surface_pressure.to_string(),
                x.bed.to_string(),
                x.wave_equation.to_string(),
                r.max.to_string(),
                r.passed.to_string(),
            ]
        })
        .collect();
    let header = [
        "case",
        "momentum",
        "hydrostatic",
        "mass",
        "surface_kinematic",
        "surface_pressure",
        "bed",
        "wave_equation",
        "max",
        "passed",
    ];
    dir.write_text("linear.csv", &table_csv(&header, &table))?;
    let passed = rows.iter().all(|r| r.passed);
    if options.verbose {
        for r in &rows {
            println!("{:<13} max residual {:.3e}  {}", r.case, r.max, if r.passed { "ok" } else { "FAILED" });
        }
    }
    let outcome = if passed {
        Outcome::Success
    } else {
        Outcome::VerificationFailed
    };
    Ok((
        outcome,
        json!({ "command": "verify-linear", "cases": rows, "passed": passed, "exit_code": outcome.code() }),
    ))
}

fn verify_variational(config: &RunConfig, dir: &RunDir, options: &RunOptions) -> Result<(Outcome, Value)> {
    let v = config.variational.clone().unwrap_or_default();
    let physical = config.physical_or_default();
    let mut rows = Vec::new();
    for offset in &v.offsets {
        rows.extend(checks::identity_table(v.n, &v.steps, &offset.label(), |g| {
            checks::action_offset(g, offset, &physical)
        })?);
    }
    let row_ok = |r: &checks::IdentityRow| {
        r.report.passed && r.report.gap <= v.max_gap && r.order.is_none_or(|o| o >= v.min_order)
    };
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.offset.clone(),
                r.steps.to_string(),
                r.report.lhs.to_string(),
                r.report.rhs.to_string(),
                r.report.gap.to_string(),
                r.report.estimate.to_string(),
                r.order.map(|o| o.to_string()).unwrap_or_default(),
                row_ok(r).to_string(),
            ]
        })
        .collect();
    dir.write_text(
        "identity.csv",
        &table_csv(&["offset", "steps", "lhs", "rhs", "gap", "estimate", "order", "passed"], &table),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let formulas = checks::formula_oracles(v.oracle_n, v.formula_pairs, &mut rng)?;
    let invariance = checks::right_invariance(v.oracle_n, v.relabelings, &chlab::variational::ActionOffset::Constant(0.5), &mut rng)?;
    let formulas_ok = formulas.iter().zip(FORMULA_TOLERANCES).all(|(e, t)| *e <= t);
    let invariance_ok = invariance <= INVARIANCE_TOLERANCE;
    let identity_ok = rows.iter().all(row_ok);

    if options.verbose {
        println!("{:<20} {:>6} {:>12} {:>12} {:>8}", "offset", "steps", "gap", "estimate", "order");
        for r in &rows {
            println!(
                "{:<20} {:>6} {:>12.3e} {:>12.3e} {:>8}",
                r.offset,
                r.steps,
                r.report.gap,
                r.report.estimate,
                r.order.map(|o| format!("{o:.2}")).unwrap_or_else(|| "-".into())
            );
        }
        println!(
            "formula oracles {:.2e} {:.2e} {:.2e}, right invariance {invariance:.2e}",
            formulas[0], formulas[1], formulas[2]
        );
    }
    let passed = identity_ok && formulas_ok && invariance_ok;
    let outcome = if passed {
        Outcome::Success
    } else {
        Outcome::VerificationFailed
    };
    let summary = json!({
        "command": "verify-variational",
        "seed": options.seed,
        "identity": rows,
        "identity_passed": identity_ok,
        "formula_errors": { "inverse": formulas[0], "velocity": formulas[1], "gradient": formulas[2] },
        "formula_tolerances": FORMULA_TOLERANCES,
        "formulas_passed": formulas_ok,
        "right_invariance_error": invariance,
        "right_invariance_passed": invariance_ok,
        "passed": passed,
        "exit_code": outcome.code(),
    });
    Ok((outcome, summary))
}

fn run_sweep(config: &RunConfig, root: &Path, options: &RunOptions) -> Result<RunReport> {
    let started = Instant::now();
    let children = config.expand_sweep()?;
    let dir = RunDir::create(root)?;
    dir.write_json("config.json", config)?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = options.workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Pool(e.to_string()))?;
    let child_options = RunOptions {
        out: None,
        verbose: false,
        ..options.clone()
    };
    let results: Vec<(Outcome, Value)> = pool.install(|| {
        children
            .par_iter()
            .enumerate()
            .map(|(index, (assignment, child))| {
                let name = format!("run-{index:03}");
                let result = run_single(child, &dir.file(&name), &child_options);
                let (outcome, error) = match &result {
                    Ok(report) => (report.outcome, None),
                    Err(e) => (Outcome::of_error(e), Some(e.to_string())),
                };
                let assignment: serde_json::Map<String, Value> = assignment.iter().cloned().collect();
                let entry = json!({
                    "index": index,
                    "dir": name,
                    "parameters": assignment,
                    "exit_code": outcome.code(),
                    "error": error,
                });
                (outcome, entry)
            })
            .collect()
    });

    let outcome = results.iter().map(|(o, _)| *o).max().unwrap_or(Outcome::Success);
    let failures: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, (o, _))| *o != Outcome::Success)
        .map(|(i, _)| i)
        .collect();
    if options.verbose {
        println!("sweep: {} children, {} failed", results.len(), failures.len());
    }
    let summary = json!({
        "command": "sweep",
        "children": results.into_iter().map(|(_, v)| v).collect::<Vec<_>>(),
        "failures": failures,
        "exit_code": outcome.code(),
    });
    dir.write_json("summary.json", &summary)?;
    dir.write_json("timing.json", &json!({ "wall_clock_seconds": started.elapsed().as_secs_f64() }))?;
    Ok(RunReport {
        outcome,
        dir: dir.path().to_path_buf(),
        summary,
    })
}
