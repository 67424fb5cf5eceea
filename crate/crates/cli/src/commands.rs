use coulombium::background::load_background;
use coulombium::diagnostics::{moment, tail_mass};
use coulombium::energy::{boundary_flux, effective_potential, total_energy};
use coulombium::solver::{gradient_solve, scf_solve, Trace};
use coulombium::verify::{run_suite, Suite, SuiteReport, VerifyOptions};
use coulombium::{BackgroundCharge, CoreError, GroundState, SolverConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, Method, RunConfig};
use crate::error::CliError;
use crate::output::{extension, write_csv, write_json};

fn methods(method: Method) -> &'static [Method] {
    match method {
        Method::Scf => &[Method::Scf],
        Method::Gd => &[Method::Gd],
        Method::Both => &[Method::Scf, Method::Gd],
    }
}

fn run_method(method: Method, bg: &BackgroundCharge, cfg: &SolverConfig) -> coulombium::Result<GroundState> {
    match method {
        Method::Scf | Method::Both => scf_solve(bg, cfg, None),
        Method::Gd => gradient_solve(bg, cfg, None),
    }
}

fn subcritical_guard(z: f64, cfg: &RunConfig) -> Result<(), CliError> {
    if z < 1.0 && !cfg.background.allow_subcritical {
        return Err(CliError::Usage(format!(
            "charge ratio z = {z} is subcritical (z < 1): the energy is unbounded below and no ground state exists; \
             pass --allow-subcritical to run anyway"
        )));
    }
    Ok(())
}

fn background(cfg: &RunConfig, solver: &SolverConfig) -> Result<BackgroundCharge, CliError> {
    match &cfg.background.file {
        Some(path) => Ok(load_background(path, &solver.grid()?)?),
        None => Ok(BackgroundCharge::point(cfg.background.z)?),
    }
}

/// Thread pool capped by `COULOMBIUM_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("COULOMBIUM_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("COULOMBIUM_THREADS must be a positive integer, got '{raw}'")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))
}

#[derive(Serialize)]
struct StateRow {
    x: f64,
    u: f64,
    u2: f64,
    #[serde(rename = "V")]
    v: f64,
}

#[derive(Serialize)]
struct TraceRow {
    iteration: usize,
    energy: f64,
    residual: f64,
}

#[derive(Serialize)]
struct SummaryRow {
    method: &'static str,
    z: f64,
    #[serde(rename = "E")]
    energy: f64,
    kinetic: f64,
    coulomb: f64,
    background_const: f64,
    epsilon: f64,
    residual: f64,
    iterations: usize,
    converged: bool,
    moment1: f64,
    tail_mass: f64,
    boundary_flux: f64,
    warnings: String,
}

#[derive(Serialize)]
struct SolveResult {
    summary: SummaryRow,
    state: Vec<StateRow>,
    trace: Vec<TraceRow>,
}

fn trace_rows(trace: &Trace) -> Vec<TraceRow> {
    trace
        .iter()
        .enumerate()
        .map(|(iteration, t)| TraceRow {
            iteration,
            energy: t.energy,
            residual: t.residual,
        })
        .collect()
}

fn solve_result(method: Method, state: &GroundState, bg: &BackgroundCharge, cfg: &RunConfig) -> Result<SolveResult, CliError> {
    let energy = total_energy(&state.u, bg, cfg.background.include_self_energy)?;
    let v = effective_potential(&state.u, bg)?;
    let grid = state.u.grid();
    let density = state.u.density();
    let rows = (0..grid.len())
        .map(|i| StateRow {
            x: grid.node(i),
            u: state.u.values()[i],
            u2: density.values()[i],
            v: v.values()[i],
        })
        .collect();
    Ok(SolveResult {
        summary: SummaryRow {
            method: method.name(),
            z: bg.charge_ratio(),
            energy: energy.total,
            kinetic: energy.kinetic,
            coulomb: energy.coulomb,
            background_const: energy.background_const,
            epsilon: state.epsilon,
            residual: state.residual,
            iterations: state.iterations,
            converged: state.converged,
            moment1: moment(&density, 1.0),
            tail_mass: tail_mass(&density, 0.8 * grid.half_width()),
            boundary_flux: boundary_flux(&state.u, bg)?,
            warnings: state.warnings.join("; "),
        },
        state: rows,
        trace: trace_rows(&state.history),
    })
}

pub fn solve(cfg: &RunConfig) -> Result<(), CliError> {
    let solver = cfg.solver_config();
    solver.validate()?;
    let bg = background(cfg, &solver)?;
    subcritical_guard(bg.charge_ratio(), cfg)?;

    let mut results = Vec::new();
    for &method in methods(cfg.solver.method) {
        match run_method(method, &bg, &solver) {
            Ok(state) => {
                for w in &state.warnings {
                    eprintln!("warning ({}): {w}", method.name());
                }
                results.push(solve_result(method, &state, &bg, cfg)?);
            }
            Err(CoreError::MaxIterExceeded { trace }) => {
                let name = format!("trace_{}.{}", method.name(), extension(cfg.output.format));
                let rows = trace_rows(&trace);
                match cfg.output.format {
                    Format::Csv => write_csv(cfg, "trace", &name, &rows)?,
                    Format::Json => write_json(cfg, "trace", &name, &rows)?,
                };
                return Err(CliError::NotConverged(format!(
                    "{}: no convergence after {} iterations (trace written to {name})",
                    method.name(),
                    trace.len()
                )));
            }
            Err(e) => return Err(e.into()),
        }
    }

    match cfg.output.format {
        Format::Csv => {
            let summaries: Vec<&SummaryRow> = results.iter().map(|r| &r.summary).collect();
            write_csv(cfg, "summary", "summary.csv", &summaries)?;
            for r in &results {
                write_csv(cfg, "state", &format!("state_{}.csv", r.summary.method), &r.state)?;
                write_csv(cfg, "trace", &format!("trace_{}.csv", r.summary.method), &r.trace)?;
            }
        }
        Format::Json => {
            write_json(cfg, "solve", "solve.json", &results)?;
        }
    }
    for r in &results {
        let s = &r.summary;
        println!(
            "{}: E = {:.12} epsilon = {:.12} residual = {:.3e} iterations = {}",
            s.method, s.energy, s.epsilon, s.residual, s.iterations
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanRow {
    z: f64,
    #[serde(rename = "E")]
    energy: Option<f64>,
    epsilon: Option<f64>,
    kinetic: Option<f64>,
    coulomb: Option<f64>,
    moment1: Option<f64>,
    iterations: usize,
    status: String,
    method: &'static str,
}

/// Seed for one scan row, a function of the run seed and `z` only so that
/// repeated `z` values reproduce the same row.
fn row_seed(seed: u64, z: f64) -> u64 {
    let mut x = seed ^ z.to_bits().rotate_left(17) ^ 0x9e37_79b9_7f4a_7c15;
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn scan_row(z: f64, method: Method, base: &SolverConfig) -> ScanRow {
    let cfg = SolverConfig {
        seed: row_seed(base.seed, z),
        ..*base
    };
    let failed = |iterations: usize, status: String| ScanRow {
        z,
        energy: None,
        epsilon: None,
        kinetic: None,
        coulomb: None,
        moment1: None,
        iterations,
        status,
        method: method.name(),
    };
    let bg = match BackgroundCharge::point(z) {
        Ok(bg) => bg,
        Err(e) => return failed(0, format!("error: {e}")),
    };
    match run_method(method, &bg, &cfg) {
        Ok(s) => ScanRow {
            z,
            energy: Some(s.energy.total),
            epsilon: Some(s.epsilon),
            kinetic: Some(s.energy.kinetic),
            coulomb: Some(s.energy.coulomb),
            moment1: Some(moment(&s.u.density(), 1.0)),
            iterations: s.iterations,
            status: "converged".into(),
            method: method.name(),
        },
        Err(CoreError::MaxIterExceeded { trace }) => failed(trace.len(), "max_iter".into()),
        Err(CoreError::LineSearchStalled { iterations, .. }) => failed(iterations, "line_search_stalled".into()),
        Err(CoreError::DivergingEnergy { .. }) => failed(0, "diverging".into()),
        Err(e) => failed(0, format!("error: {e}")),
    }
}

pub fn scan(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.background.file.is_some() {
        return Err(CliError::Usage("scan sweeps point charges; remove the background file".into()));
    }
    if cfg.scan.z.is_empty() {
        return Err(CliError::Usage("scan needs at least one z value (--z-list or [scan] z)".into()));
    }
    for &z in &cfg.scan.z {
        subcritical_guard(z, cfg)?;
    }
    let solver = cfg.solver_config();
    solver.validate()?;
    let tasks: Vec<(f64, Method)> = cfg
        .scan
        .z
        .iter()
        .flat_map(|&z| methods(cfg.solver.method).iter().map(move |&m| (z, m)))
        .collect();
    let rows: Vec<ScanRow> = thread_pool()?.install(|| tasks.par_iter().map(|&(z, m)| scan_row(z, m, &solver)).collect());

    match cfg.output.format {
        Format::Csv => write_csv(cfg, "scan", "scan.csv", &rows)?,
        Format::Json => write_json(cfg, "scan", "scan.json", &rows)?,
    };
    for r in &rows {
        match r.energy {
            Some(e) => println!("z = {} ({}): E = {e:.12} [{}]", r.z, r.method, r.status),
            None => println!("z = {} ({}): [{}]", r.z, r.method, r.status),
        }
    }
    let failures = rows.iter().filter(|r| r.status != "converged").count();
    if failures > 0 {
        return Err(CliError::NotConverged(format!("{failures} of {} scan rows did not converge", rows.len())));
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckRow<'a> {
    suite: &'a str,
    check: &'a str,
    measured: f64,
    relation: String,
    threshold: f64,
    passed: bool,
}

pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let name = cfg
        .verify
        .suite
        .as_deref()
        .ok_or_else(|| CliError::Usage("verify needs a suite name".into()))?;
    let suites: Vec<Suite> = if name == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![name.parse::<Suite>().map_err(|_| {
            let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            CliError::Usage(format!("unknown suite '{name}' (expected one of {} or all)", known.join(", ")))
        })?]
    };
    let opts = VerifyOptions {
        seed: cfg.solver.seed,
        z: cfg.verify.z,
    };
    let reports: Vec<SuiteReport> = thread_pool()?.install(|| {
        suites
            .par_iter()
            .map(|&s| run_suite(s, &opts))
            .collect::<coulombium::Result<Vec<_>>>()
    })?;

    match cfg.output.format {
        Format::Csv => {
            let rows: Vec<CheckRow> = reports
                .iter()
                .flat_map(|r| {
                    r.checks.iter().map(move |c| CheckRow {
                        suite: r.suite.name(),
                        check: &c.name,
                        measured: c.measured,
                        relation: c.relation.to_string(),
                        threshold: c.threshold,
                        passed: c.passed,
                    })
                })
                .collect();
            write_csv(cfg, "verify", "verify.csv", &rows)?;
        }
        Format::Json => {
            write_json(cfg, "verify", "verify.json", &reports)?;
        }
    }
    let mut failed = 0;
    for r in &reports {
        for c in &r.checks {
            println!(
                "{} {}: {} = {:e} (required {} {:e})",
                if c.passed { "PASS" } else { "FAIL" },
                r.suite,
                c.name,
                c.measured,
                c.relation,
                c.threshold
            );
            failed += usize::from(!c.passed);
        }
    }
    if failed > 0 {
        return Err(CliError::ChecksFailed(format!("{failed} check(s) failed")));
    }
    Ok(())
}
