//! Projected gradient descent on the unit sphere with Armijo backtracking.

use super::{check_escape, check_start, finish, is_converged, solve_grid, solve_tridiagonal, GroundState, SolverConfig, TracePoint, energy_slack};
use crate::background::BackgroundCharge;
use crate::energy::{apply_operator, mean_field_potential, total_energy, EnergyBreakdown};
use crate::error::{CoreError, Result};
use crate::grid::{Grid, Samples};
use crate::wave::WaveFn;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;
/// Shift `σ` of the `(-D₂ + w - min w + σ)` preconditioner.
const PRECONDITIONER_SHIFT: f64 = 1.0;

/// Interior inner product `h Σ a_i b_i`.
fn dot(grid: &Grid, a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    grid.spacing() * (1..n - 1).map(|i| a[i] * b[i]).sum::<f64>()
}

fn precondition(grid: &Grid, w: &[f64], r: &[f64]) -> Vec<f64> {
    let n = r.len();
    let h2 = grid.spacing().powi(2);
    let floor = w[1..n - 1].iter().cloned().fold(f64::INFINITY, f64::min);
    let diag: Vec<f64> = w[1..n - 1]
        .iter()
        .map(|wi| 2.0 / h2 + wi - floor + PRECONDITIONER_SHIFT)
        .collect();
    let inner = solve_tridiagonal(&diag, -1.0 / h2, 0.0, &r[1..n - 1]);
    let mut p = vec![0.0; n];
    p[1..n - 1].copy_from_slice(&inner);
    p
}

struct Point {
    u: WaveFn,
    energy: EnergyBreakdown,
}

/// Minimizes `E` on `∫u² = 1` by `u <- normalize(u - s p)`, where `p` is the
/// tangential part of the (optionally preconditioned) gradient
/// `2(-D₂u + 2V u)`. The multiplier reported at convergence is the Rayleigh
/// quotient `⟨u, (-D₂ + 2V) u⟩`.
pub fn gradient_solve(bg: &BackgroundCharge, cfg: &SolverConfig, u0: Option<WaveFn>) -> Result<GroundState> {
    let grid = solve_grid(bg, cfg)?;
    let u = check_start(u0, bg, cfg, &grid)?;
    let energy = total_energy(&u, bg, false)?;
    let mut current = Point { u, energy };
    let mut prev: Option<f64> = None;
    let mut history = Vec::new();

    for iter in 0..cfg.max_iter {
        check_escape(&current.u, bg, current.energy.total)?;
        let u = current.u.values();
        let w = mean_field_potential(&current.u, bg)?;
        let hu = apply_operator(current.u.samples(), &w);
        let epsilon = dot(&grid, u, hu.values());
        let r: Vec<f64> = hu.values().iter().zip(u).map(|(a, b)| a - epsilon * b).collect();
        let residual = dot(&grid, &r, &r).sqrt();
        history.push(TracePoint {
            energy: current.energy.total,
            residual,
        });
        if is_converged(cfg, prev, current.energy.total, residual) {
            return finish(
                GroundState {
                    u: current.u,
                    epsilon,
                    energy: current.energy,
                    residual,
                    iterations: iter,
                    converged: true,
                    history,
                    warnings: Vec::new(),
                },
                bg,
            );
        }

        let mut p = if cfg.gd_precondition {
            precondition(&grid, w.values(), &r)
        } else {
            r.clone()
        };
        let along = dot(&grid, u, &p);
        p.iter_mut().zip(u).for_each(|(pi, ui)| *pi -= along * ui);
        // dE/ds at s = 0 along normalize(u - s p) is -2⟨r, p⟩
        let slope = 2.0 * dot(&grid, &r, &p);
        if !(slope > 0.0) {
            // gradient vanished to roundoff
            prev = Some(current.energy.total);
            continue;
        }

        let mut s = cfg.gd_step;
        let next = loop {
            let trial: Vec<f64> = u.iter().zip(&p).map(|(a, b)| a - s * b).collect();
            let trial = WaveFn::normalize(Samples::new(grid, trial)?)?;
            let e = total_energy(&trial, bg, false)?;
            if e.total <= current.energy.total - ARMIJO * s * slope + energy_slack(current.energy.total) {
                break Point { u: trial, energy: e };
            }
            s *= 0.5;
            if s < MIN_STEP {
                return Err(CoreError::LineSearchStalled { step: s, iterations: iter });
            }
        };
        prev = Some(current.energy.total);
        current = next;
    }
    Err(CoreError::MaxIterExceeded { trace: history })
}
