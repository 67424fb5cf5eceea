//! Damped self-consistent field iteration with density mixing.

use super::{check_escape, check_start, finish, is_converged, solve_grid, GroundState, SolverConfig, TracePoint, energy_slack, MIN_DAMPING};
use crate::background::BackgroundCharge;
use crate::energy::{mean_field_potential, residual_with_potential, total_energy};
use crate::error::{CoreError, Result};
use crate::grid::Samples;
use crate::solver::ground_eigenpair;
use crate::wave::WaveFn;

/// `u = sqrt((1 - α) u² + α v²)`.
fn mix(u: &WaveFn, v: &WaveFn, alpha: f64) -> Result<WaveFn> {
    let values = u
        .values()
        .iter()
        .zip(v.values())
        .map(|(&a, &b)| ((1.0 - alpha) * a * a + alpha * b * b).max(0.0).sqrt())
        .collect();
    WaveFn::normalize(Samples::new(*u.grid(), values)?)
}

/// Alternates `V <- V[u]`, `(ε, v) <- ground eigenpair of -D₂ + 2V` and
/// `u² <- (1 - α) u² + α v²`. The damping is halved (down to
/// [`MIN_DAMPING`]) whenever a mixed iterate would raise the energy.
pub fn scf_solve(bg: &BackgroundCharge, cfg: &SolverConfig, u0: Option<WaveFn>) -> Result<GroundState> {
    let grid = solve_grid(bg, cfg)?;
    let mut u = check_start(u0, bg, cfg, &grid)?;
    let mut energy = total_energy(&u, bg, false)?;
    let mut prev: Option<f64> = None;
    let mut alpha = cfg.scf_damping;
    let mut history = Vec::new();

    for iter in 0..cfg.max_iter {
        check_escape(&u, bg, energy.total)?;
        let w = mean_field_potential(&u, bg)?;
        let (epsilon, v) = ground_eigenpair(&w)?;
        let residual = residual_with_potential(u.samples(), &w, epsilon);
        history.push(TracePoint {
            energy: energy.total,
            residual,
        });
        if is_converged(cfg, prev, energy.total, residual) {
            return finish(
                GroundState {
                    u,
                    epsilon,
                    energy,
                    residual,
                    iterations: iter,
                    converged: true,
                    history,
                    warnings: Vec::new(),
                },
                bg,
            );
        }

        let (next, next_energy) = loop {
            let candidate = mix(&u, &v, alpha)?;
            let e = total_energy(&candidate, bg, false)?;
            if e.total <= energy.total + energy_slack(energy.total) || alpha <= MIN_DAMPING {
                break (candidate, e);
            }
            alpha = (0.5 * alpha).max(MIN_DAMPING);
        };
        prev = Some(energy.total);
        u = next;
        energy = next_energy;
    }
    Err(CoreError::MaxIterExceeded { trace: history })
}
