//! Minimizers of `E` over the unit sphere of the discrete L² norm.
//!
//! Both solvers drive the same stationarity condition `-u'' + 2V u = ε u`
//! (see [`crate::energy`]) and stop on the same rules: an energy change of
//! at most `tol_energy` between accepted iterates and an Euler–Lagrange
//! residual of at most `tol_residual`.

mod eigen;
mod gradient;
mod scf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use eigen::ground_eigenpair;
pub(crate) use eigen::solve_tridiagonal;
pub use gradient::gradient_solve;
pub use scf::scf_solve;

use crate::background::{recenter_shift, BackgroundCharge};
use crate::diagnostics::tail_mass;
use crate::energy::EnergyBreakdown;
use crate::error::{CoreError, Result};
use crate::grid::{Grid, Samples};
use crate::wave::WaveFn;

/// Tail mass beyond `0.8 L` above which a converged state is flagged as
/// truncation-sensitive.
pub const TAIL_WARN: f64 = 1e-10;
/// Mass beyond `L / 2` that marks a subcritical run as escaping to the walls.
pub const ESCAPE_MASS: f64 = 1e-3;
/// Relative slack allowed when comparing successive energies; below this
/// the comparison is roundoff (prefix sums over wide grids lose a few
/// digits).
pub(crate) const ENERGY_NOISE: f64 = 1e-12;

/// Absolute energy slack `ENERGY_NOISE * max(|e|, 1)`.
pub(crate) fn energy_slack(e: f64) -> f64 {
    ENERGY_NOISE * e.abs().max(1.0)
}
/// Lower bound for the adaptive SCF damping.
pub const MIN_DAMPING: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub half_width: f64,
    pub n_points: usize,
    pub scf_damping: f64,
    pub tol_energy: f64,
    pub tol_residual: f64,
    pub max_iter: usize,
    pub gd_step: f64,
    /// Precondition the projected gradient with `(-D₂ + w - min w + 1)^{-1}`.
    pub gd_precondition: bool,
    pub seed: u64,
    /// Start from a seeded random profile instead of the centered Gaussian.
    pub random_start: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            half_width: 30.0,
            n_points: 6001,
            scf_damping: 0.5,
            tol_energy: 1e-10,
            tol_residual: 1e-7,
            max_iter: 2000,
            gd_step: 1.0,
            gd_precondition: true,
            seed: 0,
            random_start: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CoreError::InvalidConfig(msg));
        if !(self.scf_damping > 0.0 && self.scf_damping <= 1.0) {
            return bad(format!("scf_damping must lie in (0, 1], got {}", self.scf_damping));
        }
        if !(self.tol_energy > 0.0) || !(self.tol_residual > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if !(self.gd_step > 0.0) {
            return bad(format!("gd_step must be positive, got {}", self.gd_step));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        self.grid().map(|_| ())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.half_width, self.n_points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub energy: f64,
    pub residual: f64,
}

pub type Trace = Vec<TracePoint>;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub u: WaveFn,
    pub epsilon: f64,
    pub energy: EnergyBreakdown,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Trace,
    pub warnings: Vec<String>,
}

/// Grid for a solve, checking a sampled background against the config.
pub(crate) fn solve_grid(bg: &BackgroundCharge, cfg: &SolverConfig) -> Result<Grid> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    if let Some(g) = bg.grid() {
        if *g != grid {
            return Err(CoreError::GridMismatch);
        }
    }
    Ok(grid)
}

/// Default starting point: a unit-width Gaussian centered on the charge
/// centroid, or a seeded random profile when requested.
pub fn initial_guess(bg: &BackgroundCharge, cfg: &SolverConfig) -> Result<WaveFn> {
    let grid = cfg.grid()?;
    if cfg.random_start {
        return random_profile(grid, cfg.seed);
    }
    let center = recenter_shift(bg).unwrap_or(0.0);
    WaveFn::gaussian(grid, center, 1.0)
}

/// Smooth, positive, generally asymmetric profile built from a few random
/// Gaussians inside `[-L/4, L/4]`.
pub fn random_profile(grid: Grid, seed: u64) -> Result<WaveFn> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = 0.25 * grid.half_width();
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(-reach..reach),
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.2..1.0),
            )
        })
        .collect();
    let mut u = Samples::from_fn(grid, |x| {
        bumps
            .iter()
            .map(|&(c, w, a)| a * (-0.5 * ((x - c) / w).powi(2)).exp())
            .sum()
    });
    let n = grid.len();
    u.values_mut()[0] = 0.0;
    u.values_mut()[n - 1] = 0.0;
    WaveFn::normalize(u)
}

pub(crate) fn check_start(u0: Option<WaveFn>, bg: &BackgroundCharge, cfg: &SolverConfig, grid: &Grid) -> Result<WaveFn> {
    match u0 {
        Some(u) if u.grid() != grid => Err(CoreError::GridMismatch),
        Some(u) => {
            // Dirichlet ends
            let mut s = u.into_samples();
            let n = s.len();
            s.values_mut()[0] = 0.0;
            s.values_mut()[n - 1] = 0.0;
            WaveFn::normalize(s)
        }
        None => initial_guess(bg, cfg),
    }
}

/// For subcritical charges, fails once more than [`ESCAPE_MASS`] has moved
/// beyond half the grid.
pub(crate) fn check_escape(u: &WaveFn, bg: &BackgroundCharge, energy: f64) -> Result<()> {
    let z = bg.charge_ratio();
    if z >= 1.0 {
        return Ok(());
    }
    let escaped = tail_mass(&u.density(), 0.5 * u.grid().half_width());
    if escaped > ESCAPE_MASS {
        return Err(CoreError::DivergingEnergy {
            z,
            energy,
            tail_mass: escaped,
        });
    }
    Ok(())
}

/// Post-convergence checks shared by both solvers: subcritical escape and
/// truncation sensitivity.
pub(crate) fn finish(mut state: GroundState, bg: &BackgroundCharge) -> Result<GroundState> {
    check_escape(&state.u, bg, state.energy.total)?;
    let grid = *state.u.grid();
    let tail = tail_mass(&state.u.density(), 0.8 * grid.half_width());
    if tail > TAIL_WARN {
        state.warnings.push(format!(
            "tail mass {tail:.3e} beyond |x| = {:.3}; consider a larger half-width",
            0.8 * grid.half_width()
        ));
    }
    Ok(state)
}

/// Stopping rule shared by both solvers; never satisfied on the first iterate.
pub(crate) fn is_converged(cfg: &SolverConfig, prev: Option<f64>, energy: f64, residual: f64) -> bool {
    match prev {
        Some(p) => (energy - p).abs() <= cfg.tol_energy && residual <= cfg.tol_residual,
        None => false,
    }
}
