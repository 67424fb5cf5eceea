//! The variational objective
//!
//! ```text
//! E[u] = ∫|u'|² + 1/2 ∬ -|x - y| (u² + ρ)(x) (u² + ρ)(y)
//! ```
//!
//! and its stationarity residual.
//!
//! `V = -1/2 ∫|x - y| (u² + ρ)` is the physical potential (`-V'' = u² + ρ`).
//! The Coulomb part of `E` is quadratic in `u² + ρ`, so the functional
//! derivative of `E` with respect to `u` is `2(-u'' + 2 V u)`: stationary
//! points on the unit sphere solve `-u'' + 2 V u = ε u`. The potential
//! entering that equation is [`mean_field_potential`].

use serde::Serialize;

use crate::background::{background_potential, BackgroundCharge};
use crate::error::{CoreError, Result};
use crate::grid::{integrate, kinetic_energy, second_difference, Grid, Samples};
use crate::kernel::{c_functional, coulomb_pair_energy, potential_from_density};
use crate::wave::WaveFn;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub coulomb: f64,
    /// `1/2 ∬ -|x - y| ρ ρ`; zero for point charges or when not requested.
    pub background_const: f64,
    pub total: f64,
}

fn check_background_grid(bg: &BackgroundCharge, grid: &Grid) -> Result<()> {
    match bg.grid() {
        Some(g) if g != grid => Err(CoreError::GridMismatch),
        _ => Ok(()),
    }
}

/// Full energy of a normalized state.
pub fn total_energy(
    u: &WaveFn,
    bg: &BackgroundCharge,
    include_background_self: bool,
) -> Result<EnergyBreakdown> {
    check_background_grid(bg, u.grid())?;
    let density = u.density();
    let kinetic = kinetic_energy(u.samples());
    let (coulomb, background_const) = match bg {
        BackgroundCharge::Point { z } => (c_functional(&density, *z).value, 0.0),
        BackgroundCharge::Sampled { rho } => {
            let v_rho = background_potential(bg, u.grid())?;
            let cross = 2.0 * integrate(&v_rho.mul(&density)?);
            let self_pair = 0.5 * coulomb_pair_energy(&density, &density)?;
            let constant = if include_background_self {
                0.5 * coulomb_pair_energy(rho, rho)?
            } else {
                0.0
            };
            (cross + self_pair, constant)
        }
    };
    Ok(EnergyBreakdown {
        kinetic,
        coulomb,
        background_const,
        total: kinetic + coulomb + background_const,
    })
}

/// Coulomb term through the potentials, `2∫V_ρ u² + 1/2 ∬ -|x-y| u² u²`,
/// valid for either background kind.
pub fn coulomb_via_potential(u: &WaveFn, bg: &BackgroundCharge) -> Result<f64> {
    check_background_grid(bg, u.grid())?;
    let density = u.density();
    let v_rho = background_potential(bg, u.grid())?;
    Ok(2.0 * integrate(&v_rho.mul(&density)?) + 0.5 * coulomb_pair_energy(&density, &density)?)
}

/// `V = -1/2 ∫|x - y| (u² + ρ)`.
pub fn effective_potential(u: &WaveFn, bg: &BackgroundCharge) -> Result<Samples> {
    effective_potential_of_density(&u.density(), bg)
}

pub(crate) fn effective_potential_of_density(density: &Samples, bg: &BackgroundCharge) -> Result<Samples> {
    check_background_grid(bg, density.grid())?;
    potential_from_density(density).combine(1.0, &background_potential(bg, density.grid())?, 1.0)
}

/// `2V`, the potential of the Euler–Lagrange operator `-d² + 2V` of `E`.
pub fn mean_field_potential(u: &WaveFn, bg: &BackgroundCharge) -> Result<Samples> {
    Ok(effective_potential(u, bg)?.scale(2.0))
}

/// `(-D₂ + W) u` with Dirichlet ends (zero at the boundary nodes).
pub(crate) fn apply_operator(u: &Samples, w: &Samples) -> Samples {
    let d2 = second_difference(u);
    let n = u.len();
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = -d2.values()[i] + w.values()[i] * u.values()[i];
    }
    Samples::new(*u.grid(), out).expect("same length")
}

/// Interior discrete L² norm `sqrt(h Σ r_i²)` of `r = -D₂u + 2V u - ε u`.
pub fn el_residual(u: &WaveFn, epsilon: f64, bg: &BackgroundCharge) -> Result<f64> {
    let w = mean_field_potential(u, bg)?;
    Ok(residual_with_potential(u.samples(), &w, epsilon))
}

pub(crate) fn residual_with_potential(u: &Samples, w: &Samples, epsilon: f64) -> f64 {
    let hu = apply_operator(u, w);
    let n = u.len();
    let s: f64 = (1..n - 1)
        .map(|i| (hu.values()[i] - epsilon * u.values()[i]).powi(2))
        .sum();
    (u.grid().spacing() * s).sqrt()
}

/// `∫(u'² + 2V u²)`, the multiplier implied by a normalized state.
pub fn rayleigh_quotient(u: &WaveFn, bg: &BackgroundCharge) -> Result<f64> {
    let w = mean_field_potential(u, bg)?;
    Ok(kinetic_energy(u.samples()) + integrate(&w.mul(&u.density())?))
}

/// `[V V']` evaluated between the two ends of the grid, with one-sided
/// differences. Vanishing of this term is what makes `E` agree with the
/// local `(u'² + V(u² + ρ) - V'²/2)` form.
pub fn boundary_flux(u: &WaveFn, bg: &BackgroundCharge) -> Result<f64> {
    let v = effective_potential(u, bg)?;
    let h = u.grid().spacing();
    let vals = v.values();
    let n = vals.len();
    let right = vals[n - 1] * (vals[n - 1] - vals[n - 2]) / h;
    let left = vals[0] * (vals[1] - vals[0]) / h;
    Ok(right - left)
}
