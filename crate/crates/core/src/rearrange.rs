//! Symmetric-decreasing rearrangement of grid densities.
//!
//! The discrete rearrangement keeps the multiset of sample values and moves
//! them onto nodes ordered by distance from the origin: the largest value to
//! `x = 0`, then alternately `+h, -h, +2h, -2h, ...`.

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::grid::{integrate, kinetic_energy, Samples};
use crate::kernel::c_functional;
use crate::wave::WaveFn;

const NEGATIVE_TOL: f64 = 1e-14;

/// Node indices in rearrangement order: `c, c+1, c-1, c+2, c-2, ...`.
fn radial_order(n: usize) -> impl Iterator<Item = usize> {
    let c = (n - 1) / 2;
    std::iter::once(c).chain((1..=c).flat_map(move |k| [c + k, c - k]))
}

pub fn symmetric_decreasing_rearrangement(f: &Samples) -> Result<Samples> {
    if let Some((index, &value)) = f.values().iter().enumerate().find(|(_, &v)| v < -NEGATIVE_TOL) {
        return Err(CoreError::NegativeInput { index, value });
    }
    let mut sorted = f.values().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut out = vec![0.0; f.len()];
    for (node, value) in radial_order(f.len()).zip(sorted) {
        out[node] = value;
    }
    Samples::new(*f.grid(), out)
}

/// `u* = sqrt((u²)*)`.
pub fn rearrange_wavefn(u: &WaveFn) -> Result<WaveFn> {
    let star = symmetric_decreasing_rearrangement(&u.density())?;
    WaveFn::normalize(star.map(f64::sqrt))
}

/// `(∫ f g, ∫ f* g)` for a profile `g(|x|)` that is nondecreasing in `|x|`.
pub fn hardy_littlewood_check(f: &Samples, profile: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    let star = symmetric_decreasing_rearrangement(f)?;
    let g = Samples::from_fn(*f.grid(), |x| profile(x.abs()));
    Ok((integrate(&f.mul(&g)?), integrate(&star.mul(&g)?)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RearrangementReport {
    pub e_before: f64,
    pub e_after: f64,
    pub kinetic_before: f64,
    pub kinetic_after: f64,
    pub coulomb_before: f64,
    pub coulomb_after: f64,
    pub was_symmetric: bool,
}

impl RearrangementReport {
    pub fn energy_drop(&self) -> f64 {
        self.e_before - self.e_after
    }
}

/// Energy of the density `f = u²` before and after rearrangement, with the
/// kinetic terms taken on `sqrt(f)` and `sqrt(f*)`.
pub fn double_rearrangement_check(f: &Samples, z: f64) -> Result<RearrangementReport> {
    let star = symmetric_decreasing_rearrangement(f)?;
    let kinetic_before = kinetic_energy(&f.map(|v| v.max(0.0).sqrt()));
    let kinetic_after = kinetic_energy(&star.map(|v| v.max(0.0).sqrt()));
    let coulomb_before = c_functional(f, z).value;
    let coulomb_after = c_functional(&star, z).value;
    let scale = f.max_abs().max(f64::MIN_POSITIVE);
    let was_symmetric = f
        .values()
        .iter()
        .zip(star.values())
        .all(|(a, b)| (a - b).abs() <= 1e-12 * scale);
    Ok(RearrangementReport {
        e_before: kinetic_before + coulomb_before,
        e_after: kinetic_after + coulomb_after,
        kinetic_before,
        kinetic_after,
        coulomb_before,
        coulomb_after,
        was_symmetric,
    })
}
