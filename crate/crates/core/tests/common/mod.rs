//! Dense O(N²) quadrature oracles, written directly from the double sums.

#![allow(dead_code)]

use coulombium::grid::{kinetic_energy, Samples};

fn weights(f: &Samples) -> Vec<f64> {
    f.grid().weights()
}

pub fn dense_potential(f: &Samples) -> Vec<f64> {
    let g = f.grid();
    let w = weights(f);
    (0..g.len())
        .map(|i| {
            -0.5 * (0..g.len())
                .map(|j| w[j] * (g.node(i) - g.node(j)).abs() * f.values()[j])
                .sum::<f64>()
        })
        .collect()
}

pub fn dense_double_sum(f: &Samples, h: &Samples, kernel: impl Fn(f64, f64) -> f64) -> f64 {
    let g = f.grid();
    let w = weights(f);
    let mut total = 0.0;
    for i in 0..g.len() {
        for j in 0..g.len() {
            total += w[i] * w[j] * kernel(g.node(i), g.node(j)) * f.values()[i] * h.values()[j];
        }
    }
    total
}

pub fn dense_pair(f: &Samples, h: &Samples) -> f64 {
    dense_double_sum(f, h, |x, y| -(x - y).abs())
}

pub fn dense_c_functional(f: &Samples, z: f64) -> f64 {
    dense_double_sum(f, f, |x, y| 0.5 * (z * (x.abs() + y.abs()) - (x - y).abs()))
}

/// `∬_{x, y ≥ 0} min(x, y) f f`.
pub fn dense_c_plus(f: &Samples) -> f64 {
    dense_double_sum(f, f, |x, y| if x >= 0.0 && y >= 0.0 { x.min(y) } else { 0.0 })
}

pub fn dense_g_bilinear(f: &Samples, h: &Samples) -> f64 {
    dense_double_sum(f, h, |x, y| if x * y > 0.0 { x.abs().min(y.abs()) } else { 0.0 })
}

/// `∫u'² + ½∬ -|x - y| u² u² + z ∫|x| u²`: the point-charge energy with
/// the charge's self-interaction dropped.
pub fn dense_point_energy(u: &Samples, z: f64) -> f64 {
    let f = u.square();
    let w = weights(&f);
    let attraction: f64 = (0..f.len()).map(|i| w[i] * z * f.grid().node(i).abs() * f.values()[i]).sum();
    kinetic_energy(u) + 0.5 * dense_pair(&f, &f) + attraction
}

/// `∫u'² + ½∬ -|x - y| (u² + ρ)(u² + ρ)` without the `ρρ` term.
pub fn dense_sampled_energy(u: &Samples, rho: &Samples) -> f64 {
    let f = u.square();
    kinetic_energy(u) + 0.5 * dense_pair(&f, &f) + dense_pair(&f, rho)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs() / scale))
}
