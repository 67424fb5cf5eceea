//! Fixed background charges: the exact point charge `-z δ_0` and sampled
//! nonpositive densities, together with their potentials `V_ρ`.

use std::path::Path;

use crate::error::{CoreError, Result};
use crate::grid::{integrate, Grid, Samples};
use crate::kernel::potential_from_density;

#[derive(Debug, Clone, PartialEq)]
pub enum BackgroundCharge {
    /// `ρ = -z δ_0`, kept symbolic.
    Point { z: f64 },
    /// Sampled `ρ <= 0`.
    Sampled { rho: Samples },
}

impl BackgroundCharge {
    pub fn point(z: f64) -> Result<Self> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(CoreError::InvalidConfig(format!(
                "point charge ratio must be positive, got {z}"
            )));
        }
        Ok(Self::Point { z })
    }

    pub fn sampled(rho: Samples) -> Result<Self> {
        if let Some((index, &value)) = rho.values().iter().enumerate().find(|(_, &v)| v > 0.0 || v.is_nan()) {
            return Err(CoreError::PositiveBackground { index, value });
        }
        Ok(Self::Sampled { rho })
    }

    /// `z = -∫ρ`.
    pub fn charge_ratio(&self) -> f64 {
        -total_charge(self)
    }

    /// Grid the background is bound to, if any.
    pub fn grid(&self) -> Option<&Grid> {
        match self {
            Self::Point { .. } => None,
            Self::Sampled { rho } => Some(rho.grid()),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            Self::Point { .. } => true,
            Self::Sampled { rho } => rho == &rho.reflect(),
        }
    }
}

/// `∫ρ`: `-z` for a point charge.
pub fn total_charge(bg: &BackgroundCharge) -> f64 {
    match bg {
        BackgroundCharge::Point { z } => -z,
        BackgroundCharge::Sampled { rho } => integrate(rho),
    }
}

/// `∫|x| |ρ(x)| dx`; zero for the point charge at the origin.
pub fn abs_moment(bg: &BackgroundCharge) -> f64 {
    match bg {
        BackgroundCharge::Point { .. } => 0.0,
        BackgroundCharge::Sampled { rho } => integrate(&rho.map_with_x(|x, r| x.abs() * r.abs())),
    }
}

/// `V_ρ(x) = 1/2 ∫|x - y| (-ρ(y)) dy`, exactly `(z/2)|x|` for the point charge.
pub fn background_potential(bg: &BackgroundCharge, grid: &Grid) -> Result<Samples> {
    match bg {
        BackgroundCharge::Point { z } => Ok(Samples::from_fn(*grid, |x| 0.5 * z * x.abs())),
        BackgroundCharge::Sampled { rho } => {
            if rho.grid() != grid {
                return Err(CoreError::GridMismatch);
            }
            Ok(potential_from_density(rho))
        }
    }
}

/// Charge centroid `P = -z^{-1} ∫ x ρ(x) dx`.
pub fn recenter_shift(bg: &BackgroundCharge) -> Result<f64> {
    match bg {
        BackgroundCharge::Point { .. } => Ok(0.0),
        BackgroundCharge::Sampled { rho } => {
            let z = -integrate(rho);
            if !(z > 0.0) {
                return Err(CoreError::NoCharge);
            }
            Ok(-integrate(&rho.map_with_x(|x, r| x * r)) / z)
        }
    }
}

/// Largest value of `(z/2)|x_i - P| - V_ρ(x_i)` over the nodes. Jensen's
/// inequality makes this nonpositive. A point charge is replaced by its
/// one-node surrogate on `grid`.
pub fn jensen_lower_bound_check(bg: &BackgroundCharge, grid: &Grid) -> Result<f64> {
    let sampled;
    let bg = match bg {
        BackgroundCharge::Point { z } => {
            sampled = BackgroundCharge::Sampled {
                rho: point_surrogate(*z, grid),
            };
            &sampled
        }
        other => other,
    };
    let z = bg.charge_ratio();
    let p = recenter_shift(bg)?;
    let v = background_potential(bg, grid)?;
    Ok((0..grid.len())
        .map(|i| 0.5 * z * (grid.node(i) - p).abs() - v.values()[i])
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Mass `-z` concentrated on the origin node.
pub fn point_surrogate(z: f64, grid: &Grid) -> Samples {
    let mut rho = Samples::zeros(*grid);
    let c = grid.center();
    rho.values_mut()[c] = -z / grid.weight(c);
    rho
}

/// Standard mollifier `exp(-1/(1 - t^2))` on `|t| < 1` (unnormalized).
pub fn mollifier(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// `δ_n(x) = n φ(n x)` normalized to unit discrete mass.
pub fn delta_approximant(n: u32, grid: &Grid) -> Result<Samples> {
    if n == 0 {
        return Err(CoreError::InvalidConfig("approximant index must be >= 1".into()));
    }
    let nf = n as f64;
    let max_h = 1.0 / (4.0 * nf);
    if grid.spacing() > max_h {
        return Err(CoreError::UnderResolved {
            h: grid.spacing(),
            max_h,
        });
    }
    if grid.half_width() < 1.0 / nf {
        return Err(CoreError::GridTooSmall {
            half_width: grid.half_width(),
            required: 1.0 / nf,
        });
    }
    let raw = Samples::from_fn(*grid, |x| nf * mollifier(nf * x));
    let mass = integrate(&raw);
    Ok(raw.scale(1.0 / mass))
}

/// Reads a two-column `x rho` table and resamples it onto `grid` by linear
/// interpolation (zero outside the tabulated range).
pub fn parse_background(text: &str, grid: &Grid) -> Result<Samples> {
    let mut table: Vec<(f64, f64)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 2 {
            return Err(CoreError::BackgroundFile(format!(
                "line {}: expected 2 columns, found {}",
                lineno + 1,
                cols.len()
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| {
                CoreError::BackgroundFile(format!("line {}: {s:?}: {e}", lineno + 1))
            })
        };
        table.push((parse(cols[0])?, parse(cols[1])?));
    }
    if table.len() < 2 {
        return Err(CoreError::BackgroundFile("need at least two data rows".into()));
    }
    if table.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(CoreError::BackgroundFile("x column must be strictly increasing".into()));
    }
    let (x_lo, x_hi) = (table[0].0, table[table.len() - 1].0);
    Ok(Samples::from_fn(*grid, |x| {
        if x < x_lo || x > x_hi {
            return 0.0;
        }
        let k = table.partition_point(|&(xk, _)| xk <= x).clamp(1, table.len() - 1);
        let ((x0, r0), (x1, r1)) = (table[k - 1], table[k]);
        let t = (x - x0) / (x1 - x0);
        r0 + t * (r1 - r0)
    }))
}

pub fn load_background(path: &Path, grid: &Grid) -> Result<BackgroundCharge> {
    let text = std::fs::read_to_string(path)?;
    BackgroundCharge::sampled(parse_background(&text, grid)?)
}
