//! Concentration–compactness diagnostics and the subcritical counterexample
//! family.

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::grid::{integrate, kinetic_energy, Grid, Samples};
use crate::kernel::{b_norm, c_functional};

/// Finest spacing required for the counterexample profiles.
pub const COUNTEREXAMPLE_MAX_H: f64 = 0.01;
/// Densities below this are treated as zero before taking square roots.
const SQRT_FLOOR: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationProfile {
    pub radii: Vec<f64>,
    pub q: Vec<f64>,
    pub lambda_estimate: f64,
}

/// `∫_0^r` of the piecewise-linear interpolant of `values` given on
/// `x_k = k h`.
fn half_line_integral(values: impl Iterator<Item = f64>, h: f64, r: f64) -> f64 {
    let vals: Vec<f64> = values.collect();
    let mut acc = 0.0;
    for k in 0..vals.len() - 1 {
        let x0 = k as f64 * h;
        if r <= x0 {
            break;
        }
        let t = (r - x0).min(h);
        let slope = (vals[k + 1] - vals[k]) / h;
        acc += vals[k] * t + 0.5 * slope * t * t;
    }
    acc
}

/// `Q[f](r) = ∫_{-r}^{r} f`; exactly [`integrate`] once `r >= L`.
pub fn concentration(f: &Samples, r: f64) -> f64 {
    let grid = f.grid();
    if r >= grid.half_width() {
        return integrate(f);
    }
    if r <= 0.0 {
        return 0.0;
    }
    let c = grid.center();
    let h = grid.spacing();
    let v = f.values();
    half_line_integral(v[c..].iter().copied(), h, r) + half_line_integral(v[..=c].iter().rev().copied(), h, r)
}

pub fn concentration_profile(f: &Samples, radii: &[f64]) -> ConcentrationProfile {
    let q: Vec<f64> = radii.iter().map(|&r| concentration(f, r)).collect();
    let lambda_estimate = radii
        .iter()
        .zip(&q)
        .fold((f64::NEG_INFINITY, 0.0), |(rmax, qv), (&r, &qr)| if r > rmax { (r, qr) } else { (rmax, qv) })
        .1;
    ConcentrationProfile {
        radii: radii.to_vec(),
        q,
        lambda_estimate,
    }
}

/// Mass outside `[-r, r]`.
pub fn tail_mass(f: &Samples, r: f64) -> f64 {
    (integrate(f) - concentration(f, r)).max(0.0)
}

/// Weighted masses on nodes with `x >= r` and `x <= -r`.
fn outer_masses(f: &Samples, r: f64) -> (f64, f64) {
    let grid = f.grid();
    let c = grid.center();
    let first = (r / grid.spacing() - 1e-9).ceil().max(0.0) as usize;
    let side = |sign: isize| {
        (first..=c)
            .map(|k| {
                let i = (c as isize + sign * k as isize) as usize;
                grid.weight(i) * f.values()[i]
            })
            .sum::<f64>()
    };
    if first > c {
        (0.0, 0.0)
    } else {
        (side(1), side(-1))
    }
}

/// `R max(P⁺, P⁻)²` with `P^±` the masses beyond `±R`; a lower bound for the
/// neutral interaction `C[f]`.
pub fn tightness_lower_bound(f: &Samples, r: f64) -> f64 {
    let (plus, minus) = outer_masses(f, r);
    r * plus.max(minus).powi(2)
}

/// `∫|x|^p f`.
pub fn moment(f: &Samples, p: f64) -> f64 {
    integrate(&f.map_with_x(|x, v| x.abs().powf(p) * v))
}

/// Density of the counterexample profile `u_n²` at `x`.
pub fn counterexample_density(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    let a = x.abs();
    if a > nf {
        return 0.0;
    }
    let prefactor = (1.0 + nf).powi(3) / (2.0 * nf.powi(3));
    prefactor * ((1.0 + a).powi(-2) - (1.0 + nf).powi(-2) + 2.0 * (a - nf) / (1.0 + nf).powi(3))
}

/// Samples of `u_n`, supported on `[-n, n]`.
pub fn counterexample_un(n: u32, grid: &Grid) -> Result<Samples> {
    if n == 0 {
        return Err(CoreError::InvalidConfig("counterexample index must be >= 1".into()));
    }
    let required = n as f64 + 1.0;
    if grid.half_width() < required {
        return Err(CoreError::GridTooSmall {
            half_width: grid.half_width(),
            required,
        });
    }
    if grid.spacing() > COUNTEREXAMPLE_MAX_H * (1.0 + 1e-12) {
        return Err(CoreError::UnderResolved {
            h: grid.spacing(),
            max_h: COUNTEREXAMPLE_MAX_H,
        });
    }
    Ok(Samples::from_fn(*grid, |x| {
        let d = counterexample_density(n, x);
        if d < SQRT_FLOOR {
            0.0
        } else {
            d.sqrt()
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleMetrics {
    pub n: u32,
    pub norm: f64,
    pub kinetic: f64,
    pub c_value: f64,
    pub total: f64,
    pub b_norm: f64,
}

/// Grid used for `u_n`: half-width `n + 2`, spacing at most `max_h`.
pub fn counterexample_grid(n: u32, max_h: f64) -> Result<Grid> {
    Grid::with_max_spacing(n as f64 + 2.0, max_h)
}

pub fn counterexample_metrics(n: u32, z: f64, grid: &Grid) -> Result<CounterexampleMetrics> {
    let u = counterexample_un(n, grid)?;
    let density = u.square();
    let kinetic = kinetic_energy(&u);
    let c_value = c_functional(&density, z).value;
    Ok(CounterexampleMetrics {
        n,
        norm: integrate(&density),
        kinetic,
        c_value,
        total: kinetic + c_value,
        b_norm: b_norm(&u),
    })
}

/// Ordinary least-squares fit `y = slope x + intercept`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnboundednessScan {
    pub z: f64,
    pub rows: Vec<CounterexampleMetrics>,
    /// Least-squares slope of `C[u_n²]` against `log(n + 1)`.
    pub slope: f64,
    pub intercept: f64,
}

/// Evaluates the counterexample family on grids of half-width `n + 2` and
/// spacing at most `max_h`, and fits `C[u_n²]` against `log(n + 1)`.
pub fn unboundedness_scan(z: f64, n_list: &[u32], max_h: f64) -> Result<UnboundednessScan> {
    if n_list.len() < 2 {
        return Err(CoreError::InvalidConfig("need at least two n values for a slope".into()));
    }
    let rows = n_list
        .iter()
        .map(|&n| counterexample_metrics(n, z, &counterexample_grid(n, max_h)?))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|m| (m.n as f64 + 1.0).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|m| m.c_value).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    Ok(UnboundednessScan {
        z,
        rows,
        slope,
        intercept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concentration_limits() {
        let g = Grid::new(5.0, 501).unwrap();
        let f = Samples::from_fn(g, |x| (-x * x).exp());
        let f = f.scale(1.0 / integrate(&f));
        assert!((concentration(&f, 5.0) - 1.0).abs() < 1e-12);
        assert!((concentration(&f, 8.0) - 1.0).abs() < 1e-12);
        assert_eq!(concentration(&f, 0.0), 0.0);
        let radii: Vec<f64> = (0..60).map(|k| 0.1 * k as f64).collect();
        let p = concentration_profile(&f, &radii);
        assert!(p.q.windows(2).all(|w| w[1] >= w[0]));
        assert!((p.lambda_estimate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_cell_integral_is_exact_for_linear() {
        let g = Grid::new(2.0, 5).unwrap();
        let f = Samples::from_fn(g, |x| 2.0 - x.abs());
        // ∫_{-r}^{r} (2 - |x|) = 4r - r²
        for r in [0.3, 0.5, 1.25, 1.9] {
            assert!((concentration(&f, r) - (4.0 * r - r * r)).abs() < 1e-14);
        }
    }

    #[test]
    fn escaping_bumps_leave_the_window() {
        let g = Grid::new(40.0, 4001).unwrap();
        let r = 3.0;
        let mut last = f64::INFINITY;
        for m in [0.0, 4.0, 8.0, 16.0] {
            let f = Samples::from_fn(g, |x| (-(x - m).powi(2)).exp() / std::f64::consts::PI.sqrt());
            let q = concentration(&f, r);
            assert!(q <= last);
            last = q;
        }
        assert!(last < 1e-12);
    }

    #[test]
    fn tightness_examples() {
        let g = Grid::new(20.0, 2001).unwrap();
        let inside = Samples::from_fn(g, |x| if x.abs() < 2.0 { 0.25 } else { 0.0 });
        assert_eq!(tightness_lower_bound(&inside, 3.0), 0.0);

        let r = 4.0;
        let narrow = |c: f64| move |x: f64| (-((x - c) / 0.05).powi(2)).exp();
        let f = Samples::from_fn(g, |x| narrow(2.0 * r)(x) + narrow(-2.0 * r)(x));
        let f = f.scale(1.0 / integrate(&f));
        assert!((tightness_lower_bound(&f, r) - r / 4.0).abs() < 1e-10);
        assert!(c_functional(&f, 1.0).value >= tightness_lower_bound(&f, r) - 1e-8);
    }

    #[test]
    fn moment_examples() {
        let g = Grid::new(2.0, 2001).unwrap();
        let f = Samples::from_fn(g, |x| (-x * x).exp());
        let f = f.scale(1.0 / integrate(&f));
        assert!((moment(&f, 0.0) - 1.0).abs() < 1e-14);
        let ind = Samples::from_fn(g, |x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 });
        assert!((moment(&ind, 1.0) - 0.5).abs() < 2.0 * g.spacing());
    }

    #[test]
    fn counterexample_shape() {
        for n in [5, 10, 20] {
            let g = counterexample_grid(n, 0.01).unwrap();
            let u = counterexample_un(n, &g).unwrap();
            assert!((integrate(&u.square()) - 1.0).abs() < 1e-4);
        }
        let n = 10;
        let nf = n as f64;
        assert_eq!(counterexample_density(n, nf), 0.0);
        assert_eq!(counterexample_density(n, -nf), 0.0);
        // quadratic touch: density / ε² stays bounded, so the slope vanishes
        let eps = 1e-4;
        let d = counterexample_density(n, nf - eps);
        assert!(d / eps < 1e-3 && d / (eps * eps) < 1.0);
        let at0 = (1.0 + nf).powi(3) / (2.0 * nf.powi(3))
            * (1.0 - (1.0 + nf).powi(-2) - 2.0 * nf / (1.0 + nf).powi(3));
        assert!((counterexample_density(n, 0.0) - at0).abs() < 1e-15);
    }

    #[test]
    fn counterexample_grid_checks() {
        let small = Grid::new(10.5, 2101).unwrap();
        assert!(matches!(
            counterexample_un(10, &small),
            Err(CoreError::GridTooSmall { .. })
        ));
        let coarse = Grid::new(12.0, 601).unwrap();
        assert!(matches!(
            counterexample_un(10, &coarse),
            Err(CoreError::UnderResolved { .. })
        ));
    }

    #[test]
    fn kinetic_tends_to_one_third() {
        // u_n ~ (1 + |x|)^{-1} / sqrt(2) away from ±n, so ∫u'² -> 1/3
        let mut last = f64::INFINITY;
        for n in [25, 50, 100] {
            let m = counterexample_metrics(n, 1.0, &counterexample_grid(n, 0.01).unwrap()).unwrap();
            let gap = m.kinetic - 1.0 / 3.0;
            assert!(gap > 0.0 && gap < last);
            assert!(gap * n as f64 > 0.5 && gap * (n as f64) < 2.0, "n={n}: {gap}");
            last = gap;
        }
    }

    #[test]
    fn neutral_interaction_stays_bounded() {
        // at z = 1 only the G part survives; it approaches 1/2 from below
        let scan = unboundedness_scan(1.0, &[10, 20, 40, 80], 0.01).unwrap();
        for pair in scan.rows.windows(2) {
            assert!(pair[1].c_value > pair[0].c_value);
        }
        assert!(scan.rows.iter().all(|m| m.c_value < 0.5));
    }

    #[test]
    fn subcritical_totals_decrease() {
        let scan = unboundedness_scan(0.5, &[20, 40, 80, 160], 0.01).unwrap();
        for pair in scan.rows.windows(2) {
            assert!(pair[1].total < pair[0].total);
        }
        // remainder C - (z - 1) log(n + 1) stays bounded over the range
        let rem: Vec<f64> = scan
            .rows
            .iter()
            .map(|m| m.c_value + 0.5 * (m.n as f64 + 1.0).ln())
            .collect();
        let spread = rem.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - rem.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1.0, "{rem:?}");
    }

    #[test]
    fn least_squares_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| -0.5 * x + 2.0).collect();
        let (s, b) = least_squares(&xs, &ys);
        assert!((s + 0.5).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);
    }
}
