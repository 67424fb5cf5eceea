//! Randomized property suites with measured margins.
//!
//! Every case draws from its own ChaCha stream derived from the suite seed,
//! so results do not depend on evaluation order.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::background::delta_approximant;
use crate::diagnostics::{counterexample_metrics, counterexample_grid, least_squares, COUNTEREXAMPLE_MAX_H};
use crate::error::{CoreError, Result};
use crate::grid::{integrate, kinetic_energy, Grid, Samples};
use crate::kernel::{b_bilinear, b_norm, c_functional, c_g, c_plus, coulomb_pair_energy, neg_kernel_inner_product, potential_from_density, CPlusForm};
use crate::rearrange::{hardy_littlewood_check, symmetric_decreasing_rearrangement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Forms,
    Bnorm,
    Rearrange,
    Counterexample,
    Delta,
    Innerprod,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Forms,
        Suite::Bnorm,
        Suite::Rearrange,
        Suite::Counterexample,
        Suite::Delta,
        Suite::Innerprod,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Forms => "forms",
            Suite::Bnorm => "bnorm",
            Suite::Rearrange => "rearrange",
            Suite::Counterexample => "counterexample",
            Suite::Delta => "delta",
            Suite::Innerprod => "innerprod",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| CoreError::InvalidConfig(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Above => ">",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, relation: Relation, threshold: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => measured <= threshold,
            Relation::AtLeast => measured >= threshold,
            Relation::Above => measured > threshold,
        };
        Self {
            name: name.into(),
            measured,
            relation,
            threshold,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Charge ratio for the counterexample suite.
    pub z: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 0, z: 0.5 }
    }
}

/// Independent generator for case `case` of a run seeded with `seed`.
pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

/// Signed profile: a few random Gaussian bumps, optionally with node noise.
pub fn random_profile(grid: Grid, rng: &mut impl Rng, noisy: bool) -> Samples {
    let reach = 0.6 * grid.half_width();
    let bumps: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..=4))
        .map(|_| {
            (
                rng.gen_range(-reach..reach),
                rng.gen_range(0.05..0.5) * grid.half_width(),
                rng.gen_range(-1.0..1.0),
            )
        })
        .collect();
    let mut u = Samples::from_fn(grid, |x| {
        bumps
            .iter()
            .map(|&(c, w, a)| a * (-0.5 * ((x - c) / w).powi(2)).exp())
            .sum()
    });
    if noisy {
        for v in u.values_mut() {
            *v += 0.1 * rng.gen_range(-1.0..1.0);
        }
    }
    u
}

/// Unit-mass density `u²` for a random profile `u` pinned to zero at the
/// ends.
pub fn random_density(grid: Grid, rng: &mut impl Rng, noisy: bool) -> Samples {
    let mut raw = random_profile(grid, rng, noisy).square();
    let n = raw.len();
    raw.values_mut()[0] = 0.0;
    raw.values_mut()[n - 1] = 0.0;
    let mass = integrate(&raw);
    raw.scale(1.0 / mass)
}

/// Zero-mean samples supported on a random subinterval, zero near the ends.
pub fn random_zero_mean(grid: Grid, rng: &mut impl Rng) -> Samples {
    let l = grid.half_width();
    let a = rng.gen_range(-0.8 * l..0.0);
    let b = rng.gen_range(0.0..0.8 * l);
    let mut f = Samples::from_fn(grid, |x| if x > a && x < b { two_mode(x, a, b) } else { 0.0 });
    for v in f.values_mut().iter_mut().filter(|v| **v != 0.0) {
        *v *= rng.gen_range(0.2..1.0);
    }
    let inside: Vec<usize> = (0..grid.len()).filter(|&i| f.values()[i] != 0.0).collect();
    let mean = integrate(&f);
    let weight: f64 = inside.iter().map(|&i| grid.weight(i)).sum();
    for &i in &inside {
        f.values_mut()[i] -= mean / weight;
    }
    f
}

fn two_mode(x: f64, a: f64, b: f64) -> f64 {
    // one sign change inside (a, b) so the result is far from degenerate
    let t = (x - a) / (b - a);
    (std::f64::consts::PI * t).sin() + (2.0 * std::f64::consts::PI * t).cos()
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Forms => forms(opts.seed)?,
        Suite::Bnorm => bnorm(opts.seed)?,
        Suite::Rearrange => rearrange(opts.seed)?,
        Suite::Counterexample => counterexample(opts.z)?,
        Suite::Delta => delta()?,
        Suite::Innerprod => innerprod(opts.seed)?,
    };
    Ok(SuiteReport {
        suite,
        seed: opts.seed,
        checks,
    })
}

/// Largest pairwise relative deviation among the four `C+` forms.
pub fn form_spread(f: &Samples) -> f64 {
    let values: Vec<f64> = CPlusForm::ALL.iter().map(|&form| c_plus(f, form)).collect();
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0_f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    worst
}

fn forms(seed: u64) -> Result<Vec<Check>> {
    let grid = Grid::new(5.0, 401)?;
    let mut spread = 0.0_f64;
    let mut min_c = f64::INFINITY;
    let mut decoupling = 0.0_f64;
    for case in 0..100 {
        let mut rng = case_rng(seed, case);
        let f = random_density(grid, &mut rng, case % 2 == 1);
        spread = spread.max(form_spread(&f));
        min_c = min_c.min(c_plus(&f, CPlusForm::C));
        let split = c_plus(&f, CPlusForm::A) + c_plus(&f.reflect(), CPlusForm::A);
        let whole = c_functional(&f, 1.0).value;
        decoupling = decoupling.max((whole - split).abs() / whole.abs().max(f64::MIN_POSITIVE));
    }
    Ok(vec![
        Check::new("max pairwise relative deviation of C+ forms", spread, Relation::AtMost, 1e-9),
        Check::new("min C+ (form C)", min_c, Relation::AtLeast, 0.0),
        Check::new("decoupling C = C+[f] + C+[f reflected], relative", decoupling, Relation::AtMost, 1e-9),
    ])
}

fn bnorm(seed: u64) -> Result<Vec<Check>> {
    let grid = Grid::new(5.0, 201)?;
    let mut homogeneity = 0usize;
    let mut triangle = 0usize;
    let mut cauchy = 0usize;
    let mut convexity = 0usize;
    let mut worst_triangle = f64::NEG_INFINITY;
    let mut worst_convexity = f64::NEG_INFINITY;
    for case in 0..1000 {
        let mut rng = case_rng(seed, case);
        let noisy = case % 2 == 1;
        let u = random_profile(grid, &mut rng, noisy);
        let v = random_profile(grid, &mut rng, noisy);
        let (nu, nv) = (b_norm(&u), b_norm(&v));
        for lambda in [-2.0, 0.5, 3.0] {
            let lhs = b_norm(&u.scale(lambda));
            if (lhs - lambda.abs() * nu).abs() > 1e-12 * lambda.abs() * nu {
                homogeneity += 1;
            }
        }
        let sum = u.combine(1.0, &v, 1.0)?;
        let diff = u.combine(1.0, &v, -1.0)?;
        let t = b_norm(&sum) - nu - nv;
        worst_triangle = worst_triangle.max(t);
        if t > 1e-12 {
            triangle += 1;
        }
        let (u2, v2) = (u.square(), v.square());
        if b_bilinear(&u2, &v2)? > (c_g(&u2) * c_g(&v2)).sqrt() + 1e-12 {
            cauchy += 1;
        }
        let c = b_norm(&sum).powi(4) + b_norm(&diff).powi(4) - 4.0 * (nu * nu + nv * nv).powi(2);
        worst_convexity = worst_convexity.max(c);
        if c > 1e-10 {
            convexity += 1;
        }
    }
    Ok(vec![
        Check::new("homogeneity violations", homogeneity as f64, Relation::AtMost, 0.0),
        Check::new("triangle inequality violations", triangle as f64, Relation::AtMost, 0.0),
        Check::new("max triangle excess", worst_triangle, Relation::AtMost, 1e-12),
        Check::new("Cauchy-Schwarz violations", cauchy as f64, Relation::AtMost, 0.0),
        Check::new("uniform convexity violations", convexity as f64, Relation::AtMost, 0.0),
        Check::new("max uniform convexity excess", worst_convexity, Relation::AtMost, 1e-10),
    ])
}

fn rearrange(seed: u64) -> Result<Vec<Check>> {
    let grid = Grid::new(10.0, 1001)?;
    let mut c_increase = f64::NEG_INFINITY;
    let mut moment_increase = f64::NEG_INFINITY;
    let mut hl_min_gap = f64::INFINITY;
    let mut mass_defect = 0.0_f64;
    let mut multiset = 0usize;
    let mut kinetic_increase = f64::NEG_INFINITY;
    for case in 0..200 {
        let mut rng = case_rng(seed, case);
        let smooth = case % 2 == 0;
        let f = random_density(grid, &mut rng, !smooth);
        let star = symmetric_decreasing_rearrangement(&f)?;
        c_increase = c_increase.max(c_functional(&star, 1.0).value - c_functional(&f, 1.0).value);
        let (lhs, rhs) = hardy_littlewood_check(&f, |r| r)?;
        moment_increase = moment_increase.max(rhs - lhs);
        // strictly increasing profile, f generically asymmetric
        hl_min_gap = hl_min_gap.min(lhs - rhs);
        mass_defect = mass_defect.max((integrate(&star) - integrate(&f)).abs());
        let mut a = f.values().to_vec();
        let mut b = star.values().to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        if a != b {
            multiset += 1;
        }
        if smooth {
            let k_after = kinetic_energy(&star.map(f64::sqrt));
            let k_before = kinetic_energy(&f.map(f64::sqrt));
            kinetic_increase = kinetic_increase.max(k_after - k_before);
        }
    }
    Ok(vec![
        Check::new("max C increase under rearrangement (z = 1)", c_increase, Relation::AtMost, 1e-10),
        Check::new("max first-moment increase under rearrangement", moment_increase, Relation::AtMost, 1e-10),
        Check::new("min Hardy-Littlewood gap for |x|", hl_min_gap, Relation::Above, 1e-10),
        Check::new("equimeasurability failures", multiset as f64, Relation::AtMost, 0.0),
        Check::new("max mass defect", mass_defect, Relation::AtMost, 1e-12),
        Check::new("max kinetic increase on smooth densities", kinetic_increase, Relation::AtMost, 1e-8),
    ])
}

fn counterexample(z: f64) -> Result<Vec<Check>> {
    let n_list = [10u32, 20, 40, 80];
    let rows = n_list
        .iter()
        .map(|&n| counterexample_metrics(n, z, &counterexample_grid(n, COUNTEREXAMPLE_MAX_H)?))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = n_list.iter().map(|&n| (n as f64 + 1.0).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|m| m.c_value).collect();
    let (slope, _) = least_squares(&xs, &ys);
    let norm_defect = rows.iter().fold(0.0_f64, |m, r| m.max((r.norm - 1.0).abs()));
    let remainder: Vec<f64> = rows.iter().zip(&xs).map(|(r, x)| r.c_value - (z - 1.0) * x).collect();
    let spread = remainder.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - remainder.iter().cloned().fold(f64::INFINITY, f64::min);
    let k100 = counterexample_metrics(100, z, &counterexample_grid(100, COUNTEREXAMPLE_MAX_H)?)?.kinetic;
    let mut checks = vec![
        Check::new(format!("|slope - (z - 1)|, slope = {slope:.6}"), (slope - (z - 1.0)).abs(), Relation::AtMost, 0.03),
        Check::new(format!("|kinetic(n = 100) - 1/6| * 6, kinetic = {k100:.6}"), (k100 - 1.0 / 6.0).abs() * 6.0, Relation::AtMost, 0.01),
        Check::new("max |norm - 1|", norm_defect, Relation::AtMost, 1e-4),
        Check::new("spread of C - (z - 1) log(n + 1)", spread, Relation::AtMost, 1.0),
    ];
    if z < 1.0 {
        let rises = rows.windows(2).filter(|w| w[1].total >= w[0].total).count();
        checks.push(Check::new("totals non-decreasing steps for n >= 10", rises as f64, Relation::AtMost, 0.0));
    }
    Ok(checks)
}

fn delta() -> Result<Vec<Check>> {
    let grid = Grid::new(2.0, 1025)?;
    let ns = [1u32, 2, 4, 8];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut mass_defect = 0.0_f64;
    let mut leak = 0.0_f64;
    for &n in &ns {
        let d = delta_approximant(n, &grid)?;
        mass_defect = mass_defect.max((integrate(&d) - 1.0).abs());
        let outside = d.map_with_x(|x, v| if x.abs() >= 1.0 / n as f64 { v.abs() } else { 0.0 });
        leak = leak.max(outside.max_abs());
        let self_energy = -coulomb_pair_energy(&d, &d)?;
        xs.push((n as f64).ln());
        ys.push(self_energy.ln());
    }
    let (slope, _) = least_squares(&xs, &ys);
    Ok(vec![
        Check::new(format!("|slope + 1|, slope = {slope:.6}"), (slope + 1.0).abs(), Relation::AtMost, 0.1),
        Check::new("max |mass - 1|", mass_defect, Relation::AtMost, 1e-8),
        Check::new("max value outside [-1/n, 1/n]", leak, Relation::AtMost, 0.0),
    ])
}

fn innerprod(seed: u64) -> Result<Vec<Check>> {
    let grid = Grid::new(10.0, 401)?;
    let mut min_value = f64::INFINITY;
    let mut poisson = 0.0_f64;
    for case in 0..500 {
        let mut rng = case_rng(seed, case);
        let f = random_zero_mean(grid, &mut rng);
        let value = neg_kernel_inner_product(&f, &f)?;
        min_value = min_value.min(value);
        let v = potential_from_density(&f);
        let dirichlet = 2.0 * kinetic_energy(&v);
        poisson = poisson.max((value - dirichlet).abs() / value.abs());
    }
    let zero = neg_kernel_inner_product(&Samples::zeros(grid), &Samples::zeros(grid))?;
    let mut dipole = Samples::zeros(grid);
    dipole.values_mut()[150] = 1.0;
    dipole.values_mut()[250] = -1.0;
    let dipole_value = neg_kernel_inner_product(&dipole, &dipole)?;
    Ok(vec![
        Check::new("min <f, f> over nonzero f", min_value, Relation::Above, 0.0),
        Check::new("max relative |<f, f> - 2 int V'^2|", poisson, Relation::AtMost, 1e-6),
        Check::new("|<0, 0>|", zero.abs(), Relation::AtMost, 0.0),
        Check::new("dipole <f, f>", dipole_value, Relation::Above, 0.0),
    ])
}
