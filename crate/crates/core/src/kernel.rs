//! Coulomb-kernel functionals on a uniform grid.
//!
//! Every double integral here is the trapezoid double sum
//! `sum_i sum_j w_i w_j K(x_i, x_j) f_i g_j`, evaluated in O(N) by running
//! prefix/suffix sums. Because node offsets are integer multiples of `h`,
//! the fast paths are exact algebraic rewrites of the double sum, not
//! approximations of it.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::grid::{integrate, Samples};

/// Mean tolerance for arguments of [`neg_kernel_inner_product`].
pub const ZERO_MEAN_TOL: f64 = 1e-8;

/// Mass defect above which [`c_functional`] flags its input as unnormalized.
pub const C_MASS_TOL: f64 = 1e-8;

/// `S_i = sum_j w_j |x_i - x_j| f_j` for every node.
///
/// Uses `S_{i+1} - S_i = h (sum_{j<=i} w_j f_j - sum_{j>i} w_j f_j)`.
fn abs_convolution(f: &Samples) -> Vec<f64> {
    let grid = f.grid();
    let h = grid.spacing();
    let n = grid.len();
    let a: Vec<f64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(j, &v)| grid.weight(j) * v)
        .collect();

    let total: f64 = a.iter().sum();
    let first: f64 = a.iter().enumerate().map(|(j, &aj)| j as f64 * aj).sum::<f64>() * h;

    let mut out = Vec::with_capacity(n);
    out.push(first);
    let mut left = 0.0;
    let mut s = first;
    for &ai in a.iter().take(n - 1) {
        left += ai;
        let right = total - left;
        s += h * (left - right);
        out.push(s);
    }
    out
}

/// `V_i = -1/2 sum_j w_j |x_i - x_j| f_j`, the solution of `-V'' = f` generated
/// by a (signed) charge density.
pub fn potential_from_density(f: &Samples) -> Samples {
    let s = abs_convolution(f);
    Samples::new(*f.grid(), s.into_iter().map(|v| -0.5 * v).collect())
        .expect("convolution preserves length")
}

/// `sum_i sum_j w_i w_j (-|x_i - x_j|) f_i g_j`.
pub fn coulomb_pair_energy(f: &Samples, g: &Samples) -> Result<f64> {
    f.check_same_grid(g)?;
    let s = abs_convolution(g);
    let grid = f.grid();
    Ok(-f
        .values()
        .iter()
        .zip(&s)
        .enumerate()
        .map(|(i, (&fi, &si))| grid.weight(i) * fi * si)
        .sum::<f64>())
}

/// `G(x, y) = min(|x|, |y|)` when `xy > 0`, else `0`.
#[inline]
pub fn big_g(x: f64, y: f64) -> f64 {
    if x * y > 0.0 {
        x.abs().min(y.abs())
    } else {
        0.0
    }
}

/// `g(x, y) = (z (|x| + |y|) - |x - y|) / 2 = (z - 1)(|x| + |y|)/2 + G(x, y)`.
#[inline]
pub fn g_kernel(x: f64, y: f64, z: f64) -> f64 {
    0.5 * (z * (x.abs() + y.abs()) - (x - y).abs())
}

/// One of the four iterated-integral forms of `C+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CPlusForm {
    /// `2 ∫ f(x) ∫_0^x y f(y) dy dx`
    A,
    /// `2 ∫ y f(y) ∫_y^∞ f(x) dx dy`
    B,
    /// `∫_0^∞ (∫_z^∞ f)^2 dz`
    C,
    /// `∫ f(x) ∫_0^x ∫_z^∞ f(y) dy dz dx`
    D,
}

impl CPlusForm {
    pub const ALL: [CPlusForm; 4] = [CPlusForm::A, CPlusForm::B, CPlusForm::C, CPlusForm::D];
}

impl fmt::Display for CPlusForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CPlusForm::A => "A",
            CPlusForm::B => "B",
            CPlusForm::C => "C",
            CPlusForm::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for CPlusForm {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(CPlusForm::A),
            "B" => Ok(CPlusForm::B),
            "C" => Ok(CPlusForm::C),
            "D" => Ok(CPlusForm::D),
            other => Err(CoreError::InvalidConfig(format!("unknown C+ form {other:?}"))),
        }
    }
}

/// Weighted masses `w_k f_k` on the half-axis `x_k = k h`, `k = 0..=M`.
fn half_axis_masses(f: &Samples) -> Vec<f64> {
    let grid = f.grid();
    let c = grid.center();
    (c..grid.len())
        .map(|i| grid.weight(i) * f.values()[i])
        .collect()
}

/// Suffix sums `S_k = sum_{i >= k} a_i`.
fn tails(a: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; a.len()];
    let mut acc = 0.0;
    for k in (0..a.len()).rev() {
        acc += a[k];
        s[k] = acc;
    }
    s
}

/// `C+[f] = ∬_{x,y>0} min(x, y) f(x) f(y)` by the selected iterated form.
/// Values of `f` at negative nodes are ignored.
pub fn c_plus(f: &Samples, form: CPlusForm) -> f64 {
    let h = f.grid().spacing();
    let a = half_axis_masses(f);
    let x = |k: usize| k as f64 * h;
    match form {
        CPlusForm::A => {
            // inner integral includes half of the diagonal cell
            let mut inner = 0.0;
            let mut total = 0.0;
            for (k, &ak) in a.iter().enumerate() {
                total += ak * (inner + 0.5 * x(k) * ak);
                inner += x(k) * ak;
            }
            2.0 * total
        }
        CPlusForm::B => {
            let s = tails(&a);
            let total: f64 = a
                .iter()
                .enumerate()
                .map(|(k, &ak)| {
                    let beyond = if k + 1 < a.len() { s[k + 1] } else { 0.0 };
                    x(k) * ak * (beyond + 0.5 * ak)
                })
                .sum();
            2.0 * total
        }
        CPlusForm::C => {
            let s = tails(&a);
            h * s.iter().skip(1).map(|t| t * t).sum::<f64>()
        }
        CPlusForm::D => {
            let s = tails(&a);
            let mut inner = 0.0;
            let mut total = 0.0;
            for k in 1..a.len() {
                inner += h * s[k];
                total += a[k] * inner;
            }
            total
        }
    }
}

/// Bilinear form of the `G` kernel: `∬ G(x, y) f(x) g(y)`.
pub fn b_bilinear(f: &Samples, g: &Samples) -> Result<f64> {
    f.check_same_grid(g)?;
    let h = f.grid().spacing();
    let side = |f: &Samples, g: &Samples| {
        let sf = tails(&half_axis_masses(f));
        let sg = tails(&half_axis_masses(g));
        h * sf.iter().zip(&sg).skip(1).map(|(a, b)| a * b).sum::<f64>()
    };
    Ok(side(f, g) + side(&f.reflect(), &g.reflect()))
}

/// `∬ G(x, y) f(x) f(y) = C+[f] + C+[f(-x)]`; the `z = 1` interaction.
pub fn c_g(f: &Samples) -> f64 {
    c_plus(f, CPlusForm::C) + c_plus(&f.reflect(), CPlusForm::C)
}

/// Value of the interaction functional together with a mass diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CTerm {
    pub value: f64,
    /// `integral f`; the single-integral rewriting assumes it equals 1.
    pub mass: f64,
}

impl CTerm {
    /// True when the input mass deviates from 1 by more than [`C_MASS_TOL`].
    pub fn mass_warning(&self) -> bool {
        (self.mass - 1.0).abs() > C_MASS_TOL
    }
}

/// `C[f] = ∬ g(x, y) f(x) f(y) = (z - 1) ∫f ∫|x|f + ∬ G f f`.
pub fn c_functional(f: &Samples, z: f64) -> CTerm {
    let mass = integrate(f);
    let moment = integrate(&f.map_with_x(|x, v| x.abs() * v));
    CTerm {
        value: (z - 1.0) * mass * moment + c_g(f),
        mass,
    }
}

/// Quartic norm `‖u‖_B = (∬ G u² u²)^{1/4}`.
pub fn b_norm(u: &Samples) -> f64 {
    c_g(&u.square()).max(0.0).powf(0.25)
}

/// `⟨f, g⟩ = ∬ -|x - y| f(x) g(y)`, positive definite on zero-mean functions.
pub fn neg_kernel_inner_product(f: &Samples, g: &Samples) -> Result<f64> {
    for s in [f, g] {
        let mean = integrate(s);
        if mean.abs() > ZERO_MEAN_TOL {
            return Err(CoreError::NonZeroMean {
                mean,
                tol: ZERO_MEAN_TOL,
            });
        }
    }
    coulomb_pair_energy(f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn point_mass_generates_abs_potential() {
        let g = Grid::new(5.0, 101).unwrap();
        let z = 1.7;
        let c = g.center();
        let mut rho = Samples::zeros(g);
        rho.values_mut()[c] = -z / g.weight(c);
        let v = potential_from_density(&rho);
        for i in 0..g.len() {
            assert!((v.values()[i] - 0.5 * z * g.node(i).abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_inputs() {
        let g = Grid::new(2.0, 41).unwrap();
        let zero = Samples::zeros(g);
        let f = Samples::from_fn(g, |x| (-x * x).exp());
        assert_eq!(potential_from_density(&zero).max_abs(), 0.0);
        assert_eq!(coulomb_pair_energy(&zero, &f).unwrap(), 0.0);
        assert_eq!(coulomb_pair_energy(&f, &zero).unwrap(), 0.0);
        assert_eq!(c_functional(&zero, 2.0).value, 0.0);
        assert_eq!(b_norm(&zero), 0.0);
        for form in CPlusForm::ALL {
            assert_eq!(c_plus(&zero, form), 0.0);
        }
    }

    #[test]
    fn pair_energy_is_symmetric() {
        let g = Grid::new(3.0, 61).unwrap();
        let f = Samples::from_fn(g, |x| (x + 0.4).sin().abs());
        let h = Samples::from_fn(g, |x| (-x * x).exp() * (1.0 + x));
        let a = coulomb_pair_energy(&f, &h).unwrap();
        let b = coulomb_pair_energy(&h, &f).unwrap();
        assert!((a - b).abs() <= 1e-13 * a.abs());
    }

    #[test]
    fn g_kernel_branches() {
        assert_eq!(big_g(1.0, -2.0), 0.0);
        assert_eq!(big_g(3.0, 2.0), 2.0);
        assert_eq!(big_g(-3.0, -2.0), 2.0);
        assert_eq!(big_g(0.0, 2.0), 0.0);
        for &(x, y) in &[(1.0, 2.0), (-0.5, 3.0), (-2.0, -7.0), (0.0, 1.0)] {
            assert!((g_kernel(x, y, 1.0) - big_g(x, y)).abs() < 1e-15);
            let z = 2.5;
            let split = 0.5 * (z - 1.0) * (f64::abs(x) + f64::abs(y)) + big_g(x, y);
            assert!((g_kernel(x, y, z) - split).abs() < 1e-14);
        }
    }

    #[test]
    fn decoupling_with_positive_support() {
        let g = Grid::new(4.0, 81).unwrap();
        let f = Samples::from_fn(g, |x| if x > 0.0 { (-(x - 1.0).powi(2)).exp() } else { 0.0 });
        let full = c_functional(&f, 1.0).value;
        let plus = c_plus(&f, CPlusForm::A);
        assert!((full - plus).abs() <= 1e-13 * plus);
    }

    #[test]
    fn form_c_on_unit_indicator() {
        for n in [401, 1601, 6401] {
            let g = Grid::new(2.0, n).unwrap();
            let f = Samples::from_fn(g, |x| if (0.0..=1.0 + 1e-12).contains(&x) { 1.0 } else { 0.0 });
            let v = c_plus(&f, CPlusForm::C);
            // first-order error from the jump at x = 1
            assert!((v - 1.0 / 3.0).abs() < 2.0 * g.spacing(), "{n}: {v}");
        }
    }

    #[test]
    fn cplus_form_parsing() {
        assert_eq!("c".parse::<CPlusForm>().unwrap(), CPlusForm::C);
        assert!("E".parse::<CPlusForm>().is_err());
        assert_eq!(CPlusForm::D.to_string(), "D");
    }

    #[test]
    fn mass_warning_flag() {
        let g = Grid::new(3.0, 301).unwrap();
        let f = Samples::from_fn(g, |x| (-x * x).exp());
        assert!(c_functional(&f, 1.0).mass_warning());
        let f = f.scale(1.0 / integrate(&f));
        assert!(!c_functional(&f, 1.0).mass_warning());
    }

    #[test]
    fn b_norm_homogeneity() {
        let g = Grid::new(3.0, 121).unwrap();
        let u = Samples::from_fn(g, |x| (x - 0.3).cos() * (-x * x / 2.0).exp());
        let b = b_norm(&u);
        for lambda in [-2.0, 0.5, 3.0] {
            let scaled = b_norm(&u.scale(lambda));
            assert!((scaled - f64::abs(lambda) * b).abs() <= 1e-14 * scaled.max(1.0));
        }
    }

    #[test]
    fn inner_product_examples() {
        let g = Grid::new(3.0, 61).unwrap();
        let mut dipole = Samples::zeros(g);
        dipole.values_mut()[20] = 1.0;
        dipole.values_mut()[35] = -1.0;
        assert!(neg_kernel_inner_product(&dipole, &dipole).unwrap() > 0.0);

        let shifted = dipole.map(|v| v + 0.3 / 6.0);
        assert!((integrate(&shifted) - 0.3).abs() < 1e-12);
        assert!(matches!(
            neg_kernel_inner_product(&shifted, &dipole),
            Err(CoreError::NonZeroMean { .. })
        ));
    }
}
