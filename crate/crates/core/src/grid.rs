//! Uniform symmetric mesh on `[-L, L]` with trapezoid quadrature and the
//! forward-difference Dirichlet form.
//!
//! The node count is always odd so that `x = 0` is a node: the point charge
//! sits there and `|x|` has its kink there.

use serde::Serialize;

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    half_width: f64,
    n_points: usize,
    spacing: f64,
}

impl Grid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(CoreError::InvalidGrid(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        if n_points < 3 {
            return Err(CoreError::InvalidGrid(format!(
                "need at least 3 nodes, got {n_points}"
            )));
        }
        if n_points % 2 == 0 {
            return Err(CoreError::InvalidGrid(format!(
                "node count must be odd so the origin is a node, got {n_points}"
            )));
        }
        Ok(Self {
            half_width,
            n_points,
            spacing: 2.0 * half_width / (n_points - 1) as f64,
        })
    }

    /// Smallest odd-node grid on `[-L, L]` whose spacing does not exceed `max_h`.
    pub fn with_max_spacing(half_width: f64, max_h: f64) -> Result<Self> {
        if !(max_h > 0.0) {
            return Err(CoreError::InvalidGrid(format!("spacing bound {max_h}")));
        }
        let cells = (2.0 * half_width / max_h - 1e-9).ceil().max(2.0) as usize;
        let cells = cells + cells % 2;
        Self::new(half_width, cells + 1)
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Index of the origin node.
    #[inline]
    pub fn center(&self) -> usize {
        (self.n_points - 1) / 2
    }

    /// `x_i`, computed from the offset to the center so that the mesh is
    /// exactly symmetric and `x_center == 0.0`.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Trapezoid weight of node `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n_points {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.weight(i)).collect()
    }

    /// Index of the node nearest to `x`, clamped to the mesh.
    pub fn nearest(&self, x: f64) -> usize {
        let k = (x / self.spacing).round() + self.center() as f64;
        k.clamp(0.0, (self.n_points - 1) as f64) as usize
    }
}

/// Values of a function at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    grid: Grid,
    values: Vec<f64>,
}

impl Samples {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(CoreError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise `f(x_i, v_i)`.
    pub fn map_with_x(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.grid.node(i), v))
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Samples, b: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&u, &v)| a * u + b * v)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn mul(&self, other: &Samples) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&u, &v)| u * v)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn square(&self) -> Self {
        self.map(|v| v * v)
    }

    /// `f(-x)`, i.e. `v_i -> v_{N-1-i}`.
    pub fn reflect(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            grid: self.grid,
            values,
        }
    }

    /// Restriction to `x >= 0` (values at negative nodes zeroed).
    pub fn positive_part(&self) -> Self {
        let c = self.grid.center();
        let mut values = self.values.clone();
        values[..c].iter_mut().for_each(|v| *v = 0.0);
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub(crate) fn check_same_grid(&self, other: &Samples) -> Result<()> {
        if self.grid != other.grid {
            return Err(CoreError::GridMismatch);
        }
        Ok(())
    }
}

/// Trapezoid rule `h (f_0/2 + f_1 + ... + f_{N-2} + f_{N-1}/2)`.
pub fn integrate(f: &Samples) -> f64 {
    let v = f.values();
    let n = v.len();
    let inner: f64 = v[1..n - 1].iter().sum();
    f.grid().spacing() * (inner + 0.5 * (v[0] + v[n - 1]))
}

/// Forward-difference Dirichlet form `sum (u_{i+1} - u_i)^2 / h`.
pub fn kinetic_energy(u: &Samples) -> f64 {
    let s: f64 = u.values().windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    s / u.grid().spacing()
}

/// `(u_{i-1} - 2 u_i + u_{i+1}) / h^2` at interior nodes; zero at the ends.
pub fn second_difference(u: &Samples) -> Samples {
    let h2 = u.grid().spacing().powi(2);
    let v = u.values();
    let mut out = vec![0.0; v.len()];
    for i in 1..v.len() - 1 {
        out[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) / h2;
    }
    Samples {
        grid: *u.grid(),
        values: out,
    }
}
