use crate::error::{CoreError, Result};
use crate::grid::{integrate, Grid, Samples};

/// Tolerance on `integral u^2 = 1` accepted by [`WaveFn::new`].
pub const NORM_TOL: f64 = 1e-8;

/// Samples of `u` with unit discrete L² norm.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFn(Samples);

impl WaveFn {
    /// Wraps samples that are already normalized within [`NORM_TOL`].
    pub fn new(u: Samples) -> Result<Self> {
        let norm = integrate(&u.square());
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(CoreError::NotNormalized { norm });
        }
        Ok(Self(u))
    }

    /// Rescales `u` to unit norm.
    pub fn normalize(u: Samples) -> Result<Self> {
        let norm = integrate(&u.square());
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(CoreError::NotNormalized { norm });
        }
        Ok(Self(u.scale(norm.sqrt().recip())))
    }

    /// Normalized Gaussian `exp(-(x - center)^2 / (2 width^2))`, pinned to zero
    /// at the two boundary nodes.
    pub fn gaussian(grid: Grid, center: f64, width: f64) -> Result<Self> {
        let mut u = Samples::from_fn(grid, |x| (-0.5 * ((x - center) / width).powi(2)).exp());
        let n = grid.len();
        u.values_mut()[0] = 0.0;
        u.values_mut()[n - 1] = 0.0;
        Self::normalize(u)
    }

    #[inline]
    pub fn samples(&self) -> &Samples {
        &self.0
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        self.0.grid()
    }

    pub fn density(&self) -> Samples {
        self.0.square()
    }

    pub fn reflect(&self) -> Self {
        Self(self.0.reflect())
    }

    pub fn into_samples(self) -> Samples {
        self.0
    }
}
