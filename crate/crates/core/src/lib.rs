//! Variational ground states of the one-dimensional Schrödinger–Coulomb
//! system with a fixed background charge.
//!
//! The objective on the unit sphere `∫u² = 1` is
//!
//! ```text
//! E[u] = ∫|u'|² + 1/2 ∬ -|x - y| (u² + ρ)(x) (u² + ρ)(y) dx dy
//! ```
//!
//! with `ρ = -z δ_0` (a point charge of ratio `z`) or a sampled nonpositive
//! density. Everything is discretized on a uniform symmetric grid with
//! trapezoid quadrature; the Coulomb double integrals are evaluated in O(N)
//! with prefix sums.

pub mod background;
pub mod diagnostics;
pub mod energy;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod rearrange;
pub mod solver;
pub mod verify;
pub mod wave;

pub use background::BackgroundCharge;
pub use energy::EnergyBreakdown;
pub use error::{CoreError, Result};
pub use grid::{Grid, Samples};
pub use solver::{GroundState, SolverConfig};
pub use wave::WaveFn;
