//! Run configuration: TOML file sections, overridden by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use coulombium::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Scf,
    Gd,
    Both,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Scf => "scf",
            Method::Gd => "gd",
            Method::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackgroundSection {
    /// Point-charge ratio; ignored when `file` is set.
    pub z: f64,
    /// Two-column `x rho` table for a sampled background.
    pub file: Option<PathBuf>,
    pub allow_subcritical: bool,
    /// Add the constant `ρρ` self-energy of sampled backgrounds to reports.
    pub include_self_energy: bool,
}

impl Default for BackgroundSection {
    fn default() -> Self {
        Self {
            z: 2.0,
            file: None,
            allow_subcritical: false,
            include_self_energy: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub half_width: f64,
    pub n_points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            half_width: d.half_width,
            n_points: d.n_points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub method: Method,
    pub scf_damping: f64,
    pub tol_energy: f64,
    pub tol_residual: f64,
    pub max_iter: usize,
    pub gd_step: f64,
    pub gd_precondition: bool,
    pub seed: u64,
    pub random_start: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            method: Method::Scf,
            scf_damping: d.scf_damping,
            tol_energy: d.tol_energy,
            tol_residual: d.tol_residual,
            max_iter: d.max_iter,
            gd_step: d.gd_step,
            gd_precondition: d.gd_precondition,
            seed: d.seed,
            random_start: d.random_start,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("."),
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub suite: Option<String>,
    /// Charge ratio of the counterexample suite.
    pub z: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { suite: None, z: 0.5 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub background: BackgroundSection,
    pub grid: GridSection,
    pub solver: SolverSection,
    pub output: OutputSection,
    pub scan: ScanSection,
    pub verify: VerifySection,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            half_width: self.grid.half_width,
            n_points: self.grid.n_points,
            scf_damping: s.scf_damping,
            tol_energy: s.tol_energy,
            tol_residual: s.tol_residual,
            max_iter: s.max_iter,
            gd_step: s.gd_step,
            gd_precondition: s.gd_precondition,
            seed: s.seed,
            random_start: s.random_start,
        }
    }
}
