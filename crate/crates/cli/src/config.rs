//! Experiment configuration: a single JSON document with strict keys,
//! dimensionless couplings and per-command run options. CLI flags override
//! file keys.

use serde::{Deserialize, Serialize};

use su2dd_core::decouple::{AverageMode, GridScheme};
use su2dd_core::hilbert::{Boundary, LatticeConfig};
use su2dd_core::model::ModelParams;
use su2dd_core::spectra::Perturbation;

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub lattice: LatticeSection,
    pub params: ParamsSection,
    pub grid: GridSection,
    pub run: RunSection,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSection {
    pub n_sites: usize,
    pub boundary: BoundaryOpt,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self {
            n_sites: 2,
            boundary: BoundaryOpt::Periodic,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryOpt {
    Open,
    Periodic,
}

impl From<BoundaryOpt> for Boundary {
    fn from(b: BoundaryOpt) -> Boundary {
        match b {
            BoundaryOpt::Open => Boundary::Open,
            BoundaryOpt::Periodic => Boundary::Periodic,
        }
    }
}

/// Couplings as ratios to the mass; the mass fixes the energy unit.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsSection {
    pub mass: f64,
    pub coupling_sq_over_2m: f64,
    pub eps_over_m: f64,
    pub gamma_over_m: [f64; 3],
    pub t_dir_over_m: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        Self {
            mass: 1.0,
            coupling_sq_over_2m: 0.9,
            eps_over_m: 1.1,
            gamma_over_m: [0.5, 1.5, 3.5],
            t_dir_over_m: 0.5,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    pub n_list: Option<Vec<usize>>,
    pub scheme: SchemeOpt,
    pub mode: ModeOpt,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            n: 10,
            n_list: None,
            scheme: SchemeOpt::Haar,
            mode: ModeOpt::PerVertex,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SchemeOpt {
    Cube,
    Haar,
}

impl From<SchemeOpt> for GridScheme {
    fn from(s: SchemeOpt) -> GridScheme {
        match s {
            SchemeOpt::Cube => GridScheme::CubeUniform,
            SchemeOpt::Haar => GridScheme::HaarExact,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub enum ModeOpt {
    #[serde(rename = "per-vertex")]
    PerVertex,
    #[serde(rename = "staggered")]
    Staggered,
}

impl From<ModeOpt> for AverageMode {
    fn from(m: ModeOpt) -> AverageMode {
        match m {
            ModeOpt::PerVertex => AverageMode::PerVertex,
            ModeOpt::Staggered => AverageMode::Staggered,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationOpt {
    None,
    Charge,
    Tunneling,
}

impl From<PerturbationOpt> for Perturbation {
    fn from(p: PerturbationOpt) -> Perturbation {
        match p {
            PerturbationOpt::None => Perturbation::None,
            PerturbationOpt::Charge => Perturbation::Charge,
            PerturbationOpt::Tunneling => Perturbation::Tunneling,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum FormatOpt {
    Csv,
    Json,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub perturbation: PerturbationOpt,
    pub seed: u64,
    pub format: FormatOpt,
    /// Output path; not embedded in output files (it is where the file
    /// goes, not part of the experiment).
    #[serde(skip_serializing)]
    pub out: Option<String>,
    /// Spectrum command: eigensolve the averaged Hamiltonian instead of the
    /// bare perturbed one.
    pub averaged: bool,
    /// Number of distinct levels reported by converge/spectrum tables.
    pub levels: usize,
    /// Fermion filling; absent means half filling.
    pub filling: Option<usize>,
    /// Drive command: period of one drive cycle.
    pub period: f64,
    /// Drive command: number of recorded periods.
    pub n_periods: usize,
    /// Drive command: grid points per axis (the staggered schedule has
    /// n^6 steps, so this stays small).
    pub drive_grid_n: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            perturbation: PerturbationOpt::Charge,
            seed: 7,
            format: FormatOpt::Csv,
            out: None,
            averaged: false,
            levels: 6,
            filling: None,
            period: 0.2,
            n_periods: 50,
            drive_grid_n: 2,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read config {path}: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("invalid config {path}: {e}")))
    }

    pub fn lattice_config(&self) -> Result<LatticeConfig, CliError> {
        LatticeConfig::new(self.lattice.n_sites, self.lattice.boundary.into())
            .map_err(CliError::from_core_validation)
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams::from_ratios(
            self.params.mass,
            self.params.coupling_sq_over_2m,
            self.params.eps_over_m,
            self.params.gamma_over_m,
            self.params.t_dir_over_m,
        )
    }

    pub fn n_list(&self) -> Vec<usize> {
        self.grid
            .n_list
            .clone()
            .unwrap_or_else(|| vec![2, 4, 6, 8, 10])
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.lattice.n_sites < 2 {
            return Err(CliError::validation("n_sites must be at least 2".into()));
        }
        if self.grid.n == 0 {
            return Err(CliError::validation("grid.n must be positive".into()));
        }
        if let Some(list) = &self.grid.n_list {
            if list.is_empty() {
                return Err(CliError::validation("n_list must not be empty".into()));
            }
            if list.contains(&0) {
                return Err(CliError::validation("n_list entries must be positive".into()));
            }
        }
        if self.run.period <= 0.0 {
            return Err(CliError::validation("run.period must be positive".into()));
        }
        if self.run.drive_grid_n == 0 {
            return Err(CliError::validation("run.drive_grid_n must be positive".into()));
        }
        for v in [
            self.params.mass,
            self.params.coupling_sq_over_2m,
            self.params.eps_over_m,
            self.params.t_dir_over_m,
        ]
        .iter()
        .chain(self.params.gamma_over_m.iter())
        {
            if !v.is_finite() {
                return Err(CliError::validation("couplings must be finite".into()));
            }
        }
        if self.params.coupling_sq_over_2m < 0.0 {
            return Err(CliError::validation(
                "coupling_sq_over_2m must be non-negative".into(),
            ));
        }
        Ok(())
    }
}
