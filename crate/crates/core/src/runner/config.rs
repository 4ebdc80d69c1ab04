use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::entropy::{WrePath, DEFAULT_WRE_FAST_CAP};
use crate::error::{Error, Result};
use crate::evolve::default_time_grid;
use crate::exec::Exec;
use crate::models::DEFAULT_JZ;

/// Target Hamiltonian of the second evolution stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// XXZ at strong disorder (localized).
    I,
    /// Diagonal LIOM phenomenological model.
    II,
    /// XXZ at weak disorder with fields independent of the preparation ones.
    III,
}

impl Case {
    pub fn default_w(self) -> Option<f64> {
        match self {
            Case::I => Some(8.0),
            Case::II => None,
            Case::III => Some(0.5),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
        }
    }
}

impl std::str::FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "1" => Ok(Case::I),
            "II" | "2" => Ok(Case::II),
            "III" | "3" => Ok(Case::III),
            _ => Err(Error::InvalidInput(format!("unknown case {s:?}, expected I, II or III"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateKind {
    #[default]
    #[serde(alias = "zrand")]
    RandomZHalfFilled,
    #[serde(alias = "xy")]
    XyAlternating,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Predict {
    #[default]
    None,
    Gge,
    Scrooge,
    Both,
}

impl Predict {
    pub fn gge(self) -> bool {
        self != Predict::None
    }

    pub fn scrooge(self) -> bool {
        matches!(self, Predict::Scrooge | Predict::Both)
    }
}

/// Phenomenological-model sampling parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhenoParams {
    pub j0: f64,
    pub xi: f64,
    pub g0: f64,
}

impl Default for PhenoParams {
    fn default() -> Self {
        Self { j0: 1.0, xi: 1.0, g0: 0.0 }
    }
}

/// Single saturation time used for `S(inf)`.
pub const SATURATION_TIME: f64 = 1e12;

/// Averaged alternative to [`SATURATION_TIME`].
pub fn averaged_saturation_times() -> Vec<f64> {
    vec![1.0e12, 1.2e12, 1.5e12]
}

/// The 41 preparation times of the structured-state sweep.
pub fn default_t0_grid() -> Vec<f64> {
    vec![
        0.0, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0, 1.125, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0, 3.3,
        3.6, 3.9, 4.2, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5, 8.0, 8.5, 9.0, 9.5, 10.0, 11.0, 12.2, 13.7, 15.7,
        19.0, 24.0, 32.0, 500.0,
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub case: Case,
    #[serde(rename = "L")]
    pub n_sites: usize,
    /// Target disorder strength; `None` picks 8 for case I and 0.5 for case III.
    #[serde(rename = "W_target")]
    pub w_target: Option<f64>,
    /// Disorder strength of the thermal preparation Hamiltonian.
    #[serde(rename = "W_prep")]
    pub w_prep: f64,
    #[serde(rename = "Jz")]
    pub jz: f64,
    #[serde(rename = "T0_grid")]
    pub t0_grid: Vec<f64>,
    pub time_grid: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
    pub initial_state_kind: InitialStateKind,
    pub wre_path: WrePath,
    pub wre_fast_cap: usize,
    pub n_list: Vec<usize>,
    pub output_dir: PathBuf,
    pub predict: Predict,
    pub scrooge_samples: usize,
    pub saturation_times: Vec<f64>,
    pub pheno: PhenoParams,
    pub eigen_cache_dir: Option<PathBuf>,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            case: Case::I,
            n_sites: 10,
            w_target: None,
            w_prep: 0.5,
            jz: DEFAULT_JZ,
            t0_grid: default_t0_grid(),
            time_grid: default_time_grid(),
            realizations: 1,
            seed: 2025,
            initial_state_kind: InitialStateKind::RandomZHalfFilled,
            wre_path: WrePath::Naive,
            wre_fast_cap: DEFAULT_WRE_FAST_CAP,
            n_list: vec![2, 3, 4],
            output_dir: PathBuf::from("out"),
            predict: Predict::None,
            scrooge_samples: 200,
            saturation_times: vec![SATURATION_TIME],
            pheno: PhenoParams::default(),
            eigen_cache_dir: None,
            exec: Exec::default(),
        }
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput(format!("{name} is empty")));
    }
    if grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidInput(format!("{name} must contain finite non-negative times")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn target_w(&self) -> Option<f64> {
        self.w_target.or(self.case.default_w())
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.n_sites;
        if !(2..=16).contains(&l) || !l.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("L must be even and in 2..=16, got {l}")));
        }
        check_grid("T0 grid", &self.t0_grid)?;
        check_grid("time grid", &self.time_grid)?;
        check_grid("saturation times", &self.saturation_times)?;
        if !self.time_grid.windows(2).all(|w| w[0] <= w[1]) {
            return Err(Error::InvalidInput("time grid must be ascending".into()));
        }
        if self.realizations == 0 {
            return Err(Error::InvalidInput("need at least one realization".into()));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n == 0 || n > l) {
            return Err(Error::InvalidInput(format!("nQEE window {n} outside 1..={l}")));
        }
        if matches!(self.wre_path, WrePath::Fast | WrePath::Both) && l > self.wre_fast_cap {
            return Err(Error::InvalidInput(format!(
                "doubled-state WRE is capped at L = {}; use --wre naive for L = {l}",
                self.wre_fast_cap
            )));
        }
        if self.case != Case::II && !self.target_w().is_some_and(|w| w >= 0.0) {
            return Err(Error::InvalidInput("target disorder strength must be >= 0".into()));
        }
        if !(self.w_prep >= 0.0) {
            return Err(Error::InvalidInput("preparation disorder strength must be >= 0".into()));
        }
        if self.predict.scrooge() && self.scrooge_samples < 2 {
            return Err(Error::InvalidInput("Scrooge prediction needs at least 2 samples".into()));
        }
        if self.predict.scrooge() && self.wre_path == WrePath::None {
            return Err(Error::InvalidInput("Scrooge prediction needs WRE evaluation".into()));
        }
        let p = self.pheno;
        if !(p.j0 > 0.0 && p.xi > 0.0 && p.g0 >= 0.0) {
            return Err(Error::InvalidInput("phenomenological model needs J0 > 0, xi > 0, g0 >= 0".into()));
        }
        Ok(())
    }
}
