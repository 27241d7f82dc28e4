//! Experiment configuration: JSON schema, defaults and validation.

use decycle::detection::{DetectConfig, ThresholdMode};
use decycle::models::ModelParams;
use decycle::prior::{PriorSpec, RhoMode};
use decycle::recovery::RecoverConfig;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Threshold,
    PhaseDiagram,
    DetectSim,
    RecoverSim,
    LowDeg,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    #[default]
    Wigner,
    Wishart,
}

/// Settings of the low-degree sweep over `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowDegConfig {
    #[serde(rename = "D")]
    pub d: usize,
    pub reps: usize,
    pub n_values: Vec<usize>,
    /// Aspect ratio `n/N` of the Wishart sweep; `N = ⌈n/γ⌉`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

/// Settings of the phase diagram: `grid` values of `λ` evenly spaced on `[0, lambda_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseConfig {
    pub gamma: f64,
    pub rho: f64,
    pub grid: usize,
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
}

pub fn default_lambda_max() -> f64 {
    1.0
}

impl PhaseConfig {
    pub fn lambda_grid(&self) -> Vec<f64> {
        if self.grid == 1 {
            return vec![0.0];
        }
        (0..self.grid)
            .map(|k| self.lambda_max * k as f64 / (self.grid - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ModelParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorSpec>,
    /// Aspect ratio for the threshold calculator when `params.N` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detect: Option<DetectConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recover: Option<RecoverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lowdeg: Option<LowDegConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<PhaseConfig>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

fn default_trials() -> usize {
    1
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

/// Parses a configuration; syntax and schema errors carry line and column.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    serde_json::from_str(text).map_err(|e| config_err(e.to_string()))
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        ExperimentConfig {
            mode: Some(mode),
            model: ModelKind::Wigner,
            params: None,
            prior: None,
            gamma: None,
            detect: None,
            recover: None,
            lowdeg: None,
            phase: None,
            trials: 1,
            seed: 0,
            output_path: None,
        }
    }

    pub fn mode(&self) -> Result<Mode> {
        self.mode.ok_or_else(|| config_err("missing field `mode`"))
    }

    pub fn params(&self) -> Result<ModelParams> {
        self.params
            .ok_or_else(|| config_err("missing field `params`"))
    }

    /// Aspect ratio from `gamma`, else from `params.N`.
    pub fn gamma(&self) -> Result<f64> {
        if let Some(g) = self.gamma {
            return Ok(g);
        }
        match self
            .params
            .and_then(|p| p.big_n.map(|nn| p.n as f64 / nn as f64))
        {
            Some(g) => Ok(g),
            None => Err(config_err("the aspect ratio needs `gamma` or `params.N`")),
        }
    }

    /// Fills every defaulted field so that the manifest echoes the full configuration.
    pub fn resolved(&self) -> Result<ExperimentConfig> {
        let mut c = self.clone();
        let mode = c.mode()?;
        if matches!(mode, Mode::DetectSim | Mode::RecoverSim | Mode::LowDeg) && c.prior.is_none() {
            let rho = c.params()?.rho;
            let rho_mode = if mode == Mode::LowDeg {
                RhoMode::Squared
            } else {
                RhoMode::Linear
            };
            c.prior = Some(PriorSpec {
                rho_mode,
                ..PriorSpec::rademacher(rho)
            });
        }
        Ok(c)
    }

    /// Checks the fields the mode needs.
    pub fn validate(&self) -> Result<()> {
        let mode = self.mode()?;
        if self.trials == 0 {
            return Err(config_err("trials must be at least 1"));
        }
        let check = |r: decycle::Result<()>| r.map_err(|e| config_err(e.to_string()));
        if let Some(p) = &self.params {
            check(p.validate())?;
        }
        if let Some(p) = &self.prior {
            check(p.validate())?;
        }
        let wishart = self.model == ModelKind::Wishart;
        match mode {
            Mode::Threshold => {
                self.params()?;
                let g = self.gamma()?;
                if !(g > 0.0) {
                    return Err(config_err("gamma must be positive"));
                }
            }
            Mode::PhaseDiagram => {
                let ph = self
                    .phase
                    .as_ref()
                    .ok_or_else(|| config_err("missing field `phase`"))?;
                if ph.grid == 0 {
                    return Err(config_err("the phase grid must be nonempty"));
                }
                if !(ph.gamma > 0.0) || !(0.0..=1.0).contains(&ph.rho) || !(ph.lambda_max >= 0.0) {
                    return Err(config_err(
                        "phase needs gamma > 0, rho in [0, 1] and lambda_max >= 0",
                    ));
                }
            }
            Mode::DetectSim => {
                let p = self.params()?;
                if wishart && p.big_n.is_none() {
                    return Err(config_err("the Wishart model needs `params.N`"));
                }
                let d = self
                    .detect
                    .as_ref()
                    .ok_or_else(|| config_err("missing field `detect`"))?;
                check(d.validate())?;
                if p.n < d.ell || p.big_n.is_some_and(|nn| nn < d.ell) {
                    return Err(config_err(format!(
                        "dimensions must be at least ell = {}",
                        d.ell
                    )));
                }
            }
            Mode::RecoverSim => {
                let p = self.params()?;
                if wishart && p.big_n.is_none() {
                    return Err(config_err("the Wishart model needs `params.N`"));
                }
                let r = self
                    .recover
                    .as_ref()
                    .ok_or_else(|| config_err("missing field `recover`"))?;
                check(r.validate())?;
                let min_n = if wishart { r.ell + 1 } else { r.ell + 2 };
                if p.n < min_n || p.big_n.is_some_and(|nn| wishart && nn < r.ell) {
                    return Err(config_err(format!(
                        "recovery with ell = {} needs n >= {min_n}",
                        r.ell
                    )));
                }
            }
            Mode::LowDeg => {
                self.params()?;
                let l = self
                    .lowdeg
                    .as_ref()
                    .ok_or_else(|| config_err("missing field `lowdeg`"))?;
                if l.n_values.is_empty() || l.n_values.contains(&0) {
                    return Err(config_err("lowdeg.n_values must be nonempty and positive"));
                }
                if l.reps < decycle::lowdeg::MIN_REPS {
                    return Err(config_err(format!(
                        "lowdeg.reps must be at least {}",
                        decycle::lowdeg::MIN_REPS
                    )));
                }
                if wishart && !l.gamma.is_some_and(|g| g > 0.0) {
                    return Err(config_err(
                        "the Wishart sweep needs a positive lowdeg.gamma",
                    ));
                }
                if wishart && l.d > decycle::lowdeg::MAX_PHI_DEGREE {
                    return Err(config_err(format!(
                        "lowdeg.D must be at most {}",
                        decycle::lowdeg::MAX_PHI_DEGREE
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether the detection threshold needs null calibration draws.
    pub fn needs_calibration(&self) -> bool {
        matches!(
            self.detect.map(|d| d.threshold_mode),
            Some(ThresholdMode::EmpiricalNull { .. })
        )
    }
}
