//! Execution of each experiment mode.
//!
//! # Seeds
//!
//! Trial `i` of hypothesis `h` draws its data from
//! `derive_seed(derive_seed(seed, h), i)` and its colorings from
//! `derive_seed(data_seed, COLORING_STREAM)`. Trials run in parallel and are
//! collected in index order, so outputs do not depend on the thread count.

use std::path::Path;
use std::time::Instant;

use decycle::baselines::{cca_condition, cca_condition_value, pls_threshold};
use decycle::detection::{
    decide, detect_stat_wigner, detect_stat_wishart, null_samples_wigner, null_samples_wishart,
    threshold, DetectConfig, StatisticReport, ThresholdMode,
};
use decycle::graphfam::{a_plus, critical_mu, f_threshold, Method};
use decycle::lowdeg::{adv_wigner_mc, adv_wishart_mc};
use decycle::models::{
    sample_null_wigner, sample_null_wishart, sample_wigner_pair, sample_wishart_pair, ModelParams,
};
use decycle::prior::PriorSpec;
use decycle::recovery::{
    assemble_estimate, mean_signed_score, overlap, recovery_scores_wigner, recovery_scores_wishart,
    score_records, RecoverConfig, ScoreRow,
};
use decycle::rng::derive_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Mode, ModelKind, PhaseConfig};
use crate::error::{HarnessError, Result};
use crate::output::{commit, finite_or_empty, input_hash, to_csv, Outputs, RunManifest, TrialSeed};
use crate::stats::auc;

/// Stream of planted draws in [`DetectSim`](Mode::DetectSim) and [`RecoverSim`](Mode::RecoverSim).
pub const HYPOTHESIS_P: u64 = 1;
/// Stream of null draws in [`DetectSim`](Mode::DetectSim).
pub const HYPOTHESIS_Q: u64 = 2;
/// Stream of the null calibration draws.
pub const CALIBRATION_STREAM: u64 = 3;
/// Stream of the low-degree replicas.
pub const LOWDEG_STREAM: u64 = 4;
/// Offset from a trial's data seed to its coloring seed.
pub const COLORING_STREAM: u64 = 99;

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn trial_seed(seed: u64, hypothesis: u64, trial: usize) -> u64 {
    derive_seed(derive_seed(seed, hypothesis), trial as u64)
}

/// Quantities printed by the threshold calculator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
    pub gamma: f64,
    #[serde(rename = "F")]
    pub f: Option<f64>,
    pub a_plus: f64,
    pub pls_tau: Option<f64>,
    pub pls_success: bool,
    pub cca_value: f64,
    pub cca_success: bool,
    pub verdict: String,
}

impl ThresholdRow {
    pub fn summary(&self) -> String {
        let show = |v: Option<f64>| v.map_or("inf".to_string(), |v| format!("{v:.4}"));
        format!(
            "F={} A+={:.4} PLS tau={} CCA={:.4} verdict \"{}\"",
            show(self.f),
            self.a_plus,
            show(self.pls_tau),
            self.cca_value,
            self.verdict
        )
    }
}

pub fn threshold_row(lambda: f64, mu: f64, rho: f64, gamma: f64) -> Result<ThresholdRow> {
    let f = f_threshold(lambda, mu, rho, gamma)?;
    let tau = pls_threshold(lambda, mu, rho);
    let verdict = if f > 1.0 {
        "above threshold"
    } else {
        "below threshold"
    };
    Ok(ThresholdRow {
        lambda,
        mu,
        rho,
        gamma,
        f: finite_or_empty(f),
        a_plus: a_plus(lambda, mu, rho),
        pls_tau: finite_or_empty(tau),
        pls_success: tau <= gamma,
        cca_value: cca_condition_value(lambda, mu, rho, gamma),
        cca_success: cca_condition(lambda, mu, rho, gamma),
        verdict: verdict.to_string(),
    })
}

/// One point of the phase diagram; `None` encodes `+∞`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseRow {
    pub lambda: f64,
    pub mu_crit_subgraph: Option<f64>,
    pub mu_crit_pls: Option<f64>,
    pub mu_crit_cca: Option<f64>,
}

pub fn phase_diagram(gamma: f64, rho: f64, lambdas: &[f64]) -> Vec<PhaseRow> {
    lambdas
        .iter()
        .map(|&lambda| PhaseRow {
            lambda,
            mu_crit_subgraph: finite_or_empty(critical_mu(lambda, rho, gamma, Method::Subgraph)),
            mu_crit_pls: finite_or_empty(critical_mu(lambda, rho, gamma, Method::Pls)),
            mu_crit_cca: finite_or_empty(critical_mu(lambda, rho, gamma, Method::Cca)),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectRow {
    pub trial: usize,
    pub hypothesis: String,
    pub seed: u64,
    pub value: f64,
    pub threshold: f64,
    pub decision: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectSummary {
    pub trials: usize,
    pub type_i_error: f64,
    pub type_ii_error: f64,
    pub auc: f64,
    pub mean_p: f64,
    pub mean_q: f64,
    pub mean_p_analytic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoverRow {
    pub trial: usize,
    pub seed: u64,
    pub pivot: usize,
    pub overlap: f64,
    pub mean_product: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoverSummary {
    pub trials: usize,
    pub mean_overlap: f64,
    pub mean_product: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowDegRow {
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
    pub estimate: f64,
    pub stderr: f64,
}

/// Files and manifest produced by one run.
#[derive(Debug)]
pub struct RunOutput {
    pub outputs: Outputs,
    pub manifest: RunManifest,
    /// Human-readable lines for standard output.
    pub report: Vec<String>,
}

struct ModeOutput {
    outputs: Outputs,
    seeds: Vec<TrialSeed>,
    report: Vec<String>,
}

/// Validates `config`, runs its mode and returns the outputs in memory.
pub fn execute(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let config = config.resolved()?;
    let start = Instant::now();
    let mode_out = match config.mode()? {
        Mode::Threshold => run_threshold(&config)?,
        Mode::PhaseDiagram => run_phase(&config)?,
        Mode::DetectSim => run_detect(&config)?,
        Mode::RecoverSim => run_recover(&config)?,
        Mode::LowDeg => run_lowdeg(&config)?,
    };
    let mut outputs = mode_out.outputs;
    let mut names: Vec<String> = outputs.files.iter().map(|(n, _)| n.clone()).collect();
    names.push(MANIFEST_FILE.to_string());
    let manifest = RunManifest {
        input_hash: input_hash(&config)?,
        config,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        trial_seeds: mode_out.seeds,
        outputs: names,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let json =
        serde_json::to_vec_pretty(&manifest).map_err(|e| HarnessError::Config(e.to_string()))?;
    outputs.add(MANIFEST_FILE, json);
    Ok(RunOutput {
        outputs,
        manifest,
        report: mode_out.report,
    })
}

/// Runs `config` and writes its files into `dir`. Nothing is left in `dir`
/// when the run fails.
pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<RunOutput> {
    let out = execute(config)?;
    commit(dir, &out.outputs)?;
    Ok(out)
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    serde_json::to_vec_pretty(value).map_err(|e| HarnessError::Config(e.to_string()))
}

fn run_threshold(config: &ExperimentConfig) -> Result<ModeOutput> {
    let p = config.params()?;
    let row = threshold_row(p.lambda, p.mu, p.rho, config.gamma()?)?;
    let mut outputs = Outputs::default();
    outputs.add("threshold.csv", to_csv(std::slice::from_ref(&row))?);
    Ok(ModeOutput {
        outputs,
        seeds: Vec::new(),
        report: vec![row.summary()],
    })
}

fn run_phase(config: &ExperimentConfig) -> Result<ModeOutput> {
    let ph: &PhaseConfig = config
        .phase
        .as_ref()
        .ok_or_else(|| HarnessError::Config("missing field `phase`".into()))?;
    let rows = phase_diagram(ph.gamma, ph.rho, &ph.lambda_grid());
    let mut outputs = Outputs::default();
    outputs.add("phase_diagram.csv", to_csv(&rows)?);
    let report = vec![format!("{} grid points written", rows.len())];
    Ok(ModeOutput {
        outputs,
        seeds: Vec::new(),
        report,
    })
}

fn statistic(
    config: &ExperimentConfig,
    p: &ModelParams,
    prior: &PriorSpec,
    cfg: &DetectConfig,
    planted: bool,
    seed: u64,
) -> decycle::Result<StatisticReport> {
    let local = DetectConfig {
        seed: derive_seed(seed, COLORING_STREAM),
        ..*cfg
    };
    match config.model {
        ModelKind::Wigner => {
            let pair = if planted {
                sample_wigner_pair(p, prior, seed)?
            } else {
                sample_null_wigner(p.n, seed)?
            };
            detect_stat_wigner(&pair, p.lambda, p.mu, p.rho, &local)
        }
        ModelKind::Wishart => {
            let big_n = p.big_n.unwrap_or(p.n);
            let pair = if planted {
                sample_wishart_pair(p, prior, seed)?
            } else {
                sample_null_wishart(p.n, big_n, seed)?
            };
            detect_stat_wishart(&pair, p.lambda, p.mu, p.rho, &local)
        }
    }
}

fn run_detect(config: &ExperimentConfig) -> Result<ModeOutput> {
    let p = config.params()?;
    let prior = config.prior.expect("resolved config has a prior");
    let cfg = config.detect.expect("validated config has detect settings");
    let calibration = match cfg.threshold_mode {
        ThresholdMode::EmpiricalNull { reps, .. } => {
            let cal = DetectConfig {
                seed: derive_seed(config.seed, CALIBRATION_STREAM),
                ..cfg
            };
            Some(match config.model {
                ModelKind::Wigner => null_samples_wigner(p.n, p.lambda, p.mu, p.rho, &cal, reps)?,
                ModelKind::Wishart => null_samples_wishart(
                    p.n,
                    p.big_n.unwrap_or(p.n),
                    p.lambda,
                    p.mu,
                    p.rho,
                    &cal,
                    reps,
                )?,
            })
        }
        ThresholdMode::Analytic => None,
    };
    let jobs: Vec<(u64, usize)> = [HYPOTHESIS_P, HYPOTHESIS_Q]
        .iter()
        .flat_map(|&h| (0..config.trials).map(move |i| (h, i)))
        .collect();
    let reports: Vec<(u64, usize, u64, StatisticReport)> = jobs
        .par_iter()
        .map(|&(h, i)| {
            let seed = trial_seed(config.seed, h, i);
            statistic(config, &p, &prior, &cfg, h == HYPOTHESIS_P, seed).map(|r| (h, i, seed, r))
        })
        .collect::<decycle::Result<_>>()?;

    let mut rows = Vec::with_capacity(reports.len());
    let mut seeds = Vec::with_capacity(reports.len());
    let mut analytic_mean = 0.0;
    for (h, i, seed, report) in &reports {
        let tau = threshold(report, &cfg, calibration.as_deref())?;
        let decision = decide(report, &cfg, calibration.as_deref())?;
        let label = if *h == HYPOTHESIS_P { "P" } else { "Q" };
        analytic_mean = report.mean_p_analytic;
        rows.push(DetectRow {
            trial: *i,
            hypothesis: label.to_string(),
            seed: *seed,
            value: report.value,
            threshold: tau,
            decision,
        });
        seeds.push(TrialSeed {
            trial: *i,
            label: label.to_string(),
            seed: *seed,
        });
    }
    let values = |label: &str| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.hypothesis == label)
            .map(|r| r.value)
            .collect()
    };
    let rate = |label: &str, decision: bool| {
        rows.iter()
            .filter(|r| r.hypothesis == label && r.decision == decision)
            .count() as f64
            / config.trials as f64
    };
    let (vp, vq) = (values("P"), values("Q"));
    let summary = DetectSummary {
        trials: config.trials,
        type_i_error: rate("Q", true),
        type_ii_error: rate("P", false),
        auc: auc(&vp, &vq),
        mean_p: mean(&vp),
        mean_q: mean(&vq),
        mean_p_analytic: analytic_mean,
    };
    let report = vec![format!(
        "type I error {:.4}, type II error {:.4}, AUC {:.4}",
        summary.type_i_error, summary.type_ii_error, summary.auc
    )];
    let mut outputs = Outputs::default();
    outputs.add("detect.csv", to_csv(&rows)?);
    outputs.add("detect_summary.json", json_bytes(&summary)?);
    Ok(ModeOutput {
        outputs,
        seeds,
        report,
    })
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn recover_trial(
    config: &ExperimentConfig,
    p: &ModelParams,
    prior: &PriorSpec,
    cfg: &RecoverConfig,
    seed: u64,
) -> decycle::Result<(ScoreRow, Vec<f64>)> {
    let local = RecoverConfig {
        seed: derive_seed(seed, COLORING_STREAM),
        ..*cfg
    };
    let (row, spikes) = match config.model {
        ModelKind::Wigner => {
            let pair = sample_wigner_pair(p, prior, seed)?;
            (
                recovery_scores_wigner(&pair, p.lambda, p.mu, p.rho, &local)?,
                pair.spikes,
            )
        }
        ModelKind::Wishart => {
            let pair = sample_wishart_pair(p, prior, seed)?;
            (
                recovery_scores_wishart(&pair, p.lambda, p.mu, p.rho, &local)?,
                pair.spikes,
            )
        }
    };
    let x = spikes.expect("planted draws carry their spikes").x;
    Ok((row, x))
}

fn run_recover(config: &ExperimentConfig) -> Result<ModeOutput> {
    let p = config.params()?;
    let prior = config.prior.expect("resolved config has a prior");
    let cfg = config
        .recover
        .expect("validated config has recover settings");
    let trials: Vec<(usize, u64, ScoreRow, Vec<f64>)> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(config.seed, HYPOTHESIS_P, i);
            recover_trial(config, &p, &prior, &cfg, seed).map(|(row, x)| (i, seed, row, x))
        })
        .collect::<decycle::Result<_>>()?;

    let mut rows = Vec::with_capacity(trials.len());
    let mut seeds = Vec::with_capacity(trials.len());
    for (i, seed, row, x) in &trials {
        rows.push(RecoverRow {
            trial: *i,
            seed: *seed,
            pivot: row.pivot,
            overlap: overlap(&assemble_estimate(row, &cfg), x),
            mean_product: mean_signed_score(row, x),
        });
        seeds.push(TrialSeed {
            trial: *i,
            label: "P".to_string(),
            seed: *seed,
        });
    }
    let summary = RecoverSummary {
        trials: config.trials,
        mean_overlap: mean(&rows.iter().map(|r| r.overlap).collect::<Vec<_>>()),
        mean_product: mean(&rows.iter().map(|r| r.mean_product).collect::<Vec<_>>()),
    };
    let (_, _, first_row, first_x) = &trials[0];
    let records = score_records(first_row, &cfg, Some(first_x));
    let report = vec![format!(
        "mean overlap {:.4}, mean score product {:.4}",
        summary.mean_overlap, summary.mean_product
    )];
    let mut outputs = Outputs::default();
    outputs.add("recover.csv", to_csv(&rows)?);
    outputs.add("scores.csv", to_csv(&records)?);
    outputs.add("recover_summary.json", json_bytes(&summary)?);
    Ok(ModeOutput {
        outputs,
        seeds,
        report,
    })
}

fn run_lowdeg(config: &ExperimentConfig) -> Result<ModeOutput> {
    let p = config.params()?;
    let prior = config.prior.expect("resolved config has a prior");
    let ld = config
        .lowdeg
        .clone()
        .expect("validated config has lowdeg settings");
    let mut rows = Vec::with_capacity(ld.n_values.len());
    let mut seeds = Vec::with_capacity(ld.n_values.len());
    for (i, &n) in ld.n_values.iter().enumerate() {
        let seed = trial_seed(config.seed, LOWDEG_STREAM, i);
        let est = match config.model {
            ModelKind::Wigner => adv_wigner_mc(&prior, p.lambda, p.mu, n, ld.d, ld.reps, seed)?,
            ModelKind::Wishart => {
                let gamma = ld.gamma.expect("validated Wishart sweep has gamma");
                let big_n = (n as f64 / gamma).ceil() as usize;
                adv_wishart_mc(&prior, p.lambda, p.mu, n, big_n, ld.d, ld.reps, seed)?
            }
        };
        rows.push(LowDegRow {
            n,
            d: ld.d,
            lambda: p.lambda,
            mu: p.mu,
            rho: p.rho,
            estimate: est.value,
            stderr: est.std_error,
        });
        seeds.push(TrialSeed {
            trial: i,
            label: format!("n={n}"),
            seed,
        });
    }
    let report = rows
        .iter()
        .map(|r| format!("n={} estimate {:.4} ± {:.4}", r.n, r.estimate, r.stderr))
        .collect();
    let mut outputs = Outputs::default();
    outputs.add("lowdeg.csv", to_csv(&rows)?);
    Ok(ModeOutput {
        outputs,
        seeds,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_example() {
        let row = threshold_row(0.9, 0.9, 0.9, 1.0).unwrap();
        assert!((row.f.unwrap() - 1.5509).abs() < 5e-5, "{:?}", row.f);
        assert!((row.a_plus - 1.4661).abs() < 5e-5, "{}", row.a_plus);
        assert_eq!(row.verdict, "above threshold");
        assert!(row.summary().contains("F=1.5509"));
    }

    #[test]
    fn phase_rows_encode_infinity_as_none() {
        let rows = phase_diagram(0.25, 0.0, &[0.0]);
        assert_eq!(rows[0].mu_crit_cca, None);
    }

    #[test]
    fn subgraph_curve_vanishes_past_the_spectral_line() {
        let rows = phase_diagram(0.25, 0.99, &[0.6, 0.75]);
        assert!(rows.iter().all(|r| r.mu_crit_subgraph == Some(0.0)));
    }
}
