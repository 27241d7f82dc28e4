//! Detection statistics built from colorful decorated-cycle sums, their
//! exact counterparts for small instances, and the test decision.

use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{
    brute_force_sum, colorful_probability, coloring_batch, dp_bipartite_cycle_sum, dp_cycle_sum,
    weighted_bipartite_cycle_sum, weighted_cycle_sum, Coloring, Weights,
};
use crate::error::{domain, Error, Result};
use crate::graphfam::{beta_fast, class_weight, enumerate_family, FamilyTag};
use crate::models::{sample_null_wigner, sample_null_wishart, WignerPair, WishartPair};
use crate::rng::{derive_seed, STREAM_NULL_CALIBRATION};

/// How the rejection threshold is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum ThresholdMode {
    /// `τ = c · E_P[statistic]` with the analytic planted mean.
    Analytic,
    /// `τ` is the `q`-quantile of `reps` statistics computed on null draws.
    EmpiricalNull { q: f64, reps: usize },
}

/// Evaluation route for the weighted class sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kernel {
    /// One weighted dynamic program per coloring covering every class.
    #[default]
    Aggregated,
    /// One dynamic program per (coloring, class); fills `per_class`.
    PerClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectConfig {
    pub ell: usize,
    /// Number of random colorings.
    pub t: usize,
    /// Fraction of the planted mean used by the analytic threshold.
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_threshold_mode")]
    pub threshold_mode: ThresholdMode,
    #[serde(default)]
    pub kernel: Kernel,
    /// Average over every coloring of the palette instead of `t` random ones.
    #[serde(default)]
    pub exhaustive: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_c() -> f64 {
    0.5
}

fn default_threshold_mode() -> ThresholdMode {
    ThresholdMode::EmpiricalNull { q: 0.95, reps: 200 }
}

/// Largest default number of colorings.
pub const MAX_DEFAULT_COLORINGS: usize = 500;

/// `min(⌈1/r⌉, 500)` for a palette of `palette` colors on `palette` vertices.
pub fn default_colorings(palette: usize) -> usize {
    let inv = (1.0 / colorful_probability(palette, palette)).ceil();
    if inv.is_finite() && inv < MAX_DEFAULT_COLORINGS as f64 {
        inv as usize
    } else {
        MAX_DEFAULT_COLORINGS
    }
}

impl DetectConfig {
    /// Defaults for the Wigner statistic: palette `ℓ`, `c = 0.5`, empirical threshold.
    pub fn wigner(ell: usize, seed: u64) -> Self {
        Self::with_palette(ell, ell, seed)
    }

    /// Defaults for the Wishart statistic: palette `2ℓ`.
    pub fn wishart(ell: usize, seed: u64) -> Self {
        Self::with_palette(ell, 2 * ell, seed)
    }

    fn with_palette(ell: usize, palette: usize, seed: u64) -> Self {
        DetectConfig {
            ell,
            t: default_colorings(palette),
            c: default_c(),
            threshold_mode: default_threshold_mode(),
            kernel: Kernel::Aggregated,
            exhaustive: false,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c < 1.0) {
            return domain(format!("c = {} must lie in (0, 1)", self.c));
        }
        if self.t == 0 {
            return domain("at least one coloring is required");
        }
        if let ThresholdMode::EmpiricalNull { q, reps } = self.threshold_mode {
            if !(q > 0.0 && q < 1.0) || reps == 0 {
                return domain("the empirical threshold needs q in (0, 1) and reps >= 1");
            }
        }
        Ok(())
    }
}

/// Contribution of one class to a statistic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassContribution {
    pub word: String,
    /// Unbiased estimate `(1/(t·r)) Σ_k` of the class sum over all embeddings.
    pub estimate: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatisticReport {
    pub value: f64,
    /// The `β` of the family.
    pub normalizer: f64,
    pub per_class: Vec<ClassContribution>,
    /// Analytic planted mean of the statistic.
    pub mean_p_analytic: f64,
    pub decision: Option<bool>,
}

fn finite_report(report: StatisticReport) -> Result<StatisticReport> {
    if report.value.is_finite() {
        Ok(report)
    } else {
        Err(Error::Domain(format!(
            "statistic is not finite ({})",
            report.value
        )))
    }
}

/// Averages `per_coloring` over the configured colorings and returns the
/// weighted estimate together with the per-class estimates.
fn colored_average<F>(
    cfg: &DetectConfig,
    vertices: usize,
    palette: usize,
    classes: usize,
    per_coloring: F,
) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&Coloring) -> Result<(f64, Vec<f64>)> + Sync + Send,
{
    let batch = coloring_batch(vertices, palette, cfg.t, cfg.exhaustive, cfg.seed)?;
    let parts: Vec<(f64, Vec<f64>)> = batch.par_iter().map(&per_coloring).collect::<Result<_>>()?;
    let scale = 1.0 / (parts.len() as f64 * colorful_probability(palette, palette));
    let mut total = 0.0;
    let mut per_class = vec![0.0; classes];
    for (v, pc) in &parts {
        total += v;
        per_class.iter_mut().zip(pc).for_each(|(a, b)| *a += b);
    }
    per_class.iter_mut().for_each(|v| *v *= scale);
    Ok((total * scale, per_class))
}

fn check_parameters(lambda: f64, mu: f64, rho: f64) -> Result<()> {
    if !(lambda >= 0.0 && mu >= 0.0 && (0.0..=1.0).contains(&rho)) {
        return domain("need lambda, mu >= 0 and rho in [0, 1]");
    }
    Ok(())
}

/// `f̃_H = (n^ℓ β_H)^{−1/2} Σ_{[H]∈H(ℓ)} Ξ(H) (1/(t·r)) Σ_k 𝔉_H(X, Y, τ_k)`.
pub fn detect_stat_wigner(
    pair: &WignerPair,
    lambda: f64,
    mu: f64,
    rho: f64,
    cfg: &DetectConfig,
) -> Result<StatisticReport> {
    cfg.validate()?;
    check_parameters(lambda, mu, rho)?;
    let n = pair.x.nrows();
    let ell = cfg.ell;
    if n < ell {
        return domain(format!("n = {n} is smaller than ell = {ell}"));
    }
    let table = enumerate_family(FamilyTag::H, ell)?;
    let beta = beta_fast(FamilyTag::H, ell, lambda, mu, rho)?;
    let w = Weights { lambda, mu, rho };
    let (x, y) = (pair.x.view(), pair.y.view());
    let weights: Vec<f64> = table
        .classes
        .iter()
        .map(|h| class_weight(h, lambda, mu, rho))
        .collect();
    let (sum, per_class) = match cfg.kernel {
        Kernel::Aggregated => colored_average(cfg, n, ell, 0, |c| {
            Ok((weighted_cycle_sum(x, y, w, ell, c)?, Vec::new()))
        })?,
        Kernel::PerClass => colored_average(cfg, n, ell, table.classes.len(), |c| {
            let sums: Vec<f64> = table
                .classes
                .iter()
                .map(|h| dp_cycle_sum(x, y, h, c))
                .collect::<Result<_>>()?;
            Ok((sums.iter().zip(&weights).map(|(s, w)| s * w).sum(), sums))
        })?,
    };
    let per_class = contributions(&table.classes, &weights, &per_class);
    finite_report(StatisticReport {
        value: sum / ((n as f64).powi(ell as i32) * beta).sqrt(),
        normalizer: beta,
        per_class,
        mean_p_analytic: beta.sqrt(),
        decision: None,
    })
}

/// `h̃_G = (n^ℓ N^ℓ β_G)^{−1/2} Σ_{[H]∈G(ℓ)} Υ(H) (1/(t·r)) Σ_k 𝔊_H(X, Y, τ_k)`
/// with palette `2ℓ`.
pub fn detect_stat_wishart(
    pair: &WishartPair,
    lambda: f64,
    mu: f64,
    rho: f64,
    cfg: &DetectConfig,
) -> Result<StatisticReport> {
    cfg.validate()?;
    check_parameters(lambda, mu, rho)?;
    let (n, big_n) = pair.x.dim();
    let ell = cfg.ell;
    if n < ell || big_n < ell {
        return domain(format!(
            "n = {n} and N = {big_n} must both be at least ell = {ell}"
        ));
    }
    let table = enumerate_family(FamilyTag::G, ell)?;
    let beta = beta_fast(FamilyTag::G, ell, lambda, mu, rho)?;
    let w = Weights { lambda, mu, rho };
    let (x, y) = (pair.x.view(), pair.y.view());
    let weights: Vec<f64> = table
        .classes
        .iter()
        .map(|h| class_weight(h, lambda, mu, rho))
        .collect();
    let (sum, per_class) = match cfg.kernel {
        Kernel::Aggregated => colored_average(cfg, n + big_n, 2 * ell, 0, |c| {
            Ok((weighted_bipartite_cycle_sum(x, y, w, ell, c)?, Vec::new()))
        })?,
        Kernel::PerClass => colored_average(cfg, n + big_n, 2 * ell, table.classes.len(), |c| {
            let sums: Vec<f64> = table
                .classes
                .iter()
                .map(|h| dp_bipartite_cycle_sum(x, y, h, c))
                .collect::<Result<_>>()?;
            Ok((sums.iter().zip(&weights).map(|(s, w)| s * w).sum(), sums))
        })?,
    };
    let per_class = contributions(&table.classes, &weights, &per_class);
    let gamma = n as f64 / big_n as f64;
    let scale = ((n as f64).powi(ell as i32) * (big_n as f64).powi(ell as i32) * beta).sqrt();
    finite_report(StatisticReport {
        value: sum / scale,
        normalizer: beta,
        per_class,
        mean_p_analytic: (gamma.powi(-(ell as i32)) * beta).sqrt(),
        decision: None,
    })
}

fn contributions(
    classes: &[crate::graphfam::DecoratedClass],
    weights: &[f64],
    estimates: &[f64],
) -> Vec<ClassContribution> {
    estimates
        .iter()
        .zip(classes)
        .zip(weights)
        .map(|((&estimate, h), &weight)| ClassContribution {
            word: h.canonical_word.to_string(),
            estimate,
            weight,
        })
        .collect()
}

fn exact_sum(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    tag: FamilyTag,
    ell: usize,
    lambda: f64,
    mu: f64,
    rho: f64,
) -> Result<(f64, Vec<ClassContribution>)> {
    let table = enumerate_family(tag, ell)?;
    let mut total = 0.0;
    let mut per_class = Vec::with_capacity(table.classes.len());
    for h in &table.classes {
        let weight = class_weight(h, lambda, mu, rho);
        let estimate = brute_force_sum(x, y, h, None, None)?;
        total += weight * estimate;
        per_class.push(ClassContribution {
            word: h.canonical_word.to_string(),
            estimate,
            weight,
        });
    }
    Ok((total, per_class))
}

/// The statistic `f_H` summed over every embedding by exhaustive search.
pub fn exact_stat_wigner(
    pair: &WignerPair,
    lambda: f64,
    mu: f64,
    rho: f64,
    ell: usize,
) -> Result<StatisticReport> {
    check_parameters(lambda, mu, rho)?;
    let n = pair.x.nrows();
    let beta = beta_fast(FamilyTag::H, ell, lambda, mu, rho)?;
    let (sum, per_class) = exact_sum(
        pair.x.view(),
        pair.y.view(),
        FamilyTag::H,
        ell,
        lambda,
        mu,
        rho,
    )?;
    finite_report(StatisticReport {
        value: sum / ((n as f64).powi(ell as i32) * beta).sqrt(),
        normalizer: beta,
        per_class,
        mean_p_analytic: beta.sqrt(),
        decision: None,
    })
}

/// The statistic `h_G` summed over every embedding by exhaustive search.
pub fn exact_stat_wishart(
    pair: &WishartPair,
    lambda: f64,
    mu: f64,
    rho: f64,
    ell: usize,
) -> Result<StatisticReport> {
    check_parameters(lambda, mu, rho)?;
    let (n, big_n) = pair.x.dim();
    let beta = beta_fast(FamilyTag::G, ell, lambda, mu, rho)?;
    let (sum, per_class) = exact_sum(
        pair.x.view(),
        pair.y.view(),
        FamilyTag::G,
        ell,
        lambda,
        mu,
        rho,
    )?;
    let gamma = n as f64 / big_n as f64;
    let scale = ((n as f64).powi(ell as i32) * (big_n as f64).powi(ell as i32) * beta).sqrt();
    finite_report(StatisticReport {
        value: sum / scale,
        normalizer: beta,
        per_class,
        mean_p_analytic: (gamma.powi(-(ell as i32)) * beta).sqrt(),
        decision: None,
    })
}

/// Order statistic `x_(⌈q·m⌉)` of `m` samples.
pub fn empirical_quantile(samples: &[f64], q: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::MissingCalibration);
    }
    if !(0.0..=1.0).contains(&q) {
        return domain(format!("quantile level {q} outside [0, 1]"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    Ok(sorted[idx])
}

/// Rejection threshold for the configured mode.
pub fn threshold(
    report: &StatisticReport,
    cfg: &DetectConfig,
    null_calibration: Option<&[f64]>,
) -> Result<f64> {
    match cfg.threshold_mode {
        ThresholdMode::Analytic => Ok(cfg.c * report.mean_p_analytic),
        ThresholdMode::EmpiricalNull { q, .. } => {
            empirical_quantile(null_calibration.ok_or(Error::MissingCalibration)?, q)
        }
    }
}

/// Declares the planted model when the statistic reaches the threshold.
pub fn decide(
    report: &StatisticReport,
    cfg: &DetectConfig,
    null_calibration: Option<&[f64]>,
) -> Result<bool> {
    Ok(report.value >= threshold(report, cfg, null_calibration)?)
}

fn null_seed(cfg: &DetectConfig, rep: usize) -> u64 {
    derive_seed(derive_seed(cfg.seed, STREAM_NULL_CALIBRATION), rep as u64)
}

/// Statistics of `reps` independent null Wigner draws. Draw `i` uses its
/// own noise and coloring seeds derived from `cfg.seed`.
pub fn null_samples_wigner(
    n: usize,
    lambda: f64,
    mu: f64,
    rho: f64,
    cfg: &DetectConfig,
    reps: usize,
) -> Result<Vec<f64>> {
    (0..reps)
        .into_par_iter()
        .map(|i| {
            let seed = null_seed(cfg, i);
            let pair = sample_null_wigner(n, seed)?;
            let local = DetectConfig {
                seed: derive_seed(seed, 1),
                ..*cfg
            };
            Ok(detect_stat_wigner(&pair, lambda, mu, rho, &local)?.value)
        })
        .collect()
}

/// Wishart analogue of [`null_samples_wigner`].
#[allow(clippy::too_many_arguments)]
pub fn null_samples_wishart(
    n: usize,
    big_n: usize,
    lambda: f64,
    mu: f64,
    rho: f64,
    cfg: &DetectConfig,
    reps: usize,
) -> Result<Vec<f64>> {
    (0..reps)
        .into_par_iter()
        .map(|i| {
            let seed = null_seed(cfg, i);
            let pair = sample_null_wishart(n, big_n, seed)?;
            let local = DetectConfig {
                seed: derive_seed(seed, 1),
                ..*cfg
            };
            Ok(detect_stat_wishart(&pair, lambda, mu, rho, &local)?.value)
        })
        .collect()
}
