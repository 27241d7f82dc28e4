//! Recovery score rows from colorful decorated-path sums, the truncated
//! estimator built from one pivot row, and the overlap metric.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{
    brute_force_sum, colorful_probability, coloring_batch, weighted_bipartite_path_rows,
    weighted_path_rows, Coloring, Weights,
};
use crate::detection::default_colorings;
use crate::error::{domain, Result};
use crate::graphfam::{beta_fast, class_weight, enumerate_family, FamilyTag};
use crate::models::{WignerPair, WishartPair};

/// Choice of the pivot row `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PivotMode {
    FixedIndex(usize),
    /// The row maximizing `Σ_v Φ̃²_{w,v}`.
    MaxRowEnergy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverConfig {
    pub ell: usize,
    pub t: usize,
    /// Truncation constant; scores beyond `R⁴` in magnitude are zeroed.
    #[serde(default = "default_r", rename = "R")]
    pub r: f64,
    #[serde(default = "default_pivot")]
    pub pivot_mode: PivotMode,
    #[serde(default)]
    pub exhaustive: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_r() -> f64 {
    3.0
}

fn default_pivot() -> PivotMode {
    PivotMode::FixedIndex(0)
}

impl RecoverConfig {
    /// Defaults for the Wigner scores: palette `ℓ + 1`, `R = 3`, pivot 0.
    pub fn wigner(ell: usize, seed: u64) -> Self {
        Self::with_palette(ell, ell + 1, seed)
    }

    /// Defaults for the Wishart scores: palette `2ℓ + 1`.
    pub fn wishart(ell: usize, seed: u64) -> Self {
        Self::with_palette(ell, 2 * ell + 1, seed)
    }

    fn with_palette(ell: usize, palette: usize, seed: u64) -> Self {
        RecoverConfig {
            ell,
            t: default_colorings(palette),
            r: default_r(),
            pivot_mode: default_pivot(),
            exhaustive: false,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) {
            return domain(format!("R = {} must be positive", self.r));
        }
        if self.t == 0 {
            return domain("at least one coloring is required");
        }
        if self.ell == 0 {
            return domain("paths need ell >= 1");
        }
        Ok(())
    }

    /// `R⁴`.
    pub fn truncation_level(&self) -> f64 {
        self.r.powi(4)
    }
}

/// One row `v ↦ Φ̃_{w,v}` (or `Ψ̃_{w,v}`) of the score matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreRow {
    pub pivot: usize,
    pub scores: Vec<f64>,
    /// `β_J` or `β_I`.
    pub normalizer: f64,
}

fn check_parameters(lambda: f64, mu: f64, rho: f64) -> Result<()> {
    if !(lambda >= 0.0 && mu >= 0.0 && (0.0..=1.0).contains(&rho)) {
        return domain("need lambda, mu >= 0 and rho in [0, 1]");
    }
    Ok(())
}

fn check_pivots(pivots: &[usize], n: usize) -> Result<()> {
    match pivots.iter().find(|&&w| w >= n) {
        Some(w) => domain(format!("pivot {w} out of range for n = {n}")),
        None => Ok(()),
    }
}

/// Averages the per-coloring rows over the configured colorings and divides by `r`.
fn colored_rows<F>(
    cfg: &RecoverConfig,
    vertices: usize,
    palette: usize,
    rows: F,
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&Coloring) -> Result<Vec<Vec<f64>>> + Sync + Send,
{
    let batch = coloring_batch(vertices, palette, cfg.t, cfg.exhaustive, cfg.seed)?;
    let parts: Vec<Vec<Vec<f64>>> = batch.par_iter().map(&rows).collect::<Result<_>>()?;
    let scale = 1.0 / (parts.len() as f64 * colorful_probability(palette, palette));
    let mut acc = parts[0].clone();
    for part in &parts[1..] {
        for (a, b) in acc.iter_mut().zip(part) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }
    acc.iter_mut().flatten().for_each(|v| *v *= scale);
    Ok(acc)
}

/// `Φ̃_{w,·}` for each pivot `w`, with
/// `Φ̃_{w,v} = (2 n^{ℓ/2−1} β_J)^{−1} Σ_{[H]∈J(ℓ)} Ξ(H) (1/(t·ϰ)) Σ_k 𝔏_H(X, Y, ξ_k)`.
pub fn score_rows_wigner(
    pair: &WignerPair,
    lambda: f64,
    mu: f64,
    rho: f64,
    cfg: &RecoverConfig,
    pivots: &[usize],
) -> Result<Vec<ScoreRow>> {
    cfg.validate()?;
    check_parameters(lambda, mu, rho)?;
    let n = pair.x.nrows();
    let ell = cfg.ell;
    if n < ell + 2 {
        return domain(format!("n = {n} must be at least ell + 2 = {}", ell + 2));
    }
    check_pivots(pivots, n)?;
    let beta = beta_fast(FamilyTag::J, ell, lambda, mu, rho)?;
    let w = Weights { lambda, mu, rho };
    let (x, y) = (pair.x.view(), pair.y.view());
    let rows = colored_rows(cfg, n, ell + 1, |c| {
        weighted_path_rows(x, y, w, ell, c, pivots)
    })?;
    let scale = 1.0 / (2.0 * (n as f64).powf(ell as f64 / 2.0 - 1.0) * beta);
    Ok(finish(rows, pivots, scale, beta))
}

/// `Ψ̃_{w,·}` for each pivot `w ∈ [n]`, with prefactor `(2 N^ℓ n^{−1} β_I)^{−1}`
/// and palette `2ℓ + 1` over `[n] ⊔ [N]`.
pub fn score_rows_wishart(
    pair: &WishartPair,
    lambda: f64,
    mu: f64,
    rho: f64,
    cfg: &RecoverConfig,
    pivots: &[usize],
) -> Result<Vec<ScoreRow>> {
    cfg.validate()?;
    check_parameters(lambda, mu, rho)?;
    let (n, big_n) = pair.x.dim();
    let ell = cfg.ell;
    if n < ell + 1 || big_n < ell {
        return domain(format!(
            "need n >= {} and N >= {ell}, got n = {n}, N = {big_n}",
            ell + 1
        ));
    }
    check_pivots(pivots, n)?;
    let beta = beta_fast(FamilyTag::I, ell, lambda, mu, rho)?;
    let w = Weights { lambda, mu, rho };
    let (x, y) = (pair.x.view(), pair.y.view());
    let rows = colored_rows(cfg, n + big_n, 2 * ell + 1, |c| {
        weighted_bipartite_path_rows(x, y, w, ell, c, pivots)
    })?;
    let scale = n as f64 / (2.0 * (big_n as f64).powi(ell as i32) * beta);
    Ok(finish(rows, pivots, scale, beta))
}

fn finish(rows: Vec<Vec<f64>>, pivots: &[usize], scale: f64, beta: f64) -> Vec<ScoreRow> {
    rows.into_iter()
        .zip(pivots)
        .map(|(mut scores, &pivot)| {
            scores.iter_mut().for_each(|v| *v *= scale);
            ScoreRow {
                pivot,
                scores,
                normalizer: beta,
            }
        })
        .collect()
}

fn row_energy(row: &ScoreRow) -> f64 {
    row.scores.iter().map(|v| v * v).sum()
}

fn pick(rows: Vec<ScoreRow>) -> ScoreRow {
    rows.into_iter()
        .reduce(|best, r| {
            if row_energy(&r) > row_energy(&best) {
                r
            } else {
                best
            }
        })
        .expect("at least one row")
}

/// The pivot row selected by `cfg.pivot_mode` (Wigner scores).
pub fn recovery_scores_wigner(
    pair: &WignerPair,
    lambda: f64,
    mu: f64,
    rho: f64,
    cfg: &RecoverConfig,
) -> Result<ScoreRow> {
    let pivots = pivot_candidates(cfg, pair.x.nrows());
    Ok(pick(score_rows_wigner(
        pair, lambda, mu, rho, cfg, &pivots,
    )?))
}

/// The pivot row selected by `cfg.pivot_mode` (Wishart scores).
pub fn recovery_scores_wishart(
    pair: &WishartPair,
    lambda: f64,
    mu: f64,
    rho: f64,
    cfg: &RecoverConfig,
) -> Result<ScoreRow> {
    let pivots = pivot_candidates(cfg, pair.x.nrows());
    Ok(pick(score_rows_wishart(
        pair, lambda, mu, rho, cfg, &pivots,
    )?))
}

fn pivot_candidates(cfg: &RecoverConfig, n: usize) -> Vec<usize> {
    match cfg.pivot_mode {
        PivotMode::FixedIndex(w) => vec![w],
        PivotMode::MaxRowEnergy => (0..n).collect(),
    }
}

/// Exact score row `Φ_{w,·}` by exhaustive search (small instances only).
pub fn exact_scores_wigner(
    pair: &WignerPair,
    lambda: f64,
    mu: f64,
    rho: f64,
    ell: usize,
    w: usize,
) -> Result<ScoreRow> {
    let n = pair.x.nrows();
    check_pivots(&[w], n)?;
    let beta = beta_fast(FamilyTag::J, ell, lambda, mu, rho)?;
    let scale = 1.0 / (2.0 * (n as f64).powf(ell as f64 / 2.0 - 1.0) * beta);
    let scores = exact_row(
        pair.x.view(),
        pair.y.view(),
        FamilyTag::J,
        ell,
        lambda,
        mu,
        rho,
        w,
        n,
    )?;
    Ok(ScoreRow {
        pivot: w,
        scores: scores.into_iter().map(|v| v * scale).collect(),
        normalizer: beta,
    })
}

/// Exact score row `Ψ_{w,·}` by exhaustive search (small instances only).
pub fn exact_scores_wishart(
    pair: &WishartPair,
    lambda: f64,
    mu: f64,
    rho: f64,
    ell: usize,
    w: usize,
) -> Result<ScoreRow> {
    let (n, big_n) = pair.x.dim();
    check_pivots(&[w], n)?;
    let beta = beta_fast(FamilyTag::I, ell, lambda, mu, rho)?;
    let scale = n as f64 / (2.0 * (big_n as f64).powi(ell as i32) * beta);
    let scores = exact_row(
        pair.x.view(),
        pair.y.view(),
        FamilyTag::I,
        ell,
        lambda,
        mu,
        rho,
        w,
        n,
    )?;
    Ok(ScoreRow {
        pivot: w,
        scores: scores.into_iter().map(|v| v * scale).collect(),
        normalizer: beta,
    })
}

#[allow(clippy::too_many_arguments)]
fn exact_row(
    x: ndarray::ArrayView2<f64>,
    y: ndarray::ArrayView2<f64>,
    tag: FamilyTag,
    ell: usize,
    lambda: f64,
    mu: f64,
    rho: f64,
    w: usize,
    n: usize,
) -> Result<Vec<f64>> {
    let table = enumerate_family(tag, ell)?;
    let mut row = vec![0.0; n];
    for (v, out) in row.iter_mut().enumerate().filter(|(v, _)| *v != w) {
        for h in &table.classes {
            *out +=
                class_weight(h, lambda, mu, rho) * brute_force_sum(x, y, h, None, Some((w, v)))?;
        }
    }
    Ok(row)
}

/// `x̂_u = score_u · 1{|score_u| ≤ R⁴}`.
pub fn assemble_estimate(row: &ScoreRow, cfg: &RecoverConfig) -> Vec<f64> {
    let level = cfg.truncation_level();
    row.scores
        .iter()
        .map(|&s| if s.abs() <= level { s } else { 0.0 })
        .collect()
}

/// `|⟨x̂, x⟩| / (‖x̂‖ ‖x‖)`, or 0 when either vector vanishes.
pub fn overlap(x_hat: &[f64], x: &[f64]) -> f64 {
    let dot: f64 = x_hat.iter().zip(x).map(|(a, b)| a * b).sum();
    let na = x_hat.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nb = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot.abs() / (na * nb)).min(1.0)
}

/// One exported line of a score row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreRecord {
    pub v: usize,
    pub score: f64,
    pub truncated: bool,
    pub x_v: Option<f64>,
    /// `score · x_w · x_v` when the spike is known.
    pub product: Option<f64>,
}

/// Per-entry records of `row`; `truth` is the planted `x` when known.
pub fn score_records(
    row: &ScoreRow,
    cfg: &RecoverConfig,
    truth: Option<&[f64]>,
) -> Vec<ScoreRecord> {
    let level = cfg.truncation_level();
    row.scores
        .iter()
        .enumerate()
        .map(|(v, &score)| {
            let x_v = truth.map(|x| x[v]);
            ScoreRecord {
                v,
                score,
                truncated: score.abs() > level,
                x_v,
                product: truth.map(|x| score * x[row.pivot] * x[v]),
            }
        })
        .collect()
}

/// Mean of `Φ̃_{w,v} x_w x_v` over `v ≠ w`.
pub fn mean_signed_score(row: &ScoreRow, x: &[f64]) -> f64 {
    let w = row.pivot;
    let (sum, count) = row
        .scores
        .iter()
        .enumerate()
        .filter(|(v, _)| *v != w)
        .fold((0.0, 0usize), |(s, c), (v, &score)| {
            (s + score * x[w] * x[v], c + 1)
        });
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}
