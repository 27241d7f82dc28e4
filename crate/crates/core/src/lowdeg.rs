//! Monte Carlo evaluation of the low-degree advantage bounds: the truncated
//! exponential moment for the modified Wigner model and the `φ_D` functional
//! for the Wishart model.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::prior::PriorSpec;
use crate::rng::{derive_seed, rng_from, STREAM_REPLICATES};

/// `Σ_{k=0}^{D} x^k / k!` by forward recurrence on the terms.
pub fn exp_trunc(x: f64, d: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=d {
        term *= x / k as f64;
        sum += term;
    }
    sum
}

/// Monte Carlo estimate of an advantage bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdvEstimate {
    pub value: f64,
    pub std_error: f64,
    #[serde(rename = "D")]
    pub d: usize,
    pub reps: usize,
    pub n: usize,
}

/// Replicates evaluated per independent chunk.
pub const CHUNK: usize = 1000;

/// Smallest number of replicates accepted by the Monte Carlo evaluators.
pub const MIN_REPS: usize = 1000;

/// Draws the replica overlaps `(⟨x,x′⟩, ⟨y,y′⟩)` of `reps` independent pairs
/// of spikes of length `n`. Chunk `j` uses its own derived seed, and the
/// output order is the replicate order, whatever the thread count.
fn replica_overlaps(spec: &PriorSpec, n: usize, reps: usize, seed: u64) -> Vec<(f64, f64)> {
    let base = derive_seed(seed, STREAM_REPLICATES);
    let chunks = reps.div_ceil(CHUNK);
    let parts: Vec<Vec<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut rng = rng_from(derive_seed(base, j as u64));
            let len = CHUNK.min(reps - j * CHUNK);
            (0..len)
                .map(|_| {
                    let (mut ox, mut oy) = (0.0, 0.0);
                    for _ in 0..n {
                        let (x, y) = spec.sample_coordinate(&mut rng);
                        let (xp, yp) = spec.sample_coordinate(&mut rng);
                        ox += x * xp;
                        oy += y * yp;
                    }
                    (ox, oy)
                })
                .collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

fn summarize(values: &[f64], d: usize, n: usize) -> AdvEstimate {
    let reps = values.len();
    let mean = values.iter().sum::<f64>() / reps as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    AdvEstimate {
        value: mean,
        std_error: (var / reps as f64).sqrt(),
        d,
        reps,
        n,
    }
}

fn check_inputs(spec: &PriorSpec, lambda: f64, mu: f64, n: usize, reps: usize) -> Result<()> {
    spec.validate()?;
    if !(lambda >= 0.0 && mu >= 0.0) {
        return domain("lambda and mu must be nonnegative");
    }
    if n == 0 {
        return domain("n must be positive");
    }
    if reps < MIN_REPS {
        return domain(format!(
            "at least {MIN_REPS} replicates are required, got {reps}"
        ));
    }
    Ok(())
}

/// `E[exp_{≤D}((λ²⟨x,x′⟩² + μ²⟨y,y′⟩²)/(2n))]` over independent replicas.
pub fn adv_wigner_mc(
    spec: &PriorSpec,
    lambda: f64,
    mu: f64,
    n: usize,
    d: usize,
    reps: usize,
    seed: u64,
) -> Result<AdvEstimate> {
    check_inputs(spec, lambda, mu, n, reps)?;
    let (l2, m2) = (lambda * lambda, mu * mu);
    let values: Vec<f64> = replica_overlaps(spec, n, reps, seed)
        .into_iter()
        .map(|(ox, oy)| exp_trunc((l2 * ox * ox + m2 * oy * oy) / (2.0 * n as f64), d))
        .collect();
    Ok(summarize(&values, d, n))
}

/// Coefficients `c_k = Σ_{k₁+…+k_N=k} Π C(2kᵢ, kᵢ)` for `k ≤ D`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiCoefficients {
    #[serde(rename = "N")]
    pub big_n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub c: Vec<f64>,
    pub log_c: Vec<f64>,
}

/// Largest degree cap accepted by [`phi_coefficients`].
pub const MAX_PHI_DEGREE: usize = 30;

/// Above this value of `N·D` the coefficients are formed from their logarithms.
pub const LOG_SPACE_THRESHOLD: f64 = 1e6;

/// Exact `c_k` by convolving `N` copies of `Σ_j C(2j, j) z^j`, truncated at degree `d`.
pub fn phi_coefficients_dp(big_n: usize, d: usize) -> Vec<u128> {
    let central: Vec<u128> = (0..=d as u128)
        .scan(1u128, |c, j| {
            let out = *c;
            *c = *c * (2 * (2 * j + 1)) / (j + 1);
            Some(out)
        })
        .collect();
    let mut acc = vec![0u128; d + 1];
    acc[0] = 1;
    for _ in 0..big_n {
        let mut next = vec![0u128; d + 1];
        for (i, &a) in acc.iter().enumerate() {
            for (j, &b) in central.iter().enumerate().take(d + 1 - i) {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    acc
}

/// `c_k = 2^k Π_{i<k}(N + 2i) / k!` in exact integer arithmetic.
fn phi_closed_form_exact(big_n: usize, k: usize) -> u128 {
    let mut num: u128 = 1;
    for i in 0..k as u128 {
        num *= 2 * (big_n as u128 + 2 * i);
    }
    let fact: u128 = (1..=k as u128).product();
    num / fact
}

/// Whether the closed form `c_k = 4^k Π_{i<k}(N/2 + i)/k!` equals the
/// convolution for every `N ≤ 8`, `k ≤ 6`. Evaluated once.
pub fn phi_identity_verified() -> bool {
    static VERIFIED: OnceLock<bool> = OnceLock::new();
    *VERIFIED.get_or_init(|| {
        (1..=8).all(|nn| {
            let dp = phi_coefficients_dp(nn, 6);
            (0..=6).all(|k| phi_closed_form_exact(nn, k) == dp[k])
        })
    })
}

fn log_closed_form(big_n: usize, d: usize) -> Vec<f64> {
    let half = big_n as f64 / 2.0;
    let mut out = Vec::with_capacity(d + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=d {
        acc += 4f64.ln() + (half + (k - 1) as f64).ln() - (k as f64).ln();
        out.push(acc);
    }
    out
}

fn direct_closed_form(big_n: usize, d: usize) -> Vec<f64> {
    let half = big_n as f64 / 2.0;
    let mut out = Vec::with_capacity(d + 1);
    let mut c = 1.0;
    out.push(c);
    for k in 1..=d {
        c *= 4.0 * (half + (k - 1) as f64) / k as f64;
        out.push(c);
    }
    out
}

/// `φ_D` coefficients for `N` and degree cap `d ≤ 30`. The closed form is
/// used once [`phi_identity_verified`] holds; otherwise the convolution.
pub fn phi_coefficients(big_n: usize, d: usize) -> Result<PhiCoefficients> {
    if big_n == 0 {
        return domain("N must be positive");
    }
    if d > MAX_PHI_DEGREE {
        return domain(format!("degree cap {d} exceeds {MAX_PHI_DEGREE}"));
    }
    let (c, log_c) = if !phi_identity_verified() {
        let c: Vec<f64> = phi_coefficients_dp(big_n, d)
            .into_iter()
            .map(|v| v as f64)
            .collect();
        let log_c = c.iter().map(|v| v.ln()).collect();
        (c, log_c)
    } else if big_n as f64 * d as f64 > LOG_SPACE_THRESHOLD {
        let log_c = log_closed_form(big_n, d);
        (log_c.iter().map(|v| v.exp()).collect(), log_c)
    } else {
        let c = direct_closed_form(big_n, d);
        let log_c = c.iter().map(|v| v.ln()).collect();
        (c, log_c)
    };
    Ok(PhiCoefficients { big_n, d, c, log_c })
}

impl PhiCoefficients {
    /// `ln φ_D(t)` for `t ≥ 0` by a log-sum-exp over the positive terms.
    pub fn ln_phi(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let lt = t.ln();
        let terms: Vec<f64> = self
            .log_c
            .iter()
            .enumerate()
            .map(|(k, lc)| lc + k as f64 * lt)
            .collect();
        let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        m + terms.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
    }
}

/// `E[φ_D(λ²⟨x,x′⟩²/(4n²)) φ_D(μ²⟨y,y′⟩²/(4n²))]` with the coefficients of `N`.
#[allow(clippy::too_many_arguments)]
pub fn adv_wishart_mc(
    spec: &PriorSpec,
    lambda: f64,
    mu: f64,
    n: usize,
    big_n: usize,
    d: usize,
    reps: usize,
    seed: u64,
) -> Result<AdvEstimate> {
    check_inputs(spec, lambda, mu, n, reps)?;
    let phi = phi_coefficients(big_n, d)?;
    let (l2, m2) = (lambda * lambda, mu * mu);
    let scale = 4.0 * (n as f64) * (n as f64);
    let values: Vec<f64> = replica_overlaps(spec, n, reps, seed)
        .into_iter()
        .map(|(ox, oy)| (phi.ln_phi(l2 * ox * ox / scale) + phi.ln_phi(m2 * oy * oy / scale)).exp())
        .collect();
    Ok(summarize(&values, d, n))
}
