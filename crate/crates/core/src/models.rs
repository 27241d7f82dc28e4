//! Samplers for correlated spiked Wigner and Wishart pairs and their nulls.

use std::io::{Read, Write};

use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::prior::{sample_spikes, PriorSpec, SpikePair};
use crate::rng::{
    derive_seed, rng_from, STREAM_FACTOR_U, STREAM_FACTOR_V, STREAM_NOISE_X, STREAM_NOISE_Y,
    STREAM_SPIKES,
};

/// Signal strengths, correlation and dimensions of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
    pub n: usize,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub big_n: Option<usize>,
}

impl ModelParams {
    pub fn wigner(lambda: f64, mu: f64, rho: f64, n: usize) -> Self {
        ModelParams {
            lambda,
            mu,
            rho,
            n,
            big_n: None,
        }
    }

    pub fn wishart(lambda: f64, mu: f64, rho: f64, n: usize, big_n: usize) -> Self {
        ModelParams {
            lambda,
            mu,
            rho,
            n,
            big_n: Some(big_n),
        }
    }

    /// Aspect ratio `n / N`; requires `N`.
    pub fn gamma(&self) -> Result<f64> {
        match self.big_n {
            Some(nn) if nn > 0 => Ok(self.n as f64 / nn as f64),
            _ => domain("the Wishart dimension N is not set"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.mu >= 0.0) {
            return domain("lambda and mu must be nonnegative");
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return domain("rho must lie in [0, 1]");
        }
        if self.n == 0 {
            return domain("n must be positive");
        }
        if self.big_n == Some(0) {
            return domain("N must be positive");
        }
        Ok(())
    }

    fn require_big_n(&self) -> Result<usize> {
        self.big_n
            .ok_or_else(|| Error::Domain("the Wishart dimension N is not set".into()))
    }
}

/// Noise law used when assembling a pair from given spikes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Noise {
    Gaussian,
    /// All noise entries are zero; only the rank-one signal remains.
    Zero,
}

/// Two symmetric `n x n` observations.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerPair {
    pub x: Array2<f64>,
    pub y: Array2<f64>,
    pub spikes: Option<SpikePair>,
}

/// Two `n x N` observations with their latent Gaussian factors.
#[derive(Clone, Debug, PartialEq)]
pub struct WishartPair {
    pub x: Array2<f64>,
    pub y: Array2<f64>,
    pub spikes: Option<SpikePair>,
    pub u: Option<Vec<f64>>,
    pub v: Option<Vec<f64>>,
}

/// Symmetric Gaussian noise with off-diagonal variance 1 and diagonal variance 2.
pub fn wigner_noise(n: usize, seed: u64) -> Array2<f64> {
    let mut rng = rng_from(seed);
    let mut w = Array2::zeros((n, n));
    let sqrt2 = std::f64::consts::SQRT_2;
    for i in 0..n {
        for j in i..n {
            let g: f64 = StandardNormal.sample(&mut rng);
            if i == j {
                w[[i, i]] = sqrt2 * g;
            } else {
                w[[i, j]] = g;
                w[[j, i]] = g;
            }
        }
    }
    w
}

/// Matrix with i.i.d. standard normal entries, filled row-major.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = rng_from(seed);
    Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(&mut rng))
}

fn gaussian_vector(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from(seed);
    (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn add_rank_one(m: &mut Array2<f64>, scale: f64, a: &[f64], b: &[f64]) {
    if scale == 0.0 {
        return;
    }
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            m[[i, j]] += scale * (ai * bj);
        }
    }
}

fn check_spikes(spikes: &SpikePair, n: usize) -> Result<()> {
    if spikes.x.len() != n || spikes.y.len() != n {
        return Err(Error::Dimension(format!(
            "spike length {} does not match n = {n}",
            spikes.x.len()
        )));
    }
    Ok(())
}

/// Samples `X = (λ/√n) x xᵀ + W`, `Y = (μ/√n) y yᵀ + Z`.
pub fn sample_wigner_pair(params: &ModelParams, spec: &PriorSpec, seed: u64) -> Result<WignerPair> {
    params.validate()?;
    let spikes = sample_spikes(spec, params.n, derive_seed(seed, STREAM_SPIKES))?;
    wigner_pair_with_spikes(params, spikes, Noise::Gaussian, seed)
}

/// Assembles a Wigner pair from given spikes, drawing only the noise from `seed`.
pub fn wigner_pair_with_spikes(
    params: &ModelParams,
    spikes: SpikePair,
    noise: Noise,
    seed: u64,
) -> Result<WignerPair> {
    params.validate()?;
    let n = params.n;
    if n < 2 {
        return domain("the Wigner model needs n >= 2");
    }
    check_spikes(&spikes, n)?;
    let (mut x, mut y) = match noise {
        Noise::Gaussian => (
            wigner_noise(n, derive_seed(seed, STREAM_NOISE_X)),
            wigner_noise(n, derive_seed(seed, STREAM_NOISE_Y)),
        ),
        Noise::Zero => (Array2::zeros((n, n)), Array2::zeros((n, n))),
    };
    let sn = (n as f64).sqrt();
    add_rank_one(&mut x, params.lambda / sn, &spikes.x, &spikes.x);
    add_rank_one(&mut y, params.mu / sn, &spikes.y, &spikes.y);
    Ok(WignerPair {
        x,
        y,
        spikes: Some(spikes),
    })
}

/// Pure Wigner noise; equals the alternative with `λ = μ = 0` and the same seed.
pub fn sample_null_wigner(n: usize, seed: u64) -> Result<WignerPair> {
    if n < 2 {
        return domain("the Wigner model needs n >= 2");
    }
    Ok(WignerPair {
        x: wigner_noise(n, derive_seed(seed, STREAM_NOISE_X)),
        y: wigner_noise(n, derive_seed(seed, STREAM_NOISE_Y)),
        spikes: None,
    })
}

/// Samples `X = (√λ/√n) x uᵀ + W`, `Y = (√μ/√n) y vᵀ + Z`.
pub fn sample_wishart_pair(
    params: &ModelParams,
    spec: &PriorSpec,
    seed: u64,
) -> Result<WishartPair> {
    params.validate()?;
    let spikes = sample_spikes(spec, params.n, derive_seed(seed, STREAM_SPIKES))?;
    wishart_pair_with_spikes(params, spikes, Noise::Gaussian, seed)
}

/// Assembles a Wishart pair from given spikes; factors and noise come from `seed`.
pub fn wishart_pair_with_spikes(
    params: &ModelParams,
    spikes: SpikePair,
    noise: Noise,
    seed: u64,
) -> Result<WishartPair> {
    params.validate()?;
    let (n, big_n) = (params.n, params.require_big_n()?);
    if n < 2 || big_n < 2 {
        return domain("the Wishart model needs n, N >= 2");
    }
    check_spikes(&spikes, n)?;
    let u = gaussian_vector(big_n, derive_seed(seed, STREAM_FACTOR_U));
    let v = gaussian_vector(big_n, derive_seed(seed, STREAM_FACTOR_V));
    let (mut x, mut y) = match noise {
        Noise::Gaussian => (
            gaussian_matrix(n, big_n, derive_seed(seed, STREAM_NOISE_X)),
            gaussian_matrix(n, big_n, derive_seed(seed, STREAM_NOISE_Y)),
        ),
        Noise::Zero => (Array2::zeros((n, big_n)), Array2::zeros((n, big_n))),
    };
    let sn = (n as f64).sqrt();
    add_rank_one(&mut x, params.lambda.sqrt() / sn, &spikes.x, &u);
    add_rank_one(&mut y, params.mu.sqrt() / sn, &spikes.y, &v);
    Ok(WishartPair {
        x,
        y,
        spikes: Some(spikes),
        u: Some(u),
        v: Some(v),
    })
}

/// Pure Gaussian `n x N` noise pair.
pub fn sample_null_wishart(n: usize, big_n: usize, seed: u64) -> Result<WishartPair> {
    if n < 2 || big_n < 2 {
        return domain("the Wishart model needs n, N >= 2");
    }
    Ok(WishartPair {
        x: gaussian_matrix(n, big_n, derive_seed(seed, STREAM_NOISE_X)),
        y: gaussian_matrix(n, big_n, derive_seed(seed, STREAM_NOISE_Y)),
        spikes: None,
        u: None,
        v: None,
    })
}

/// Samples the asymmetric variant `X̂ = (λ/√(2n)) x xᵀ + Ŵ` with i.i.d. noise.
pub fn sample_modified_wigner_pair(
    params: &ModelParams,
    spec: &PriorSpec,
    seed: u64,
) -> Result<WignerPair> {
    params.validate()?;
    let spikes = sample_spikes(spec, params.n, derive_seed(seed, STREAM_SPIKES))?;
    modified_wigner_pair_with_spikes(params, spikes, Noise::Gaussian, seed)
}

/// Asymmetric variant assembled from given spikes.
pub fn modified_wigner_pair_with_spikes(
    params: &ModelParams,
    spikes: SpikePair,
    noise: Noise,
    seed: u64,
) -> Result<WignerPair> {
    params.validate()?;
    let n = params.n;
    check_spikes(&spikes, n)?;
    let (mut x, mut y) = match noise {
        Noise::Gaussian => (
            gaussian_matrix(n, n, derive_seed(seed, STREAM_NOISE_X)),
            gaussian_matrix(n, n, derive_seed(seed, STREAM_NOISE_Y)),
        ),
        Noise::Zero => (Array2::zeros((n, n)), Array2::zeros((n, n))),
    };
    let s2n = (2.0 * n as f64).sqrt();
    add_rank_one(&mut x, params.lambda / s2n, &spikes.x, &spikes.x);
    add_rank_one(&mut y, params.mu / s2n, &spikes.y, &spikes.y);
    Ok(WignerPair {
        x,
        y,
        spikes: Some(spikes),
    })
}

const MAGIC: &[u8; 8] = b"DCYCPAIR";
const DTYPE_F64: u32 = 1;

/// Writes a matrix pair in the binary dump format.
///
/// Layout: 8-byte magic, `n` and `N` as little-endian `u64`, a `u32` dtype
/// tag (1 = f64), then both matrices as row-major little-endian f64.
pub fn write_pair<W: Write>(mut w: W, x: &Array2<f64>, y: &Array2<f64>) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension(
            "pair matrices must have equal shape".into(),
        ));
    }
    let (n, big_n) = x.dim();
    w.write_all(MAGIC)?;
    w.write_all(&(n as u64).to_le_bytes())?;
    w.write_all(&(big_n as u64).to_le_bytes())?;
    w.write_all(&DTYPE_F64.to_le_bytes())?;
    for m in [x, y] {
        for v in m.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a matrix pair written by [`write_pair`].
pub fn read_pair<R: Read>(mut r: R) -> Result<(Array2<f64>, Array2<f64>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let big_n = u64::from_le_bytes(b8) as usize;
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    if u32::from_le_bytes(b4) != DTYPE_F64 {
        return Err(Error::Format("unsupported dtype".into()));
    }
    let mut read_matrix = || -> Result<Array2<f64>> {
        let mut data = vec![0.0; n * big_n];
        for v in data.iter_mut() {
            r.read_exact(&mut b8)?;
            *v = f64::from_le_bytes(b8);
        }
        Array2::from_shape_vec((n, big_n), data).map_err(|e| Error::Format(e.to_string()))
    };
    let x = read_matrix()?;
    let y = read_matrix()?;
    Ok((x, y))
}
