//! Correlated spike priors: samplers and analytic moment tables.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::rng_from;

/// Shape of the per-coordinate coupling between the two spikes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PriorKind {
    /// `Y = cX + sqrt(1 - c^2) Z` with independent standard normals.
    CorrelatedGaussian,
    /// `X` uniform on `{-1, 1}`, `Y = X` with probability `(1 + c) / 2`.
    CorrelatedRademacher,
    /// `(BX, BY) / sqrt(p)` with a shared `B ~ Bernoulli(p)` and a correlated
    /// Rademacher pair `(X, Y)`.
    SparseRademacher { p: f64 },
}

/// Whether the pairwise correlation target is `rho` or `rho^2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RhoMode {
    #[default]
    Linear,
    Squared,
}

/// A correlated prior for the spike pair `(x_i, y_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PriorSpecRepr", into = "PriorSpecRepr")]
pub struct PriorSpec {
    pub kind: PriorKind,
    pub rho: f64,
    pub rho_mode: RhoMode,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
enum KindTag {
    CorrelatedGaussian,
    CorrelatedRademacher,
    SparseRademacher,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PriorSpecRepr {
    kind: KindTag,
    rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default)]
    rho_mode: RhoMode,
}

impl TryFrom<PriorSpecRepr> for PriorSpec {
    type Error = Error;

    fn try_from(r: PriorSpecRepr) -> Result<Self> {
        let kind = match (r.kind, r.p) {
            (KindTag::CorrelatedGaussian, None) => PriorKind::CorrelatedGaussian,
            (KindTag::CorrelatedRademacher, None) => PriorKind::CorrelatedRademacher,
            (KindTag::SparseRademacher, Some(p)) => PriorKind::SparseRademacher { p },
            (KindTag::SparseRademacher, None) => {
                return domain("SparseRademacher requires the field `p`")
            }
            (_, Some(_)) => return domain("field `p` is only valid for SparseRademacher"),
        };
        let spec = PriorSpec {
            kind,
            rho: r.rho,
            rho_mode: r.rho_mode,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<PriorSpec> for PriorSpecRepr {
    fn from(s: PriorSpec) -> Self {
        let (kind, p) = match s.kind {
            PriorKind::CorrelatedGaussian => (KindTag::CorrelatedGaussian, None),
            PriorKind::CorrelatedRademacher => (KindTag::CorrelatedRademacher, None),
            PriorKind::SparseRademacher { p } => (KindTag::SparseRademacher, Some(p)),
        };
        PriorSpecRepr {
            kind,
            rho: s.rho,
            p,
            rho_mode: s.rho_mode,
        }
    }
}

/// Latent spike vectors of length `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpikePair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SpikePair {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(Error::Dimension(format!(
                "spike lengths {} and {} must agree and be positive",
                x.len(),
                y.len()
            )));
        }
        Ok(SpikePair { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
}

impl PriorSpec {
    pub fn new(kind: PriorKind, rho: f64, rho_mode: RhoMode) -> Result<Self> {
        let s = PriorSpec {
            kind,
            rho,
            rho_mode,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn rademacher(rho: f64) -> Self {
        PriorSpec {
            kind: PriorKind::CorrelatedRademacher,
            rho,
            rho_mode: RhoMode::Linear,
        }
    }

    pub fn gaussian(rho: f64) -> Self {
        PriorSpec {
            kind: PriorKind::CorrelatedGaussian,
            rho,
            rho_mode: RhoMode::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return domain(format!("rho = {} must lie in [0, 1]", self.rho));
        }
        if let PriorKind::SparseRademacher { p } = self.kind {
            if !(p > 0.0 && p <= 1.0) {
                return domain(format!("p = {p} must lie in (0, 1]"));
            }
        }
        Ok(())
    }

    /// The correlation `E[XY]` actually targeted by the sampler.
    pub fn rho_eff(&self) -> f64 {
        match self.rho_mode {
            RhoMode::Linear => self.rho,
            RhoMode::Squared => self.rho * self.rho,
        }
    }

    /// Draws one coordinate pair.
    pub fn sample_coordinate<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let c = self.rho_eff();
        match self.kind {
            PriorKind::CorrelatedGaussian => {
                let x: f64 = StandardNormal.sample(rng);
                let z: f64 = StandardNormal.sample(rng);
                (x, c * x + (1.0 - c * c).max(0.0).sqrt() * z)
            }
            PriorKind::CorrelatedRademacher => rademacher_pair(rng, c),
            PriorKind::SparseRademacher { p } => {
                let b = rng.random_bool(p);
                let (x, y) = rademacher_pair(rng, c);
                if b {
                    let s = 1.0 / p.sqrt();
                    (s * x, s * y)
                } else {
                    (0.0, 0.0)
                }
            }
        }
    }
}

fn rademacher_pair<R: Rng + ?Sized>(rng: &mut R, c: f64) -> (f64, f64) {
    let x = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let same = rng.random_bool(((1.0 + c) / 2.0).clamp(0.0, 1.0));
    (x, if same { x } else { -x })
}

/// Samples `n` i.i.d. coordinate pairs from the prior.
pub fn sample_spikes(spec: &PriorSpec, n: usize, seed: u64) -> Result<SpikePair> {
    spec.validate()?;
    if n == 0 {
        return domain("n must be positive");
    }
    let mut rng = rng_from(seed);
    let (x, y) = (0..n).map(|_| spec.sample_coordinate(&mut rng)).unzip();
    Ok(SpikePair { x, y })
}

fn double_factorial_odd(k: u32) -> f64 {
    // (k - 1)!! for even k, the k-th moment of a standard normal.
    (1..k).step_by(2).map(f64::from).product()
}

fn normal_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        double_factorial_odd(k)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn rademacher_moment(a: u32, b: u32, c: f64) -> f64 {
    if (a + b) % 2 == 1 {
        0.0
    } else if b.is_multiple_of(2) {
        1.0
    } else {
        c
    }
}

/// Analytic `E[X^a Y^b]` for `a + b <= 8`.
pub fn prior_moments(spec: &PriorSpec, a: u32, b: u32) -> Result<f64> {
    spec.validate()?;
    if a + b > 8 {
        return Err(Error::UnsupportedMoment { a, b });
    }
    let c = spec.rho_eff();
    Ok(match spec.kind {
        PriorKind::CorrelatedGaussian => {
            let s = (1.0 - c * c).max(0.0).sqrt();
            (0..=b)
                .map(|j| {
                    binomial(b, j)
                        * c.powi(j as i32)
                        * s.powi((b - j) as i32)
                        * normal_moment(a + j)
                        * normal_moment(b - j)
                })
                .sum()
        }
        PriorKind::CorrelatedRademacher => rademacher_moment(a, b, c),
        PriorKind::SparseRademacher { p } => {
            if a + b == 0 {
                1.0
            } else {
                p.powf(1.0 - f64::from(a + b) / 2.0) * rademacher_moment(a, b, c)
            }
        }
    })
}
