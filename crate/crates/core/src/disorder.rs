//! Step-length disorder laws and seeded realization sampling.
//!
//! A disorder law is fixed for a whole walk; each step draws an independent
//! nonnegative length from it. Sampling uses inverse-CDF lookup on a table
//! truncated once the remaining tail mass falls below [`CDF_TAIL_CUTOFF`].

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const CDF_TAIL_CUTOFF: f64 = 1e-12;
const MAX_TABLE_LEN: usize = 1 << 22;
const POISSONIAN_TOLERANCE: f64 = 1e-12;

/// Probability law of a single step length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DisorderSpec {
    /// `lambda^l e^-lambda / l!`.
    Poisson { lambda: f64 },
    /// `C(n, l) p^l (1 - p)^(n - l)`.
    Binomial { n: u32, p: f64 },
    /// `C(K, l) C(N - K, n - l) / C(N, n)`.
    Hypergeometric {
        population: u32,
        successes: u32,
        draws: u32,
    },
    /// `C(l + r - 1, l) k^r (1 - k)^l`, mean `r (1 - k) / k`.
    NegativeBinomial { r: f64, k: f64 },
    /// `(1 - k)^(l - 1) k` on `l >= 1`.
    Geometric { k: f64 },
    /// `(1 - k)^l k` on `l >= 0`.
    GeometricShifted { k: f64 },
}

/// Variance relative to a Poisson law of equal mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dispersion {
    SubPoissonian,
    Poissonian,
    SuperPoissonian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    pub fn dispersion(&self) -> Dispersion {
        let gap = self.variance - self.mean;
        if gap.abs() <= POISSONIAN_TOLERANCE * self.mean.abs().max(1.0) {
            Dispersion::Poissonian
        } else if gap < 0.0 {
            Dispersion::SubPoissonian
        } else {
            Dispersion::SuperPoissonian
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn ln_choose(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

impl DisorderSpec {
    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::Poisson { lambda }.validated()
    }

    pub fn binomial(n: u32, p: f64) -> Result<Self> {
        Self::Binomial { n, p }.validated()
    }

    pub fn hypergeometric(population: u32, successes: u32, draws: u32) -> Result<Self> {
        Self::Hypergeometric {
            population,
            successes,
            draws,
        }
        .validated()
    }

    pub fn negative_binomial(r: f64, k: f64) -> Result<Self> {
        Self::NegativeBinomial { r, k }.validated()
    }

    pub fn geometric(k: f64) -> Result<Self> {
        Self::Geometric { k }.validated()
    }

    pub fn geometric_shifted(k: f64) -> Result<Self> {
        Self::GeometricShifted { k }.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Checks the parameter domain of the family.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Poisson { lambda } => {
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(invalid(format!("poisson lambda must be > 0, got {lambda}")));
                }
            }
            Self::Binomial { n, p } => {
                if n < 1 {
                    return Err(invalid("binomial n must be >= 1"));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(format!("binomial p must lie in [0, 1], got {p}")));
                }
            }
            Self::Hypergeometric {
                population,
                successes,
                draws,
            } => {
                if population < 1 || successes > population || draws > population {
                    return Err(invalid(format!(
                        "hypergeometric needs N >= K >= 0 and N >= n >= 0 with N >= 1, \
                         got N={population} K={successes} n={draws}"
                    )));
                }
            }
            Self::NegativeBinomial { r, k } => {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(invalid(format!("negative binomial r must be > 0, got {r}")));
                }
                if !(k > 0.0 && k < 1.0) {
                    return Err(invalid(format!(
                        "negative binomial k must lie in (0, 1), got {k}"
                    )));
                }
            }
            Self::Geometric { k } | Self::GeometricShifted { k } => {
                if !(k > 0.0 && k <= 1.0) {
                    return Err(invalid(format!("geometric k must lie in (0, 1], got {k}")));
                }
            }
        }
        Ok(())
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Poisson { .. } => "poisson",
            Self::Binomial { .. } => "binomial",
            Self::Hypergeometric { .. } => "hypergeometric",
            Self::NegativeBinomial { .. } => "negative_binomial",
            Self::Geometric { .. } => "geometric",
            Self::GeometricShifted { .. } => "geometric_shifted",
        }
    }

    /// Smallest and (when finite) largest step length with nonzero mass.
    pub fn support(&self) -> (u64, Option<u64>) {
        match *self {
            Self::Binomial { n, .. } => (0, Some(n as u64)),
            Self::Hypergeometric {
                population,
                successes,
                draws,
            } => {
                let lo = (draws + successes).saturating_sub(population);
                (lo as u64, Some(draws.min(successes) as u64))
            }
            Self::Geometric { .. } => (1, None),
            _ => (0, None),
        }
    }

    /// Probability that a step has length `l`.
    pub fn pmf(&self, l: u64) -> f64 {
        let (lo, hi) = self.support();
        if l < lo || hi.is_some_and(|h| l > h) {
            return 0.0;
        }
        let lf = l as f64;
        match *self {
            Self::Poisson { lambda } => (lf * lambda.ln() - lambda - ln_gamma(lf + 1.0)).exp(),
            Self::Binomial { n, p } => {
                let n = n as u64;
                if p == 0.0 {
                    return if l == 0 { 1.0 } else { 0.0 };
                }
                if p == 1.0 {
                    return if l == n { 1.0 } else { 0.0 };
                }
                (ln_choose(n as f64, lf) + lf * p.ln() + (n - l) as f64 * (1.0 - p).ln()).exp()
            }
            Self::Hypergeometric {
                population,
                successes,
                draws,
            } => {
                let (nn, kk, n) = (population as f64, successes as f64, draws as f64);
                (ln_choose(kk, lf) + ln_choose(nn - kk, n - lf) - ln_choose(nn, n)).exp()
            }
            Self::NegativeBinomial { r, k } => (ln_gamma(lf + r) - ln_gamma(r)
                - ln_gamma(lf + 1.0)
                + r * k.ln()
                + lf * (1.0 - k).ln())
            .exp(),
            Self::Geometric { k } => (1.0 - k).powi((l - 1) as i32) * k,
            Self::GeometricShifted { k } => (1.0 - k).powi(l as i32) * k,
        }
    }

    /// Closed-form mean and variance.
    pub fn moments(&self) -> Moments {
        let (mean, variance) = match *self {
            Self::Poisson { lambda } => (lambda, lambda),
            Self::Binomial { n, p } => {
                let n = n as f64;
                (n * p, n * p * (1.0 - p))
            }
            Self::Hypergeometric {
                population,
                successes,
                draws,
            } => {
                let (nn, kk, n) = (population as f64, successes as f64, draws as f64);
                let var = if population > 1 {
                    n * kk * (nn - kk) * (nn - n) / (nn * nn * (nn - 1.0))
                } else {
                    0.0
                };
                (n * kk / nn, var)
            }
            Self::NegativeBinomial { r, k } => (r * (1.0 - k) / k, r * (1.0 - k) / (k * k)),
            Self::Geometric { k } => (1.0 / k, (1.0 - k) / (k * k)),
            Self::GeometricShifted { k } => ((1.0 - k) / k, (1.0 - k) / (k * k)),
        };
        Moments { mean, variance }
    }

    pub fn dispersion(&self) -> Dispersion {
        self.moments().dispersion()
    }

    /// Builds the inverse-CDF sampler for this law.
    pub fn sampler(&self) -> Result<DisorderSampler> {
        DisorderSampler::new(*self)
    }

    /// Looks up a named preset (see [`table_two_presets`]).
    pub fn preset(name: &str) -> Option<Self> {
        table_two_presets()
            .into_iter()
            .find(|p| p.name == name)
            .map(|p| p.spec)
    }

    fn from_pairs(family: &str, pairs: &[(&str, &str)]) -> Result<Self> {
        let get = |key: &str| -> Result<&str> {
            pairs
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| invalid(format!("{family} disorder is missing `{key}`")))
        };
        let float = |key: &str| -> Result<f64> {
            let v = get(key)?;
            v.parse()
                .map_err(|_| invalid(format!("`{key}={v}` is not a number")))
        };
        let int = |key: &str| -> Result<u32> {
            let v = get(key)?;
            v.parse()
                .map_err(|_| invalid(format!("`{key}={v}` is not a nonnegative integer")))
        };
        let allowed: &[&str] = match family {
            "poisson" => &["lambda"],
            "binomial" => &["n", "p"],
            "hypergeometric" => &["N", "K", "n"],
            "negative_binomial" | "negbinomial" | "negative-binomial" => &["r", "k"],
            "geometric" | "geometric_shifted" | "geometric-shifted" => &["k"],
            other => return Err(Error::UnknownFamily(other.to_string())),
        };
        if let Some((k, _)) = pairs.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(invalid(format!("unknown key `{k}` for {family} disorder")));
        }
        match family {
            "poisson" => Self::poisson(float("lambda")?),
            "binomial" => Self::binomial(int("n")?, float("p")?),
            "hypergeometric" => Self::hypergeometric(int("N")?, int("K")?, int("n")?),
            "geometric" => Self::geometric(float("k")?),
            "geometric_shifted" | "geometric-shifted" => Self::geometric_shifted(float("k")?),
            _ => Self::negative_binomial(float("r")?, float("k")?),
        }
    }
}

impl fmt::Display for DisorderSpec {
    /// Canonical key-value text, e.g. `family=poisson lambda=1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family={}", self.family())?;
        match *self {
            Self::Poisson { lambda } => write!(f, " lambda={lambda}"),
            Self::Binomial { n, p } => write!(f, " n={n} p={p}"),
            Self::Hypergeometric {
                population,
                successes,
                draws,
            } => write!(f, " N={population} K={successes} n={draws}"),
            Self::NegativeBinomial { r, k } => write!(f, " r={r} k={k}"),
            Self::Geometric { k } | Self::GeometricShifted { k } => write!(f, " k={k}"),
        }
    }
}

impl FromStr for DisorderSpec {
    type Err = Error;

    /// Accepts a preset name, `family:key=value,...`, or the key-value text
    /// produced by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(spec) = Self::preset(s) {
            return Ok(spec);
        }
        if let Some(rest) = s.strip_prefix("family=") {
            let mut parts = rest.split_whitespace();
            let family = parts.next().unwrap_or_default();
            let pairs = parts.map(split_pair).collect::<Result<Vec<_>>>()?;
            return Self::from_pairs(family, &pairs);
        }
        let (family, params) = s.split_once(':').unwrap_or((s, ""));
        let pairs = params
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(split_pair)
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(family.trim(), &pairs)
    }
}

fn split_pair(kv: &str) -> Result<(&str, &str)> {
    kv.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| invalid(format!("expected key=value, got `{kv}`")))
}

/// A named parameterization used for the unit-mean disorder comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisorderPreset {
    pub name: &'static str,
    pub spec: DisorderSpec,
    /// Caveat carried into output metadata, if any.
    pub note: Option<&'static str>,
}

/// Presets for the binomial, hypergeometric, negative binomial and geometric
/// comparison rows.
pub fn table_two_presets() -> Vec<DisorderPreset> {
    vec![
        DisorderPreset {
            name: "tableII-binomial",
            spec: DisorderSpec::Binomial { n: 2, p: 0.5 },
            note: None,
        },
        DisorderPreset {
            name: "tableII-hypergeometric",
            spec: DisorderSpec::Hypergeometric {
                population: 10,
                successes: 5,
                draws: 2,
            },
            note: None,
        },
        DisorderPreset {
            name: "tableII-negbinomial",
            spec: DisorderSpec::NegativeBinomial { r: 1.0, k: 0.5 },
            note: None,
        },
        DisorderPreset {
            name: "tableII-geometric",
            spec: DisorderSpec::Geometric { k: 0.5 },
            note: Some(
                "geometric on l >= 1 with k = 1/2: variance 2 but mean 2; \
                 a unit-mean geometric with variance 2 coincides with tableII-negbinomial",
            ),
        },
    ]
}

/// Inverse-CDF sampler over a truncated cumulative table.
#[derive(Debug, Clone)]
pub struct DisorderSampler {
    spec: DisorderSpec,
    offset: u64,
    cdf: Vec<f64>,
}

impl DisorderSampler {
    pub fn new(spec: DisorderSpec) -> Result<Self> {
        spec.validate()?;
        let (lo, hi) = spec.support();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        let mut l = lo;
        loop {
            acc += spec.pmf(l);
            cdf.push(acc);
            if hi == Some(l) || 1.0 - acc < CDF_TAIL_CUTOFF {
                break;
            }
            if cdf.len() >= MAX_TABLE_LEN {
                return Err(invalid(format!(
                    "{spec}: tail too heavy for an inverse-CDF table"
                )));
            }
            l += 1;
        }
        Ok(Self {
            spec,
            offset: lo,
            cdf,
        })
    }

    pub fn spec(&self) -> &DisorderSpec {
        &self.spec
    }

    /// Largest length the table can return.
    pub fn max_length(&self) -> u64 {
        self.offset + self.cdf.len() as u64 - 1
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        let total = *self.cdf.last().expect("table is never empty");
        let idx = self
            .cdf
            .partition_point(|c| *c <= u * total)
            .min(self.cdf.len() - 1);
        (self.offset + idx as u64) as u32
    }
}

/// One sampled sequence of step lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    pub seed: u64,
    pub lengths: Vec<u32>,
}

pub fn sample_realization(spec: &DisorderSpec, n_steps: usize, seed: u64) -> Result<Realization> {
    Ok(spec.sampler()?.realization(n_steps, seed))
}

impl DisorderSampler {
    pub fn realization(&self, n_steps: usize, seed: u64) -> Realization {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Realization {
            seed,
            lengths: (0..n_steps).map(|_| self.sample(&mut rng)).collect(),
        }
    }
}

/// Seed of realization `index` in an ensemble with `master_seed`.
pub fn realization_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
