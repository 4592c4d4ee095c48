//! Disorder ensembles: per-realization runs, averaged curves and the
//! log-log spreading-exponent fit.
//!
//! Realization `i` draws its step lengths from `realization_seed(master_seed, i)`,
//! so results do not depend on how realizations are scheduled. Per-realization
//! outputs are collected in index order and summed sequentially.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::classical::{run_classical, ClassicalRunConfig};
use crate::disorder::{realization_seed, DisorderSpec};
use crate::error::{Error, Result};
use crate::walk::{
    run_quantum, AbsorberConfig, AbsorptionRecord, CoinKind, CoinState, StepLengths,
    WalkRunConfig,
};

/// Default fit window for spreading exponents.
pub const DEFAULT_FIT_RANGE: (u64, u64) = (20, 80);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Quantum,
    Classical,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(Engine::Quantum),
            "classical" => Ok(Engine::Classical),
            other => Err(Error::InvalidParameter(format!(
                "unknown engine `{other}` (expected quantum or classical)"
            ))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Quantum => "quantum",
            Engine::Classical => "classical",
        })
    }
}

/// An ensemble of walks sharing everything except the step-length realization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleConfig {
    pub engine: Engine,
    /// Ignored by the classical engine.
    pub coin: CoinKind,
    /// Ignored by the classical engine.
    pub coin_state: CoinState,
    pub absorber: Option<AbsorberConfig>,
    /// `None` runs the clean walk; every realization is then identical and
    /// only one is computed.
    pub disorder: Option<DisorderSpec>,
    pub realizations: usize,
    pub steps: usize,
    pub master_seed: u64,
    /// Thread budget; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl EnsembleConfig {
    pub fn new(engine: Engine, steps: usize) -> Self {
        Self {
            engine,
            coin: CoinKind::Hadamard,
            coin_state: CoinState::L,
            absorber: None,
            disorder: None,
            realizations: 1,
            steps,
            master_seed: 0,
            workers: None,
        }
    }

    pub fn with_absorber(mut self, absorber: AbsorberConfig) -> Self {
        self.absorber = Some(absorber);
        self
    }

    pub fn with_disorder(mut self, spec: DisorderSpec, realizations: usize) -> Self {
        self.disorder = Some(spec);
        self.realizations = realizations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_coin(mut self, coin: CoinKind, state: CoinState) -> Self {
        self.coin = coin;
        self.coin_state = state;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::InvalidParameter("realizations must be >= 1".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be >= 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be >= 1".into()));
        }
        if matches!(self.absorber, Some(a) if a.position == 0) {
            return Err(Error::AbsorberAtOrigin);
        }
        if let Some(spec) = &self.disorder {
            spec.validate()?;
        }
        Ok(())
    }

    /// Number of walks actually computed.
    pub fn effective_realizations(&self) -> usize {
        if self.disorder.is_some() {
            self.realizations
        } else {
            1
        }
    }
}

/// Absorption record and spreading curve of one realization.
#[derive(Debug, Clone)]
pub struct RealizationRun {
    pub seed: Option<u64>,
    pub record: AbsorptionRecord,
    pub sigma: Vec<f64>,
}

/// Runs realization `index` of the ensemble.
pub fn run_realization(config: &EnsembleConfig, index: usize) -> Result<RealizationRun> {
    let (seed, lengths) = match &config.disorder {
        Some(spec) => {
            let seed = realization_seed(config.master_seed, index as u64);
            let r = spec.sampler()?.realization(config.steps, seed);
            (Some(seed), StepLengths::Sequence(r.lengths))
        }
        None => (None, StepLengths::Clean),
    };
    let (record, sigma) = match config.engine {
        Engine::Quantum => {
            let mut cfg = WalkRunConfig::new(config.coin.operator(), config.coin_state, config.steps)
                .with_step_lengths(lengths);
            cfg.absorber = config.absorber;
            let run = run_quantum(&cfg)?;
            (run.record, run.sigma)
        }
        Engine::Classical => {
            let mut cfg = ClassicalRunConfig::new(config.steps).with_step_lengths(lengths);
            cfg.absorber = config.absorber;
            let run = run_classical(&cfg)?;
            (run.record, run.sigma)
        }
    };
    Ok(RealizationRun {
        seed,
        record,
        sigma,
    })
}

/// Runs every realization and applies `extract`; output is in index order.
pub fn map_realizations<T, F>(config: &EnsembleConfig, extract: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(RealizationRun) -> T + Sync + Send,
{
    config.validate()?;
    let count = config.effective_realizations();
    let work = || {
        (0..count)
            .into_par_iter()
            .map(|i| run_realization(config, i).map(&extract))
            .collect::<Result<Vec<T>>>()
    };
    match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Pointwise ensemble average over an integer abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedCurve {
    pub abscissa: Vec<u64>,
    pub values: Vec<f64>,
    /// Standard error of the mean; zero when fewer than two samples contribute.
    pub std_errors: Vec<f64>,
    /// Realizations contributing at each point.
    pub counts: Vec<usize>,
    pub realizations: usize,
}

impl AveragedCurve {
    /// Realizations left out at each point.
    pub fn excluded(&self) -> Vec<usize> {
        self.counts.iter().map(|c| self.realizations - c).collect()
    }

    pub fn total_excluded(&self) -> usize {
        self.excluded().iter().sum()
    }

    /// Averages `samples[i][j]` over `i` for each point `j`; `None` entries
    /// are skipped. Sums run in realization order.
    pub fn from_samples(abscissa: Vec<u64>, samples: &[Vec<Option<f64>>]) -> Result<Self> {
        let k = abscissa.len();
        let mut values = Vec::with_capacity(k);
        let mut std_errors = Vec::with_capacity(k);
        let mut counts = Vec::with_capacity(k);
        for j in 0..k {
            let column: Vec<f64> = samples.iter().filter_map(|s| s[j]).collect();
            if column.is_empty() {
                return Err(Error::AllRealizationsExcluded {
                    horizon: abscissa[j] as usize,
                });
            }
            let n = column.len() as f64;
            let mean = column.iter().sum::<f64>() / n;
            let se = if column.len() > 1 {
                let var = column.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            values.push(mean);
            std_errors.push(se);
            counts.push(column.len());
        }
        Ok(Self {
            abscissa,
            values,
            std_errors,
            counts,
            realizations: samples.len(),
        })
    }

    /// Value at abscissa `x`, if present.
    pub fn value_at(&self, x: u64) -> Option<f64> {
        self.abscissa
            .iter()
            .position(|a| *a == x)
            .map(|i| self.values[i])
    }
}

fn check_grid(grid: &[usize], steps: usize, what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!("empty {what} grid")));
    }
    if let Some(t) = grid.iter().find(|t| **t == 0 || **t > steps) {
        return Err(Error::InvalidParameter(format!(
            "{what} {t} outside 1..={steps}"
        )));
    }
    Ok(())
}

/// `<t_a^(n)>` at each horizon `n`; realizations with nothing absorbed by `n`
/// are excluded from that horizon.
pub fn disorder_avg_absorb_time(config: &EnsembleConfig, horizons: &[usize]) -> Result<AveragedCurve> {
    if config.absorber.is_none() {
        return Err(Error::InvalidParameter(
            "absorbing-time averages need an absorber".into(),
        ));
    }
    check_grid(horizons, config.steps, "horizon")?;
    let samples = map_realizations(config, |run| {
        let running = run.record.running_avg_time();
        horizons.iter().map(|n| running[n - 1]).collect::<Vec<_>>()
    })?;
    AveragedCurve::from_samples(horizons.iter().map(|n| *n as u64).collect(), &samples)
}

/// `<sigma(t)>` at each `t`, averaging per-realization spreads.
pub fn disorder_avg_sigma(config: &EnsembleConfig, t_grid: &[usize]) -> Result<AveragedCurve> {
    check_grid(t_grid, config.steps, "time")?;
    let samples = map_realizations(config, |run| {
        t_grid.iter().map(|t| Some(run.sigma[t - 1])).collect::<Vec<_>>()
    })?;
    AveragedCurve::from_samples(t_grid.iter().map(|t| *t as u64).collect(), &samples)
}

/// Alias of [`AbsorptionRecord::finite_horizon_avg_time`].
pub fn finite_horizon_avg_time(record: &AbsorptionRecord, n: usize) -> Result<f64> {
    record.finite_horizon_avg_time(n)
}

/// Straight-line fit of `ln value` against `ln t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub alpha: f64,
    pub intercept: f64,
    /// Slope standard error times the two-sided 95% Student-t quantile.
    pub ci95_halfwidth: f64,
    /// Root-mean-square residual in log space.
    pub residual_rms: f64,
    pub fit_range: (u64, u64),
    pub points: usize,
}

/// Ordinary least squares on `(ln t, ln value)` for `t_lo <= t <= t_hi`.
pub fn fit_exponent(curve: &AveragedCurve, t_lo: u64, t_hi: u64) -> Result<FitResult> {
    if t_lo >= t_hi || t_lo == 0 {
        return Err(Error::InvalidParameter(format!(
            "fit range needs 0 < t_lo < t_hi, got {t_lo}:{t_hi}"
        )));
    }
    let mut pts = Vec::new();
    for (t, v) in curve.abscissa.iter().zip(&curve.values) {
        if (t_lo..=t_hi).contains(t) {
            if !(*v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveCurveValue {
                    abscissa: *t,
                    value: *v,
                });
            }
            pts.push(((*t as f64).ln(), v.ln()));
        }
    }
    let k = pts.len();
    if k < 3 {
        return Err(Error::TooFewPoints {
            t_lo,
            t_hi,
            found: k,
        });
    }
    let kf = k as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / kf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / kf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let ssr: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - alpha * p.0).powi(2))
        .sum();
    let se = (ssr / (kf - 2.0) / sxx).sqrt();
    let quantile = StudentsT::new(0.0, 1.0, kf - 2.0)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(FitResult {
        alpha,
        intercept,
        ci95_halfwidth: se * quantile,
        residual_rms: (ssr / kf).sqrt(),
        fit_range: (t_lo, t_hi),
        points: k,
    })
}

/// Averages `<sigma>` over every integer `t` in the range and fits it.
pub fn ensemble_exponent(config: &EnsembleConfig, t_lo: u64, t_hi: u64) -> Result<(AveragedCurve, FitResult)> {
    let grid: Vec<usize> = (t_lo as usize..=t_hi as usize).collect();
    let curve = disorder_avg_sigma(config, &grid)?;
    let fit = fit_exponent(&curve, t_lo, t_hi)?;
    Ok((curve, fit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: impl Fn(f64) -> f64, range: std::ops::RangeInclusive<u64>) -> AveragedCurve {
        let abscissa: Vec<u64> = range.collect();
        let samples = vec![abscissa.iter().map(|t| Some(f(*t as f64))).collect()];
        AveragedCurve::from_samples(abscissa, &samples).unwrap()
    }

    #[test]
    fn exact_power_law_fit() {
        let curve = synthetic(|t| 3.0 * t.powf(0.7), 1..=100);
        let fit = fit_exponent(&curve, 20, 80).unwrap();
        assert!((fit.alpha - 0.7).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.residual_rms < 1e-12);
        assert_eq!(fit.points, 61);
    }

    #[test]
    fn fit_errors() {
        let curve = synthetic(|t| t - 30.0, 1..=100);
        assert_eq!(
            fit_exponent(&curve, 20, 80),
            Err(Error::NonPositiveCurveValue {
                abscissa: 20,
                value: -10.0
            })
        );
        let curve = synthetic(|t| t, 1..=100);
        assert!(matches!(
            fit_exponent(&curve, 20, 21),
            Err(Error::TooFewPoints { found: 2, .. })
        ));
        assert!(fit_exponent(&curve, 50, 20).is_err());
    }

    #[test]
    fn ci_matches_student_t_by_hand() {
        // Three points with one unit of residual: se = sqrt(ssr / 1 / sxx).
        let abscissa = vec![1, 2, 4];
        let ln2 = 2f64.ln();
        let vals = [0.0, ln2 + 0.5, 2.0 * ln2];
        let samples = vec![vals.iter().map(|v| Some(v.exp())).collect()];
        let curve = AveragedCurve::from_samples(abscissa, &samples).unwrap();
        let fit = fit_exponent(&curve, 1, 4).unwrap();
        let xs = [0.0, ln2, 2.0 * ln2];
        let mx = ln2;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let resid: f64 = xs
            .iter()
            .zip(&vals)
            .map(|(x, y)| (y - fit.intercept - fit.alpha * x).powi(2))
            .sum();
        // t quantile at 1 dof, 97.5%: tan(pi * 0.475).
        let q = (std::f64::consts::PI * 0.475).tan();
        let expect = (resid / sxx).sqrt() * q;
        assert!((fit.ci95_halfwidth - expect).abs() < 1e-9, "{} {}", fit.ci95_halfwidth, expect);
    }

    #[test]
    fn classical_point_mass_sigma_is_sqrt_t() {
        let spec = DisorderSpec::geometric(1.0).unwrap();
        let cfg = EnsembleConfig::new(Engine::Classical, 50).with_disorder(spec, 1);
        let grid: Vec<usize> = (1..=50).collect();
        let curve = disorder_avg_sigma(&cfg, &grid).unwrap();
        for (t, s) in curve.abscissa.iter().zip(&curve.values) {
            assert!((s - (*t as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn point_mass_matches_clean_absorption() {
        let abs = AbsorberConfig::new(2).unwrap();
        let clean = EnsembleConfig::new(Engine::Quantum, 200).with_absorber(abs);
        let point = clean
            .clone()
            .with_disorder(DisorderSpec::geometric(1.0).unwrap(), 3);
        let h = [10, 50, 200];
        let a = disorder_avg_absorb_time(&clean, &h).unwrap();
        let b = disorder_avg_absorb_time(&point, &h).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-12);
        }
        let expect = (2.0 * 0.25 + 6.0 / 64.0 + 10.0 / 256.0) / (0.25 + 1.0 / 64.0 + 1.0 / 256.0);
        assert!((a.values[0] - expect).abs() < 1e-12);
    }

    #[test]
    fn exclusions_are_counted() {
        // Absorber at 3: nothing is absorbed before t = 3 in a clean walk.
        let cfg = EnsembleConfig::new(Engine::Classical, 5)
            .with_absorber(AbsorberConfig::new(3).unwrap())
            .with_disorder(DisorderSpec::geometric(1.0).unwrap(), 2);
        assert_eq!(
            disorder_avg_absorb_time(&cfg, &[2]),
            Err(Error::AllRealizationsExcluded { horizon: 2 })
        );
        let cfg = EnsembleConfig::new(Engine::Classical, 5)
            .with_absorber(AbsorberConfig::new(3).unwrap())
            .with_disorder(DisorderSpec::poisson(1.0).unwrap(), 30);
        let curve = disorder_avg_absorb_time(&cfg, &[3, 5]).unwrap();
        assert!(curve.counts[0] < 30 && curve.counts[0] > 0);
        assert_eq!(curve.excluded()[0], 30 - curve.counts[0]);
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let base = EnsembleConfig::new(Engine::Quantum, 40)
            .with_absorber(AbsorberConfig::new(2).unwrap())
            .with_disorder(DisorderSpec::poisson(1.0).unwrap(), 12)
            .with_seed(11);
        let grid: Vec<usize> = (1..=40).collect();
        let one = disorder_avg_sigma(&base.clone().with_workers(1), &grid).unwrap();
        let four = disorder_avg_sigma(&base.clone().with_workers(4), &grid).unwrap();
        assert_eq!(one, four);
        let other = disorder_avg_sigma(&base.with_seed(12), &grid).unwrap();
        assert_ne!(one, other);
    }

    #[test]
    fn standard_error_shrinks_with_ensemble_size() {
        let spec = DisorderSpec::poisson(1.0).unwrap();
        let grid = [30usize];
        let se = |r: usize| {
            let cfg = EnsembleConfig::new(Engine::Classical, 30)
                .with_disorder(spec, r)
                .with_seed(5);
            disorder_avg_sigma(&cfg, &grid).unwrap().std_errors[0]
        };
        let ratio = se(100) / se(400);
        assert!(ratio > 1.5 && ratio < 2.7, "{ratio}");
    }

    #[test]
    fn absorb_time_needs_absorber() {
        let cfg = EnsembleConfig::new(Engine::Quantum, 10);
        assert!(disorder_avg_absorb_time(&cfg, &[5]).is_err());
    }
}
