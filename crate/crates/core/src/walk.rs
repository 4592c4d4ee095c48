//! Discrete-time coined quantum walk: coin, shift, absorbing boundary and
//! full runs with per-step absorption and spreading records.
//!
//! One time step is `coin -> shift -> absorb`. The shift moves the `L`
//! component by `-l` and the `R` component by `+l`, where `l` is the step
//! length of that step (1 for a clean walk, drawn from a disorder law
//! otherwise). An enabled absorber at `m1 > 0` removes every amplitude that
//! lands at or beyond `m1` (symmetrically for `m1 < 0`).

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{QuantumState, WalkerState};

const UNITARITY_TOLERANCE: f64 = 1e-12;

/// Surviving mass below which a run is considered fully absorbed.
pub const EXHAUSTION_TOLERANCE: f64 = 1e-12;

/// 2x2 coin acting as `C|L> = a|L> + b|R>`, `C|R> = c|L> + d|R>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinOperator {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

/// Sign convention for the Hadamard coin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HadamardVariant {
    /// `a = b = c = 1/sqrt2`, `d = -1/sqrt2`.
    Standard,
    /// `a = -1/sqrt2`, `b = c = d = 1/sqrt2`.
    PaperSign,
}

impl CoinOperator {
    /// Validates unitarity of the coin columns.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let coin = Self { a, b, c, d };
        let deviation = coin.unitarity_defect();
        if deviation > UNITARITY_TOLERANCE {
            return Err(Error::NonUnitaryCoin { deviation });
        }
        Ok(coin)
    }

    pub fn hadamard(variant: HadamardVariant) -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match variant {
            HadamardVariant::Standard => Self { a: h, b: h, c: h, d: -h },
            HadamardVariant::PaperSign => Self { a: -h, b: h, c: h, d: h },
        }
    }

    /// Balanced coin `a = d = 1/sqrt2`, `b = c = i/sqrt2`.
    pub fn kempe() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let ih = Complex64::new(0.0, FRAC_1_SQRT_2);
        Self { a: h, b: ih, c: ih, d: h }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one }
    }

    /// Entries in the order `(a, b, c, d)`.
    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Largest violation among the three column orthonormality conditions.
    pub fn unitarity_defect(&self) -> f64 {
        let n1 = (self.a.norm_sqr() + self.b.norm_sqr() - 1.0).abs();
        let n2 = (self.c.norm_sqr() + self.d.norm_sqr() - 1.0).abs();
        let overlap = (self.a * self.c.conj() + self.b * self.d.conj()).norm();
        n1.max(n2).max(overlap)
    }

    #[inline]
    fn apply(&self, l: Complex64, r: Complex64) -> (Complex64, Complex64) {
        (self.a * l + self.c * r, self.b * l + self.d * r)
    }
}

/// Named coins accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoinKind {
    Hadamard,
    HadamardPaper,
    Kempe,
}

impl CoinKind {
    pub fn operator(self) -> CoinOperator {
        match self {
            CoinKind::Hadamard => CoinOperator::hadamard(HadamardVariant::Standard),
            CoinKind::HadamardPaper => CoinOperator::hadamard(HadamardVariant::PaperSign),
            CoinKind::Kempe => CoinOperator::kempe(),
        }
    }
}

impl FromStr for CoinKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hadamard" | "H" => Ok(CoinKind::Hadamard),
            "hadamard-paper" | "paper" => Ok(CoinKind::HadamardPaper),
            "kempe" => Ok(CoinKind::Kempe),
            other => Err(Error::InvalidParameter(format!("unknown coin `{other}`"))),
        }
    }
}

impl fmt::Display for CoinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoinKind::Hadamard => "hadamard",
            CoinKind::HadamardPaper => "hadamard-paper",
            CoinKind::Kempe => "kempe",
        })
    }
}

/// Internal coin state of the walker at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CoinState {
    L,
    R,
    /// `alpha_L |L> + alpha_R |R>` with `|alpha_L|^2 + |alpha_R|^2 = 1`.
    Superposition { alpha_l: Complex64, alpha_r: Complex64 },
}

impl CoinState {
    pub fn superposition(alpha_l: Complex64, alpha_r: Complex64) -> Result<Self> {
        let norm = alpha_l.norm_sqr() + alpha_r.norm_sqr();
        if (norm - 1.0).abs() > UNITARITY_TOLERANCE {
            return Err(Error::UnnormalizedCoinState { norm });
        }
        Ok(CoinState::Superposition { alpha_l, alpha_r })
    }

    /// `(|L> + i|R>) / sqrt2`, the symmetric Hadamard-walk start.
    pub fn symmetric() -> Self {
        CoinState::Superposition {
            alpha_l: Complex64::new(FRAC_1_SQRT_2, 0.0),
            alpha_r: Complex64::new(0.0, FRAC_1_SQRT_2),
        }
    }

    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match *self {
            CoinState::L => (one, zero),
            CoinState::R => (zero, one),
            CoinState::Superposition { alpha_l, alpha_r } => (alpha_l, alpha_r),
        }
    }
}

impl FromStr for CoinState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "l" | "left" => Ok(CoinState::L),
            "R" | "r" | "right" => Ok(CoinState::R),
            "sym" | "symmetric" => Ok(CoinState::symmetric()),
            other => Err(Error::InvalidParameter(format!(
                "unknown initial coin state `{other}` (expected L, R or sym)"
            ))),
        }
    }
}

impl fmt::Display for CoinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoinState::L => f.write_str("L"),
            CoinState::R => f.write_str("R"),
            CoinState::Superposition { alpha_l, alpha_r } => {
                write!(f, "({alpha_l})|L> + ({alpha_r})|R>")
            }
        }
    }
}

/// Absorbing site `m1`; the walker starts at the origin so `m1 = 0` is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorberConfig {
    pub position: i64,
    pub enabled: bool,
}

impl AbsorberConfig {
    pub fn new(position: i64) -> Result<Self> {
        if position == 0 {
            return Err(Error::AbsorberAtOrigin);
        }
        Ok(Self {
            position,
            enabled: true,
        })
    }

    /// Whether site `n` lies at or beyond the absorber.
    #[inline]
    pub fn captures(&self, n: i64) -> bool {
        if self.position > 0 {
            n >= self.position
        } else {
            n <= self.position
        }
    }
}

/// Per-step shift lengths of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepLengths {
    Clean,
    Sequence(Vec<u32>),
}

impl StepLengths {
    /// Length used at step `t` (1-based).
    #[inline]
    pub fn at(&self, t: usize) -> u32 {
        match self {
            StepLengths::Clean => 1,
            StepLengths::Sequence(ls) => ls[t - 1],
        }
    }

    fn covers(&self, steps: usize) -> bool {
        match self {
            StepLengths::Clean => true,
            StepLengths::Sequence(ls) => ls.len() >= steps,
        }
    }
}

/// Everything a single quantum run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkRunConfig {
    pub coin: CoinOperator,
    pub start: i64,
    pub coin_state: CoinState,
    pub steps: usize,
    pub absorber: Option<AbsorberConfig>,
    pub step_lengths: StepLengths,
}

impl WalkRunConfig {
    /// Clean walk from `|0, coin_state>` without absorber.
    pub fn new(coin: CoinOperator, coin_state: CoinState, steps: usize) -> Self {
        Self {
            coin,
            start: 0,
            coin_state,
            steps,
            absorber: None,
            step_lengths: StepLengths::Clean,
        }
    }

    pub fn with_absorber(mut self, absorber: AbsorberConfig) -> Self {
        self.absorber = Some(absorber);
        self
    }

    pub fn with_step_lengths(mut self, lengths: StepLengths) -> Self {
        self.step_lengths = lengths;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be positive".into()));
        }
        let deviation = self.coin.unitarity_defect();
        if deviation > UNITARITY_TOLERANCE {
            return Err(Error::NonUnitaryCoin { deviation });
        }
        if let CoinState::Superposition { alpha_l, alpha_r } = self.coin_state {
            CoinState::superposition(alpha_l, alpha_r)?;
        }
        if let Some(abs) = self.absorber {
            if abs.position == 0 {
                return Err(Error::AbsorberAtOrigin);
            }
        }
        if !self.step_lengths.covers(self.steps) {
            return Err(Error::InvalidParameter(format!(
                "step-length sequence shorter than {} steps",
                self.steps
            )));
        }
        Ok(())
    }

    pub fn initial_state(&self) -> QuantumState {
        let (l, r) = self.coin_state.amplitudes();
        QuantumState::localized(self.start, l, r)
    }
}

/// Probability absorbed at each step `t = 1..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionRecord {
    pub per_step: Vec<f64>,
    pub cumulative: f64,
}

impl AbsorptionRecord {
    pub fn from_per_step(per_step: Vec<f64>) -> Self {
        let cumulative = per_step.iter().sum();
        Self {
            per_step,
            cumulative,
        }
    }

    pub fn horizon(&self) -> usize {
        self.per_step.len()
    }

    /// `p_t` for 1-based `t`; zero beyond the horizon.
    pub fn at(&self, t: usize) -> f64 {
        if t == 0 {
            return 0.0;
        }
        self.per_step.get(t - 1).copied().unwrap_or(0.0)
    }

    /// `sum_{t<=n} p_t`.
    pub fn cumulative_at(&self, n: usize) -> f64 {
        self.per_step.iter().take(n).sum()
    }

    /// Finite-horizon average absorbing time `sum t p_t / sum p_t` over `t <= n`.
    pub fn finite_horizon_avg_time(&self, n: usize) -> Result<f64> {
        let (num, den) = self
            .per_step
            .iter()
            .take(n)
            .enumerate()
            .fold((0.0, 0.0), |(num, den), (i, p)| {
                (num + (i + 1) as f64 * p, den + p)
            });
        if !(den > 0.0) {
            return Err(Error::NoAbsorption { horizon: n });
        }
        Ok(num / den)
    }

    /// `t_a^(n)` for every `n = 1..=horizon`; `None` before the first absorption.
    pub fn running_avg_time(&self) -> Vec<Option<f64>> {
        let mut num = 0.0;
        let mut den = 0.0;
        self.per_step
            .iter()
            .enumerate()
            .map(|(i, p)| {
                num += (i + 1) as f64 * p;
                den += p;
                (den > 0.0).then(|| num / den)
            })
            .collect()
    }
}

/// Output of [`run_quantum`].
#[derive(Debug, Clone)]
pub struct QuantumRun {
    pub record: AbsorptionRecord,
    /// `sigma[t - 1]` is the spread of the surviving distribution after step `t`.
    pub sigma: Vec<f64>,
    pub final_state: QuantumState,
}

impl QuantumState {
    /// Applies the coin at every site.
    pub fn apply_coin(&mut self, coin: &CoinOperator) {
        for (l, r) in self.left.iter_mut().zip(self.right.iter_mut()) {
            (*l, *r) = coin.apply(*l, *r);
        }
    }

    /// Moves `L` amplitudes by `-l` and `R` amplitudes by `+l`.
    pub fn apply_shift(&mut self, l: u32) {
        if l == 0 || self.left.is_empty() {
            return;
        }
        let l = l as usize;
        let zero = Complex64::new(0.0, 0.0);
        let width = self.left.len() + 2 * l;
        // L keeps its index because n_min moves left by l; R moves 2l further.
        self.left.resize(width, zero);
        self.right.resize(width, zero);
        self.right.rotate_right(2 * l);
        self.n_min -= l as i64;
    }

    /// One walk step `S_l (I x C)`.
    pub fn step(&mut self, coin: &CoinOperator, l: u32) {
        self.apply_coin(coin);
        self.apply_shift(l);
        self.time += 1;
    }

    /// Removes everything at or beyond the absorber and returns the removed mass.
    pub fn apply_absorber(&mut self, absorber: &AbsorberConfig) -> f64 {
        if !absorber.enabled || self.left.is_empty() {
            return 0.0;
        }
        let len = self.left.len() as i64;
        let mass = |l: &[Complex64], r: &[Complex64]| -> f64 {
            l.iter().chain(r).map(|a| a.norm_sqr()).sum()
        };
        if absorber.position > 0 {
            let keep = (absorber.position - self.n_min).clamp(0, len) as usize;
            let absorbed = mass(&self.left[keep..], &self.right[keep..]);
            self.left.truncate(keep);
            self.right.truncate(keep);
            absorbed
        } else {
            let cut = (absorber.position - self.n_min + 1).clamp(0, len) as usize;
            let absorbed = mass(&self.left[..cut], &self.right[..cut]);
            self.left.drain(..cut);
            self.right.drain(..cut);
            self.n_min += cut as i64;
            absorbed
        }
    }
}

/// Runs `config.steps` steps, recording absorption and spreading after each.
pub fn run_quantum(config: &WalkRunConfig) -> Result<QuantumRun> {
    config.validate()?;
    let mut state = config.initial_state();
    let mut per_step = Vec::with_capacity(config.steps);
    let mut sigma = Vec::with_capacity(config.steps);
    for t in 1..=config.steps {
        state.step(&config.coin, config.step_lengths.at(t));
        let absorbed = match &config.absorber {
            Some(abs) => state.apply_absorber(abs),
            None => 0.0,
        };
        per_step.push(absorbed);
        if config.absorber.is_some() && state.total_mass() < EXHAUSTION_TOLERANCE {
            return Err(Error::MassExhausted { step: t });
        }
        sigma.push(state.std_dev()?);
    }
    Ok(QuantumRun {
        record: AbsorptionRecord::from_per_step(per_step),
        sigma,
        final_state: state,
    })
}
