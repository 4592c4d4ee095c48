//! Truncated formal power series and the Hadamard-walk absorption generating
//! functions built from them.
//!
//! For a Hadamard walk absorbed at `m1 > 0` the absorption amplitudes are the
//! coefficients of `G(z) = g(z)^m1` (start `|0,R>`) or `G(z) = f(z) g(z)^(m1-1)`
//! (start `|0,L>`), with
//!
//! ```text
//! f(z) = (1 + z^2 - sqrt(1 + z^4)) / (sqrt2 z)
//! g(z) = (1 - z^2 - sqrt(1 + z^4)) / (sqrt2 z)
//! ```
//!
//! Absorbers on the negative side are handled by reflecting the lattice,
//! which swaps the roles of the two coin states.

use std::f64::consts::SQRT_2;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::classical::ln_factorial;
use crate::error::{Error, Result};

/// Default truncation order for absorption sums.
pub const DEFAULT_ORDER: usize = 1 << 14;

/// Real power series `c_0 + c_1 z + ... + c_T z^T`, exact up to degree `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<f64>,
}

impl PowerSeries {
    /// Series with the given coefficients; the order is `coeffs.len() - 1`.
    ///
    /// # Panics
    ///
    /// Panics if `coeffs` is empty.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least c_0");
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(vec![0.0; order + 1])
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = 1.0;
        s
    }

    /// `z^k`, truncated at `order`.
    pub fn monomial(k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = 1.0;
        }
        s
    }

    /// Truncation order `T`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `z^k`; zero above the truncation order.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn truncate(mut self, order: usize) -> Self {
        self.coeffs.truncate(order + 1);
        self
    }

    pub fn scale(mut self, factor: f64) -> Self {
        self.coeffs.iter_mut().for_each(|c| *c *= factor);
        self
    }

    /// Divides by `z`. The constant term must vanish; the order drops by one.
    pub fn div_z(&self) -> Result<Self> {
        if self.coeffs[0] != 0.0 {
            return Err(Error::SeriesInconsistency(format!(
                "cannot divide by z with nonzero constant term {}",
                self.coeffs[0]
            )));
        }
        if self.order() == 0 {
            return Err(Error::SeriesInconsistency(
                "cannot divide an order-0 series by z".into(),
            ));
        }
        Ok(Self::new(self.coeffs[1..].to_vec()))
    }

    /// Truncated product; the result has the smaller of the two orders.
    pub fn mul_series(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![0.0; order + 1];
        let b = &other.coeffs[..=order];
        for (i, &a) in self.coeffs[..=order].iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (o, &bj) in out[i..].iter_mut().zip(b) {
                *o += a * bj;
            }
        }
        Self::new(out)
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, mut k: u32) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_series(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_series(&base);
            }
        }
        result
    }

    /// Square root of a series with positive constant term (`s^2 = self`).
    pub fn sqrt(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if !(a0 > 0.0) {
            return Err(Error::SeriesInconsistency(format!(
                "square root needs a positive constant term, got {a0}"
            )));
        }
        let n = self.coeffs.len();
        let mut s = vec![0.0; n];
        s[0] = a0.sqrt();
        for k in 1..n {
            let cross: f64 = (1..k).map(|i| s[i] * s[k - i]).sum();
            s[k] = (self.coeffs[k] - cross) / (2.0 * s[0]);
        }
        Ok(Self::new(s))
    }

    /// Largest absolute coefficient difference up to the common order.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let order = self.order().min(other.order());
        Self::new(
            (0..=order)
                .map(|k| op(self.coeffs[k], other.coeffs[k]))
                .collect(),
        )
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: Self) -> PowerSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: Self) -> PowerSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: Self) -> PowerSeries {
        self.mul_series(rhs)
    }
}

impl Neg for PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        self.scale(-1.0)
    }
}

/// `sqrt(1 + z^4)` to order `order`: `binom(1/2, k)` at degree `4k`.
pub fn series_sqrt_one_plus_z4(order: usize) -> PowerSeries {
    let mut s = PowerSeries::zero(order);
    let mut c = 1.0;
    for k in 0..=order / 4 {
        s.coeffs[4 * k] = c;
        c *= (0.5 - k as f64) / (k as f64 + 1.0);
    }
    s
}

/// `f(z)` to order `order`.
pub fn series_f(order: usize) -> Result<PowerSeries> {
    half_generator(order, 1.0)
}

/// `g(z)` to order `order`.
pub fn series_g(order: usize) -> Result<PowerSeries> {
    half_generator(order, -1.0)
}

// (1 + sign z^2 - sqrt(1 + z^4)) / (sqrt2 z), numerator built to order + 1.
fn half_generator(order: usize, sign: f64) -> Result<PowerSeries> {
    let num_order = order + 1;
    let mut num = -series_sqrt_one_plus_z4(num_order);
    num.coeffs[0] += 1.0;
    if num_order >= 2 {
        num.coeffs[2] += sign;
    }
    if num.coeffs[0].abs() > 0.0 {
        return Err(Error::SeriesInconsistency(format!(
            "numerator constant term {} should vanish",
            num.coeffs[0]
        )));
    }
    num.coeffs[0] = 0.0;
    Ok(num.div_z()?.scale(1.0 / SQRT_2))
}

/// Coin state the walker starts in, for the generating-function routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StartCoin {
    L,
    R,
}

impl StartCoin {
    fn mirrored(self) -> Self {
        match self {
            StartCoin::L => StartCoin::R,
            StartCoin::R => StartCoin::L,
        }
    }
}

impl std::str::FromStr for StartCoin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "l" => Ok(StartCoin::L),
            "R" | "r" => Ok(StartCoin::R),
            other => Err(Error::InvalidParameter(format!(
                "initial coin state must be L or R, got `{other}`"
            ))),
        }
    }
}

impl std::fmt::Display for StartCoin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StartCoin::L => "L",
            StartCoin::R => "R",
        })
    }
}

/// `G(z)` whose degree-`t` coefficient is the amplitude of first absorption
/// at step `t`, for the standard Hadamard walk started at the origin.
///
/// For `m1 < 0` the amplitudes are those of the mirrored problem (`|m1|`,
/// opposite coin state); they agree with the simulated ones up to sign.
pub fn generating_function(m1: i64, start: StartCoin, order: usize) -> Result<PowerSeries> {
    if m1 == 0 {
        return Err(Error::AbsorberAtOrigin);
    }
    if m1 < 0 {
        return generating_function(-m1, start.mirrored(), order);
    }
    let g = series_g(order)?;
    let m = m1 as u32;
    Ok(match start {
        StartCoin::R => g.pow(m),
        StartCoin::L => series_f(order)?.mul_series(&g.pow(m - 1)),
    })
}

/// `p_t = |[z^t] G(z)|^2` for `t = 0..=order`.
pub fn absorption_probabilities(m1: i64, start: StartCoin, order: usize) -> Result<Vec<f64>> {
    Ok(generating_function(m1, start, order)?
        .coeffs()
        .iter()
        .map(|a| a * a)
        .collect())
}

/// Closed-form `p_t` for `m1 = 2`, start `|0,L>`: nonzero only at `t = 4m - 2`.
pub fn quantum_absorption_prob(t: u64) -> f64 {
    if t < 2 || !(t + 2).is_multiple_of(4) {
        return 0.0;
    }
    let m = (t + 2) / 4;
    let ln_amp = ln_factorial(2 * m - 2)
        - (2 * m - 1) as f64 * std::f64::consts::LN_2
        - ln_factorial(m - 1)
        - ln_factorial(m);
    (2.0 * ln_amp).exp()
}

/// How the sums beyond the truncation order are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailModel {
    /// Plain partial sums up to the truncation order.
    None,
    /// Fit `p_t ~ c t^(-beta)` on the last decade and integrate the remainder.
    PowerLaw,
}

impl std::str::FromStr for TailModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(TailModel::None),
            "power_law" | "power-law" => Ok(TailModel::PowerLaw),
            other => Err(Error::InvalidParameter(format!("unknown tail model `{other}`"))),
        }
    }
}

/// Fitted power-law tail and its contributions past the truncation order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawTail {
    pub amplitude: f64,
    pub exponent: f64,
    /// Estimate of `sum_{t > T} p_t`.
    pub mass: f64,
    /// Estimate of `sum_{t > T} t p_t`.
    pub first_moment: f64,
}

const TAIL_BLOCK: usize = 8;

/// Fits block-averaged `p_t` over the last decade of `probs` (indexed by `t`).
///
/// Returns `None` when the tail is too short, empty, or too heavy for a
/// finite first moment.
pub fn fit_power_law_tail(probs: &[f64]) -> Option<PowerLawTail> {
    let order = probs.len().checked_sub(1)?;
    let end = order + 1;
    let blocks = (end - order / 10) / TAIL_BLOCK;
    if blocks < 3 {
        return None;
    }
    let start = end - blocks * TAIL_BLOCK;
    let mut xs = Vec::with_capacity(blocks);
    let mut ys = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let lo = start + b * TAIL_BLOCK;
        let density = probs[lo..lo + TAIL_BLOCK].iter().sum::<f64>() / TAIL_BLOCK as f64;
        if density <= 0.0 {
            return None;
        }
        xs.push((lo as f64 + (TAIL_BLOCK as f64 - 1.0) / 2.0).ln());
        ys.push(density.ln());
    }
    let (slope, intercept) = ols(&xs, &ys);
    let exponent = -slope;
    if !(exponent > 2.0) {
        return None;
    }
    let amplitude = intercept.exp();
    let edge = order as f64 + 0.5;
    Some(PowerLawTail {
        amplitude,
        exponent,
        mass: amplitude * edge.powf(1.0 - exponent) / (exponent - 1.0),
        first_moment: amplitude * edge.powf(2.0 - exponent) / (exponent - 2.0),
    })
}

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Total absorption `P` and mean absorbing time `t_a` from one probability table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionSummary {
    pub m1: i64,
    pub total: f64,
    pub mean_time: f64,
    pub tail: Option<PowerLawTail>,
}

fn summarize(m1: i64, probs: &[f64], tail: TailModel) -> Result<AbsorptionSummary> {
    let mut total: f64 = probs.iter().sum();
    let mut moment: f64 = probs.iter().enumerate().map(|(t, p)| t as f64 * p).sum();
    let fitted = match tail {
        TailModel::None => None,
        TailModel::PowerLaw => fit_power_law_tail(probs),
    };
    if let Some(tail) = fitted {
        total += tail.mass;
        moment += tail.first_moment;
    }
    if !(total > 0.0) {
        return Err(Error::NoAbsorption {
            horizon: probs.len().saturating_sub(1),
        });
    }
    Ok(AbsorptionSummary {
        m1,
        total,
        mean_time: moment / total,
        tail: fitted,
    })
}

/// `P = sum_t |a_t|^2`, optionally with the tail beyond `order` added.
pub fn total_absorption(m1: i64, start: StartCoin, order: usize, tail: TailModel) -> Result<f64> {
    Ok(absorption_summary(m1, start, order, tail)?.total)
}

/// `t_a = sum_t t |a_t|^2 / sum_t |a_t|^2`.
pub fn avg_absorb_time(m1: i64, start: StartCoin, order: usize, tail: TailModel) -> Result<f64> {
    Ok(absorption_summary(m1, start, order, tail)?.mean_time)
}

pub fn absorption_summary(
    m1: i64,
    start: StartCoin,
    order: usize,
    tail: TailModel,
) -> Result<AbsorptionSummary> {
    if (order as u64) < m1.unsigned_abs() {
        return Err(Error::InvalidParameter(format!(
            "truncation order {order} is below |m1| = {}",
            m1.unsigned_abs()
        )));
    }
    summarize(m1, &absorption_probabilities(m1, start, order)?, tail)
}

/// `P` and `t_a` for absorbers `1..=max_m1`, reusing the powers of `g`.
pub fn absorption_table(
    max_m1: u32,
    start: StartCoin,
    order: usize,
    tail: TailModel,
) -> Result<Vec<AbsorptionSummary>> {
    let f = series_f(order)?;
    let g = series_g(order)?;
    let mut g_pow = PowerSeries::one(order);
    let mut rows = Vec::with_capacity(max_m1 as usize);
    for m1 in 1..=max_m1 {
        let amplitude = match start {
            StartCoin::L => f.mul_series(&g_pow),
            StartCoin::R => g_pow.mul_series(&g),
        };
        g_pow = g_pow.mul_series(&g);
        let probs: Vec<f64> = amplitude.coeffs().iter().map(|a| a * a).collect();
        rows.push(summarize(m1 as i64, &probs, tail)?);
    }
    Ok(rows)
}
