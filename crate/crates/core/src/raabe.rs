//! Numerical Raabe diagnostic `E = lim n (u_n / u_{n+1} - 1)` for series of
//! positive terms: `E > 1` converges, `E < 1` diverges.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classical::ln_factorial;
use crate::error::{Error, Result};

/// Half-width of the band around `E = 1` reported as inconclusive.
pub const INCONCLUSIVE_BAND: f64 = 0.05;

/// A series of strictly positive terms `u_1, u_2, ...`.
pub trait PositiveSeries {
    fn term(&self, n: u64) -> f64;

    /// `u_n / u_{n+1}`. Override when the ratio has a closed form; the
    /// default divides two terms and loses precision once they underflow.
    fn ratio(&self, n: u64) -> f64 {
        self.term(n) / self.term(n + 1)
    }
}

impl<F: Fn(u64) -> f64> PositiveSeries for F {
    fn term(&self, n: u64) -> f64 {
        self(n)
    }
}

/// Summand of the clean classical mean absorbing time,
/// `u_n = (m1 + 2n)! / (4^n (m1 + n)! n!)`.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalMeanTimeTerms {
    pub m1: u64,
}

impl PositiveSeries for ClassicalMeanTimeTerms {
    fn term(&self, n: u64) -> f64 {
        let m = self.m1;
        (ln_factorial(m + 2 * n)
            - n as f64 * 4f64.ln()
            - ln_factorial(m + n)
            - ln_factorial(n))
        .exp()
    }

    fn ratio(&self, n: u64) -> f64 {
        let (m, n) = (self.m1 as f64, n as f64);
        4.0 * (n + 1.0) * (m + n + 1.0) / ((m + 2.0 * n + 1.0) * (m + 2.0 * n + 2.0))
    }
}

/// Numerator summand of the Hadamard mean absorbing time for `m1 = 2`,
/// `u_m = (4m - 2) ((2m - 2)! / (2^(2m-1) (m-1)! m!))^2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuantumMeanTimeTerms;

impl PositiveSeries for QuantumMeanTimeTerms {
    fn term(&self, m: u64) -> f64 {
        if m == 0 {
            return 0.0;
        }
        let ln_amp = ln_factorial(2 * m - 2)
            - (2 * m - 1) as f64 * std::f64::consts::LN_2
            - ln_factorial(m - 1)
            - ln_factorial(m);
        (4 * m - 2) as f64 * (2.0 * ln_amp).exp()
    }

    fn ratio(&self, m: u64) -> f64 {
        let m = m as f64;
        let amp = 2.0 * (m + 1.0) / (2.0 * m - 1.0);
        (4.0 * m - 2.0) / (4.0 * m + 2.0) * amp * amp
    }
}

/// `u_n = q^n` for `0 < q < 1`.
#[derive(Debug, Clone, Copy)]
pub struct GeometricTerms {
    pub q: f64,
}

impl PositiveSeries for GeometricTerms {
    fn term(&self, n: u64) -> f64 {
        self.q.powf(n as f64)
    }

    fn ratio(&self, _n: u64) -> f64 {
        1.0 / self.q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    Diverges,
    Inconclusive,
}

impl Verdict {
    pub fn from_estimate(e: f64) -> Self {
        if (e - 1.0).abs() < INCONCLUSIVE_BAND {
            Verdict::Inconclusive
        } else if e > 1.0 {
            Verdict::Converges
        } else {
            Verdict::Diverges
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Converges => "converges",
            Verdict::Diverges => "diverges",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaabeReport {
    /// `(n, E_n)` at geometrically spaced `n`.
    pub estimates: Vec<(u64, f64)>,
    /// Intercept of the least-squares fit `E_n = E + c / n` over `n >= n_max / 4`.
    pub extrapolated: f64,
    pub verdict: Verdict,
}

/// Evaluates `E_n` up to `n_max` and extrapolates to `n -> infinity`.
pub fn raabe_estimate<S: PositiveSeries + ?Sized>(series: &S, n_max: u64) -> Result<RaabeReport> {
    if n_max < 8 {
        return Err(Error::InvalidParameter(format!(
            "n_max must be at least 8, got {n_max}"
        )));
    }
    let mut estimates = Vec::new();
    for n in sample_points(n_max) {
        let r = series.ratio(n);
        if !(r > 0.0 && r.is_finite()) {
            let (index, value) = [n, n + 1]
                .into_iter()
                .map(|k| (k, series.term(k)))
                .find(|(_, v)| !(*v > 0.0 && v.is_finite()))
                .unwrap_or((n, r));
            return Err(Error::NonPositiveTerm { index, value });
        }
        estimates.push((n, n as f64 * (r - 1.0)));
    }

    let top: Vec<(f64, f64)> = estimates
        .iter()
        .filter(|(n, _)| *n >= n_max / 4)
        .map(|(n, e)| (1.0 / *n as f64, *e))
        .collect();
    let k = top.len() as f64;
    let mx = top.iter().map(|p| p.0).sum::<f64>() / k;
    let my = top.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = top.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = top.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let extrapolated = if sxx > 0.0 { my - sxy / sxx * mx } else { my };

    Ok(RaabeReport {
        estimates,
        extrapolated,
        verdict: Verdict::from_estimate(extrapolated),
    })
}

// Eight points per octave, deduplicated, ending exactly at n_max.
fn sample_points(n_max: u64) -> Vec<u64> {
    let mut points = Vec::new();
    let mut x = 1.0f64;
    while (x as u64) < n_max {
        let n = x.round() as u64;
        if points.last() != Some(&n) {
            points.push(n);
        }
        x *= 2f64.powf(0.125);
    }
    if points.last() != Some(&n_max) {
        points.push(n_max);
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_terms_diverge() {
        let report = raabe_estimate(&ClassicalMeanTimeTerms { m1: 2 }, 1_000_000).unwrap();
        assert!((report.extrapolated - 0.5).abs() < 0.01, "{}", report.extrapolated);
        assert_eq!(report.verdict, Verdict::Diverges);
    }

    #[test]
    fn quantum_terms_converge() {
        let report = raabe_estimate(&QuantumMeanTimeTerms, 1_000_000).unwrap();
        assert!((report.extrapolated - 2.0).abs() < 0.02, "{}", report.extrapolated);
        assert_eq!(report.verdict, Verdict::Converges);
    }

    #[test]
    fn geometric_terms_converge() {
        let report = raabe_estimate(&GeometricTerms { q: 0.5 }, 1 << 20).unwrap();
        for (n, e) in &report.estimates {
            assert!((e - *n as f64).abs() < 1e-9 * *n as f64);
        }
        assert_eq!(report.verdict, Verdict::Converges);
    }

    #[test]
    fn closed_form_ratios_match_term_ratios() {
        let c = ClassicalMeanTimeTerms { m1: 3 };
        let q = QuantumMeanTimeTerms;
        for n in [1u64, 2, 5, 17, 80] {
            assert!((c.ratio(n) - c.term(n) / c.term(n + 1)).abs() < 1e-11);
            assert!((q.ratio(n) - q.term(n) / q.term(n + 1)).abs() < 1e-11);
        }
    }

    #[test]
    fn nonpositive_term_is_reported() {
        let bad = |n: u64| if n >= 40 { 0.0 } else { 1.0 / (n * n) as f64 };
        match raabe_estimate(&bad, 100) {
            Err(Error::NonPositiveTerm { index, .. }) => assert!(index >= 40),
            other => panic!("expected error, got {other:?}"),
        }
    }

    #[test]
    fn verdict_band() {
        assert_eq!(Verdict::from_estimate(1.02), Verdict::Inconclusive);
        assert_eq!(Verdict::from_estimate(1.2), Verdict::Converges);
        assert_eq!(Verdict::from_estimate(0.8), Verdict::Diverges);
    }

    #[test]
    fn p_series_boundary() {
        // u_n = n^-2 has E = 2; u_n = 1/n has E = 1.
        let two = raabe_estimate(&|n: u64| 1.0 / (n as f64).powi(2), 1 << 16).unwrap();
        assert!((two.extrapolated - 2.0).abs() < 1e-3);
        let harmonic = raabe_estimate(&|n: u64| 1.0 / n as f64, 1 << 16).unwrap();
        assert_eq!(harmonic.verdict, Verdict::Inconclusive);
    }
}
