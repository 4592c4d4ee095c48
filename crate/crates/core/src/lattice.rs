//! Walker states on the integer line and the position statistics derived
//! from them.
//!
//! Both state types store a dense window `[n_min, n_max]` of sites; every
//! site outside the window carries zero amplitude (or probability).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed above unit mass when checking conservation after one step.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Common read-only view of quantum and classical walker states.
pub trait WalkerState {
    /// Number of steps taken since the initial state.
    fn time(&self) -> usize;

    /// Inclusive window of stored sites, `None` when the window is empty.
    fn window(&self) -> Option<(i64, i64)>;

    /// Occupation probability per stored site.
    fn probability_distribution(&self) -> PositionDistribution;

    /// Total probability still carried by the walker.
    fn total_mass(&self) -> f64;
}

/// Per-site two-component amplitudes `(psi_L(n), psi_R(n))` of a coined walker.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub(crate) time: usize,
    pub(crate) n_min: i64,
    pub(crate) left: Vec<Complex64>,
    pub(crate) right: Vec<Complex64>,
}

impl QuantumState {
    /// Walker localized at `position` with coin amplitudes `(alpha_l, alpha_r)`.
    pub fn localized(position: i64, alpha_l: Complex64, alpha_r: Complex64) -> Self {
        Self {
            time: 0,
            n_min: position,
            left: vec![alpha_l],
            right: vec![alpha_r],
        }
    }

    /// Builds a state from explicit amplitude columns starting at site `n_min`.
    pub fn from_amplitudes(
        n_min: i64,
        left: Vec<Complex64>,
        right: Vec<Complex64>,
    ) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::InvalidParameter(format!(
                "amplitude columns differ in length ({} vs {})",
                left.len(),
                right.len()
            )));
        }
        let state = Self {
            time: 0,
            n_min,
            left,
            right,
        };
        let mass = state.total_mass();
        if !(mass <= 1.0 + MASS_TOLERANCE) {
            return Err(Error::InvalidParameter(format!(
                "state mass {mass} exceeds 1"
            )));
        }
        Ok(state)
    }

    /// Amplitudes at site `n`, zero outside the window.
    pub fn amplitude(&self, n: i64) -> (Complex64, Complex64) {
        match self.index(n) {
            Some(i) => (self.left[i], self.right[i]),
            None => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        }
    }

    /// Multiplies every amplitude by `phase`.
    pub fn with_global_phase(mut self, phase: Complex64) -> Self {
        for a in self.left.iter_mut().chain(self.right.iter_mut()) {
            *a *= phase;
        }
        self
    }

    /// Standard deviation of the renormalized surviving distribution.
    pub fn std_dev(&self) -> Result<f64> {
        spread(self.site_probabilities())
    }

    pub(crate) fn len(&self) -> usize {
        self.left.len()
    }

    fn index(&self, n: i64) -> Option<usize> {
        let i = n.checked_sub(self.n_min)?;
        (i >= 0 && (i as usize) < self.len()).then_some(i as usize)
    }

    fn site_probabilities(&self) -> impl Iterator<Item = (i64, f64)> + Clone + '_ {
        self.left
            .iter()
            .zip(&self.right)
            .enumerate()
            .map(move |(i, (l, r))| (self.n_min + i as i64, l.norm_sqr() + r.norm_sqr()))
    }
}

impl WalkerState for QuantumState {
    fn time(&self) -> usize {
        self.time
    }

    fn window(&self) -> Option<(i64, i64)> {
        (self.len() > 0).then(|| (self.n_min, self.n_min + self.len() as i64 - 1))
    }

    fn probability_distribution(&self) -> PositionDistribution {
        PositionDistribution {
            time: self.time,
            entries: self.site_probabilities().collect(),
        }
    }

    fn total_mass(&self) -> f64 {
        self.site_probabilities().map(|(_, p)| p).sum()
    }
}

/// Per-site occupation probabilities of a classical walker.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState {
    pub(crate) time: usize,
    pub(crate) n_min: i64,
    pub(crate) probs: Vec<f64>,
}

impl ClassicalState {
    /// All mass at `position`.
    pub fn localized(position: i64) -> Self {
        Self {
            time: 0,
            n_min: position,
            probs: vec![1.0],
        }
    }

    pub fn from_probabilities(n_min: i64, probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidParameter(
                "probabilities must be nonnegative".into(),
            ));
        }
        let mass: f64 = probs.iter().sum();
        if mass > 1.0 + MASS_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "state mass {mass} exceeds 1"
            )));
        }
        Ok(Self {
            time: 0,
            n_min,
            probs,
        })
    }

    /// Probability at site `n`, zero outside the window.
    pub fn probability(&self, n: i64) -> f64 {
        n.checked_sub(self.n_min)
            .filter(|i| *i >= 0 && (*i as usize) < self.probs.len())
            .map_or(0.0, |i| self.probs[i as usize])
    }

    /// Standard deviation of the renormalized surviving distribution.
    pub fn std_dev(&self) -> Result<f64> {
        spread(self.site_probabilities())
    }

    fn site_probabilities(&self) -> impl Iterator<Item = (i64, f64)> + Clone + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, p)| (self.n_min + i as i64, *p))
    }
}

impl WalkerState for ClassicalState {
    fn time(&self) -> usize {
        self.time
    }

    fn window(&self) -> Option<(i64, i64)> {
        (!self.probs.is_empty()).then(|| (self.n_min, self.n_min + self.probs.len() as i64 - 1))
    }

    fn probability_distribution(&self) -> PositionDistribution {
        PositionDistribution {
            time: self.time,
            entries: self.site_probabilities().collect(),
        }
    }

    fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Position distribution `p(n, t)` as `(n, p)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionDistribution {
    pub time: usize,
    pub entries: Vec<(i64, f64)>,
}

impl PositionDistribution {
    pub fn new(time: usize, entries: Vec<(i64, f64)>) -> Self {
        Self { time, entries }
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// Probability at `n` (zero when absent).
    pub fn get(&self, n: i64) -> f64 {
        self.entries
            .iter()
            .filter(|(m, _)| *m == n)
            .map(|(_, p)| p)
            .sum()
    }

    /// Entries with nonzero probability.
    pub fn support(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.entries.iter().copied().filter(|(_, p)| *p != 0.0)
    }

    /// `sqrt(E[n^2] - E[n]^2)` under the distribution scaled to unit mass.
    pub fn std_dev(&self) -> Result<f64> {
        spread(self.entries.iter().copied())
    }

    /// Divides every probability by the total.
    pub fn renormalize(&self) -> Result<Self> {
        let total = self.sum();
        if !(total > 0.0) {
            return Err(Error::EmptyDistribution);
        }
        Ok(Self {
            time: self.time,
            entries: self.entries.iter().map(|(n, p)| (*n, p / total)).collect(),
        })
    }

    /// Site carrying the largest probability; ties go to the leftmost site.
    pub fn mode(&self) -> Option<(i64, f64)> {
        self.entries
            .iter()
            .copied()
            .fold(None, |best: Option<(i64, f64)>, (n, p)| match best {
                Some((_, bp)) if bp >= p => best,
                _ => Some((n, p)),
            })
    }
}

// Two-pass mean/variance on the normalized distribution.
fn spread<I>(sites: I) -> Result<f64>
where
    I: Iterator<Item = (i64, f64)> + Clone,
{
    let total: f64 = sites.clone().map(|(_, p)| p).sum();
    if !(total > 0.0) {
        return Err(Error::EmptyDistribution);
    }
    let mean = sites.clone().map(|(n, p)| n as f64 * p).sum::<f64>() / total;
    let var = sites
        .map(|(n, p)| {
            let d = n as f64 - mean;
            d * d * p
        })
        .sum::<f64>()
        / total;
    Ok(var.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn delta_state_distribution() {
        let s = QuantumState::localized(0, c(1.0, 0.0), c(0.0, 0.0));
        let d = s.probability_distribution();
        assert_eq!(d.entries, vec![(0, 1.0)]);
        assert_eq!(d.std_dev().unwrap(), 0.0);
        assert_eq!(s.total_mass(), 1.0);
    }

    #[test]
    fn two_point_std_dev() {
        let d = PositionDistribution::new(1, vec![(-1, 0.5), (1, 0.5)]);
        assert!((d.std_dev().unwrap() - 1.0).abs() < 1e-15);
        let d = PositionDistribution::new(2, vec![(-2, 0.25), (0, 0.5), (2, 0.25)]);
        assert!((d.std_dev().unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn std_dev_uses_normalized_distribution() {
        let d = PositionDistribution::new(1, vec![(-1, 0.125), (1, 0.125)]);
        assert!((d.std_dev().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn renormalize_cases() {
        let d = PositionDistribution::new(0, vec![(0, 0.5)]).renormalize().unwrap();
        assert_eq!(d.entries, vec![(0, 1.0)]);
        let d = PositionDistribution::new(0, vec![(-1, 0.25), (1, 0.25)])
            .renormalize()
            .unwrap();
        assert_eq!(d.entries, vec![(-1, 0.5), (1, 0.5)]);
        let unit = PositionDistribution::new(0, vec![(-1, 0.25), (0, 0.5), (1, 0.25)]);
        assert_eq!(unit.renormalize().unwrap(), unit);
    }

    #[test]
    fn empty_distribution_errors() {
        let d = PositionDistribution::new(3, vec![]);
        assert_eq!(d.sum(), 0.0);
        assert_eq!(d.std_dev(), Err(Error::EmptyDistribution));
        assert_eq!(d.renormalize(), Err(Error::EmptyDistribution));
        let z = PositionDistribution::new(3, vec![(0, 0.0)]);
        assert_eq!(z.renormalize(), Err(Error::EmptyDistribution));
    }

    #[test]
    fn window_and_lookup() {
        let s = QuantumState::from_amplitudes(
            -1,
            vec![c(0.6, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.8)],
        )
        .unwrap();
        assert_eq!(s.window(), Some((-1, 0)));
        assert_eq!(s.amplitude(0).1, c(0.0, 0.8));
        assert_eq!(s.amplitude(7).0, c(0.0, 0.0));
        assert!((s.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_overweight_states() {
        assert!(QuantumState::from_amplitudes(0, vec![c(1.0, 0.0)], vec![c(0.5, 0.0)]).is_err());
        assert!(ClassicalState::from_probabilities(0, vec![0.7, 0.7]).is_err());
        assert!(ClassicalState::from_probabilities(0, vec![-0.1]).is_err());
    }

    #[test]
    fn mode_picks_largest() {
        let d = PositionDistribution::new(0, vec![(-3, 0.1), (-2, 0.6), (4, 0.3)]);
        assert_eq!(d.mode(), Some((-2, 0.6)));
    }
}
