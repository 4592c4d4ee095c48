//! Exact probability propagation of the symmetric classical random walk,
//! with optional absorber and per-step lengths, and the closed-form
//! first-passage law used to check it.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::lattice::{ClassicalState, WalkerState};
use crate::walk::{AbsorberConfig, AbsorptionRecord, StepLengths, EXHAUSTION_TOLERANCE};

impl ClassicalState {
    /// `p'(n) = p(n + l)/2 + p(n - l)/2`; `l = 0` leaves the state in place.
    pub fn crw_step(&mut self, l: u32) {
        self.time += 1;
        if l == 0 || self.probs.is_empty() {
            return;
        }
        let l = l as usize;
        let mut next = vec![0.0; self.probs.len() + 2 * l];
        for (i, p) in self.probs.iter().enumerate() {
            let half = 0.5 * p;
            next[i] += half;
            next[i + 2 * l] += half;
        }
        self.probs = next;
        self.n_min -= l as i64;
    }

    /// Same rule as the quantum absorber: mass at or beyond `m1` is removed.
    pub fn crw_apply_absorber(&mut self, absorber: &AbsorberConfig) -> f64 {
        if !absorber.enabled || self.probs.is_empty() {
            return 0.0;
        }
        let len = self.probs.len() as i64;
        if absorber.position > 0 {
            let keep = (absorber.position - self.n_min).clamp(0, len) as usize;
            let absorbed = self.probs[keep..].iter().sum();
            self.probs.truncate(keep);
            absorbed
        } else {
            let cut = (absorber.position - self.n_min + 1).clamp(0, len) as usize;
            let absorbed = self.probs[..cut].iter().sum();
            self.probs.drain(..cut);
            self.n_min += cut as i64;
            absorbed
        }
    }
}

/// Configuration of one classical run.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalRunConfig {
    pub start: i64,
    pub steps: usize,
    pub absorber: Option<AbsorberConfig>,
    pub step_lengths: StepLengths,
}

impl ClassicalRunConfig {
    pub fn new(steps: usize) -> Self {
        Self {
            start: 0,
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
}

#[derive(Debug, Clone)]
pub struct ClassicalRun {
    pub record: AbsorptionRecord,
    pub sigma: Vec<f64>,
    pub final_state: ClassicalState,
}

pub fn run_classical(config: &ClassicalRunConfig) -> Result<ClassicalRun> {
    if config.steps == 0 {
        return Err(Error::InvalidParameter("steps must be positive".into()));
    }
    if let StepLengths::Sequence(ls) = &config.step_lengths {
        if ls.len() < config.steps {
            return Err(Error::InvalidParameter(format!(
                "step-length sequence shorter than {} steps",
                config.steps
            )));
        }
    }
    if matches!(config.absorber, Some(a) if a.position == 0) {
        return Err(Error::AbsorberAtOrigin);
    }
    let mut state = ClassicalState::localized(config.start);
    let mut per_step = Vec::with_capacity(config.steps);
    let mut sigma = Vec::with_capacity(config.steps);
    for t in 1..=config.steps {
        state.crw_step(config.step_lengths.at(t));
        let absorbed = match &config.absorber {
            Some(abs) => state.crw_apply_absorber(abs),
            None => 0.0,
        };
        per_step.push(absorbed);
        if config.absorber.is_some() && state.total_mass() < EXHAUSTION_TOLERANCE {
            return Err(Error::MassExhausted { step: t });
        }
        sigma.push(state.std_dev()?);
    }
    Ok(ClassicalRun {
        record: AbsorptionRecord::from_per_step(per_step),
        sigma,
        final_state: state,
    })
}

/// Probability that a clean walk from the origin first reaches `m1` at step `t`:
///
/// `p_t = |m1| / (t 2^t) * t! / (((t + m1)/2)! ((t - m1)/2)!)`,
///
/// zero when `t < |m1|` or when `t` and `m1` differ in parity.
pub fn classical_first_passage(t: u64, m1: i64) -> f64 {
    let m = m1.unsigned_abs();
    if t == 0 || m == 0 || t < m || !(t - m).is_multiple_of(2) {
        return 0.0;
    }
    let up = (t + m) / 2;
    let down = (t - m) / 2;
    let ln_p = (m as f64).ln() - (t as f64).ln() - t as f64 * std::f64::consts::LN_2
        + ln_factorial(t)
        - ln_factorial(up)
        - ln_factorial(down);
    ln_p.exp()
}

/// `sum_{t <= horizon} p_t` for the clean walk.
pub fn classical_total_absorption(m1: i64, horizon: u64) -> f64 {
    first_passage_terms(m1, horizon).map(|(_, p)| p).sum()
}

/// Finite-horizon average absorbing time of the clean walk.
pub fn classical_avg_time_partial(m1: i64, horizon: u64) -> Result<f64> {
    let (num, den) = first_passage_terms(m1, horizon)
        .fold((0.0, 0.0), |(num, den), (t, p)| (num + t as f64 * p, den + p));
    if !(den > 0.0) {
        return Err(Error::NoAbsorption {
            horizon: horizon as usize,
        });
    }
    Ok(num / den)
}

fn first_passage_terms(m1: i64, horizon: u64) -> impl Iterator<Item = (u64, f64)> {
    let m = m1.unsigned_abs().max(1);
    (m..=horizon)
        .step_by(2)
        .map(move |t| (t, classical_first_passage(t, m1)))
}

pub(crate) fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dist(s: &ClassicalState) -> Vec<(i64, f64)> {
        s.probability_distribution().support().collect()
    }

    #[test]
    fn fair_steps() {
        let mut s = ClassicalState::localized(0);
        s.crw_step(1);
        assert_eq!(dist(&s), vec![(-1, 0.5), (1, 0.5)]);
        s.crw_step(1);
        assert_eq!(dist(&s), vec![(-2, 0.25), (0, 0.5), (2, 0.25)]);
        let before = s.clone();
        s.crw_step(0);
        assert_eq!(dist(&s), dist(&before));
    }

    #[test]
    fn absorber_cases() {
        let mut s = ClassicalState::from_probabilities(-1, vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(s.crw_apply_absorber(&AbsorberConfig::new(1).unwrap()), 0.5);
        let mut s = ClassicalState::localized(-3);
        assert_eq!(s.crw_apply_absorber(&AbsorberConfig::new(2).unwrap()), 0.0);

        let run = run_classical(
            &ClassicalRunConfig::new(2).with_absorber(AbsorberConfig::new(2).unwrap()),
        )
        .unwrap();
        assert_eq!(run.record.at(2), 0.25);
    }

    #[test]
    fn single_step_absorbs_half() {
        let run = run_classical(
            &ClassicalRunConfig::new(1).with_absorber(AbsorberConfig::new(1).unwrap()),
        )
        .unwrap();
        assert_eq!(run.final_state.total_mass(), 0.5);
    }

    // Exhaustive enumeration of the 2^t sign sequences.
    fn enumerate_first_passage(t: u32, m1: i64) -> f64 {
        let mut hits = 0u64;
        for bits in 0u64..(1 << t) {
            let mut x = 0i64;
            for s in 0..t {
                x += if bits >> s & 1 == 1 { 1 } else { -1 };
                if x == m1 {
                    if s + 1 == t {
                        hits += 1;
                    }
                    break;
                }
            }
        }
        hits as f64 / (1u64 << t) as f64
    }

    #[test]
    fn closed_form_matches_enumeration() {
        assert!((classical_first_passage(1, 1) - 0.5).abs() < 1e-15);
        assert!((classical_first_passage(3, 1) - 0.125).abs() < 1e-15);
        assert_eq!(classical_first_passage(2, 1), 0.0);
        for m1 in [-3i64, -1, 1, 2, 4] {
            for t in 1..=16u32 {
                let e = enumerate_first_passage(t, m1);
                let c = classical_first_passage(t as u64, m1);
                assert!((e - c).abs() < 1e-13, "t={t} m1={m1}: {e} vs {c}");
            }
        }
    }

    #[test]
    fn mirror_symmetry() {
        for m in 1..=8i64 {
            for t in 1..=60u64 {
                assert_eq!(classical_first_passage(t, m), classical_first_passage(t, -m));
            }
            let pos = run_classical(
                &ClassicalRunConfig::new(60).with_absorber(AbsorberConfig::new(m).unwrap()),
            )
            .unwrap();
            let neg = run_classical(
                &ClassicalRunConfig::new(60).with_absorber(AbsorberConfig::new(-m).unwrap()),
            )
            .unwrap();
            for (a, b) in pos.record.per_step.iter().zip(&neg.record.per_step) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn partial_sums() {
        assert!((classical_total_absorption(2, 2) - 0.25).abs() < 1e-15);
        assert!(classical_total_absorption(1, 1000) >= 0.97);
        assert_eq!(classical_avg_time_partial(1, 1).unwrap(), 1.0);
        assert!((classical_avg_time_partial(1, 3).unwrap() - 1.4).abs() < 1e-14);
        assert!(matches!(
            classical_avg_time_partial(3, 2),
            Err(Error::NoAbsorption { .. })
        ));
        let mut last = 0.0;
        for horizon in (2..400).step_by(7) {
            let s = classical_total_absorption(2, horizon);
            assert!(s >= last && s <= 1.0);
            last = s;
        }
    }

    #[test]
    fn mean_time_grows_without_bound() {
        let a = classical_avg_time_partial(2, 10_000).unwrap();
        let b = classical_avg_time_partial(2, 40_000).unwrap();
        assert!(b / a >= 1.8, "{a} -> {b}");
    }

    #[test]
    fn closed_form_survives_large_t() {
        let p = classical_first_passage(1_000_000, 2);
        assert!(p.is_finite() && p > 0.0 && p < 1e-8);
    }

    // Sampled trajectories as an independent check of the exact propagation.
    #[test]
    fn monte_carlo_first_passage_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let horizon = 20usize;
        let trials = 200_000;
        let mut counts = vec![0u32; horizon + 1];
        for _ in 0..trials {
            let mut x = 0i64;
            for t in 1..=horizon {
                x += if rng.random::<bool>() { 1 } else { -1 };
                if x >= 2 {
                    counts[t] += 1;
                    break;
                }
            }
        }
        let exact = run_classical(
            &ClassicalRunConfig::new(horizon).with_absorber(AbsorberConfig::new(2).unwrap()),
        )
        .unwrap();
        for t in 1..=horizon {
            let p = exact.record.at(t);
            let freq = counts[t] as f64 / trials as f64;
            let se = (p * (1.0 - p) / trials as f64).sqrt().max(1e-6);
            assert!((freq - p).abs() < 5.0 * se, "t={t}: {freq} vs {p}");
        }
    }
}
