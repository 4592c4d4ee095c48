use num_complex::Complex64;
use proptest::prelude::*;
use walklab::{
    fit_exponent, run_classical, run_quantum, AbsorberConfig, AveragedCurve, ClassicalRunConfig,
    CoinOperator, CoinState, DisorderSpec, HadamardVariant, QuantumState, StepLengths,
    WalkRunConfig, WalkerState,
};

fn hadamard() -> CoinOperator {
    CoinOperator::hadamard(HadamardVariant::Standard)
}

// General U(2) element from Euler-type angles.
fn coin_from_angles(theta: f64, a: f64, b: f64, g: f64) -> CoinOperator {
    let (s, c) = theta.sin_cos();
    let e = |x: f64| Complex64::from_polar(1.0, x);
    CoinOperator::new(
        e(g + a) * c,
        e(g + b) * s,
        -e(g - b) * s,
        e(g - a) * c,
    )
    .unwrap()
}

fn spec_strategy() -> impl Strategy<Value = DisorderSpec> {
    prop_oneof![
        (0.1f64..5.0).prop_map(|l| DisorderSpec::poisson(l).unwrap()),
        (1u32..8, 0.0f64..=1.0).prop_map(|(n, p)| DisorderSpec::binomial(n, p).unwrap()),
        (1u32..15, 0u32..15, 0u32..15).prop_filter_map("domain", |(nn, k, n)| {
            DisorderSpec::hypergeometric(nn, k, n).ok()
        }),
        (0.3f64..4.0, 0.2f64..0.95).prop_map(|(r, k)| DisorderSpec::negative_binomial(r, k).unwrap()),
        (0.2f64..=1.0).prop_map(|k| DisorderSpec::geometric(k).unwrap()),
        (0.2f64..=1.0).prop_map(|k| DisorderSpec::geometric_shifted(k).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_coins_conserve_mass(
        theta in 0.0f64..6.3, a in 0.0f64..6.3, b in 0.0f64..6.3, g in 0.0f64..6.3,
        lengths in prop::collection::vec(0u32..4, 1..60),
    ) {
        let coin = coin_from_angles(theta, a, b, g);
        prop_assert!(coin.unitarity_defect() < 1e-12);
        let mut s = QuantumState::localized(0, Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        for l in &lengths {
            s.step(&coin, *l);
            prop_assert!((s.total_mass() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn absorber_leaves_no_mass_beyond_it(
        m1 in prop_oneof![-8i64..=-1, 1i64..=8],
        lengths in prop::collection::vec(0u32..4, 80),
        quantum in any::<bool>(),
    ) {
        let abs = AbsorberConfig::new(m1).unwrap();
        let window = if quantum {
            let cfg = WalkRunConfig::new(hadamard(), CoinState::symmetric(), 80)
                .with_absorber(abs)
                .with_step_lengths(StepLengths::Sequence(lengths));
            match run_quantum(&cfg) {
                Ok(run) => run.final_state.window(),
                Err(_) => None,
            }
        } else {
            let cfg = ClassicalRunConfig::new(80)
                .with_absorber(abs)
                .with_step_lengths(StepLengths::Sequence(lengths));
            match run_classical(&cfg) {
                Ok(run) => run.final_state.window(),
                Err(_) => None,
            }
        };
        if let Some((lo, hi)) = window {
            if m1 > 0 { prop_assert!(hi < m1) } else { prop_assert!(lo > m1) }
        }
    }

    #[test]
    fn global_phase_leaves_spread_unchanged(phase in 0.0f64..6.3, steps in 1usize..80) {
        let mut s = QuantumState::localized(0, Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        for _ in 0..steps {
            s.step(&hadamard(), 1);
        }
        let rotated = s.clone().with_global_phase(Complex64::from_polar(1.0, phase));
        let d = (s.std_dev().unwrap() - rotated.std_dev().unwrap()).abs();
        prop_assert!(d < 1e-12);
        let d = s.probability_distribution().entries.iter()
            .zip(&rotated.probability_distribution().entries)
            .map(|(a, b)| (a.1 - b.1).abs())
            .fold(0.0, f64::max);
        prop_assert!(d < 1e-14);
    }

    #[test]
    fn pmf_normalized_and_moments_consistent(spec in spec_strategy()) {
        let (lo, hi) = spec.support();
        let top = hi.unwrap_or(4000);
        let mut mass = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for l in lo..=top {
            let p = spec.pmf(l);
            prop_assert!(p >= 0.0);
            mass += p;
            m1 += l as f64 * p;
            m2 += (l as f64).powi(2) * p;
        }
        prop_assert!((mass - 1.0).abs() < 1e-10, "{spec}: mass {mass}");
        let m = spec.moments();
        prop_assert!((m1 - m.mean).abs() < 1e-8 * m.mean.max(1.0), "{spec}: mean {m1} vs {}", m.mean);
        let var = m2 - m1 * m1;
        prop_assert!((var - m.variance).abs() < 1e-7 * m.variance.max(1.0), "{spec}: var {var} vs {}", m.variance);
        if lo > 0 {
            prop_assert_eq!(spec.pmf(lo - 1), 0.0);
        }
    }

    #[test]
    fn spec_text_round_trips(spec in spec_strategy()) {
        let text = spec.to_string();
        prop_assert_eq!(text.parse::<DisorderSpec>().unwrap(), spec);
    }

    #[test]
    fn sampler_is_deterministic(spec in spec_strategy(), seed in any::<u64>()) {
        let s = spec.sampler().unwrap();
        let a = s.realization(200, seed);
        let b = s.realization(200, seed);
        prop_assert_eq!(&a, &b);
        let (lo, hi) = spec.support();
        prop_assert!(a.lengths.iter().all(|l| (*l as u64) >= lo && hi.is_none_or(|h| (*l as u64) <= h)));
    }

    #[test]
    fn exact_power_laws_fit_exactly(alpha in -2.0f64..2.0, c in 0.01f64..100.0, lo in 1u64..40, span in 3u64..200) {
        let hi = lo + span;
        let abscissa: Vec<u64> = (1..=hi + 5).collect();
        let samples = vec![abscissa.iter().map(|t| Some(c * (*t as f64).powf(alpha))).collect()];
        let curve = AveragedCurve::from_samples(abscissa, &samples).unwrap();
        let fit = fit_exponent(&curve, lo, hi).unwrap();
        prop_assert!((fit.alpha - alpha).abs() < 1e-12);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-11);
        prop_assert!(fit.residual_rms <= 1e-12);
        prop_assert!(fit.ci95_halfwidth >= 0.0);
        prop_assert_eq!(fit.points as u64, hi - lo + 1);
    }
}

#[test]
fn mass_conserved_over_ten_thousand_steps() {
    let mut s = QuantumState::localized(0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    for _ in 0..10_000 {
        s.step(&hadamard(), 1);
    }
    assert!((s.total_mass() - 1.0).abs() < 1e-9);
}

#[test]
fn point_mass_disorder_reduces_to_clean_walks() {
    let point = DisorderSpec::geometric(1.0).unwrap();
    let lengths = StepLengths::Sequence(point.sampler().unwrap().realization(150, 99).lengths);
    for absorber in [None, Some(AbsorberConfig::new(2).unwrap()), Some(AbsorberConfig::new(-3).unwrap())] {
        let mut clean = WalkRunConfig::new(hadamard(), CoinState::L, 150);
        clean.absorber = absorber;
        let disordered = clean.clone().with_step_lengths(lengths.clone());
        let a = run_quantum(&clean).unwrap();
        let b = run_quantum(&disordered).unwrap();
        for (x, y) in a.sigma.iter().zip(&b.sigma) {
            assert!((x - y).abs() <= 1e-12);
        }
        for (x, y) in a.record.per_step.iter().zip(&b.record.per_step) {
            assert!((x - y).abs() <= 1e-12);
        }

        let mut clean = ClassicalRunConfig::new(150);
        clean.absorber = absorber;
        let disordered = clean.clone().with_step_lengths(lengths.clone());
        let a = run_classical(&clean).unwrap();
        let b = run_classical(&disordered).unwrap();
        for (x, y) in a.sigma.iter().zip(&b.sigma) {
            assert!((x - y).abs() <= 1e-12);
        }
        for (x, y) in a.record.per_step.iter().zip(&b.record.per_step) {
            assert!((x - y).abs() <= 1e-12);
        }
    }
}

#[test]
fn sampler_frequencies_match_pmf() {
    let specs = [
        DisorderSpec::poisson(1.0).unwrap(),
        DisorderSpec::binomial(2, 0.5).unwrap(),
        DisorderSpec::hypergeometric(10, 5, 2).unwrap(),
        DisorderSpec::negative_binomial(1.0, 0.5).unwrap(),
        DisorderSpec::geometric(0.5).unwrap(),
    ];
    let draws = 1_000_000usize;
    for spec in specs {
        let r = spec.sampler().unwrap().realization(draws, 17);
        let mut counts = vec![0usize; 64];
        for l in &r.lengths {
            counts[(*l as usize).min(63)] += 1;
        }
        for (l, c) in counts.iter().enumerate().take(8) {
            let p = spec.pmf(l as u64);
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            let freq = *c as f64 / draws as f64;
            assert!((freq - p).abs() <= 4.0 * se + 1e-12, "{spec} l={l}: {freq} vs {p}");
        }
    }
}

#[test]
fn classical_sigma_is_sqrt_t() {
    let run = run_classical(&ClassicalRunConfig::new(300)).unwrap();
    for (i, s) in run.sigma.iter().enumerate() {
        assert!((s - ((i + 1) as f64).sqrt()).abs() < 1e-10);
    }
}
