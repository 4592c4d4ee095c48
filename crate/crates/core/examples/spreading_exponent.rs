//! Spreading exponents from log-log fits of sigma(t) over 20 <= t <= 80.

use walklab::{
    ensemble_exponent, AbsorberConfig, DisorderSpec, Engine, EnsembleConfig,
};

fn main() -> walklab::Result<()> {
    let poisson = DisorderSpec::poisson(1.0)?;
    let abs = AbsorberConfig::new(2)?;
    let cases = [
        ("quantum, clean", EnsembleConfig::new(Engine::Quantum, 80)),
        ("quantum, clean, absorber", EnsembleConfig::new(Engine::Quantum, 80).with_absorber(abs)),
        ("classical, clean", EnsembleConfig::new(Engine::Classical, 80)),
        ("quantum, poisson", EnsembleConfig::new(Engine::Quantum, 80).with_disorder(poisson, 200)),
        (
            "quantum, poisson, absorber",
            EnsembleConfig::new(Engine::Quantum, 80).with_disorder(poisson, 200).with_absorber(abs),
        ),
        ("classical, poisson", EnsembleConfig::new(Engine::Classical, 80).with_disorder(poisson, 200)),
    ];
    for (name, cfg) in cases {
        let (_, fit) = ensemble_exponent(&cfg.with_seed(2024), 20, 80)?;
        println!(
            "{name:<28} alpha = {:.4} +- {:.4}  (rms residual {:.1e})",
            fit.alpha, fit.ci95_halfwidth, fit.residual_rms
        );
    }
    Ok(())
}
