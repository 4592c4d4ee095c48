//! Disorder-averaged finite-horizon absorbing time for Poisson step lengths
//! with an absorber at 2, for both engines.

use walklab::{disorder_avg_absorb_time, AbsorberConfig, DisorderSpec, Engine, EnsembleConfig};

fn main() -> walklab::Result<()> {
    let horizons: Vec<usize> = (50..=400).step_by(50).collect();
    for engine in [Engine::Quantum, Engine::Classical] {
        let cfg = EnsembleConfig::new(engine, 400)
            .with_absorber(AbsorberConfig::new(2)?)
            .with_disorder(DisorderSpec::poisson(1.0)?, 40)
            .with_seed(2024);
        let curve = disorder_avg_absorb_time(&cfg, &horizons)?;
        println!("{engine}:");
        for i in 0..curve.abscissa.len() {
            println!(
                "  n={:>3}  <t_a> = {:>7.3} +- {:.3}  ({} excluded)",
                curve.abscissa[i],
                curve.values[i],
                curve.std_errors[i],
                curve.excluded()[i]
            );
        }
    }
    Ok(())
}
