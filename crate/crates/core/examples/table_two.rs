//! Exponents with and without an absorber for the unit-mean disorder presets.

use walklab::{ensemble_exponent, table_two_presets, AbsorberConfig, Engine, EnsembleConfig};

fn main() -> walklab::Result<()> {
    let realizations = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200);
    println!("{realizations} realizations, t in [20, 80]");
    println!("{:<24} {:>6} {:>14} {:>14} {:>6}", "preset", "var", "absorber", "free", "gap");
    for preset in table_two_presets() {
        let base = EnsembleConfig::new(Engine::Quantum, 80)
            .with_disorder(preset.spec, realizations)
            .with_seed(2024);
        let (_, free) = ensemble_exponent(&base, 20, 80)?;
        let (_, abs) = ensemble_exponent(&base.with_absorber(AbsorberConfig::new(2)?), 20, 80)?;
        println!(
            "{:<24} {:>6.3} {:>7.3}+-{:.3} {:>7.3}+-{:.3} {:>6.3}",
            preset.name,
            preset.spec.moments().variance,
            abs.alpha,
            abs.ci95_halfwidth,
            free.alpha,
            free.ci95_halfwidth,
            abs.alpha - free.alpha
        );
        if let Some(note) = preset.note {
            println!("    note: {note}");
        }
    }
    Ok(())
}
