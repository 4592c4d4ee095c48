//! Total absorption probability and mean absorbing time for absorbers at
//! 1..=10 from the generating-function series, with a simulated cross-check.

use walklab::{
    absorption_probabilities, absorption_table, run_quantum, AbsorberConfig, CoinKind, CoinState,
    StartCoin, TailModel, WalkRunConfig,
};

fn main() -> walklab::Result<()> {
    let order = 1 << 14;
    println!("{:>3} {:>8} {:>9} {:>9} {:>6}", "m1", "P", "t_a", "t_a(raw)", "beta");
    let with_tail = absorption_table(10, StartCoin::L, order, TailModel::PowerLaw)?;
    let raw = absorption_table(10, StartCoin::L, order, TailModel::None)?;
    for (row, plain) in with_tail.iter().zip(&raw) {
        println!(
            "{:>3} {:>8.4} {:>9.4} {:>9.4} {:>6.3}",
            row.m1,
            row.total,
            row.mean_time,
            plain.mean_time,
            row.tail.map_or(f64::NAN, |t| t.exponent)
        );
    }

    // The series coefficients are exactly what the simulator absorbs.
    let m1 = 4;
    let series = absorption_probabilities(m1, StartCoin::L, 120)?;
    let cfg = WalkRunConfig::new(CoinKind::Hadamard.operator(), CoinState::L, 120)
        .with_absorber(AbsorberConfig::new(m1)?);
    let sim = run_quantum(&cfg)?.record;
    let worst = (1..=120)
        .map(|t| (sim.at(t) - series[t]).abs())
        .fold(0.0, f64::max);
    println!("\nm1={m1}: max |simulated - series| over t<=120 = {worst:.1e}");
    Ok(())
}
