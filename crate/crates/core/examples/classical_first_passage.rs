//! Classical first passage: closed form against exact propagation, total
//! absorption creeping up to one, and a mean time that never settles.

use walklab::{
    classical_avg_time_partial, classical_first_passage, classical_total_absorption, run_classical,
    AbsorberConfig, ClassicalRunConfig,
};

fn main() -> walklab::Result<()> {
    let m1 = 2;
    let run = run_classical(&ClassicalRunConfig::new(20).with_absorber(AbsorberConfig::new(m1)?))?;
    println!("{:>3} {:>12} {:>12}", "t", "propagated", "closed form");
    for t in (2..=20).step_by(2) {
        println!(
            "{t:>3} {:>12.8} {:>12.8}",
            run.record.at(t),
            classical_first_passage(t as u64, m1)
        );
    }

    println!("\n{:>8} {:>10} {:>10}", "horizon", "P", "t_a(T)");
    for horizon in [100u64, 1_000, 10_000, 100_000, 1_000_000] {
        println!(
            "{horizon:>8} {:>10.6} {:>10.2}",
            classical_total_absorption(m1, horizon),
            classical_avg_time_partial(m1, horizon)?
        );
    }
    Ok(())
}
