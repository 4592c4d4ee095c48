//! Clean Hadamard walk: ballistic spreading, then the same walk with an
//! absorber at site 2 and the shape of what survives after 50 steps.

use walklab::{
    run_quantum, AbsorberConfig, CoinKind, CoinState, WalkRunConfig, WalkerState,
};

fn main() -> walklab::Result<()> {
    let coin = CoinKind::Hadamard.operator();

    let free = run_quantum(&WalkRunConfig::new(coin, CoinState::symmetric(), 200))?;
    println!("symmetric start, no absorber");
    for t in [10usize, 50, 100, 200] {
        let s = free.sigma[t - 1];
        println!("  t={t:>3}  sigma={s:>8.3}  sigma/t={:.4}", s / t as f64);
    }

    let cfg = WalkRunConfig::new(coin, CoinState::L, 50).with_absorber(AbsorberConfig::new(2)?);
    let run = run_quantum(&cfg)?;
    let dist = run.final_state.probability_distribution();
    println!("\n|0,L> start, absorber at 2, t=50");
    println!("  absorbed so far: {:.4}", run.record.cumulative);
    println!("  surviving mass:  {:.4}", dist.sum());
    let mut peaks: Vec<_> = dist.support().collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (n, p) in peaks.iter().take(4) {
        println!("  n={n:>4}  p={p:.4}");
    }
    Ok(())
}
