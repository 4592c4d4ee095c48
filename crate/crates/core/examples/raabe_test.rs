//! Raabe diagnostic on the classical and quantum mean-absorbing-time series.

use walklab::raabe::{ClassicalMeanTimeTerms, GeometricTerms, QuantumMeanTimeTerms};
use walklab::{raabe_estimate, PositiveSeries, RaabeReport};

fn show(name: &str, report: &RaabeReport) {
    println!("{name}: E = {:.5} ({})", report.extrapolated, report.verdict);
    for (n, e) in report.estimates.iter().step_by(40) {
        println!("    n={n:>8}  E_n={e:.6}");
    }
}

fn main() -> walklab::Result<()> {
    let n_max = 1_000_000;
    show("classical, m1=2", &raabe_estimate(&ClassicalMeanTimeTerms { m1: 2 }, n_max)?);
    show("quantum, m1=2", &raabe_estimate(&QuantumMeanTimeTerms, n_max)?);
    show("geometric, q=0.9", &raabe_estimate(&GeometricTerms { q: 0.9 }, 1000)?);

    // Any closure over n works as a series.
    let p_series = |n: u64| (n as f64).powf(-1.5);
    println!("closure 1/n^1.5: u_2 = {:.4}", p_series.term(2));
    show("1/n^1.5", &raabe_estimate(&p_series, n_max)?);
    Ok(())
}
