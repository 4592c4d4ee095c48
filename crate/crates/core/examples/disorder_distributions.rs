//! Step-length laws: moments, dispersion class and sampled frequencies.

use walklab::{sample_realization, table_two_presets, DisorderSpec};

fn main() -> walklab::Result<()> {
    let mut laws = vec![("poisson".to_string(), "poisson:lambda=1".parse::<DisorderSpec>()?)];
    laws.extend(table_two_presets().into_iter().map(|p| (p.name.to_string(), p.spec)));
    laws.push(("shifted geometric".into(), DisorderSpec::geometric_shifted(0.5)?));

    for (name, spec) in &laws {
        let m = spec.moments();
        let r = sample_realization(spec, 200_000, 1)?;
        let mean = r.lengths.iter().map(|l| *l as f64).sum::<f64>() / r.lengths.len() as f64;
        println!(
            "{name:<24} {spec:<40} mean={:.3} var={:.3} {:?}  sampled mean={mean:.3}",
            m.mean,
            m.variance,
            spec.dispersion()
        );
        let pmf: Vec<String> = (0..5).map(|l| format!("{:.3}", spec.pmf(l))).collect();
        println!("{:<24} pmf(0..5) = [{}]", "", pmf.join(", "));
    }
    Ok(())
}
