//! Kernel density and empirical CDF of the scaled statistics against the
//! normal limit.

use footrule::mc::{run_curve_study, CurveConfig};

fn main() -> footrule::Result<()> {
    let report = run_curve_study(&CurveConfig::new(vec![10, 100], 20_000, 42))?;
    for c in &report.curves {
        let cdf_gap = c
            .cdf
            .values
            .iter()
            .zip(&c.normal_cdf)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "{:<10} n = {:>3}: density integral {:.4}, max CDF gap to normal {:.4}, distinct values {}",
            c.statistic.label(),
            c.n,
            c.density.trapezoid_integral(),
            cdf_gap,
            c.distinct_values
        );
    }
    Ok(())
}
