//! KS comparisons of the statistic, both representations and the normal limit.

use footrule::mc::{run_ks_study, KsConfig};

fn main() -> footrule::Result<()> {
    let report = run_ks_study(&KsConfig::new(vec![10, 50, 100], 1000, 42))?;
    for row in &report.rows {
        println!(
            "n = {:>3}  {:<24} D = {:.5}  p = {:.5}",
            row.n,
            row.combination.label(),
            row.outcome.statistic,
            row.outcome.p_value
        );
    }
    Ok(())
}
