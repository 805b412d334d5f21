//! Seeded replication study of EM, EV, bias and RMSE for all three statistics.

use footrule::mc::{run_moment_study, SimConfig};
use footrule::moments::null_moments;
use footrule::Statistic;

fn main() -> footrule::Result<()> {
    println!(
        "{:<10} {:>4} {:>9} {:>9} {:>9} {:>9}",
        "statistic", "n", "EM", "EV", "Var", "RMSE"
    );
    for statistic in Statistic::ALL {
        let report = run_moment_study(&SimConfig::new(statistic, vec![10, 30, 100], 10_000, 42))?;
        for row in report.rows {
            let s = row.summary;
            let var = null_moments(row.n, statistic)?.variance;
            println!(
                "{statistic:<10} {:>4} {:>9.5} {:>9.5} {var:>9.5} {:>9.5}",
                row.n, s.em, s.ev, s.rmse
            );
        }
    }
    Ok(())
}
