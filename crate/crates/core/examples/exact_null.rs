//! Exact permutation null of the footrule distance for small n, checked
//! against the closed-form variance.

use footrule::moments::null_moments;
use footrule::rank::enumerate_null_distribution;
use footrule::Statistic;

fn main() -> footrule::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(5);
    let dist = enumerate_null_distribution(n)?;
    println!("{:>4} {:>8} {:>9} {:>10}", "D", "count", "phi", "P(D)");
    for (d, count, phi, p) in dist.rows() {
        println!("{d:>4} {count:>8} {phi:>9.5} {p:>10.6}");
    }
    let formula = null_moments(n, Statistic::PhiN)?.variance;
    println!(
        "mean {:.3e}, variance {:.12} (formula {:.12})",
        dist.phi_mean(),
        dist.phi_variance(),
        formula
    );
    Ok(())
}
