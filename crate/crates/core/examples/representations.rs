//! Both asymptotic representations on one uniform sample; their gap shrinks
//! roughly like 1/n.

use footrule::mc::StreamKey;
use footrule::representations::{phi_double_prime, phi_prime, UniformPairs};

fn main() -> footrule::Result<()> {
    for n in [10, 100, 1000, 10_000] {
        let mut rng = StreamKey::new(7, n as u64).rng();
        let u = (0..n).map(|_| rng.uniform_open()).collect();
        let v = (0..n).map(|_| rng.uniform_open()).collect();
        let pairs = UniformPairs::new(u, v)?;
        let a = phi_prime(&pairs)?.value;
        let b = phi_double_prime(&pairs).value;
        println!(
            "n = {n:>5}: phi' = {a:+.6}, phi'' = {b:+.6}, gap = {:.2e}",
            (a - b).abs()
        );
    }
    Ok(())
}
