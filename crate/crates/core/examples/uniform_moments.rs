//! The exact uniform-moment constants behind the variance formulas, with a
//! quick Monte Carlo check of each.

use footrule::mc::StreamKey;
use footrule::moments::UNIFORM_MOMENTS;

fn main() {
    const DRAWS: usize = 200_000;
    let mut rng = StreamKey::new(1, 0).rng();
    let draws: Vec<(f64, f64, f64)> = (0..DRAWS)
        .map(|_| (rng.uniform_open(), rng.uniform_open(), rng.uniform_open()))
        .collect();
    let mean =
        |f: &dyn Fn(&(f64, f64, f64)) -> f64| draws.iter().map(f).sum::<f64>() / DRAWS as f64;
    let e_abs = mean(&|&(u, v, _)| (u - v).abs());
    let e_w = mean(&|&(u, _, _)| u * (1.0 - u));
    let c = UNIFORM_MOMENTS;
    let rows = [
        ("E|U-V|", c.e_abs_diff, e_abs),
        ("E U(1-U)", c.e_u_one_minus_u, e_w),
        (
            "Var|U-V|",
            c.var_abs_diff,
            mean(&|&(u, v, _)| ((u - v).abs() - e_abs).powi(2)),
        ),
        (
            "Var U(1-U)",
            c.var_u_one_minus_u,
            mean(&|&(u, _, _)| (u * (1.0 - u) - e_w).powi(2)),
        ),
        (
            "Cov(|U-V|, U(1-U))",
            c.cov_absdiff_u1mu,
            mean(&|&(u, v, _)| ((u - v).abs() - e_abs) * (u * (1.0 - u) - e_w)),
        ),
        (
            "Cov(|U-V1|, |U-V2|)",
            c.cov_absdiff_shared,
            mean(&|&(u, v1, v2)| ((u - v1).abs() - e_abs) * ((u - v2).abs() - e_abs)),
        ),
    ];
    for (name, exact, mc) in rows {
        println!(
            "{name:<22} {:>4}/{:<4} = {:+.6}   MC {mc:+.6}",
            exact.numer(),
            exact.denom(),
            exact.to_f64()
        );
    }
}
