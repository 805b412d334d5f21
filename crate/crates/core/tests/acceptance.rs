//! Release gate. Runs every acceptance criterion at its stated tolerance and
//! prints one PASS/FAIL line each; exits non-zero if any criterion fails.
//!
//! Run with `cargo test -p footrule --test acceptance`.

mod common;

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{
    correlation, covariance_with_se, mean_with_se, rms, sup_gap_discrete, variance_with_se,
};
use footrule::cli;
use footrule::mc::{
    draw_pool, run_ks_study, run_moment_study, shared_representation_pairs, Combination,
    DrawOptions, KsConfig, SimConfig, StreamKey,
};
use footrule::moments::{cond_exp_abs_diff, limiting_variance, null_moments, UNIFORM_MOMENTS};
use footrule::rank::enumerate_null_distribution;
use footrule::stats::{ks_one_sample, normal_cdf};
use footrule::Statistic;

type Outcome = Result<String, String>;

/// Name, runtime budget and check.
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn exact_moments() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        let dist = enumerate_null_distribution(n).map_err(|e| e.to_string())?;
        let truth = null_moments(n, Statistic::PhiN).unwrap().variance;
        worst = worst
            .max(dist.phi_mean().abs())
            .max((dist.phi_variance() - truth).abs());
    }
    check(
        worst <= 1e-12,
        format!("max abs error {worst:.2e} over n = 2..8"),
    )
}

fn table_two() -> Outcome {
    const REPS: usize = 10_000;
    let mut notes = Vec::new();
    let mut ok = true;
    for statistic in Statistic::ALL {
        let report = run_moment_study(&SimConfig::new(statistic, vec![10, 50, 100], REPS, 42))
            .map_err(|e| e.to_string())?;
        for row in &report.rows {
            let truth = null_moments(row.n, statistic).unwrap().variance;
            // standard error of the variance estimator, from an independent pool
            let pool = draw_pool(
                7_000 + row.n as u64,
                row.n,
                statistic,
                REPS,
                DrawOptions::default(),
            )
            .map_err(|e| e.to_string())?;
            let (_, _, se) = variance_with_se(&pool.values);
            let s = &row.summary;
            let em_ok = s.em.abs() <= 3.0 * (s.ev / REPS as f64).sqrt();
            let ev_ok = (s.ev - truth).abs() <= 3.0 * se;
            if !(em_ok && ev_ok) {
                ok = false;
                notes.push(format!(
                    "{statistic} n={}: EM {:.5} EV {:.5} vs {truth:.5}",
                    row.n, s.em, s.ev
                ));
            }
            if row.n == 10 {
                let band = match statistic {
                    Statistic::PhiN => Some(0.0435..=0.0495),
                    Statistic::PhiPrime => Some(0.0352..=0.0383),
                    Statistic::PhiDoublePrime => None,
                };
                if let Some(band) = band {
                    if !band.contains(&s.ev) {
                        ok = false;
                    }
                    notes.push(format!("{statistic} EV(10) {:.5}", s.ev));
                }
            }
        }
    }
    check(ok, notes.join("; "))
}

fn rmse_trend() -> Outcome {
    let sizes: Vec<usize> = (1..=10).map(|k| 10 * k).collect();
    let mut at_ten = Vec::new();
    let mut ok = true;
    let mut notes = Vec::new();
    for statistic in Statistic::ALL {
        let report = run_moment_study(&SimConfig::new(statistic, sizes.clone(), 10_000, 42))
            .map_err(|e| e.to_string())?;
        let rmse: Vec<f64> = report.rows.iter().map(|r| r.summary.rmse).collect();
        if !rmse.windows(2).all(|w| w[1] < w[0]) {
            ok = false;
            notes.push(format!("{statistic} not decreasing: {rmse:.4?}"));
        }
        at_ten.push(rmse[0]);
    }
    ok &= at_ten[0] > at_ten[1] && at_ten[0] > at_ten[2];
    notes.push(format!(
        "RMSE(10): phi {:.5}, phiprime {:.5}, phidprime {:.5}",
        at_ten[0], at_ten[1], at_ten[2]
    ));
    check(ok, notes.join("; "))
}

fn ks_table() -> Outcome {
    let small = run_ks_study(&KsConfig::new(vec![10], 1000, 42)).map_err(|e| e.to_string())?;
    let p_two = small
        .get(10, Combination::PhiVsPhiDoublePrime)
        .unwrap()
        .p_value;
    let p_norm = small.get(10, Combination::PhiVsNormal).unwrap().p_value;
    let mut ok = p_two < 0.01 && p_norm < 0.01;
    let mut notes = vec![format!(
        "n=10: phi-vs-phidprime p {p_two:.5}, phi-vs-normal p {p_norm:.5}"
    )];
    let mut passes = [[0u32; 6]; 2];
    for seed in 1..=10 {
        let report =
            run_ks_study(&KsConfig::new(vec![50, 100], 1000, seed)).map_err(|e| e.to_string())?;
        for (i, n) in [50, 100].into_iter().enumerate() {
            for (j, comb) in Combination::ALL.into_iter().enumerate() {
                if report.get(n, comb).unwrap().p_value > 0.01 {
                    passes[i][j] += 1;
                }
            }
        }
    }
    let fewest = passes.iter().flatten().copied().min().unwrap();
    ok &= fewest >= 8;
    notes.push(format!(
        "n in {{50,100}}: fewest seeds with p > 0.01 is {fewest}/10"
    ));
    check(ok, notes.join("; "))
}

fn normal_limit() -> Outcome {
    let options = DrawOptions {
        scale_by_sqrt_n: true,
        ..DrawOptions::default()
    };
    let pool = draw_pool(42, 100, Statistic::PhiDoublePrime, 100_000, options)
        .map_err(|e| e.to_string())?;
    let var = limiting_variance();
    let gap = ks_one_sample(&pool.values, |x| normal_cdf(x, 0.0, var).unwrap())
        .map_err(|e| e.to_string())?
        .statistic;
    check(gap < 0.01, format!("sup gap {gap:.5}"))
}

fn distribution_free() -> Outcome {
    let n = 8;
    let pool = draw_pool(42, n, Statistic::PhiN, 200_000, DrawOptions::default())
        .map_err(|e| e.to_string())?;
    let dist = enumerate_null_distribution(n).map_err(|e| e.to_string())?;
    // ascending distance is descending phi; accumulate from the top distance
    let mut rows: Vec<(f64, f64)> = dist.rows().map(|(_, _, phi, p)| (phi, p)).collect();
    rows.reverse();
    let mut cum = 0.0;
    let support: Vec<(f64, f64)> = rows
        .into_iter()
        .map(|(phi, p)| {
            cum += p;
            (phi, cum)
        })
        .collect();
    let gap = sup_gap_discrete(&pool.values, &support);
    check(gap < 0.005, format!("sup gap {gap:.5}"))
}

fn residual_scaling() -> Outcome {
    let diffs = |n: usize| -> Result<Vec<(f64, f64)>, String> {
        shared_representation_pairs(42, n, 10_000).map_err(|e| e.to_string())
    };
    let p50 = diffs(50)?;
    let p100 = diffs(100)?;
    let resid = |pairs: &[(f64, f64)]| rms(&pairs.iter().map(|(a, b)| a - b).collect::<Vec<_>>());
    let ratio = resid(&p50) / resid(&p100);
    let scale = 10.0;
    let a: Vec<f64> = p100.iter().map(|p| scale * p.0).collect();
    let b: Vec<f64> = p100.iter().map(|p| scale * p.1).collect();
    let corr = correlation(&a, &b);
    check(
        (1.6..=2.5).contains(&ratio) && corr > 0.95,
        format!("RMS ratio {ratio:.3}, correlation {corr:.4}"),
    )
}

fn uniform_moments() -> Outcome {
    const DRAWS: u64 = 1_000_000;
    let mut rng = StreamKey::new(42, 0).rng();
    let mut abs1 = Vec::with_capacity(DRAWS as usize);
    let mut abs2 = Vec::with_capacity(DRAWS as usize);
    let mut w = Vec::with_capacity(DRAWS as usize);
    for _ in 0..DRAWS {
        let (u, v1, v2) = (rng.uniform_open(), rng.uniform_open(), rng.uniform_open());
        abs1.push((u - v1).abs());
        abs2.push((u - v2).abs());
        w.push(u * (1.0 - u));
    }
    let c = UNIFORM_MOMENTS;
    let (m_abs, se_abs) = mean_with_se(&abs1);
    let (m_w, se_w) = mean_with_se(&w);
    let (_, v_abs, se_vabs) = variance_with_se(&abs1);
    let (_, v_w, se_vw) = variance_with_se(&w);
    let (cov_aw, se_aw) = covariance_with_se(&abs1, &w);
    let (cov_aa, se_aa) = covariance_with_se(&abs1, &abs2);
    let checks = [
        (m_abs, se_abs, c.e_abs_diff),
        (m_w, se_w, c.e_u_one_minus_u),
        (v_abs, se_vabs, c.var_abs_diff),
        (v_w, se_vw, c.var_u_one_minus_u),
        (cov_aw, se_aw, c.cov_absdiff_u1mu),
        (cov_aa, se_aa, c.cov_absdiff_shared),
    ];
    let worst_const = checks
        .iter()
        .map(|&(est, se, truth)| (est - truth.to_f64()).abs() / se)
        .fold(0.0, f64::max);

    let mut worst_cond: f64 = 0.0;
    for k in 1..=9 {
        let u = k as f64 / 10.0;
        let mut rng = StreamKey::new(43, k).rng();
        let vals: Vec<f64> = (0..100_000)
            .map(|_| (u - rng.uniform_open()).abs())
            .collect();
        let (m, se) = mean_with_se(&vals);
        worst_cond = worst_cond.max((m - cond_exp_abs_diff(u)).abs() / se);
    }
    check(
        worst_const <= 4.0 && worst_cond <= 4.0,
        format!("worst constant {worst_const:.2} SE, worst conditional mean {worst_cond:.2} SE"),
    )
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        std::iter::once("footrule").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    if code == 0 {
        Ok(out)
    } else {
        Err(format!(
            "{args:?} exited {code}: {}",
            String::from_utf8_lossy(&err)
        ))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands: [&[&str]; 3] = [
        &[
            "simulate",
            "moments",
            "--n-list",
            "10,50,100",
            "--reps",
            "10000",
        ],
        &[
            "simulate",
            "kstest",
            "--n-list",
            "10,50,100",
            "--reps",
            "1000",
        ],
        &["exact", "8"],
    ];
    let mut compared = 0;
    for cmd in commands {
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let path = dir.path().join(format!("out-{threads}.csv"));
            let mut args = cmd.to_vec();
            args.extend([
                "--threads",
                threads,
                "--full-precision",
                "--out",
                path.to_str().unwrap(),
            ]);
            if cmd[0] == "exact" {
                args.retain(|a| *a != "--full-precision");
            }
            let stdout = run_cli(&args)?;
            let file = fs::read(&path).map_err(|e| e.to_string())?;
            outputs.push((stdout, file));
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{cmd:?} differs between 1 and 4 threads"));
        }
        compared += 1;
    }
    curves_identical(dir.path())?;
    compared += 1;
    check(
        true,
        format!("{compared} commands byte-identical across --threads 1 and 4"),
    )
}

fn curves_identical(dir: &std::path::Path) -> Result<(), String> {
    let mut files = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.join(format!("curves-{threads}"));
        run_cli(&[
            "simulate",
            "curves",
            "--n-list",
            "10,100",
            "--reps",
            "20000",
            "--threads",
            threads,
            "--full-precision",
            "--out",
            out.to_str().unwrap(),
        ])?;
        let read = |name: &str| fs::read(out.join(name)).map_err(|e| e.to_string());
        files.push((read("density.csv")?, read("cdf.csv")?));
    }
    if files[0] != files[1] {
        return Err("curves output differs between 1 and 4 threads".into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exact null moments", Duration::from_secs(10), exact_moments),
        ("moment table", Duration::from_secs(60), table_two),
        ("RMSE trend", Duration::from_secs(90), rmse_trend),
        ("KS table", Duration::from_secs(60), ks_table),
        ("normal limit", Duration::from_secs(30), normal_limit),
        (
            "simulated vs exact null",
            Duration::from_secs(30),
            distribution_free,
        ),
        (
            "projection residual",
            Duration::from_secs(30),
            residual_scaling,
        ),
        (
            "uniform-moment constants",
            Duration::from_secs(20),
            uniform_moments,
        ),
        ("thread determinism", Duration::from_secs(120), determinism),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget of {budget:?}")),
            Err(d) => (false, d),
        };
        failures += usize::from(!pass);
        println!(
            "criterion {}: {} {name} ({detail}) [{:.2}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {}/9 passed", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
