//! Command-line front end for the `footrule` binary.
//!
//! ```text
//! footrule stat <FILE> [--header] [--exact] [--out FILE]
//! footrule exact <N> [--out FILE]
//! footrule simulate moments|kstest [--seed S] [--reps R] [--n-list 10,20] [--out FILE]
//! footrule simulate curves [--seed S] [--reps R] [--n-list ...] [--grid-size G] --out DIR
//! ```
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 data with ties.
//! `--threads` (or `FOOTRULE_THREADS`) sets the worker count and never
//! changes the output bytes.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::mc::{
    run_curve_study, run_ks_study, run_moment_study, with_threads, CurveConfig, KsConfig,
    Marginals, SimConfig,
};
use crate::moments::limiting_variance;
use crate::rank::{
    compute_ranks, enumerate_null_distribution, footrule_from_ranks, RankPair, MAX_ENUMERATION_N,
};
use crate::stats::{standard_normal_cdf, DEFAULT_GRID_SIZE};
use crate::{Error, Statistic};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TIES: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "footrule",
    version,
    about = "Spearman's footrule: statistic, exact null law and simulation studies"
)]
struct Cli {
    /// Worker threads for simulations; does not affect output.
    #[arg(long, global = true, env = "FOOTRULE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Footrule coefficient and independence test for a two-column CSV.
    Stat(StatArgs),
    /// Exact null distribution of the footrule distance.
    Exact(ExactArgs),
    /// Monte Carlo studies.
    Simulate {
        #[command(subcommand)]
        study: Study,
    },
}

#[derive(Debug, Args)]
struct StatArgs {
    input: PathBuf,
    /// The first row is a header.
    #[arg(long)]
    header: bool,
    /// Exact permutation p-value (n <= 10).
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    full_precision: bool,
}

#[derive(Debug, Args)]
struct ExactArgs {
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Study {
    /// EM, EV, bias and RMSE of each statistic per sample size.
    Moments(SimArgs),
    /// KS p-values for the six combinations per sample size.
    Kstest(SimArgs),
    /// Density and CDF curves of the sqrt(n)-scaled statistics.
    Curves(CurveArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MarginalsArg {
    Uniform,
    NormalUniform,
}

impl From<MarginalsArg> for Marginals {
    fn from(m: MarginalsArg) -> Self {
        match m {
            MarginalsArg::Uniform => Marginals::Uniform,
            MarginalsArg::NormalUniform => Marginals::NormalUniform,
        }
    }
}

#[derive(Debug, Args)]
struct SimArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    reps: Option<usize>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    full_precision: bool,
    #[arg(long, value_enum, default_value = "uniform")]
    marginals: MarginalsArg,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    grid_size: usize,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Ties(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Ties(_) => EXIT_TIES,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Ties(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs the CLI on `args` (including the program name), writing normal
/// output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Stat(args) => cmd_stat(&args, out),
        Command::Exact(args) => cmd_exact(&args, out),
        Command::Simulate { study } => cmd_simulate(study, cli.threads, out, err),
    }
}

fn fmt_num(x: f64, full: bool) -> String {
    if full {
        format!("{x}")
    } else {
        format!("{x:.5}")
    }
}

/// Writes `contents` to `path` atomically (temp file + rename), or to `out`
/// when no path is given.
fn emit(path: Option<&Path>, contents: &str, out: &mut dyn Write) -> CliResult<()> {
    match path {
        None => out
            .write_all(contents.as_bytes())
            .map_err(|e| CliError::Usage(format!("cannot write output: {e}"))),
        Some(path) => write_atomic(path, contents),
    }
}

fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Usage(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

struct DataRows {
    x: Vec<f64>,
    y: Vec<f64>,
    lines: Vec<u64>,
}

fn read_pairs(path: &Path, header: bool) -> CliResult<DataRows> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = DataRows {
        x: Vec::new(),
        y: Vec::new(),
        lines: Vec::new(),
    };
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Usage(format!("parse failure: {e}")))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(CliError::Usage(format!(
                "row at line {line}: expected 2 columns, found {}",
                record.len()
            )));
        }
        let parse = |s: &str| -> CliResult<f64> {
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::Usage(format!(
                    "row at line {line}: `{s}` is not a finite number"
                ))),
            }
        };
        rows.x.push(parse(&record[0])?);
        rows.y.push(parse(&record[1])?);
        rows.lines.push(line);
    }
    Ok(rows)
}

/// Result of `footrule stat`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestReport {
    pub n: usize,
    pub distance: u64,
    pub phi: f64,
    /// `sqrt(n) phi / sqrt(2/5)`
    pub z: f64,
    pub p_two_sided: f64,
    pub method: TestMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestMethod {
    Exact,
    Normal,
}

impl TestMethod {
    pub fn label(self) -> &'static str {
        match self {
            TestMethod::Exact => "exact",
            TestMethod::Normal => "normal",
        }
    }
}

/// Independence test on ranks.
///
/// The normal method uses `p = 2 (1 - Phi(|z|))` with a half-lattice
/// continuity correction applied to `|phi|` (the reported `z` is uncorrected);
/// the exact method uses the permutation tail `P(|phi| >= |phi_obs|)` and
/// requires `n <= 10`.
pub fn independence_test(ranks: &RankPair, method: TestMethod) -> crate::Result<TestReport> {
    let result = footrule_from_ranks(ranks);
    let n = ranks.n();
    let nf = n as f64;
    let scale = nf.sqrt() / limiting_variance().sqrt();
    let z = scale * result.phi;
    let p_two_sided = match method {
        TestMethod::Normal => {
            // The distance is always even, so phi lives on a lattice of step
            // 6/(n^2-1); shrink |phi| by half a step before the tail lookup.
            let half_step = 3.0 / (nf * nf - 1.0);
            let z_cc = scale * (result.phi.abs() - half_step).max(0.0);
            (2.0 * standard_normal_cdf(-z_cc)).min(1.0)
        }
        TestMethod::Exact => enumerate_null_distribution(n)?.two_sided_p(result.distance),
    };
    Ok(TestReport {
        n,
        distance: result.distance,
        phi: result.phi,
        z,
        p_two_sided,
        method,
    })
}

fn rank_margin(values: &[f64], lines: &[u64], margin: &str) -> CliResult<Vec<usize>> {
    compute_ranks(values).map_err(|e| match e {
        Error::TiesPresent { first, second } => CliError::Ties(format!(
            "tied {margin} values at lines {} and {}; the footrule test assumes continuous data",
            lines[first], lines[second]
        )),
        other => other.into(),
    })
}

fn cmd_stat(args: &StatArgs, out: &mut dyn Write) -> CliResult<()> {
    let rows = read_pairs(&args.input, args.header)?;
    if rows.x.len() < 2 {
        return Err(CliError::Usage(format!(
            "need at least 2 data rows, found {}",
            rows.x.len()
        )));
    }
    let r = rank_margin(&rows.x, &rows.lines, "x")?;
    let s = rank_margin(&rows.y, &rows.lines, "y")?;
    let ranks = RankPair::new(r, s)?;
    let method = if args.exact {
        if ranks.n() > MAX_ENUMERATION_N {
            return Err(CliError::Usage(format!(
                "--exact supports n <= {MAX_ENUMERATION_N}, got n = {}",
                ranks.n()
            )));
        }
        TestMethod::Exact
    } else {
        TestMethod::Normal
    };
    let report = independence_test(&ranks, method)?;
    let full = args.full_precision;
    let csv = format!(
        "n,distance,phi,z,p_value,method\n{},{},{},{},{},{}\n",
        report.n,
        report.distance,
        fmt_num(report.phi, full),
        fmt_num(report.z, full),
        fmt_num(report.p_two_sided, full),
        report.method.label()
    );
    if let Some(path) = &args.out {
        write_atomic(path, &csv)?;
    }
    out.write_all(csv.as_bytes())
        .map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
}

/// CSV `d,count,phi,probability` of the exact null law, ascending in `d`.
/// Values are written with shortest round-trip precision.
pub fn exact_csv(n: usize) -> crate::Result<String> {
    let dist = enumerate_null_distribution(n)?;
    let mut s = String::from("d,count,phi,probability\n");
    for (d, count, phi, p) in dist.rows() {
        let _ = writeln!(s, "{d},{count},{phi},{p}");
    }
    Ok(s)
}

fn cmd_exact(args: &ExactArgs, out: &mut dyn Write) -> CliResult<()> {
    let csv = exact_csv(args.n)?;
    emit(args.out.as_deref(), &csv, out)
}

const DEFAULT_N_LIST: [usize; 10] = [10, 20, 30, 40, 50, 60, 70, 80, 90, 100];
const DEFAULT_CURVE_N_LIST: [usize; 4] = [10, 20, 30, 100];

fn n_list(args: &SimArgs, default: &[usize]) -> Vec<usize> {
    args.n_list.clone().unwrap_or_else(|| default.to_vec())
}

/// CSV `statistic,n,em,ev,bias,rmse` for all three statistics.
pub fn moments_csv(
    seed: u64,
    replications: usize,
    sample_sizes: &[usize],
    marginals: Marginals,
    full: bool,
) -> crate::Result<(String, u64)> {
    let mut s = String::from("statistic,n,em,ev,bias,rmse\n");
    let mut redraws = 0;
    for statistic in Statistic::ALL {
        let mut cfg = SimConfig::new(statistic, sample_sizes.to_vec(), replications, seed);
        cfg.marginals = marginals;
        let report = run_moment_study(&cfg)?;
        redraws += report.redraws;
        for row in &report.rows {
            let m = &row.summary;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                statistic,
                row.n,
                fmt_num(m.em, full),
                fmt_num(m.ev, full),
                fmt_num(m.bias, full),
                fmt_num(m.rmse, full)
            );
        }
    }
    Ok((s, redraws))
}

/// CSV `n,combination,ks_stat,p_value`.
pub fn kstest_csv(config: &KsConfig, full: bool) -> crate::Result<(String, u64)> {
    let report = run_ks_study(config)?;
    let mut s = String::from("n,combination,ks_stat,p_value\n");
    for row in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            row.n,
            row.combination,
            fmt_num(row.outcome.statistic, full),
            fmt_num(row.outcome.p_value, full)
        );
    }
    Ok((s, report.redraws))
}

/// Long-format density and CDF CSVs:
/// `statistic,n,grid,density,normal_density` and
/// `statistic,n,grid,cdf,normal_cdf`.
pub fn curves_csv(config: &CurveConfig, full: bool) -> crate::Result<(String, String, u64)> {
    let report = run_curve_study(config)?;
    let mut density = String::from("statistic,n,grid,density,normal_density\n");
    let mut cdf = String::from("statistic,n,grid,cdf,normal_cdf\n");
    for c in &report.curves {
        for i in 0..c.density.grid.len() {
            let g = fmt_num(c.density.grid[i], full);
            let _ = writeln!(
                density,
                "{},{},{},{},{}",
                c.statistic,
                c.n,
                g,
                fmt_num(c.density.values[i], full),
                fmt_num(c.normal_density[i], full)
            );
            let _ = writeln!(
                cdf,
                "{},{},{},{},{}",
                c.statistic,
                c.n,
                g,
                fmt_num(c.cdf.values[i], full),
                fmt_num(c.normal_cdf[i], full)
            );
        }
    }
    Ok((density, cdf, report.redraws))
}

fn note_redraws(redraws: u64, err: &mut dyn Write) {
    if redraws > 0 {
        let _ = writeln!(
            err,
            "note: {redraws} replication(s) redrawn because of tied values"
        );
    }
}

fn cmd_simulate(
    study: Study,
    threads: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<()> {
    match study {
        Study::Moments(args) => {
            let sizes = n_list(&args, &DEFAULT_N_LIST);
            let reps = args.reps.unwrap_or(10_000);
            let (csv, redraws) = with_threads(threads, || {
                moments_csv(
                    args.seed,
                    reps,
                    &sizes,
                    args.marginals.into(),
                    args.full_precision,
                )
            })??;
            note_redraws(redraws, err);
            emit(args.out.as_deref(), &csv, out)
        }
        Study::Kstest(args) => {
            let mut cfg = KsConfig::new(
                n_list(&args, &DEFAULT_N_LIST),
                args.reps.unwrap_or(1000),
                args.seed,
            );
            cfg.marginals = args.marginals.into();
            let (csv, redraws) = with_threads(threads, || kstest_csv(&cfg, args.full_precision))??;
            note_redraws(redraws, err);
            emit(args.out.as_deref(), &csv, out)
        }
        Study::Curves(args) => {
            let sim = &args.sim;
            let dir = sim
                .out
                .clone()
                .ok_or_else(|| CliError::Usage("curves requires --out DIR".into()))?;
            let mut cfg = CurveConfig::new(
                n_list(sim, &DEFAULT_CURVE_N_LIST),
                sim.reps.unwrap_or(100_000),
                sim.seed,
            );
            cfg.grid_size = args.grid_size;
            cfg.marginals = sim.marginals.into();
            let (density, cdf, redraws) =
                with_threads(threads, || curves_csv(&cfg, sim.full_precision))??;
            note_redraws(redraws, err);
            fs::create_dir_all(&dir)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
            let density_path = dir.join("density.csv");
            write_atomic(&density_path, &density)?;
            if let Err(e) = write_atomic(&dir.join("cdf.csv"), &cdf) {
                let _ = fs::remove_file(&density_path);
                return Err(e);
            }
            Ok(())
        }
    }
}
