//! Seeded Monte Carlo engine for the three statistics.
//!
//! Every replication owns an independent random stream addressed by a
//! [`StreamKey`]: a 64-bit seed selecting a ChaCha8 key and a 64-bit stream
//! id (the replication index) selecting the ChaCha stream. Replications run
//! in parallel on the ambient rayon pool and are collected in index order,
//! so results are bit-identical for any worker count.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::moments::limiting_variance;
use crate::rank::{compute_ranks, distance_of, phi_from_distance};
use crate::representations::{phi_double_prime_raw, phi_prime_raw};
use crate::stats::{
    ecdf_curve, gaussian_kde, ks_one_sample, ks_two_sample, normal_cdf, normal_pdf,
    standard_normal_quantile, summarize, CurveGrid, KsOutcome, SummaryStats,
};
use crate::{Error, Result, Statistic};

/// Address of one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub stream_id: u64,
}

impl StreamKey {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> StreamRng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(self.stream_id);
        StreamRng { inner }
    }
}

/// Deterministic generator for one stream.
#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval `(0, 1)`: the midpoint of one of `2^53`
    /// equal cells, so neither endpoint can occur.
    pub fn uniform_open(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.next_u64() >> 11) as f64 + 0.5) * SCALE
    }

    pub fn standard_normal(&mut self) -> f64 {
        standard_normal_quantile(self.uniform_open())
    }
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a study-specific seed from a user seed and a list of tags
/// (statistic, sample size, study kind), so that different studies and
/// statistics draw from unrelated streams.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(mix64(seed), |acc, &t| {
        mix64(
            acc ^ t
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .wrapping_add(0x632b_e59b_d9b4_e019),
        )
    })
}

/// Marginal laws used to generate the footrule's raw data. Ranks make the
/// statistic distribution-free, so both give the same law; `NormalUniform`
/// matches the normal-X / uniform-Y design for fidelity runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Marginals {
    #[default]
    Uniform,
    NormalUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DrawOptions {
    /// Multiply the value by `sqrt(n)` at draw time.
    pub scale_by_sqrt_n: bool,
    pub marginals: Marginals,
}

/// One replication's value and how many times its sample had to be redrawn
/// because of machine-level ties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    pub value: f64,
    pub redraws: u32,
}

const MAX_REDRAWS: u32 = 1000;

/// Draws one unscaled value of `statistic` at sample size `n`.
pub fn draw_statistic(key: StreamKey, n: usize, statistic: Statistic) -> Result<f64> {
    draw_with(key, n, statistic, DrawOptions::default()).map(|d| d.value)
}

pub fn draw_with(
    key: StreamKey,
    n: usize,
    statistic: Statistic,
    options: DrawOptions,
) -> Result<Draw> {
    let min = statistic.min_n();
    if n < min {
        return Err(Error::NTooSmall { n, min });
    }
    let mut rng = key.rng();
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut redraws = 0;
    let value = loop {
        match statistic {
            Statistic::PhiN => {
                for x in u.iter_mut() {
                    *x = match options.marginals {
                        Marginals::Uniform => rng.uniform_open(),
                        Marginals::NormalUniform => rng.standard_normal(),
                    };
                }
                fill_uniform(&mut rng, &mut v);
                match (compute_ranks(&u), compute_ranks(&v)) {
                    (Ok(r), Ok(s)) => break phi_from_distance(n, distance_of(&r, &s)),
                    (Err(Error::TiesPresent { .. }), _) | (_, Err(Error::TiesPresent { .. })) => {
                        redraws += 1;
                        if redraws > MAX_REDRAWS {
                            return Err(Error::InvalidConfig(format!(
                                "could not draw a tie-free sample of size {n}"
                            )));
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                }
            }
            Statistic::PhiPrime => {
                fill_uniform(&mut rng, &mut u);
                fill_uniform(&mut rng, &mut v);
                break phi_prime_raw(&u, &v);
            }
            Statistic::PhiDoublePrime => {
                fill_uniform(&mut rng, &mut u);
                fill_uniform(&mut rng, &mut v);
                break phi_double_prime_raw(&u, &v);
            }
        }
    };
    let value = if options.scale_by_sqrt_n {
        value * (n as f64).sqrt()
    } else {
        value
    };
    Ok(Draw { value, redraws })
}

fn fill_uniform(rng: &mut StreamRng, out: &mut [f64]) {
    for x in out.iter_mut() {
        *x = rng.uniform_open();
    }
}

/// Both representations evaluated on the same uniform sample.
pub fn draw_shared_representations(key: StreamKey, n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::NTooSmall { n, min: 2 });
    }
    let mut rng = key.rng();
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    fill_uniform(&mut rng, &mut u);
    fill_uniform(&mut rng, &mut v);
    Ok((phi_prime_raw(&u, &v), phi_double_prime_raw(&u, &v)))
}

/// A pool of `replications` draws with stream ids `0..replications`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawPool {
    pub values: Vec<f64>,
    pub redraws: u64,
}

pub fn draw_pool(
    seed: u64,
    n: usize,
    statistic: Statistic,
    replications: usize,
    options: DrawOptions,
) -> Result<DrawPool> {
    let draws = (0..replications as u64)
        .into_par_iter()
        .map(|id| draw_with(StreamKey::new(seed, id), n, statistic, options))
        .collect::<Result<Vec<_>>>()?;
    Ok(DrawPool {
        redraws: draws.iter().map(|d| d.redraws as u64).sum(),
        values: draws.into_iter().map(|d| d.value).collect(),
    })
}

const STUDY_MOMENTS: u64 = 1;
const STUDY_KS: u64 = 2;
const STUDY_CURVES: u64 = 3;
const STUDY_SHARED: u64 = 4;

/// Seed used for the pool of `statistic` at size `n` within a study.
fn pool_seed(seed: u64, study: u64, statistic: Statistic, n: usize) -> u64 {
    derive_seed(seed, &[study, statistic.tag(), n as u64])
}

/// Configuration of a replication study for one statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub replications: usize,
    pub sample_sizes: Vec<usize>,
    pub statistic: Statistic,
    pub scale_by_sqrt_n: bool,
    pub marginals: Marginals,
}

impl SimConfig {
    pub fn new(
        statistic: Statistic,
        sample_sizes: Vec<usize>,
        replications: usize,
        seed: u64,
    ) -> Self {
        Self {
            seed,
            replications,
            sample_sizes,
            statistic,
            scale_by_sqrt_n: false,
            marginals: Marginals::Uniform,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_common(self.replications, &self.sample_sizes, 1)
    }

    fn options(&self) -> DrawOptions {
        DrawOptions {
            scale_by_sqrt_n: self.scale_by_sqrt_n,
            marginals: self.marginals,
        }
    }
}

fn validate_common(replications: usize, sample_sizes: &[usize], min_reps: usize) -> Result<()> {
    if replications < min_reps {
        return Err(Error::InvalidConfig(format!(
            "replications must be at least {min_reps}, got {replications}"
        )));
    }
    if sample_sizes.is_empty() {
        return Err(Error::InvalidConfig("no sample sizes given".into()));
    }
    if let Some(&n) = sample_sizes.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidConfig(format!(
            "sample sizes must be at least 2, got {n}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub n: usize,
    pub summary: SummaryStats,
}

/// One summary per sample size, against the null value 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub statistic: Statistic,
    pub rows: Vec<MomentRow>,
    pub redraws: u64,
}

pub fn run_moment_study(config: &SimConfig) -> Result<MomentReport> {
    config.validate()?;
    if config.replications < 2 {
        return Err(Error::InvalidConfig(
            "a moment study needs at least 2 replications".into(),
        ));
    }
    let mut rows = Vec::with_capacity(config.sample_sizes.len());
    let mut redraws = 0;
    for &n in &config.sample_sizes {
        let pool = draw_pool(
            pool_seed(config.seed, STUDY_MOMENTS, config.statistic, n),
            n,
            config.statistic,
            config.replications,
            config.options(),
        )?;
        redraws += pool.redraws;
        rows.push(MomentRow {
            n,
            summary: summarize(&pool.values, 0.0)?,
        });
    }
    Ok(MomentReport {
        statistic: config.statistic,
        rows,
        redraws,
    })
}

/// The six distributional comparisons: each statistic against the normal
/// limit, and each pair of statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Combination {
    PhiVsNormal,
    PhiPrimeVsNormal,
    PhiDoublePrimeVsNormal,
    PhiVsPhiPrime,
    PhiVsPhiDoublePrime,
    PhiPrimeVsPhiDoublePrime,
}

impl Combination {
    pub const ALL: [Combination; 6] = [
        Combination::PhiVsNormal,
        Combination::PhiPrimeVsNormal,
        Combination::PhiDoublePrimeVsNormal,
        Combination::PhiVsPhiPrime,
        Combination::PhiVsPhiDoublePrime,
        Combination::PhiPrimeVsPhiDoublePrime,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Combination::PhiVsNormal => "phi-vs-normal",
            Combination::PhiPrimeVsNormal => "phiprime-vs-normal",
            Combination::PhiDoublePrimeVsNormal => "phidprime-vs-normal",
            Combination::PhiVsPhiPrime => "phi-vs-phiprime",
            Combination::PhiVsPhiDoublePrime => "phi-vs-phidprime",
            Combination::PhiPrimeVsPhiDoublePrime => "phiprime-vs-phidprime",
        }
    }

    /// The statistics compared; `None` on the right means the normal limit.
    pub fn operands(self) -> (Statistic, Option<Statistic>) {
        use Statistic::*;
        match self {
            Combination::PhiVsNormal => (PhiN, None),
            Combination::PhiPrimeVsNormal => (PhiPrime, None),
            Combination::PhiDoublePrimeVsNormal => (PhiDoublePrime, None),
            Combination::PhiVsPhiPrime => (PhiN, Some(PhiPrime)),
            Combination::PhiVsPhiDoublePrime => (PhiN, Some(PhiDoublePrime)),
            Combination::PhiPrimeVsPhiDoublePrime => (PhiPrime, Some(PhiDoublePrime)),
        }
    }
}

impl std::fmt::Display for Combination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KsConfig {
    pub seed: u64,
    /// Draws per statistic per sample size.
    pub replications: usize,
    pub sample_sizes: Vec<usize>,
    pub marginals: Marginals,
}

impl KsConfig {
    pub fn new(sample_sizes: Vec<usize>, replications: usize, seed: u64) -> Self {
        Self {
            seed,
            replications,
            sample_sizes,
            marginals: Marginals::Uniform,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KsRow {
    pub n: usize,
    pub combination: Combination,
    pub outcome: KsOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KsReport {
    pub rows: Vec<KsRow>,
    pub redraws: u64,
}

impl KsReport {
    pub fn get(&self, n: usize, combination: Combination) -> Option<&KsOutcome> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.combination == combination)
            .map(|r| &r.outcome)
    }
}

/// `sqrt(n)`-scaled draws of all three statistics at one sample size,
/// one independent pool per statistic.
fn scaled_pools(
    seed: u64,
    study: u64,
    n: usize,
    replications: usize,
    marginals: Marginals,
) -> Result<([Vec<f64>; 3], u64)> {
    let options = DrawOptions {
        scale_by_sqrt_n: true,
        marginals,
    };
    let mut redraws = 0;
    let mut pools: [Vec<f64>; 3] = Default::default();
    for (slot, statistic) in pools.iter_mut().zip(Statistic::ALL) {
        let pool = draw_pool(
            pool_seed(seed, study, statistic, n),
            n,
            statistic,
            replications,
            options,
        )?;
        redraws += pool.redraws;
        *slot = pool.values;
    }
    Ok((pools, redraws))
}

fn pool_index(statistic: Statistic) -> usize {
    match statistic {
        Statistic::PhiN => 0,
        Statistic::PhiPrime => 1,
        Statistic::PhiDoublePrime => 2,
    }
}

/// KS comparisons of the six combinations at each sample size. The same
/// pool of draws per statistic is reused across the combinations at a given
/// `n`; comparisons with the normal limit are one-sample tests against the
/// `Normal(0, 2/5)` CDF.
pub fn run_ks_study(config: &KsConfig) -> Result<KsReport> {
    validate_common(config.replications, &config.sample_sizes, 2)?;
    let limit = limiting_variance();
    let reference = |x: f64| normal_cdf(x, 0.0, limit).expect("positive variance");
    let mut rows = Vec::with_capacity(6 * config.sample_sizes.len());
    let mut redraws = 0;
    for &n in &config.sample_sizes {
        let (pools, r) = scaled_pools(
            config.seed,
            STUDY_KS,
            n,
            config.replications,
            config.marginals,
        )?;
        redraws += r;
        for combination in Combination::ALL {
            let (left, right) = combination.operands();
            let a = &pools[pool_index(left)];
            let outcome = match right {
                None => ks_one_sample(a, reference)?,
                Some(right) => ks_two_sample(a, &pools[pool_index(right)])?,
            };
            rows.push(KsRow {
                n,
                combination,
                outcome,
            });
        }
    }
    Ok(KsReport { rows, redraws })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveConfig {
    pub seed: u64,
    pub replications: usize,
    pub sample_sizes: Vec<usize>,
    pub grid_size: usize,
    pub marginals: Marginals,
}

impl CurveConfig {
    pub fn new(sample_sizes: Vec<usize>, replications: usize, seed: u64) -> Self {
        Self {
            seed,
            replications,
            sample_sizes,
            grid_size: crate::stats::DEFAULT_GRID_SIZE,
            marginals: Marginals::Uniform,
        }
    }
}

/// Density and CDF curves of `sqrt(n)` times one statistic, with the
/// `Normal(0, 2/5)` reference evaluated on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticCurves {
    pub statistic: Statistic,
    pub n: usize,
    pub density: CurveGrid,
    pub cdf: CurveGrid,
    pub normal_density: Vec<f64>,
    pub normal_cdf: Vec<f64>,
    /// Number of distinct scaled values among the draws.
    pub distinct_values: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveReport {
    pub curves: Vec<StatisticCurves>,
    pub redraws: u64,
}

impl CurveReport {
    pub fn get(&self, statistic: Statistic, n: usize) -> Option<&StatisticCurves> {
        self.curves
            .iter()
            .find(|c| c.statistic == statistic && c.n == n)
    }
}

pub fn run_curve_study(config: &CurveConfig) -> Result<CurveReport> {
    validate_common(config.replications, &config.sample_sizes, 2)?;
    let limit = limiting_variance();
    let mut curves = Vec::new();
    let mut redraws = 0;
    for &n in &config.sample_sizes {
        let (pools, r) = scaled_pools(
            config.seed,
            STUDY_CURVES,
            n,
            config.replications,
            config.marginals,
        )?;
        redraws += r;
        for statistic in Statistic::ALL {
            let values = &pools[pool_index(statistic)];
            let density = gaussian_kde(values, config.grid_size)?;
            let cdf = ecdf_curve(values, &density.grid)?;
            let normal_density = density
                .grid
                .iter()
                .map(|&g| normal_pdf(g, 0.0, limit))
                .collect::<Result<_>>()?;
            let normal_cdf = density
                .grid
                .iter()
                .map(|&g| normal_cdf(g, 0.0, limit))
                .collect::<Result<_>>()?;
            let mut sorted = values.clone();
            sorted.sort_by(f64::total_cmp);
            sorted.dedup();
            curves.push(StatisticCurves {
                statistic,
                n,
                density,
                cdf,
                normal_density,
                normal_cdf,
                distinct_values: sorted.len(),
            });
        }
    }
    Ok(CurveReport { curves, redraws })
}

/// Draws `replications` pairs `(phi', phi'')` computed on shared uniforms.
pub fn shared_representation_pairs(
    seed: u64,
    n: usize,
    replications: usize,
) -> Result<Vec<(f64, f64)>> {
    let seed = derive_seed(seed, &[STUDY_SHARED, n as u64]);
    (0..replications as u64)
        .into_par_iter()
        .map(|id| draw_shared_representations(StreamKey::new(seed, id), n))
        .collect()
}

/// Runs `f` on a dedicated rayon pool with `threads` workers (or the
/// global pool when `threads` is `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidConfig("thread count must be positive".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
