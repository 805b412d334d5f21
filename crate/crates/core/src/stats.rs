//! Distribution functions, Kolmogorov–Smirnov tests, kernel density
//! estimation, ECDFs and replication summaries.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;

use crate::sum::{pairwise_sum, pairwise_sum_by};
use crate::{Error, Result};

/// Default number of KDE grid points.
pub const DEFAULT_GRID_SIZE: usize = 512;

/// `P(Z <= z)` for a standard normal `Z`.
pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

pub fn standard_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `P(Z <= x)` for `Z ~ Normal(mean, variance)`.
pub fn normal_cdf(x: f64, mean: f64, variance: f64) -> Result<f64> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::BadVariance(variance));
    }
    Ok(standard_normal_cdf((x - mean) / variance.sqrt()))
}

pub fn normal_pdf(x: f64, mean: f64, variance: f64) -> Result<f64> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::BadVariance(variance));
    }
    let sd = variance.sqrt();
    Ok(standard_normal_pdf((x - mean) / sd) / sd)
}

/// Standard normal quantile.
///
/// Acklam's rational approximation followed by one Halley step against
/// [`standard_normal_cdf`]; accurate to a few ulps on `(0, 1)`. Returns
/// `-inf`/`inf` at 0/1 and NaN outside `[0, 1]`.
pub fn standard_normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    };
    // Halley refinement; work in the smaller tail to avoid cancellation.
    let e = if x < 0.0 {
        standard_normal_cdf(x) - p
    } else {
        (1.0 - p) - standard_normal_cdf(-x)
    };
    let u = e * (2.0 * PI).sqrt() * (x * x / 2.0).exp();
    x - u / (1.0 + x * u / 2.0)
}

/// Limiting Kolmogorov survival function
/// `Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2)`, clamped to
/// `[0, 1]`.
///
/// For small `lambda` the alternating series converges slowly, so the
/// equivalent theta-function form of the CDF,
/// `sqrt(2 pi)/lambda sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 lambda^2))`, is used
/// below `lambda = 1`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda.is_nan() {
        return f64::NAN;
    }
    if lambda <= 0.0 {
        return 1.0;
    }
    let value = if lambda < 1.0 {
        let mut cdf = 0.0;
        let w = PI * PI / (8.0 * lambda * lambda);
        for k in 1..=100u32 {
            let m = (2 * k - 1) as f64;
            let term = (-m * m * w).exp();
            cdf += term;
            if term < 1e-16 * cdf {
                break;
            }
        }
        1.0 - (2.0 * PI).sqrt() / lambda * cdf
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 1..=100u32 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            if term < 1e-16 {
                break;
            }
            sum += sign * term;
            sign = -sign;
        }
        2.0 * sum
    };
    value.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsMode {
    OneSample,
    TwoSample,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
    pub effective_n: f64,
    pub mode: KsMode,
}

fn sorted_finite(samples: &[f64]) -> Result<Vec<f64>> {
    if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample KS test against a continuous reference CDF, with the
/// asymptotic Kolmogorov p-value.
pub fn ks_one_sample<F>(samples: &[f64], reference_cdf: F) -> Result<KsOutcome>
where
    F: Fn(f64) -> f64,
{
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            min: 2,
            got: samples.len(),
        });
    }
    let sorted = sorted_finite(samples)?;
    let n = sorted.len() as f64;
    let mut statistic: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = reference_cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        statistic = statistic.max(above).max(below);
    }
    let statistic = statistic.clamp(0.0, 1.0);
    Ok(KsOutcome {
        statistic,
        p_value: kolmogorov_sf(n.sqrt() * statistic),
        effective_n: n,
        mode: KsMode::OneSample,
    })
}

/// Two-sample KS test: `sup_x |ECDF_a(x) - ECDF_b(x)|` by a sorted merge
/// that steps over tied values in both samples at once.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsOutcome> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(Error::TooFewSamples {
                min: 2,
                got: s.len(),
            });
        }
    }
    let xs = sorted_finite(a)?;
    let ys = sorted_finite(b)?;
    let (m, n) = (xs.len(), ys.len());
    let (mf, nf) = (m as f64, n as f64);
    let (mut i, mut j) = (0, 0);
    let mut statistic: f64 = 0.0;
    while i < m && j < n {
        let t = xs[i].min(ys[j]);
        while i < m && xs[i] <= t {
            i += 1;
        }
        while j < n && ys[j] <= t {
            j += 1;
        }
        statistic = statistic.max((i as f64 / mf - j as f64 / nf).abs());
    }
    let effective_n = mf * nf / (mf + nf);
    Ok(KsOutcome {
        statistic,
        p_value: kolmogorov_sf(effective_n.sqrt() * statistic),
        effective_n,
        mode: KsMode::TwoSample,
    })
}

/// A curve tabulated on an increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveGrid {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl CurveGrid {
    /// Trapezoid-rule integral of the curve over its grid.
    pub fn trapezoid_integral(&self) -> f64 {
        pairwise_sum_by(self.grid.len().saturating_sub(1), |i| {
            0.5 * (self.values[i] + self.values[i + 1]) * (self.grid[i + 1] - self.grid[i])
        })
    }

    /// Largest `|values[i] - other(grid[i])|`.
    pub fn sup_gap<F: Fn(f64) -> f64>(&self, other: F) -> f64 {
        self.grid
            .iter()
            .zip(&self.values)
            .map(|(&g, &v)| (v - other(g)).abs())
            .fold(0.0, f64::max)
    }
}

/// `n` equispaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Sample quantile by linear interpolation between order statistics
/// (the `(n-1)p` rule). `sorted` must be ascending and non-empty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn mean_and_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let ss = pairwise_sum_by(xs.len(), |i| (xs[i] - mean).powi(2));
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Rule-of-thumb bandwidth `0.9 min(sd, IQR/1.34) n^(-1/5)`; when the IQR is
/// zero the standard deviation is used alone.
pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            min: 2,
            got: samples.len(),
        });
    }
    let sorted = sorted_finite(samples)?;
    let (_, sd) = mean_and_sd(&sorted);
    if sd <= 0.0 {
        return Err(Error::DegenerateSample);
    }
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * spread * (sorted.len() as f64).powf(-0.2))
}

/// Gaussian kernel density estimator with the rule-of-thumb bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKde {
    samples: Vec<f64>,
    bandwidth: f64,
}

impl GaussianKde {
    pub fn new(samples: &[f64]) -> Result<Self> {
        Ok(Self {
            bandwidth: silverman_bandwidth(samples)?,
            samples: samples.to_vec(),
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// `(1/(n b)) sum_i phi((x - x_i)/b)`.
    pub fn density(&self, x: f64) -> f64 {
        let b = self.bandwidth;
        let norm = 1.0 / (self.samples.len() as f64 * b * (2.0 * PI).sqrt());
        norm * pairwise_sum_by(self.samples.len(), |i| {
            let z = (x - self.samples[i]) / b;
            (-0.5 * z * z).exp()
        })
    }

    /// The density on `grid_size` equispaced points spanning
    /// `[min - 3b, max + 3b]`.
    ///
    /// Grid points are evaluated in parallel, each independently, so the
    /// result does not depend on the thread count.
    pub fn curve(&self, grid_size: usize) -> Result<CurveGrid> {
        if grid_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid size must be at least 2, got {grid_size}"
            )));
        }
        let b = self.bandwidth;
        let (lo, hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        let grid = linspace(lo - 3.0 * b, hi + 3.0 * b, grid_size);
        let values = grid.par_iter().map(|&g| self.density(g)).collect();
        Ok(CurveGrid { grid, values })
    }
}

/// Gaussian-kernel density estimate tabulated on `grid_size` points; see
/// [`GaussianKde::curve`].
pub fn gaussian_kde(samples: &[f64], grid_size: usize) -> Result<CurveGrid> {
    GaussianKde::new(samples)?.curve(grid_size)
}

/// Empirical CDF `#{x_i <= g} / n` at each grid point.
pub fn ecdf_curve(samples: &[f64], grid: &[f64]) -> Result<CurveGrid> {
    if samples.is_empty() {
        return Err(Error::TooFewSamples { min: 1, got: 0 });
    }
    let sorted = sorted_finite(samples)?;
    let n = sorted.len() as f64;
    let values = grid
        .iter()
        .map(|&g| sorted.partition_point(|&x| x <= g) as f64 / n)
        .collect();
    Ok(CurveGrid {
        grid: grid.to_vec(),
        values,
    })
}

/// Estimated mean, estimated variance, bias and root-mean-square error of a
/// set of replicated estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub em: f64,
    pub ev: f64,
    pub bias: f64,
    pub rmse: f64,
    pub count: usize,
}

/// `em` is the mean, `ev` uses the `count - 1` divisor, `bias = em - truth`
/// and `rmse = sqrt(mean((x - truth)^2))`.
///
/// The mean square error is assembled as `ss/count + bias^2`, which equals
/// the direct definition algebraically and keeps the decomposition exact up
/// to rounding.
pub fn summarize(estimates: &[f64], true_value: f64) -> Result<SummaryStats> {
    let count = estimates.len();
    if count < 2 {
        return Err(Error::TooFewSamples { min: 2, got: count });
    }
    let c = count as f64;
    let em = pairwise_sum(estimates) / c;
    let ss = pairwise_sum_by(count, |i| (estimates[i] - em).powi(2));
    let bias = em - true_value;
    Ok(SummaryStats {
        em,
        ev: ss / (c - 1.0),
        bias,
        rmse: (ss / c + bias * bias).sqrt(),
        count,
    })
}
