#![allow(dead_code)]

/// Mean, unbiased variance and the standard error of that variance
/// estimate, `sqrt((m4 - s^4 (N-3)/(N-1)) / N)`.
pub fn variance_with_se(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let var = m2 * n / (n - 1.0);
    let se = ((m4 - var * var * (n - 3.0) / (n - 1.0)) / n).sqrt();
    (mean, var, se)
}

/// Mean and its standard error.
pub fn mean_with_se(xs: &[f64]) -> (f64, f64) {
    let (mean, var, _) = variance_with_se(xs);
    (mean, (var / xs.len() as f64).sqrt())
}

/// Sample covariance and the standard error of the mean of the centered
/// products.
pub fn covariance_with_se(a: &[f64], b: &[f64]) -> (f64, f64) {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let prods: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).collect();
    let (m, se) = mean_with_se(&prods);
    (m * n / (n - 1.0), se)
}

pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

pub fn rms(xs: &[f64]) -> f64 {
    (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Sup distance between the ECDF of `samples` and a CDF given on the
/// sorted support points `(value, cdf)` of a discrete law.
pub fn sup_gap_discrete(samples: &[f64], support: &[(f64, f64)]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut gap: f64 = 0.0;
    let mut prev_cdf = 0.0;
    for &(value, cdf) in support {
        let below = sorted.partition_point(|&x| x < value - 1e-9) as f64 / n;
        let at = sorted.partition_point(|&x| x <= value + 1e-9) as f64 / n;
        gap = gap.max((below - prev_cdf).abs()).max((at - cdf).abs());
        prev_cdf = cdf;
    }
    gap
}
