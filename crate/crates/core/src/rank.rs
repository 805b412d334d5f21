//! Ranks, the footrule distance and coefficient, and the exact permutation
//! null distribution.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::{Error, Result};

/// Largest `n` accepted by [`enumerate_null_distribution`] (10! permutations).
pub const MAX_ENUMERATION_N: usize = 10;

/// Paired continuous observations `(x_i, y_i)`.
///
/// Construction checks the lengths and finiteness. Ties are detected when
/// the sample is ranked, so the opt-in mid-rank path can still accept them.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl PairedSample {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(Error::TooShort {
                min: 2,
                got: x.len(),
            });
        }
        for (index, (a, b)) in x.iter().zip(&y).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Swaps the roles of `x` and `y`.
    pub fn transposed(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }
}

fn argsort(values: &[f64]) -> Result<Vec<usize>> {
    if values.len() < 2 {
        return Err(Error::TooShort {
            min: 2,
            got: values.len(),
        });
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    Ok(order)
}

/// Rank of each value among all values (1 = smallest).
///
/// Equivalent to `#{k : values[k] <= values[i]}` for tie-free input.
/// Equal values are rejected with [`Error::TiesPresent`]; `0.0` and `-0.0`
/// count as equal.
pub fn compute_ranks(values: &[f64]) -> Result<Vec<usize>> {
    let order = argsort(values)?;
    for w in order.windows(2) {
        if values[w[0]] == values[w[1]] {
            return Err(Error::TiesPresent {
                first: w[0].min(w[1]),
                second: w[0].max(w[1]),
            });
        }
    }
    let mut ranks = vec![0; values.len()];
    for (pos, &idx) in order.iter().enumerate() {
        ranks[idx] = pos + 1;
    }
    Ok(ranks)
}

/// Mid-ranks: tied values share the average of the ranks they occupy.
///
/// This is an opt-in escape hatch for tied data. The null moments and the
/// asymptotic theory in this crate assume continuous data and do not cover
/// it.
pub fn compute_midranks(values: &[f64]) -> Result<Vec<f64>> {
    let order = argsort(values)?;
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let mid = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = mid;
        }
        start = end;
    }
    Ok(ranks)
}

/// Two rank vectors, each a permutation of `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankPair {
    r: Vec<usize>,
    s: Vec<usize>,
}

fn check_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &v in p {
        if v == 0 || v > p.len() || seen[v - 1] {
            return false;
        }
        seen[v - 1] = true;
    }
    true
}

impl RankPair {
    pub fn new(r: Vec<usize>, s: Vec<usize>) -> Result<Self> {
        if r.len() != s.len() {
            return Err(Error::LengthMismatch {
                left: r.len(),
                right: s.len(),
            });
        }
        if r.is_empty() {
            return Err(Error::TooShort { min: 1, got: 0 });
        }
        if !check_permutation(&r) || !check_permutation(&s) {
            return Err(Error::NotAPermutation { n: r.len() });
        }
        Ok(Self { r, s })
    }

    /// Ranks both margins of a sample.
    pub fn from_sample(sample: &PairedSample) -> Result<Self> {
        Ok(Self {
            r: compute_ranks(sample.x())?,
            s: compute_ranks(sample.y())?,
        })
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[usize] {
        &self.r
    }

    pub fn s(&self) -> &[usize] {
        &self.s
    }

    /// `sum_i sum_j |r_i - s_j|` by direct double loop.
    ///
    /// For any pair of permutations this equals `n(n^2 - 1)/3`.
    pub fn cross_distance_sum(&self) -> u64 {
        let mut total = 0u64;
        for &ri in &self.r {
            for &sj in &self.s {
                total += ri.abs_diff(sj) as u64;
            }
        }
        total
    }
}

/// `sum_i |r_i - s_i|`.
pub fn footrule_distance(ranks: &RankPair) -> u64 {
    distance_of(&ranks.r, &ranks.s)
}

pub(crate) fn distance_of(r: &[usize], s: &[usize]) -> u64 {
    r.iter().zip(s).map(|(&a, &b)| a.abs_diff(b) as u64).sum()
}

/// The footrule coefficient of a sample together with its distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootruleResult {
    pub n: usize,
    pub distance: u64,
    pub phi: f64,
}

impl FootruleResult {
    /// `phi = 1 - 3 D / (n^2 - 1)`, evaluated as one division of exact
    /// integers.
    pub fn from_distance(n: usize, distance: u64) -> Self {
        Self {
            n,
            distance,
            phi: phi_from_distance(n, distance),
        }
    }
}

pub(crate) fn phi_from_distance(n: usize, distance: u64) -> f64 {
    let m = (n as i128) * (n as i128) - 1;
    (m - 3 * distance as i128) as f64 / m as f64
}

/// Largest attainable footrule distance, `floor(n^2 / 2)`.
pub fn max_distance(n: usize) -> u64 {
    (n as u64 * n as u64) / 2
}

/// Smallest attainable coefficient, `1 - 3 floor(n^2/2) / (n^2 - 1)`.
///
/// Equals -1 at `n = 2` and approaches -1/2 from below as `n` grows.
pub fn min_phi(n: usize) -> f64 {
    phi_from_distance(n, max_distance(n))
}

pub fn footrule_from_ranks(ranks: &RankPair) -> FootruleResult {
    FootruleResult::from_distance(ranks.n(), footrule_distance(ranks))
}

/// Ranks both margins and evaluates the footrule coefficient.
pub fn footrule_coefficient(sample: &PairedSample) -> Result<FootruleResult> {
    let ranks = RankPair::from_sample(sample)?;
    Ok(footrule_from_ranks(&ranks))
}

/// Footrule computed on mid-ranks. Distances may be half-integers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidRankFootrule {
    pub n: usize,
    pub distance: f64,
    pub phi: f64,
}

/// Opt-in footrule for tied data (mid-rank convention). Outside the
/// continuous-data theory: null moments and p-values do not apply.
pub fn footrule_coefficient_midrank(sample: &PairedSample) -> Result<MidRankFootrule> {
    let r = compute_midranks(sample.x())?;
    let s = compute_midranks(sample.y())?;
    let distance: f64 = r.iter().zip(&s).map(|(a, b)| (a - b).abs()).sum();
    let n = sample.len() as f64;
    Ok(MidRankFootrule {
        n: sample.len(),
        distance,
        phi: 1.0 - 3.0 * distance / (n * n - 1.0),
    })
}

/// Exact null law of the footrule distance for a given `n`: the number of
/// permutations `pi` of `1..=n` with `sum_i |i - pi(i)| = D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactNullDistribution {
    n: usize,
    counts: BTreeMap<u64, u64>,
}

impl ExactNullDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    /// Number of permutations, `n!`.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn probability(&self, distance: u64) -> f64 {
        self.counts.get(&distance).copied().unwrap_or(0) as f64 / self.total() as f64
    }

    /// Support points in ascending distance as `(D, count, phi, probability)`.
    pub fn rows(&self) -> impl Iterator<Item = (u64, u64, f64, f64)> + '_ {
        let total = self.total() as f64;
        self.counts
            .iter()
            .map(move |(&d, &c)| (d, c, phi_from_distance(self.n, d), c as f64 / total))
    }

    pub fn mean_distance(&self) -> f64 {
        let (s1, _) = self.raw_sums();
        s1 as f64 / self.total() as f64
    }

    /// Mean of phi, from exact integer sums.
    pub fn phi_mean(&self) -> f64 {
        let (s1, _) = self.raw_sums();
        let total = self.total() as i128;
        let m = (self.n * self.n) as i128 - 1;
        // E phi = (m N - 3 S1) / (m N)
        (m * total - 3 * s1 as i128) as f64 / (m * total) as f64
    }

    /// Variance of phi, `9 Var(D) / (n^2 - 1)^2`, from exact integer sums.
    pub fn phi_variance(&self) -> f64 {
        let (s1, s2) = self.raw_sums();
        let total = self.total() as i128;
        let m = (self.n * self.n) as i128 - 1;
        let numer = 9 * (total * s2 as i128 - (s1 as i128) * (s1 as i128));
        numer as f64 / (total * total * m * m) as f64
    }

    fn raw_sums(&self) -> (u128, u128) {
        self.counts
            .iter()
            .fold((0u128, 0u128), |(s1, s2), (&d, &c)| {
                let (d, c) = (d as u128, c as u128);
                (s1 + c * d, s2 + c * d * d)
            })
    }

    /// `P(D <= distance)`.
    pub fn cdf_distance(&self, distance: u64) -> f64 {
        let below: u64 = self.counts.range(..=distance).map(|(_, &c)| c).sum();
        below as f64 / self.total() as f64
    }

    /// `P(phi <= x)` under the exact law.
    pub fn cdf_phi(&self, x: f64) -> f64 {
        // phi decreases in D
        let below: u64 = self
            .counts
            .iter()
            .filter(|(&d, _)| phi_from_distance(self.n, d) <= x)
            .map(|(_, &c)| c)
            .sum();
        below as f64 / self.total() as f64
    }

    /// Two-sided tail `P(|phi| >= |phi_obs|)` for an observed distance,
    /// compared in exact integer arithmetic.
    pub fn two_sided_p(&self, observed_distance: u64) -> f64 {
        let m = (self.n * self.n) as i128 - 1;
        let obs = (m - 3 * observed_distance as i128).abs();
        let hits: u64 = self
            .counts
            .iter()
            .filter(|(&d, _)| (m - 3 * d as i128).abs() >= obs)
            .map(|(_, &c)| c)
            .sum();
        hits as f64 / self.total() as f64
    }
}

/// Counts permutations of `1..=n` by footrule distance to the identity.
///
/// Because ranks of an independent pair are a uniform random permutation
/// relative to each other, this is the exact null law of `D`. The work is
/// split across rayon workers by the image of the first position; each
/// worker runs Heap's algorithm with an incremental distance update, and the
/// per-worker histograms are added, so the result does not depend on the
/// number of threads.
pub fn enumerate_null_distribution(n: usize) -> Result<ExactNullDistribution> {
    if n < 2 {
        return Err(Error::NTooSmall { n, min: 2 });
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::NTooLarge {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    let bins = max_distance(n) as usize + 1;
    let hist = (1..=n)
        .into_par_iter()
        .map(|first| {
            let mut hist = vec![0u64; bins];
            let rest: Vec<usize> = (1..=n).filter(|&v| v != first).collect();
            count_tail(first.abs_diff(1) as u64, rest, &mut hist);
            hist
        })
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let counts = hist
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(d, c)| (d as u64, c))
        .collect();
    Ok(ExactNullDistribution { n, counts })
}

/// Heap's algorithm over `values` placed at positions `2..=n`.
fn count_tail(offset: u64, mut values: Vec<usize>, hist: &mut [u64]) {
    let k = values.len();
    let pos = |i: usize| i + 2;
    let mut dist: u64 = offset
        + values
            .iter()
            .enumerate()
            .map(|(i, &v)| v.abs_diff(pos(i)) as u64)
            .sum::<u64>();
    hist[dist as usize] += 1;
    let mut c = vec![0usize; k];
    let mut i = 1;
    while i < k {
        if c[i] < i {
            let j = if i % 2 == 0 { 0 } else { c[i] };
            let (a, b) = (values[i], values[j]);
            dist = dist - a.abs_diff(pos(i)) as u64 - b.abs_diff(pos(j)) as u64
                + b.abs_diff(pos(i)) as u64
                + a.abs_diff(pos(j)) as u64;
            values.swap(i, j);
            hist[dist as usize] += 1;
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_by_inspection() {
        assert_eq!(compute_ranks(&[2.5, 1.1, 7.0]).unwrap(), vec![2, 1, 3]);
        assert_eq!(
            compute_ranks(&[1.0, 2.0, 3.0, 4.0]).unwrap(),
            vec![1, 2, 3, 4]
        );
    }

    #[test]
    fn rank_errors() {
        assert_eq!(
            compute_ranks(&[1.0, 1.0, 2.0]),
            Err(Error::TiesPresent {
                first: 0,
                second: 1
            })
        );
        assert_eq!(
            compute_ranks(&[3.0, 1.0, 3.0]),
            Err(Error::TiesPresent {
                first: 0,
                second: 2
            })
        );
        assert_eq!(
            compute_ranks(&[1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        );
        assert_eq!(
            compute_ranks(&[1.0]),
            Err(Error::TooShort { min: 2, got: 1 })
        );
        assert!(matches!(
            compute_ranks(&[0.0, -0.0]),
            Err(Error::TiesPresent { .. })
        ));
    }

    #[test]
    fn ranks_match_indicator_definition() {
        let v = [0.3, -2.0, 9.5, 0.31, 4.0, -0.7];
        let ranks = compute_ranks(&v).unwrap();
        for (i, &r) in ranks.iter().enumerate() {
            let count = v.iter().filter(|&&w| w <= v[i]).count();
            assert_eq!(r, count);
        }
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(
            compute_midranks(&[1.0, 1.0, 2.0]).unwrap(),
            vec![1.5, 1.5, 3.0]
        );
        assert_eq!(
            compute_midranks(&[5.0, 2.0, 5.0, 5.0]).unwrap(),
            vec![3.0, 1.0, 3.0, 3.0]
        );
    }

    #[test]
    fn midrank_footrule_agrees_without_ties() {
        let s = PairedSample::new(vec![0.1, 0.5, 0.3, 0.9], vec![2.0, 1.0, 4.0, 3.0]).unwrap();
        let a = footrule_coefficient(&s).unwrap();
        let b = footrule_coefficient_midrank(&s).unwrap();
        assert_eq!(a.distance as f64, b.distance);
        assert!((a.phi - b.phi).abs() < 1e-15);
    }

    #[test]
    fn distance_examples() {
        let rp = |r: &[usize], s: &[usize]| RankPair::new(r.to_vec(), s.to_vec()).unwrap();
        assert_eq!(footrule_distance(&rp(&[1, 2, 3], &[1, 2, 3])), 0);
        assert_eq!(footrule_distance(&rp(&[1, 2, 3], &[3, 2, 1])), 4);
        assert_eq!(
            footrule_distance(&rp(&[1, 2, 3, 4, 5], &[2, 1, 3, 5, 4])),
            4
        );
    }

    #[test]
    fn rank_pair_validation() {
        assert!(RankPair::new(vec![1, 2, 2], vec![1, 2, 3]).is_err());
        assert!(RankPair::new(vec![0, 1, 2], vec![1, 2, 3]).is_err());
        assert!(RankPair::new(vec![1, 2], vec![1, 2, 3]).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let same = PairedSample::new(vec![1.0, 5.0, 2.0, 8.0], vec![0.1, 0.7, 0.3, 9.0]).unwrap();
        assert_eq!(footrule_coefficient(&same).unwrap().phi, 1.0);

        let rev = PairedSample::new(vec![1.0, 2.0, 3.0], vec![3.0, 2.0, 1.0]).unwrap();
        let res = footrule_coefficient(&rev).unwrap();
        assert_eq!(res.distance, 4);
        assert_eq!(res.phi, -0.5);

        let ranks = RankPair::new(vec![1, 2, 3, 4, 5], vec![2, 1, 3, 5, 4]).unwrap();
        assert_eq!(footrule_from_ranks(&ranks).phi, 0.5);
    }

    #[test]
    fn degenerate_n2() {
        let s = PairedSample::new(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(footrule_coefficient(&s).unwrap().phi, -1.0);
        assert_eq!(min_phi(2), -1.0);
    }

    #[test]
    fn sample_validation() {
        assert!(matches!(
            PairedSample::new(vec![1.0, 2.0], vec![1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            PairedSample::new(vec![1.0], vec![1.0]),
            Err(Error::TooShort { .. })
        ));
        assert_eq!(
            PairedSample::new(vec![1.0, 2.0], vec![1.0, f64::INFINITY]),
            Err(Error::NonFinite { index: 1 })
        );
    }

    #[test]
    fn enumeration_small_cases() {
        let d2 = enumerate_null_distribution(2).unwrap();
        assert_eq!(d2.counts(), &BTreeMap::from([(0, 1), (2, 1)]));
        let d3 = enumerate_null_distribution(3).unwrap();
        assert_eq!(d3.counts(), &BTreeMap::from([(0, 1), (2, 2), (4, 3)]));
        let d4 = enumerate_null_distribution(4).unwrap();
        assert_eq!(d4.total(), 24);
        assert_eq!(d4.mean_distance(), 5.0);
    }

    #[test]
    fn enumeration_bounds() {
        assert_eq!(
            enumerate_null_distribution(1),
            Err(Error::NTooSmall { n: 1, min: 2 })
        );
        assert_eq!(
            enumerate_null_distribution(11),
            Err(Error::NTooLarge { n: 11, max: 10 })
        );
    }

    #[test]
    fn two_sided_exact_p() {
        let d3 = enumerate_null_distribution(3).unwrap();
        // phi values: D=0 -> 1, D=2 -> 0.25, D=4 -> -0.5
        assert!((d3.two_sided_p(0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((d3.two_sided_p(4) - 4.0 / 6.0).abs() < 1e-15);
        assert_eq!(d3.two_sided_p(2), 1.0);
    }
}
