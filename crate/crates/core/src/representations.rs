//! Asymptotic representations of the footrule coefficient under
//! independence.
//!
//! Both are functions of i.i.d. uniform pairs `(U_i, V_i)`:
//!
//! ```text
//! phi'  = 3n^2/(n^2-1) * ( (1/n^2) sum_i sum_j |U_i - V_j| - (1/n) sum_i |U_i - V_i| )
//! phi'' = 3/(n+1) * sum_i ( 2/3 - |U_i - V_i| - U_i(1-U_i) - V_i(1-V_i) )
//! ```
//!
//! `phi'` replaces the empirical CDFs in the rank form of the coefficient by
//! their population counterparts; `phi''` is its Hájek projection, a sum of
//! independent terms, and differs from `phi'` by `O_p(1/n)`.

use crate::sum::pairwise_sum_by;
use crate::{Error, Result};

/// Paired values `(u_i, v_i)` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformPairs {
    u: Vec<f64>,
    v: Vec<f64>,
}

impl UniformPairs {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::LengthMismatch {
                left: u.len(),
                right: v.len(),
            });
        }
        if u.is_empty() {
            return Err(Error::TooShort { min: 1, got: 0 });
        }
        for (index, &value) in u.iter().chain(&v).enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfUnitInterval {
                    index: index % u.len(),
                    value,
                });
            }
        }
        Ok(Self { u, v })
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepresentationKind {
    PhiPrime,
    PhiDoublePrime,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepresentationValue {
    pub n: usize,
    pub value: f64,
    pub kind: RepresentationKind,
}

/// First representation `phi'`. Requires `n >= 2`.
pub fn phi_prime(pairs: &UniformPairs) -> Result<RepresentationValue> {
    let n = pairs.len();
    if n < 2 {
        return Err(Error::NTooSmall { n, min: 2 });
    }
    Ok(RepresentationValue {
        n,
        value: phi_prime_raw(&pairs.u, &pairs.v),
        kind: RepresentationKind::PhiPrime,
    })
}

/// `phi'` on raw slices of equal length `n >= 2`.
pub(crate) fn phi_prime_raw(u: &[f64], v: &[f64]) -> f64 {
    let n = u.len();
    let cross = cross_abs_sum(u, v);
    let diag = pairwise_sum_by(n, |i| (u[i] - v[i]).abs());
    let nf = n as f64;
    // 3n^2/(n^2-1) * (cross/n^2 - diag/n) == 3/(n^2-1) * (cross - n diag)
    3.0 * (cross - nf * diag) / (nf * nf - 1.0)
}

/// `sum_i sum_j |u_i - v_j|` in `O(n log n)`.
///
/// With `v` sorted and `P` its prefix sums, the inner sum for a given `u_i`
/// with `k` entries of `v` at or below it is
/// `u_i k - P_k + (P_n - P_k) - u_i (n - k)`.
pub(crate) fn cross_abs_sum(u: &[f64], v: &[f64]) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut prefix = Vec::with_capacity(sorted.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &x in &sorted {
        acc += x;
        prefix.push(acc);
    }
    let total = acc;
    let m = sorted.len() as f64;
    pairwise_sum_by(u.len(), |i| {
        let ui = u[i];
        let k = sorted.partition_point(|&x| x <= ui);
        let below = prefix[k];
        let kf = k as f64;
        (ui * kf - below) + ((total - below) - ui * (m - kf))
    })
}

/// Second (Hájek) representation `phi''`. Defined for `n >= 1`.
pub fn phi_double_prime(pairs: &UniformPairs) -> RepresentationValue {
    RepresentationValue {
        n: pairs.len(),
        value: phi_double_prime_raw(&pairs.u, &pairs.v),
        kind: RepresentationKind::PhiDoublePrime,
    }
}

pub(crate) fn phi_double_prime_raw(u: &[f64], v: &[f64]) -> f64 {
    let n = u.len();
    let s = pairwise_sum_by(n, |i| {
        let (a, b) = (u[i], v[i]);
        2.0 / 3.0 - (a - b).abs() - a * (1.0 - a) - b * (1.0 - b)
    });
    3.0 / (n as f64 + 1.0) * s
}

/// Symmetric U-statistic kernel `h((u1, v1), (u2, v2)) = |u1 - v2| + |u2 - v1|`.
///
/// Its pairwise average over `i < j` is the off-diagonal part of the double
/// sum in `phi'`.
pub fn kernel_h(p1: (f64, f64), p2: (f64, f64)) -> f64 {
    (p1.0 - p2.1).abs() + (p2.0 - p1.1).abs()
}

/// Centered first projection of [`kernel_h`]: `1/3 - u(1-u) - v(1-v)`.
pub fn hajek_h1(u: f64, v: f64) -> f64 {
    1.0 / 3.0 - u * (1.0 - u) - v * (1.0 - v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(u: &[f64], v: &[f64]) -> UniformPairs {
        UniformPairs::new(u.to_vec(), v.to_vec()).unwrap()
    }

    #[test]
    fn phi_prime_examples() {
        for c in [0.0, 0.3, 0.77, 1.0] {
            let p = pairs(&[c; 5], &[c; 5]);
            assert_eq!(phi_prime(&p).unwrap().value, 0.0);
        }
        assert_eq!(
            phi_prime(&pairs(&[0.0, 1.0], &[0.0, 1.0])).unwrap().value,
            2.0
        );
        assert_eq!(
            phi_prime(&pairs(&[0.0, 1.0], &[1.0, 0.0])).unwrap().value,
            -2.0
        );
        assert_eq!(
            phi_prime(&pairs(&[0.5], &[0.5])),
            Err(Error::NTooSmall { n: 1, min: 2 })
        );
    }

    #[test]
    fn phi_double_prime_examples() {
        for n in 1..6usize {
            let nf = n as f64;
            let zeros = vec![0.0; n];
            let ones = vec![1.0; n];
            let a = phi_double_prime(&pairs(&zeros, &zeros)).value;
            assert!((a - 2.0 * nf / (nf + 1.0)).abs() < 1e-15);
            let b = phi_double_prime(&pairs(&zeros, &ones)).value;
            assert!((b + nf / (nf + 1.0)).abs() < 1e-15);
        }
        let single = phi_double_prime(&pairs(&[0.5], &[0.5])).value;
        assert!((single - 0.25).abs() < 1e-15);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_h((0.0, 0.0), (0.0, 0.0)), 0.0);
        assert_eq!(kernel_h((0.0, 0.0), (1.0, 1.0)), 2.0);
        assert_eq!(kernel_h((0.0, 1.0), (1.0, 0.0)), 0.0);
        assert_eq!(hajek_h1(0.0, 0.0), 1.0 / 3.0);
        assert!((hajek_h1(0.5, 0.5) + 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(UniformPairs::new(vec![0.1], vec![0.1, 0.2]).is_err());
        assert!(UniformPairs::new(vec![], vec![]).is_err());
        assert!(matches!(
            UniformPairs::new(vec![0.1, 1.5], vec![0.1, 0.2]),
            Err(Error::OutOfUnitInterval { index: 1, .. })
        ));
        assert!(UniformPairs::new(vec![0.1, f64::NAN], vec![0.1, 0.2]).is_err());
    }
}
