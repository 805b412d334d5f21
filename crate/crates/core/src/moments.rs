//! Closed-form null moments and the uniform-moment constants they rest on.
//!
//! Every constant is held as an exact rational and converted to `f64` with a
//! single division, so formula values can be compared against exact
//! enumeration at `1e-12`.

use crate::{Error, Result, Statistic};

/// An exact rational `num / den` with `den > 0`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rational {
    /// Panics if `den == 0`.
    pub const fn new_raw(num: i128, den: i128) -> Self {
        assert!(den != 0);
        if den < 0 {
            Self {
                num: -num,
                den: -den,
            }
        } else {
            Self { num, den }
        }
    }

    pub fn new(num: i128, den: i128) -> Self {
        let r = Self::new_raw(num, den);
        let g = gcd(r.num, r.den).max(1);
        Self {
            num: r.num / g,
            den: r.den / g,
        }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Moments of the uniform distribution used in the variance derivations.
/// `U1`, `V1`, `V2` are independent `U(0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformMoments {
    /// `E|U1 - V1|`
    pub e_abs_diff: Rational,
    /// `E[U1 (1 - U1)]`
    pub e_u_one_minus_u: Rational,
    /// `Var|U1 - V1|`
    pub var_abs_diff: Rational,
    /// `Var[U1 (1 - U1)]`
    pub var_u_one_minus_u: Rational,
    /// `Cov(|U1 - V1|, U1 (1 - U1))`
    pub cov_absdiff_u1mu: Rational,
    /// `Cov(|U1 - V1|, |U1 - V2|)`
    pub cov_absdiff_shared: Rational,
}

pub const UNIFORM_MOMENTS: UniformMoments = UniformMoments {
    e_abs_diff: Rational::new_raw(1, 3),
    e_u_one_minus_u: Rational::new_raw(1, 6),
    var_abs_diff: Rational::new_raw(1, 18),
    var_u_one_minus_u: Rational::new_raw(1, 180),
    cov_absdiff_u1mu: Rational::new_raw(-1, 180),
    cov_absdiff_shared: Rational::new_raw(1, 180),
};

/// Null mean and variance of one of the three statistics at sample size `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullMoments {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub kind: Statistic,
}

/// Exact null variance as a rational.
///
/// * footrule: `(2n^2 + 7) / (5 (n+1) (n-1)^2)`
/// * first representation: `2n^2 / (5 (n+1)^2 (n-1))`
/// * second representation: `2n / (5 (n+1)^2)`
pub fn null_variance_exact(n: usize, kind: Statistic) -> Result<Rational> {
    let min = kind.min_n();
    if n < min {
        return Err(Error::NTooSmall { n, min });
    }
    let big = || Error::NTooLarge { n, max: 1 << 31 };
    let k = i128::try_from(n).map_err(|_| big())?;
    let mul = |a: i128, b: i128| a.checked_mul(b).ok_or_else(big);
    let (num, den) = match kind {
        Statistic::PhiN => {
            let num = mul(mul(2, k)?, k)? + 7;
            let den = mul(mul(5, k + 1)?, mul(k - 1, k - 1)?)?;
            (num, den)
        }
        Statistic::PhiPrime => {
            let num = mul(mul(2, k)?, k)?;
            let den = mul(mul(5, mul(k + 1, k + 1)?)?, k - 1)?;
            (num, den)
        }
        Statistic::PhiDoublePrime => (2 * k, mul(5, mul(k + 1, k + 1)?)?),
    };
    Ok(Rational::new(num, den))
}

pub fn null_moments(n: usize, kind: Statistic) -> Result<NullMoments> {
    Ok(NullMoments {
        n,
        mean: 0.0,
        variance: null_variance_exact(n, kind)?.to_f64(),
        kind,
    })
}

/// `E(|U - V| | U = u) = 1/2 - u(1-u)`.
pub fn cond_exp_abs_diff(u: f64) -> f64 {
    0.5 - u * (1.0 - u)
}

/// Variance of the common normal limit of `sqrt(n)` times each statistic.
pub const LIMITING_VARIANCE: Rational = Rational::new_raw(2, 5);

pub fn limiting_variance() -> f64 {
    LIMITING_VARIANCE.to_f64()
}
