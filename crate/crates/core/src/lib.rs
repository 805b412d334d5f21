//! Spearman's footrule rank correlation coefficient.
//!
//! The crate covers four things:
//!
//! * [`rank`]: ranking, the footrule distance and coefficient, and the exact
//!   permutation null distribution for small `n`.
//! * [`representations`]: the two asymptotic representations of the
//!   coefficient built from independent uniforms (the empirical-CDF
//!   replacement form and its Hájek projection), plus the kernel functions
//!   they are derived from.
//! * [`moments`]: closed-form null moments and the uniform-moment constants
//!   behind them, held as exact rationals.
//! * [`stats`] and [`mc`]: the inference toolbox (normal CDF, KS tests, KDE,
//!   ECDF, summaries) and a seeded, thread-count-independent Monte Carlo
//!   engine that drives the simulation studies.
//!
//! The [`cli`] module backs the `footrule` binary.
//!
//! ```
//! use footrule::rank::{footrule_coefficient, PairedSample};
//!
//! let sample = PairedSample::new(vec![1.0, 2.0, 3.0], vec![30.0, 20.0, 10.0]).unwrap();
//! let result = footrule_coefficient(&sample).unwrap();
//! assert_eq!(result.distance, 4);
//! assert_eq!(result.phi, -0.5);
//! ```

pub mod cli;
mod error;
pub mod mc;
pub mod moments;
pub mod rank;
pub mod representations;
pub mod stats;
mod sum;

pub use error::{Error, Result};

/// The three statistics studied side by side: the footrule coefficient and
/// its two asymptotic representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    /// The rank-based footrule coefficient.
    PhiN,
    /// First representation: empirical CDFs replaced by uniforms.
    PhiPrime,
    /// Second representation: Hájek projection of the first.
    PhiDoublePrime,
}

impl Statistic {
    pub const ALL: [Statistic; 3] = [
        Statistic::PhiN,
        Statistic::PhiPrime,
        Statistic::PhiDoublePrime,
    ];

    /// Label used in CSV output.
    pub fn label(self) -> &'static str {
        match self {
            Statistic::PhiN => "phi",
            Statistic::PhiPrime => "phiprime",
            Statistic::PhiDoublePrime => "phidprime",
        }
    }

    /// Smallest sample size at which the statistic is defined.
    pub fn min_n(self) -> usize {
        match self {
            Statistic::PhiN | Statistic::PhiPrime => 2,
            Statistic::PhiDoublePrime => 1,
        }
    }

    pub(crate) fn tag(self) -> u64 {
        match self {
            Statistic::PhiN => 1,
            Statistic::PhiPrime => 2,
            Statistic::PhiDoublePrime => 3,
        }
    }
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(Statistic::PhiN),
            "phiprime" => Ok(Statistic::PhiPrime),
            "phidprime" => Ok(Statistic::PhiDoublePrime),
            other => Err(Error::InvalidConfig(format!("unknown statistic `{other}`"))),
        }
    }
}
