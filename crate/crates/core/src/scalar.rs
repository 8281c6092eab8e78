//! Scalar types usable as distance values.
//!
//! Everything in this crate is generic over [`Scalar`]. Floating point types
//! are the usual choice; [`Rational`](crate::Rational) gives exact arithmetic,
//! which makes axiom checks and topology comparisons free of rounding ties.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// A totally ordered (on finite values) signed number type.
pub trait Scalar:
    Copy + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Tolerance used for axiom checks on finite tables when the caller does
    /// not supply one.
    fn default_tolerance() -> Self;

    /// Tolerance used for limit and orbit analysis.
    fn iterative_tolerance() -> Self;

    /// `false` for NaN and infinities.
    fn is_finite_value(self) -> bool;

    /// Converts a sampled `f64` into this type. Exact types round onto a
    /// dyadic grid so that sums stay small.
    fn from_sample(x: f64) -> Self;

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `self * other`, or `None` where the type cannot represent it.
    fn checked_product(self, other: Self) -> Option<Self> {
        Some(self * other)
    }

    /// `self + other`, or `None` where the type cannot represent it.
    fn checked_total(self, other: Self) -> Option<Self> {
        Some(self + other)
    }
}

impl Scalar for f64 {
    fn default_tolerance() -> Self {
        1e-9
    }

    fn iterative_tolerance() -> Self {
        1e-6
    }

    fn is_finite_value(self) -> bool {
        self.is_finite()
    }

    fn from_sample(x: f64) -> Self {
        x
    }
}

impl Scalar for f32 {
    fn default_tolerance() -> Self {
        1e-5
    }

    fn iterative_tolerance() -> Self {
        1e-4
    }

    fn is_finite_value(self) -> bool {
        self.is_finite()
    }

    fn from_sample(x: f64) -> Self {
        x as f32
    }
}

/// Denominator of the grid exact types are sampled on.
pub const SAMPLE_GRID: i64 = 1 << 20;

impl Scalar for Ratio<i64> {
    fn default_tolerance() -> Self {
        Ratio::from_integer(0)
    }

    fn iterative_tolerance() -> Self {
        Ratio::from_integer(0)
    }

    fn is_finite_value(self) -> bool {
        true
    }

    fn from_sample(x: f64) -> Self {
        Ratio::new((x * SAMPLE_GRID as f64).round() as i64, SAMPLE_GRID)
    }

    fn checked_product(self, other: Self) -> Option<Self> {
        num_traits::CheckedMul::checked_mul(&self, &other)
    }

    fn checked_total(self, other: Self) -> Option<Self> {
        num_traits::CheckedAdd::checked_add(&self, &other)
    }
}

/// Integer power with a `usize` exponent.
pub fn powi<S: Scalar>(base: S, exp: usize) -> S {
    num_traits::pow(base, exp)
}
