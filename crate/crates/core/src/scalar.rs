//! Coefficient types accepted by the quadratic models.
//!
//! Every model, weight set and energy in this crate is generic over a
//! [`Scalar`]. Floating-point (`f32`, `f64`) and exact rational
//! ([`Rational`]) coefficients are supported; the default weight regime is
//! integer-valued, so all three agree exactly on small instances.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Exact rational coefficient.
pub type Rational = Ratio<i64>;

pub trait Scalar:
    Num + Signed + Copy + PartialOrd + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion used by the annealer's inner loop.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("integer fits in scalar")
    }

    /// `false` for NaN or infinite values. Rationals are always finite.
    fn is_finite_value(self) -> bool;

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Scalar for f64 {
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Rational {
    fn is_finite_value(self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(<f64 as Scalar>::from_usize(7), 7.0);
        assert_eq!(<Rational as Scalar>::from_usize(3), Rational::from_integer(3));
        assert_eq!(Rational::new(1, 4).to_f64_lossy(), 0.25);
        assert!(!f64::NAN.is_finite_value());
        assert!(Rational::new(5, 3).is_finite_value());
        assert_eq!(<f32 as Scalar>::two(), 2.0);
    }
}
