//! Numeric abstraction used by every cost computation in the crate.
//!
//! All delay values, player costs and scalar potentials are generic over a
//! [`Scalar`]. The default instantiation is [`BigRational`], which keeps the
//! half-integers of affine delays and the lexicographic potential comparisons
//! exact. `Rational64` and `f64` are supported for callers that accept the
//! usual overflow or rounding caveats.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// A nonnegative-capable ordered field element.
pub trait Scalar:
    Num + Clone + PartialOrd + FromPrimitive + Debug + Send + Sync + 'static
{
    /// Exact `num / den` where the representation allows it. `den` must be positive.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Stable textual form used by the file formats (`"p/q"` for rationals).
    fn canonical(&self) -> String;

    /// Inverse of [`Scalar::canonical`]; also accepts plain integers.
    fn parse_canonical(s: &str) -> Option<Self>;

    /// Lossy conversion for display under `--approx`.
    fn approx(&self) -> f64;

    fn is_nonnegative(&self) -> bool {
        *self >= Self::zero()
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn canonical(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_canonical(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }

    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for Rational64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational64::new(num, den)
    }

    fn canonical(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_canonical(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }

    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn canonical(&self) -> String {
        format!("{self}")
    }

    fn parse_canonical(s: &str) -> Option<Self> {
        s.trim().parse().ok().filter(|v: &f64| v.is_finite())
    }

    fn approx(&self) -> f64 {
        *self
    }

    fn is_nonnegative(&self) -> bool {
        // NaN fails this as well
        *self >= 0.0
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }

    fn canonical(&self) -> String {
        format!("{self}")
    }

    fn parse_canonical(s: &str) -> Option<Self> {
        s.trim().parse().ok().filter(|v: &f32| v.is_finite())
    }

    fn approx(&self) -> f64 {
        f64::from(*self)
    }

    fn is_nonnegative(&self) -> bool {
        *self >= 0.0
    }
}

/// Converts an integer count into the scalar type.
pub(crate) fn count<S: Scalar>(n: usize) -> S {
    S::from_usize(n).expect("count representable in scalar type")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        assert_eq!(BigRational::from_ratio(6, 4).canonical(), "3/2");
        assert_eq!(BigRational::from_ratio(3, 1).canonical(), "3/1");
        assert_eq!(Rational64::from_ratio(0, 5).canonical(), "0/1");
        assert_eq!(f64::from_ratio(1, 2).canonical(), "0.5");
    }

    #[test]
    fn parsing() {
        assert_eq!(BigRational::parse_canonical("6/4"), Some(BigRational::from_ratio(3, 2)));
        assert_eq!(BigRational::parse_canonical("5"), Some(BigRational::from_ratio(5, 1)));
        assert_eq!(BigRational::parse_canonical("3/0"), None);
        assert_eq!(Rational64::parse_canonical("x"), None);
        assert_eq!(f32::parse_canonical("0.25"), Some(0.25));
    }

    #[test]
    fn nan_is_not_nonnegative() {
        assert!(!f64::NAN.is_nonnegative());
        assert!(0.0f64.is_nonnegative());
        assert!(!BigRational::from_ratio(-1, 3).is_nonnegative());
    }
}
