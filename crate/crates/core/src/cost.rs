use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use crate::scalar::Scalar;

/// A nonnegative cost or `+∞`.
///
/// `Infinite` is strictly greater than every finite value and equal to
/// itself. Addition saturates.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtCost<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> ExtCost<S> {
    /// Wraps a finite value. Panics on negative (or NaN) input.
    pub fn finite(value: S) -> Self {
        assert!(value.is_nonnegative(), "costs are nonnegative: {value:?}");
        ExtCost::Finite(value)
    }

    pub fn try_finite(value: S) -> Option<Self> {
        value.is_nonnegative().then_some(ExtCost::Finite(value))
    }

    pub fn zero() -> Self {
        ExtCost::Finite(S::zero())
    }

    pub fn from_int(v: i64) -> Self {
        Self::finite(S::from_ratio(v, 1))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::finite(S::from_ratio(num, den))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtCost::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&S> {
        match self {
            ExtCost::Finite(v) => Some(v),
            ExtCost::Infinite => None,
        }
    }

    /// `self - other` when both sides are finite.
    pub fn checked_sub(&self, other: &Self) -> Option<S> {
        match (self, other) {
            (ExtCost::Finite(a), ExtCost::Finite(b)) => Some(a.clone() - b.clone()),
            _ => None,
        }
    }

    /// `"p/q"` for finite values, `"inf"` otherwise.
    pub fn canonical(&self) -> String {
        match self {
            ExtCost::Finite(v) => v.canonical(),
            ExtCost::Infinite => "inf".to_owned(),
        }
    }

    /// Inverse of [`ExtCost::canonical`]. Rejects negative values.
    pub fn parse_canonical(s: &str) -> Option<Self> {
        if s.trim() == "inf" {
            return Some(ExtCost::Infinite);
        }
        S::parse_canonical(s).and_then(Self::try_finite)
    }

    pub fn approx(&self) -> f64 {
        match self {
            ExtCost::Finite(v) => v.approx(),
            ExtCost::Infinite => f64::INFINITY,
        }
    }
}

impl<S: Scalar> Eq for ExtCost<S> {}

impl<S: Scalar> PartialOrd for ExtCost<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for ExtCost<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtCost::Infinite, ExtCost::Infinite) => Ordering::Equal,
            (ExtCost::Infinite, ExtCost::Finite(_)) => Ordering::Greater,
            (ExtCost::Finite(_), ExtCost::Infinite) => Ordering::Less,
            (ExtCost::Finite(a), ExtCost::Finite(b)) => a
                .partial_cmp(b)
                .expect("finite costs are totally ordered"),
        }
    }
}

impl<S: Scalar> Add for ExtCost<S> {
    type Output = ExtCost<S>;

    fn add(self, rhs: Self) -> Self::Output {
        match (self, rhs) {
            (ExtCost::Finite(a), ExtCost::Finite(b)) => ExtCost::Finite(a + b),
            _ => ExtCost::Infinite,
        }
    }
}

impl<'a, S: Scalar> Add<&'a ExtCost<S>> for ExtCost<S> {
    type Output = ExtCost<S>;

    fn add(self, rhs: &'a ExtCost<S>) -> Self::Output {
        match (self, rhs) {
            (ExtCost::Finite(a), ExtCost::Finite(b)) => ExtCost::Finite(a + b.clone()),
            _ => ExtCost::Infinite,
        }
    }
}

impl<S: Scalar> Sum for ExtCost<S> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExtCost::zero(), |acc, c| acc + c)
    }
}

impl<'a, S: Scalar> Sum<&'a ExtCost<S>> for ExtCost<S> {
    fn sum<I: Iterator<Item = &'a ExtCost<S>>>(iter: I) -> Self {
        iter.fold(ExtCost::zero(), |acc, c| acc + c)
    }
}

impl<S: Scalar> fmt::Display for ExtCost<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

#[cfg(test)]
mod tests {
    use crate::Cost;

    #[test]
    fn infinity_dominates() {
        let inf = Cost::Infinite;
        assert!(inf > Cost::from_int(1_000_000));
        assert_eq!(inf, Cost::Infinite);
        assert_eq!(Cost::from_int(3) + Cost::Infinite, Cost::Infinite);
    }

    #[test]
    fn exact_half_integers() {
        let half = Cost::from_ratio(1, 2);
        assert_eq!(half.clone() + half, Cost::from_int(1));
        assert_eq!(Cost::from_ratio(7, 2).canonical(), "7/2");
    }

    #[test]
    fn sums_saturate() {
        let total: Cost = vec![Cost::from_int(1), Cost::Infinite, Cost::from_int(2)]
            .into_iter()
            .sum();
        assert_eq!(total, Cost::Infinite);
        let empty: Cost = Vec::<Cost>::new().into_iter().sum();
        assert_eq!(empty, Cost::zero());
    }

    #[test]
    fn parse_round_trip() {
        for c in [Cost::from_ratio(7, 2), Cost::zero(), Cost::Infinite] {
            assert_eq!(Cost::parse_canonical(&c.canonical()), Some(c));
        }
        assert_eq!(Cost::parse_canonical("-1/2"), None);
        assert_eq!(Cost::parse_canonical("1/0"), None);
    }

    #[test]
    #[should_panic]
    fn negative_costs_rejected() {
        let _ = Cost::from_int(-1);
    }
}
