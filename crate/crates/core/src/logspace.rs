//! Log-domain nonnegative scalars.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::special::{log_sum_exp, Real};

/// A nonnegative quantity stored as its natural log. Exact zero is `-inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue<T>(T);

impl<T: Real> LogValue<T> {
    /// The exact zero element.
    pub fn zero() -> Self {
        Self(T::neg_infinity())
    }

    pub fn one() -> Self {
        Self(T::zero())
    }

    /// Wrap a log value. NaN is rejected by panicking since it has no meaning
    /// as the log of a nonnegative number.
    pub fn from_ln(ln: T) -> Self {
        assert!(!ln.is_nan(), "LogValue from NaN");
        Self(ln)
    }

    /// From a linear-scale nonnegative value.
    pub fn from_linear(x: T) -> Self {
        assert!(x >= T::zero(), "LogValue from negative value");
        Self(x.ln())
    }

    #[inline]
    pub fn ln(self) -> T {
        self.0
    }

    /// Linear-scale value; underflows to 0.
    #[inline]
    pub fn to_linear(self) -> T {
        self.0.exp()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == T::neg_infinity()
    }

    /// log(a − b) for a ≥ b; `None` if the difference would be negative.
    pub fn checked_sub(self, other: Self) -> Option<Self> {
        if other.0 > self.0 {
            return None;
        }
        if other.is_zero() {
            return Some(self);
        }
        if other.0 == self.0 {
            return Some(Self::zero());
        }
        Some(Self(self.0 + (-(other.0 - self.0).exp()).ln_1p()))
    }

    /// log(1 − a) for a ≤ 1.
    pub fn complement(self) -> Option<Self> {
        Self::one().checked_sub(self)
    }

    pub fn sum<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        Self(log_sum_exp(iter.into_iter().map(|v| v.0)))
    }
}

impl<T: Real> Add for LogValue<T> {
    type Output = Self;
    /// log(a + b).
    fn add(self, other: Self) -> Self {
        Self(log_sum_exp([self.0, other.0]))
    }
}

impl<T: Real> Mul for LogValue<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        Self(self.0 + rhs.0)
    }
}

impl<T: Real> Div for LogValue<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "division by exact zero");
        if self.is_zero() {
            return Self::zero();
        }
        Self(self.0 - rhs.0)
    }
}

impl<T: Real> PartialOrd for LogValue<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

// Serialized as the log value; `null` for exact zero since JSON has no -inf.
impl<T: Real + Serialize> Serialize for LogValue<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_zero() {
            s.serialize_none()
        } else {
            s.serialize_some(&self.0)
        }
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for LogValue<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Option<T> = Option::deserialize(d)?;
        Ok(v.map_or_else(Self::zero, Self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_one() {
        let z = LogValue::<f64>::zero();
        assert!(z.is_zero());
        assert_eq!(z.to_linear(), 0.0);
        assert_eq!(LogValue::<f64>::one().to_linear(), 1.0);
        assert!((z * LogValue::from_ln(5.0)).is_zero());
        assert_eq!(z + LogValue::one(), LogValue::one());
    }

    #[test]
    fn arithmetic() {
        let a = LogValue::from_linear(0.3f64);
        let b = LogValue::from_linear(0.2f64);
        assert!(((a + b).to_linear() - 0.5).abs() < 1e-15);
        assert!((a.checked_sub(b).unwrap().to_linear() - 0.1).abs() < 1e-15);
        assert!(b.checked_sub(a).is_none());
        assert!((a.complement().unwrap().to_linear() - 0.7).abs() < 1e-15);
        assert!(((a * b).to_linear() - 0.06).abs() < 1e-15);
        assert!(((a / b).to_linear() - 1.5).abs() < 1e-14);
        assert!(a > b);
    }

    #[test]
    fn huge_dynamic_range() {
        let big = LogValue::from_ln(1000.0f64);
        let tiny = LogValue::from_ln(-1000.0f64);
        assert_eq!((big + tiny).ln(), 1000.0);
        assert!((big * tiny).ln().abs() < 1e-12);
    }

    #[test]
    fn serde_zero_is_null() {
        let z = LogValue::<f64>::zero();
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(s, "null");
        let back: LogValue<f64> = serde_json::from_str(&s).unwrap();
        assert!(back.is_zero());
        let v: LogValue<f64> = serde_json::from_str("-2.5").unwrap();
        assert_eq!(v.ln(), -2.5);
    }
}
