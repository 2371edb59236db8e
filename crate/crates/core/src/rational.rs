//! Nonnegative reduced fractions with `1/0` standing for infinity.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A value of `[0, inf]` stored as a reduced pair `num/den`.
///
/// Infinity is the ordinary value `1/0`, so the reciprocal is total and
/// order reversing. Both components are never zero at the same time.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtendedRational {
    num: u64,
    den: u64,
}

impl ExtendedRational {
    pub const ZERO: Self = Self { num: 0, den: 1 };
    pub const ONE: Self = Self { num: 1, den: 1 };
    pub const INFINITY: Self = Self { num: 1, den: 0 };

    /// Builds the reduced representative of `p/q`.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p < 0 || q < 0 {
            return Err(Error::Negative(p, q));
        }
        Self::from_parts(p as u64, q as u64)
    }

    pub fn from_parts(p: u64, q: u64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::ZeroOverZero);
        }
        let g = gcd(p, q);
        Ok(Self { num: p / g, den: q / g })
    }

    pub fn integer(p: u64) -> Self {
        Self { num: p, den: 1 }
    }

    #[inline]
    pub fn num(&self) -> u64 {
        self.num
    }

    #[inline]
    pub fn den(&self) -> u64 {
        self.den
    }

    #[inline]
    pub fn is_infinite(&self) -> bool {
        self.den == 0
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// True for values of `(0, inf)`.
    #[inline]
    pub fn is_positive_finite(&self) -> bool {
        self.num != 0 && self.den != 0
    }

    #[inline]
    pub fn recip(self) -> Self {
        Self {
            num: self.den,
            den: self.num,
        }
    }

    /// `(num_a + num_b) / (den_a + den_b)`, which lies strictly inside `(a, b)`.
    pub fn mediant(self, other: Self) -> Result<Self> {
        if self >= other {
            return Err(Error::NotIncreasing(self.to_string(), other.to_string()));
        }
        let p = self.num.checked_add(other.num).ok_or(Error::Overflow("mediant"))?;
        let q = self.den.checked_add(other.den).ok_or(Error::Overflow("mediant"))?;
        Self::from_parts(p, q)
    }

    /// Compares `self` against `p/q` without reducing the latter. `q` may be 0.
    #[inline]
    pub fn cmp_ratio(&self, p: u64, q: u64) -> Ordering {
        cross_cmp(self.num, self.den, p, q)
    }
}

#[inline]
fn cross_cmp(a: u64, b: u64, c: u64, d: u64) -> Ordering {
    match (b == 0, d == 0) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => (a as u128 * d as u128).cmp(&(c as u128 * b as u128)),
    }
}

impl Ord for ExtendedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        cross_cmp(self.num, self.den, other.num, other.den)
    }
}

impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;

    /// Accepts only `p/q` with decimal digits on both sides.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(s.to_string());
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|c| c.is_ascii_digit());
        if !digits(p) || !digits(q) {
            return Err(bad());
        }
        let p: u64 = p.parse().map_err(|_| bad())?;
        let q: u64 = q.parse().map_err(|_| bad())?;
        Self::from_parts(p, q)
    }
}

impl Serialize for ExtendedRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtendedRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
