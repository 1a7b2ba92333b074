use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Reduced fraction num/den in [0, 1].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "(u64, u64)", into = "(u64, u64)")]
pub struct Rational {
    num: u64,
    den: u64,
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rational {
    /// Rejects unreduced fractions instead of reducing them.
    pub fn new(num: u64, den: u64) -> Result<Self, Error> {
        if den == 0 || num > den || gcd(num, den) != 1 {
            return Err(Error::BadRational { num, den });
        }
        Ok(Rational { num, den })
    }

    /// Reduces first; still rejects den = 0 and values above 1.
    pub fn reduced(num: u64, den: u64) -> Result<Self, Error> {
        if den == 0 {
            return Err(Error::BadRational { num, den });
        }
        let g = gcd(num, den).max(1);
        Rational::new(num / g, den / g)
    }

    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl TryFrom<(u64, u64)> for Rational {
    type Error = Error;
    fn try_from((n, d): (u64, u64)) -> Result<Self, Error> {
        Rational::new(n, d)
    }
}

impl From<Rational> for (u64, u64) {
    fn from(q: Rational) -> Self {
        (q.num, q.den)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}
