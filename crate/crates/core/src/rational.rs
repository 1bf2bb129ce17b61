//! Exact rational arithmetic for coding rates.
//!
//! Diversity bounds involve floor expressions such as `floor((1 - Rc) * M)`
//! whose value flips at exact rational boundaries, so coding rates are kept
//! as reduced integer pairs and never converted to floating point inside the
//! bound computations.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RationalError {
    #[error("denominator must be non-zero")]
    ZeroDenominator,
    #[error("cannot parse '{0}' as a rational (expected 'p/q' or an integer)")]
    Parse(String),
}

/// A reduced rational number with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self, RationalError> {
        if den == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Ok(Rational {
            num: sign * num / g,
            den: sign * den / g,
        })
    }

    pub const fn integer(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    /// True when the value lies in the half-open interval (0, 1].
    pub fn is_valid_rate(&self) -> bool {
        self.num > 0 && self.num <= self.den
    }

    /// `floor(self * m)` computed exactly.
    pub fn floor_mul(&self, m: u64) -> i64 {
        let p = self.num as i128 * m as i128;
        (p.div_euclid(self.den as i128)) as i64
    }

    /// `ceil(self * m)` computed exactly.
    pub fn ceil_mul(&self, m: u64) -> i64 {
        let p = self.num as i128 * m as i128;
        let d = self.den as i128;
        (p.div_euclid(d) + if p.rem_euclid(d) != 0 { 1 } else { 0 }) as i64
    }

    /// `1 - self`.
    pub fn complement(&self) -> Rational {
        Rational {
            num: self.den - self.num,
            den: self.den,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact comparison against the fraction `p/q` (q > 0).
    pub fn cmp_frac(&self, p: i64, q: i64) -> std::cmp::Ordering {
        debug_assert!(q > 0);
        (self.num as i128 * q as i128).cmp(&(p as i128 * self.den as i128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.cmp_frac(other.num, other.den)
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

impl FromStr for Rational {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| RationalError::Parse(s.into()))?;
            let q: i64 = q.trim().parse().map_err(|_| RationalError::Parse(s.into()))?;
            Rational::new(p, q)
        } else {
            let n: i64 = s.parse().map_err(|_| RationalError::Parse(s.into()))?;
            Ok(Rational::integer(n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_normalizes_sign() {
        let r = Rational::new(4, -6).unwrap();
        assert_eq!((r.num(), r.den()), (-2, 3));
        assert_eq!(Rational::new(2, 4).unwrap(), Rational::new(1, 2).unwrap());
    }

    #[test]
    fn floor_and_ceil_products() {
        let half = Rational::new(1, 2).unwrap();
        assert_eq!(half.floor_mul(5), 2);
        assert_eq!(half.ceil_mul(5), 3);
        assert_eq!(half.floor_mul(4), 2);
        assert_eq!(half.ceil_mul(4), 2);
        let third = Rational::new(2, 3).unwrap();
        assert_eq!(third.complement(), Rational::new(1, 3).unwrap());
        assert_eq!(third.complement().floor_mul(6), 2);
    }

    #[test]
    fn parse_forms() {
        assert_eq!("2/3".parse::<Rational>().unwrap(), Rational::new(2, 3).unwrap());
        assert_eq!("1".parse::<Rational>().unwrap(), Rational::ONE);
        assert!(" 3 / 4 ".parse::<Rational>().unwrap().is_valid_rate());
        assert!("x".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn ordering_is_exact() {
        let a = Rational::new(1, 3).unwrap();
        let b = Rational::new(333_333_333, 1_000_000_000).unwrap();
        assert!(b < a);
    }
}
