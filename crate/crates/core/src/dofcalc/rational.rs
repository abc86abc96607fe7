use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact reduced fraction with a positive denominator.
///
/// Serialized as the string `"p/q"` (or `"p"` when integral).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i64>);

impl Rational {
    /// Panics on a zero denominator.
    pub fn new(numer: i64, denom: i64) -> Self {
        Rational(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// `max(self, 0)`
    pub fn pos(self) -> Self {
        self.max(Self::zero())
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Fixed six-digit decimal rendering used in tables.
    pub fn decimal(&self) -> String {
        format!("{:.6}", self.to_f64())
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        Self::from_integer(n as i64)
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $f(self, rhs: Rational) -> Rational {
                Rational(self.0.$f(rhs.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |x: &str| x.trim().parse::<i64>().map_err(|e| format!("{s:?}: {e}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let q = parse(q)?;
                if q == 0 {
                    return Err(format!("{s:?}: zero denominator"));
                }
                Ok(Rational::new(parse(p)?, q))
            }
            None => Ok(Rational::from_integer(parse(s)?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_and_signed() {
        let r = Rational::new(105, -12);
        assert_eq!((r.numer(), r.denom()), (-35, 4));
        assert_eq!(r.to_string(), "-35/4");
        assert_eq!(Rational::new(12, 4).to_string(), "3");
    }

    #[test]
    fn parse_and_serde() {
        let r: Rational = "90/11".parse().unwrap();
        assert_eq!(r, Rational::new(90, 11));
        assert!("1/0".parse::<Rational>().is_err());
        let j = serde_json::to_string(&r).unwrap();
        assert_eq!(j, "\"90/11\"");
        assert_eq!(serde_json::from_str::<Rational>(&j).unwrap(), r);
        assert_eq!(r.decimal(), "8.181818");
    }

    #[test]
    fn ordering_and_pos() {
        assert!(Rational::new(20, 3) < Rational::new(15, 2));
        assert_eq!(Rational::new(-1, 2).pos(), Rational::zero());
    }
}
