//! Exact rational arithmetic for gradings and surgery coefficients.
//!
//! Every grading in this crate lives in (1/4n)ℤ for some small n, and every
//! comparison must be exact, so all values are carried as reduced fractions.
//! No floating point anywhere.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

/// A rational number in lowest terms with positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(Ratio<i64>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("zero denominator in rational literal `{0}`")]
    ZeroDenominator(String),
    #[error("malformed rational literal `{0}` (expected `p` or `p/q`)")]
    Malformed(String),
    #[error("rational literal `{0}` out of the supported range (|p|, |q| <= 10^9)")]
    OutOfRange(String),
}

/// Bound on parsed numerators and denominators, keeping all downstream exact
/// arithmetic safely inside i64.
pub const PARSE_LIMIT: i64 = 1_000_000_000;

impl Rat {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "Rat with zero denominator");
        Rat(Ratio::new(numer, denom))
    }

    pub const fn int(n: i64) -> Self {
        Rat(Ratio::new_raw(n, 1))
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

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn floor_int(&self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn ceil_int(&self) -> i64 {
        self.0.ceil().to_integer()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    /// Multiplicative inverse. Panics on zero; callers guard.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "recip of zero");
        Rat(self.0.recip())
    }

    /// Fractional part in [0, 1).
    pub fn fract(&self) -> Self {
        *self - Rat::int(self.floor_int())
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::int(n)
    }
}

macro_rules! binop {
    ($Op:ident, $f:ident) => {
        impl $Op for Rat {
            type Output = Rat;
            fn $f(self, rhs: Rat) -> Rat {
                Rat(self.0.$f(rhs.0))
            }
        }
        impl $Op<i64> for Rat {
            type Output = Rat;
            fn $f(self, rhs: i64) -> Rat {
                Rat(self.0.$f(Ratio::from_integer(rhs)))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Rat {
    fn sub_assign(&mut self, rhs: Rat) {
        self.0 -= rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rat {
    type Err = RatParseError;

    /// Accepts `p` or `p/q` with optional leading sign. Decimals are
    /// rejected; components are bounded by [`PARSE_LIMIT`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(RatParseError::Empty);
        }
        let malformed = || RatParseError::Malformed(s.to_string());
        let bounded = |v: i64| -> Result<i64, RatParseError> {
            // checked_abs: i64::MIN must not panic here
            if v.checked_abs().is_none_or(|a| a > PARSE_LIMIT) {
                Err(RatParseError::OutOfRange(s.to_string()))
            } else {
                Ok(v)
            }
        };
        match s.split_once('/') {
            None => {
                let n: i64 = s.parse().map_err(|_| malformed())?;
                Ok(Rat::int(bounded(n)?))
            }
            Some((p, q)) => {
                let n: i64 = bounded(p.parse().map_err(|_| malformed())?)?;
                let d: i64 = bounded(q.parse().map_err(|_| malformed())?)?;
                if d == 0 {
                    return Err(RatParseError::ZeroDenominator(s.to_string()));
                }
                Ok(Rat::new(n, d))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
