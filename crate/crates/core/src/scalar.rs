//! Coefficient field abstraction.
//!
//! Every algebraic layer is generic over an exact field `C: Scalar`. The
//! concrete field used by the verification suite is [`Rational`]
//! (arbitrary-precision `BigRational`); `Ratio<i64>` also satisfies the bound
//! and is handy in small tests.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, Zero};
use thiserror::Error;

/// An exact field usable as a coefficient type.
pub trait Scalar:
    Clone + Debug + Display + Eq + Ord + Hash + Send + Sync + Num + Signed + FromPrimitive + 'static
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits the scalar type")
    }

    fn from_frac(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }
}

impl<T> Scalar for T where
    T: Clone + Debug + Display + Eq + Ord + Hash + Send + Sync + Num + Signed + FromPrimitive + 'static
{
}

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{0}` (expected p or p/q)")]
pub struct ParseRationalError(pub String);

/// Parses `p`, `+p`, `-p`, `p/q` or `-p/q` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num = num.strip_prefix('+').unwrap_or(num);
    let num = BigInt::from_str(num).map_err(|_| err())?;
    let den = BigInt::from_str(den).map_err(|_| err())?;
    if den.is_zero() || den.is_negative() {
        return Err(err());
    }
    Ok(Ratio::new(num, den))
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_signed_fractions() {
        assert_eq!(parse_rational("1/3").unwrap(), Rational::from_frac(1, 3));
        assert_eq!(parse_rational("-2").unwrap(), Rational::from_int(-2));
        assert_eq!(parse_rational("+1").unwrap(), Rational::from_int(1));
        assert_eq!(parse_rational("-6/4").unwrap(), Rational::from_frac(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/-2").is_err());
    }

    #[test]
    fn display_round_trip() {
        let r = Rational::from_frac(-7, 3);
        assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        assert_eq!(format_rational(&Rational::from_int(4)), "4");
    }
}
