use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational. `num_rational::BigRational` already keeps
/// gcd-reduced form with a positive denominator, which is exactly the
/// canonical form we need everywhere.
pub type Rational = num_rational::BigRational;

pub fn rat_i(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses "p", "-p" or "p/q". Used by the tensor and expression parsers and
/// by the JSON coefficient format.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |m: &str| Error::Parse { pos: 0, msg: format!("{m}: {s:?}") };
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p.trim().parse().map_err(|_| bad("bad numerator"))?;
        let den: BigInt = q.trim().parse().map_err(|_| bad("bad denominator"))?;
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        Ok(Rational::new(num, den))
    } else {
        let num: BigInt = s.parse().map_err(|_| bad("bad integer"))?;
        Ok(Rational::from_integer(num))
    }
}

/// "p" when the denominator is 1, otherwise "p/q".
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn is_negative(r: &Rational) -> bool {
    r.numer().is_negative()
}
