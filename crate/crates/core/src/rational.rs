//! Exact rational numbers: literal parsing and canonical formatting.
//!
//! Lengths, offsets and radii are all `BigRational`. Literals are read by
//! their written digits, so `0.1` becomes exactly `1/10`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{literal}`: {reason}")]
pub struct ParseRationalError {
    pub literal: String,
    pub reason: &'static str,
}

fn invalid(literal: &str, reason: &'static str) -> ParseRationalError {
    ParseRationalError {
        literal: literal.to_string(),
        reason,
    }
}

/// Parses `7`, `-3/2`, `0.25`, `1e-9` or `2.5E3` into an exact rational.
pub fn parse_rational(literal: &str) -> Result<Rational, ParseRationalError> {
    let s = literal.trim();
    if s.is_empty() {
        return Err(invalid(literal, "empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim()).ok_or_else(|| invalid(literal, "bad numerator"))?;
        let den = parse_decimal(den.trim()).ok_or_else(|| invalid(literal, "bad denominator"))?;
        if den.is_zero() {
            return Err(invalid(literal, "zero denominator"));
        }
        return Ok(num / den);
    }
    parse_decimal(s).ok_or_else(|| invalid(literal, "not a decimal or fraction"))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = all_digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Canonical string form: `3/2`, `-1/4`, `5`.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Lossy conversion used only for human-facing approximations.
pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub(crate) fn half(value: &Rational) -> Rational {
    value / int(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integer_fraction_and_decimal() {
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("2.").unwrap(), int(2));
    }

    #[test]
    fn decimal_conversion_is_by_literal_digits() {
        assert_eq!(parse_rational("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse_rational("1e-9").unwrap(), ratio(1, 1_000_000_000));
        assert_eq!(parse_rational("2.5E3").unwrap(), int(2500));
        assert_eq!(parse_rational("1.5/0.5").unwrap(), int(3));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1/0", "1.2.3", "--1", "e5", "1/", "0x10"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn format_is_canonical() {
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&int(-5)), "-5");
        assert_eq!(format_rational(&ratio(0, 9)), "0");
    }
}
