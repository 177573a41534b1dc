//! Exact rational endpoints.
//!
//! Interval endpoint comparisons decide bubble merging, column breaks and
//! level arcs, so they must be exact; every coordinate in this crate is a
//! rational in lowest terms and floating point never enters endpoint logic.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

/// Exact rational number, kept in lowest terms with a positive denominator.
pub type Rational = Ratio<i64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal {0:?}")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Parses `42`, `-3`, `2.5`, `-0.125` or `p/q` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let invalid = || ParseRationalError::Invalid(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| invalid())?;
        let den: i64 = den.trim().parse().map_err(|_| invalid())?;
        if den == 0 {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(invalid());
        }
        let negative = int.trim_start().starts_with('-');
        let int: i64 = if int == "-" {
            0
        } else {
            int.parse().map_err(|_| invalid())?
        };
        let scale = 10i64
            .checked_pow(frac.len() as u32)
            .ok_or_else(invalid)?;
        let frac: i64 = frac.parse().map_err(|_| invalid())?;
        let signed_frac = if negative { -frac } else { frac };
        let num = int
            .checked_mul(scale)
            .and_then(|n| n.checked_add(signed_frac))
            .ok_or_else(invalid)?;
        return Ok(Rational::new(num, scale));
    }
    let num: i64 = s.parse().map_err(|_| invalid())?;
    Ok(Rational::from_integer(num))
}

/// Formats a rational as `p/q`, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Wrapper so rationals can be displayed inline in error messages.
pub struct DisplayRational<'a>(pub &'a Rational);

impl fmt::Display for DisplayRational<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(self.0))
    }
}
