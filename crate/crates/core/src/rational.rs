//! Exact rational scalars.
//!
//! Every quantity in the crate (characteristic values, payoffs, excesses,
//! balancing weights, LP data) is an arbitrary-precision rational. The
//! canonical text form is `p` for integers and `p/q` otherwise, with
//! `q > 0` and `gcd(|p|, q) = 1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational {text:?}: {reason}")]
pub struct ParseRationalError {
    pub text: String,
    pub reason: &'static str,
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses the canonical form strictly: `"2/4"`, `"3/1"`, `"1/-2"` and
/// `"+1"` are all rejected.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        text: text.to_string(),
        reason,
    };
    let (num_txt, den_txt) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let numer = parse_integer(num_txt).ok_or_else(|| err("numerator is not an integer"))?;
    let Some(den_txt) = den_txt else {
        return Ok(Rational::from_integer(numer));
    };
    if den_txt.starts_with('-') {
        return Err(err("denominator must be positive"));
    }
    let denom = parse_integer(den_txt).ok_or_else(|| err("denominator is not an integer"))?;
    if !denom.is_positive() {
        return Err(err("denominator must be positive"));
    }
    if denom.is_one() {
        return Err(err("integer written with denominator 1"));
    }
    if !numer.gcd(&denom).is_one() {
        return Err(err("not in lowest terms"));
    }
    Ok(Rational::new_raw(numer, denom))
}

fn parse_integer(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix('-').unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    if text.starts_with('-') && digits == "0" {
        return None;
    }
    text.parse().ok()
}

/// Canonical text: `p` or `p/q`.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// Comma-separated rationals, e.g. `9/2,9/2,3`. Surrounding whitespace
/// around each entry is ignored.
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>, ParseRationalError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|part| parse_rational(part.trim())).collect()
}

pub fn format_rational_list(values: &[Rational]) -> String {
    values
        .iter()
        .map(format_rational)
        .collect::<Vec<_>>()
        .join(",")
}

pub(crate) fn is_positive(value: &Rational) -> bool {
    value.is_positive()
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}
