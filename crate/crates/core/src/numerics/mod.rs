//! Err-extended exact rationals, small binary float formats, and the
//! conversions between them.

mod float;
mod real;

use thiserror::Error;

pub use float::{
    enumerate_format, enumerate_format_bounded, inj, proj, rounding_boundaries, Endpoint,
    FloatE, FloatFormat, FloatValue, FormatMode, Preimage, DEFAULT_ENUMERATION_BOUND,
};
pub use real::{format_decimal, format_fraction, real_arith, ArithOp, RealE};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericsError {
    #[error("invalid float format: {0}")]
    InvalidFormat(String),
    #[error("format has {size} values, more than the enumeration bound {bound}")]
    FormatTooLarge { size: u128, bound: usize },
    #[error("invalid rational literal `{0}`")]
    InvalidLiteral(String),
}

/// Parses `3/2`, `-1.25`, `7` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, NumericsError> {
    use num_bigint::BigInt;
    use num_traits::Zero;

    let bad = || NumericsError::InvalidLiteral(text.to_string());
    let t = text.trim();
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let value = if let Some((n, d)) = body.split_once('/') {
        let n: BigInt = parse_digits(n).ok_or_else(bad)?;
        let d: BigInt = parse_digits(d).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(bad());
        }
        Rational::new(n, d)
    } else if let Some((int, frac)) = body.split_once('.') {
        let i: BigInt = parse_digits(int).ok_or_else(bad)?;
        let f: BigInt = parse_digits(frac).ok_or_else(bad)?;
        let scale = BigInt::from(10).pow(frac.len() as u32);
        Rational::new(i * &scale + f, scale)
    } else {
        Rational::from_integer(parse_digits(body).ok_or_else(bad)?)
    };
    Ok(if negative { -value } else { value })
}

fn parse_digits(s: &str) -> Option<num_bigint::BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}
