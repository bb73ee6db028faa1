use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::Rational;

/// An exact rational extended with the absorbing error value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RealE {
    Err,
    Num(Rational),
}

/// Arithmetic operators shared by both concrete semantics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

impl ArithOp {
    pub const ALL: [ArithOp; 5] = [
        ArithOp::Add,
        ArithOp::Sub,
        ArithOp::Mul,
        ArithOp::Div,
        ArithOp::Neg,
    ];

    pub fn is_unary(self) -> bool {
        matches!(self, ArithOp::Neg)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub | ArithOp::Neg => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

impl RealE {
    pub fn zero() -> Self {
        RealE::Num(Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        RealE::Num(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        if d == 0 {
            return RealE::Err;
        }
        RealE::Num(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_err(&self) -> bool {
        matches!(self, RealE::Err)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            RealE::Err => None,
            RealE::Num(q) => Some(q),
        }
    }

    pub fn neg(&self) -> RealE {
        match self {
            RealE::Err => RealE::Err,
            RealE::Num(q) => RealE::Num(-q),
        }
    }

    pub fn add(&self, rhs: &RealE) -> RealE {
        self.binary(rhs, |a, b| Some(a + b))
    }

    pub fn sub(&self, rhs: &RealE) -> RealE {
        self.binary(rhs, |a, b| Some(a - b))
    }

    pub fn mul(&self, rhs: &RealE) -> RealE {
        self.binary(rhs, |a, b| Some(a * b))
    }

    pub fn div(&self, rhs: &RealE) -> RealE {
        self.binary(rhs, |a, b| if b.is_zero() { None } else { Some(a / b) })
    }

    fn binary(&self, rhs: &RealE, f: impl FnOnce(&Rational, &Rational) -> Option<Rational>) -> RealE {
        match (self, rhs) {
            (RealE::Num(a), RealE::Num(b)) => f(a, b).map_or(RealE::Err, RealE::Num),
            _ => RealE::Err,
        }
    }
}

impl From<Rational> for RealE {
    fn from(q: Rational) -> Self {
        RealE::Num(q)
    }
}

impl fmt::Display for RealE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealE::Err => f.write_str("err"),
            RealE::Num(q) => write!(f, "{}", format_fraction(q)),
        }
    }
}

/// Applies an operator under the err-absorbing convention. `rhs` must be
/// present exactly when the operator is binary; a missing or spurious
/// operand yields `Err`.
pub fn real_arith(op: ArithOp, lhs: &RealE, rhs: Option<&RealE>) -> RealE {
    match (op, rhs) {
        (ArithOp::Neg, None) => lhs.neg(),
        (ArithOp::Add, Some(r)) => lhs.add(r),
        (ArithOp::Sub, Some(r)) => lhs.sub(r),
        (ArithOp::Mul, Some(r)) => lhs.mul(r),
        (ArithOp::Div, Some(r)) => lhs.div(r),
        _ => RealE::Err,
    }
}

/// `n` or `n/d` in lowest terms.
pub fn format_fraction(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Terminating decimal expansion when one exists, the fraction otherwise.
pub fn format_decimal(q: &Rational) -> String {
    let mut d = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if d != BigInt::from(1) {
        return format_fraction(q);
    }
    let digits = twos.max(fives);
    if digits == 0 {
        return q.numer().to_string();
    }
    let scaled = (q * Rational::from_integer(BigInt::from(10).pow(digits))).to_integer();
    let neg = scaled.is_negative();
    let s = scaled.abs().to_string();
    let s = format!("{:0>width$}", s, width = digits as usize + 1);
    let (int_part, frac_part) = s.split_at(s.len() - digits as usize);
    format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac_part)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> RealE {
        RealE::from_frac(n, d)
    }

    #[test]
    fn err_absorbs_every_operator() {
        let five = RealE::from_int(5);
        assert_eq!(real_arith(ArithOp::Add, &RealE::Err, Some(&five)), RealE::Err);
        assert_eq!(real_arith(ArithOp::Add, &five, Some(&RealE::Err)), RealE::Err);
        assert_eq!(real_arith(ArithOp::Neg, &RealE::Err, None), RealE::Err);
        assert_eq!(real_arith(ArithOp::Div, &RealE::Err, Some(&RealE::zero())), RealE::Err);
    }

    #[test]
    fn division_by_zero_is_err() {
        assert_eq!(real_arith(ArithOp::Div, &q(1, 1), Some(&RealE::zero())), RealE::Err);
    }

    #[test]
    fn exact_product() {
        assert_eq!(real_arith(ArithOp::Mul, &q(3, 2), Some(&q(2, 3))), q(1, 1));
    }

    #[test]
    fn arity_mismatch_is_err() {
        assert_eq!(real_arith(ArithOp::Add, &q(1, 1), None), RealE::Err);
        assert_eq!(real_arith(ArithOp::Neg, &q(1, 1), Some(&q(1, 1))), RealE::Err);
    }

    #[test]
    fn decimal_rendering() {
        let r = |n, d| Rational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(format_decimal(&r(6, 5)), "1.2");
        assert_eq!(format_decimal(&r(21, 8)), "2.625");
        assert_eq!(format_decimal(&r(-1, 20)), "-0.05");
        assert_eq!(format_decimal(&r(1, 3)), "1/3");
        assert_eq!(format_decimal(&r(4, 1)), "4");
        assert_eq!(format_fraction(&r(21, 8)), "21/8");
    }
}
