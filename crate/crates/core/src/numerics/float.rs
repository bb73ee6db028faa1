use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::real::{format_decimal, RealE};
use super::{NumericsError, Rational};

/// Default cap on the number of values `enumerate_format` will produce.
pub const DEFAULT_ENUMERATION_BOUND: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormatMode {
    Tiny,
    Binary64,
}

/// A binary floating-point format without subnormals or infinities.
///
/// Normal values are `±m · 2^(e - p + 1)` with `2^(p-1) <= m < 2^p` and
/// `emin <= e <= emax`; zero is unsigned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FloatFormat {
    precision: u32,
    emin: i32,
    emax: i32,
    mode: FormatMode,
}

impl FloatFormat {
    pub fn tiny(precision: u32, emin: i32, emax: i32) -> Result<Self, NumericsError> {
        let fmt = FloatFormat { precision, emin, emax, mode: FormatMode::Tiny };
        fmt.validate()?;
        Ok(fmt)
    }

    pub fn binary64() -> Self {
        FloatFormat { precision: 53, emin: -1022, emax: 1023, mode: FormatMode::Binary64 }
    }

    fn validate(&self) -> Result<(), NumericsError> {
        // Every value must also be an f64, which is how values are stored.
        if !(2..=53).contains(&self.precision) {
            return Err(NumericsError::InvalidFormat(format!(
                "precision {} outside 2..=53",
                self.precision
            )));
        }
        if self.emin > self.emax {
            return Err(NumericsError::InvalidFormat(format!(
                "emin {} exceeds emax {}",
                self.emin, self.emax
            )));
        }
        if self.emin < -1022 || self.emax > 1023 {
            return Err(NumericsError::InvalidFormat(
                "exponent range must lie within [-1022, 1023]".into(),
            ));
        }
        Ok(())
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn emin(&self) -> i32 {
        self.emin
    }

    pub fn emax(&self) -> i32 {
        self.emax
    }

    pub fn mode(&self) -> FormatMode {
        self.mode
    }

    /// `(2 - 2^(1-p)) · 2^emax`
    pub fn f_max(&self) -> Rational {
        let m = (BigInt::one() << self.precision) - BigInt::one();
        pow2_times(m, self.emax - self.precision as i32 + 1)
    }

    pub fn f_min(&self) -> Rational {
        -self.f_max()
    }

    pub fn min_normal(&self) -> Rational {
        pow2_times(BigInt::one(), self.emin)
    }

    /// Number of representable values, zero included.
    pub fn cardinality(&self) -> u128 {
        let binades = (self.emax - self.emin + 1) as u128;
        2 * binades * (1u128 << (self.precision - 1)) + 1
    }

    /// Decomposes a non-zero representable magnitude as `(m, e)` with
    /// `|v| = m · 2^(e - p + 1)` and `m` in `[2^(p-1), 2^p)`.
    pub fn decompose(&self, v: &Rational) -> Option<(BigInt, i32)> {
        if v.is_zero() {
            return None;
        }
        let a = v.abs();
        let e = floor_log2(&a);
        let scaled = a * pow2_times(BigInt::one(), self.precision as i32 - 1 - e);
        if !scaled.is_integer() {
            return None;
        }
        Some((scaled.to_integer(), e))
    }

    pub fn is_representable(&self, v: &Rational) -> bool {
        if v.is_zero() {
            return true;
        }
        match self.decompose(v) {
            Some((_, e)) => e >= self.emin && e <= self.emax,
            None => false,
        }
    }

    /// True when the last significand bit is 0. Zero counts as even.
    pub fn is_even(&self, v: &FloatValue) -> bool {
        match self.decompose(&v.to_rational()) {
            None => true,
            Some((m, _)) => m.is_even(),
        }
    }

    /// Smallest representable value strictly greater than `v`.
    pub fn successor(&self, v: &FloatValue) -> Option<FloatValue> {
        let r = v.to_rational();
        if r.is_zero() {
            return Some(self.value_from(false, BigInt::one() << (self.precision - 1), self.emin));
        }
        if r.is_negative() {
            return self.predecessor(&v.negate()).map(|p| p.negate());
        }
        let (m, e) = self.decompose(&r)?;
        let next = m + 1;
        if next == BigInt::one() << self.precision {
            if e == self.emax {
                None
            } else {
                Some(self.value_from(false, BigInt::one() << (self.precision - 1), e + 1))
            }
        } else {
            Some(self.value_from(false, next, e))
        }
    }

    /// Largest representable value strictly less than `v`.
    pub fn predecessor(&self, v: &FloatValue) -> Option<FloatValue> {
        let r = v.to_rational();
        if r.is_zero() || r.is_negative() {
            return self.successor(&v.negate()).map(|s| s.negate());
        }
        let (m, e) = self.decompose(&r)?;
        let half = BigInt::one() << (self.precision - 1);
        if m == half {
            if e == self.emin {
                Some(FloatValue::ZERO)
            } else {
                let top = (BigInt::one() << self.precision) - 1;
                Some(self.value_from(false, top, e - 1))
            }
        } else {
            Some(self.value_from(false, m - 1, e))
        }
    }

    fn value_from(&self, negative: bool, m: BigInt, e: i32) -> FloatValue {
        let mantissa = m.to_u64().expect("significand fits in 53 bits") as f64;
        let x = ldexp(mantissa, e - self.precision as i32 + 1);
        FloatValue::from_f64(if negative { -x } else { x }).expect("finite by construction")
    }

    pub fn max_value(&self) -> FloatValue {
        FloatValue::from_f64(self.f_max().to_f64().expect("finite")).expect("finite")
    }
}

impl fmt::Display for FloatFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            FormatMode::Binary64 => f.write_str("binary64"),
            FormatMode::Tiny => write!(f, "tiny:p={},emin={},emax={}", self.precision, self.emin, self.emax),
        }
    }
}

impl FromStr for FloatFormat {
    type Err = NumericsError;

    /// Accepts `binary64` or `tiny:p=3,emin=-1,emax=1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "binary64" {
            return Ok(FloatFormat::binary64());
        }
        let body = s
            .strip_prefix("tiny:")
            .ok_or_else(|| NumericsError::InvalidFormat(format!("unknown format `{s}`")))?;
        let (mut p, mut emin, mut emax) = (None, None, None);
        for part in body.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| NumericsError::InvalidFormat(format!("malformed field `{part}`")))?;
            let bad = |_| NumericsError::InvalidFormat(format!("bad value in `{part}`"));
            match key.trim() {
                "p" => p = Some(value.trim().parse::<u32>().map_err(bad)?),
                "emin" => emin = Some(value.trim().parse::<i32>().map_err(bad)?),
                "emax" => emax = Some(value.trim().parse::<i32>().map_err(bad)?),
                other => {
                    return Err(NumericsError::InvalidFormat(format!("unknown field `{other}`")))
                }
            }
        }
        match (p, emin, emax) {
            (Some(p), Some(emin), Some(emax)) => FloatFormat::tiny(p, emin, emax),
            _ => Err(NumericsError::InvalidFormat("tiny format needs p, emin and emax".into())),
        }
    }
}

/// A finite float value. Stored as an `f64`, which holds every value of
/// every supported format exactly; negative zero is normalized away.
#[derive(Clone, Copy, Debug)]
pub struct FloatValue(f64);

impl FloatValue {
    pub const ZERO: FloatValue = FloatValue(0.0);

    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        Some(FloatValue(if x == 0.0 { 0.0 } else { x }))
    }

    pub fn to_f64(self) -> f64 {
        self.0
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from_float(self.0).expect("finite")
    }

    pub fn negate(&self) -> FloatValue {
        FloatValue::from_f64(-self.0).expect("finite")
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0.0
    }

    /// Sign, unbiased exponent and integer significand of the stored value.
    pub fn parts(&self) -> (bool, i32, u64) {
        if self.0 == 0.0 {
            return (false, 0, 0);
        }
        let bits = self.0.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        if biased == 0 {
            (negative, -1022 - 52, frac)
        } else {
            (negative, biased - 1023 - 52, frac | (1u64 << 52))
        }
    }
}

impl PartialEq for FloatValue {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl Eq for FloatValue {}

impl Hash for FloatValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl PartialOrd for FloatValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FloatValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).expect("finite values are totally ordered")
    }
}

impl fmt::Display for FloatValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_decimal(&self.to_rational()))
    }
}

/// A float extended with the error value that collapses ±∞ and NaN.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FloatE {
    Err,
    Num(FloatValue),
}

impl FloatE {
    pub fn is_err(&self) -> bool {
        matches!(self, FloatE::Err)
    }

    pub fn value(&self) -> Option<FloatValue> {
        match self {
            FloatE::Err => None,
            FloatE::Num(v) => Some(*v),
        }
    }

    /// Wraps a hardware result, collapsing non-finite values to `Err`.
    pub fn from_hardware(x: f64) -> FloatE {
        FloatValue::from_f64(x).map_or(FloatE::Err, FloatE::Num)
    }
}

impl fmt::Display for FloatE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FloatE::Err => f.write_str("err"),
            FloatE::Num(v) => v.fmt(f),
        }
    }
}

/// Canonical embedding of floats into err-extended rationals.
pub fn inj(f: &FloatE) -> RealE {
    match f {
        FloatE::Err => RealE::Err,
        FloatE::Num(v) => RealE::Num(v.to_rational()),
    }
}

/// Round-to-nearest with ties to the even significand. Values outside
/// `[F_min, F_max]` map to `Err`. Below the smallest normal the candidates
/// are zero and `±2^emin`, both with an even significand; that tie goes to
/// zero.
pub fn proj(fmt: &FloatFormat, r: &RealE) -> FloatE {
    let q = match r {
        RealE::Err => return FloatE::Err,
        RealE::Num(q) => q,
    };
    if q.is_zero() {
        return FloatE::Num(FloatValue::ZERO);
    }
    if q.abs() > fmt.f_max() {
        return FloatE::Err;
    }
    let negative = q.is_negative();
    let a = q.abs();
    let p = fmt.precision as i32;
    let e = floor_log2(&a);
    if e < fmt.emin {
        // a < 2^emin: compare against the midpoint 2^(emin-1).
        let half = pow2_times(BigInt::one(), fmt.emin - 1);
        if a <= half {
            return FloatE::Num(FloatValue::ZERO);
        }
        return FloatE::Num(fmt.value_from(negative, BigInt::one() << (p - 1), fmt.emin));
    }
    let scaled = a * pow2_times(BigInt::one(), p - 1 - e);
    let mut m = round_half_even(&scaled);
    let mut e = e;
    if m == BigInt::one() << p {
        m = BigInt::one() << (p - 1);
        e += 1;
    }
    debug_assert!(e <= fmt.emax);
    FloatE::Num(fmt.value_from(negative, m, e))
}

/// Every representable value of a tiny format, strictly increasing.
pub fn enumerate_format(fmt: &FloatFormat) -> Result<Vec<FloatValue>, NumericsError> {
    enumerate_format_bounded(fmt, DEFAULT_ENUMERATION_BOUND)
}

pub fn enumerate_format_bounded(
    fmt: &FloatFormat,
    bound: usize,
) -> Result<Vec<FloatValue>, NumericsError> {
    let size = fmt.cardinality();
    if fmt.mode == FormatMode::Binary64 || size > bound as u128 {
        return Err(NumericsError::FormatTooLarge { size, bound });
    }
    let p = fmt.precision;
    let mut positive = Vec::with_capacity((size / 2) as usize);
    for e in fmt.emin..=fmt.emax {
        for m in (1u64 << (p - 1))..(1u64 << p) {
            positive.push(fmt.value_from(false, BigInt::from(m), e));
        }
    }
    let mut out: Vec<FloatValue> = positive.iter().rev().map(FloatValue::negate).collect();
    out.push(FloatValue::ZERO);
    out.extend(positive);
    Ok(out)
}

/// One end of a preimage interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub value: Rational,
    pub closed: bool,
}

/// The set of err-extended reals that `proj` sends to a given float.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preimage {
    Interval { lo: Endpoint, hi: Endpoint },
    /// `{err} ∪ (-∞, f_min) ∪ (f_max, +∞)`
    ErrRegion { f_min: Rational, f_max: Rational },
}

impl Preimage {
    pub fn contains(&self, r: &RealE) -> bool {
        match (self, r) {
            (Preimage::ErrRegion { .. }, RealE::Err) => true,
            (Preimage::ErrRegion { f_min, f_max }, RealE::Num(q)) => q < f_min || q > f_max,
            (Preimage::Interval { .. }, RealE::Err) => false,
            (Preimage::Interval { lo, hi }, RealE::Num(q)) => {
                let above = if lo.closed { q >= &lo.value } else { q > &lo.value };
                let below = if hi.closed { q <= &hi.value } else { q < &hi.value };
                above && below
            }
        }
    }
}

impl fmt::Display for Preimage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preimage::Interval { lo, hi } => write!(
                f,
                "{}{}, {}{}",
                if lo.closed { '[' } else { '(' },
                format_decimal(&lo.value),
                format_decimal(&hi.value),
                if hi.closed { ']' } else { ')' },
            ),
            Preimage::ErrRegion { f_min, f_max } => write!(
                f,
                "{{err}} ∪ (-inf, {}) ∪ ({}, +inf)",
                format_decimal(f_min),
                format_decimal(f_max)
            ),
        }
    }
}

/// Which of two adjacent representables wins a tie at their midpoint:
/// the one with an even significand, or zero when both are even.
fn tie_goes_to(fmt: &FloatFormat, f: &FloatValue, neighbour: &FloatValue) -> bool {
    let (fe, ne) = (fmt.is_even(f), fmt.is_even(neighbour));
    match (fe, ne) {
        (true, false) => true,
        (false, true) => false,
        _ => f.is_zero(),
    }
}

/// Preimage of `f` under `proj`, following the interior / F_min / F_max /
/// err case split. An endpoint is closed iff the tie there rounds to `f`.
pub fn rounding_boundaries(fmt: &FloatFormat, f: &FloatE) -> Preimage {
    let v = match f {
        FloatE::Err => {
            return Preimage::ErrRegion { f_min: fmt.f_min(), f_max: fmt.f_max() };
        }
        FloatE::Num(v) => *v,
    };
    let r = v.to_rational();
    let two = Rational::from_integer(BigInt::from(2));
    let lo = match fmt.predecessor(&v) {
        Some(prev) => Endpoint {
            value: (&r + prev.to_rational()) / &two,
            closed: tie_goes_to(fmt, &v, &prev),
        },
        None => Endpoint { value: r.clone(), closed: true },
    };
    let hi = match fmt.successor(&v) {
        Some(next) => Endpoint {
            value: (&r + next.to_rational()) / &two,
            closed: tie_goes_to(fmt, &v, &next),
        },
        None => Endpoint { value: r, closed: true },
    };
    Preimage::Interval { lo, hi }
}

pub(crate) fn pow2_times(m: BigInt, e: i32) -> Rational {
    if e >= 0 {
        Rational::from_integer(m << e as usize)
    } else {
        Rational::new(m, BigInt::one() << (-e) as usize)
    }
}

/// `floor(log2(a))` for a positive rational.
pub(crate) fn floor_log2(a: &Rational) -> i32 {
    debug_assert!(a.is_positive());
    let (n, d) = (a.numer(), a.denom());
    let k = n.bits() as i64 - d.bits() as i64;
    // 2^k <= a  <=>  n >= d·2^k
    let holds = if k >= 0 { n >= &(d << k as usize) } else { (n << (-k) as usize) >= *d };
    (if holds { k } else { k - 1 }) as i32
}

fn round_half_even(x: &Rational) -> BigInt {
    let floor = x.floor().to_integer();
    let frac = x - Rational::from_integer(floor.clone());
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    match frac.cmp(&half) {
        Ordering::Less => floor,
        Ordering::Greater => floor + 1,
        Ordering::Equal => {
            if floor.is_even() {
                floor
            } else {
                floor + 1
            }
        }
    }
}

fn ldexp(x: f64, e: i32) -> f64 {
    let mut x = x;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny3() -> FloatFormat {
        FloatFormat::tiny(3, -1, 1).unwrap()
    }

    fn r(n: i64, d: i64) -> RealE {
        RealE::from_frac(n, d)
    }

    fn fv(x: f64) -> FloatE {
        FloatE::from_hardware(x)
    }

    #[test]
    fn format_string_round_trip() {
        let f: FloatFormat = "tiny:p=3,emin=-1,emax=1".parse().unwrap();
        assert_eq!(f, tiny3());
        assert_eq!(f.to_string(), "tiny:p=3,emin=-1,emax=1");
        assert_eq!("binary64".parse::<FloatFormat>().unwrap(), FloatFormat::binary64());
        assert!("tiny:p=1,emin=0,emax=0".parse::<FloatFormat>().is_err());
        assert!("tiny:p=3,emin=2,emax=1".parse::<FloatFormat>().is_err());
        assert!("decimal32".parse::<FloatFormat>().is_err());
    }

    #[test]
    fn f_max_of_small_formats() {
        assert_eq!(RealE::Num(tiny3().f_max()), r(7, 2));
        assert_eq!(RealE::Num(FloatFormat::binary64().f_max()), RealE::Num(Rational::from_float(f64::MAX).unwrap()));
    }

    #[test]
    fn enumerates_smallest_format() {
        let f = FloatFormat::tiny(2, 0, 0).unwrap();
        let values: Vec<f64> = enumerate_format(&f).unwrap().iter().map(|v| v.to_f64()).collect();
        assert_eq!(values, vec![-1.5, -1.0, 0.0, 1.0, 1.5]);
    }

    #[test]
    fn enumerates_tiny3() {
        let values = enumerate_format(&tiny3()).unwrap();
        assert_eq!(values.len(), 25);
        let positive: Vec<f64> = values[13..].iter().map(|v| v.to_f64()).collect();
        assert_eq!(
            positive,
            vec![0.5, 0.625, 0.75, 0.875, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 3.5]
        );
    }

    #[test]
    fn binary64_is_too_large_to_enumerate() {
        assert!(matches!(
            enumerate_format(&FloatFormat::binary64()),
            Err(NumericsError::FormatTooLarge { .. })
        ));
        let f = FloatFormat::tiny(12, -10, 10).unwrap();
        assert!(matches!(
            enumerate_format_bounded(&f, 1000),
            Err(NumericsError::FormatTooLarge { .. })
        ));
    }

    #[test]
    fn proj_ties_to_even() {
        assert_eq!(proj(&tiny3(), &r(9, 8)), fv(1.0));
        // 1.375 sits between 1.25 (odd) and 1.5 (even)
        assert_eq!(proj(&tiny3(), &r(11, 8)), fv(1.5));
        // 3.25 between 3 (even) and 3.5 (odd)
        assert_eq!(proj(&tiny3(), &r(13, 4)), fv(3.0));
    }

    #[test]
    fn proj_outside_range_is_err() {
        assert_eq!(proj(&tiny3(), &r(4, 1)), FloatE::Err);
        assert_eq!(proj(&tiny3(), &r(-15, 4)), FloatE::Err);
        assert_eq!(proj(&tiny3(), &r(7, 2)), fv(3.5));
        assert_eq!(proj(&tiny3(), &RealE::Err), FloatE::Err);
    }

    #[test]
    fn proj_near_zero() {
        assert_eq!(proj(&tiny3(), &r(1, 4)), fv(0.0));
        assert_eq!(proj(&tiny3(), &r(-1, 4)), fv(0.0));
        assert_eq!(proj(&tiny3(), &r(3, 10)), fv(0.5));
        assert_eq!(proj(&tiny3(), &r(-3, 10)), fv(-0.5));
    }

    #[test]
    fn proj_inverts_inj() {
        assert_eq!(proj(&tiny3(), &inj(&fv(1.75))), fv(1.75));
        assert_eq!(inj(&fv(1.25)), r(5, 4));
        assert_eq!(inj(&FloatE::Err), RealE::Err);
        assert_eq!(inj(&fv(0.0)), RealE::zero());
    }

    #[test]
    fn binary64_proj_matches_hardware_rounding() {
        let fmt = FloatFormat::binary64();
        assert_eq!(proj(&fmt, &r(1, 10)), fv(0.1));
        assert_eq!(proj(&fmt, &r(1, 3)), fv(1.0 / 3.0));
        assert_eq!(proj(&fmt, &r(-22, 7)), fv(-22.0 / 7.0));
    }

    #[test]
    fn boundaries_interior() {
        let pre = rounding_boundaries(&tiny3(), &fv(1.0));
        assert_eq!(
            pre,
            Preimage::Interval {
                lo: Endpoint { value: Rational::new(15.into(), 16.into()), closed: true },
                hi: Endpoint { value: Rational::new(9.into(), 8.into()), closed: true },
            }
        );
        // odd significand: open on both sides
        let pre = rounding_boundaries(&tiny3(), &fv(1.25));
        assert_eq!(pre.to_string(), "(1.125, 1.375)");
    }

    #[test]
    fn boundaries_at_extremes() {
        let fmt = tiny3();
        assert_eq!(rounding_boundaries(&fmt, &fv(3.5)).to_string(), "(3.25, 3.5]");
        assert_eq!(rounding_boundaries(&fmt, &fv(-3.5)).to_string(), "[-3.5, -3.25)");
        assert_eq!(rounding_boundaries(&fmt, &fv(0.0)).to_string(), "[-0.25, 0.25]");
        assert_eq!(rounding_boundaries(&fmt, &fv(0.5)).to_string(), "(0.25, 0.5625]");
        let err = rounding_boundaries(&fmt, &FloatE::Err);
        assert!(err.contains(&RealE::Err));
        assert!(err.contains(&r(4, 1)));
        assert!(!err.contains(&r(7, 2)));
    }

    #[test]
    fn parts_of_stored_value() {
        let FloatE::Num(v) = fv(1.5) else { unreachable!() };
        let (neg, e, m) = v.parts();
        assert!(!neg);
        assert_eq!(m as f64 * 2f64.powi(e), 1.5);
    }

    #[test]
    fn successor_and_predecessor_walk_the_format() {
        let fmt = tiny3();
        let values = enumerate_format(&fmt).unwrap();
        for w in values.windows(2) {
            assert_eq!(fmt.successor(&w[0]), Some(w[1]));
            assert_eq!(fmt.predecessor(&w[1]), Some(w[0]));
        }
        assert_eq!(fmt.successor(values.last().unwrap()), None);
        assert_eq!(fmt.predecessor(&values[0]), None);
    }
}
