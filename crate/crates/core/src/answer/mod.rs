//! Answer domains (ω-cpos with bottom and binary joins) and the
//! continuations that map environments into them.

mod continuation;

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

pub use continuation::{kappa_eval, Continuation, ContinuationFn, EvalTrace};

use crate::numerics::{format_decimal, Rational};

/// The operations an answer domain has to provide.
pub trait AnswerDomain {
    type Elem: Clone + Eq + fmt::Debug;

    fn bottom() -> Self::Elem;
    fn leq(a: &Self::Elem, b: &Self::Elem) -> bool;
    fn join(a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Whether suprema of ascending chains are reached after finitely
    /// many steps.
    fn exact_chain_suprema() -> bool;
}

/// `{0, 1}` with `0 < 1`.
pub struct BoolAns;

impl AnswerDomain for BoolAns {
    type Elem = bool;

    fn bottom() -> bool {
        false
    }

    fn leq(a: &bool, b: &bool) -> bool {
        !*a || *b
    }

    fn join(a: &bool, b: &bool) -> bool {
        *a || *b
    }

    fn exact_chain_suprema() -> bool {
        true
    }
}

/// `[0, +∞]` over exact rationals.
pub struct ExtNonNegAns;

impl AnswerDomain for ExtNonNegAns {
    type Elem = ExtNonNeg;

    fn bottom() -> ExtNonNeg {
        ExtNonNeg::zero()
    }

    fn leq(a: &ExtNonNeg, b: &ExtNonNeg) -> bool {
        a <= b
    }

    fn join(a: &ExtNonNeg, b: &ExtNonNeg) -> ExtNonNeg {
        a.max(b).clone()
    }

    fn exact_chain_suprema() -> bool {
        false
    }
}

/// A non-negative rational or `+∞`, with `0 · ∞ = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtNonNeg {
    Finite(Rational),
    Infinity,
}

impl ExtNonNeg {
    pub fn zero() -> Self {
        ExtNonNeg::Finite(Rational::zero())
    }

    pub fn one() -> Self {
        ExtNonNeg::Finite(Rational::from_integer(1.into()))
    }

    /// `None` for negative input.
    pub fn finite(q: Rational) -> Option<Self> {
        if q.is_negative() {
            None
        } else {
            Some(ExtNonNeg::Finite(q))
        }
    }

    pub fn from_int(n: u64) -> Self {
        ExtNonNeg::Finite(Rational::from_integer(n.into()))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtNonNeg::Finite(q) if q.is_zero())
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtNonNeg::Finite(q) => Some(q),
            ExtNonNeg::Infinity => None,
        }
    }

    pub fn add(&self, other: &ExtNonNeg) -> ExtNonNeg {
        match (self, other) {
            (ExtNonNeg::Finite(a), ExtNonNeg::Finite(b)) => ExtNonNeg::Finite(a + b),
            _ => ExtNonNeg::Infinity,
        }
    }

    pub fn mul(&self, other: &ExtNonNeg) -> ExtNonNeg {
        match (self, other) {
            (ExtNonNeg::Finite(a), ExtNonNeg::Finite(b)) => ExtNonNeg::Finite(a * b),
            (x, y) if x.is_zero() || y.is_zero() => ExtNonNeg::zero(),
            _ => ExtNonNeg::Infinity,
        }
    }

    pub fn scale(&self, alpha: &Rational) -> ExtNonNeg {
        debug_assert!(!alpha.is_negative());
        self.mul(&ExtNonNeg::Finite(alpha.clone()))
    }

    pub fn min(&self, other: &ExtNonNeg) -> ExtNonNeg {
        std::cmp::min(self, other).clone()
    }

    pub fn max(&self, other: &ExtNonNeg) -> ExtNonNeg {
        std::cmp::max(self, other).clone()
    }

    /// `self - other` for `other <= self`, with `∞ - x = ∞` for finite `x`.
    pub fn saturating_sub(&self, other: &ExtNonNeg) -> ExtNonNeg {
        match (self, other) {
            (ExtNonNeg::Finite(a), ExtNonNeg::Finite(b)) => {
                if a > b {
                    ExtNonNeg::Finite(a - b)
                } else {
                    ExtNonNeg::zero()
                }
            }
            (ExtNonNeg::Infinity, ExtNonNeg::Finite(_)) => ExtNonNeg::Infinity,
            (_, ExtNonNeg::Infinity) => ExtNonNeg::zero(),
        }
    }
}

impl fmt::Display for ExtNonNeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNonNeg::Finite(q) => f.write_str(&format_decimal(q)),
            ExtNonNeg::Infinity => f.write_str("+inf"),
        }
    }
}

/// Which answer domain a continuation lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnsKind {
    Bool,
    ExtNonNeg,
}

impl fmt::Display for AnsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnsKind::Bool => "bool",
            AnsKind::ExtNonNeg => "ext-nonneg",
        })
    }
}

impl std::str::FromStr for AnsKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bool" => Ok(AnsKind::Bool),
            "ext" | "ext-nonneg" | "nonneg" | "real" => Ok(AnsKind::ExtNonNeg),
            other => Err(format!("unknown answer domain `{other}` (expected bool or ext-nonneg)")),
        }
    }
}

/// An answer from one of the shipped domains.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ans {
    Bool(bool),
    Ext(ExtNonNeg),
}

impl Ans {
    pub fn bottom(kind: AnsKind) -> Ans {
        match kind {
            AnsKind::Bool => Ans::Bool(BoolAns::bottom()),
            AnsKind::ExtNonNeg => Ans::Ext(ExtNonNegAns::bottom()),
        }
    }

    pub fn kind(&self) -> AnsKind {
        match self {
            Ans::Bool(_) => AnsKind::Bool,
            Ans::Ext(_) => AnsKind::ExtNonNeg,
        }
    }

    /// The order of the domain; `None` across domains.
    pub fn partial_cmp_in_domain(&self, other: &Ans) -> Option<Ordering> {
        match (self, other) {
            (Ans::Bool(a), Ans::Bool(b)) => Some(a.cmp(b)),
            (Ans::Ext(a), Ans::Ext(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }

    pub fn leq(&self, other: &Ans) -> bool {
        matches!(self.partial_cmp_in_domain(other), Some(Ordering::Less | Ordering::Equal))
    }

    /// Binary supremum. Both answers must come from the same domain.
    pub fn join(&self, other: &Ans) -> Ans {
        match (self, other) {
            (Ans::Bool(a), Ans::Bool(b)) => Ans::Bool(BoolAns::join(a, b)),
            (Ans::Ext(a), Ans::Ext(b)) => Ans::Ext(ExtNonNegAns::join(a, b)),
            _ => panic!("join across answer domains"),
        }
    }

    pub fn as_ext(&self) -> Option<&ExtNonNeg> {
        match self {
            Ans::Ext(x) => Some(x),
            Ans::Bool(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Ans::Bool(b) => Some(*b),
            Ans::Ext(_) => None,
        }
    }
}

impl fmt::Display for Ans {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ans::Bool(b) => f.write_str(if *b { "1" } else { "0" }),
            Ans::Ext(x) => x.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn samples() -> Vec<ExtNonNeg> {
        let mut v: Vec<ExtNonNeg> =
            [(0, 1), (1, 3), (1, 2), (1, 1), (7, 2), (100, 1)].iter().map(|&(n, d)| ExtNonNeg::Finite(q(n, d))).collect();
        v.push(ExtNonNeg::Infinity);
        v
    }

    #[test]
    fn infinity_convention_table() {
        let inf = ExtNonNeg::Infinity;
        let zero = ExtNonNeg::zero();
        assert_eq!(zero.mul(&inf), zero);
        assert_eq!(inf.mul(&zero), zero);
        assert_eq!(inf.mul(&inf), inf);
        for x in samples() {
            assert_eq!(x.add(&inf), inf);
            assert_eq!(inf.add(&x), inf);
        }
        assert_eq!(inf.scale(&q(0, 1)), zero);
        assert_eq!(inf.scale(&q(1, 2)), inf);
    }

    #[test]
    fn bool_join_laws_exhaustive() {
        let all = [false, true];
        for a in all {
            assert!(BoolAns::leq(&BoolAns::bottom(), &a));
            assert_eq!(BoolAns::join(&a, &a), a);
            for b in all {
                let j = BoolAns::join(&a, &b);
                assert_eq!(j, BoolAns::join(&b, &a));
                assert!(BoolAns::leq(&a, &j) && BoolAns::leq(&b, &j));
                for u in all {
                    if BoolAns::leq(&a, &u) && BoolAns::leq(&b, &u) {
                        assert!(BoolAns::leq(&j, &u));
                    }
                    assert_eq!(BoolAns::join(&BoolAns::join(&a, &b), &u), BoolAns::join(&a, &BoolAns::join(&b, &u)));
                }
                if BoolAns::leq(&a, &b) && BoolAns::leq(&b, &a) {
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn ext_order_and_join_laws() {
        let s = samples();
        for a in &s {
            assert!(ExtNonNegAns::leq(&ExtNonNegAns::bottom(), a));
            assert!(ExtNonNegAns::leq(a, a));
            for b in &s {
                let j = ExtNonNegAns::join(a, b);
                assert_eq!(j, ExtNonNegAns::join(b, a));
                assert!(ExtNonNegAns::leq(a, &j) && ExtNonNegAns::leq(b, &j));
                if ExtNonNegAns::leq(a, b) && ExtNonNegAns::leq(b, a) {
                    assert_eq!(a, b);
                }
                for c in &s {
                    if ExtNonNegAns::leq(a, c) && ExtNonNegAns::leq(b, c) {
                        assert!(ExtNonNegAns::leq(&j, c));
                    }
                    if ExtNonNegAns::leq(a, b) && ExtNonNegAns::leq(b, c) {
                        assert!(ExtNonNegAns::leq(a, c));
                    }
                    assert_eq!(
                        ExtNonNegAns::join(&j, c),
                        ExtNonNegAns::join(a, &ExtNonNegAns::join(b, c))
                    );
                }
            }
        }
    }

    #[test]
    fn ans_bottom_and_kinds() {
        assert_eq!(Ans::bottom(AnsKind::Bool), Ans::Bool(false));
        assert_eq!(Ans::bottom(AnsKind::ExtNonNeg), Ans::Ext(ExtNonNeg::zero()));
        assert!(!Ans::Bool(true).leq(&Ans::Ext(ExtNonNeg::Infinity)));
        assert_eq!("bool".parse::<AnsKind>().unwrap(), AnsKind::Bool);
        assert_eq!(ExtNonNeg::Infinity.to_string(), "+inf");
        assert_eq!(ExtNonNeg::Finite(q(3, 2)).to_string(), "1.5");
    }
}
