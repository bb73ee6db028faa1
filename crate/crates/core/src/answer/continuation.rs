use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Signed;

use super::{Ans, AnsKind, ExtNonNeg};
use crate::error::SemanticsError;
use crate::eval::{eval_expr, eval_test, Env, Semantics};
use crate::numerics::{RealE, Rational};
use crate::syntax::{Expr, Test};

/// Bookkeeping gathered while a continuation is evaluated.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalTrace {
    /// Some loop fixpoint hit its iteration budget before stabilizing.
    pub budget_exhausted: bool,
    /// Largest number of loop iterations any fixpoint needed.
    pub max_iterations: usize,
}

impl EvalTrace {
    pub fn merge(&mut self, other: &EvalTrace) {
        self.budget_exhausted |= other.budget_exhausted;
        self.max_iterations = self.max_iterations.max(other.max_iterations);
    }
}

/// A continuation backed by arbitrary code, e.g. the weakest precondition
/// of an instruction.
pub trait ContinuationFn: Send + Sync {
    fn kind(&self) -> AnsKind;
    fn eval(&self, env: &Env, trace: &mut EvalTrace) -> Result<Ans, SemanticsError>;
    fn describe(&self) -> String;
}

enum Node {
    Const(Ans),
    Expr { expr: Expr, sem: Semantics, default: ExtNonNeg },
    Indicator { test: Test, sem: Semantics, kind: AnsKind },
    Table { entries: BTreeMap<Env, Ans>, default: Ans },
    Scale(Rational, Continuation),
    Add(Continuation, Continuation),
    Join(Continuation, Continuation),
    Truncate(Continuation, ExtNonNeg),
    Custom(Arc<dyn ContinuationFn>),
}

/// A total map from environments to answers.
#[derive(Clone)]
pub struct Continuation(Arc<Node>);

impl Continuation {
    pub fn constant(a: Ans) -> Continuation {
        Continuation(Arc::new(Node::Const(a)))
    }

    pub fn bottom(kind: AnsKind) -> Continuation {
        Continuation::constant(Ans::bottom(kind))
    }

    pub fn zero() -> Continuation {
        Continuation::constant(Ans::Ext(ExtNonNeg::zero()))
    }

    /// The value of `expr`, or 0 where it is negative or err.
    pub fn expr(expr: Expr, sem: Semantics) -> Continuation {
        Continuation::expr_with_default(expr, sem, ExtNonNeg::zero())
    }

    pub fn expr_with_default(expr: Expr, sem: Semantics, default: ExtNonNeg) -> Continuation {
        Continuation(Arc::new(Node::Expr { expr, sem, default }))
    }

    /// 1 where the test may hold, i.e. `1 ∈ ⟦t⟧(ρ)`, else 0.
    pub fn indicator(test: Test, sem: Semantics, kind: AnsKind) -> Continuation {
        Continuation(Arc::new(Node::Indicator { test, sem, kind }))
    }

    pub fn table(entries: BTreeMap<Env, Ans>, default: Ans) -> Result<Continuation, SemanticsError> {
        let kind = default.kind();
        if let Some(bad) = entries.values().find(|a| a.kind() != kind) {
            return Err(SemanticsError::DomainMismatch { expected: kind, found: bad.kind() });
        }
        Ok(Continuation(Arc::new(Node::Table { entries, default })))
    }

    pub fn custom(f: Arc<dyn ContinuationFn>) -> Continuation {
        Continuation(Arc::new(Node::Custom(f)))
    }

    /// `α · κ` for `α >= 0`, with `0 · ∞ = 0`.
    pub fn scale(alpha: Rational, k: &Continuation) -> Result<Continuation, SemanticsError> {
        k.require(AnsKind::ExtNonNeg)?;
        if alpha.is_negative() {
            return Err(SemanticsError::NegativeScale);
        }
        Ok(Continuation(Arc::new(Node::Scale(alpha, k.clone()))))
    }

    /// Pointwise sum.
    pub fn add(a: &Continuation, b: &Continuation) -> Result<Continuation, SemanticsError> {
        a.require(AnsKind::ExtNonNeg)?;
        b.require(AnsKind::ExtNonNeg)?;
        Ok(Continuation(Arc::new(Node::Add(a.clone(), b.clone()))))
    }

    /// Pointwise join.
    pub fn join(a: &Continuation, b: &Continuation) -> Result<Continuation, SemanticsError> {
        b.require(a.kind())?;
        Ok(Continuation(Arc::new(Node::Join(a.clone(), b.clone()))))
    }

    /// Pointwise `min(κ, cap)`.
    pub fn truncate(k: &Continuation, cap: ExtNonNeg) -> Result<Continuation, SemanticsError> {
        k.require(AnsKind::ExtNonNeg)?;
        Ok(Continuation(Arc::new(Node::Truncate(k.clone(), cap))))
    }

    pub fn kind(&self) -> AnsKind {
        match &*self.0 {
            Node::Const(a) => a.kind(),
            Node::Expr { .. } | Node::Scale(..) | Node::Add(..) | Node::Truncate(..) => AnsKind::ExtNonNeg,
            Node::Indicator { kind, .. } => *kind,
            Node::Table { default, .. } => default.kind(),
            Node::Join(a, _) => a.kind(),
            Node::Custom(f) => f.kind(),
        }
    }

    pub fn require(&self, expected: AnsKind) -> Result<(), SemanticsError> {
        let found = self.kind();
        if found == expected {
            Ok(())
        } else {
            Err(SemanticsError::DomainMismatch { expected, found })
        }
    }

    pub fn eval(&self, env: &Env, trace: &mut EvalTrace) -> Result<Ans, SemanticsError> {
        match &*self.0 {
            Node::Const(a) => Ok(a.clone()),
            Node::Expr { expr, sem, default } => {
                let v = eval_expr(sem, expr, env)?;
                Ok(Ans::Ext(match v.to_real() {
                    RealE::Num(q) if !q.is_negative() => ExtNonNeg::Finite(q),
                    _ => default.clone(),
                }))
            }
            Node::Indicator { test, sem, kind } => {
                let holds = eval_test(test, env, sem)?.may_be_true();
                Ok(match kind {
                    AnsKind::Bool => Ans::Bool(holds),
                    AnsKind::ExtNonNeg => Ans::Ext(if holds { ExtNonNeg::one() } else { ExtNonNeg::zero() }),
                })
            }
            Node::Table { entries, default } => Ok(entries.get(env).unwrap_or(default).clone()),
            Node::Scale(alpha, k) => Ok(Ans::Ext(ext(k.eval(env, trace)?).scale(alpha))),
            Node::Add(a, b) => {
                let x = ext(a.eval(env, trace)?);
                let y = ext(b.eval(env, trace)?);
                Ok(Ans::Ext(x.add(&y)))
            }
            Node::Join(a, b) => Ok(a.eval(env, trace)?.join(&b.eval(env, trace)?)),
            Node::Truncate(k, cap) => Ok(Ans::Ext(ExtNonNeg::min(&ext(k.eval(env, trace)?), cap))),
            Node::Custom(f) => {
                let a = f.eval(env, trace)?;
                debug_assert_eq!(a.kind(), f.kind());
                Ok(a)
            }
        }
    }
}

fn ext(a: Ans) -> ExtNonNeg {
    match a {
        Ans::Ext(x) => x,
        Ans::Bool(_) => unreachable!("domain checked at construction"),
    }
}

/// Evaluates `κ(ρ)`.
pub fn kappa_eval(k: &Continuation, env: &Env) -> Result<Ans, SemanticsError> {
    k.eval(env, &mut EvalTrace::default())
}

impl fmt::Display for Continuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(a) => write!(f, "const: {a}"),
            Node::Expr { expr, .. } => write!(f, "expr: {expr}"),
            Node::Indicator { test, .. } => write!(f, "indicator: {test}"),
            Node::Table { entries, default } => write!(f, "table: {} entries, default {default}", entries.len()),
            Node::Scale(alpha, k) => write!(f, "{alpha} * ({k})"),
            Node::Add(a, b) => write!(f, "({a}) + ({b})"),
            Node::Join(a, b) => write!(f, "sup({a}, {b})"),
            Node::Truncate(k, cap) => write!(f, "min({k}, {cap})"),
            Node::Custom(c) => f.write_str(&c.describe()),
        }
    }
}

impl fmt::Debug for Continuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Continuation({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Value;
    use crate::syntax::{parse_expr, parse_test};

    fn env(pairs: &[(&str, RealE)]) -> Env {
        Env::from_pairs(pairs.iter().map(|(k, v)| (k.to_string(), Value::Real(v.clone())))).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn indicator_examples() {
        let k = Continuation::indicator(parse_test("x == 1").unwrap(), Semantics::Real, AnsKind::Bool);
        assert_eq!(kappa_eval(&k, &env(&[("x", RealE::from_int(1))])).unwrap(), Ans::Bool(true));
        assert_eq!(kappa_eval(&k, &env(&[("x", RealE::Err)])).unwrap(), Ans::Bool(true));
        assert_eq!(kappa_eval(&k, &env(&[("x", RealE::from_int(2))])).unwrap(), Ans::Bool(false));
    }

    #[test]
    fn expr_continuation_defaults_on_negative_and_err() {
        let k = Continuation::expr(parse_expr("x").unwrap(), Semantics::Real);
        let at = |v| kappa_eval(&k, &env(&[("x", v)])).unwrap();
        assert_eq!(at(RealE::from_frac(3, 2)), Ans::Ext(ExtNonNeg::Finite(q(3, 2))));
        assert_eq!(at(RealE::from_int(-1)), Ans::Ext(ExtNonNeg::zero()));
        assert_eq!(at(RealE::Err), Ans::Ext(ExtNonNeg::zero()));
        let k7 = Continuation::expr_with_default(parse_expr("x").unwrap(), Semantics::Real, ExtNonNeg::from_int(7));
        assert_eq!(kappa_eval(&k7, &env(&[("x", RealE::Err)])).unwrap(), Ans::Ext(ExtNonNeg::from_int(7)));
    }

    #[test]
    fn scaling_by_zero_kills_infinity() {
        let inf = Continuation::constant(Ans::Ext(ExtNonNeg::Infinity));
        let k = Continuation::scale(q(0, 1), &inf).unwrap();
        assert_eq!(kappa_eval(&k, &Env::empty()).unwrap(), Ans::Ext(ExtNonNeg::zero()));
    }

    #[test]
    fn algebra_identities() {
        let k = Continuation::expr(parse_expr("x * 2").unwrap(), Semantics::Real);
        let plus_zero = Continuation::add(&k, &Continuation::zero()).unwrap();
        let self_join = Continuation::join(&k, &k).unwrap();
        for n in -3..4 {
            let e = env(&[("x", RealE::from_frac(n, 2))]);
            let base = kappa_eval(&k, &e).unwrap();
            assert_eq!(kappa_eval(&plus_zero, &e).unwrap(), base);
            assert_eq!(kappa_eval(&self_join, &e).unwrap(), base);
        }
    }

    #[test]
    fn domain_mismatches_are_rejected() {
        let b = Continuation::bottom(AnsKind::Bool);
        assert!(matches!(Continuation::scale(q(1, 1), &b), Err(SemanticsError::DomainMismatch { .. })));
        assert!(matches!(Continuation::add(&b, &Continuation::zero()), Err(SemanticsError::DomainMismatch { .. })));
        assert!(matches!(Continuation::join(&Continuation::zero(), &b), Err(SemanticsError::DomainMismatch { .. })));
        assert!(matches!(Continuation::scale(q(-1, 1), &Continuation::zero()), Err(SemanticsError::NegativeScale)));
        let mut entries = BTreeMap::new();
        entries.insert(Env::empty(), Ans::Bool(true));
        assert!(Continuation::table(entries, Ans::Ext(ExtNonNeg::zero())).is_err());
    }

    #[test]
    fn table_and_truncate() {
        let e1 = env(&[("x", RealE::from_int(1))]);
        let mut entries = BTreeMap::new();
        entries.insert(e1.clone(), Ans::Ext(ExtNonNeg::Infinity));
        let t = Continuation::table(entries, Ans::Ext(ExtNonNeg::one())).unwrap();
        assert_eq!(kappa_eval(&t, &e1).unwrap(), Ans::Ext(ExtNonNeg::Infinity));
        assert_eq!(kappa_eval(&t, &Env::empty()).unwrap(), Ans::Ext(ExtNonNeg::one()));
        let capped = Continuation::truncate(&t, ExtNonNeg::from_int(5)).unwrap();
        assert_eq!(kappa_eval(&capped, &e1).unwrap(), Ans::Ext(ExtNonNeg::from_int(5)));
    }
}
