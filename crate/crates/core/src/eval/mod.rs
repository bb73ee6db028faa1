//! Concrete semantics: exact real evaluation, rounded float evaluation and
//! the set-valued semantics of tests.

pub(crate) mod env;

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

pub use env::{parse_env, parse_universe, Env, EnvParseError};

use crate::numerics::{inj, proj, FloatE, FloatFormat, FormatMode, RealE};
use crate::syntax::{BinOp, CmpOp, Expr, Test};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable `{0}` is unbound")]
    UnboundVariable(String),
    #[error("environment mixes real and float values")]
    ModeMismatch,
}

/// Which concrete semantics is in force.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Semantics {
    Real,
    Float(FloatFormat),
}

impl Semantics {
    pub fn float_format(&self) -> Option<&FloatFormat> {
        match self {
            Semantics::Real => None,
            Semantics::Float(f) => Some(f),
        }
    }

    /// Converts an exact value into this semantics' value set; floats are
    /// rounded with `proj`.
    pub fn value_of(&self, r: &RealE) -> Value {
        match self {
            Semantics::Real => Value::Real(r.clone()),
            Semantics::Float(fmt) => Value::Float(proj(fmt, r)),
        }
    }

    pub fn err(&self) -> Value {
        match self {
            Semantics::Real => Value::Real(RealE::Err),
            Semantics::Float(_) => Value::Float(FloatE::Err),
        }
    }

    pub fn admits(&self, v: &Value) -> bool {
        matches!((self, v), (Semantics::Real, Value::Real(_)) | (Semantics::Float(_), Value::Float(_)))
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Semantics::Real => f.write_str("real"),
            Semantics::Float(fmt) => fmt.fmt(f),
        }
    }
}

/// A value of either semantics.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Real(RealE),
    Float(FloatE),
}

impl Value {
    pub fn is_err(&self) -> bool {
        match self {
            Value::Real(r) => r.is_err(),
            Value::Float(f) => f.is_err(),
        }
    }

    /// The exact rational this value denotes.
    pub fn to_real(&self) -> RealE {
        match self {
            Value::Real(r) => r.clone(),
            Value::Float(f) => inj(f),
        }
    }

    /// Numeric comparison; `None` when either side is err.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Float(FloatE::Num(a)), Value::Float(FloatE::Num(b))) => Some(a.cmp(b)),
            _ => {
                let (a, b) = (self.to_real(), other.to_real());
                Some(a.as_rational()?.cmp(b.as_rational()?))
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Real(r) => r.fmt(f),
            Value::Float(x) => x.fmt(f),
        }
    }
}

/// Non-empty subset of {0, 1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TestResult {
    zero: bool,
    one: bool,
}

impl TestResult {
    pub const FALSE: TestResult = TestResult { zero: true, one: false };
    pub const TRUE: TestResult = TestResult { zero: false, one: true };
    pub const BOTH: TestResult = TestResult { zero: true, one: true };

    pub fn from_bool(b: bool) -> Self {
        if b {
            Self::TRUE
        } else {
            Self::FALSE
        }
    }

    pub fn contains(&self, v: bool) -> bool {
        if v {
            self.one
        } else {
            self.zero
        }
    }

    pub fn may_be_true(&self) -> bool {
        self.one
    }

    pub fn is_both(&self) -> bool {
        self.zero && self.one
    }

    /// `{1 - v | v ∈ self}`
    pub fn complement(&self) -> TestResult {
        TestResult { zero: self.one, one: self.zero }
    }

    /// Members in increasing order.
    pub fn members(&self) -> impl Iterator<Item = bool> {
        let (zero, one) = (self.zero, self.one);
        [(false, zero), (true, one)].into_iter().filter(|p| p.1).map(|p| p.0)
    }
}

impl fmt::Display for TestResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match (self.zero, self.one) {
            (true, true) => "{0,1}",
            (true, false) => "{0}",
            (false, true) => "{1}",
            (false, false) => unreachable!("test results are never empty"),
        })
    }
}

fn lookup<'a>(env: &'a Env, x: &str) -> Result<&'a Value, EvalError> {
    env.get(x).ok_or_else(|| EvalError::UnboundVariable(x.to_string()))
}

/// Exact evaluation with err propagation.
pub fn eval_real(e: &Expr, env: &Env) -> Result<RealE, EvalError> {
    Ok(match e {
        Expr::Lit(q) => RealE::Num(q.clone()),
        Expr::Var(x) => match lookup(env, x)? {
            Value::Real(r) => r.clone(),
            Value::Float(_) => return Err(EvalError::ModeMismatch),
        },
        Expr::Neg(a) => eval_real(a, env)?.neg(),
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval_real(a, env)?, eval_real(b, env)?);
            exact_binary(*op, &a, &b)
        }
    })
}

fn exact_binary(op: BinOp, a: &RealE, b: &RealE) -> RealE {
    match op {
        BinOp::Add => a.add(b),
        BinOp::Sub => a.sub(b),
        BinOp::Mul => a.mul(b),
        BinOp::Div => a.div(b),
    }
}

/// Float evaluation, rounding after every operation.
pub fn eval_float(e: &Expr, fmt: &FloatFormat, env: &Env) -> Result<FloatE, EvalError> {
    Ok(match e {
        Expr::Lit(q) => proj(fmt, &RealE::Num(q.clone())),
        Expr::Var(x) => match lookup(env, x)? {
            Value::Float(f) => *f,
            Value::Real(_) => return Err(EvalError::ModeMismatch),
        },
        Expr::Neg(a) => {
            let a = eval_float(a, fmt, env)?;
            match fmt.mode() {
                FormatMode::Binary64 => hardware(fmt, a, a, |x, _| -x),
                FormatMode::Tiny => proj(fmt, &inj(&a).neg()),
            }
        }
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval_float(a, fmt, env)?, eval_float(b, fmt, env)?);
            match fmt.mode() {
                FormatMode::Binary64 => hardware(fmt, a, b, |x, y| match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x / y,
                }),
                FormatMode::Tiny => proj(fmt, &exact_binary(*op, &inj(&a), &inj(&b))),
            }
        }
    })
}

/// Hardware binary64 operation with ±∞/NaN collapsed to err. Subnormal
/// results are re-rounded into the normal-only value set.
fn hardware(fmt: &FloatFormat, a: FloatE, b: FloatE, op: impl Fn(f64, f64) -> f64) -> FloatE {
    match (a, b) {
        (FloatE::Num(x), FloatE::Num(y)) => {
            let r = op(x.to_f64(), y.to_f64());
            if r.is_subnormal() {
                proj(fmt, &inj(&FloatE::from_hardware(r)))
            } else {
                FloatE::from_hardware(r)
            }
        }
        _ => FloatE::Err,
    }
}

/// Evaluates under the given semantics.
pub fn eval_expr(sem: &Semantics, e: &Expr, env: &Env) -> Result<Value, EvalError> {
    match sem {
        Semantics::Real => eval_real(e, env).map(Value::Real),
        Semantics::Float(fmt) => eval_float(e, fmt, env).map(Value::Float),
    }
}

/// Set-valued test semantics: `{0,1}` whenever an operand is err.
pub fn eval_test(t: &Test, env: &Env, sem: &Semantics) -> Result<TestResult, EvalError> {
    match t {
        Test::Not(inner) => Ok(eval_test(inner, env, sem)?.complement()),
        Test::Cmp(op, a, b) => {
            let (a, b) = (eval_expr(sem, a, env)?, eval_expr(sem, b, env)?);
            Ok(match a.compare(&b) {
                None => TestResult::BOTH,
                Some(ord) => TestResult::from_bool(match op {
                    CmpOp::Le => ord != Ordering::Greater,
                    CmpOp::Lt => ord == Ordering::Less,
                    CmpOp::Eq => ord == Ordering::Equal,
                    CmpOp::Ne => ord != Ordering::Equal,
                }),
            })
        }
    }
}
