//! Reference implementations used as oracles by the integration tests.
//! They share no code with the library beyond its public data types.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use wpwb::capacity::Capacity;
use wpwb::eval::{eval_test, Env, Semantics, Value};
use wpwb::numerics::{FloatE, FloatFormat, FloatValue, RealE};
use wpwb::syntax::{BinOp, Expr, Instr, Test};
use wpwb::wp::{enumerate_exec, DEFAULT_FUEL};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn pow2(e: i32) -> Q {
    if e >= 0 {
        Q::from_integer(BigInt::from(1) << e as usize)
    } else {
        Q::new(1.into(), BigInt::from(1) << (-e) as usize)
    }
}

/// Every value of a tiny format, listed by brute force as `±m · 2^(e-p+1)`
/// with `2^(p-1) <= m < 2^p`, plus zero.
pub struct TinyOracle {
    pub p: u32,
    pub emin: i32,
    pub emax: i32,
    /// Sorted ascending.
    pub values: Vec<Q>,
    significand: BTreeMap<Q, u64>,
}

impl TinyOracle {
    pub fn new(p: u32, emin: i32, emax: i32) -> Self {
        let mut significand = BTreeMap::new();
        significand.insert(Q::zero(), 0);
        for e in emin..=emax {
            for m in (1u64 << (p - 1))..(1u64 << p) {
                let v = Q::from_integer(m.into()) * pow2(e - p as i32 + 1);
                significand.insert(-v.clone(), m);
                significand.insert(v, m);
            }
        }
        let values = significand.keys().cloned().collect();
        TinyOracle { p, emin, emax, values, significand }
    }

    pub fn format(&self) -> FloatFormat {
        FloatFormat::tiny(self.p, self.emin, self.emax).unwrap()
    }

    pub fn f_max(&self) -> &Q {
        self.values.last().unwrap()
    }

    pub fn is_even(&self, v: &Q) -> bool {
        self.significand[v].is_multiple_of(2)
    }

    /// Nearest value by exhaustive search; ties go to the even
    /// significand, and to zero when both neighbours are even.
    /// `None` stands for err.
    pub fn round(&self, r: &RealE) -> Option<Q> {
        let r = r.as_rational()?;
        if r > self.f_max() || *r < -self.f_max().clone() {
            return None;
        }
        let mut best: Option<(Q, Q)> = None;
        for v in &self.values {
            let d = (v - r).abs();
            best = match best {
                None => Some((v.clone(), d)),
                Some((b, bd)) => {
                    if d < bd || (d == bd && self.prefer(v, &b)) {
                        Some((v.clone(), d))
                    } else {
                        Some((b, bd))
                    }
                }
            };
        }
        best.map(|(v, _)| v)
    }

    fn prefer(&self, v: &Q, over: &Q) -> bool {
        match (self.is_even(v), self.is_even(over)) {
            (true, false) => true,
            (false, true) => false,
            _ => v.is_zero(),
        }
    }

    /// Float semantics of an expression, rounding every subexpression
    /// through `round`.
    pub fn eval(&self, e: &Expr, env: &BTreeMap<String, Option<Q>>) -> Option<Q> {
        let v = match e {
            Expr::Lit(c) => Some(c.clone()),
            Expr::Var(x) => env[x].clone(),
            Expr::Neg(a) => self.eval(a, env).map(|v| -v),
            Expr::Bin(op, a, b) => {
                let (a, b) = (self.eval(a, env)?, self.eval(b, env)?);
                match op {
                    BinOp::Add => Some(a + b),
                    BinOp::Sub => Some(a - b),
                    BinOp::Mul => Some(a * b),
                    BinOp::Div => (!b.is_zero()).then(|| a / b),
                }
            }
        }?;
        self.round(&RealE::Num(v))
    }

    fn test(&self, t: &Test, env: &BTreeMap<String, Option<Q>>) -> BTreeSet<bool> {
        match t {
            Test::Not(inner) => self.test(inner, env).into_iter().map(|b| !b).collect(),
            Test::Cmp(op, a, b) => match (self.eval(a, env), self.eval(b, env)) {
                (Some(a), Some(b)) => BTreeSet::from([match op {
                    wpwb::syntax::CmpOp::Le => a <= b,
                    wpwb::syntax::CmpOp::Lt => a < b,
                    wpwb::syntax::CmpOp::Eq => a == b,
                    wpwb::syntax::CmpOp::Ne => a != b,
                }]),
                _ => BTreeSet::from([false, true]),
            },
        }
    }

    /// Runs a program whose tests all come out as singletons.
    pub fn run(&self, instr: &Instr, env: &mut BTreeMap<String, Option<Q>>) {
        match instr {
            Instr::Skip { .. } => {}
            Instr::Assign { var, expr, .. } => {
                let v = self.eval(expr, env);
                env.insert(var.clone(), v);
            }
            Instr::Seq(a, b) => {
                self.run(a, env);
                self.run(b, env);
            }
            Instr::If { test, then_branch, else_branch, .. } => {
                let r = self.test(test, env);
                assert_eq!(r.len(), 1, "oracle interpreter needs deterministic tests");
                self.run(if r.contains(&true) { then_branch } else { else_branch }, env);
            }
            Instr::While { test, body, .. } => loop {
                let r = self.test(test, env);
                assert_eq!(r.len(), 1, "oracle interpreter needs deterministic tests");
                if !r.contains(&true) {
                    break;
                }
                self.run(body, env);
            },
            Instr::Input { .. } => panic!("no inputs in the oracle interpreter"),
        }
    }
}

pub fn float_to_q(f: &FloatE) -> Option<Q> {
    f.value().map(|v: FloatValue| v.to_rational())
}

pub fn value_to_q(v: &Value) -> Option<Q> {
    match v {
        Value::Real(r) => r.as_rational().cloned(),
        Value::Float(f) => float_to_q(f),
    }
}

/// Choquet integral by the permutation formula
/// `Σ_i f(σ_i) · (ν(S_i) - ν(S_{i-1}))`, outcomes sorted by decreasing `f`.
pub fn choquet_permutation(f: &[Q], nu: &Capacity) -> Q {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[b].cmp(&f[a]));
    let mut set = 0u32;
    let mut prev = Q::zero();
    let mut total = Q::zero();
    for i in order {
        set |= 1 << i;
        let cur = nu.value(set).clone();
        total += &f[i] * (&cur - &prev);
        prev = cur;
    }
    total
}

/// Final environments of all runs, asserting that none ran out of fuel.
pub fn finals(instr: &Instr, env: &Env, sem: &Semantics) -> BTreeSet<Env> {
    let r = enumerate_exec(instr, env, sem, DEFAULT_FUEL).unwrap();
    assert!(!r.exhausted, "program did not terminate: {instr}");
    r.finals
}

/// Environments reachable at the head of `while t { body }` from `env`.
pub fn loop_head_envs(test: &Test, body: &Instr, env: &Env, sem: &Semantics) -> BTreeSet<Env> {
    let mut seen = BTreeSet::from([env.clone()]);
    let mut frontier = vec![env.clone()];
    while let Some(e) = frontier.pop() {
        if !eval_test(test, &e, sem).unwrap().contains(true) {
            continue;
        }
        for next in finals(body, &e, sem) {
            if seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    seen
}
