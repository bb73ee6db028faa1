//! Seeded random generation of programs, environments and continuations.
//!
//! Loops always have the shape `i = 0; while i < K { body; i = i + 1 }`
//! with a counter `i` that the body never assigns, so every generated
//! program terminates on every run.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::answer::{Ans, AnsKind, Continuation, ExtNonNeg};
use crate::eval::{Env, Semantics, Value};
use crate::numerics::{proj, RealE, Rational};
use crate::syntax::{BinOp, CmpOp, Expr, Instr, Label, Test};

pub const COUNTER: &str = "i";
const DATA_VARS: [&str; 3] = ["x", "y", "z"];

/// `{-2, -3/2, …, 3/2, 2}`.
pub fn grid() -> Vec<Rational> {
    (-4..=4).map(|n| Rational::new(n.into(), 2.into())).collect()
}

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    /// Data variables besides the loop counter, at most 3.
    pub data_vars: usize,
    pub max_stmts: usize,
    pub max_depth: usize,
    pub allow_loops: bool,
    /// No division, no err literals and no err in sampled environments,
    /// so every test yields a singleton.
    pub err_free: bool,
    pub max_loop_bound: u32,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig { data_vars: 3, max_stmts: 4, max_depth: 2, allow_loops: true, err_free: false, max_loop_bound: 3 }
    }
}

#[derive(Clone, Debug)]
pub struct FuzzProgram {
    pub instr: Instr,
    pub data_vars: Vec<String>,
    pub has_loop: bool,
}

impl FuzzProgram {
    /// Every variable a complete environment must bind.
    pub fn vars(&self) -> Vec<String> {
        let mut v = self.data_vars.clone();
        v.push(COUNTER.to_string());
        v
    }
}

pub struct Fuzzer {
    rng: ChaCha8Rng,
    pub cfg: FuzzConfig,
    next_label: Label,
}

impl Fuzzer {
    pub fn new(seed: u64, cfg: FuzzConfig) -> Fuzzer {
        assert!(cfg.data_vars >= 1 && cfg.data_vars <= DATA_VARS.len());
        Fuzzer { rng: ChaCha8Rng::seed_from_u64(seed), cfg, next_label: 1 }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn label(&mut self) -> Label {
        let l = self.next_label;
        self.next_label += 1;
        l
    }

    fn data_vars(&self) -> Vec<String> {
        DATA_VARS[..self.cfg.data_vars].iter().map(|s| s.to_string()).collect()
    }

    fn literal(&mut self) -> Expr {
        let g = grid();
        Expr::lit(g.choose(&mut self.rng).unwrap().clone())
    }

    pub fn expr(&mut self, depth: usize) -> Expr {
        let vars = self.data_vars();
        if depth == 0 || self.rng.gen_bool(0.4) {
            return match self.rng.gen_range(0..10) {
                0..=5 => Expr::var(vars.choose(&mut self.rng).unwrap().clone()),
                6 => Expr::var(COUNTER),
                _ => self.literal(),
            };
        }
        if self.rng.gen_bool(0.1) {
            return Expr::neg(self.expr(depth - 1));
        }
        let ops: &[BinOp] = if self.cfg.err_free {
            &[BinOp::Add, BinOp::Sub, BinOp::Mul]
        } else {
            &[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]
        };
        let op = *ops.choose(&mut self.rng).unwrap();
        Expr::bin(op, self.expr(depth - 1), self.expr(depth - 1))
    }

    pub fn test(&mut self) -> Test {
        let op = *[CmpOp::Le, CmpOp::Lt, CmpOp::Eq, CmpOp::Ne].choose(&mut self.rng).unwrap();
        let t = Test::cmp(op, self.expr(1), self.expr(1));
        if self.rng.gen_bool(0.15) {
            Test::not(t)
        } else {
            t
        }
    }

    fn assign(&mut self) -> Instr {
        let var = self.data_vars().choose(&mut self.rng).unwrap().clone();
        let label = self.label();
        let expr = if !self.cfg.err_free && self.rng.gen_bool(0.05) {
            Expr::div(Expr::int(1), Expr::int(0))
        } else {
            self.expr(2)
        };
        Instr::Assign { label, var, expr }
    }

    fn block(&mut self, depth: usize, in_loop: bool) -> Instr {
        let n = self.rng.gen_range(1..=self.cfg.max_stmts.max(1));
        let stmts = (0..n).map(|_| self.stmt(depth, in_loop)).collect();
        Instr::seq_all(stmts)
    }

    fn stmt(&mut self, depth: usize, in_loop: bool) -> Instr {
        let roll = self.rng.gen_range(0..10);
        match roll {
            0 => Instr::Skip { label: self.label() },
            1..=2 if depth > 0 => {
                let label = self.label();
                let test = self.test();
                let then_branch = Arc::new(self.block(depth - 1, in_loop));
                let else_branch = Arc::new(self.block(depth - 1, in_loop));
                Instr::If { label, test, then_branch, else_branch }
            }
            3 if depth > 0 && !in_loop && self.cfg.allow_loops => self.counted_loop(depth - 1),
            _ => self.assign(),
        }
    }

    /// `i = 0; while i < K { body; i = i + 1 }`.
    pub fn counted_loop(&mut self, depth: usize) -> Instr {
        let init = Instr::Assign { label: self.label(), var: COUNTER.into(), expr: Expr::int(0) };
        let l = self.bare_loop(depth);
        Instr::seq(init, l).normalize()
    }

    /// `while i < K { body; i = i + 1 }` without the initialization.
    pub fn bare_loop(&mut self, depth: usize) -> Instr {
        let bound = self.rng.gen_range(1..=self.cfg.max_loop_bound) as i64;
        let label = self.label();
        let test = Test::cmp(CmpOp::Lt, Expr::var(COUNTER), Expr::int(bound));
        let body = self.block(depth, true);
        let step = Instr::Assign {
            label: self.label(),
            var: COUNTER.into(),
            expr: Expr::add(Expr::var(COUNTER), Expr::int(1)),
        };
        Instr::While { label, test, body: Arc::new(Instr::seq(body, step).normalize()) }
    }

    pub fn program(&mut self) -> FuzzProgram {
        self.next_label = 1;
        let instr = self.block(self.cfg.max_depth, false).normalize();
        FuzzProgram { has_loop: instr.contains_loop(), instr, data_vars: self.data_vars() }
    }

    /// A program with at least one loop at top level.
    pub fn loop_program(&mut self) -> FuzzProgram {
        self.next_label = 1;
        let pre = self.stmt(0, false);
        let l = self.counted_loop(self.cfg.max_depth.saturating_sub(1));
        let instr = Instr::seq(pre, l).normalize();
        FuzzProgram { has_loop: true, instr, data_vars: self.data_vars() }
    }

    fn grid_value(&mut self, sem: &Semantics) -> Value {
        let q = grid().choose(&mut self.rng).unwrap().clone();
        sem.value_of(&RealE::Num(q))
    }

    /// A complete environment; data variables are err with probability
    /// 1/10 unless the configuration is err-free. The counter ranges over
    /// `0..=max_loop_bound`.
    pub fn env(&mut self, sem: &Semantics) -> Env {
        let mut pairs = Vec::new();
        for x in self.data_vars() {
            let v = if !self.cfg.err_free && self.rng.gen_bool(0.1) { sem.err() } else { self.grid_value(sem) };
            pairs.push((x, v));
        }
        let i = self.rng.gen_range(0..=self.cfg.max_loop_bound) as i64;
        pairs.push((COUNTER.to_string(), sem.value_of(&RealE::from_int(i))));
        Env::from_pairs(pairs).expect("one semantics")
    }

    pub fn envs(&mut self, sem: &Semantics, n: usize) -> Vec<Env> {
        (0..n).map(|_| self.env(sem)).collect()
    }

    fn ext_value(&mut self) -> ExtNonNeg {
        if self.rng.gen_bool(0.05) {
            ExtNonNeg::Infinity
        } else {
            ExtNonNeg::Finite(Rational::new(self.rng.gen_range(0..=8).into(), 2.into()))
        }
    }

    /// A random continuation: expression, indicator, constant, or a
    /// table over `table_envs`.
    pub fn continuation(&mut self, sem: &Semantics, kind: AnsKind, table_envs: &[Env]) -> Continuation {
        let roll = self.rng.gen_range(0..10);
        match kind {
            AnsKind::Bool => match roll {
                0 => Continuation::constant(Ans::Bool(self.rng.gen_bool(0.5))),
                1..=2 if !table_envs.is_empty() => {
                    let entries = table_envs.iter().map(|e| (e.clone(), Ans::Bool(self.rng.gen_bool(0.5)))).collect();
                    Continuation::table(entries, Ans::Bool(false)).unwrap()
                }
                _ => Continuation::indicator(self.test(), *sem, AnsKind::Bool),
            },
            AnsKind::ExtNonNeg => match roll {
                0 => Continuation::constant(Ans::Ext(self.ext_value())),
                1..=2 => Continuation::indicator(self.test(), *sem, AnsKind::ExtNonNeg),
                3..=4 if !table_envs.is_empty() => {
                    let entries: BTreeMap<Env, Ans> =
                        table_envs.iter().map(|e| (e.clone(), Ans::Ext(self.ext_value()))).collect();
                    let default = Ans::Ext(self.ext_value());
                    Continuation::table(entries, default).unwrap()
                }
                _ => {
                    let default = if self.rng.gen_bool(0.2) { ExtNonNeg::Infinity } else { ExtNonNeg::zero() };
                    Continuation::expr_with_default(self.expr(2), *sem, default)
                }
            },
        }
    }

    /// A continuation with values in `{0, 1/2, …, bound}` everywhere.
    pub fn bounded_continuation(&mut self, table_envs: &[Env], bound: u64) -> Continuation {
        let value = |rng: &mut ChaCha8Rng| {
            Ans::Ext(ExtNonNeg::Finite(Rational::new(rng.gen_range(0..=2 * bound).into(), 2.into())))
        };
        let entries = table_envs.iter().map(|e| (e.clone(), value(&mut self.rng))).collect();
        let default = value(&mut self.rng);
        Continuation::table(entries, default).unwrap()
    }

    pub fn scalar(&mut self) -> Rational {
        match self.rng.gen_range(0..5) {
            0 => Rational::from_integer(0.into()),
            _ => Rational::new(self.rng.gen_range(1..=12).into(), self.rng.gen_range(1..=4).into()),
        }
    }
}

/// Values of the grid that round-trip through a float format.
pub fn representable_grid(sem: &Semantics) -> Vec<Value> {
    grid()
        .into_iter()
        .map(|q| match sem {
            Semantics::Real => Value::Real(RealE::Num(q)),
            Semantics::Float(fmt) => Value::Float(proj(fmt, &RealE::Num(q))),
        })
        .collect()
}
