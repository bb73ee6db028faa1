//! Continuation-passing weakest preconditions.
//!
//! `wp(P, κ)` is evaluated lazily per queried environment. Loops are
//! solved by first discovering the environments the loop head can reach
//! from the query (breadth first, at most `max_iter` iterations deep) and
//! then running Kleene iteration on that finite table, which gives the
//! exact iterate index at which the chain becomes constant.

mod oracle;

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub use oracle::{enumerate_exec, ExecResult, DEFAULT_FUEL};

use crate::answer::{Ans, AnsKind, Continuation, ContinuationFn, EvalTrace};
use crate::capacity::{choquet_ext, InputModel};
use crate::error::SemanticsError;
use crate::eval::{eval_expr, eval_test, Env, Semantics};
use crate::syntax::{Instr, Label, Test};

pub const DEFAULT_MAX_ITER: usize = 64;

/// Upper bound on the environments tabulated for one loop fixpoint.
const MAX_TABLE: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct WpConfig {
    semantics: Semantics,
    kind: AnsKind,
    max_iter: usize,
    universe: Option<Arc<Vec<Env>>>,
    inputs: Option<Arc<InputModel>>,
}

impl WpConfig {
    pub fn new(semantics: Semantics, kind: AnsKind) -> Self {
        WpConfig { semantics, kind, max_iter: DEFAULT_MAX_ITER, universe: None, inputs: None }
    }

    /// # Panics
    /// If `n` is zero.
    pub fn with_max_iter(mut self, n: usize) -> Self {
        assert!(n >= 1, "loop iteration budget must be at least 1");
        self.max_iter = n;
        self
    }

    pub fn with_universe(mut self, universe: Vec<Env>) -> Self {
        self.universe = Some(Arc::new(universe));
        self
    }

    pub fn with_inputs(mut self, inputs: InputModel) -> Self {
        self.inputs = Some(Arc::new(inputs));
        self
    }

    pub fn semantics(&self) -> &Semantics {
        &self.semantics
    }

    pub fn kind(&self) -> AnsKind {
        self.kind
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }

    pub fn universe(&self) -> Option<&[Env]> {
        self.universe.as_deref().map(Vec::as_slice)
    }

    pub fn inputs(&self) -> Option<&InputModel> {
        self.inputs.as_deref()
    }
}

/// How a loop fixpoint computation ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopStatus {
    /// `H^n(⊥) = H^{n+1}(⊥)` on every tabulated environment.
    Stabilized(usize),
    /// The chain had not become constant after the iteration budget.
    BudgetExhausted,
    /// No finite universe was given; status is reported per query.
    PerQuery,
}

impl LoopStatus {
    pub fn from_trace(trace: &EvalTrace) -> LoopStatus {
        if trace.budget_exhausted {
            LoopStatus::BudgetExhausted
        } else {
            LoopStatus::Stabilized(trace.max_iterations)
        }
    }
}

impl fmt::Display for LoopStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoopStatus::Stabilized(n) => write!(f, "stabilized({n})"),
            LoopStatus::BudgetExhausted => f.write_str("budget_exhausted"),
            LoopStatus::PerQuery => f.write_str("per_query"),
        }
    }
}

type Kont<'a> = &'a dyn Fn(&Env, &mut EvalTrace) -> Result<Ans, SemanticsError>;

fn join_opt(acc: Option<Ans>, a: Ans) -> Option<Ans> {
    Some(match acc {
        None => a,
        Some(b) => b.join(&a),
    })
}

struct Engine<'c> {
    cfg: &'c WpConfig,
}

impl Engine<'_> {
    fn run(&self, instr: &Instr, k: Kont, env: &Env, trace: &mut EvalTrace) -> Result<Ans, SemanticsError> {
        let sem = &self.cfg.semantics;
        match instr {
            Instr::Skip { .. } => k(env, trace),
            Instr::Assign { var, expr, .. } => {
                let v = eval_expr(sem, expr, env)?;
                k(&env.with(var, v), trace)
            }
            Instr::Seq(a, b) => self.run(a, &|e: &Env, t: &mut EvalTrace| self.run(b, k, e, t), env, trace),
            Instr::If { test, then_branch, else_branch, .. } => {
                let mut acc = None;
                for outcome in eval_test(test, env, sem)?.members() {
                    let branch = if outcome { then_branch } else { else_branch };
                    acc = join_opt(acc, self.run(branch, k, env, trace)?);
                }
                Ok(acc.expect("a test result is never empty"))
            }
            Instr::While { test, body, .. } => {
                let (table, _) = self.solve_loop(test, body, k, std::slice::from_ref(env), trace)?;
                Ok(table[env].clone())
            }
            Instr::Input { label, .. } => self.input(*label, k, env, trace),
        }
    }

    fn input(&self, label: Label, k: Kont, env: &Env, trace: &mut EvalTrace) -> Result<Ans, SemanticsError> {
        let model = self.cfg.inputs().ok_or(SemanticsError::NoInputModel(label))?;
        let (space, nu) = model.site(label).ok_or(SemanticsError::NoModelForSite(label))?;
        let mut values = Vec::with_capacity(space.len());
        for i in 0..space.len() {
            match k(&space.assign(i, env), trace)? {
                Ans::Ext(x) => values.push(x),
                Ans::Bool(_) => {
                    return Err(SemanticsError::DomainMismatch { expected: AnsKind::ExtNonNeg, found: AnsKind::Bool })
                }
            }
        }
        Ok(Ans::Ext(choquet_ext(&values, nu)?))
    }

    /// One application of the loop functional at `env`, with `next`
    /// standing for the previous iterate applied to `κ`.
    fn step(
        &self,
        test: &Test,
        body: &Instr,
        k: Kont,
        next: Kont,
        env: &Env,
        trace: &mut EvalTrace,
    ) -> Result<Ans, SemanticsError> {
        let mut acc = None;
        for outcome in eval_test(test, env, &self.cfg.semantics)?.members() {
            let a = if outcome { self.run(body, next, env, trace)? } else { k(env, trace)? };
            acc = join_opt(acc, a);
        }
        Ok(acc.expect("a test result is never empty"))
    }

    /// Tabulates the loop fixpoint on every environment reachable at the
    /// loop head from `seeds`.
    fn solve_loop(
        &self,
        test: &Test,
        body: &Instr,
        k: Kont,
        seeds: &[Env],
        trace: &mut EvalTrace,
    ) -> Result<(BTreeMap<Env, Ans>, LoopStatus), SemanticsError> {
        let bottom = Ans::bottom(self.cfg.kind);
        let n = self.cfg.max_iter;

        // Which environments a step queries does not depend on the
        // answers it receives, so discovery can run against ⊥.
        let mut keys: BTreeSet<Env> = seeds.iter().cloned().collect();
        let mut frontier: Vec<Env> = keys.iter().cloned().collect();
        let mut closed = false;
        for _ in 0..=n {
            if frontier.is_empty() {
                closed = true;
                break;
            }
            let found = RefCell::new(BTreeSet::new());
            let record = |e: &Env, _: &mut EvalTrace| {
                found.borrow_mut().insert(e.clone());
                Ok(bottom.clone())
            };
            let ignore = |_: &Env, _: &mut EvalTrace| Ok(bottom.clone());
            for e in &frontier {
                self.step(test, body, &ignore, &record, e, &mut EvalTrace::default())?;
            }
            frontier = found.into_inner().into_iter().filter(|e| !keys.contains(e)).collect();
            keys.extend(frontier.iter().cloned());
            if keys.len() > MAX_TABLE {
                break;
            }
        }

        let mut exits = BTreeMap::new();
        let mut table: BTreeMap<Env, Ans> = keys.iter().map(|e| (e.clone(), bottom.clone())).collect();
        let mut status = LoopStatus::BudgetExhausted;
        for round in 0..n {
            let prev = &table;
            let lookup = |e: &Env, _: &mut EvalTrace| Ok(prev.get(e).cloned().unwrap_or_else(|| bottom.clone()));
            let mut next = BTreeMap::new();
            for e in &keys {
                let cached = RefCell::new(&mut exits);
                let exit = |e: &Env, t: &mut EvalTrace| -> Result<Ans, SemanticsError> {
                    if let Some(a) = cached.borrow().get(e) {
                        return Ok(Ans::clone(a));
                    }
                    let a = k(e, t)?;
                    cached.borrow_mut().insert(e.clone(), a.clone());
                    Ok(a)
                };
                next.insert(e.clone(), self.step(test, body, &exit, &lookup, e, trace)?);
            }
            if next == table {
                // table holds H^round(⊥), and H^{round+1}(⊥) equals it
                status = LoopStatus::Stabilized(round);
                break;
            }
            table = next;
        }
        match status {
            LoopStatus::Stabilized(r) if closed => trace.max_iterations = trace.max_iterations.max(r),
            _ => trace.budget_exhausted = true,
        }
        if !closed {
            status = LoopStatus::BudgetExhausted;
        }
        Ok((table, status))
    }
}

fn check_sites(instr: &Instr, cfg: &WpConfig) -> Result<(), SemanticsError> {
    let mut result = Ok(());
    instr.visit(&mut |i| {
        if result.is_err() {
            return;
        }
        if let Instr::Input { label, targets } = i {
            result = check_site(*label, targets, cfg);
        }
    });
    result
}

fn check_site(label: Label, targets: &[String], cfg: &WpConfig) -> Result<(), SemanticsError> {
    if cfg.kind == AnsKind::Bool {
        return Err(SemanticsError::DomainMismatch { expected: AnsKind::ExtNonNeg, found: AnsKind::Bool });
    }
    let model = cfg.inputs().ok_or(SemanticsError::NoInputModel(label))?;
    let (space, _) = model.site(label).ok_or(SemanticsError::NoModelForSite(label))?;
    let want: BTreeSet<&String> = targets.iter().collect();
    let have: BTreeSet<&String> = space.vars().iter().collect();
    if want != have {
        return Err(SemanticsError::InputMismatch {
            label,
            message: format!("outcomes bind {:?} but the instruction reads {:?}", space.vars(), targets),
        });
    }
    for i in 0..space.len() {
        if let Some(v) = space.outcome(i).iter().find(|v| !cfg.semantics.admits(v)) {
            return Err(SemanticsError::InputMismatch {
                label,
                message: format!("outcome value {v} is not a {} value", cfg.semantics),
            });
        }
    }
    Ok(())
}

fn check_kind(k: &Continuation, cfg: &WpConfig) -> Result<(), SemanticsError> {
    k.require(cfg.kind)
}

struct WpCont {
    instr: Arc<Instr>,
    k: Continuation,
    cfg: WpConfig,
}

impl ContinuationFn for WpCont {
    fn kind(&self) -> AnsKind {
        self.cfg.kind
    }

    fn eval(&self, env: &Env, trace: &mut EvalTrace) -> Result<Ans, SemanticsError> {
        let k = |e: &Env, t: &mut EvalTrace| self.k.eval(e, t);
        Engine { cfg: &self.cfg }.run(&self.instr, &k, env, trace)
    }

    fn describe(&self) -> String {
        format!("wp({}, {})", self.instr, self.k)
    }
}

/// `wp(instr)(κ)`, checked up front for domain and input-model errors.
pub fn wp(instr: &Instr, k: &Continuation, cfg: &WpConfig) -> Result<Continuation, SemanticsError> {
    check_kind(k, cfg)?;
    check_sites(instr, cfg)?;
    Ok(Continuation::custom(Arc::new(WpCont { instr: Arc::new(instr.clone()), k: k.clone(), cfg: cfg.clone() })))
}

/// Evaluates `κ(ρ)` and summarizes the loop fixpoints it needed.
pub fn evaluate(k: &Continuation, env: &Env) -> Result<(Ans, LoopStatus), SemanticsError> {
    let mut trace = EvalTrace::default();
    let a = k.eval(env, &mut trace)?;
    Ok((a, LoopStatus::from_trace(&trace)))
}

fn as_loop(instr: &Instr) -> Result<(&Test, &Arc<Instr>), SemanticsError> {
    match instr {
        Instr::While { test, body, .. } => Ok((test, body)),
        other => panic!("expected a while loop, found `{other}`"),
    }
}

/// The fixpoint of a `while` loop. With a finite universe the whole table
/// is computed eagerly and its global status reported; otherwise the
/// continuation is lazy and the status is `PerQuery`.
///
/// # Panics
/// If `instr` is not a `while` instruction.
pub fn wp_fixpoint(
    instr: &Instr,
    k: &Continuation,
    cfg: &WpConfig,
) -> Result<(Continuation, LoopStatus), SemanticsError> {
    let (test, body) = as_loop(instr)?;
    let lazy = wp(instr, k, cfg)?;
    let Some(universe) = cfg.universe() else {
        return Ok((lazy, LoopStatus::PerQuery));
    };
    let kf = |e: &Env, t: &mut EvalTrace| k.eval(e, t);
    let mut trace = EvalTrace::default();
    let (table, status) = Engine { cfg }.solve_loop(test, body, &kf, universe, &mut trace)?;
    let tabulated = Arc::new(Tabulated { table, fallback: lazy });
    Ok((Continuation::custom(tabulated), status))
}

/// A precomputed table that defers to a lazy continuation off-table.
struct Tabulated {
    table: BTreeMap<Env, Ans>,
    fallback: Continuation,
}

impl ContinuationFn for Tabulated {
    fn kind(&self) -> AnsKind {
        self.fallback.kind()
    }

    fn eval(&self, env: &Env, trace: &mut EvalTrace) -> Result<Ans, SemanticsError> {
        match self.table.get(env) {
            Some(a) => Ok(a.clone()),
            None => self.fallback.eval(env, trace),
        }
    }

    fn describe(&self) -> String {
        format!("tabulated({} entries) over {}", self.table.len(), self.fallback)
    }
}

/// The loop functional `H_t` of `while t { body }`: given `φ(κ)` it
/// yields `H(φ)(κ) = ρ ↦ wp(body)(φ(κ))(ρ)` where `t` may hold, joined with
/// `κ(ρ)` where `t` may fail.
#[derive(Clone)]
pub struct LoopFunctional {
    test: Test,
    body: Arc<Instr>,
    cfg: WpConfig,
}

impl LoopFunctional {
    /// # Panics
    /// If `instr` is not a `while` instruction.
    pub fn new(instr: &Instr, cfg: &WpConfig) -> Result<LoopFunctional, SemanticsError> {
        let (test, body) = as_loop(instr)?;
        check_sites(body, cfg)?;
        Ok(LoopFunctional { test: test.clone(), body: body.clone(), cfg: cfg.clone() })
    }

    /// `H(φ)(κ)` from `φ(κ)` and `κ`.
    pub fn apply(&self, phi_k: &Continuation, k: &Continuation) -> Result<Continuation, SemanticsError> {
        check_kind(phi_k, &self.cfg)?;
        check_kind(k, &self.cfg)?;
        Ok(Continuation::custom(Arc::new(Applied { h: self.clone(), phi_k: phi_k.clone(), k: k.clone() })))
    }

    /// `H^n(⊥)(κ)`, where `⊥` is the constant-bottom functional.
    pub fn iterate(&self, n: usize, k: &Continuation) -> Result<Continuation, SemanticsError> {
        let mut phi = Continuation::bottom(self.cfg.kind);
        for _ in 0..n {
            phi = self.apply(&phi, k)?;
        }
        Ok(phi)
    }
}

struct Applied {
    h: LoopFunctional,
    phi_k: Continuation,
    k: Continuation,
}

impl ContinuationFn for Applied {
    fn kind(&self) -> AnsKind {
        self.h.cfg.kind
    }

    fn eval(&self, env: &Env, trace: &mut EvalTrace) -> Result<Ans, SemanticsError> {
        let k = |e: &Env, t: &mut EvalTrace| self.k.eval(e, t);
        let next = |e: &Env, t: &mut EvalTrace| self.phi_k.eval(e, t);
        Engine { cfg: &self.h.cfg }.step(&self.h.test, &self.h.body, &k, &next, env, trace)
    }

    fn describe(&self) -> String {
        format!("H[{}]({})", self.h.test, self.phi_k)
    }
}

/// `H^n(⊥)(κ)(ρ)` for `n = 0..=up_to`.
pub fn kleene_chain(
    instr: &Instr,
    k: &Continuation,
    env: &Env,
    up_to: usize,
    cfg: &WpConfig,
) -> Result<Vec<Ans>, SemanticsError> {
    let h = LoopFunctional::new(instr, cfg)?;
    let mut phi = Continuation::bottom(cfg.kind);
    let mut out = vec![phi.eval(env, &mut EvalTrace::default())?];
    for _ in 0..up_to {
        phi = h.apply(&phi, k)?;
        out.push(phi.eval(env, &mut EvalTrace::default())?);
    }
    Ok(out)
}
