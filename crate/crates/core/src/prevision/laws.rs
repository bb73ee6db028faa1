use std::collections::HashMap;
use std::fmt::{self, Write as _};

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ParametricPrevision;
use crate::answer::{Ans, Continuation, EvalTrace, ExtNonNeg};
use crate::error::SemanticsError;
use crate::eval::Env;
use crate::numerics::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Law {
    Homogeneity,
    Monotonicity,
    Upper,
    Lower,
    Linear,
    ChainContinuity,
}

impl Law {
    pub const ALL: [Law; 6] =
        [Law::Homogeneity, Law::Monotonicity, Law::Upper, Law::Lower, Law::Linear, Law::ChainContinuity];

    pub fn name(self) -> &'static str {
        match self {
            Law::Homogeneity => "homogeneity",
            Law::Monotonicity => "monotonicity",
            Law::Upper => "upper",
            Law::Lower => "lower",
            Law::Linear => "linear",
            Law::ChainContinuity => "chain_continuity",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    /// `κ_i = (1 - 2^-i) · κ`.
    Scaled,
    /// `κ_i = min(κ, i)`; `exact_from` is an index from which `κ_i = κ`
    /// everywhere, when `κ` is known to be bounded.
    Truncated { exact_from: Option<usize> },
}

/// A finite ascending chain together with its supremum.
#[derive(Clone, Debug)]
pub struct Chain {
    pub members: Vec<Continuation>,
    pub lub: Continuation,
    pub kind: ChainKind,
}

impl Chain {
    pub fn scaled(k: &Continuation, len: usize) -> Result<Chain, SemanticsError> {
        let members = (0..=len)
            .map(|i| {
                let factor = Rational::one() - Rational::new(1.into(), num_bigint::BigInt::from(2).pow(i as u32));
                Continuation::scale(factor, k)
            })
            .collect::<Result<_, _>>()?;
        Ok(Chain { members, lub: k.clone(), kind: ChainKind::Scaled })
    }

    pub fn truncated(k: &Continuation, len: usize, bound: Option<u64>) -> Result<Chain, SemanticsError> {
        let members = (0..=len as u64)
            .map(|i| Continuation::truncate(k, ExtNonNeg::from_int(i)))
            .collect::<Result<_, _>>()?;
        let exact_from = bound.map(|b| b as usize).filter(|&b| b <= len);
        Ok(Chain { members, lub: k.clone(), kind: ChainKind::Truncated { exact_from } })
    }
}

/// What to sample: `tuples` random draws of `(κ₁, κ₂, α, ρ)` from the
/// given pools, plus every chain at every environment.
#[derive(Clone, Debug)]
pub struct SamplePlan {
    pub envs: Vec<Env>,
    pub conts: Vec<Continuation>,
    pub scalars: Vec<Rational>,
    pub chains: Vec<Chain>,
    pub tuples: usize,
    pub seed: u64,
}

impl SamplePlan {
    /// # Panics
    /// If any pool is empty.
    pub fn new(
        envs: Vec<Env>,
        conts: Vec<Continuation>,
        scalars: Vec<Rational>,
        chains: Vec<Chain>,
        tuples: usize,
        seed: u64,
    ) -> SamplePlan {
        assert!(!envs.is_empty() && !conts.is_empty() && !scalars.is_empty(), "sample pools must be non-empty");
        SamplePlan { envs, conts, scalars, chains, tuples, seed }
    }

    pub fn restricted_to(&self, env: &Env) -> SamplePlan {
        SamplePlan { envs: vec![env.clone()], ..self.clone() }
    }
}

/// A concrete violation. `lhs` and `rhs` are the two sides of the law
/// as evaluated; `replay` recomputes them.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub law: Law,
    pub k1: Continuation,
    pub k2: Option<Continuation>,
    pub alpha: Option<Rational>,
    pub chain: Option<Chain>,
    pub env: Env,
    pub lhs: ExtNonNeg,
    pub rhs: ExtNonNeg,
}

impl Counterexample {
    /// Re-evaluates and reports whether the violation persists.
    pub fn replay(&self, f: &ParametricPrevision) -> Result<bool, SemanticsError> {
        let at = |k: &Continuation| value(f, k, &self.env);
        Ok(match self.law {
            Law::Homogeneity => {
                let alpha = self.alpha.as_ref().expect("homogeneity carries α");
                at(&Continuation::scale(alpha.clone(), &self.k1)?)? != at(&self.k1)?.scale(alpha)
            }
            Law::Monotonicity => at(&self.k1)? > at(self.k2.as_ref().expect("pair"))?,
            Law::Upper | Law::Lower | Law::Linear => {
                let k2 = self.k2.as_ref().expect("pair");
                let lhs = at(&Continuation::add(&self.k1, k2)?)?;
                let rhs = at(&self.k1)?.add(&at(k2)?);
                violates(self.law, &lhs, &rhs)
            }
            Law::ChainContinuity => {
                let chain = self.chain.as_ref().expect("chain");
                check_chain(f, chain, &self.env)?.is_some()
            }
        })
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k1 = [{}]", self.k1)?;
        if let Some(k2) = &self.k2 {
            write!(f, ", k2 = [{k2}]")?;
        }
        if let Some(a) = &self.alpha {
            write!(f, ", alpha = {a}")?;
        }
        write!(f, ", env = {}, lhs = {}, rhs = {}", self.env, self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug)]
pub struct LawVerdict {
    pub law: Law,
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl LawVerdict {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct LawReport {
    pub verdicts: Vec<LawVerdict>,
}

impl LawReport {
    pub fn verdict(&self, law: Law) -> &LawVerdict {
        self.verdicts.iter().find(|v| v.law == law).expect("every law is checked")
    }

    pub fn holds(&self, law: Law) -> bool {
        self.verdict(law).holds()
    }

    /// Homogeneous, monotone and subadditive on every sample.
    pub fn is_upper(&self) -> bool {
        self.holds(Law::Homogeneity) && self.holds(Law::Monotonicity) && self.holds(Law::Upper)
    }

    pub fn is_linear(&self) -> bool {
        self.holds(Law::Homogeneity) && self.holds(Law::Monotonicity) && self.holds(Law::Linear)
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(LawVerdict::holds)
    }

    /// One `key = value` line per fact.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let name = v.law.name();
            let verdict = if v.holds() { "pass" } else { "fail" };
            let _ = writeln!(out, "law.{name}.verdict = {verdict}");
            let _ = writeln!(out, "law.{name}.samples = {}", v.checked);
            if let Some(cx) = &v.counterexample {
                let _ = writeln!(out, "law.{name}.counterexample.k1 = {}", cx.k1);
                if let Some(k2) = &cx.k2 {
                    let _ = writeln!(out, "law.{name}.counterexample.k2 = {k2}");
                }
                if let Some(a) = &cx.alpha {
                    let _ = writeln!(out, "law.{name}.counterexample.alpha = {a}");
                }
                let _ = writeln!(out, "law.{name}.counterexample.env = {}", cx.env);
                let _ = writeln!(out, "law.{name}.counterexample.lhs = {}", cx.lhs);
                let _ = writeln!(out, "law.{name}.counterexample.rhs = {}", cx.rhs);
            }
        }
        let _ = writeln!(out, "class.upper = {}", self.is_upper());
        let _ = writeln!(out, "class.linear = {}", self.is_linear());
        out
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.verdicts {
            let verdict = if v.holds() { "pass" } else { "FAIL" };
            writeln!(f, "{:<17} {verdict}  ({} samples)", v.law.name(), v.checked)?;
            if let Some(cx) = &v.counterexample {
                writeln!(f, "    counterexample: {cx}")?;
            }
        }
        write!(f, "passing verdicts hold on the samples; they are evidence, not proof")
    }
}

fn value(f: &ParametricPrevision, k: &Continuation, env: &Env) -> Result<ExtNonNeg, SemanticsError> {
    applied(&f.apply(k)?, env)
}

fn applied(fk: &Continuation, env: &Env) -> Result<ExtNonNeg, SemanticsError> {
    match fk.eval(env, &mut EvalTrace::default())? {
        Ans::Ext(x) => Ok(x),
        Ans::Bool(_) => unreachable!("previsions are checked to stay in [0, +inf]"),
    }
}

fn violates(law: Law, lhs: &ExtNonNeg, rhs: &ExtNonNeg) -> bool {
    match law {
        Law::Upper => lhs > rhs,
        Law::Lower => lhs < rhs,
        Law::Linear => lhs != rhs,
        _ => unreachable!(),
    }
}

/// The first violated condition of a chain at `env`, as `(lhs, rhs)`.
fn check_chain(
    f: &ParametricPrevision,
    chain: &Chain,
    env: &Env,
) -> Result<Option<(ExtNonNeg, ExtNonNeg)>, SemanticsError> {
    let top = value(f, &chain.lub, env)?;
    let values = chain.members.iter().map(|k| value(f, k, env)).collect::<Result<Vec<_>, _>>()?;
    for w in values.windows(2) {
        if w[0] > w[1] {
            return Ok(Some((w[0].clone(), w[1].clone())));
        }
    }
    if let Some(v) = values.iter().find(|v| **v > top) {
        return Ok(Some((v.clone(), top)));
    }
    let last = values.len() - 1;
    match chain.kind {
        ChainKind::Scaled => {
            // the remaining gap must shrink like the chain's own gap
            let eps = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(last as u32));
            let reach = values[last].add(&top.scale(&eps));
            if reach < top {
                return Ok(Some((reach, top)));
            }
        }
        ChainKind::Truncated { exact_from: Some(b) } if top != ExtNonNeg::Infinity => {
            if let Some(v) = values[b..].iter().find(|v| **v != top) {
                return Ok(Some((v.clone(), top)));
            }
        }
        ChainKind::Truncated { .. } => {}
    }
    Ok(None)
}

struct Recorder {
    checked: usize,
    counterexample: Option<Counterexample>,
}

impl Recorder {
    fn new() -> Self {
        Recorder { checked: 0, counterexample: None }
    }

    fn record(&mut self, violated: bool, cx: impl FnOnce() -> Counterexample) {
        self.checked += 1;
        if violated && self.counterexample.is_none() {
            self.counterexample = Some(cx());
        }
    }
}

/// Checks every law on the plan. Never fails on a violated law; errors
/// only come from evaluation itself.
pub fn check_laws(f: &ParametricPrevision, plan: &SamplePlan) -> Result<LawReport, SemanticsError> {
    let fk: Vec<Continuation> = plan.conts.iter().map(|k| f.apply(k)).collect::<Result<_, _>>()?;
    let mut memo: HashMap<(usize, usize), ExtNonNeg> = HashMap::new();
    let mut base = |i: usize, e: usize| -> Result<ExtNonNeg, SemanticsError> {
        if let Some(v) = memo.get(&(i, e)) {
            return Ok(v.clone());
        }
        let v = applied(&fk[i], &plan.envs[e])?;
        memo.insert((i, e), v.clone());
        Ok(v)
    };

    let mut rec: HashMap<Law, Recorder> = Law::ALL.iter().map(|&l| (l, Recorder::new())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    for _ in 0..plan.tuples {
        let i = rng.gen_range(0..plan.conts.len());
        let j = rng.gen_range(0..plan.conts.len());
        let a = rng.gen_range(0..plan.scalars.len());
        let e = rng.gen_range(0..plan.envs.len());
        let (k1, k2, alpha, env) = (&plan.conts[i], &plan.conts[j], &plan.scalars[a], &plan.envs[e]);
        let f1 = base(i, e)?;
        let f2 = base(j, e)?;

        let lhs = value(f, &Continuation::scale(alpha.clone(), k1)?, env)?;
        let rhs = f1.scale(alpha);
        rec.get_mut(&Law::Homogeneity).unwrap().record(lhs != rhs, || Counterexample {
            law: Law::Homogeneity,
            k1: k1.clone(),
            k2: None,
            alpha: Some(alpha.clone()),
            chain: None,
            env: env.clone(),
            lhs: lhs.clone(),
            rhs: rhs.clone(),
        });

        let sum = Continuation::add(k1, k2)?;
        let f_sum = value(f, &sum, env)?;
        let join = Continuation::join(k1, k2)?;
        let f_join = value(f, &join, env)?;
        // κ₁ is below both κ₁ ⊔ κ₂ and κ₁ + κ₂
        for (bigger, fb) in [(join, f_join), (sum, f_sum.clone())] {
            rec.get_mut(&Law::Monotonicity).unwrap().record(f1 > fb, || Counterexample {
                law: Law::Monotonicity,
                k1: k1.clone(),
                k2: Some(bigger.clone()),
                alpha: None,
                chain: None,
                env: env.clone(),
                lhs: f1.clone(),
                rhs: fb.clone(),
            });
        }

        let total = f1.add(&f2);
        for law in [Law::Upper, Law::Lower, Law::Linear] {
            rec.get_mut(&law).unwrap().record(violates(law, &f_sum, &total), || Counterexample {
                law,
                k1: k1.clone(),
                k2: Some(k2.clone()),
                alpha: None,
                chain: None,
                env: env.clone(),
                lhs: f_sum.clone(),
                rhs: total.clone(),
            });
        }
    }

    for chain in &plan.chains {
        for env in &plan.envs {
            let bad = check_chain(f, chain, env)?;
            rec.get_mut(&Law::ChainContinuity).unwrap().record(bad.is_some(), || {
                let (lhs, rhs) = bad.clone().unwrap();
                Counterexample {
                    law: Law::ChainContinuity,
                    k1: chain.lub.clone(),
                    k2: None,
                    alpha: None,
                    chain: Some(chain.clone()),
                    env: env.clone(),
                    lhs,
                    rhs,
                }
            });
        }
    }

    let verdicts = Law::ALL
        .iter()
        .map(|&law| {
            let r = rec.remove(&law).unwrap();
            LawVerdict { law, checked: r.checked, counterexample: r.counterexample }
        })
        .collect();
    Ok(LawReport { verdicts })
}
