//! Finite capacities, Choquet integration and the semantics of `input`.

mod file;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use file::{parse_capacity_file, CapacityFile};

use crate::answer::{Ans, Continuation, EvalTrace, ExtNonNeg};
use crate::error::SemanticsError;
use crate::eval::{Env, Value};
use crate::numerics::Rational;
use crate::syntax::Label;

/// Largest outcome space a tabulated capacity supports.
pub const MAX_OUTCOMES: usize = 20;

/// A subset of outcomes, bit `i` standing for outcome `i`.
pub type Subset = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CapacityError {
    #[error("outcome space has {0} outcomes, more than the supported {MAX_OUTCOMES}")]
    SpaceTooLarge(usize),
    #[error("outcome space is empty")]
    EmptySpace,
    #[error("outcome {0} is listed twice")]
    DuplicateOutcome(usize),
    #[error("outcome {index} has {found} values for {expected} variables")]
    OutcomeArity { index: usize, expected: usize, found: usize },
    #[error("capacity of the empty set must be 0")]
    NonZeroEmpty,
    #[error("capacity value for subset {0:#b} is negative")]
    NegativeValue(Subset),
    #[error("table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("Möbius mass on subset {0:#b} is invalid")]
    InvalidMass(Subset),
    #[error("Choquet integration requires a monotone capacity")]
    NonMonotoneCapacity,
    #[error("function has {found} values but the space has {expected} outcomes")]
    ArityMismatch { expected: usize, found: usize },
    #[error("Choquet integrand must be non-negative")]
    NegativeIntegrand,
    #[error("capacity file, line {line}: {message}")]
    File { line: usize, message: String },
}

/// The outcomes of an `input`: assignments to its target variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeSpace {
    vars: Vec<String>,
    outcomes: Vec<Vec<Value>>,
}

impl OutcomeSpace {
    pub fn new(vars: Vec<String>, outcomes: Vec<Vec<Value>>) -> Result<Self, CapacityError> {
        if outcomes.is_empty() || vars.is_empty() {
            return Err(CapacityError::EmptySpace);
        }
        if outcomes.len() > MAX_OUTCOMES {
            return Err(CapacityError::SpaceTooLarge(outcomes.len()));
        }
        for (i, o) in outcomes.iter().enumerate() {
            if o.len() != vars.len() {
                return Err(CapacityError::OutcomeArity { index: i, expected: vars.len(), found: o.len() });
            }
            if outcomes[..i].contains(o) {
                return Err(CapacityError::DuplicateOutcome(i));
            }
        }
        Ok(OutcomeSpace { vars, outcomes })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcome(&self, i: usize) -> &[Value] {
        &self.outcomes[i]
    }

    /// `ρ` with the input variables set to outcome `i`.
    pub fn assign(&self, i: usize, env: &Env) -> Env {
        self.vars
            .iter()
            .zip(&self.outcomes[i])
            .fold(env.clone(), |acc, (x, v)| acc.with(x, v.clone()))
    }
}

/// Properties of a capacity, each verified exhaustively.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct CapacityFlags {
    pub monotone: bool,
    pub convex: bool,
    pub concave: bool,
    pub normalized: bool,
}

impl fmt::Display for CapacityFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.monotone, "monotone"),
            (self.convex, "convex"),
            (self.concave, "concave"),
            (self.normalized, "normalized"),
        ]
        .iter()
        .filter(|p| p.0)
        .map(|p| p.1)
        .collect();
        f.write_str(&names.join(","))
    }
}

/// A set function on the subsets of `{0, …, n-1}` with `ν(∅) = 0` and
/// `ν >= 0`, stored as a full table indexed by bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Capacity {
    n: usize,
    table: Vec<Rational>,
    flags: CapacityFlags,
}

impl Capacity {
    pub fn from_table(n: usize, table: Vec<Rational>) -> Result<Capacity, CapacityError> {
        if n > MAX_OUTCOMES {
            return Err(CapacityError::SpaceTooLarge(n));
        }
        if n == 0 {
            return Err(CapacityError::EmptySpace);
        }
        if table.len() != 1 << n {
            return Err(CapacityError::TableSize { expected: 1 << n, found: table.len() });
        }
        if !table[0].is_zero() {
            return Err(CapacityError::NonZeroEmpty);
        }
        if let Some(i) = table.iter().position(|v| v.is_negative()) {
            return Err(CapacityError::NegativeValue(i as Subset));
        }
        let mut cap = Capacity { n, table, flags: CapacityFlags::default() };
        cap.flags = classify_table(n, &cap.table);
        Ok(cap)
    }

    /// The additive capacity `ν(A) = Σ_{i∈A} p_i`.
    pub fn probability(weights: &[Rational]) -> Result<Capacity, CapacityError> {
        let n = weights.len();
        check_size(n)?;
        if let Some(i) = weights.iter().position(|w| w.is_negative()) {
            return Err(CapacityError::InvalidMass(1 << i));
        }
        let table = (0..1usize << n)
            .map(|a| (0..n).filter(|i| a >> i & 1 == 1).map(|i| weights[i].clone()).sum())
            .collect();
        Capacity::from_table(n, table)
    }

    /// The belief function `bel(A) = Σ_{∅≠B⊆A} m(B)` of non-negative
    /// Möbius masses.
    pub fn belief(n: usize, masses: &[(Subset, Rational)]) -> Result<Capacity, CapacityError> {
        check_size(n)?;
        let mut m = vec![Rational::zero(); 1 << n];
        for (b, w) in masses {
            if *b == 0 || (*b as usize) >= (1 << n) || w.is_negative() {
                return Err(CapacityError::InvalidMass(*b));
            }
            m[*b as usize] += w;
        }
        // zeta transform over subsets
        for i in 0..n {
            for a in 0..1usize << n {
                if a >> i & 1 == 1 {
                    let below = m[a ^ (1 << i)].clone();
                    m[a] += below;
                }
            }
        }
        Capacity::from_table(n, m)
    }

    /// The dual `pl(A) = bel(Ω) - bel(Ω \ A)`.
    pub fn dual(&self) -> Capacity {
        let full = (1usize << self.n) - 1;
        let total = self.table[full].clone();
        let table = (0..=full).map(|a| &total - &self.table[full ^ a]).collect();
        Capacity::from_table(self.n, table).expect("dual of a monotone capacity is a capacity")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn full(&self) -> Subset {
        ((1u64 << self.n) - 1) as Subset
    }

    pub fn value(&self, a: Subset) -> &Rational {
        &self.table[a as usize]
    }

    pub fn flags(&self) -> CapacityFlags {
        self.flags
    }
}

fn check_size(n: usize) -> Result<(), CapacityError> {
    if n == 0 {
        Err(CapacityError::EmptySpace)
    } else if n > MAX_OUTCOMES {
        Err(CapacityError::SpaceTooLarge(n))
    } else {
        Ok(())
    }
}

/// Monotonicity, supermodularity and submodularity are each equivalent to
/// their one- and two-element local forms, which is what is checked here.
fn classify_table(n: usize, t: &[Rational]) -> CapacityFlags {
    let mut flags = CapacityFlags {
        monotone: true,
        convex: true,
        concave: true,
        normalized: t[(1 << n) - 1].is_one(),
    };
    for a in 0..1usize << n {
        for i in 0..n {
            if a >> i & 1 == 1 {
                continue;
            }
            let ai = a | 1 << i;
            if t[a] > t[ai] {
                flags.monotone = false;
            }
            for j in i + 1..n {
                if a >> j & 1 == 1 {
                    continue;
                }
                let aj = a | 1 << j;
                let lhs = &t[ai | aj] + &t[a];
                let rhs = &t[ai] + &t[aj];
                if lhs < rhs {
                    flags.convex = false;
                }
                if lhs > rhs {
                    flags.concave = false;
                }
            }
        }
    }
    flags
}

/// Re-derives the flags of `ν`.
pub fn capacity_classify(nu: &Capacity) -> Result<CapacityFlags, CapacityError> {
    check_size(nu.n)?;
    Ok(classify_table(nu.n, &nu.table))
}

/// Choquet integral of a non-negative function on the outcomes:
/// `Σ_i (a_i - a_{i+1}) · ν({f >= a_i})` over the distinct values
/// `a_1 > … > a_m` of `f`, with `a_{m+1} = 0`.
pub fn choquet(f: &[Rational], nu: &Capacity) -> Result<Rational, CapacityError> {
    if f.iter().any(|v| v.is_negative()) {
        return Err(CapacityError::NegativeIntegrand);
    }
    let ext: Vec<ExtNonNeg> = f.iter().cloned().map(ExtNonNeg::Finite).collect();
    match choquet_ext(&ext, nu)? {
        ExtNonNeg::Finite(q) => Ok(q),
        ExtNonNeg::Infinity => unreachable!("finite integrand"),
    }
}

/// Choquet integral of a `[0, +∞]`-valued function.
pub fn choquet_ext(f: &[ExtNonNeg], nu: &Capacity) -> Result<ExtNonNeg, CapacityError> {
    if f.len() != nu.n {
        return Err(CapacityError::ArityMismatch { expected: nu.n, found: f.len() });
    }
    if !nu.flags.monotone {
        return Err(CapacityError::NonMonotoneCapacity);
    }
    let mut levels: Vec<&ExtNonNeg> = f.iter().collect();
    levels.sort_by(|a, b| b.cmp(a));
    levels.dedup();
    let zero = ExtNonNeg::zero();
    let mut total = ExtNonNeg::zero();
    for (k, level) in levels.iter().enumerate() {
        let next = levels.get(k + 1).copied().unwrap_or(&zero);
        let upper: Subset = f
            .iter()
            .enumerate()
            .filter(|(_, v)| v >= level)
            .fold(0, |acc, (i, _)| acc | 1 << i);
        let weight = ExtNonNeg::Finite(nu.value(upper).clone());
        total = total.add(&level.saturating_sub(next).mul(&weight));
    }
    Ok(total)
}

/// `ν̄(C) = ν({o | ρ[V_I ↦ o] ∈ C})`: the capacity of a set of
/// environments, determined entirely by the input variables.
pub fn extend_capacity(
    nu: &Capacity,
    space: &OutcomeSpace,
    env: &Env,
    set: &dyn Fn(&Env) -> bool,
) -> Rational {
    let preimage = (0..space.len())
        .filter(|&i| set(&space.assign(i, env)))
        .fold(0 as Subset, |acc, i| acc | 1 << i);
    nu.value(preimage).clone()
}

/// Capacities attached to the `input` sites of a program.
#[derive(Clone, Debug, Default)]
pub struct InputModel {
    sites: BTreeMap<Label, (OutcomeSpace, Capacity)>,
}

impl InputModel {
    pub fn new() -> Self {
        InputModel::default()
    }

    pub fn with_site(mut self, label: Label, space: OutcomeSpace, nu: Capacity) -> Result<Self, CapacityError> {
        if space.len() != nu.len() {
            return Err(CapacityError::ArityMismatch { expected: space.len(), found: nu.len() });
        }
        self.sites.insert(label, (space, nu));
        Ok(self)
    }

    pub fn site(&self, label: Label) -> Option<&(OutcomeSpace, Capacity)> {
        self.sites.get(&label)
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.sites.keys().copied()
    }
}

/// `wp(input)(κ)(ρ)`: the Choquet integral of `o ↦ κ(ρ[V_I ↦ o])`.
pub fn wp_input(
    k: &Continuation,
    model: &InputModel,
    site: Label,
    env: &Env,
) -> Result<Ans, SemanticsError> {
    wp_input_traced(k, model, site, env, &mut EvalTrace::default())
}

pub(crate) fn wp_input_traced(
    k: &Continuation,
    model: &InputModel,
    site: Label,
    env: &Env,
    trace: &mut EvalTrace,
) -> Result<Ans, SemanticsError> {
    k.require(crate::answer::AnsKind::ExtNonNeg)?;
    let (space, nu) = model.site(site).ok_or(SemanticsError::NoModelForSite(site))?;
    let mut values = Vec::with_capacity(space.len());
    for i in 0..space.len() {
        match k.eval(&space.assign(i, env), trace)? {
            Ans::Ext(x) => values.push(x),
            Ans::Bool(_) => unreachable!("domain checked"),
        }
    }
    Ok(Ans::Ext(choquet_ext(&values, nu)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::answer::AnsKind;
    use crate::eval::Semantics;
    use crate::numerics::RealE;
    use crate::syntax::parse_test;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn two_point() -> Capacity {
        Capacity::from_table(2, vec![q(0, 1), q(1, 5), q(3, 10), q(1, 1)]).unwrap()
    }

    fn space_x(values: &[i64]) -> OutcomeSpace {
        OutcomeSpace::new(
            vec!["x".into()],
            values.iter().map(|v| vec![Value::Real(RealE::from_int(*v))]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn classify_two_point_table() {
        let flags = capacity_classify(&two_point()).unwrap();
        assert_eq!(flags, CapacityFlags { monotone: true, convex: true, concave: false, normalized: true });
    }

    #[test]
    fn probability_is_additive() {
        let p = Capacity::probability(&[q(1, 2), q(1, 2)]).unwrap();
        let flags = p.flags();
        assert!(flags.monotone && flags.convex && flags.concave && flags.normalized);
        let p = Capacity::probability(&[q(1, 2), q(1, 4)]).unwrap();
        assert!(!p.flags().normalized);
    }

    #[test]
    fn unanimity_belief() {
        let b = Capacity::belief(2, &[(0b11, q(1, 1))]).unwrap();
        assert_eq!(b.value(0b01), &q(0, 1));
        assert_eq!(b.value(0b10), &q(0, 1));
        assert_eq!(b.value(0b11), &q(1, 1));
        let flags = b.flags();
        assert!(flags.convex && !flags.concave);
    }

    #[test]
    fn choquet_examples() {
        let nu = two_point();
        assert_eq!(choquet(&[q(2, 1), q(1, 1)], &nu).unwrap(), q(6, 5));
        assert_eq!(choquet(&[q(1, 1), q(0, 1)], &nu).unwrap(), q(1, 5));
        let p = Capacity::probability(&[q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(choquet(&[q(2, 1), q(1, 1)], &p).unwrap(), q(3, 2));
    }

    #[test]
    fn choquet_with_infinite_values() {
        let nu = Capacity::belief(2, &[(0b11, q(1, 1))]).unwrap();
        // the level set {f = ∞} has capacity 0, so ∞ contributes nothing
        let f = [ExtNonNeg::Infinity, ExtNonNeg::from_int(3)];
        assert_eq!(choquet_ext(&f, &nu).unwrap(), ExtNonNeg::from_int(3));
        let p = Capacity::probability(&[q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(choquet_ext(&f, &p).unwrap(), ExtNonNeg::Infinity);
    }

    #[test]
    fn choquet_rejects_bad_input() {
        let bad = Capacity::from_table(2, vec![q(0, 1), q(1, 1), q(0, 1), q(1, 2)]).unwrap();
        assert!(!bad.flags().monotone);
        assert_eq!(choquet(&[q(1, 1), q(1, 1)], &bad), Err(CapacityError::NonMonotoneCapacity));
        assert!(matches!(choquet(&[q(1, 1)], &two_point()), Err(CapacityError::ArityMismatch { .. })));
        assert_eq!(choquet(&[q(-1, 1), q(1, 1)], &two_point()), Err(CapacityError::NegativeIntegrand));
    }

    #[test]
    fn table_validation() {
        assert_eq!(Capacity::from_table(1, vec![q(1, 1), q(1, 1)]), Err(CapacityError::NonZeroEmpty));
        assert_eq!(Capacity::from_table(1, vec![q(0, 1), q(-1, 1)]), Err(CapacityError::NegativeValue(1)));
        assert!(matches!(Capacity::from_table(2, vec![q(0, 1)]), Err(CapacityError::TableSize { .. })));
        assert_eq!(Capacity::belief(2, &[(0, q(1, 1))]), Err(CapacityError::InvalidMass(0)));
        assert_eq!(Capacity::probability(&[]), Err(CapacityError::EmptySpace));
    }

    #[test]
    fn plausibility_is_the_dual() {
        let b = Capacity::belief(3, &[(0b011, q(1, 2)), (0b100, q(1, 3)), (0b111, q(1, 6))]).unwrap();
        let pl = b.dual();
        for a in 0..8u32 {
            assert_eq!(pl.value(a), &(b.value(0b111) - b.value(0b111 ^ a)));
        }
        assert!(pl.flags().concave);
    }

    #[test]
    fn extension_formula() {
        let nu = Capacity::from_table(2, vec![q(0, 1), q(1, 5), q(3, 10), q(1, 1)]).unwrap();
        let space = space_x(&[1, 2]);
        let env = Env::from_pairs([
            ("x".to_string(), Value::Real(RealE::from_int(9))),
            ("y".to_string(), Value::Real(RealE::from_int(4))),
        ])
        .unwrap();
        let y4 = Value::Real(RealE::from_int(4));
        let x1 = Value::Real(RealE::from_int(1));
        let c = |e: &Env| e.get("x") == Some(&x1) && e.get("y") == Some(&y4);
        assert_eq!(extend_capacity(&nu, &space, &env, &c), q(1, 5));
        let excludes = |e: &Env| e.get("y") != Some(&y4);
        assert_eq!(extend_capacity(&nu, &space, &env, &excludes), q(0, 1));
        assert_eq!(extend_capacity(&nu, &space, &env, &|_| true), q(1, 1));
    }

    #[test]
    fn wp_input_examples() {
        let space = space_x(&[1, 2]);
        let sem = Semantics::Real;
        let ind = Continuation::indicator(parse_test("x == 1").unwrap(), sem, AnsKind::ExtNonNeg);
        let nu = two_point();
        let model = InputModel::new().with_site(5, space.clone(), nu).unwrap();
        let env = Env::from_pairs([("x".to_string(), Value::Real(RealE::zero()))]).unwrap();
        assert_eq!(wp_input(&ind, &model, 5, &env).unwrap(), Ans::Ext(ExtNonNeg::Finite(q(1, 5))));
        assert_eq!(wp_input(&ind, &model, 6, &env), Err(SemanticsError::NoModelForSite(6)));

        let x = Continuation::expr(crate::syntax::parse_expr("x").unwrap(), sem);
        let unanimity = Capacity::belief(2, &[(0b11, q(1, 1))]).unwrap();
        let model = InputModel::new().with_site(5, space, unanimity).unwrap();
        assert_eq!(wp_input(&x, &model, 5, &env).unwrap(), Ans::Ext(ExtNonNeg::from_int(1)));
    }
}
