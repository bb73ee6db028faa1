//! Seeded sample pools for checking the laws of a program's prevision.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wpwb::answer::{Ans, AnsKind, Continuation, ExtNonNeg};
use wpwb::eval::{Env, Semantics};
use wpwb::fuzz::{grid, representable_grid};
use wpwb::numerics::Rational;
use wpwb::prevision::{Chain, SamplePlan};
use wpwb::syntax::{CmpOp, Expr, Test};

pub struct Counts {
    pub envs: usize,
    pub conts: usize,
    pub tuples: usize,
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn ext_value(rng: &mut ChaCha8Rng) -> ExtNonNeg {
    if rng.gen_bool(0.05) {
        ExtNonNeg::Infinity
    } else {
        ExtNonNeg::Finite(q(rng.gen_range(0..=8), 2))
    }
}

/// Environments over `vars` with grid values, err with probability 1/10.
/// When `fixed` is non-empty those environments are used instead.
pub fn plan(
    vars: &[String],
    sem: Semantics,
    counts: &Counts,
    seed: u64,
    fixed: Vec<Env>,
    extra: Vec<Continuation>,
) -> SamplePlan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = representable_grid(&sem);
    let envs: Vec<Env> = if !fixed.is_empty() {
        fixed
    } else {
        (0..counts.envs.max(1))
            .map(|_| {
                let pairs = vars.iter().map(|x| {
                    let v = if rng.gen_bool(0.1) { sem.err() } else { values.choose(&mut rng).unwrap().clone() };
                    (x.clone(), v)
                });
                Env::from_pairs(pairs).expect("one semantics")
            })
            .collect()
    };

    // every variable as a value and through a few indicators, then random ones
    let mut conts = extra;
    for x in vars {
        conts.push(Continuation::expr(Expr::var(x.clone()), sem));
        for (op, c) in [(CmpOp::Eq, 0), (CmpOp::Eq, 1), (CmpOp::Le, 0)] {
            let t = Test::cmp(op, Expr::var(x.clone()), Expr::int(c));
            conts.push(Continuation::indicator(t, sem, AnsKind::ExtNonNeg));
        }
    }
    let consts = grid();
    for n in 0..counts.conts.max(1) {
        let roll = if vars.is_empty() { n % 2 * 3 } else { n % 5 };
        let var = |rng: &mut ChaCha8Rng| Expr::var(vars.choose(rng).unwrap().clone());
        let k = match roll {
            0 => Continuation::constant(Ans::Ext(ext_value(&mut rng))),
            1 => Continuation::expr(var(&mut rng), sem),
            2 => {
                let op = *[CmpOp::Le, CmpOp::Lt, CmpOp::Eq, CmpOp::Ne].choose(&mut rng).unwrap();
                let c = Expr::lit(consts.choose(&mut rng).unwrap().clone());
                Continuation::indicator(Test::cmp(op, var(&mut rng), c), sem, AnsKind::ExtNonNeg)
            }
            3 => {
                let entries: BTreeMap<Env, Ans> = envs.iter().map(|e| (e.clone(), Ans::Ext(ext_value(&mut rng)))).collect();
                Continuation::table(entries, Ans::Ext(ext_value(&mut rng))).expect("one answer domain")
            }
            _ => {
                let default = if rng.gen_bool(0.2) { ExtNonNeg::Infinity } else { ExtNonNeg::zero() };
                Continuation::expr_with_default(Expr::mul(var(&mut rng), var(&mut rng)), sem, default)
            }
        };
        conts.push(k);
    }

    let mut chains: Vec<Chain> = conts.iter().take(3).map(|k| Chain::scaled(k, 6).expect("ext-valued")).collect();
    let entries: BTreeMap<Env, Ans> =
        envs.iter().map(|e| (e.clone(), Ans::Ext(ExtNonNeg::Finite(q(rng.gen_range(0..=6), 2))))).collect();
    let bounded = Continuation::table(entries, Ans::Ext(ExtNonNeg::from_int(1))).expect("one answer domain");
    chains.push(Chain::truncated(&bounded, 5, Some(3)).expect("ext-valued"));

    let mut scalars = vec![q(0, 1), q(1, 2), q(1, 1), q(2, 1)];
    scalars.extend((0..4).map(|_| q(rng.gen_range(1..=12), rng.gen_range(1..=4))));
    SamplePlan::new(envs, conts, scalars, chains, counts.tuples.max(1), seed)
}

