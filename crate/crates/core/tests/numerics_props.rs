mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use common::{float_to_q, q, TinyOracle, Q};
use num_traits::Zero;
use wpwb::eval::{eval_float, eval_real, Env, Value};
use wpwb::numerics::{proj, rounding_boundaries, FloatE, FloatFormat, RealE};
use wpwb::syntax::{BinOp, Expr};

fn formats() -> impl Strategy<Value = (u32, i32, i32)> {
    prop::sample::select(vec![(2, -1, 1), (3, -1, 1), (3, -2, 2), (4, -2, 2), (5, -3, 1)])
}

fn rational(bound: i64) -> impl Strategy<Value = Q> {
    (-bound..=bound, 1i64..=128).prop_map(|(n, d)| q(n, d))
}

/// Exact evaluation written independently of the library.
fn reference(e: &Expr, env: &BTreeMap<&str, Option<Q>>) -> Option<Q> {
    match e {
        Expr::Lit(c) => Some(c.clone()),
        Expr::Var(x) => env[x.as_str()].clone(),
        Expr::Neg(a) => reference(a, env).map(|v| -v),
        Expr::Bin(op, a, b) => {
            let (a, b) = (reference(a, env)?, reference(b, env)?);
            match op {
                BinOp::Add => Some(a + b),
                BinOp::Sub => Some(a - b),
                BinOp::Mul => Some(a * b),
                BinOp::Div => (!b.is_zero()).then(|| a / b),
            }
        }
    }
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Expr::lit(q(n, d))),
        prop::sample::select(vec!["x", "y", "e"]).prop_map(Expr::var),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]), inner.clone(), inner)
                .prop_map(|(op, a, b)| Expr::bin(op, a, b)),
        ]
    })
}

fn real_env(x: &Q, y: &Q) -> (Env, BTreeMap<&'static str, Option<Q>>) {
    let env = Env::from_pairs([
        ("x".to_string(), Value::Real(RealE::Num(x.clone()))),
        ("y".to_string(), Value::Real(RealE::Num(y.clone()))),
        ("e".to_string(), Value::Real(RealE::Err)),
    ])
    .unwrap();
    let reference = BTreeMap::from([("x", Some(x.clone())), ("y", Some(y.clone())), ("e", None)]);
    (env, reference)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn projection_matches_exhaustive_search((p, emin, emax) in formats(), r in rational(1200)) {
        let oracle = TinyOracle::new(p, emin, emax);
        let r = RealE::Num(r);
        prop_assert_eq!(float_to_q(&proj(&oracle.format(), &r)), oracle.round(&r));
    }

    #[test]
    fn every_real_lies_in_the_preimage_of_its_projection((p, emin, emax) in formats(), r in rational(1200)) {
        let fmt = FloatFormat::tiny(p, emin, emax).unwrap();
        let r = RealE::Num(r);
        let f = proj(&fmt, &r);
        prop_assert!(rounding_boundaries(&fmt, &f).contains(&r));
        // neighbouring floats do not claim it
        if let FloatE::Num(v) = f {
            for n in [fmt.successor(&v), fmt.predecessor(&v)].into_iter().flatten() {
                prop_assert!(!rounding_boundaries(&fmt, &FloatE::Num(n)).contains(&r));
            }
        }
    }

    #[test]
    fn projection_is_monotone((p, emin, emax) in formats(), a in rational(1000), b in rational(1000)) {
        let oracle = TinyOracle::new(p, emin, emax);
        let fmt = oracle.format();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if let (Some(x), Some(y)) = (float_to_q(&proj(&fmt, &RealE::Num(lo))), float_to_q(&proj(&fmt, &RealE::Num(hi)))) {
            prop_assert!(x <= y);
        }
    }

    #[test]
    fn real_evaluation_matches_reference(e in expr(), x in rational(20), y in rational(20)) {
        let (env, refenv) = real_env(&x, &y);
        let got = eval_real(&e, &env).unwrap();
        prop_assert_eq!(got.as_rational().cloned(), reference(&e, &refenv), "{}", e);
    }

    #[test]
    fn float_evaluation_matches_rounded_reference(e in expr(), (p, emin, emax) in formats()) {
        let oracle = TinyOracle::new(p, emin, emax);
        let fmt = oracle.format();
        let env = Env::from_pairs([
            ("x".to_string(), Value::Float(proj(&fmt, &RealE::Num(q(1, 2))))),
            ("y".to_string(), Value::Float(proj(&fmt, &RealE::Num(q(-3, 2))))),
            ("e".to_string(), Value::Float(FloatE::Err)),
        ])
        .unwrap();
        let refenv = BTreeMap::from([
            ("x".to_string(), oracle.round(&RealE::Num(q(1, 2)))),
            ("y".to_string(), oracle.round(&RealE::Num(q(-3, 2)))),
            ("e".to_string(), None),
        ]);
        let got = eval_float(&e, &fmt, &env).unwrap();
        prop_assert_eq!(float_to_q(&got), oracle.eval(&e, &refenv), "{}", e);
    }

    #[test]
    fn binary64_matches_hardware(a in -1e12f64..1e12, b in -1e12f64..1e12, op in 0usize..4) {
        let fmt = FloatFormat::binary64();
        let bin = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][op];
        let lit = |v: f64| Expr::lit(Q::from_float(v).unwrap());
        let got = eval_float(&Expr::bin(bin, lit(a), lit(b)), &fmt, &Env::empty()).unwrap();
        let want = match bin {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => a / b,
        };
        if want.is_finite() {
            prop_assert_eq!(got.value().map(|v| v.to_f64()), Some(want));
        } else {
            prop_assert!(got.is_err());
        }
    }
}

#[test]
fn representable_values_are_fixed_points() {
    for (p, emin, emax) in [(3, -1, 1), (4, -2, 2)] {
        let oracle = TinyOracle::new(p, emin, emax);
        for v in &oracle.values {
            let f = proj(&oracle.format(), &RealE::Num(v.clone()));
            assert_eq!(float_to_q(&f).as_ref(), Some(v));
        }
    }
}
