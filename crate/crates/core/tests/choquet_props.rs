mod common;

use proptest::prelude::*;

use common::{choquet_permutation, q, Q};
use wpwb::answer::ExtNonNeg;
use wpwb::capacity::{capacity_classify, choquet, choquet_ext, Capacity};

fn belief() -> impl Strategy<Value = Capacity> {
    (1usize..=5).prop_flat_map(|n| {
        prop::collection::vec((1u32..(1 << n), 1i64..=6), 1..=4)
            .prop_map(move |ms| Capacity::belief(n, &ms.into_iter().map(|(b, w)| (b, q(w, 6))).collect::<Vec<_>>()).unwrap())
    })
}

/// Monotone capacities with no structure beyond monotonicity: a random
/// nondecreasing function of the subset size plus a bonus on supersets of
/// a random set.
fn monotone() -> impl Strategy<Value = Capacity> {
    (1usize..=5).prop_flat_map(|n| {
        (prop::collection::vec(0i64..=3, n), 0u32..(1 << n), 0i64..=3).prop_map(move |(steps, core, bonus)| {
            let table = (0..1u32 << n)
                .map(|a| {
                    let size: i64 = steps[..a.count_ones() as usize].iter().sum();
                    let extra = if a != 0 && a & core == core { bonus } else { 0 };
                    q(size + extra, 2)
                })
                .collect();
            Capacity::from_table(n, table).unwrap()
        })
    })
}

fn capacity() -> impl Strategy<Value = Capacity> {
    prop_oneof![belief(), belief().prop_map(|b| b.dual()), monotone()]
}

fn integrand(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec((0i64..=16).prop_map(|k| q(k, 4)), n)
}

fn with_integrands() -> impl Strategy<Value = (Capacity, Vec<Q>, Vec<Q>)> {
    capacity().prop_flat_map(|nu| {
        let n = nu.len();
        (Just(nu), integrand(n), integrand(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn level_sets_agree_with_sorted_form((nu, f, _) in with_integrands()) {
        prop_assert_eq!(choquet(&f, &nu).unwrap(), choquet_permutation(&f, &nu));
    }

    #[test]
    fn integral_is_monotone_in_the_integrand((nu, f, g) in with_integrands()) {
        let upper: Vec<Q> = f.iter().zip(&g).map(|(a, b)| a.max(b).clone()).collect();
        prop_assert!(choquet(&f, &nu).unwrap() <= choquet(&upper, &nu).unwrap());
    }

    #[test]
    fn integral_is_positively_homogeneous((nu, f, _) in with_integrands(), k in 0i64..=9) {
        let a = q(k, 3);
        let scaled: Vec<Q> = f.iter().map(|x| &a * x).collect();
        prop_assert_eq!(choquet(&scaled, &nu).unwrap(), &a * choquet(&f, &nu).unwrap());
    }

    #[test]
    fn constants_shift_by_total_mass((nu, f, _) in with_integrands(), k in 0i64..=8) {
        let c = q(k, 2);
        let shifted: Vec<Q> = f.iter().map(|x| x + &c).collect();
        let full = nu.value(nu.full()).clone();
        prop_assert_eq!(choquet(&shifted, &nu).unwrap(), choquet(&f, &nu).unwrap() + c * full);
    }

    #[test]
    fn comonotone_integrands_add((nu, f, _) in with_integrands()) {
        // g is a nondecreasing transform of f, so f and g are comonotone
        let g: Vec<Q> = f.iter().map(|x| x * x + q(1, 3)).collect();
        let sum: Vec<Q> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        prop_assert_eq!(choquet(&sum, &nu).unwrap(), choquet(&f, &nu).unwrap() + choquet(&g, &nu).unwrap());
    }

    #[test]
    fn integral_lies_between_extremes((nu, f, _) in with_integrands()) {
        let full = nu.value(nu.full()).clone();
        let (lo, hi) = (f.iter().min().unwrap().clone(), f.iter().max().unwrap().clone());
        let c = choquet(&f, &nu).unwrap();
        prop_assert!(&lo * &full <= c && c <= &hi * &full);
    }

    #[test]
    fn beliefs_are_superadditive_and_plausibilities_subadditive(bel in belief(), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = bel.len();
        let f: Vec<Q> = (0..n).map(|_| q(rng.gen_range(0..=8), 2)).collect();
        let g: Vec<Q> = (0..n).map(|_| q(rng.gen_range(0..=8), 2)).collect();
        let sum: Vec<Q> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        let pl = bel.dual();
        prop_assert!(choquet(&sum, &bel).unwrap() >= choquet(&f, &bel).unwrap() + choquet(&g, &bel).unwrap());
        prop_assert!(choquet(&sum, &pl).unwrap() <= choquet(&f, &pl).unwrap() + choquet(&g, &pl).unwrap());
        let flags = capacity_classify(&bel).unwrap();
        prop_assert!(flags.monotone && flags.convex);
        prop_assert!(capacity_classify(&pl).unwrap().concave);
    }

    #[test]
    fn extended_integral_matches_finite_one((nu, f, _) in with_integrands()) {
        let ext: Vec<ExtNonNeg> = f.iter().map(|x| ExtNonNeg::finite(x.clone()).unwrap()).collect();
        prop_assert_eq!(choquet_ext(&ext, &nu).unwrap(), ExtNonNeg::finite(choquet(&f, &nu).unwrap()).unwrap());
    }
}

#[test]
fn infinity_counts_only_on_charged_sets() {
    // ν({1}) = 0, so an infinite value on outcome 1 alone contributes nothing
    let nu = Capacity::from_table(2, vec![q(0, 1), q(0, 1), q(1, 2), q(1, 1)]).unwrap();
    let f = [ExtNonNeg::Infinity, ExtNonNeg::from_int(2)];
    assert_eq!(choquet_ext(&f, &nu).unwrap(), ExtNonNeg::from_int(2));
    let g = [ExtNonNeg::from_int(2), ExtNonNeg::Infinity];
    assert_eq!(choquet_ext(&g, &nu).unwrap(), ExtNonNeg::Infinity);
}

#[test]
fn non_monotone_tables_are_flagged_and_refused() {
    let bad = Capacity::from_table(2, vec![q(0, 1), q(1, 1), q(1, 4), q(1, 2)]).unwrap();
    assert!(!bad.flags().monotone);
    assert!(choquet(&[q(1, 1), q(0, 1)], &bad).is_err());
    assert!(Capacity::from_table(1, vec![q(1, 2), q(1, 1)]).is_err());
    assert!(choquet(&[q(-1, 1)], &Capacity::probability(&[q(1, 1)]).unwrap()).is_err());
}
