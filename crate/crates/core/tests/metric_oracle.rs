mod support;

use std::collections::BTreeSet;
use std::time::Instant;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracles;
use wikiref_core::evaluate::{fractional_ranks, precision_recall_f_at_k, spearman_rho};

fn random_instance(rng: &mut ChaCha8Rng) -> (Vec<String>, BTreeSet<String>, usize) {
    let universe = rng.gen_range(1..40);
    let mut recs: Vec<String> = (0..universe).map(|i| format!("r{i}")).collect();
    for i in (1..recs.len()).rev() {
        recs.swap(i, rng.gen_range(0..=i));
    }
    recs.truncate(rng.gen_range(0..=universe));
    let gold = (0..universe)
        .filter(|_| rng.gen_bool(0.3))
        .map(|i| format!("r{i}"))
        .collect();
    (recs, gold, rng.gen_range(1..15))
}

fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    // Few distinct levels so ties are common.
    let levels = rng.gen_range(1..=n.max(2));
    (0..n).map(|_| rng.gen_range(0..levels) as f64 * 0.5).collect()
}

#[test]
fn metrics_and_rho_match_brute_force_on_200_instances() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let (recs, gold, k) = random_instance(&mut rng);
        let m = precision_recall_f_at_k(&recs, &gold, k);
        let (p, r, f) = oracles::metrics_at_k(&recs, &gold, k);
        assert!((m.precision - p).abs() <= 1e-12);
        assert!((m.recall - r).abs() <= 1e-12);
        assert!((m.f_measure - f).abs() <= 1e-12);

        let n = rng.gen_range(2..30);
        let a = random_values(&mut rng, n);
        let b = random_values(&mut rng, n);
        let rho = spearman_rho(&fractional_ranks(&a), &fractional_ranks(&b)).unwrap();
        assert!((rho - oracles::spearman(&a, &b)).abs() <= 1e-12, "{a:?} {b:?}");
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn tie_free_rho_matches_the_textbook_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.gen_range(2..25);
        let a: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let rho = spearman_rho(&fractional_ranks(&a), &fractional_ranks(&b)).unwrap();
        assert!((rho - oracles::spearman_no_ties(&a, &b)).abs() <= 1e-12);
    }
}

#[test]
fn fractional_ranks_match_counting() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let n = rng.gen_range(1..30);
        let v = random_values(&mut rng, n);
        assert_eq!(fractional_ranks(&v), oracles::average_ranks(&v));
    }
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u8..6, 2..20).prop_map(|v| v.into_iter().map(f64::from).collect())
}

proptest! {
    #[test]
    fn rho_is_symmetric_and_bounded(pair in (2usize..20).prop_flat_map(|n| (
        prop::collection::vec(0u8..6, n), prop::collection::vec(0u8..6, n)))) {
        let a: Vec<f64> = pair.0.iter().map(|&x| f64::from(x)).collect();
        let b: Vec<f64> = pair.1.iter().map(|&x| f64::from(x)).collect();
        let (ra, rb) = (fractional_ranks(&a), fractional_ranks(&b));
        let ab = spearman_rho(&ra, &rb).unwrap();
        let ba = spearman_rho(&rb, &ra).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn rho_of_a_ranking_with_itself_is_one_and_with_its_reverse_minus_one(v in values()) {
        prop_assume!(v.iter().any(|&x| x != v[0]));
        let r = fractional_ranks(&v);
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        prop_assert!((spearman_rho(&r, &r).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!((spearman_rho(&r, &fractional_ranks(&neg)).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_is_invariant_under_monotone_transforms(v in values(), w in values()) {
        let n = v.len().min(w.len());
        let (v, w) = (&v[..n], &w[..n]);
        let squashed: Vec<f64> = v.iter().map(|x| (x * 3.0 + 1.0).ln()).collect();
        let a = spearman_rho(&fractional_ranks(v), &fractional_ranks(w)).unwrap();
        let b = spearman_rho(&fractional_ranks(&squashed), &fractional_ranks(w)).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn recall_is_monotone_and_precision_is_bounded(k in 1usize..20, n in 0usize..20, g in prop::collection::btree_set(0usize..25, 0..10)) {
        let recs: Vec<String> = (0..n).map(|i| format!("r{i}")).collect();
        let gold: BTreeSet<String> = g.into_iter().map(|i| format!("r{i}")).collect();
        let a = precision_recall_f_at_k(&recs, &gold, k);
        let b = precision_recall_f_at_k(&recs, &gold, k + 1);
        prop_assert!(b.recall >= a.recall);
        prop_assert!((0.0..=1.0).contains(&a.precision));
        prop_assert!(a.f_measure <= a.precision.max(a.recall) + 1e-15);
    }
}
