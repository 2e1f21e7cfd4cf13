use std::collections::BTreeMap;

use proptest::prelude::*;
use wikiref_core::evaluate::split_corpus;

fn titles(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("T{i}")).collect()
}

#[test]
fn every_target_lands_in_training_about_ratio_of_the_time() {
    let targets = titles(20);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let runs = 4000;
    for seed in 0..runs {
        let (train, _) = split_corpus(&targets, 0.7, seed).unwrap();
        assert_eq!(train.len(), 14);
        for t in train {
            *counts.entry(t).or_default() += 1;
        }
    }
    for t in &targets {
        let freq = counts[t] as f64 / runs as f64;
        // binomial sd is about 0.007
        assert!((freq - 0.7).abs() < 0.04, "{t}: {freq}");
    }
}

#[test]
fn ten_targets_split_seven_three() {
    let (train, test) = split_corpus(&titles(10), 0.7, 1).unwrap();
    assert_eq!((train.len(), test.len()), (7, 3));
}

proptest! {
    #[test]
    fn split_is_a_partition(n in 2usize..60, ratio in 0.01f64..0.99, seed in any::<u64>()) {
        let targets = titles(n);
        let (train, test) = split_corpus(&targets, ratio, seed).unwrap();
        prop_assert!(!train.is_empty() && !test.is_empty());
        prop_assert_eq!(train.len() + test.len(), n);
        let mut all: Vec<String> = train.iter().chain(&test).cloned().collect();
        all.sort();
        let mut expected = targets.clone();
        expected.sort();
        prop_assert_eq!(all, expected);
        prop_assert_eq!(split_corpus(&targets, ratio, seed).unwrap(), (train, test));
    }
}
