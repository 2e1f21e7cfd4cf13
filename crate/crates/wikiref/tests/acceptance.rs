//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

#[path = "../../core/tests/support/oracles.rs"]
mod oracles;
mod support;

use std::collections::BTreeSet;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wikiref_core::context::{build_idf, FeatureContext};
use wikiref_core::corpus::{Corpus, LinkGraph};
use wikiref_core::evaluate::{fractional_ranks, precision_recall_f_at_k, spearman_rho, EvalConfig, System};
use wikiref_core::linkclassify::{
    chi_square_rank, enn_keep_indices, EnnParams, ForestModel, ForestParams, Label, Step1Feature,
};
use wikiref_core::pipeline::{evaluate_target, TrainedModels};
use wikiref_core::refrank::{train_ranker, PoolMode, PreferencePair, RankerModel, RankerParams, Step2FeatureVector};
use wikiref_core::synth::{disjoint_blobs, gaussian_mixture, planted_feature, random_corpus, random_items, separable_pairs};
use wikiref_core::textsim::WordVectors;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn metric_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let universe = rng.gen_range(1..40);
        let mut recs: Vec<String> = (0..universe).map(|i| format!("r{i}")).collect();
        for i in (1..recs.len()).rev() {
            recs.swap(i, rng.gen_range(0..=i));
        }
        recs.truncate(rng.gen_range(0..=universe));
        let gold: BTreeSet<String> = (0..universe).filter(|_| rng.gen_bool(0.3)).map(|i| format!("r{i}")).collect();
        let k = rng.gen_range(1..15);
        let m = precision_recall_f_at_k(&recs, &gold, k);
        let (p, r, f) = oracles::metrics_at_k(&recs, &gold, k);
        worst = worst.max((m.precision - p).abs()).max((m.recall - r).abs()).max((m.f_measure - f).abs());

        let n = rng.gen_range(2..30);
        let levels = rng.gen_range(2..=n);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64).collect();
        let rho = spearman_rho(&fractional_ranks(&a), &fractional_ranks(&b)).map_err(|e| e.to_string())?;
        worst = worst.max((rho - oracles::spearman(&a, &b)).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst <= 1e-12, format!("max |Δ| {worst:e}"))?;
    ensure(secs < 5.0, format!("took {secs:.2}s"))?;
    Ok(format!("200 instances, max |Δ| {worst:e}, {secs:.3}s"))
}

fn feature_correctness() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let ws = support::fixture_workspace(tmp.path());
    let (worst, compared) = support::feature_deviation(&ws)?;
    ensure(compared == 110, format!("compared {compared} values, expected 110"))?;
    ensure(worst <= 1e-9, format!("max |Δ| {worst:e}"))?;
    Ok(format!("10 pairs × 8 + 10 triples × 3 features, max |Δ| {worst:e}"))
}

fn enn_contract() -> Outcome {
    let params = EnnParams::default();
    let mut removed = 0;
    for seed in 0..100 {
        let d = gaussian_mixture(seed, 200, 0.1, 1.0);
        let out = enn_keep_indices(&d.rows, &d.labels, params).map_err(|e| e.to_string())?;
        ensure(out.kept.windows(2).all(|w| w[0] < w[1]) && out.kept.iter().all(|&i| i < d.len()), format!("seed {seed}: not a subset"))?;
        let minority: Vec<usize> = (0..d.len()).filter(|&i| d.labels[i] == Label::Relevant).collect();
        ensure(minority.iter().all(|i| out.kept.contains(i)), format!("seed {seed}: minority row removed"))?;
        let brute = oracles::enn(&d.rows, &d.labels, params.k_neighbors, params.max_rounds);
        ensure(out.kept == brute, format!("seed {seed}: differs from brute force"))?;
        let rows: Vec<[f64; 8]> = out.kept.iter().map(|&i| d.rows[i]).collect();
        let labels: Vec<Label> = out.kept.iter().map(|&i| d.labels[i]).collect();
        let again = enn_keep_indices(&rows, &labels, params).map_err(|e| e.to_string())?;
        ensure(again.kept.len() == rows.len(), format!("seed {seed}: not a fixed point"))?;
        removed += d.len() - out.kept.len();
    }
    Ok(format!("100 datasets, {removed} majority rows removed, all identical to brute force"))
}

fn chi_square_recovery() -> Outcome {
    let mut first = 0;
    for seed in 0..100u64 {
        let informative = Step1Feature::ALL[(seed % 8) as usize];
        let constant = Step1Feature::ALL[((seed + 3) % 8) as usize];
        let d = planted_feature(seed, 400, informative, &[constant], 0.3, 0.15);
        let ranking = chi_square_rank(&d.examples(), 10);
        if ranking[0].feature == informative {
            first += 1;
        }
        let c = ranking.iter().find(|s| s.feature == constant).unwrap();
        ensure(c.score == 0.0, format!("seed {seed}: constant feature scored {}", c.score))?;
    }
    ensure(first >= 95, format!("planted feature first in {first}/100"))?;
    Ok(format!("planted feature first in {first}/100 seeds; constant features 0"))
}

fn forest_quality() -> Outcome {
    let train = disjoint_blobs(11, 1000, 0.1);
    let test = disjoint_blobs(12, 1000, 0.1);
    let params = ForestParams::default();
    let a = ForestModel::fit(&train.rows, &train.labels, &params, 99).map_err(|e| e.to_string())?;
    let b = ForestModel::fit(&train.rows, &train.labels, &params, 99).map_err(|e| e.to_string())?;
    let correct = test
        .rows
        .iter()
        .zip(&test.labels)
        .filter(|(x, &l)| (a.score_row(x) >= 0.5) == (l == Label::Relevant))
        .count();
    let acc = correct as f64 / test.len() as f64;
    ensure(acc >= 0.9, format!("accuracy {acc}"))?;
    let same = serde_json::to_vec(&a).unwrap() == serde_json::to_vec(&b).unwrap();
    ensure(same, "reruns differ")?;
    Ok(format!("held-out accuracy {acc:.3}; reruns bit-identical"))
}

fn ranker_quality() -> Outcome {
    let agree = |m: &RankerModel, pairs: &[PreferencePair]| {
        pairs.iter().filter(|p| m.weights.iter().zip(&p.0).map(|(w, d)| w * d).sum::<f64>() > 0.0).count() as f64
            / pairs.len() as f64
    };
    let mut worst = 1.0f64;
    for (i, truth) in [[1.0, 0.5, 0.25], [0.2, -1.0, 0.6], [-0.3, 0.3, 1.0]].into_iter().enumerate() {
        let train = separable_pairs(i as u64, 40, 10, truth, 0.05);
        let held_out = separable_pairs(i as u64 + 100, 40, 10, truth, 0.05);
        let m = train_ranker(&train, RankerParams { c: 1.0, epochs: 200 }, i as u64).map_err(|e| e.to_string())?;
        worst = worst.min(agree(&m, &train)).min(agree(&m, &held_out));
    }
    ensure(worst >= 0.99, format!("pairwise agreement {worst}"))?;

    let mut runner = TestRunner::new(Config { cases: 256, failure_persistence: None, ..Config::default() });
    let strategy = (prop::array::uniform3(-2.0f64..2.0), 0.01f64..100.0, any::<u64>());
    runner
        .run(&strategy, |(w, scale, seed)| {
            let items = random_items(seed, 25);
            let order = |weights: [f64; 3]| {
                let m = RankerModel { weights, params: RankerParams::default(), seed: 0 };
                let scores: Vec<f64> = items.iter().map(|x| m.score(&Step2FeatureVector::from_array(*x))).collect();
                let mut idx: Vec<usize> = (0..items.len()).collect();
                idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
                idx
            };
            prop_assert_eq!(order(w), order(w.map(|x| x * scale)));
            Ok(())
        })
        .map_err(|e| format!("scaling property: {e}"))?;
    Ok(format!("min pairwise agreement {worst:.4} at 200 epochs; scaling invariance held on 256 cases"))
}

fn end_to_end() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let report = support::evaluate_fixture(tmp.path())?.report;
    let secs = start.elapsed().as_secs_f64();
    let w = report.at(System::WikiRef, 1).ok_or("no WikiRef row")?.precision;
    let b = report.at(System::BlI, 1).ok_or("no BL-I row")?.precision;
    ensure(w == 1.0 && w > b && secs < 60.0, format!("WikiRef P@1 {w}, BL-I P@1 {b}, {secs:.1}s"))?;
    Ok(format!("WikiRef P@1 {w:.3} > BL-I P@1 {b:.3}; pipeline {secs:.2}s"))
}

fn table_shapes() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let report = support::evaluate_fixture(tmp.path())?.report;
    let ks = vec![1, 2, 3, 4, 5, 10];
    ensure(report.config.ks == ks, format!("cutoffs {:?}", report.config.ks))?;
    let systems: Vec<System> = report.systems.iter().map(|s| s.system).collect();
    ensure(systems == System::ALL, format!("systems {systems:?}"))?;
    for s in &report.systems {
        let got: Vec<usize> = s.at_k.iter().map(|m| m.k).collect();
        ensure(got == ks, format!("{} has cutoffs {got:?}", s.system))?;
    }
    let md = std::fs::read_to_string(tmp.path().join("report.md")).map_err(|e| e.to_string())?;
    let table6_rows = md
        .lines()
        .filter(|l| {
            let cells: Vec<&str> = l.split('|').map(str::trim).collect();
            cells.len() == 10 && ["Precision", "Recall", "F-Measure"].contains(&cells[2])
        })
        .count();
    ensure(table6_rows == ks.len() * 3, format!("{table6_rows} system rows in report.md"))?;
    for t in &report.targets {
        for s in &t.systems {
            ensure(s.metrics.windows(2).all(|p| p[1].recall >= p[0].recall), format!("{} {} recall drops", t.target, s.system))?;
        }
    }

    let blobs = disjoint_blobs(1, 200, 0.25);
    let forest = ForestModel::fit(&blobs.rows, &blobs.labels, &ForestParams { n_trees: 15, ..ForestParams::default() }, 1)
        .map_err(|e| e.to_string())?;
    let config = EvalConfig { ks: (1..=10).collect(), ..EvalConfig::default() };
    let mut runner = TestRunner::new(Config { cases: 64, failure_persistence: None, ..Config::default() });
    runner
        .run(&(any::<u64>(), 3usize..20, prop::array::uniform3(-1.0f64..1.0)), |(seed, pages, w)| {
            let corpus = Corpus::from_records(random_corpus(seed, pages, 12)).unwrap();
            let graph = LinkGraph::build(&corpus);
            let idf = build_idf(&corpus).unwrap();
            let vectors = WordVectors::new("none", 0);
            let ctx = FeatureContext::new(&corpus, &graph, &idf, &vectors);
            let models = TrainedModels {
                forest: forest.clone(),
                ranker: RankerModel { weights: w, params: RankerParams::default(), seed: 0 },
                chi_square: Vec::new(),
            };
            for page in corpus.pages() {
                let row = evaluate_target(&ctx, &page.title, &models, &config, PoolMode::Global).unwrap();
                for s in &row.systems {
                    prop_assert!(s.metrics.windows(2).all(|p| p[1].recall >= p[0].recall));
                }
            }
            Ok(())
        })
        .map_err(|e| format!("random corpora: {e}"))?;
    Ok("k ∈ {1,2,3,4,5,10} × 6 systems × P/R/F; recall@k non-decreasing on fixture and 64 random corpora".into())
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    support::evaluate_fixture(&a)?;
    support::evaluate_fixture(&b)?;
    let ra = std::fs::read(a.join("report.json")).map_err(|e| e.to_string())?;
    let rb = std::fs::read(b.join("report.json")).map_err(|e| e.to_string())?;
    ensure(ra == rb, "report.json differs between runs")?;
    Ok(format!("two runs, {} identical bytes", ra.len()))
}

fn main() {
    let checks: [Check; 9] = [
        ("metric oracle equivalence", metric_oracle),
        ("feature correctness", feature_correctness),
        ("ENN contract", enn_contract),
        ("chi-square signal recovery", chi_square_recovery),
        ("forest quality", forest_quality),
        ("ranker quality", ranker_quality),
        ("end-to-end fixture", end_to_end),
        ("table shape reproduction", table_shapes),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {name}: panicked");
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
