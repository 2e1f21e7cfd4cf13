//! Seeded synthetic data: labeled Step I rows, preference pairs and small
//! random corpora. Used by the test suites and the acceptance checks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CorpusRecord, ReferenceRecord, WikilinkRecord};
use crate::linkclassify::{Label, LabeledExample, Step1Feature, Step1FeatureVector, STEP1_DIM};
use crate::refrank::{PreferencePair, STEP2_DIM};

/// Labeled 8-d rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub rows: Vec<[f64; STEP1_DIM]>,
    pub labels: Vec<Label>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn examples(&self) -> Vec<LabeledExample> {
        self.rows
            .iter()
            .zip(&self.labels)
            .enumerate()
            .map(|(i, (row, &label))| LabeledExample {
                target_title: String::from("synthetic"),
                wikilink_title: format!("row {i}"),
                features: Step1FeatureVector::from_array(*row),
                label,
            })
            .collect()
    }
}

/// Standard normal draw (Box–Muller).
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

/// Two unit-variance Gaussian clusters, the majority (`Irrelevant`) at the
/// origin and the minority (`Relevant`) at `separation` along every axis.
/// Exactly `round(n * minority_fraction)` rows are minority, at least one.
pub fn gaussian_mixture(seed: u64, n: usize, minority_fraction: f64, separation: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let minority = (libm::round(n as f64 * minority_fraction) as usize).clamp(1, n.saturating_sub(1).max(1));
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = if i < minority { Label::Relevant } else { Label::Irrelevant };
        let centre = if label == Label::Relevant { separation } else { 0.0 };
        let mut row = [0.0; STEP1_DIM];
        for x in &mut row {
            *x = centre + standard_normal(&mut rng);
        }
        rows.push(row);
        labels.push(label);
    }
    Dataset { rows, labels }
}

/// Rows in `[0, 1]` where only `informative` depends on the label (shifted by
/// `shift` for relevant rows, plus Gaussian noise of `noise`); the features
/// in `constant` are 0.5 and the rest are uniform noise. About 30% of rows
/// are relevant.
pub fn planted_feature(
    seed: u64,
    n: usize,
    informative: Step1Feature,
    constant: &[Step1Feature],
    shift: f64,
    noise: f64,
) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let label = if rng.gen_bool(0.3) { Label::Relevant } else { Label::Irrelevant };
        let mut row = [0.0; STEP1_DIM];
        for (j, x) in row.iter_mut().enumerate() {
            *x = if j == informative.index() {
                let base = if label == Label::Relevant { 0.5 + shift / 2.0 } else { 0.5 - shift / 2.0 };
                (base + noise * standard_normal(&mut rng)).clamp(0.0, 1.0)
            } else if constant.iter().any(|c| c.index() == j) {
                0.5
            } else {
                rng.gen::<f64>()
            };
        }
        rows.push(row);
        labels.push(label);
    }
    Dataset { rows, labels }
}

/// Two well-separated Gaussian blobs (centres 0.3 and 0.7 on every axis,
/// standard deviation `spread`), half of the rows in each.
pub fn disjoint_blobs(seed: u64, n: usize, spread: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = if i % 2 == 0 { Label::Relevant } else { Label::Irrelevant };
        let centre = if label == Label::Relevant { 0.7 } else { 0.3 };
        let mut row = [0.0; STEP1_DIM];
        for x in &mut row {
            *x = centre + spread * standard_normal(&mut rng);
        }
        rows.push(row);
        labels.push(label);
    }
    Dataset { rows, labels }
}

/// Uniform items in `[0, 1]³`.
pub fn random_items(seed: u64, n: usize) -> Vec<[f64; STEP2_DIM]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()])
        .collect()
}

/// Preference pairs from queries of `per_query` random items: every pair
/// whose utility gap under `weights` is at least `margin`, written as
/// `better − worse`.
pub fn separable_pairs(
    seed: u64,
    queries: usize,
    per_query: usize,
    weights: [f64; STEP2_DIM],
    margin: f64,
) -> Vec<PreferencePair> {
    let items = random_items(seed, queries * per_query);
    let utility = |x: &[f64; STEP2_DIM]| x.iter().zip(&weights).map(|(a, b)| a * b).sum::<f64>();
    let mut pairs = Vec::new();
    for q in items.chunks(per_query) {
        for a in q {
            for b in q {
                if utility(a) - utility(b) >= margin {
                    pairs.push(PreferencePair([a[0] - b[0], a[1] - b[1], a[2] - b[2]]));
                }
            }
        }
    }
    pairs
}

const WORDS: [&str; 16] = [
    "graph", "tree", "proof", "lemma", "matrix", "vector", "kernel", "market", "price", "river",
    "delta", "cell", "protein", "orbit", "planet", "signal",
];

/// A random but valid corpus: `pages` pages with one to four sentences,
/// random wikilinks among themselves and references drawn from a shared
/// pool of `reference_pool` titles.
pub fn random_corpus(seed: u64, pages: usize, reference_pool: usize) -> Vec<CorpusRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = reference_pool.max(1);
    (0..pages)
        .map(|p| {
            let n_sent = rng.gen_range(1..=4);
            let sentences: Vec<String> = (0..n_sent)
                .map(|_| {
                    let n_words = rng.gen_range(3..=7);
                    let mut s = String::from("Some");
                    for _ in 0..n_words {
                        s.push(' ');
                        s.push_str(WORDS[rng.gen_range(0..WORDS.len())]);
                    }
                    s.push('.');
                    s
                })
                .collect();
            let mut wikilinks = Vec::new();
            if pages > 1 {
                for _ in 0..rng.gen_range(0..=4) {
                    let mut t = rng.gen_range(0..pages);
                    if t == p {
                        t = (t + 1) % pages;
                    }
                    wikilinks.push(WikilinkRecord {
                        target: format!("Page {t}"),
                        sentence: Some(rng.gen_range(0..n_sent)),
                    });
                }
            }
            let references = (0..rng.gen_range(0..=5))
                .map(|_| {
                    let r = rng.gen_range(0..pool);
                    ReferenceRecord {
                        title: format!("Reference {r}"),
                        raw: String::new(),
                        sentence: if rng.gen_bool(0.8) { Some(rng.gen_range(0..n_sent)) } else { None },
                    }
                })
                .collect();
            CorpusRecord {
                title: format!("Page {p}"),
                summary: sentences[0].clone(),
                sentences,
                wikilinks,
                references,
            }
        })
        .collect()
}
