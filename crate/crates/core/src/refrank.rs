//! Step II: rank the references of relevant wikilinks.
//!
//! A candidate reference R of linked page B is described by three
//! similarities to B's citation context in the target A: R's own citation
//! context in B (tf-idf and embedding) and R's title (tf-idf). A linear model
//! trained on within-target preference pairs with a hinge loss scores the
//! candidates; the pooled, deduplicated list is cut at k.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::FeatureContext;
use crate::corpus::{Anchor, Reference, WikiPage};
use crate::{Error, Result};

pub const STEP2_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Step2Feature {
    #[serde(rename = "f1_ti")]
    F1Ti,
    #[serde(rename = "f1_vec")]
    F1Vec,
    #[serde(rename = "f2_ti")]
    F2Ti,
}

impl Step2Feature {
    pub const ALL: [Step2Feature; STEP2_DIM] =
        [Step2Feature::F1Ti, Step2Feature::F1Vec, Step2Feature::F2Ti];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Step2Feature::F1Ti => "f1_ti",
            Step2Feature::F1Vec => "f1_vec",
            Step2Feature::F2Ti => "f2_ti",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Step2FeatureVector {
    pub f1_ti: f64,
    pub f1_vec: f64,
    pub f2_ti: f64,
}

impl Step2FeatureVector {
    pub fn to_array(&self) -> [f64; STEP2_DIM] {
        [self.f1_ti, self.f1_vec, self.f2_ti]
    }

    pub fn from_array([f1_ti, f1_vec, f2_ti]: [f64; STEP2_DIM]) -> Self {
        Step2FeatureVector {
            f1_ti,
            f1_vec,
            f2_ti,
        }
    }

    pub fn get(&self, feature: Step2Feature) -> f64 {
        self.to_array()[feature.index()]
    }
}

/// Features of reference `reference_index` of `b` for target `a`.
pub fn step2_features(
    ctx: &FeatureContext<'_>,
    a: &WikiPage,
    b: &WikiPage,
    reference_index: usize,
) -> Result<Step2FeatureVector> {
    let mention = a.link_context(&b.title).ok_or_else(|| {
        Error::Ownership(format!("`{}` has no wikilink to `{}`", a.title, b.title))
    })?;
    let reference_context = b.citation_context(Anchor::Reference(reference_index))?;
    let title = &b.references[reference_index].title;
    Ok(features_from_texts(ctx, &mention, reference_context, title))
}

fn features_from_texts(
    ctx: &FeatureContext<'_>,
    mention: &str,
    reference_context: &str,
    reference_title: &str,
) -> Step2FeatureVector {
    let mention_vec = ctx.idf.vectorize(mention);
    let context_vec = ctx.idf.vectorize(reference_context);
    let title_vec = ctx.idf.vectorize(reference_title);
    let f1_vec = if mention.is_empty() || reference_context.is_empty() {
        0.0
    } else {
        ctx.embedding_cosine(reference_context, mention)
    };
    Step2FeatureVector {
        f1_ti: context_vec.cosine(&mention_vec),
        f1_vec,
        f2_ti: title_vec.cosine(&mention_vec),
    }
}

/// Candidate references of one target with gold membership.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Query {
    pub target: String,
    pub items: Vec<(Step2FeatureVector, bool)>,
}

/// Feature difference `positive - negative` of one preference pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreferencePair(pub [f64; STEP2_DIM]);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairwiseSet {
    pub pairs: Vec<PreferencePair>,
    /// Queries without at least one positive and one negative.
    pub skipped_queries: usize,
}

/// One pair per (positive, negative) combination within each query; pairs
/// never cross queries.
pub fn build_pairwise_training(queries: &[Query]) -> PairwiseSet {
    let mut set = PairwiseSet::default();
    for query in queries {
        let positives: Vec<_> = query.items.iter().filter(|(_, g)| *g).collect();
        let negatives: Vec<_> = query.items.iter().filter(|(_, g)| !*g).collect();
        if positives.is_empty() || negatives.is_empty() {
            set.skipped_queries += 1;
            continue;
        }
        for (p, _) in &positives {
            let p = p.to_array();
            for (n, _) in &negatives {
                let n = n.to_array();
                set.pairs
                    .push(PreferencePair([p[0] - n[0], p[1] - n[1], p[2] - n[2]]));
            }
        }
    }
    set
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankerParams {
    /// Hinge-loss weight in `½‖w‖² + C·Σ hinge`.
    pub c: f64,
    pub epochs: usize,
}

impl Default for RankerParams {
    fn default() -> Self {
        RankerParams { c: 1.0, epochs: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankerModel {
    pub weights: [f64; STEP2_DIM],
    pub params: RankerParams,
    pub seed: u64,
}

impl RankerModel {
    pub fn score(&self, features: &Step2FeatureVector) -> f64 {
        let f = features.to_array();
        self.weights[0] * f[0] + self.weights[1] * f[1] + self.weights[2] * f[2]
    }

    /// Indicator weights of one feature; scores equal that feature exactly.
    pub fn single_feature(feature: Step2Feature) -> Self {
        let mut weights = [0.0; STEP2_DIM];
        weights[feature.index()] = 1.0;
        RankerModel {
            weights,
            params: RankerParams::default(),
            seed: 0,
        }
    }
}

/// Linear pairwise ranker trained by stochastic subgradient descent on
/// `½‖w‖² + C·Σ max(0, 1 − w·d)`, i.e. regularization `λ = 1 / (C·|pairs|)`
/// with step size `1 / (λ·t)`. Each epoch visits the pairs in an order
/// shuffled by `seed`.
pub fn train_ranker(pairs: &[PreferencePair], params: RankerParams, seed: u64) -> Result<RankerModel> {
    if pairs.is_empty() {
        return Err(Error::Training("no preference pairs to train on".into()));
    }
    if params.c <= 0.0 || !params.c.is_finite() {
        return Err(Error::Configuration(format!("ranker C must be positive, got {}", params.c)));
    }
    let lambda = 1.0 / (params.c * pairs.len() as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut w = [0.0; STEP2_DIM];
    let mut t = 0u64;
    for _ in 0..params.epochs {
        for i in (1..order.len()).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        for &i in &order {
            t += 1;
            let d = pairs[i].0;
            let eta = 1.0 / (lambda * t as f64);
            let margin = w[0] * d[0] + w[1] * d[1] + w[2] * d[2];
            let shrink = 1.0 - eta * lambda;
            for (wk, dk) in w.iter_mut().zip(d) {
                *wk *= shrink;
                if margin < 1.0 {
                    *wk += eta * dk;
                }
            }
        }
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::Training("ranker weights diverged".into()));
    }
    Ok(RankerModel {
        weights: w,
        params,
        seed,
    })
}

/// `w · f`.
pub fn score(model: &RankerModel, features: &Step2FeatureVector) -> f64 {
    model.score(features)
}

/// How candidates are scored.
#[derive(Debug, Clone, Copy)]
pub enum Scorer<'a> {
    Ranker(&'a RankerModel),
    Feature(Step2Feature),
}

impl Scorer<'_> {
    pub fn score(&self, f: &Step2FeatureVector) -> f64 {
        match self {
            Scorer::Ranker(m) => m.score(f),
            Scorer::Feature(feature) => f.get(*feature),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolMode {
    /// One list across all links.
    #[default]
    Global,
    /// At most k per link, then merged.
    PerLink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendOptions {
    /// Drop references already cited by the target.
    pub exclude_existing: bool,
    pub mode: PoolMode,
}

impl Default for RecommendOptions {
    fn default() -> Self {
        RecommendOptions {
            exclude_existing: true,
            mode: PoolMode::Global,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub reference: Reference,
    pub source_wikilink: String,
    pub features: Step2FeatureVector,
    pub score: f64,
    /// 1-based.
    pub rank: usize,
}

#[derive(Debug, Clone)]
struct Candidate {
    reference: Reference,
    link_order: usize,
    ref_order: usize,
    source: String,
    features: Step2FeatureVector,
    score: f64,
}

fn rank_candidates(candidates: &mut [Candidate]) {
    candidates.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.link_order.cmp(&b.link_order))
            .then(a.ref_order.cmp(&b.ref_order))
    });
}

/// Keeps the best-scoring instance of every norm key; on equal scores the
/// earliest instance wins.
fn dedup(candidates: Vec<Candidate>) -> Vec<Candidate> {
    let mut best: BTreeMap<String, Candidate> = BTreeMap::new();
    for c in candidates {
        match best.get(&c.reference.norm_key) {
            Some(existing) if existing.score >= c.score => {}
            _ => {
                best.insert(c.reference.norm_key.clone(), c);
            }
        }
    }
    best.into_values().collect()
}

/// Every candidate reference of `relevant_links`, scored, deduplicated and
/// sorted (score descending, then link order, then reference order). In
/// per-link mode each link contributes at most `per_link_k` entries.
pub fn rank_pool(
    ctx: &FeatureContext<'_>,
    target: &WikiPage,
    relevant_links: &[&WikiPage],
    scorer: Scorer<'_>,
    options: RecommendOptions,
    per_link_k: usize,
) -> Result<Vec<Recommendation>> {
    let existing: BTreeSet<&str> = if options.exclude_existing {
        target.references.iter().map(|r| r.norm_key.as_str()).collect()
    } else {
        BTreeSet::new()
    };
    let mut pool = Vec::new();
    for (link_order, link) in relevant_links.iter().enumerate() {
        let mention = target.link_context(&link.title).ok_or_else(|| {
            Error::Ownership(format!("`{}` has no wikilink to `{}`", target.title, link.title))
        })?;
        let mut from_link = Vec::new();
        for (ref_order, reference) in link.references.iter().enumerate() {
            if reference.norm_key.is_empty() || existing.contains(reference.norm_key.as_str()) {
                continue;
            }
            let context = link.citation_context(Anchor::Reference(ref_order))?;
            let features = features_from_texts(ctx, &mention, context, &reference.title);
            from_link.push(Candidate {
                reference: reference.clone(),
                link_order,
                ref_order,
                source: link.title.clone(),
                // + 0.0 folds -0.0 into 0.0 so signed zeros tie
                score: scorer.score(&features) + 0.0,
                features,
            });
        }
        if options.mode == PoolMode::PerLink {
            let mut unique = dedup(from_link);
            rank_candidates(&mut unique);
            unique.truncate(per_link_k);
            from_link = unique;
        }
        pool.extend(from_link);
    }
    let mut unique = dedup(pool);
    rank_candidates(&mut unique);
    Ok(unique
        .into_iter()
        .enumerate()
        .map(|(i, c)| Recommendation {
            reference: c.reference,
            source_wikilink: c.source,
            features: c.features,
            score: c.score,
            rank: i + 1,
        })
        .collect())
}

/// Top-`k` recommendations for `target` from its relevant links.
pub fn recommend(
    ctx: &FeatureContext<'_>,
    target: &WikiPage,
    relevant_links: &[&WikiPage],
    scorer: Scorer<'_>,
    k: usize,
    options: RecommendOptions,
) -> Result<Vec<Recommendation>> {
    if k == 0 {
        return Err(Error::Configuration("k must be at least 1".into()));
    }
    let mut list = rank_pool(ctx, target, relevant_links, scorer, options, k)?;
    list.truncate(k);
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn fv(a: f64, b: f64, c: f64) -> Step2FeatureVector {
        Step2FeatureVector::from_array([a, b, c])
    }

    #[test]
    fn pair_counts() {
        let q = Query {
            target: "T".into(),
            items: vec![
                (fv(1.0, 0.0, 0.0), true),
                (fv(0.5, 0.0, 0.0), true),
                (fv(0.0, 0.0, 0.0), false),
                (fv(0.1, 0.0, 0.0), false),
                (fv(0.2, 0.0, 0.0), false),
            ],
        };
        let none = Query {
            target: "U".into(),
            items: vec![(fv(0.0, 0.0, 0.0), false)],
        };
        let set = build_pairwise_training(&[q, none]);
        assert_eq!(set.pairs.len(), 6);
        assert_eq!(set.skipped_queries, 1);
        assert_eq!(set.pairs[0].0, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn score_examples() {
        let m = RankerModel {
            weights: [1.0, 1.0, 1.0],
            params: RankerParams::default(),
            seed: 0,
        };
        assert_eq!(score(&m, &fv(0.0, 0.0, 0.0)), 0.0);
        let m = RankerModel {
            weights: [2.0, 0.0, 0.0],
            ..m
        };
        assert_eq!(score(&m, &fv(0.5, 1.0, 1.0)), 1.0);
    }

    #[test]
    fn one_direction_pairs() {
        let pairs = vec![PreferencePair([1.0, 0.0, 0.0]); 10];
        let m = train_ranker(&pairs, RankerParams::default(), 7).unwrap();
        assert!(m.weights[0] > 0.0);
        assert!(pairs.iter().all(|p| m.weights[0] * p.0[0] > 0.0));
        assert!(matches!(
            train_ranker(&[], RankerParams::default(), 7),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn duplicated_pairs_keep_sign_pattern() {
        let pairs = vec![
            PreferencePair([0.5, -0.2, 0.1]),
            PreferencePair([0.3, -0.4, 0.0]),
            PreferencePair([0.2, 0.1, 0.3]),
        ];
        let doubled: Vec<_> = pairs.iter().chain(pairs.iter()).copied().collect();
        let a = train_ranker(&pairs, RankerParams::default(), 1).unwrap();
        let b = train_ranker(&doubled, RankerParams::default(), 1).unwrap();
        for (x, y) in a.weights.iter().zip(&b.weights) {
            assert_eq!(x.signum(), y.signum());
        }
    }

    #[test]
    fn training_is_bit_reproducible() {
        let pairs = vec![
            PreferencePair([0.5, -0.2, 0.1]),
            PreferencePair([-0.1, 0.4, 0.2]),
        ];
        let a = train_ranker(&pairs, RankerParams::default(), 11).unwrap();
        let b = train_ranker(&pairs, RankerParams::default(), 11).unwrap();
        assert_eq!(a.weights.map(f64::to_bits), b.weights.map(f64::to_bits));
    }
}
