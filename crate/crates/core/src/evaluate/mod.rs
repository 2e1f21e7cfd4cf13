//! Gold standard, train/test split, baselines, ranking metrics and the
//! evaluation report.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::FeatureContext;
use crate::corpus::WikiPage;
use crate::linkclassify::{candidate_links, step1_features, Classification, ForestModel};
use crate::refrank::{rank_pool, Recommendation, RecommendOptions, Scorer, Step2Feature};
use crate::{Error, Result};

mod metrics;
mod report;

pub use metrics::{
    f_measure, fractional_ranks, hits_at_k, precision_recall_f_at_k, spearman_rho, MetricsAtK,
};
pub use report::{
    ClassMetrics, EvalReport, PublishedReference, SpearmanSummary, Step1Metrics, SystemRho,
    SystemSummary, TargetEvaluation, TargetRho, TargetSystemResult, Vote, Votes,
};

/// Normalized titles of every reference on `page`.
pub fn gold_references(page: &WikiPage) -> BTreeSet<String> {
    page.references
        .iter()
        .filter(|r| !r.norm_key.is_empty())
        .map(|r| r.norm_key.clone())
        .collect()
}

/// Shuffles `targets` with `seed` and puts the first `⌈ratio·N⌉` (kept within
/// `1..N`) into the training part.
pub fn split_corpus(
    targets: &[String],
    ratio: f64,
    seed: u64,
) -> Result<(Vec<String>, Vec<String>)> {
    if targets.len() < 2 {
        return Err(Error::Configuration(format!(
            "need at least 2 targets to split, got {}",
            targets.len()
        )));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Configuration(format!(
            "split ratio must lie in (0, 1), got {ratio}"
        )));
    }
    let n = targets.len();
    let mut shuffled = targets.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        shuffled.swap(i, j);
    }
    // The epsilon keeps 0.7 * 10 at 7 despite rounding.
    let n_train = (libm::ceil(ratio * n as f64 - 1e-9) as usize).clamp(1, n - 1);
    let test = shuffled.split_off(n_train);
    Ok((shuffled, test))
}

/// Systems compared in the evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum System {
    #[serde(rename = "WikiRef")]
    WikiRef,
    #[serde(rename = "BL-I")]
    BlI,
    #[serde(rename = "BL-II")]
    BlII,
    #[serde(rename = "BL-III")]
    BlIII,
    #[serde(rename = "BL-IV")]
    BlIV,
    #[serde(rename = "BL-V")]
    BlV,
}

impl System {
    pub const ALL: [System; 6] = [
        System::WikiRef,
        System::BlI,
        System::BlII,
        System::BlIII,
        System::BlIV,
        System::BlV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            System::WikiRef => "WikiRef",
            System::BlI => "BL-I",
            System::BlII => "BL-II",
            System::BlIII => "BL-III",
            System::BlIV => "BL-IV",
            System::BlV => "BL-V",
        }
    }

    /// Whether the Step I classifier chooses the links.
    pub fn uses_classifier(self) -> bool {
        !matches!(self, System::BlI | System::BlII)
    }

    /// The single scoring feature of a baseline.
    pub fn baseline_feature(self) -> Option<Step2Feature> {
        match self {
            System::WikiRef => None,
            System::BlI | System::BlIII => Some(Step2Feature::F1Ti),
            System::BlII | System::BlIV => Some(Step2Feature::F2Ti),
            System::BlV => Some(Step2Feature::F1Vec),
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        System::ALL
            .into_iter()
            .find(|sys| sys.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Configuration(format!("unknown system `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub split_ratio: f64,
    pub ks: Vec<usize>,
    pub seed: u64,
    pub systems: Vec<System>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            split_ratio: 0.7,
            ks: vec![1, 2, 3, 4, 5, 10],
            seed: 0,
            systems: System::ALL.to_vec(),
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::Configuration(format!(
                "split_ratio must lie in (0, 1), got {}",
                self.split_ratio
            )));
        }
        if self.ks.is_empty() || self.ks[0] == 0 || self.ks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Configuration(
                "ks must be strictly increasing positive integers".into(),
            ));
        }
        if self.systems.is_empty() {
            return Err(Error::Configuration("no systems selected".into()));
        }
        let distinct: BTreeSet<_> = self.systems.iter().collect();
        if distinct.len() != self.systems.len() {
            return Err(Error::Configuration("systems listed twice".into()));
        }
        Ok(())
    }

    pub fn max_k(&self) -> usize {
        self.ks.last().copied().unwrap_or(1)
    }
}

/// Step I decision for every candidate link of `target`, in link order.
pub fn classified_links<'a>(
    ctx: &FeatureContext<'a>,
    target: &WikiPage,
    forest: &ForestModel,
) -> Result<Vec<(&'a WikiPage, Classification)>> {
    let (links, _) = candidate_links(ctx, target);
    links
        .into_iter()
        .map(|page| Ok((page, forest.classify(&step1_features(ctx, target, page)?))))
        .collect()
}

/// Candidate links that `system` draws references from.
pub fn system_links<'a>(
    ctx: &FeatureContext<'a>,
    system: System,
    target: &WikiPage,
    forest: Option<&ForestModel>,
) -> Result<Vec<&'a WikiPage>> {
    if !system.uses_classifier() {
        return Ok(candidate_links(ctx, target).0);
    }
    let forest = forest.ok_or_else(|| {
        Error::Configuration(format!("{system} needs a trained link classifier"))
    })?;
    Ok(classified_links(ctx, target, forest)?
        .into_iter()
        .filter(|(_, c)| c.label == crate::linkclassify::Label::Relevant)
        .map(|(p, _)| p)
        .collect())
}

/// Top-`k` list of a single-feature baseline, pooled like WikiRef but without
/// excluding references the target already has.
pub fn run_baseline(
    system: System,
    ctx: &FeatureContext<'_>,
    target: &WikiPage,
    forest: Option<&ForestModel>,
    k: usize,
    options: RecommendOptions,
) -> Result<Vec<Recommendation>> {
    let feature = system.baseline_feature().ok_or_else(|| {
        Error::Configuration("WikiRef is not a baseline; use the ranker".into())
    })?;
    let links = system_links(ctx, system, target, forest)?;
    let mut list = rank_pool(ctx, target, &links, Scorer::Feature(feature), options, k)?;
    list.truncate(k);
    Ok(list)
}

/// Ranks for the items of a vote list given a system's full ranked keys.
/// Listed items keep their list order; unlisted items tie for last.
pub fn system_ranks_for_votes(items: &[String], ranked_keys: &[String]) -> Vec<f64> {
    let position: BTreeMap<&str, usize> = ranked_keys
        .iter()
        .enumerate()
        .map(|(i, k)| (k.as_str(), i))
        .collect();
    let scores: Vec<f64> = items
        .iter()
        .map(|item| match position.get(item.as_str()) {
            Some(&p) => (ranked_keys.len() - p) as f64,
            None => 0.0,
        })
        .collect();
    fractional_ranks(&scores)
}
