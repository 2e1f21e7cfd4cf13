use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{EvalConfig, MetricsAtK, System};
use crate::linkclassify::FeatureScore;

/// One human-judged recommendation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vote {
    pub ref_key: String,
    pub votes: f64,
}

/// Target title to judged recommendations.
pub type Votes = BTreeMap<String, Vec<Vote>>;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub support: usize,
}

impl ClassMetrics {
    pub fn from_counts(true_positive: usize, predicted: usize, actual: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(true_positive, predicted);
        let recall = ratio(true_positive, actual);
        ClassMetrics {
            precision,
            recall,
            f_measure: super::f_measure(precision, recall),
            support: actual,
        }
    }
}

/// Link classification quality over all test wikilinks.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Step1Metrics {
    pub relevant: ClassMetrics,
    pub irrelevant: ClassMetrics,
    pub accuracy: f64,
    pub links: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSystemResult {
    pub system: System,
    /// Per-k metrics in config order.
    pub metrics: Vec<MetricsAtK>,
    /// Recall against the gold references that the system's links can reach.
    pub reachable_recall: Vec<f64>,
    pub reachable_gold: usize,
    pub has_candidates: bool,
    /// Norm keys of the top `max k` recommendations.
    pub top: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetEvaluation {
    pub target: String,
    pub gold_size: usize,
    pub links: usize,
    pub predicted_relevant: usize,
    /// Step I counts: [true relevant, predicted relevant, both].
    pub link_counts: [usize; 3],
    pub systems: Vec<TargetSystemResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub system: System,
    /// Macro averages over all test targets.
    pub at_k: Vec<MetricsAtK>,
    /// Macro averages over targets where the system had any candidate link.
    pub with_candidates: Vec<MetricsAtK>,
    pub with_candidates_targets: usize,
    pub reachable_recall: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRho {
    pub target: String,
    pub items: usize,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemRho {
    pub system: System,
    pub average_rho: f64,
    pub targets: Vec<TargetRho>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpearmanSummary {
    pub systems: Vec<SystemRho>,
    /// Voted targets that were skipped (not in the corpus or fewer than two items).
    pub skipped_targets: Vec<String>,
}

/// Published figures, kept for comparison only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedReference {
    pub cs_wikiref_at_1: MetricsAtK,
    pub cs_best_baseline: String,
    pub cs_best_baseline_precision_at_1: f64,
    pub ph_wikiref_precision_at_1: f64,
    pub average_rho_wikiref: f64,
    pub average_rho_best_baseline: f64,
    pub note: String,
}

impl Default for PublishedReference {
    fn default() -> Self {
        PublishedReference {
            cs_wikiref_at_1: MetricsAtK {
                k: 1,
                precision: 0.44,
                recall: 0.21,
                f_measure: 0.28,
            },
            cs_best_baseline: String::from("BL-III"),
            cs_best_baseline_precision_at_1: 0.38,
            ph_wikiref_precision_at_1: 0.45,
            average_rho_wikiref: 0.203,
            average_rho_best_baseline: 0.168,
            note: String::from(
                "Published results on a full Wikipedia crawl; not comparable to small corpora.",
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub artifact_version: String,
    pub config: EvalConfig,
    pub train_targets: Vec<String>,
    pub test_targets: Vec<String>,
    pub test_target_count: usize,
    pub step1: Step1Metrics,
    pub chi_square: Vec<FeatureScore>,
    pub systems: Vec<SystemSummary>,
    pub targets: Vec<TargetEvaluation>,
    pub spearman: Option<SpearmanSummary>,
    pub published_reference: PublishedReference,
}

impl EvalReport {
    pub fn system(&self, system: System) -> Option<&SystemSummary> {
        self.systems.iter().find(|s| s.system == system)
    }

    /// Macro-averaged metrics of `system` at cutoff `k`.
    pub fn at(&self, system: System, k: usize) -> Option<MetricsAtK> {
        self.system(system)?.at_k.iter().find(|m| m.k == k).copied()
    }
}
