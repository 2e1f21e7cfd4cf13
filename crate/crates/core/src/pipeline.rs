//! Training and evaluation runs built from the per-module operations.
//!
//! The per-target functions only read shared state, so callers may run them
//! in parallel and hand the results, in target order, to the sequential
//! assembly functions.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::context::FeatureContext;
use crate::corpus::{Anchor, WikiPage};
use crate::evaluate::{
    classified_links, fractional_ranks, gold_references, precision_recall_f_at_k,
    spearman_rho, split_corpus, system_ranks_for_votes, ClassMetrics, EvalConfig, EvalReport,
    MetricsAtK, PublishedReference, SpearmanSummary, Step1Metrics, System, SystemRho,
    SystemSummary, TargetEvaluation, TargetRho, TargetSystemResult, Votes,
};
use crate::linkclassify::{
    candidate_links, chi_square_rank, enn_undersample, label_examples, train_forest, EnnParams,
    FeatureScore, ForestModel, ForestParams, Label, LabeledExample,
};
use crate::refrank::{
    build_pairwise_training, rank_pool, step2_features, train_ranker, PoolMode, Query,
    RankerModel, RankerParams, RecommendOptions, Recommendation, Scorer,
};
use crate::seed::{derive_seed, STAGE_FOREST, STAGE_RANKER, STAGE_SPLIT};
use crate::{Error, Result, ARTIFACT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub forest: ForestParams,
    pub enn: EnnParams,
    pub chi_square_bins: usize,
    pub ranker: RankerParams,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            forest: ForestParams::default(),
            enn: EnnParams::default(),
            chi_square_bins: 10,
            ranker: RankerParams::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.forest.validate()?;
        if self.enn.k_neighbors == 0 {
            return Err(Error::Configuration("enn.k_neighbors must be at least 1".into()));
        }
        if self.chi_square_bins == 0 {
            return Err(Error::Configuration("chi_square_bins must be at least 1".into()));
        }
        if !(self.ranker.c > 0.0 && self.ranker.c.is_finite()) {
            return Err(Error::Configuration("ranker.c must be positive".into()));
        }
        if self.ranker.epochs == 0 {
            return Err(Error::Configuration("ranker.epochs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModels {
    pub forest: ForestModel,
    pub ranker: RankerModel,
    pub chi_square: Vec<FeatureScore>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainingLog {
    pub targets: usize,
    pub examples: usize,
    pub relevant_examples: usize,
    pub skipped_missing_links: usize,
    pub kept_after_enn: usize,
    pub queries: usize,
    pub pairs: usize,
    pub skipped_queries: usize,
    pub chi_square: Vec<FeatureScore>,
}

/// Pages usable as targets: at least one reference and at least one
/// wikilink to another page of the corpus. Corpus order.
pub fn eligible_targets(ctx: &FeatureContext<'_>) -> Vec<String> {
    ctx.corpus
        .pages()
        .iter()
        .filter(|p| !gold_references(p).is_empty() && !candidate_links(ctx, p).0.is_empty())
        .map(|p| p.title.clone())
        .collect()
}

/// Labeled Step I examples of one training target.
pub fn target_examples(ctx: &FeatureContext<'_>, target: &str) -> Result<(Vec<LabeledExample>, usize)> {
    let page = ctx.page(target)?;
    let outcome = label_examples(ctx, page, &gold_references(page))?;
    Ok((outcome.examples, outcome.skipped_missing))
}

/// Step II training query of one target: every reference of its gold-relevant
/// links with gold membership.
pub fn target_query(ctx: &FeatureContext<'_>, target: &str) -> Result<Query> {
    let page = ctx.page(target)?;
    let gold = gold_references(page);
    let (links, _) = candidate_links(ctx, page);
    let mut items = Vec::new();
    for link in links {
        let relevant = link.references.iter().any(|r| gold.contains(&r.norm_key));
        if !relevant {
            continue;
        }
        for (i, reference) in link.references.iter().enumerate() {
            if reference.norm_key.is_empty() {
                continue;
            }
            let features = step2_features(ctx, page, link, i)?;
            items.push((features, gold.contains(&reference.norm_key)));
        }
    }
    Ok(Query {
        target: page.title.clone(),
        items,
    })
}

/// Fits both models from per-target examples and queries (given in target
/// order). Stage seeds are derived from `seed`.
pub fn fit_models(
    examples: Vec<LabeledExample>,
    skipped_missing_links: usize,
    queries: &[Query],
    config: &TrainConfig,
    seed: u64,
) -> Result<(TrainedModels, TrainingLog)> {
    config.validate()?;
    let relevant_examples = examples.iter().filter(|e| e.label == Label::Relevant).count();
    let total = examples.len();
    let balanced = enn_undersample(&examples, config.enn)?;
    let chi_square = chi_square_rank(&balanced, config.chi_square_bins);
    let forest = train_forest(&balanced, &config.forest, derive_seed(seed, STAGE_FOREST))?;
    let pairs = build_pairwise_training(queries);
    let ranker = train_ranker(&pairs.pairs, config.ranker, derive_seed(seed, STAGE_RANKER))?;
    let log = TrainingLog {
        targets: queries.len(),
        examples: total,
        relevant_examples,
        skipped_missing_links,
        kept_after_enn: balanced.len(),
        queries: queries.len(),
        pairs: pairs.pairs.len(),
        skipped_queries: pairs.skipped_queries,
        chi_square: chi_square.clone(),
    };
    Ok((
        TrainedModels {
            forest,
            ranker,
            chi_square,
        },
        log,
    ))
}

/// Sequential training over `targets`.
pub fn train(
    ctx: &FeatureContext<'_>,
    targets: &[String],
    config: &TrainConfig,
    seed: u64,
) -> Result<(TrainedModels, TrainingLog)> {
    let mut examples = Vec::new();
    let mut missing = 0;
    let mut queries = Vec::with_capacity(targets.len());
    for t in targets {
        let (ex, m) = target_examples(ctx, t)?;
        examples.extend(ex);
        missing += m;
        queries.push(target_query(ctx, t)?);
    }
    fit_models(examples, missing, &queries, config, seed)
}

/// WikiRef recommendations: classifier-relevant links ranked by the ranker.
pub fn recommend_for(
    ctx: &FeatureContext<'_>,
    target: &WikiPage,
    models: &TrainedModels,
    k: usize,
    options: RecommendOptions,
) -> Result<Vec<Recommendation>> {
    let links = relevant_links(ctx, target, &models.forest)?;
    crate::refrank::recommend(ctx, target, &links, Scorer::Ranker(&models.ranker), k, options)
}

fn relevant_links<'a>(
    ctx: &FeatureContext<'a>,
    target: &WikiPage,
    forest: &ForestModel,
) -> Result<Vec<&'a WikiPage>> {
    Ok(classified_links(ctx, target, forest)?
        .into_iter()
        .filter(|(_, c)| c.label == Label::Relevant)
        .map(|(p, _)| p)
        .collect())
}

/// Full ranked list of `system` for one target, existing references kept.
pub fn system_ranking(
    ctx: &FeatureContext<'_>,
    target: &WikiPage,
    system: System,
    models: &TrainedModels,
    mode: PoolMode,
    per_link_k: usize,
) -> Result<Vec<Recommendation>> {
    let links = if system.uses_classifier() {
        relevant_links(ctx, target, &models.forest)?
    } else {
        candidate_links(ctx, target).0
    };
    let scorer = match system.baseline_feature() {
        Some(f) => Scorer::Feature(f),
        None => Scorer::Ranker(&models.ranker),
    };
    let options = RecommendOptions {
        exclude_existing: false,
        mode,
    };
    rank_pool(ctx, target, &links, scorer, options, per_link_k)
}

/// Metrics of every configured system on one test target.
pub fn evaluate_target(
    ctx: &FeatureContext<'_>,
    target: &str,
    models: &TrainedModels,
    config: &EvalConfig,
    mode: PoolMode,
) -> Result<TargetEvaluation> {
    let page = ctx.page(target)?;
    let gold = gold_references(page);
    let classified = classified_links(ctx, page, &models.forest)?;
    let mut link_counts = [0usize; 3];
    for (link, c) in &classified {
        let truly = link.references.iter().any(|r| gold.contains(&r.norm_key));
        let predicted = c.label == Label::Relevant;
        link_counts[0] += truly as usize;
        link_counts[1] += predicted as usize;
        link_counts[2] += (truly && predicted) as usize;
    }
    let predicted_relevant = link_counts[1];
    let max_k = config.max_k();

    let mut systems = Vec::with_capacity(config.systems.len());
    for &system in &config.systems {
        let links: Vec<&WikiPage> = if system.uses_classifier() {
            classified
                .iter()
                .filter(|(_, c)| c.label == Label::Relevant)
                .map(|(p, _)| *p)
                .collect()
        } else {
            classified.iter().map(|(p, _)| *p).collect()
        };
        let scorer = match system.baseline_feature() {
            Some(f) => Scorer::Feature(f),
            None => Scorer::Ranker(&models.ranker),
        };
        let options = RecommendOptions {
            exclude_existing: false,
            mode,
        };
        let ranked = rank_pool(ctx, page, &links, scorer, options, max_k)?;
        let keys: Vec<&str> = ranked.iter().map(|r| r.reference.norm_key.as_str()).collect();
        let reachable: BTreeSet<String> = links
            .iter()
            .flat_map(|l| l.references.iter())
            .filter(|r| gold.contains(&r.norm_key))
            .map(|r| r.norm_key.clone())
            .collect();
        let metrics: Vec<MetricsAtK> = config
            .ks
            .iter()
            .map(|&k| precision_recall_f_at_k(&keys, &gold, k))
            .collect();
        let reachable_recall = config
            .ks
            .iter()
            .map(|&k| precision_recall_f_at_k(&keys, &reachable, k).recall)
            .collect();
        systems.push(TargetSystemResult {
            system,
            metrics,
            reachable_recall,
            reachable_gold: reachable.len(),
            has_candidates: !links.is_empty(),
            top: keys.iter().take(max_k).map(|k| String::from(*k)).collect(),
        });
    }
    Ok(TargetEvaluation {
        target: page.title.clone(),
        gold_size: gold.len(),
        links: classified.len(),
        predicted_relevant,
        link_counts,
        systems,
    })
}

fn mean_metrics(rows: &[&[MetricsAtK]], ks: &[usize]) -> Vec<MetricsAtK> {
    ks.iter()
        .enumerate()
        .map(|(i, &k)| {
            let n = rows.len();
            if n == 0 {
                return MetricsAtK {
                    k,
                    ..MetricsAtK::default()
                };
            }
            let sum = |f: fn(&MetricsAtK) -> f64| rows.iter().map(|r| f(&r[i])).sum::<f64>();
            MetricsAtK {
                k,
                precision: sum(|m| m.precision) / n as f64,
                recall: sum(|m| m.recall) / n as f64,
                f_measure: sum(|m| m.f_measure) / n as f64,
            }
        })
        .collect()
}

/// Spearman ρ between each system's ranking and the human votes, for every
/// voted target in the corpus with at least two judged items.
pub fn spearman_summary(
    ctx: &FeatureContext<'_>,
    votes: &Votes,
    models: &TrainedModels,
    systems: &[System],
    mode: PoolMode,
    per_link_k: usize,
) -> Result<SpearmanSummary> {
    let mut skipped = Vec::new();
    let mut per_system: Vec<SystemRho> = systems
        .iter()
        .map(|&system| SystemRho {
            system,
            average_rho: 0.0,
            targets: Vec::new(),
        })
        .collect();
    for (target, judged) in votes {
        let page = match ctx.corpus.get(target) {
            Some(p) if judged.len() >= 2 => p,
            _ => {
                skipped.push(target.clone());
                continue;
            }
        };
        let items: Vec<String> = judged
            .iter()
            .map(|v| crate::corpus::normalize_ref_title(&v.ref_key))
            .collect();
        let vote_ranks = fractional_ranks(&judged.iter().map(|v| v.votes).collect::<Vec<_>>());
        for entry in per_system.iter_mut() {
            let ranked = system_ranking(ctx, page, entry.system, models, mode, per_link_k)?;
            let keys: Vec<String> = ranked.into_iter().map(|r| r.reference.norm_key).collect();
            let rho = spearman_rho(&vote_ranks, &system_ranks_for_votes(&items, &keys))?;
            entry.targets.push(TargetRho {
                target: target.clone(),
                items: items.len(),
                rho,
            });
        }
    }
    for entry in per_system.iter_mut() {
        if !entry.targets.is_empty() {
            entry.average_rho =
                entry.targets.iter().map(|t| t.rho).sum::<f64>() / entry.targets.len() as f64;
        }
    }
    Ok(SpearmanSummary {
        systems: per_system,
        skipped_targets: skipped,
    })
}

/// Builds the report from per-target evaluations given in test-target order.
pub fn assemble_report(
    config: &EvalConfig,
    train_targets: Vec<String>,
    test_targets: Vec<String>,
    models: &TrainedModels,
    targets: Vec<TargetEvaluation>,
    spearman: Option<SpearmanSummary>,
) -> Result<EvalReport> {
    if targets.is_empty() {
        return Err(Error::Configuration("test split is empty".into()));
    }
    let mut counts = [0usize; 4]; // true relevant, predicted relevant, both, links
    for t in &targets {
        counts[0] += t.link_counts[0];
        counts[1] += t.link_counts[1];
        counts[2] += t.link_counts[2];
        counts[3] += t.links;
    }
    let [actual, predicted, both, links] = counts;
    let true_negative = links - actual - predicted + both;
    let step1 = Step1Metrics {
        relevant: ClassMetrics::from_counts(both, predicted, actual),
        irrelevant: ClassMetrics::from_counts(true_negative, links - predicted, links - actual),
        accuracy: if links == 0 {
            0.0
        } else {
            (both + true_negative) as f64 / links as f64
        },
        links,
    };

    let mut systems = Vec::with_capacity(config.systems.len());
    for (i, &system) in config.systems.iter().enumerate() {
        let rows: Vec<&TargetSystemResult> = targets.iter().map(|t| &t.systems[i]).collect();
        if rows.iter().any(|r| r.system != system) {
            return Err(Error::Consistency(format!("target rows disagree on system {system}")));
        }
        let all: Vec<&[MetricsAtK]> = rows.iter().map(|r| r.metrics.as_slice()).collect();
        let with: Vec<&[MetricsAtK]> = rows
            .iter()
            .filter(|r| r.has_candidates)
            .map(|r| r.metrics.as_slice())
            .collect();
        let reachable_recall = (0..config.ks.len())
            .map(|j| rows.iter().map(|r| r.reachable_recall[j]).sum::<f64>() / rows.len() as f64)
            .collect();
        systems.push(SystemSummary {
            system,
            at_k: mean_metrics(&all, &config.ks),
            with_candidates: mean_metrics(&with, &config.ks),
            with_candidates_targets: with.len(),
            reachable_recall,
        });
    }

    Ok(EvalReport {
        artifact_version: String::from(ARTIFACT_VERSION),
        config: config.clone(),
        train_targets,
        test_target_count: test_targets.len(),
        test_targets,
        step1,
        chi_square: models.chi_square.clone(),
        systems,
        targets,
        spearman,
        published_reference: PublishedReference::default(),
    })
}

/// Split, train on the training part, evaluate on the rest. Sequential.
pub fn evaluation_report(
    ctx: &FeatureContext<'_>,
    targets: &[String],
    config: &EvalConfig,
    train_config: &TrainConfig,
    mode: PoolMode,
    votes: Option<&Votes>,
) -> Result<(EvalReport, TrainedModels, TrainingLog)> {
    config.validate()?;
    let (train_targets, test_targets) =
        split_corpus(targets, config.split_ratio, derive_seed(config.seed, STAGE_SPLIT))?;
    let (models, log) = train(ctx, &train_targets, train_config, config.seed)?;
    let rows = test_targets
        .iter()
        .map(|t| evaluate_target(ctx, t, &models, config, mode))
        .collect::<Result<Vec<_>>>()?;
    let spearman = votes
        .map(|v| spearman_summary(ctx, v, &models, &config.systems, mode, config.max_k()))
        .transpose()?;
    let report = assemble_report(config, train_targets, test_targets, &models, rows, spearman)?;
    Ok((report, models, log))
}

/// Citation context of `reference_index` on `page`, for display.
pub fn reference_context(page: &WikiPage, reference_index: usize) -> Result<&str> {
    page.citation_context(Anchor::Reference(reference_index))
}
