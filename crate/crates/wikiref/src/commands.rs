use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wikiref_core::corpus::{canonicalize_title, Corpus};
use wikiref_core::evaluate::{split_corpus, EvalConfig, Votes};
use wikiref_core::pipeline::{
    assemble_report, evaluate_target, fit_models, recommend_for, spearman_summary,
    target_examples, target_query, TrainedModels, TrainingLog,
};
use wikiref_core::refrank::RecommendOptions;
use wikiref_core::seed::{derive_seed, STAGE_SPLIT};

use crate::artifacts::{
    features_csv, per_target_csv, read_json, read_models, write_json, write_models, ReportFile,
    Stamp, TrainingLogFile, FEATURES_FILE, PER_TARGET_CSV, REPORT_JSON, REPORT_MD,
    TRAINING_LOG_FILE,
};
use crate::corpus_file::{read_pages, write_bytes, write_corpus, CorpusMeta};
use crate::error::{AppError, AppResult};
use crate::render::report_markdown;
use crate::workspace::Workspace;

/// Validates `input` (records or raw wikitext pages) and writes it to
/// `output` in the record format, plus the meta sidecar.
pub fn ingest(input: &Path, output: &Path) -> AppResult<CorpusMeta> {
    let pages = read_pages(&[input.to_path_buf()])?;
    let corpus = Corpus::from_pages(pages).map_err(|e| AppError::stage("ingest", e))?;
    write_corpus(output, &corpus)
}

/// Train/held-out partition of the workspace targets.
pub fn split(ws: &Workspace, eval: &EvalConfig) -> AppResult<(Vec<String>, Vec<String>)> {
    let targets = ws.targets()?;
    split_corpus(&targets, eval.split_ratio, derive_seed(ws.settings.seed, STAGE_SPLIT))
        .map_err(|e| AppError::stage("split", e))
}

pub struct TrainOutcome {
    pub models: TrainedModels,
    pub log: TrainingLog,
    pub train_targets: Vec<String>,
    pub test_targets: Vec<String>,
}

/// Split, label, rebalance, rank features, fit both models; writes the model
/// files, training log and feature matrix.
pub fn train(ws: &Workspace) -> AppResult<TrainOutcome> {
    let eval = ws.settings.eval_config();
    let (train_targets, test_targets) = split(ws, &eval)?;
    let per_target = ws.install(|| {
        train_targets
            .par_iter()
            .map(|t| {
                let ctx = ws.ctx();
                let (examples, missing) = target_examples(&ctx, t)?;
                let query = target_query(&ctx, t)?;
                Ok((examples, missing, query))
            })
            .collect::<wikiref_core::Result<Vec<_>>>()
    })?
    .map_err(|e| AppError::stage("labeling", e))?;

    let mut examples = Vec::new();
    let mut missing = 0;
    let mut queries = Vec::with_capacity(per_target.len());
    for (ex, m, q) in per_target {
        examples.extend(ex);
        missing += m;
        queries.push(q);
    }
    let matrix = features_csv(&examples)?;
    let (models, log) = fit_models(examples, missing, &queries, &ws.settings.config.train, ws.settings.seed)
        .map_err(|e| AppError::stage("training", e))?;

    let stamp = ws.stamp();
    let out = &ws.settings.out;
    write_models(&ws.settings.models_dir(), &stamp, &models)?;
    write_json(
        &out.join(TRAINING_LOG_FILE),
        &TrainingLogFile {
            stamp,
            train_targets: train_targets.clone(),
            held_out_targets: test_targets.clone(),
            log: log.clone(),
        },
    )?;
    write_bytes(&out.join(FEATURES_FILE), &matrix)?;
    Ok(TrainOutcome {
        models,
        log,
        train_targets,
        test_targets,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationItem {
    pub rank: usize,
    pub score: f64,
    pub ref_title: String,
    pub ref_raw: String,
    pub source_wikilink: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationOutput {
    pub target: String,
    pub items: Vec<RecommendationItem>,
    pub stamp: Stamp,
}

pub fn recommend(
    ws: &Workspace,
    target: &str,
    k: usize,
    options: RecommendOptions,
) -> AppResult<RecommendationOutput> {
    if k == 0 {
        return Err(AppError::Config("k must be at least 1".into()));
    }
    let title = canonicalize_title(target);
    let page = ws
        .corpus
        .get(&title)
        .ok_or_else(|| AppError::Input(format!("unknown target `{target}`")))?;
    let stamp = ws.stamp();
    let models = read_models(&ws.settings.models_dir(), &stamp)?;
    let recs = recommend_for(&ws.ctx(), page, &models, k, options)
        .map_err(|e| AppError::stage("recommend", e))?;
    Ok(RecommendationOutput {
        target: page.title.clone(),
        items: recs
            .into_iter()
            .map(|r| RecommendationItem {
                rank: r.rank,
                score: r.score,
                ref_title: r.reference.title,
                ref_raw: r.reference.raw,
                source_wikilink: r.source_wikilink,
            })
            .collect(),
        stamp,
    })
}

/// Evaluates on the held-out targets, training first when `train_first` is
/// set (otherwise the saved models are used). Writes report.json,
/// report.md and the per-target CSV.
pub fn evaluate(ws: &Workspace, train_first: bool) -> AppResult<ReportFile> {
    let eval = ws.settings.eval_config();
    let (models, train_targets, test_targets) = if train_first {
        let t = train(ws)?;
        (t.models, t.train_targets, t.test_targets)
    } else {
        let models = read_models(&ws.settings.models_dir(), &ws.stamp())?;
        let (train_targets, test_targets) = split(ws, &eval)?;
        (models, train_targets, test_targets)
    };
    let mode = ws.settings.config.recommend.mode;
    let rows = ws
        .install(|| {
            test_targets
                .par_iter()
                .map(|t| evaluate_target(&ws.ctx(), t, &models, &eval, mode))
                .collect::<wikiref_core::Result<Vec<_>>>()
        })?
        .map_err(|e| AppError::stage("evaluation", e))?;
    let spearman = match ws.settings.votes_path() {
        Some(path) => {
            let votes: Votes = read_json(&path)?;
            Some(
                spearman_summary(&ws.ctx(), &votes, &models, &eval.systems, mode, eval.max_k())
                    .map_err(|e| AppError::stage("rank correlation", e))?,
            )
        }
        None => None,
    };
    let report = assemble_report(&eval, train_targets, test_targets, &models, rows, spearman)
        .map_err(|e| AppError::stage("report", e))?;
    let file = ReportFile {
        stamp: ws.stamp(),
        report,
    };
    write_report_files(&ws.settings.out, &file)?;
    Ok(file)
}

pub fn write_report_files(out: &Path, file: &ReportFile) -> AppResult<()> {
    write_json(&out.join(REPORT_JSON), file)?;
    write_bytes(&out.join(REPORT_MD), report_markdown(&file.report, &file.stamp).as_bytes())?;
    write_bytes(&out.join(PER_TARGET_CSV), &per_target_csv(&file.report.targets)?)
}

/// Re-renders the markdown and CSV views of an existing report.json into
/// `out`; returns the markdown.
pub fn report(report_json: &Path, out: &Path) -> AppResult<String> {
    let file: ReportFile = read_json(report_json)?;
    write_bytes(&out.join(REPORT_MD), report_markdown(&file.report, &file.stamp).as_bytes())?;
    write_bytes(&out.join(PER_TARGET_CSV), &per_target_csv(&file.report.targets)?)?;
    Ok(report_markdown(&file.report, &file.stamp))
}
