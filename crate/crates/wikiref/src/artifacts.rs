//! Files written by the pipeline. Every JSON artifact carries a [`Stamp`].

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use wikiref_core::evaluate::{EvalReport, TargetEvaluation};
use wikiref_core::linkclassify::{FeatureScore, ForestModel, LabeledExample};
use wikiref_core::pipeline::{TrainedModels, TrainingLog};
use wikiref_core::refrank::RankerModel;
use wikiref_core::ARTIFACT_VERSION;

use crate::corpus_file::write_bytes;
use crate::error::{AppError, AppResult};

pub const FOREST_FILE: &str = "forest.json";
pub const RANKER_FILE: &str = "ranker.json";
pub const TRAINING_LOG_FILE: &str = "training_log.json";
pub const FEATURES_FILE: &str = "features.csv";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_MD: &str = "report.md";
pub const PER_TARGET_CSV: &str = "per_target.csv";

pub const FOREST_FORMAT: &str = "wikiref-forest";
pub const RANKER_FORMAT: &str = "wikiref-ranker";
pub const FORMAT_VERSION: u32 = 1;

/// Provenance of an artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stamp {
    pub artifact_version: String,
    pub master_seed: u64,
    pub config_sha256: String,
    pub corpus_meta_sha256: String,
}

impl Stamp {
    pub fn new(master_seed: u64, config_sha256: String, corpus_meta_sha256: String) -> Self {
        Stamp {
            artifact_version: ARTIFACT_VERSION.to_string(),
            master_seed,
            config_sha256,
            corpus_meta_sha256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestFile {
    pub format: String,
    pub format_version: u32,
    pub stamp: Stamp,
    pub chi_square: Vec<FeatureScore>,
    pub model: ForestModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankerFile {
    pub format: String,
    pub format_version: u32,
    pub stamp: Stamp,
    pub model: RankerModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingLogFile {
    pub stamp: Stamp,
    pub train_targets: Vec<String>,
    pub held_out_targets: Vec<String>,
    #[serde(flatten)]
    pub log: TrainingLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub stamp: Stamp,
    #[serde(flatten)]
    pub report: EvalReport,
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("artifact serializes");
    bytes.push(b'\n');
    bytes
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> AppResult<()> {
    write_bytes(path, &to_json_bytes(value))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> AppResult<T> {
    let bytes = std::fs::read(path).map_err(|e| AppError::read(path, e))?;
    let mut de = serde_json::Deserializer::from_slice(&bytes);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        AppError::Input(format!("{}: field `{}`: {}", path.display(), e.path(), e.inner()))
    })
}

pub fn write_models(dir: &Path, stamp: &Stamp, models: &TrainedModels) -> AppResult<()> {
    write_json(
        &dir.join(FOREST_FILE),
        &ForestFile {
            format: FOREST_FORMAT.into(),
            format_version: FORMAT_VERSION,
            stamp: stamp.clone(),
            chi_square: models.chi_square.clone(),
            model: models.forest.clone(),
        },
    )?;
    write_json(
        &dir.join(RANKER_FILE),
        &RankerFile {
            format: RANKER_FORMAT.into(),
            format_version: FORMAT_VERSION,
            stamp: stamp.clone(),
            model: models.ranker.clone(),
        },
    )
}

/// Loads both models and checks they were trained on this corpus with this
/// master seed.
pub fn read_models(dir: &Path, expected: &Stamp) -> AppResult<TrainedModels> {
    let forest_path = dir.join(FOREST_FILE);
    let ranker_path = dir.join(RANKER_FILE);
    for p in [&forest_path, &ranker_path] {
        if !p.is_file() {
            return Err(AppError::Config(format!(
                "model file {} is missing; run `wikiref train` first",
                p.display()
            )));
        }
    }
    let forest: ForestFile = read_json(&forest_path)?;
    let ranker: RankerFile = read_json(&ranker_path)?;
    check_header(&forest_path, &forest.format, forest.format_version, FOREST_FORMAT, &forest.stamp, expected)?;
    check_header(&ranker_path, &ranker.format, ranker.format_version, RANKER_FORMAT, &ranker.stamp, expected)?;
    forest
        .model
        .validate()
        .map_err(|e| AppError::Input(format!("{}: {e}", forest_path.display())))?;
    Ok(TrainedModels {
        forest: forest.model,
        ranker: ranker.model,
        chi_square: forest.chi_square,
    })
}

fn check_header(
    path: &Path,
    format: &str,
    version: u32,
    expected_format: &str,
    stamp: &Stamp,
    expected: &Stamp,
) -> AppResult<()> {
    if format != expected_format || version != FORMAT_VERSION {
        return Err(AppError::Input(format!(
            "{}: expected {expected_format} version {FORMAT_VERSION}, found {format} version {version}",
            path.display()
        )));
    }
    if stamp.corpus_meta_sha256 != expected.corpus_meta_sha256 {
        return Err(AppError::Config(format!(
            "{} was trained on a different corpus; retrain",
            path.display()
        )));
    }
    if stamp.master_seed != expected.master_seed {
        return Err(AppError::Config(format!(
            "{} was trained with seed {}, current seed is {}; retrain",
            path.display(),
            stamp.master_seed,
            expected.master_seed
        )));
    }
    Ok(())
}

/// Feature matrix with header `target,wikilink,tis,os,is,oss,iss,vs,osvs,isvs,label`.
pub fn features_csv(examples: &[LabeledExample]) -> AppResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| AppError::Internal(format!("csv: {e}"));
    w.write_record([
        "target", "wikilink", "tis", "os", "is", "oss", "iss", "vs", "osvs", "isvs", "label",
    ])
    .map_err(internal)?;
    for e in examples {
        let mut row = vec![e.target_title.clone(), e.wikilink_title.clone()];
        row.extend(e.features.to_array().iter().map(|x| x.to_string()));
        row.push(e.label.as_str().to_string());
        w.write_record(&row).map_err(internal)?;
    }
    w.into_inner().map_err(|e| AppError::Internal(format!("csv: {e}")))
}

/// One row per (target, system, k).
pub fn per_target_csv(targets: &[TargetEvaluation]) -> AppResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| AppError::Internal(format!("csv: {e}"));
    w.write_record([
        "target",
        "system",
        "k",
        "precision",
        "recall",
        "f_measure",
        "reachable_recall",
        "gold",
        "links",
        "predicted_relevant",
    ])
    .map_err(internal)?;
    for t in targets {
        for s in &t.systems {
            for (m, reach) in s.metrics.iter().zip(&s.reachable_recall) {
                w.write_record([
                    t.target.clone(),
                    s.system.name().to_string(),
                    m.k.to_string(),
                    m.precision.to_string(),
                    m.recall.to_string(),
                    m.f_measure.to_string(),
                    reach.to_string(),
                    t.gold_size.to_string(),
                    t.links.to_string(),
                    t.predicted_relevant.to_string(),
                ])
                .map_err(internal)?;
            }
        }
    }
    w.into_inner().map_err(|e| AppError::Internal(format!("csv: {e}")))
}
