//! Run configuration, read from a TOML file.
//!
//! ```toml
//! seed = 7
//! corpus = "corpus.jsonl"          # or a list of files
//! vectors = "vectors.txt"
//! vectors_format = "words"         # or "precomputed"
//! targets = ["Graph theory"]       # optional; default: every eligible page
//! votes = "votes.json"             # optional
//! out = "out"
//!
//! [train.forest]
//! n_trees = 100
//! features = ["tis", "oss"]
//!
//! [evaluate]
//! split_ratio = 0.7
//! ks = [1, 2, 3, 4, 5, 10]
//! systems = ["WikiRef", "BL-I"]
//!
//! [recommend]
//! k = 5
//! exclude_existing = true
//! mode = "global"                  # or "per-link"
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wikiref_core::evaluate::{EvalConfig, System};
use wikiref_core::pipeline::TrainConfig;
use wikiref_core::refrank::{PoolMode, RecommendOptions};

use crate::error::{AppError, AppResult};

pub const DEFAULT_OUT: &str = "wikiref-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(PathBuf),
    Many(Vec<PathBuf>),
}

impl OneOrMany {
    pub fn paths(&self) -> Vec<&Path> {
        match self {
            OneOrMany::One(p) => vec![p.as_path()],
            OneOrMany::Many(ps) => ps.iter().map(PathBuf::as_path).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorFormat {
    /// One vector per token; texts are embedded as token averages.
    #[default]
    Words,
    /// One vector per text, keyed by document id.
    Precomputed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    pub split_ratio: f64,
    pub ks: Vec<usize>,
    pub systems: Vec<System>,
}

impl Default for EvaluateSection {
    fn default() -> Self {
        let d = EvalConfig::default();
        EvaluateSection {
            split_ratio: d.split_ratio,
            ks: d.ks,
            systems: d.systems,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecommendSection {
    pub k: usize,
    pub exclude_existing: bool,
    pub mode: PoolMode,
}

impl Default for RecommendSection {
    fn default() -> Self {
        RecommendSection {
            k: 5,
            exclude_existing: true,
            mode: PoolMode::Global,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub corpus: OneOrMany,
    #[serde(default)]
    pub vectors: Option<PathBuf>,
    #[serde(default)]
    pub vectors_format: VectorFormat,
    #[serde(default)]
    pub targets: Option<Vec<String>>,
    #[serde(default)]
    pub votes: Option<PathBuf>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub evaluate: EvaluateSection,
    #[serde(default)]
    pub recommend: RecommendSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> AppResult<Self> {
        toml::from_str(text).map_err(|e| AppError::Config(format!("invalid config: {e}")))
    }
}

/// Command-line and environment overrides.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

/// A validated configuration with overrides applied and paths resolved.
#[derive(Debug, Clone)]
pub struct Settings {
    pub config: RunConfig,
    pub base_dir: PathBuf,
    pub seed: u64,
    pub out: PathBuf,
    pub jobs: Option<usize>,
}

impl Settings {
    pub fn load(path: &Path, overrides: &Overrides) -> AppResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let config = RunConfig::parse(&text)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Settings::from_config(config, base_dir, overrides)
    }

    pub fn from_config(config: RunConfig, base_dir: PathBuf, overrides: &Overrides) -> AppResult<Self> {
        let seed = overrides.seed.unwrap_or(config.seed);
        let out = match (&overrides.out, &config.out) {
            (Some(o), _) => o.clone(),
            (None, Some(o)) => base_dir.join(o),
            (None, None) => PathBuf::from(DEFAULT_OUT),
        };
        let settings = Settings {
            config,
            base_dir,
            seed,
            out,
            jobs: overrides.jobs,
        };
        settings.validate()?;
        Ok(settings)
    }

    fn validate(&self) -> AppResult<()> {
        let c = &self.config;
        for p in self.corpus_paths() {
            require_file(&p, "corpus")?;
        }
        if c.corpus.paths().is_empty() {
            return Err(AppError::Config("no corpus file given".into()));
        }
        if let Some(v) = self.vectors_path() {
            require_file(&v, "vectors")?;
        }
        if let Some(v) = self.votes_path() {
            require_file(&v, "votes")?;
        }
        c.train
            .validate()
            .map_err(|e| AppError::Config(format!("[train]: {e}")))?;
        self.eval_config()
            .validate()
            .map_err(|e| AppError::Config(format!("[evaluate]: {e}")))?;
        if c.recommend.k == 0 {
            return Err(AppError::Config("[recommend]: k must be at least 1".into()));
        }
        if let Some(targets) = &c.targets {
            if targets.is_empty() {
                return Err(AppError::Config("targets list is empty".into()));
            }
        }
        if self.jobs == Some(0) {
            return Err(AppError::Config("--jobs must be at least 1".into()));
        }
        Ok(())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn corpus_paths(&self) -> Vec<PathBuf> {
        self.config
            .corpus
            .paths()
            .into_iter()
            .map(|p| self.resolve(p))
            .collect()
    }

    pub fn vectors_path(&self) -> Option<PathBuf> {
        self.config.vectors.as_deref().map(|p| self.resolve(p))
    }

    pub fn votes_path(&self) -> Option<PathBuf> {
        self.config.votes.as_deref().map(|p| self.resolve(p))
    }

    pub fn eval_config(&self) -> EvalConfig {
        let e = &self.config.evaluate;
        EvalConfig {
            split_ratio: e.split_ratio,
            ks: e.ks.clone(),
            seed: self.seed,
            systems: e.systems.clone(),
        }
    }

    pub fn recommend_options(&self) -> RecommendOptions {
        RecommendOptions {
            exclude_existing: self.config.recommend.exclude_existing,
            mode: self.config.recommend.mode,
        }
    }

    pub fn models_dir(&self) -> PathBuf {
        self.out.join("models")
    }

    /// SHA-256 of the effective configuration. The output directory is left
    /// out so that runs into different directories stay comparable.
    pub fn digest(&self) -> String {
        let mut view = self.config.clone();
        view.seed = self.seed;
        view.out = None;
        let bytes = serde_json::to_vec(&view).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

fn require_file(path: &Path, what: &str) -> AppResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(AppError::Config(format!("{what} file {} does not exist", path.display())))
    }
}
