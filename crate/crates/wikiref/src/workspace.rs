use wikiref_core::context::{build_idf, FeatureContext};
use wikiref_core::corpus::{canonicalize_title, Corpus, LinkGraph};
use wikiref_core::pipeline::eligible_targets;
use wikiref_core::textsim::IdfTable;

use crate::artifacts::Stamp;
use crate::config::Settings;
use crate::corpus_file::{load_corpus, CorpusMeta};
use crate::error::{AppError, AppResult};
use crate::vectors::Provider;

/// Everything a command needs, loaded once and read-only afterwards.
pub struct Workspace {
    pub settings: Settings,
    pub corpus: Corpus,
    pub graph: LinkGraph,
    pub idf: IdfTable,
    pub provider: Provider,
    pub meta: CorpusMeta,
}

impl Workspace {
    pub fn open(settings: Settings) -> AppResult<Self> {
        let corpus = load_corpus(&settings.corpus_paths())?;
        let provider = match settings.vectors_path() {
            Some(p) => Provider::load(&p, settings.config.vectors_format)?,
            None => Provider::none(),
        };
        let graph = LinkGraph::build(&corpus);
        let idf = build_idf(&corpus).map_err(|e| AppError::stage("idf", e))?;
        let meta = CorpusMeta::of(&corpus);
        Ok(Workspace {
            settings,
            corpus,
            graph,
            idf,
            provider,
            meta,
        })
    }

    pub fn ctx(&self) -> FeatureContext<'_> {
        FeatureContext::new(&self.corpus, &self.graph, &self.idf, self.provider.as_dyn())
    }

    pub fn stamp(&self) -> Stamp {
        Stamp::new(self.settings.seed, self.settings.digest(), self.meta.digest())
    }

    /// Configured targets (canonicalized, must exist) or every eligible page.
    pub fn targets(&self) -> AppResult<Vec<String>> {
        match &self.settings.config.targets {
            Some(list) => list
                .iter()
                .map(|t| {
                    let title = canonicalize_title(t);
                    if self.corpus.contains(&title) {
                        Ok(title)
                    } else {
                        Err(AppError::Input(format!("unknown target `{t}`")))
                    }
                })
                .collect(),
            None => Ok(eligible_targets(&self.ctx())),
        }
    }

    /// Runs `f` on a pool sized by `--jobs` (default: all cores).
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> AppResult<R> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.settings.jobs {
            builder = builder.num_threads(j);
        }
        let pool = builder
            .build()
            .map_err(|e| AppError::Internal(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}
