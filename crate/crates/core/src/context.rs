//! Everything a feature needs to look at: the corpus, its link graph, the idf
//! table and an embedding provider.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Corpus, LinkGraph, WikiPage};
use crate::textsim::{tokenize, EmbeddingProvider, IdfTable};
use crate::{Error, Result};

#[derive(Clone, Copy)]
pub struct FeatureContext<'a> {
    pub corpus: &'a Corpus,
    pub graph: &'a LinkGraph,
    pub idf: &'a IdfTable,
    pub provider: &'a dyn EmbeddingProvider,
}

impl<'a> FeatureContext<'a> {
    pub fn new(
        corpus: &'a Corpus,
        graph: &'a LinkGraph,
        idf: &'a IdfTable,
        provider: &'a dyn EmbeddingProvider,
    ) -> Self {
        FeatureContext {
            corpus,
            graph,
            idf,
            provider,
        }
    }

    pub fn page(&self, title: &str) -> Result<&'a WikiPage> {
        self.corpus
            .get(title)
            .ok_or_else(|| Error::Consistency(format!("page `{title}` is not in the corpus")))
    }

    /// Fails unless `page` is part of the graph this context was built with.
    pub fn ensure_indexed(&self, page: &WikiPage) -> Result<()> {
        if self.graph.contains(&page.title) && self.corpus.contains(&page.title) {
            Ok(())
        } else {
            Err(Error::Consistency(format!(
                "page `{}` is not part of the indexed corpus",
                page.title
            )))
        }
    }

    /// Cosine of the tf-idf vectors of two texts.
    pub fn tfidf_cosine(&self, a: &str, b: &str) -> f64 {
        self.idf.vectorize(a).cosine(&self.idf.vectorize(b))
    }

    /// Cosine of the provider embeddings of two texts, floored at 0.
    pub fn embedding_cosine(&self, a: &str, b: &str) -> f64 {
        let u = self.provider.embed(a);
        let v = self.provider.embed(b);
        u.cosine(&v).unwrap_or(0.0).max(0.0)
    }
}

/// The idf collection: one document per page, made of all its sentences.
pub fn idf_documents(corpus: &Corpus) -> Vec<Vec<String>> {
    corpus
        .pages()
        .iter()
        .map(|p| tokenize(&p.sentences.join(" ")))
        .collect()
}

/// Fits the idf table over [`idf_documents`].
pub fn build_idf(corpus: &Corpus) -> Result<IdfTable> {
    IdfTable::fit(idf_documents(corpus))
}
