#![allow(dead_code)]

pub mod oracles;

use wikiref_core::context::{build_idf, FeatureContext};
use wikiref_core::corpus::{Corpus, LinkGraph};
use wikiref_core::textsim::{IdfTable, WordVectors};

/// A corpus with its derived tables, for building a [`FeatureContext`].
pub struct Fixture {
    pub corpus: Corpus,
    pub graph: LinkGraph,
    pub idf: IdfTable,
    pub vectors: WordVectors,
}

impl Fixture {
    pub fn new(corpus: Corpus) -> Self {
        let graph = LinkGraph::build(&corpus);
        let idf = build_idf(&corpus).unwrap();
        Fixture {
            corpus,
            graph,
            idf,
            vectors: WordVectors::new("none", 0),
        }
    }

    pub fn ctx(&self) -> FeatureContext<'_> {
        FeatureContext::new(&self.corpus, &self.graph, &self.idf, &self.vectors)
    }
}
