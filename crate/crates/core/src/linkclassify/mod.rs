//! Step I: decide which wikilinks of a target page are worth inheriting
//! references from.
//!
//! Each (target, linked page) pair is described by eight similarities: tf-idf
//! and embedding similarity of the two summaries, Jaccard overlap of out- and
//! inlinks, and tf-idf / embedding similarity of the sentences in which shared
//! out- and inlinks are mentioned. Training labels come from the target's
//! existing references, the majority class is thinned with repeated edited
//! nearest neighbours, and a random forest makes the final call.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::context::FeatureContext;
use crate::corpus::WikiPage;
use crate::textsim::jaccard;
use crate::Result;

mod chi2;
mod enn;
mod forest;

pub use chi2::{chi_square_rank, chi_square_statistic, FeatureScore};
pub use enn::{enn_keep_indices, enn_undersample, EnnOutcome, EnnParams};
pub use forest::{
    classify, train_forest, Classification, DecisionTree, ForestModel, ForestParams, Node,
};

/// Number of Step I features.
pub const STEP1_DIM: usize = 8;

/// The Step I features, in vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step1Feature {
    Tis,
    Os,
    Is,
    Oss,
    Iss,
    Vs,
    Osvs,
    Isvs,
}

impl Step1Feature {
    pub const ALL: [Step1Feature; STEP1_DIM] = [
        Step1Feature::Tis,
        Step1Feature::Os,
        Step1Feature::Is,
        Step1Feature::Oss,
        Step1Feature::Iss,
        Step1Feature::Vs,
        Step1Feature::Osvs,
        Step1Feature::Isvs,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Step1Feature::Tis => "tis",
            Step1Feature::Os => "os",
            Step1Feature::Is => "is",
            Step1Feature::Oss => "oss",
            Step1Feature::Iss => "iss",
            Step1Feature::Vs => "vs",
            Step1Feature::Osvs => "osvs",
            Step1Feature::Isvs => "isvs",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name))
    }
}

/// Similarity features of a (target, linked page) pair, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Step1FeatureVector {
    pub tis: f64,
    pub os: f64,
    #[serde(rename = "is")]
    pub is_: f64,
    pub oss: f64,
    pub iss: f64,
    pub vs: f64,
    pub osvs: f64,
    pub isvs: f64,
}

impl Step1FeatureVector {
    pub fn to_array(&self) -> [f64; STEP1_DIM] {
        [
            self.tis, self.os, self.is_, self.oss, self.iss, self.vs, self.osvs, self.isvs,
        ]
    }

    pub fn from_array(v: [f64; STEP1_DIM]) -> Self {
        let [tis, os, is_, oss, iss, vs, osvs, isvs] = v;
        Step1FeatureVector {
            tis,
            os,
            is_,
            oss,
            iss,
            vs,
            osvs,
            isvs,
        }
    }

    pub fn get(&self, feature: Step1Feature) -> f64 {
        self.to_array()[feature.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Irrelevant,
    Relevant,
}

impl Label {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Irrelevant => "irrelevant",
            Label::Relevant => "relevant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub target_title: String,
    pub wikilink_title: String,
    pub features: Step1FeatureVector,
    pub label: Label,
}

/// Computes the eight Step I features of target `a` and linked page `b`.
pub fn step1_features(
    ctx: &FeatureContext<'_>,
    a: &WikiPage,
    b: &WikiPage,
) -> Result<Step1FeatureVector> {
    ctx.ensure_indexed(a)?;
    ctx.ensure_indexed(b)?;
    let graph = ctx.graph;
    let empty = BTreeSet::new();
    let out_a = graph.outlinks(&a.title).unwrap_or(&empty);
    let out_b = graph.outlinks(&b.title).unwrap_or(&empty);
    let in_a = graph.inlinks(&a.title).unwrap_or(&empty);
    let in_b = graph.inlinks(&b.title).unwrap_or(&empty);

    let common_out: BTreeSet<&String> = out_a.intersection(out_b).collect();
    let (out_doc_a, out_doc_b) = if common_out.is_empty() {
        (String::new(), String::new())
    } else {
        let mentions = |t: &str| common_out.iter().any(|c| c.as_str() == t);
        (a.sentences_mentioning(mentions), b.sentences_mentioning(mentions))
    };

    // Inlinks are never mentioned in A or B themselves; the shared linking
    // pages supply the sentences where they mention A and B respectively.
    let mut in_doc_a = String::new();
    let mut in_doc_b = String::new();
    for linker in in_a.intersection(in_b) {
        let page = ctx.page(linker)?;
        append_sentence_block(&mut in_doc_a, &page.sentences_mentioning(|t| t == a.title));
        append_sentence_block(&mut in_doc_b, &page.sentences_mentioning(|t| t == b.title));
    }

    let pair = |x: &str, y: &str| {
        if x.is_empty() || y.is_empty() {
            (0.0, 0.0)
        } else {
            (ctx.tfidf_cosine(x, y), ctx.embedding_cosine(x, y))
        }
    };
    let (tis, vs) = pair(&a.summary, &b.summary);
    let (oss, osvs) = pair(&out_doc_a, &out_doc_b);
    let (iss, isvs) = pair(&in_doc_a, &in_doc_b);

    Ok(Step1FeatureVector {
        tis,
        os: jaccard(out_a, out_b),
        is_: jaccard(in_a, in_b),
        oss,
        iss,
        vs,
        osvs,
        isvs,
    })
}

fn append_sentence_block(doc: &mut String, block: &str) {
    if block.is_empty() {
        return;
    }
    if !doc.is_empty() {
        doc.push(' ');
    }
    doc.push_str(block);
}

/// Labeled Step I examples of one target.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabelOutcome {
    pub examples: Vec<LabeledExample>,
    /// Wikilinks whose page is not in the corpus.
    pub skipped_missing: usize,
}

/// Candidate wikilink pages of `target`: distinct in-corpus link targets in
/// first-mention order, excluding the target itself.
pub fn candidate_links<'a>(ctx: &FeatureContext<'a>, target: &WikiPage) -> (Vec<&'a WikiPage>, usize) {
    let mut pages = Vec::new();
    let mut missing = 0;
    for title in target.distinct_link_targets() {
        if title == target.title {
            continue;
        }
        match ctx.corpus.get(title) {
            Some(page) => pages.push(page),
            None => missing += 1,
        }
    }
    (pages, missing)
}

/// One example per in-corpus wikilink of `target`; a link is relevant when at
/// least one of its references matches a key in `gold`.
pub fn label_examples(
    ctx: &FeatureContext<'_>,
    target: &WikiPage,
    gold: &BTreeSet<String>,
) -> Result<LabelOutcome> {
    let (links, skipped_missing) = candidate_links(ctx, target);
    let mut examples = Vec::with_capacity(links.len());
    for page in links {
        let relevant = page
            .references
            .iter()
            .any(|r| !r.norm_key.is_empty() && gold.contains(&r.norm_key));
        examples.push(LabeledExample {
            target_title: target.title.clone(),
            wikilink_title: page.title.clone(),
            features: step1_features(ctx, target, page)?,
            label: if relevant {
                Label::Relevant
            } else {
                Label::Irrelevant
            },
        });
    }
    Ok(LabelOutcome {
        examples,
        skipped_missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::build_idf;
    use crate::corpus::{Corpus, CorpusRecord, LinkGraph, ReferenceRecord, WikilinkRecord};
    use crate::evaluate::gold_references;
    use crate::textsim::WordVectors;
    use alloc::string::ToString;
    use alloc::vec;

    fn page(title: &str, sentences: &[&str], links: &[(&str, usize)], refs: &[&str]) -> CorpusRecord {
        CorpusRecord {
            title: title.into(),
            summary: sentences[0].into(),
            sentences: sentences.iter().map(|s| s.to_string()).collect(),
            wikilinks: links
                .iter()
                .map(|(t, s)| WikilinkRecord {
                    target: t.to_string(),
                    sentence: Some(*s),
                })
                .collect(),
            references: refs
                .iter()
                .map(|t| ReferenceRecord {
                    title: t.to_string(),
                    raw: t.to_string(),
                    sentence: None,
                })
                .collect(),
        }
    }

    fn corpus() -> Corpus {
        Corpus::from_records([
            page(
                "A",
                &["Graphs have vertices and edges.", "See B for planar drawings.", "Edges also appear in C."],
                &[("B", 1), ("C", 2), ("Missing", 2)],
                &["Graph Theory"],
            ),
            page("B", &["Planar graphs have vertices and edges drawn flat."], &[("C", 0)], &["graph theory"]),
            page("C", &["Coffee is a drink."], &[], &["Brewing"]),
            page("D", &["Mentions A and B here."], &[("A", 0), ("B", 0)], &[]),
        ])
        .unwrap()
    }

    fn vectors() -> WordVectors {
        let mut p = WordVectors::new("t", 2);
        p.insert("graphs", vec![1.0, 0.0]).unwrap();
        p.insert("coffee", vec![0.0, 1.0]).unwrap();
        p
    }

    #[test]
    fn self_comparison_is_identity() {
        let corpus = corpus();
        let graph = LinkGraph::build(&corpus);
        let idf = build_idf(&corpus).unwrap();
        let p = vectors();
        let ctx = FeatureContext::new(&corpus, &graph, &idf, &p);
        let a = corpus.get("A").unwrap();
        let f = step1_features(&ctx, a, a).unwrap();
        assert!((f.tis - 1.0).abs() < 1e-12);
        assert!((f.vs - 1.0).abs() < 1e-12);
        assert_eq!(f.os, 1.0);
        assert_eq!(f.is_, 1.0);
    }

    #[test]
    fn no_common_links_zero_sentence_features() {
        let corpus = corpus();
        let graph = LinkGraph::build(&corpus);
        let idf = build_idf(&corpus).unwrap();
        let p = vectors();
        let ctx = FeatureContext::new(&corpus, &graph, &idf, &p);
        let f = step1_features(&ctx, corpus.get("A").unwrap(), corpus.get("C").unwrap()).unwrap();
        assert_eq!((f.oss, f.iss, f.osvs, f.isvs), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(f.tis, 0.0);
    }

    #[test]
    fn shared_links_give_sentence_features() {
        let corpus = corpus();
        let graph = LinkGraph::build(&corpus);
        let idf = build_idf(&corpus).unwrap();
        let p = vectors();
        let ctx = FeatureContext::new(&corpus, &graph, &idf, &p);
        let f = step1_features(&ctx, corpus.get("A").unwrap(), corpus.get("B").unwrap()).unwrap();
        // A -> {B, C}, B -> {C}
        assert!((f.os - 0.5).abs() < 1e-12);
        // both linked from D only
        assert_eq!(f.is_, 1.0 / 2.0);
        assert!(f.oss > 0.0);
        // D mentions A and B in the same sentence
        assert!((f.iss - 1.0).abs() < 1e-12);
        for v in f.to_array() {
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn page_outside_corpus_is_rejected() {
        let corpus = corpus();
        let graph = LinkGraph::build(&corpus);
        let idf = build_idf(&corpus).unwrap();
        let p = vectors();
        let ctx = FeatureContext::new(&corpus, &graph, &idf, &p);
        let stranger = crate::corpus::WikiPage::from_record(page("Z", &["Z."], &[], &[])).unwrap();
        assert!(matches!(
            step1_features(&ctx, corpus.get("A").unwrap(), &stranger),
            Err(crate::Error::Consistency(_))
        ));
    }

    #[test]
    fn labels_follow_gold_overlap() {
        let corpus = corpus();
        let graph = LinkGraph::build(&corpus);
        let idf = build_idf(&corpus).unwrap();
        let p = vectors();
        let ctx = FeatureContext::new(&corpus, &graph, &idf, &p);
        let a = corpus.get("A").unwrap();
        let outcome = label_examples(&ctx, a, &gold_references(a)).unwrap();
        assert_eq!(outcome.skipped_missing, 1);
        let labels: Vec<_> = outcome
            .examples
            .iter()
            .map(|e| (e.wikilink_title.as_str(), e.label))
            .collect();
        assert_eq!(labels, vec![("B", Label::Relevant), ("C", Label::Irrelevant)]);
    }

    #[test]
    fn feature_names_round_trip() {
        for f in Step1Feature::ALL {
            assert_eq!(Step1Feature::parse(f.name()), Some(f));
            assert_eq!(Step1Feature::from_index(f.index()), Some(f));
        }
        assert_eq!(Step1Feature::parse("IS"), Some(Step1Feature::Is));
    }
}
