//! Page corpus: records, validation, the in-corpus link graph and citation
//! contexts.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub mod wikitext;

/// Bumped whenever [`canonicalize_title`] or [`normalize_ref_title`] change.
pub const CANONICALIZATION_VERSION: u32 = 1;

/// Canonical form of a page title: underscores become spaces, whitespace runs
/// collapse, and the first character is upper-cased (wiki titles are
/// case-insensitive in their first letter only).
pub fn canonicalize_title(title: &str) -> String {
    let spaced = title.replace('_', " ");
    let collapsed = collapse_whitespace(&spaced);
    let mut chars = collapsed.chars();
    match chars.next() {
        Some(first) => {
            let mut out: String = first.to_uppercase().collect();
            out.push_str(chars.as_str());
            out
        }
        None => String::new(),
    }
}

/// Matching key for reference titles: case-folded, punctuation removed,
/// whitespace collapsed and trimmed.
pub fn normalize_ref_title(title: &str) -> String {
    let folded: String = title
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect();
    collapse_whitespace(&folded)
}

fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Byte spans of the sentences in `text`.
///
/// A sentence ends at `.`, `!` or `?` when the terminator is followed by
/// whitespace and the next visible character is not a lowercase letter (or the
/// text ends). Spans are trimmed and never empty.
pub fn sentence_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = 0;
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let end = i + c.len_utf8();
        match iter.peek() {
            Some(&(_, next)) if next.is_whitespace() => {}
            Some(_) => continue,
            None => break,
        }
        let following = text[end..].trim_start().chars().next();
        if following.is_some_and(char::is_lowercase) {
            continue;
        }
        push_trimmed(text, start, end, &mut spans);
        start = end;
    }
    push_trimmed(text, start, text.len(), &mut spans);
    spans
}

fn push_trimmed(text: &str, start: usize, end: usize, spans: &mut Vec<(usize, usize)>) {
    let slice = &text[start..end];
    let lead = slice.len() - slice.trim_start().len();
    let trail = slice.len() - slice.trim_end().len();
    if lead + trail < slice.len() {
        spans.push((start + lead, end - trail));
    }
}

/// Splits `text` into sentences (see [`sentence_spans`]).
pub fn split_sentences(text: &str) -> Vec<String> {
    sentence_spans(text)
        .into_iter()
        .map(|(s, e)| text[s..e].to_string())
        .collect()
}

/// One line of the corpus file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub title: String,
    #[serde(default)]
    pub summary: String,
    #[serde(default)]
    pub sentences: Vec<String>,
    #[serde(default)]
    pub wikilinks: Vec<WikilinkRecord>,
    #[serde(default)]
    pub references: Vec<ReferenceRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WikilinkRecord {
    pub target: String,
    #[serde(default)]
    pub sentence: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRecord {
    pub title: String,
    #[serde(default)]
    pub raw: String,
    #[serde(default)]
    pub sentence: Option<usize>,
}

/// A wikilink occurring in a page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WikilinkMention {
    pub target_title: String,
    pub sentence_index: Option<usize>,
}

/// A reference listed on a page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reference {
    pub title: String,
    pub raw: String,
    pub norm_key: String,
    pub sentence_index: Option<usize>,
}

impl Reference {
    pub fn new(title: impl Into<String>, raw: impl Into<String>, sentence_index: Option<usize>) -> Self {
        let title = title.into();
        Reference {
            norm_key: normalize_ref_title(&title),
            title,
            raw: raw.into(),
            sentence_index,
        }
    }
}

/// A validated article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WikiPage {
    pub title: String,
    /// The first paragraph, i.e. `sentences[..summary_len]` joined by spaces.
    pub summary: String,
    pub summary_len: usize,
    pub sentences: Vec<String>,
    pub wikilinks: Vec<WikilinkMention>,
    pub references: Vec<Reference>,
}

impl WikiPage {
    /// Validates and normalizes one corpus record.
    ///
    /// The record's `summary` is segmented into sentences. When `sentences` is
    /// empty the page body is that paragraph alone; otherwise the segmented
    /// summary must be a prefix of `sentences`.
    pub fn from_record(record: CorpusRecord) -> Result<Self> {
        let title = canonicalize_title(&record.title);
        if title.is_empty() {
            return Err(Error::schema("title", "title is empty"));
        }
        let summary_sentences = split_sentences(&record.summary);
        let sentences: Vec<String> = if record.sentences.is_empty() {
            summary_sentences.clone()
        } else {
            record.sentences.iter().map(|s| s.trim().to_string()).collect()
        };
        if summary_sentences.len() > sentences.len()
            || summary_sentences
                .iter()
                .zip(&sentences)
                .any(|(a, b)| a != b)
        {
            return Err(Error::schema(
                "summary",
                format!("summary of `{title}` is not the leading paragraph of `sentences`"),
            ));
        }
        let summary_len = summary_sentences.len();
        let check_index = |field: String, index: Option<usize>| -> Result<()> {
            match index {
                Some(i) if i >= sentences.len() => Err(Error::schema(
                    field,
                    format!("sentence index {i} out of range ({} sentences)", sentences.len()),
                )),
                _ => Ok(()),
            }
        };

        let mut wikilinks = Vec::with_capacity(record.wikilinks.len());
        for (i, link) in record.wikilinks.into_iter().enumerate() {
            check_index(format!("wikilinks[{i}].sentence"), link.sentence)?;
            let target_title = canonicalize_title(&link.target);
            if target_title.is_empty() {
                return Err(Error::schema(format!("wikilinks[{i}].target"), "target is empty"));
            }
            wikilinks.push(WikilinkMention {
                target_title,
                sentence_index: link.sentence,
            });
        }
        let mut references = Vec::with_capacity(record.references.len());
        for (i, r) in record.references.into_iter().enumerate() {
            check_index(format!("references[{i}].sentence"), r.sentence)?;
            references.push(Reference::new(r.title, r.raw, r.sentence));
        }

        Ok(WikiPage {
            summary: sentences[..summary_len].join(" "),
            title,
            summary_len,
            sentences,
            wikilinks,
            references,
        })
    }

    /// Serializable form; `WikiPage::from_record(page.to_record())` reproduces `page`.
    pub fn to_record(&self) -> CorpusRecord {
        CorpusRecord {
            title: self.title.clone(),
            summary: self.summary.clone(),
            sentences: self.sentences.clone(),
            wikilinks: self
                .wikilinks
                .iter()
                .map(|w| WikilinkRecord {
                    target: w.target_title.clone(),
                    sentence: w.sentence_index,
                })
                .collect(),
            references: self
                .references
                .iter()
                .map(|r| ReferenceRecord {
                    title: r.title.clone(),
                    raw: r.raw.clone(),
                    sentence: r.sentence_index,
                })
                .collect(),
        }
    }

    /// Sentences mentioning any of `targets`, in page order, each once, joined
    /// by single spaces.
    pub fn sentences_mentioning<F>(&self, mut is_target: F) -> String
    where
        F: FnMut(&str) -> bool,
    {
        let indices: BTreeSet<usize> = self
            .wikilinks
            .iter()
            .filter(|w| is_target(&w.target_title))
            .filter_map(|w| w.sentence_index)
            .collect();
        join_sentences(&self.sentences, indices)
    }

    /// Citation context of the wikilink to `target` in this page: every
    /// sentence mentioning it, concatenated. `None` when the page has no
    /// such wikilink.
    pub fn link_context(&self, target: &str) -> Option<String> {
        if !self.links_to(target) {
            return None;
        }
        Some(self.sentences_mentioning(|t| t == target))
    }

    pub fn links_to(&self, target: &str) -> bool {
        self.wikilinks.iter().any(|w| w.target_title == target)
    }

    /// Distinct wikilink targets in first-mention order.
    pub fn distinct_link_targets(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.wikilinks
            .iter()
            .map(|w| w.target_title.as_str())
            .filter(|t| seen.insert(*t))
            .collect()
    }

    pub fn citation_context(&self, anchor: Anchor) -> Result<&str> {
        let index = match anchor {
            Anchor::Wikilink(i) => self
                .wikilinks
                .get(i)
                .ok_or_else(|| not_owned(&self.title, "wikilink", i))?
                .sentence_index,
            Anchor::Reference(i) => self
                .references
                .get(i)
                .ok_or_else(|| not_owned(&self.title, "reference", i))?
                .sentence_index,
        };
        Ok(index
            .and_then(|i| self.sentences.get(i))
            .map_or("", String::as_str))
    }
}

fn not_owned(title: &str, kind: &str, index: usize) -> Error {
    Error::Ownership(format!("`{title}` has no {kind} #{index}"))
}

fn join_sentences(sentences: &[String], indices: BTreeSet<usize>) -> String {
    let mut out = String::new();
    for i in indices {
        if let Some(s) = sentences.get(i) {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(s);
        }
    }
    out
}

/// Position of a wikilink or reference within its page.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Wikilink(usize),
    Reference(usize),
}

/// Citation context of `anchor` in `page`: the sentence it occurs in, or an
/// empty string when the anchor carries no sentence index.
pub fn citation_context(page: &WikiPage, anchor: Anchor) -> Result<&str> {
    page.citation_context(anchor)
}

/// Pages indexed by canonical title.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pages: Vec<WikiPage>,
    index: BTreeMap<String, usize>,
}

impl Corpus {
    pub fn from_pages(pages: Vec<WikiPage>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, page) in pages.iter().enumerate() {
            if index.insert(page.title.clone(), i).is_some() {
                return Err(Error::DuplicateTitle(page.title.clone()));
            }
        }
        Ok(Corpus { pages, index })
    }

    pub fn from_records<I>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = CorpusRecord>,
    {
        let pages = records
            .into_iter()
            .map(WikiPage::from_record)
            .collect::<Result<Vec<_>>>()?;
        Corpus::from_pages(pages)
    }

    pub fn pages(&self) -> &[WikiPage] {
        &self.pages
    }

    pub fn get(&self, title: &str) -> Option<&WikiPage> {
        self.index.get(title).map(|&i| &self.pages[i])
    }

    pub fn contains(&self, title: &str) -> bool {
        self.index.contains_key(title)
    }

    pub fn len(&self) -> usize {
        self.pages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }

    pub fn stats(&self) -> CorpusStats {
        CorpusStats {
            pages: self.pages.len(),
            wikilinks: self.pages.iter().map(|p| p.wikilinks.len()).sum(),
            references: self.pages.iter().map(|p| p.references.len()).sum(),
            sentences: self.pages.iter().map(|p| p.sentences.len()).sum(),
            canonicalization_version: CANONICALIZATION_VERSION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub pages: usize,
    pub wikilinks: usize,
    pub references: usize,
    pub sentences: usize,
    pub canonicalization_version: u32,
}

/// Out- and inlinks restricted to pages present in the corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkGraph {
    outlinks: BTreeMap<String, BTreeSet<String>>,
    inlinks: BTreeMap<String, BTreeSet<String>>,
}

impl LinkGraph {
    pub fn build(corpus: &Corpus) -> Self {
        let mut outlinks: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let mut inlinks: BTreeMap<String, BTreeSet<String>> = corpus
            .pages()
            .iter()
            .map(|p| (p.title.clone(), BTreeSet::new()))
            .collect();
        for page in corpus.pages() {
            let targets: BTreeSet<String> = page
                .wikilinks
                .iter()
                .filter(|w| corpus.contains(&w.target_title))
                .map(|w| w.target_title.clone())
                .collect();
            for target in &targets {
                if let Some(set) = inlinks.get_mut(target) {
                    set.insert(page.title.clone());
                }
            }
            outlinks.insert(page.title.clone(), targets);
        }
        LinkGraph { outlinks, inlinks }
    }

    pub fn contains(&self, title: &str) -> bool {
        self.outlinks.contains_key(title)
    }

    pub fn outlinks(&self, title: &str) -> Option<&BTreeSet<String>> {
        self.outlinks.get(title)
    }

    pub fn inlinks(&self, title: &str) -> Option<&BTreeSet<String>> {
        self.inlinks.get(title)
    }

    pub fn titles(&self) -> impl Iterator<Item = &str> {
        self.outlinks.keys().map(String::as_str)
    }
}
