//! Tokenization, tf-idf vectors, similarity kernels and sentence embeddings.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use once_cell::race::OnceBox;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const STOPWORDS_TXT: &str = include_str!("stopwords.txt");

/// Version of the bundled stopword list.
pub const STOPWORDS_VERSION: u32 = 1;

fn stopwords() -> &'static BTreeSet<&'static str> {
    static SET: OnceBox<BTreeSet<&'static str>> = OnceBox::new();
    SET.get_or_init(|| {
        Box::new(
            STOPWORDS_TXT
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect(),
        )
    })
}

pub fn is_stopword(token: &str) -> bool {
    stopwords().contains(token)
}

/// Lowercased alphanumeric tokens with stopwords removed.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty() && !is_stopword(t))
        .map(ToString::to_string)
        .collect()
}

/// Document frequencies over a reference collection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdfTable {
    doc_count: usize,
    df: BTreeMap<String, usize>,
}

impl IdfTable {
    /// Counts, for every token, the number of documents containing it.
    pub fn fit<D, T>(documents: D) -> Result<Self>
    where
        D: IntoIterator<Item = T>,
        T: AsRef<[String]>,
    {
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        let mut doc_count = 0;
        for doc in documents {
            doc_count += 1;
            let distinct: BTreeSet<&String> = doc.as_ref().iter().collect();
            for token in distinct {
                *df.entry(token.clone()).or_default() += 1;
            }
        }
        if doc_count == 0 {
            return Err(Error::Configuration("cannot fit idf on an empty collection".into()));
        }
        Ok(IdfTable { doc_count, df })
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn df(&self, token: &str) -> usize {
        self.df.get(token).copied().unwrap_or(0)
    }

    /// Smoothed idf: `ln((1 + N) / (1 + df)) + 1`.
    pub fn idf(&self, token: &str) -> f64 {
        let n = self.doc_count as f64;
        let df = self.df(token) as f64;
        libm::log((1.0 + n) / (1.0 + df)) + 1.0
    }

    /// Raw term count times smoothed idf.
    pub fn tfidf(&self, tokens: &[String]) -> SparseVector {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for t in tokens {
            *counts.entry(t.as_str()).or_default() += 1;
        }
        let entries = counts
            .into_iter()
            .map(|(t, tf)| (t.to_string(), tf as f64 * self.idf(t)))
            .filter(|(_, w)| *w > 0.0)
            .collect();
        SparseVector { entries }
    }

    /// Tokenizes and vectorizes `text`.
    pub fn vectorize(&self, text: &str) -> SparseVector {
        self.tfidf(&tokenize(text))
    }
}

/// Convenience wrapper for [`IdfTable::fit`].
pub fn fit_idf<D, T>(documents: D) -> Result<IdfTable>
where
    D: IntoIterator<Item = T>,
    T: AsRef<[String]>,
{
    IdfTable::fit(documents)
}

/// Convenience wrapper for [`IdfTable::tfidf`].
pub fn tfidf_vector(tokens: &[String], idf: &IdfTable) -> SparseVector {
    idf.tfidf(tokens)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    entries: BTreeMap<String, f64>,
}

impl SparseVector {
    /// Builds a vector, dropping zero weights.
    pub fn from_entries<I: IntoIterator<Item = (String, f64)>>(entries: I) -> Self {
        SparseVector {
            entries: entries.into_iter().filter(|(_, w)| *w != 0.0).collect(),
        }
    }

    pub fn get(&self, token: &str) -> f64 {
        self.entries.get(token).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn norm_sq(&self) -> f64 {
        self.entries.values().map(|w| w * w).sum()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .entries
            .iter()
            .filter_map(|(t, w)| large.entries.get(t).map(|v| w * v))
            .sum()
    }

    /// Cosine similarity; 0 when either vector is zero.
    pub fn cosine(&self, other: &SparseVector) -> f64 {
        cosine_from_parts(self.dot(other), self.norm_sq(), other.norm_sq())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseVector(pub Vec<f64>);

impl DenseVector {
    pub fn zeros(dim: usize) -> Self {
        DenseVector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Cosine similarity; 0 when either vector is zero.
    pub fn cosine(&self, other: &DenseVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        let dot = self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum();
        let na = self.0.iter().map(|a| a * a).sum();
        let nb = other.0.iter().map(|b| b * b).sum();
        Ok(cosine_from_parts(dot, na, nb))
    }
}

fn cosine_from_parts(dot: f64, norm_sq_a: f64, norm_sq_b: f64) -> f64 {
    // an empty sum is -0.0; report orthogonal vectors as +0.0
    if norm_sq_a == 0.0 || norm_sq_b == 0.0 || dot == 0.0 {
        return 0.0;
    }
    let c = dot / libm::sqrt(norm_sq_a * norm_sq_b);
    c.clamp(-1.0, 1.0)
}

/// Jaccard overlap `|a ∩ b| / |a ∪ b|`; two empty sets give 0.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Source of dense text representations.
pub trait EmbeddingProvider {
    fn name(&self) -> &str;

    /// Output dimension; 0 means nothing has been loaded.
    fn dim(&self) -> usize;

    /// Vector of a single token, if known.
    fn lookup(&self, token: &str) -> Option<&[f64]>;

    /// Embeds a text as the mean of its in-vocabulary token vectors, or the
    /// zero vector when none is known.
    fn embed(&self, text: &str) -> DenseVector {
        mean_of_tokens(self, &tokenize(text))
    }
}

fn mean_of_tokens<P: EmbeddingProvider + ?Sized>(provider: &P, tokens: &[String]) -> DenseVector {
    let dim = provider.dim();
    let mut sum = vec![0.0; dim];
    let mut count = 0usize;
    for token in tokens {
        if let Some(v) = provider.lookup(token) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            count += 1;
        }
    }
    if count > 0 {
        let n = count as f64;
        sum.iter_mut().for_each(|s| *s /= n);
    }
    DenseVector(sum)
}

/// Embeds `text`, failing when the provider has not been loaded.
pub fn embed_text(text: &str, provider: &dyn EmbeddingProvider) -> Result<DenseVector> {
    if provider.dim() == 0 {
        return Err(Error::Configuration(alloc::format!(
            "embedding provider `{}` is not loaded",
            provider.name()
        )));
    }
    Ok(provider.embed(text))
}

/// Word vectors averaged over the tokens of a text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WordVectors {
    name: String,
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl WordVectors {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        WordVectors {
            name: name.into(),
            dim,
            vectors: BTreeMap::new(),
        }
    }

    /// Adds or replaces the vector of `token`.
    pub fn insert(&mut self, token: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                actual: vector.len(),
            });
        }
        self.vectors.insert(token.into(), vector);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl EmbeddingProvider for WordVectors {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn lookup(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }
}

/// Sentence vectors computed elsewhere, keyed by [`document_id`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PrecomputedVectors {
    name: String,
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl PrecomputedVectors {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        PrecomputedVectors {
            name: name.into(),
            dim,
            vectors: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                actual: vector.len(),
            });
        }
        self.vectors.insert(id.into(), vector);
        Ok(())
    }
}

impl EmbeddingProvider for PrecomputedVectors {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn lookup(&self, _token: &str) -> Option<&[f64]> {
        None
    }

    fn embed(&self, text: &str) -> DenseVector {
        match self.vectors.get(&document_id(text)) {
            Some(v) => DenseVector(v.clone()),
            None => DenseVector::zeros(self.dim),
        }
    }
}

/// Identifier of a text in precomputed-vector files: the first 16 hex digits
/// of the SHA-256 of the trimmed text.
pub fn document_id(text: &str) -> String {
    use core::fmt::Write;
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(text.trim().as_bytes());
    let mut out = String::with_capacity(16);
    for b in &digest[..8] {
        let _ = write!(out, "{b:02x}");
    }
    out
}
