//! Vector files: one `key v1 … vd` line per entry, optionally preceded by a
//! `count dim` header line.

use std::path::Path;

use wikiref_core::textsim::{EmbeddingProvider, PrecomputedVectors, WordVectors};

use crate::config::VectorFormat;
use crate::error::{AppError, AppResult};

pub type VectorEntries = Vec<(String, Vec<f64>)>;

/// Parses vector lines, returning the dimension and `(key, vector)` entries.
pub fn parse_vectors(text: &str) -> Result<(usize, VectorEntries), String> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();
    let mut declared: Option<(usize, usize)> = None;
    if let Some(&(_, first)) = lines.peek() {
        let fields: Vec<&str> = first.split_whitespace().collect();
        if let [count, dim] = fields[..] {
            if let (Ok(count), Ok(dim)) = (count.parse::<usize>(), dim.parse::<usize>()) {
                declared = Some((count, dim));
                lines.next();
            }
        }
    }
    let mut dim = declared.map(|(_, d)| d);
    let mut entries = Vec::new();
    for (i, line) in lines {
        let mut fields = line.split_whitespace();
        let key = fields.next().expect("non-empty line").to_string();
        let values = fields
            .map(|f| f.parse::<f64>().map_err(|e| format!("line {}: `{f}`: {e}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(format!("line {}: non-finite value", i + 1));
        }
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(format!(
                    "line {}: expected {d} values, found {}",
                    i + 1,
                    values.len()
                ))
            }
            _ => {}
        }
        entries.push((key, values));
    }
    let dim = dim.unwrap_or(0);
    if dim == 0 {
        return Err("no vectors found".into());
    }
    if let Some((count, _)) = declared {
        if count != entries.len() {
            return Err(format!("header declares {count} vectors, found {}", entries.len()));
        }
    }
    Ok((dim, entries))
}

/// A loaded embedding provider.
#[derive(Debug, Clone)]
pub enum Provider {
    Words(WordVectors),
    Precomputed(PrecomputedVectors),
}

impl Provider {
    /// Provider used when no vector file is configured; every embedding
    /// similarity is then 0.
    pub fn none() -> Self {
        Provider::Words(WordVectors::new("none", 0))
    }

    pub fn load(path: &Path, format: VectorFormat) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::read(path, e))?;
        let (dim, entries) = parse_vectors(&text)
            .map_err(|e| AppError::Input(format!("{}: {e}", path.display())))?;
        let name = path.display().to_string();
        let shape = |e| AppError::Input(format!("{}: {e}", path.display()));
        Ok(match format {
            VectorFormat::Words => {
                let mut v = WordVectors::new(name, dim);
                for (k, x) in entries {
                    v.insert(k, x).map_err(shape)?;
                }
                Provider::Words(v)
            }
            VectorFormat::Precomputed => {
                let mut v = PrecomputedVectors::new(name, dim);
                for (k, x) in entries {
                    v.insert(k, x).map_err(shape)?;
                }
                Provider::Precomputed(v)
            }
        })
    }

    pub fn as_dyn(&self) -> &dyn EmbeddingProvider {
        match self {
            Provider::Words(v) => v,
            Provider::Precomputed(v) => v,
        }
    }
}
