//! Line-delimited corpus files and their `corpus.meta.json` sidecar.
//!
//! A line is either a corpus record or a raw page `{"title", "wikitext"}`;
//! raw pages go through the wikitext extractor.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wikiref_core::corpus::wikitext::extract_record;
use wikiref_core::corpus::{Corpus, CorpusRecord, CorpusStats, WikiPage};
use wikiref_core::textsim::STOPWORDS_VERSION;
use wikiref_core::ARTIFACT_VERSION;

use crate::error::{AppError, AppResult};

pub const META_FILE: &str = "corpus.meta.json";

#[derive(Debug, Deserialize)]
struct RawPage {
    title: String,
    wikitext: String,
}

/// Parses one line into a record. Unknown fields are ignored.
pub fn parse_line(line: &str, line_no: usize) -> AppResult<CorpusRecord> {
    let value: serde_json::Value = serde_json::from_str(line)
        .map_err(|e| AppError::Input(format!("line {line_no}: invalid JSON: {e}")))?;
    let is_raw = value.get("wikitext").is_some() && value.get("sentences").is_none();
    let located = |e: serde_path_to_error::Error<serde_json::Error>| {
        let path = e.path().to_string();
        AppError::Input(format!("line {line_no}: field `{path}`: {}", e.into_inner()))
    };
    if is_raw {
        let raw: RawPage = serde_path_to_error::deserialize(value).map_err(located)?;
        Ok(extract_record(&raw.title, &raw.wikitext))
    } else {
        serde_path_to_error::deserialize(value).map_err(located)
    }
}

/// Reads and validates every page of `paths`, in file and line order.
pub fn read_pages(paths: &[PathBuf]) -> AppResult<Vec<WikiPage>> {
    let mut pages = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::read(path, e))?;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record = parse_line(line, i + 1)
                .map_err(|e| AppError::Input(format!("{}: {e}", path.display())))?;
            let page = WikiPage::from_record(record).map_err(|e| {
                AppError::Input(format!("{}: line {}: {e}", path.display(), i + 1))
            })?;
            pages.push(page);
        }
    }
    if pages.is_empty() {
        let names: Vec<_> = paths.iter().map(|p| p.display().to_string()).collect();
        return Err(AppError::Input(format!("no records in {}", names.join(", "))));
    }
    Ok(pages)
}

pub fn load_corpus(paths: &[PathBuf]) -> AppResult<Corpus> {
    Corpus::from_pages(read_pages(paths)?).map_err(|e| AppError::stage("corpus", e))
}

/// The corpus serialized in the record format, one page per line.
pub fn serialize_corpus(corpus: &Corpus) -> Vec<u8> {
    let mut out = Vec::new();
    for page in corpus.pages() {
        serde_json::to_writer(&mut out, &page.to_record()).expect("records serialize");
        out.push(b'\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusMeta {
    pub artifact_version: String,
    #[serde(flatten)]
    pub stats: CorpusStats,
    pub stopwords_version: u32,
    /// SHA-256 of the serialized corpus.
    pub content_sha256: String,
}

impl CorpusMeta {
    pub fn of(corpus: &Corpus) -> Self {
        CorpusMeta {
            artifact_version: ARTIFACT_VERSION.to_string(),
            stats: corpus.stats(),
            stopwords_version: STOPWORDS_VERSION,
            content_sha256: hex::encode(Sha256::digest(serialize_corpus(corpus))),
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("meta serializes");
        bytes.push(b'\n');
        bytes
    }

    /// SHA-256 of the meta file contents.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json()))
    }
}

/// Writes the corpus to `path` and the meta sidecar next to it.
pub fn write_corpus(path: &Path, corpus: &Corpus) -> AppResult<CorpusMeta> {
    let meta = CorpusMeta::of(corpus);
    write_bytes(path, &serialize_corpus(corpus))?;
    let meta_path = path.with_file_name(META_FILE);
    write_bytes(&meta_path, &meta.to_json())?;
    Ok(meta)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> AppResult<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| AppError::write(dir, e))?;
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| AppError::write(path, e))?;
    file.write_all(bytes).map_err(|e| AppError::write(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_errors_name_line_and_field() {
        let err = parse_line(r#"{"title": "A", "wikilinks": [{"target": 3}]}"#, 4).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 4"), "{msg}");
        assert!(msg.contains("wikilinks[0].target"), "{msg}");
    }

    #[test]
    fn raw_pages_are_extracted() {
        let r = parse_line(r#"{"title": "A", "wikitext": "Links [[B]]. Done."}"#, 1).unwrap();
        assert_eq!(r.sentences, vec!["Links B.", "Done."]);
        assert_eq!(r.wikilinks[0].target, "B");
    }

    #[test]
    fn unknown_fields_are_ignored() {
        let r = parse_line(r#"{"title": "A", "summary": "x.", "extra": 1}"#, 1).unwrap();
        assert_eq!(r.title, "A");
    }
}
