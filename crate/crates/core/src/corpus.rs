//! Corpus files: one JSON object `{doc_id, lang, text}` per line.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDoc {
    pub doc_id: String,
    pub lang: String,
    pub text: String,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Parses every non-blank line of `text` as `T`, with 1-based line numbers.
pub(crate) fn parse_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<(usize, T)>, CorpusError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map(|v| (i + 1, v))
                .map_err(|e| CorpusError::Format { line: i + 1, message: e.to_string() })
        })
        .collect()
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusDoc>, CorpusError> {
    let docs: Vec<(usize, CorpusDoc)> = parse_jsonl(text)?;
    let mut seen = HashSet::new();
    for (line, doc) in &docs {
        if !seen.insert(doc.doc_id.as_str()) {
            return Err(CorpusError::Format { line: *line, message: format!("duplicate doc_id {:?}", doc.doc_id) });
        }
        if doc.lang.trim().is_empty() {
            return Err(CorpusError::Format { line: *line, message: "empty lang".into() });
        }
    }
    Ok(docs.into_iter().map(|(_, d)| d).collect())
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusDoc>, CorpusError> {
    parse_corpus(&fs::read_to_string(path)?)
}
