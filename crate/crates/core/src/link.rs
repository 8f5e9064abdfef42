//! Linking mention candidates to graph occupations.
//!
//! The candidate's free-text description is compared against every
//! occupation description in the graph. With an [`EmbeddingStore`] the
//! comparison is cosine similarity between precomputed description vectors;
//! without a vector for the candidate the linker falls back to token-set
//! Jaccard similarity. Either way only the single best occupation is
//! considered, and it is accepted only at or above the configured threshold,
//! which is what filters out non-occupations. Gazetteer candidates already
//! know their occupation and skip retrieval.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io;
use std::path::Path;

use log::{debug, warn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::MentionCandidate;
use crate::graph::{KnowledgeGraph, OccupationKey};
use crate::text;

pub const DEFAULT_EMBEDDING_THRESHOLD: f64 = 0.75;
pub const DEFAULT_LEXICAL_THRESHOLD: f64 = 0.4;

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("degenerate (all-zero) vector")]
    DegenerateVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },
}

/// `u·v / (|u| |v|)`, computed in f64.
pub fn cosine(u: &[f32], v: &[f32]) -> Result<f64, LinkError> {
    if u.len() != v.len() {
        return Err(LinkError::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    let (mut dot, mut nu, mut nv) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in u.iter().zip(v) {
        let (a, b) = (a as f64, b as f64);
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(LinkError::DegenerateVector);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// Retrieval key for a description: lowercased, whitespace collapsed.
pub fn canonical_key(description: &str) -> String {
    description.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Description vectors produced offline by an external embedding model.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    records: HashMap<String, Vec<f32>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoreHeader {
    dim: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoreRecord {
    key: String,
    vector: Vec<f32>,
}

impl EmbeddingStore {
    pub fn new(dim: usize) -> Self {
        EmbeddingStore { dim, records: HashMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn insert(&mut self, description: &str, vector: Vec<f32>) -> Result<(), LinkError> {
        if vector.len() != self.dim {
            return Err(LinkError::DimensionMismatch { expected: self.dim, found: vector.len() });
        }
        self.records.insert(canonical_key(description), vector);
        Ok(())
    }

    pub fn get(&self, description: &str) -> Option<&[f32]> {
        self.records.get(&canonical_key(description)).map(Vec::as_slice)
    }

    pub fn from_jsonl(text: &str) -> Result<EmbeddingStore, LinkError> {
        let fmt_err = |line, message: String| LinkError::Format { line, message };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| fmt_err(1, "missing {\"dim\": N} header".into()))?;
        let header: StoreHeader = serde_json::from_str(header).map_err(|e| fmt_err(1, format!("bad header: {e}")))?;
        if header.dim == 0 {
            return Err(fmt_err(1, "dim must be positive".into()));
        }
        let mut store = EmbeddingStore::new(header.dim);
        for (i, line) in lines {
            let rec: StoreRecord = serde_json::from_str(line).map_err(|e| fmt_err(i + 1, e.to_string()))?;
            if rec.vector.iter().any(|x| !x.is_finite()) {
                return Err(fmt_err(i + 1, "non-finite component".into()));
            }
            store.insert(&rec.key, rec.vector).map_err(|e| fmt_err(i + 1, e.to_string()))?;
        }
        Ok(store)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<EmbeddingStore, LinkError> {
        Self::from_jsonl(&fs::read_to_string(path)?)
    }

    /// Header line then records sorted by key.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&StoreHeader { dim: self.dim }).unwrap();
        out.push('\n');
        let mut keys: Vec<&String> = self.records.keys().collect();
        keys.sort();
        for key in keys {
            let rec = StoreRecord { key: key.clone(), vector: self.records[key].clone() };
            out.push_str(&serde_json::to_string(&rec).unwrap());
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkMethod {
    Embedding,
    Lexical,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkedMention {
    pub candidate: MentionCandidate,
    pub occupation: OccupationKey,
    pub similarity: f64,
    pub method: LinkMethod,
}

const STOP_WORDS: &[&str] = &[
    // en
    "a",
    "an",
    "and",
    "are",
    "as",
    "at",
    "be",
    "by",
    "for",
    "from",
    "has",
    "have",
    "in",
    "into",
    "is",
    "it",
    "its",
    "of",
    "on",
    "or",
    "other",
    "others",
    "that",
    "the",
    "their",
    "them",
    "they",
    "this",
    "to",
    "who",
    "with",
    "which",
    "such",
    "through",
    "during",
    "including",
    // fr
    "le",
    "la",
    "les",
    "un",
    "une",
    "des",
    "du",
    "de",
    "et",
    "ou",
    "qui",
    "dans",
    "pour",
    "par",
    // el
    "ο",
    "η",
    "το",
    "οι",
    "τα",
    "και",
    "του",
    "της",
    "των",
    "σε",
    "με",
    "για",
    "που",
    "ένας",
    "μια",
];

/// Folded content tokens of a description, stop words removed.
pub fn content_tokens(description: &str) -> BTreeSet<String> {
    let folded = text::fold(description);
    text::word_tokens(&folded)
        .iter()
        .map(|t| t.text(&folded).to_string())
        .filter(|t| !STOP_WORDS.contains(&t.as_str()))
        .collect()
}

/// `|A ∩ B| / |A ∪ B|`; 0 when either set is empty.
pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let inter = a.intersection(b).count();
    inter as f64 / (a.len() + b.len() - inter) as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkConfig {
    pub embedding_threshold: f64,
    pub lexical_threshold: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig { embedding_threshold: DEFAULT_EMBEDDING_THRESHOLD, lexical_threshold: DEFAULT_LEXICAL_THRESHOLD }
    }
}

/// Linker over an immutable graph and optional store. Description vectors
/// and token sets of the graph occupations are resolved once at construction.
#[derive(Debug)]
pub struct Linker<'a> {
    graph: &'a KnowledgeGraph,
    store: Option<&'a EmbeddingStore>,
    config: LinkConfig,
    // (occupation, description vector) in key order
    vectors: Vec<(OccupationKey, &'a [f32])>,
    token_sets: Vec<(OccupationKey, BTreeSet<String>)>,
}

impl<'a> Linker<'a> {
    pub fn new(graph: &'a KnowledgeGraph, store: Option<&'a EmbeddingStore>, config: LinkConfig) -> Self {
        let mut vectors = Vec::new();
        let mut token_sets = Vec::new();
        let mut missing = 0usize;
        for node in graph.occupations().filter(|n| !n.description.is_empty()) {
            token_sets.push((node.key.clone(), content_tokens(&node.description)));
            if let Some(store) = store {
                match store.get(&node.description) {
                    Some(v) if v.iter().any(|&x| x != 0.0) => vectors.push((node.key.clone(), v)),
                    Some(_) => warn!("zero vector for {} description; skipped", node.key),
                    None => missing += 1,
                }
            }
        }
        if store.is_some() && missing > 0 {
            debug!("{missing} occupation descriptions have no vector in the store");
        }
        Linker { graph, store, config, vectors, token_sets }
    }

    pub fn config(&self) -> LinkConfig {
        self.config
    }

    /// Resolves a candidate, or `None` when the best match is below threshold.
    pub fn link(&self, candidate: &MentionCandidate) -> Option<LinkedMention> {
        if let Some(known) = &candidate.occupation {
            if self.graph.contains_occupation(known) {
                return Some(LinkedMention {
                    candidate: candidate.clone(),
                    occupation: known.clone(),
                    similarity: 1.0,
                    method: LinkMethod::Lexical,
                });
            }
        }
        let query = self.store.and_then(|s| s.get(&candidate.description));
        match query {
            Some(q) if q.iter().any(|&x| x != 0.0) => self.link_embedding(candidate, q),
            _ => self.link_lexical(candidate),
        }
    }

    /// Top-1 cosine over all occupation vectors; ties go to the smallest key.
    pub fn best_embedding_match(&self, query: &[f32]) -> Option<(OccupationKey, f64)> {
        let mut best: Option<(&OccupationKey, f64)> = None;
        for (key, v) in &self.vectors {
            let Ok(score) = cosine(query, v) else { continue };
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((key, score));
            }
        }
        best.map(|(k, s)| (k.clone(), s))
    }

    fn link_embedding(&self, candidate: &MentionCandidate, query: &[f32]) -> Option<LinkedMention> {
        let (occupation, similarity) = self.best_embedding_match(query)?;
        (similarity >= self.config.embedding_threshold).then(|| LinkedMention {
            candidate: candidate.clone(),
            occupation,
            similarity,
            method: LinkMethod::Embedding,
        })
    }

    /// Top-1 Jaccard over occupation descriptions; ties go to the smallest key.
    pub fn best_lexical_match(&self, description: &str) -> Option<(OccupationKey, f64)> {
        let query = content_tokens(description);
        if query.is_empty() {
            return None;
        }
        let mut best: Option<(&OccupationKey, f64)> = None;
        for (key, tokens) in &self.token_sets {
            let score = jaccard(&query, tokens);
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((key, score));
            }
        }
        best.map(|(k, s)| (k.clone(), s))
    }

    fn link_lexical(&self, candidate: &MentionCandidate) -> Option<LinkedMention> {
        let (occupation, similarity) = self.best_lexical_match(&candidate.description)?;
        (similarity >= self.config.lexical_threshold).then(|| LinkedMention {
            candidate: candidate.clone(),
            occupation,
            similarity,
            method: LinkMethod::Lexical,
        })
    }
}

/// Embedding linking for a single candidate. Falls back to [`lexical_link`]
/// when the candidate's description has no vector in `store`.
pub fn link_mention(
    candidate: &MentionCandidate,
    graph: &KnowledgeGraph,
    store: &EmbeddingStore,
    threshold: f64,
    lexical_threshold: f64,
) -> Option<LinkedMention> {
    Linker::new(graph, Some(store), LinkConfig { embedding_threshold: threshold, lexical_threshold }).link(candidate)
}

/// Token-overlap linking for a single candidate.
pub fn lexical_link(candidate: &MentionCandidate, graph: &KnowledgeGraph, threshold: f64) -> Option<LinkedMention> {
    Linker::new(graph, None, LinkConfig { embedding_threshold: 1.0, lexical_threshold: threshold }).link(candidate)
}

/// Canonical descriptions of all graph occupations, each once, sorted.
pub fn embedding_keys(graph: &KnowledgeGraph) -> Vec<String> {
    graph
        .occupations()
        .filter(|n| !n.description.is_empty())
        .map(|n| canonical_key(&n.description))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}
