//! Linguistic annotation files produced by external tooling: tokens with
//! morphology and dependency heads, coreference chains and sentence bounds.
//!
//! Annotation files are untrusted input; every document is validated before
//! it is used.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{parse_jsonl, CorpusError};
use crate::extract::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MorphGender {
    Masc,
    Fem,
    /// Present in Greek and other three-gender languages; carries no male/female signal.
    Neut,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MorphNumber {
    Sing,
    Plur,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub i: usize,
    pub start: usize,
    pub end: usize,
    pub surface: String,
    #[serde(default)]
    pub lemma: String,
    #[serde(default)]
    pub upos: String,
    #[serde(default)]
    pub gender: Option<MorphGender>,
    #[serde(default)]
    pub number: Option<MorphNumber>,
    /// Index of the syntactic head, `-1` for the root.
    #[serde(default = "root_head")]
    pub head: i64,
    #[serde(default)]
    pub deprel: String,
}

fn root_head() -> i64 {
    -1
}

impl Token {
    pub fn span(&self) -> Span {
        Span::new(self.start, self.end)
    }

    pub fn head_index(&self) -> Option<usize> {
        usize::try_from(self.head).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedDocument {
    pub doc_id: String,
    pub text: String,
    #[serde(default)]
    pub tokens: Vec<Token>,
    /// `None` when no coreference model ran; chains are then inferred heuristically.
    #[serde(default)]
    pub coref: Option<Vec<Vec<Span>>>,
    #[serde(default)]
    pub sentences: Vec<Span>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnnotationViolation {
    TokenIndex { position: usize, found: usize },
    TokenSpan { token: usize, reason: String },
    TokenOverlap { token: usize },
    SurfaceMismatch { token: usize },
    HeadOutOfRange { token: usize, head: i64 },
    ChainSpan { chain: usize, span: Span },
    SentenceSpan { span: Span },
}

impl fmt::Display for AnnotationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnotationViolation::TokenIndex { position, found } => {
                write!(f, "token at position {position} has i={found}")
            }
            AnnotationViolation::TokenSpan { token, reason } => write!(f, "token {token}: {reason}"),
            AnnotationViolation::TokenOverlap { token } => {
                write!(f, "token {token} overlaps or precedes the previous token")
            }
            AnnotationViolation::SurfaceMismatch { token } => {
                write!(f, "token {token}: surface differs from text slice")
            }
            AnnotationViolation::HeadOutOfRange { token, head } => {
                write!(f, "token {token}: head {head} out of range")
            }
            AnnotationViolation::ChainSpan { chain, span } => {
                write!(f, "chain {chain}: span {span} outside text or not on char boundaries")
            }
            AnnotationViolation::SentenceSpan { span } => {
                write!(f, "sentence {span} outside text, out of order or not on char boundaries")
            }
        }
    }
}

fn span_ok(text: &str, s: Span) -> bool {
    s.start < s.end && s.end <= text.len() && text.is_char_boundary(s.start) && text.is_char_boundary(s.end)
}

impl AnnotatedDocument {
    /// Every schema and span-sanity violation; empty iff the document is usable.
    pub fn validate(&self) -> Vec<AnnotationViolation> {
        let mut out = Vec::new();
        let n = self.tokens.len() as i64;
        let mut prev_end = 0usize;
        for (pos, t) in self.tokens.iter().enumerate() {
            if t.i != pos {
                out.push(AnnotationViolation::TokenIndex { position: pos, found: t.i });
            }
            if !span_ok(&self.text, t.span()) {
                out.push(AnnotationViolation::TokenSpan {
                    token: pos,
                    reason: format!("span [{},{}) invalid for text of {} bytes", t.start, t.end, self.text.len()),
                });
            } else if self.text[t.start..t.end] != t.surface {
                out.push(AnnotationViolation::SurfaceMismatch { token: pos });
            }
            if pos > 0 && t.start < prev_end {
                out.push(AnnotationViolation::TokenOverlap { token: pos });
            }
            prev_end = prev_end.max(t.end);
            if t.head < -1 || t.head >= n || t.head == pos as i64 {
                out.push(AnnotationViolation::HeadOutOfRange { token: pos, head: t.head });
            }
        }
        for (ci, chain) in self.coref.iter().flatten().enumerate() {
            for &span in chain {
                if !span_ok(&self.text, span) {
                    out.push(AnnotationViolation::ChainSpan { chain: ci, span });
                }
            }
        }
        let mut prev = 0usize;
        for &span in &self.sentences {
            if !span_ok(&self.text, span) || span.start < prev {
                out.push(AnnotationViolation::SentenceSpan { span });
            }
            prev = span.end;
        }
        out
    }

    pub fn has_dependencies(&self) -> bool {
        self.tokens.iter().any(|t| !t.deprel.is_empty())
    }

    /// Indices of tokens overlapping `span`.
    pub fn tokens_in(&self, span: Span) -> impl Iterator<Item = usize> + '_ {
        self.tokens.iter().enumerate().filter(move |(_, t)| t.span().overlaps(&span)).map(|(i, _)| i)
    }

    /// Syntactic head of the tokens covering `span`: the covering token whose
    /// head lies outside the span, else the last covering token.
    pub fn head_token(&self, span: Span) -> Option<usize> {
        let covered: Vec<usize> = self.tokens_in(span).collect();
        covered
            .iter()
            .copied()
            .find(|&i| match self.tokens[i].head_index() {
                None => true,
                Some(h) => !covered.contains(&h),
            })
            .or(covered.last().copied())
    }
}

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("document {doc_id:?} failed validation: {}", .violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid { doc_id: String, violations: Vec<AnnotationViolation> },
}

impl From<CorpusError> for AnnotationError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io(io) => AnnotationError::Io(io),
            CorpusError::Format { line, message } => AnnotationError::Format { line, message },
        }
    }
}

/// Validated annotations keyed by document id.
#[derive(Clone, Debug, Default)]
pub struct AnnotationSet {
    docs: HashMap<String, AnnotatedDocument>,
}

impl AnnotationSet {
    pub fn from_jsonl(text: &str) -> Result<AnnotationSet, AnnotationError> {
        let mut docs = HashMap::new();
        for (line, doc) in parse_jsonl::<AnnotatedDocument>(text)? {
            let violations = doc.validate();
            if !violations.is_empty() {
                return Err(AnnotationError::Invalid { doc_id: doc.doc_id, violations });
            }
            if docs.contains_key(&doc.doc_id) {
                return Err(AnnotationError::Format { line, message: format!("duplicate doc_id {:?}", doc.doc_id) });
            }
            docs.insert(doc.doc_id.clone(), doc);
        }
        Ok(AnnotationSet { docs })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<AnnotationSet, AnnotationError> {
        Self::from_jsonl(&fs::read_to_string(path)?)
    }

    pub fn get(&self, doc_id: &str) -> Option<&AnnotatedDocument> {
        self.docs.get(doc_id)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}
