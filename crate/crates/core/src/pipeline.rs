//! The corpus pipeline: detect or import mentions, ground and link them,
//! identify gender, and count. Documents are independent, so the corpus is
//! split into contiguous shards processed on scoped threads; per-shard
//! counts are merged in shard order.

use std::collections::{BTreeMap, HashSet};
use std::thread;

use log::{debug, warn};
use serde::Serialize;
use thiserror::Error;

use crate::annotation::{AnnotatedDocument, AnnotationSet};
use crate::corpus::CorpusDoc;
use crate::extract::{self, Gazetteer, MentionCandidate, MentionSource, Span, DEFAULT_FUZZY_THRESHOLD};
use crate::gender::{self, DocContext, GenderLabel, GenderLexicon, MentionRef, ResolutionMethod};
use crate::graph::{KnowledgeGraph, OccupationKey};
use crate::link::{EmbeddingStore, LinkConfig, LinkMethod, LinkedMention, Linker};
use crate::stats::PartialCounts;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("no lexicon for language {lang:?} (document {doc_id:?})")]
    MissingLexicon { lang: String, doc_id: String },
    #[error("annotation text for document {0:?} differs from the corpus text")]
    AnnotationMismatch(String),
    #[error("shard count must be at least 1")]
    NoShards,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig {
    pub fuzzy_threshold: f64,
    pub link: LinkConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { fuzzy_threshold: DEFAULT_FUZZY_THRESHOLD, link: LinkConfig::default() }
    }
}

/// Read-only inputs shared by all shards.
#[derive(Clone, Copy, Debug)]
pub struct Resources<'a> {
    pub graph: &'a KnowledgeGraph,
    pub gazetteer: &'a Gazetteer,
    pub lexicon: &'a GenderLexicon,
    pub store: Option<&'a EmbeddingStore>,
    pub annotations: Option<&'a AnnotationSet>,
    /// External extractor output. When present it replaces gazetteer detection.
    pub external: Option<&'a [MentionCandidate]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditStatus {
    Counted,
    /// External surface not found in the text.
    Hallucinated,
    /// Grounded to a span already taken by an earlier mention.
    Duplicate,
    /// No occupation reached the link threshold.
    Unlinked,
}

/// One line of the audit file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditRow {
    pub doc_id: String,
    pub span: Option<Span>,
    pub surface: String,
    pub source: MentionSource,
    pub code: Option<OccupationKey>,
    pub similarity: Option<f64>,
    pub link_method: Option<LinkMethod>,
    pub label: Option<GenderLabel>,
    pub method: Option<ResolutionMethod>,
    pub status: AuditStatus,
}

impl AuditRow {
    fn unresolved(c: &MentionCandidate, status: AuditStatus) -> AuditRow {
        AuditRow {
            doc_id: c.doc_id.clone(),
            span: c.span,
            surface: c.surface.clone(),
            source: c.source,
            code: None,
            similarity: None,
            link_method: None,
            label: None,
            method: None,
            status,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Analysis {
    pub counts: PartialCounts,
    /// In corpus order, then span order within a document.
    pub audit: Vec<AuditRow>,
}

impl Analysis {
    pub fn audit_jsonl(&self) -> String {
        let mut out = String::new();
        for row in &self.audit {
            out.push_str(&serde_json::to_string(row).expect("audit rows serialize"));
            out.push('\n');
        }
        out
    }
}

/// Fails when a document's language could not be processed: no gender
/// lexicon, or no gazetteer while detection relies on it.
pub fn check_languages(docs: &[CorpusDoc], res: &Resources<'_>) -> Result<(), PipelineError> {
    for doc in docs {
        let no_gazetteer = res.external.is_none() && res.gazetteer.matcher(&doc.lang).is_none();
        if no_gazetteer || !res.lexicon.has_language(&doc.lang) {
            return Err(PipelineError::MissingLexicon { lang: doc.lang.clone(), doc_id: doc.doc_id.clone() });
        }
        if let Some(ann) = res.annotations.and_then(|a| a.get(&doc.doc_id)) {
            if ann.text != doc.text {
                return Err(PipelineError::AnnotationMismatch(doc.doc_id.clone()));
            }
        }
    }
    Ok(())
}

struct Shard<'a> {
    res: Resources<'a>,
    config: PipelineConfig,
    linker: &'a Linker<'a>,
    external: &'a BTreeMap<&'a str, Vec<&'a MentionCandidate>>,
}

impl Shard<'_> {
    fn candidates(&self, doc: &CorpusDoc, audit: &mut Vec<AuditRow>) -> Vec<MentionCandidate> {
        if self.res.external.is_none() {
            return self.res.gazetteer.matcher(&doc.lang).map(|m| m.detect(&doc.doc_id, &doc.text)).unwrap_or_default();
        }
        let matcher = self.res.gazetteer.matcher(&doc.lang);
        let mut taken: HashSet<Span> = HashSet::new();
        let mut out = Vec::new();
        for &c in self.external.get(doc.doc_id.as_str()).into_iter().flatten() {
            let Some((span, score)) = extract::verify_surface(&c.surface, &doc.text, self.config.fuzzy_threshold)
            else {
                debug!("{}: {:?} not grounded in text", doc.doc_id, c.surface);
                audit.push(AuditRow::unresolved(c, AuditStatus::Hallucinated));
                continue;
            };
            let mut grounded = c.clone();
            grounded.span = Some(span);
            if !taken.insert(span) {
                audit.push(AuditRow::unresolved(&grounded, AuditStatus::Duplicate));
                continue;
            }
            if let Some(entry) = matcher.and_then(|m| m.lookup(&doc.text[span.start..span.end])) {
                grounded.number = entry.number;
            }
            debug!("{}: {:?} grounded at {span} (score {score:.3})", doc.doc_id, c.surface);
            out.push(grounded);
        }
        out.sort_by_key(|c| c.span);
        out
    }

    fn document(&self, doc: &CorpusDoc) -> (PartialCounts, Vec<AuditRow>) {
        let mut audit = Vec::new();
        let mut counts = PartialCounts::new();
        let annotations: Option<&AnnotatedDocument> = self.res.annotations.and_then(|a| a.get(&doc.doc_id));

        let mut linked: Vec<LinkedMention> = Vec::new();
        let mut rows: Vec<AuditRow> = Vec::new();
        for c in self.candidates(doc, &mut audit) {
            match self.linker.link(&c) {
                Some(l) => linked.push(l),
                None => rows.push(AuditRow::unresolved(&c, AuditStatus::Unlinked)),
            }
        }
        let refs: Vec<MentionRef> = linked
            .iter()
            .map(|l| {
                let span = l.candidate.span.expect("candidates are grounded");
                MentionRef { span, number: gender::mention_number(span, l.candidate.number, annotations) }
            })
            .collect();
        let ctx = DocContext { lang: &doc.lang, text: &doc.text, annotations, mentions: &refs };
        for (l, m) in linked.iter().zip(&refs) {
            let r = gender::identify_gender(m, &ctx, self.res.lexicon);
            counts.record(&l.occupation, &doc.lang, r.label());
            rows.push(AuditRow {
                doc_id: doc.doc_id.clone(),
                span: Some(m.span),
                surface: l.candidate.surface.clone(),
                source: l.candidate.source,
                code: Some(l.occupation.clone()),
                similarity: Some(l.similarity),
                link_method: Some(l.method),
                label: Some(r.label()),
                method: Some(r.method()),
                status: AuditStatus::Counted,
            });
        }
        rows.sort_by_key(|r| r.span);
        audit.extend(rows);
        (counts, audit)
    }
}

/// Runs the pipeline over `docs` with `shards` worker threads. The result
/// does not depend on `shards`.
pub fn analyze(
    docs: &[CorpusDoc],
    res: Resources<'_>,
    config: PipelineConfig,
    shards: usize,
) -> Result<Analysis, PipelineError> {
    if shards == 0 {
        return Err(PipelineError::NoShards);
    }
    check_languages(docs, &res)?;
    let linker = Linker::new(res.graph, res.store, config.link);
    let mut external: BTreeMap<&str, Vec<&MentionCandidate>> = BTreeMap::new();
    for c in res.external.into_iter().flatten() {
        external.entry(c.doc_id.as_str()).or_default().push(c);
    }
    let known: HashSet<&str> = docs.iter().map(|d| d.doc_id.as_str()).collect();
    for id in external.keys().filter(|id| !known.contains(*id)) {
        warn!("external mentions for unknown document {id:?} ignored");
    }
    let shard = Shard { res, config, linker: &linker, external: &external };

    let chunk = docs.len().div_ceil(shards).max(1);
    let results: Vec<(PartialCounts, Vec<AuditRow>)> = thread::scope(|s| {
        let handles: Vec<_> = docs
            .chunks(chunk)
            .map(|part| {
                let shard = &shard;
                s.spawn(move || {
                    let mut counts = PartialCounts::new();
                    let mut audit = Vec::new();
                    for doc in part {
                        let (c, a) = shard.document(doc);
                        counts.merge(&c);
                        audit.extend(a);
                    }
                    (counts, audit)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("pipeline shard panicked")).collect()
    });

    let mut out = Analysis::default();
    for (counts, audit) in results {
        out.counts.merge(&counts);
        out.audit.extend(audit);
    }
    Ok(out)
}
