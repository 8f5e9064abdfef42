//! Occupation mention detection.
//!
//! Two sources of candidates feed the pipeline:
//!
//! * a gazetteer built from per-language lexicon files, matched with an
//!   Aho-Corasick automaton over case-folded text and filtered to Unicode
//!   word boundaries;
//! * externally produced extractor output (title, in-text surface form and a
//!   free-text description per occupation), which carries no offsets and is
//!   grounded in the text by [`verify_surface`]. Surfaces that do not
//!   fuzzy-match any token window of the document are dropped as
//!   hallucinations.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use aho_corasick::{AhoCorasick, MatchKind};
use log::info;
use serde::{Deserialize, Serialize};

use crate::corpus::{parse_jsonl, CorpusError};
use crate::gender::Gender;
use crate::graph::{KnowledgeGraph, OccupationKey};
use crate::text::{self, FoldedText};

/// Default minimum similarity for grounding an external surface form.
pub const DEFAULT_FUZZY_THRESHOLD: f64 = 0.8;

/// Byte span `[start, end)` into a document's UTF-8 text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }
}

impl From<[usize; 2]> for Span {
    fn from([start, end]: [usize; 2]) -> Self {
        Span { start, end }
    }
}

impl From<Span> for [usize; 2] {
    fn from(s: Span) -> Self {
        [s.start, s.end]
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GrammaticalNumber {
    Singular,
    Plural,
    #[default]
    Unknown,
}

impl GrammaticalNumber {
    /// Unknown agrees with everything.
    pub fn agrees_with(self, other: GrammaticalNumber) -> bool {
        self == other || self == GrammaticalNumber::Unknown || other == GrammaticalNumber::Unknown
    }

    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "singular" | "sing" | "sg" => Some(GrammaticalNumber::Singular),
            "plural" | "plur" | "pl" => Some(GrammaticalNumber::Plural),
            "unknown" | "-" | "" => Some(GrammaticalNumber::Unknown),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MentionSource {
    Gazetteer,
    External,
}

/// A detected occupation mention, before linking.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MentionCandidate {
    pub doc_id: String,
    pub title: String,
    pub surface: String,
    pub description: String,
    /// `None` for external candidates until [`verify_surface`] grounds them.
    pub span: Option<Span>,
    pub source: MentionSource,
    /// Known for gazetteer matches; external candidates are linked later.
    pub occupation: Option<OccupationKey>,
    pub number: GrammaticalNumber,
}

/// One lexicon row: an inflected occupation form in one language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GazetteerEntry {
    pub lang: String,
    /// Case-folded.
    pub pattern: String,
    pub occupation: OccupationKey,
    pub number: GrammaticalNumber,
    pub lexical_gender: Option<Gender>,
}

/// Parses lexicon TSV: `lang, pattern, code, number, lexical_gender`.
///
/// Blank lines, `#` comments and a header row starting with `lang` are
/// skipped. Rows with a malformed column are dropped with a warning; the
/// returned strings describe them.
pub fn parse_lexicon(text: &str) -> (Vec<GazetteerEntry>, Vec<String>) {
    let mut entries = Vec::new();
    let mut dropped = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if cols[0] == "lang" {
            continue;
        }
        let parsed = (|| {
            if cols.len() != 5 {
                return Err(format!("expected 5 tab-separated columns, found {}", cols.len()));
            }
            let pattern = text::fold(cols[1]);
            if pattern.is_empty() {
                return Err("empty pattern".to_string());
            }
            let occupation: OccupationKey = cols[2].parse().map_err(|e| format!("{e}"))?;
            let number =
                GrammaticalNumber::parse(cols[3]).ok_or_else(|| format!("bad grammatical number {:?}", cols[3]))?;
            let lexical_gender = match cols[4].to_ascii_lowercase().as_str() {
                "masc" | "m" => Some(Gender::Male),
                "fem" | "f" => Some(Gender::Female),
                "none" | "-" | "" => None,
                other => return Err(format!("bad lexical gender {other:?}")),
            };
            Ok(GazetteerEntry { lang: cols[0].to_string(), pattern, occupation, number, lexical_gender })
        })();
        match parsed {
            Ok(e) => entries.push(e),
            Err(reason) => {
                info!("lexicon line {line_no}: dropped: {reason}");
                dropped.push(format!("line {line_no}: {reason}"));
            }
        }
    }
    (entries, dropped)
}

pub fn load_lexicon(path: impl AsRef<Path>) -> std::io::Result<(Vec<GazetteerEntry>, Vec<String>)> {
    Ok(parse_lexicon(&fs::read_to_string(path)?))
}

#[derive(Clone, Debug)]
struct ResolvedEntry {
    entry: GazetteerEntry,
    title: String,
    description: String,
}

/// Matcher for one language.
#[derive(Clone, Debug)]
pub struct LangMatcher {
    automaton: AhoCorasick,
    entries: Vec<ResolvedEntry>,
    by_pattern: HashMap<String, usize>,
}

impl LangMatcher {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, surface: &str) -> Option<&GazetteerEntry> {
        self.by_pattern.get(&text::fold(surface.trim())).map(|&i| &self.entries[i].entry)
    }

    /// Case-insensitive whole-word matches, non-overlapping. Where matches
    /// overlap the longest wins, ties going to the leftmost.
    pub fn detect(&self, doc_id: &str, text: &str) -> Vec<MentionCandidate> {
        if text.is_empty() {
            return Vec::new();
        }
        let folded = FoldedText::new(text);
        let boundaries = text::word_boundaries(text);
        let on_boundary = |i: usize| boundaries.binary_search(&i).is_ok();

        let mut hits: Vec<(Span, usize)> = self
            .automaton
            .find_overlapping_iter(&folded.folded)
            .filter_map(|m| {
                let (start, end) = folded.original_span(m.start(), m.end());
                let span = Span::new(start, end);
                (!span.is_empty() && on_boundary(start) && on_boundary(end)).then(|| (span, m.pattern().as_usize()))
            })
            .collect();
        hits.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.start.cmp(&b.0.start)));
        let mut chosen: Vec<(Span, usize)> = Vec::new();
        for (span, idx) in hits {
            if chosen.iter().all(|(s, _)| !s.overlaps(&span)) {
                chosen.push((span, idx));
            }
        }
        chosen.sort_by_key(|(s, _)| s.start);
        chosen
            .into_iter()
            .map(|(span, idx)| {
                let r = &self.entries[idx];
                MentionCandidate {
                    doc_id: doc_id.to_string(),
                    title: r.title.clone(),
                    surface: text[span.start..span.end].to_string(),
                    description: r.description.clone(),
                    span: Some(span),
                    source: MentionSource::Gazetteer,
                    occupation: Some(r.entry.occupation.clone()),
                    number: r.entry.number,
                }
            })
            .collect()
    }
}

/// Per-language gazetteer matchers.
#[derive(Clone, Debug, Default)]
pub struct Gazetteer {
    langs: BTreeMap<String, LangMatcher>,
}

impl Gazetteer {
    /// Builds matchers from lexicon entries. Entries whose occupation is not
    /// in `graph`, and repeated patterns within a language, are dropped; the
    /// returned strings describe each drop.
    pub fn build(graph: &KnowledgeGraph, entries: Vec<GazetteerEntry>) -> (Gazetteer, Vec<String>) {
        let mut dropped = Vec::new();
        let mut per_lang: BTreeMap<String, Vec<ResolvedEntry>> = BTreeMap::new();
        let mut seen: HashSet<(String, String)> = HashSet::new();
        for entry in entries {
            let Some(node) = graph.occupation(&entry.occupation) else {
                let msg = format!("{}/{}: unknown occupation {}", entry.lang, entry.pattern, entry.occupation);
                info!("gazetteer: dropped {msg}");
                dropped.push(msg);
                continue;
            };
            if !seen.insert((entry.lang.clone(), entry.pattern.clone())) {
                let msg = format!("{}/{}: duplicate pattern", entry.lang, entry.pattern);
                info!("gazetteer: dropped {msg}");
                dropped.push(msg);
                continue;
            }
            let resolved = ResolvedEntry { title: node.title.clone(), description: node.description.clone(), entry };
            per_lang.entry(resolved.entry.lang.clone()).or_default().push(resolved);
        }
        let langs = per_lang
            .into_iter()
            .map(|(lang, entries)| {
                let automaton = AhoCorasick::builder()
                    .match_kind(MatchKind::Standard)
                    .build(entries.iter().map(|e| e.entry.pattern.as_str()))
                    .expect("gazetteer automaton within size limits");
                let by_pattern = entries.iter().enumerate().map(|(i, e)| (e.entry.pattern.clone(), i)).collect();
                (lang, LangMatcher { automaton, entries, by_pattern })
            })
            .collect();
        (Gazetteer { langs }, dropped)
    }

    pub fn matcher(&self, lang: &str) -> Option<&LangMatcher> {
        self.langs.get(lang)
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.langs.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = &GazetteerEntry> {
        self.langs.values().flat_map(|m| m.entries.iter().map(|r| &r.entry))
    }

    /// Total number of patterns across languages.
    pub fn len(&self) -> usize {
        self.langs.values().map(LangMatcher::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `1 - levenshtein(a, b) / max(|a|, |b|)` over characters; 1.0 for two empty strings.
pub fn similarity(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - strsim::levenshtein(a, b) as f64 / longest as f64
}

/// Grounds a surface form in `text`: compares the folded surface against
/// every window of `n` consecutive word tokens (`n` = token count of the
/// surface) and returns the best window and its score if the score reaches
/// `threshold`. Ties go to the leftmost window.
pub fn verify_surface(surface: &str, text: &str, threshold: f64) -> Option<(Span, f64)> {
    let folded_surface = text::fold(surface);
    let surface_tokens: Vec<&str> =
        text::word_tokens(&folded_surface).iter().map(|t| t.text(&folded_surface)).collect();
    let n = surface_tokens.len();
    if n == 0 {
        return None;
    }
    let needle = surface_tokens.join(" ");
    let tokens = text::word_tokens(text);
    let folded_tokens: Vec<String> = tokens.iter().map(|t| text::fold(t.text(text))).collect();

    let mut best: Option<(Span, f64)> = None;
    for (i, window) in folded_tokens.windows(n).enumerate() {
        let score = similarity(&needle, &window.join(" "));
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((Span::new(tokens[i].start, tokens[i + n - 1].end), score));
        }
    }
    best.filter(|&(_, score)| score >= threshold)
}

/// One line of an external-mentions file.
#[derive(Clone, Debug, Deserialize)]
pub struct ExternalMentionRecord {
    pub doc_id: String,
    pub title: String,
    pub surface: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Default)]
pub struct ExternalImport {
    pub candidates: Vec<MentionCandidate>,
    /// `(line, reason)` for records that were not imported.
    pub rejected: Vec<(usize, String)>,
}

/// Reads external extractor output. Records naming a document absent from
/// `doc_ids`, or with an empty surface, are rejected; malformed JSON fails
/// the whole import.
pub fn import_external_mentions<'a>(
    jsonl: &str,
    doc_ids: impl IntoIterator<Item = &'a str>,
) -> Result<ExternalImport, CorpusError> {
    let known: HashSet<&str> = doc_ids.into_iter().collect();
    let records: Vec<(usize, ExternalMentionRecord)> = parse_jsonl(jsonl)?;
    let mut out = ExternalImport::default();
    for (line, rec) in records {
        if !known.contains(rec.doc_id.as_str()) {
            out.rejected.push((line, format!("unknown doc_id {:?}", rec.doc_id)));
        } else if rec.surface.trim().is_empty() {
            out.rejected.push((line, "empty surface".into()));
        } else {
            out.candidates.push(MentionCandidate {
                doc_id: rec.doc_id,
                title: rec.title,
                surface: rec.surface.trim().to_string(),
                description: rec.description,
                span: None,
                source: MentionSource::External,
                occupation: None,
                number: GrammaticalNumber::Unknown,
            });
        }
    }
    for (line, reason) in &out.rejected {
        info!("external mentions line {line}: rejected: {reason}");
    }
    Ok(out)
}

pub fn load_external_mentions<'a>(
    path: impl AsRef<Path>,
    doc_ids: impl IntoIterator<Item = &'a str>,
) -> Result<ExternalImport, CorpusError> {
    import_external_mentions(&fs::read_to_string(path)?, doc_ids)
}
