//! Loaders for classification files (occupation hierarchy) and labour-survey
//! CSVs (gender distributions per occupation, country and year).
//!
//! Both formats are comma-separated UTF-8 with a mandatory header row and
//! `.` as the decimal separator. Bad rows are collected rather than failing
//! the whole file, except that a classification file with more than 10% bad
//! rows is rejected outright.

use std::collections::HashSet;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, Read};
use std::path::Path;

use log::{info, warn};
use serde::Deserialize;
use thiserror::Error;

use crate::graph::{
    CountryRole, GraphError, KnowledgeGraph, OccupationKey, Percent, Source, StatisticsNode, SurveySource, Violation,
};

/// Share of bad rows above which a classification file is rejected.
pub const MAX_BAD_ROW_FRACTION: f64 = 0.10;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl From<csv::Error> for IngestError {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => match e.into_kind() {
                csv::ErrorKind::Io(io) => IngestError::Io(io),
                _ => unreachable!(),
            },
            _ => IngestError::Format(e.to_string()),
        }
    }
}

/// A rejected data row with its 1-based file line.
#[derive(Clone, Debug, PartialEq)]
pub struct RowError<R> {
    pub line: u64,
    pub reason: R,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ClassificationRow {
    pub code: String,
    pub title: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Default)]
pub struct ClassificationReport {
    pub added: usize,
    pub errors: Vec<RowError<String>>,
}

fn require_columns(headers: &csv::StringRecord, required: &[&str]) -> Result<(), IngestError> {
    for col in required {
        if !headers.iter().any(|h| h.trim() == *col) {
            return Err(IngestError::Format(format!("header must contain {}; missing {col:?}", required.join(","))));
        }
    }
    Ok(())
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader)
}

/// Reads `code,title,description` rows into `graph` under `scheme`.
///
/// Nothing is inserted when the file is rejected for too many bad rows.
pub fn read_classification<R: Read>(
    graph: &mut KnowledgeGraph,
    reader: R,
    scheme: &str,
) -> Result<ClassificationReport, IngestError> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers()?.clone();
    require_columns(&headers, &["code", "title", "description"])?;

    let mut report = ClassificationReport::default();
    let mut good = Vec::new();
    let mut seen = HashSet::new();
    let mut total = 0usize;
    for result in rdr.deserialize::<ClassificationRow>() {
        total += 1;
        let row = match result {
            Ok(row) => row,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                report.errors.push(RowError { line, reason: e.to_string() });
                continue;
            }
        };
        let line = total as u64 + 1;
        let reason = match OccupationKey::new(scheme, &row.code) {
            Err(e) => Some(e.to_string()),
            Ok(_) if row.title.is_empty() => Some(format!("code {} has an empty title", row.code)),
            Ok(key) if graph.contains_occupation(&key) || !seen.insert(key.clone()) => {
                Some(format!("duplicate code {key}"))
            }
            Ok(_) => None,
        };
        match reason {
            Some(reason) => report.errors.push(RowError { line, reason }),
            None => good.push(row),
        }
    }
    if total > 0 && report.errors.len() as f64 > MAX_BAD_ROW_FRACTION * total as f64 {
        return Err(IngestError::Format(format!(
            "{} of {total} rows are malformed (limit {:.0}%); first: line {}: {}",
            report.errors.len(),
            MAX_BAD_ROW_FRACTION * 100.0,
            report.errors[0].line,
            report.errors[0].reason
        )));
    }
    for row in good {
        graph.add_occupation(scheme, &row.code, &row.title, &row.description)?;
        report.added += 1;
    }
    for e in &report.errors {
        info!("classification line {}: {}", e.line, e.reason);
    }
    Ok(report)
}

pub fn load_classification(
    graph: &mut KnowledgeGraph,
    path: impl AsRef<Path>,
    scheme: &str,
) -> Result<ClassificationReport, IngestError> {
    read_classification(graph, File::open(path)?, scheme)
}

/// Survey provenance, read from a small JSON file.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurveyMeta {
    pub title: String,
    #[serde(default)]
    pub description: String,
    pub period: String,
}

impl SurveyMeta {
    pub fn load(path: impl AsRef<Path>) -> Result<SurveyMeta, IngestError> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| IngestError::Format(format!("survey meta: {e}")))
    }

    fn source(&self) -> Source {
        Source::Survey(SurveySource {
            title: self.title.clone(),
            description: self.description.clone(),
            period: self.period.clone(),
        })
    }
}

#[derive(Debug, Deserialize)]
struct RawSurveyRow {
    country: String,
    year: i32,
    scheme: String,
    code: String,
    male_pct: f64,
    female_pct: f64,
    #[serde(default)]
    male_count: Option<u64>,
    #[serde(default)]
    female_count: Option<u64>,
}

/// A validated survey row.
#[derive(Clone, Debug, PartialEq)]
pub struct SurveyRow {
    pub country: String,
    pub year: i32,
    pub occupation: OccupationKey,
    pub male_pct: Percent,
    pub female_pct: Percent,
    pub male_count: Option<u64>,
    pub female_count: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RejectReason {
    Malformed(String),
    InvalidCountry(String),
    YearOutOfRange(i32),
    UnknownOccupation(OccupationKey),
    BadPercentSum { sum_hundredths: u32 },
    CountMismatch(String),
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Malformed(m) => write!(f, "Malformed: {m}"),
            RejectReason::InvalidCountry(c) => write!(f, "InvalidCountry: {c:?} is not a 2-letter code"),
            RejectReason::YearOutOfRange(y) => write!(f, "YearOutOfRange: {y}"),
            RejectReason::UnknownOccupation(k) => write!(f, "UnknownOccupation: {k}"),
            RejectReason::BadPercentSum { sum_hundredths } => {
                write!(f, "BadPercentSum: male + female = {}.{:02}", sum_hundredths / 100, sum_hundredths % 100)
            }
            RejectReason::CountMismatch(m) => write!(f, "CountMismatch: {m}"),
        }
    }
}

fn validate_row(raw: RawSurveyRow) -> Result<SurveyRow, RejectReason> {
    if raw.country.len() != 2 || !raw.country.bytes().all(|b| b.is_ascii_uppercase()) {
        return Err(RejectReason::InvalidCountry(raw.country));
    }
    if !(1900..=2100).contains(&raw.year) {
        return Err(RejectReason::YearOutOfRange(raw.year));
    }
    let occupation = OccupationKey::new(&raw.scheme, &raw.code).map_err(|e| RejectReason::Malformed(e.to_string()))?;
    let pct = |v: f64, name: &str| {
        Percent::from_f64(v).ok_or_else(|| RejectReason::Malformed(format!("{name} {v} outside [0, 100]")))
    };
    Ok(SurveyRow {
        country: raw.country,
        year: raw.year,
        occupation,
        male_pct: pct(raw.male_pct, "male_pct")?,
        female_pct: pct(raw.female_pct, "female_pct")?,
        male_count: raw.male_count,
        female_count: raw.female_count,
    })
}

/// One parsed survey row with its line number.
pub type ParsedRow = (u64, Result<SurveyRow, RejectReason>);

/// Parses survey rows without touching a graph, so files can be parsed in
/// parallel and attached afterwards.
pub fn parse_survey<R: Read>(reader: R) -> Result<Vec<ParsedRow>, IngestError> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers()?.clone();
    require_columns(&headers, &["country", "year", "scheme", "code", "male_pct", "female_pct"])?;
    let mut out = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map_or(0, |p| p.line());
                let row = record
                    .deserialize::<RawSurveyRow>(Some(&headers))
                    .map_err(|e| RejectReason::Malformed(e.to_string()))
                    .and_then(validate_row);
                out.push((line, row));
            }
            Err(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => return Err(e.into()),
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                out.push((line, Err(RejectReason::Malformed(e.to_string()))));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Default)]
pub struct SurveyReport {
    pub attached: usize,
    /// Rows that overwrote a different existing statistic (last write wins).
    pub replaced: usize,
    pub rejected: Vec<RowError<RejectReason>>,
}

impl SurveyReport {
    pub fn total(&self) -> usize {
        self.attached + self.rejected.len()
    }
}

/// Attaches parsed survey rows to `graph` as `linkedToCountry` statistics.
pub fn attach_survey(
    graph: &mut KnowledgeGraph,
    rows: Vec<(u64, Result<SurveyRow, RejectReason>)>,
    meta: &SurveyMeta,
) -> Result<SurveyReport, IngestError> {
    let source = graph.add_source(meta.source())?;
    let mut report = SurveyReport::default();
    for (line, row) in rows {
        let row = match row {
            Ok(r) => r,
            Err(reason) => {
                report.rejected.push(RowError { line, reason });
                continue;
            }
        };
        if !graph.contains_occupation(&row.occupation) {
            report.rejected.push(RowError { line, reason: RejectReason::UnknownOccupation(row.occupation) });
            continue;
        }
        if let Err(e) = graph.add_country(&row.country, CountryRole::Country) {
            report.rejected.push(RowError { line, reason: RejectReason::Malformed(e.to_string()) });
            continue;
        }
        let stats = StatisticsNode {
            occupation: row.occupation,
            male_pct: row.male_pct,
            female_pct: row.female_pct,
            male_count: row.male_count,
            female_count: row.female_count,
            unclear_count: None,
            source: source.clone(),
            context: row.country,
            year_from: Some(row.year),
            year_to: Some(row.year),
        };
        let key = stats.key();
        let previous = graph.statistic(&key).cloned();
        match graph.attach_statistics(stats) {
            Ok(_) => {
                report.attached += 1;
                if let Some(prev) = previous {
                    if graph.statistic(&key) != Some(&prev) {
                        warn!("survey line {line}: {key} replaced an earlier value");
                        report.replaced += 1;
                    }
                }
            }
            Err(GraphError::InvalidStatistics(violations)) => {
                let reason = match &violations[0] {
                    Violation::BadPercentSum { sum_hundredths, .. } => {
                        RejectReason::BadPercentSum { sum_hundredths: *sum_hundredths }
                    }
                    other => RejectReason::CountMismatch(other.to_string()),
                };
                report.rejected.push(RowError { line, reason });
            }
            Err(e) => return Err(e.into()),
        }
    }
    for r in &report.rejected {
        info!("survey line {}: rejected: {}", r.line, r.reason);
    }
    Ok(report)
}

pub fn load_survey(
    graph: &mut KnowledgeGraph,
    path: impl AsRef<Path>,
    meta: &SurveyMeta,
) -> Result<SurveyReport, IngestError> {
    let rows = parse_survey(File::open(path)?)?;
    attach_survey(graph, rows, meta)
}
