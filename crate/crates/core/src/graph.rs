//! Typed in-memory knowledge graph of occupations, gender statistics and
//! their provenance (datasets, surveys, countries and languages).
//!
//! The occupation hierarchy is implicit in the codes: a node with code
//! `221` is a `subclassOf` the node `22` when that node exists. Inserting
//! `221` before `22` is allowed; the edge materializes as soon as the parent
//! arrives, and [`KnowledgeGraph::validate`] reports any node still missing
//! its parent.
//!
//! Persistence is a line-delimited JSON format (one record per line, header
//! first) written in canonical order so that saving is a pure function of
//! graph content.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Classification scheme used when a code carries no explicit scheme tag.
pub const DEFAULT_SCHEME: &str = "isco08";

/// Allowed gap between `male + female` and 100, and between stored and
/// count-derived percentages.
pub const PERCENT_TOLERANCE: Percent = Percent(5);

pub const GRAPH_FORMAT_VERSION: u32 = 1;

/// A percentage in `[0, 100]` with exactly two decimals, stored as an
/// integer number of hundredths so comparisons and round-trips are exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent(u32);

impl Percent {
    pub const ZERO: Percent = Percent(0);
    pub const HUNDRED: Percent = Percent(10_000);

    pub fn from_hundredths(h: u32) -> Option<Percent> {
        (h <= 10_000).then_some(Percent(h))
    }

    /// Rounds to the nearest hundredth. Rejects NaN and values outside `[0, 100]`.
    pub fn from_f64(v: f64) -> Option<Percent> {
        if !v.is_finite() {
            return None;
        }
        let h = (v * 100.0).round();
        if !(0.0..=10_000.0).contains(&h) {
            return None;
        }
        Some(Percent(h as u32))
    }

    /// `100 * part / whole`, rounded half-up to hundredths. `None` when `whole == 0`.
    pub fn from_ratio(part: u64, whole: u64) -> Option<Percent> {
        if whole == 0 || part > whole {
            return None;
        }
        let scaled = part as u128 * 10_000 * 2 + whole as u128;
        let h = scaled / (whole as u128 * 2);
        Some(Percent(h as u32))
    }

    pub fn hundredths(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }

    /// `100 - self`.
    pub fn complement(self) -> Percent {
        Percent(10_000 - self.0)
    }

    /// Absolute difference in percentage points.
    pub fn abs_diff(self, other: Percent) -> Percent {
        Percent(self.0.abs_diff(other.0))
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

impl Serialize for Percent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        // Emitted verbatim so that 85 is written as `85.00`, not `85.0`.
        let raw = serde_json::value::RawValue::from_string(self.to_string()).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Percent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        Percent::from_f64(v).ok_or_else(|| de::Error::custom(format!("percentage {v} outside [0, 100]")))
    }
}

/// `true` when `code` is 1 to 4 ASCII digits.
pub fn is_valid_code(code: &str) -> bool {
    (1..=4).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_digit())
}

/// Identity of an occupation: classification scheme plus code.
///
/// Codes from different schemes live in separate namespaces, so `isco08:221`
/// and `soc2020:221` are unrelated nodes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationKey {
    pub scheme: String,
    pub code: String,
}

impl OccupationKey {
    pub fn new(scheme: impl Into<String>, code: impl Into<String>) -> Result<Self, GraphError> {
        let scheme = scheme.into();
        let code = code.into();
        if !is_valid_code(&code) {
            return Err(GraphError::InvalidCode(code));
        }
        if scheme.is_empty() || scheme.contains(':') || scheme.chars().any(char::is_whitespace) {
            return Err(GraphError::InvalidScheme(scheme));
        }
        Ok(OccupationKey { scheme, code })
    }

    pub fn isco(code: impl Into<String>) -> Result<Self, GraphError> {
        Self::new(DEFAULT_SCHEME, code)
    }

    pub fn level(&self) -> usize {
        self.code.len()
    }

    /// Key of the prefix one level up, whether or not it exists in a graph.
    pub fn prefix_parent(&self) -> Option<OccupationKey> {
        (self.code.len() > 1)
            .then(|| OccupationKey { scheme: self.scheme.clone(), code: self.code[..self.code.len() - 1].to_string() })
    }

    /// Key of the ancestor (or self) at `level`, if `level <= self.level()`.
    pub fn ancestor_at(&self, level: usize) -> Option<OccupationKey> {
        (level >= 1 && level <= self.code.len())
            .then(|| OccupationKey { scheme: self.scheme.clone(), code: self.code[..level].to_string() })
    }
}

impl fmt::Display for OccupationKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.scheme, self.code)
    }
}

impl FromStr for OccupationKey {
    type Err = GraphError;

    /// Accepts `scheme:code` or a bare code in the default scheme.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some((scheme, code)) => OccupationKey::new(scheme, code),
            None => OccupationKey::isco(s),
        }
    }
}

impl Serialize for OccupationKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OccupationKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccupationNode {
    pub key: OccupationKey,
    pub title: String,
    pub description: String,
}

impl OccupationNode {
    pub fn level(&self) -> usize {
        self.key.level()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CountryRole {
    Country,
    Language,
}

/// A country (ISO 3166-1 alpha-2) or a language (BCP-47 tag) giving a
/// statistic its context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountryNode {
    pub id: String,
    pub role: CountryRole,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Dataset,
    Survey,
}

/// Names a source; ordered by title first to give canonical statistics order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceKey {
    pub title: String,
    pub kind: SourceKind,
}

impl fmt::Display for SourceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            SourceKind::Dataset => "dataset",
            SourceKind::Survey => "survey",
        };
        write!(f, "{kind}:{}", self.title)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetSource {
    pub title: String,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurveySource {
    pub title: String,
    pub description: String,
    /// `YYYY` or `YYYY-YYYY`.
    pub period: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Dataset(DatasetSource),
    Survey(SurveySource),
}

impl Source {
    pub fn key(&self) -> SourceKey {
        match self {
            Source::Dataset(d) => SourceKey { title: d.title.clone(), kind: SourceKind::Dataset },
            Source::Survey(s) => SourceKey { title: s.title.clone(), kind: SourceKind::Survey },
        }
    }

    pub fn title(&self) -> &str {
        match self {
            Source::Dataset(d) => &d.title,
            Source::Survey(s) => &s.title,
        }
    }
}

/// Parses `YYYY` or `YYYY-YYYY` (with `from <= to`).
pub fn parse_period(period: &str) -> Option<(i32, i32)> {
    fn year(s: &str) -> Option<i32> {
        (s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit())).then(|| s.parse().ok())?
    }
    match period.split_once('-') {
        None => year(period).map(|y| (y, y)),
        Some((a, b)) => {
            let (a, b) = (year(a)?, year(b)?);
            (a <= b).then_some((a, b))
        }
    }
}

/// Relation from a statistic to its context node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "hasLanguage")]
    HasLanguage,
    #[serde(rename = "linkedToCountry")]
    LinkedToCountry,
}

impl Relation {
    pub fn for_source(kind: SourceKind) -> Relation {
        match kind {
            SourceKind::Dataset => Relation::HasLanguage,
            SourceKind::Survey => Relation::LinkedToCountry,
        }
    }

    pub fn expected_role(self) -> CountryRole {
        match self {
            Relation::HasLanguage => CountryRole::Language,
            Relation::LinkedToCountry => CountryRole::Country,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Relation::HasLanguage => "hasLanguage",
            Relation::LinkedToCountry => "linkedToCountry",
        }
    }
}

/// A gender distribution for one occupation from one source in one
/// country/language context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatisticsNode {
    pub occupation: OccupationKey,
    pub male_pct: Percent,
    pub female_pct: Percent,
    pub male_count: Option<u64>,
    pub female_count: Option<u64>,
    /// Mentions whose gender could not be determined; never part of the percentages.
    pub unclear_count: Option<u64>,
    pub source: SourceKey,
    /// Id of the country or language node.
    pub context: String,
    pub year_from: Option<i32>,
    pub year_to: Option<i32>,
}

impl StatisticsNode {
    /// Builds a node from raw counts. `None` when `male + female == 0`.
    pub fn from_counts(
        occupation: OccupationKey,
        male: u64,
        female: u64,
        unclear: u64,
        source: SourceKey,
        context: impl Into<String>,
    ) -> Option<StatisticsNode> {
        let male_pct = Percent::from_ratio(male, male + female)?;
        Some(StatisticsNode {
            occupation,
            male_pct,
            female_pct: male_pct.complement(),
            male_count: Some(male),
            female_count: Some(female),
            unclear_count: Some(unclear),
            source,
            context: context.into(),
            year_from: None,
            year_to: None,
        })
    }

    pub fn relation(&self) -> Relation {
        Relation::for_source(self.source.kind)
    }

    pub fn key(&self) -> StatKey {
        StatKey {
            occupation: self.occupation.clone(),
            source: self.source.clone(),
            year_from: self.year_from,
            year_to: self.year_to,
            context: self.context.clone(),
        }
    }

    pub fn has_counts(&self) -> bool {
        self.male_count.is_some() && self.female_count.is_some()
    }

    /// Invariant violations of this node considered on its own.
    pub fn intrinsic_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let id = self.key().to_string();
        let sum = self.male_pct.hundredths() + self.female_pct.hundredths();
        if sum.abs_diff(10_000) > PERCENT_TOLERANCE.hundredths() {
            out.push(Violation::BadPercentSum { statistic: id.clone(), sum_hundredths: sum });
        }
        if let (Some(m), Some(f)) = (self.male_count, self.female_count) {
            match Percent::from_ratio(m, m + f) {
                None => out.push(Violation::ZeroCounts { statistic: id.clone() }),
                Some(expected) => {
                    if expected.abs_diff(self.male_pct) > PERCENT_TOLERANCE {
                        out.push(Violation::CountMismatch { statistic: id.clone(), expected, stored: self.male_pct });
                    }
                }
            }
        } else if self.male_count.is_some() != self.female_count.is_some() {
            out.push(Violation::PartialCounts { statistic: id.clone() });
        }
        if let (Some(a), Some(b)) = (self.year_from, self.year_to) {
            if a > b {
                out.push(Violation::BadYearRange { statistic: id });
            }
        }
        out
    }
}

/// Identity of a statistic. Field order gives the canonical serialization
/// order: occupation, source title, year.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StatKey {
    pub occupation: OccupationKey,
    pub source: SourceKey,
    pub year_from: Option<i32>,
    pub year_to: Option<i32>,
    pub context: String,
}

impl fmt::Display for StatKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stats/{}/{}/{}", self.occupation, self.source, self.context)?;
        match (self.year_from, self.year_to) {
            (Some(a), Some(b)) if a == b => write!(f, "/{a}"),
            (Some(a), Some(b)) => write!(f, "/{a}-{b}"),
            (Some(a), None) => write!(f, "/{a}-"),
            (None, Some(b)) => write!(f, "/-{b}"),
            (None, None) => Ok(()),
        }
    }
}

/// An invariant violation found by [`KnowledgeGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    OrphanCode(OccupationKey),
    BadPercentSum { statistic: String, sum_hundredths: u32 },
    CountMismatch { statistic: String, expected: Percent, stored: Percent },
    ZeroCounts { statistic: String },
    PartialCounts { statistic: String },
    BadYearRange { statistic: String },
    WrongRelationKind { statistic: String, relation: Relation, role: CountryRole },
    DanglingReference { statistic: String, target: String },
    EmptyTitle(String),
    InvalidPeriod { survey: String, period: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OrphanCode(k) => write!(f, "OrphanCode({k}): parent code missing"),
            Violation::BadPercentSum { statistic, sum_hundredths } => write!(
                f,
                "BadPercentSum({statistic}): male + female = {}.{:02}",
                sum_hundredths / 100,
                sum_hundredths % 100
            ),
            Violation::CountMismatch { statistic, expected, stored } => {
                write!(f, "CountMismatch({statistic}): counts give {expected}% male, stored {stored}%")
            }
            Violation::ZeroCounts { statistic } => {
                write!(f, "ZeroCounts({statistic}): male + female count is zero")
            }
            Violation::PartialCounts { statistic } => {
                write!(f, "PartialCounts({statistic}): only one of male/female count present")
            }
            Violation::BadYearRange { statistic } => {
                write!(f, "BadYearRange({statistic}): year_from after year_to")
            }
            Violation::WrongRelationKind { statistic, relation, role } => write!(
                f,
                "WrongRelationKind({statistic}): {} requires a {:?} node, found {role:?}",
                relation.name(),
                relation.expected_role()
            ),
            Violation::DanglingReference { statistic, target } => {
                write!(f, "DanglingReference({statistic}): {target} does not exist")
            }
            Violation::EmptyTitle(what) => write!(f, "EmptyTitle({what})"),
            Violation::InvalidPeriod { survey, period } => {
                write!(f, "InvalidPeriod({survey}): {period:?} is not YYYY or YYYY-YYYY")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate occupation code {0}")]
    DuplicateCode(OccupationKey),
    #[error("invalid occupation code {0:?}: expected 1-4 digits")]
    InvalidCode(String),
    #[error("invalid classification scheme tag {0:?}")]
    InvalidScheme(String),
    #[error("occupation {0} has an empty title")]
    EmptyTitle(OccupationKey),
    #[error("missing node: {0}")]
    MissingNode(String),
    #[error("invalid statistics: {}", join_violations(.0))]
    InvalidStatistics(Vec<Violation>),
    #[error("invalid source: {0}")]
    InvalidSource(String),
    #[error("conflicting node: {0}")]
    Conflict(String),
    #[error("graph fails validation: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct KnowledgeGraph {
    occupations: BTreeMap<OccupationKey, OccupationNode>,
    countries: BTreeMap<String, CountryNode>,
    sources: BTreeMap<SourceKey, Source>,
    statistics: BTreeMap<StatKey, StatisticsNode>,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts an occupation. Its `subclassOf` edge to the prefix parent
    /// exists as soon as both nodes are present, in either insertion order.
    pub fn add_occupation(
        &mut self,
        scheme: &str,
        code: &str,
        title: &str,
        description: &str,
    ) -> Result<OccupationKey, GraphError> {
        let key = OccupationKey::new(scheme, code)?;
        if title.trim().is_empty() {
            return Err(GraphError::EmptyTitle(key));
        }
        if self.occupations.contains_key(&key) {
            return Err(GraphError::DuplicateCode(key));
        }
        self.occupations.insert(
            key.clone(),
            OccupationNode {
                key: key.clone(),
                title: title.trim().to_string(),
                description: description.trim().to_string(),
            },
        );
        Ok(key)
    }

    pub fn occupation(&self, key: &OccupationKey) -> Option<&OccupationNode> {
        self.occupations.get(key)
    }

    pub fn contains_occupation(&self, key: &OccupationKey) -> bool {
        self.occupations.contains_key(key)
    }

    pub fn occupations(&self) -> impl Iterator<Item = &OccupationNode> {
        self.occupations.values()
    }

    /// Parent of `key` in the hierarchy, if that node exists.
    pub fn parent_of(&self, key: &OccupationKey) -> Option<&OccupationKey> {
        let parent = key.prefix_parent()?;
        self.occupations.get_key_value(&parent).map(|(k, _)| k)
    }

    pub fn children_of<'a>(&'a self, key: &'a OccupationKey) -> impl Iterator<Item = &'a OccupationNode> + 'a {
        self.occupations.values().filter(move |n| n.key.prefix_parent().as_ref() == Some(key))
    }

    /// Adds a country or language node; re-adding with the same role is a no-op.
    pub fn add_country(&mut self, id: &str, role: CountryRole) -> Result<(), GraphError> {
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(GraphError::InvalidSource(format!("invalid country/language id {id:?}")));
        }
        match self.countries.get(id) {
            Some(existing) if existing.role != role => {
                Err(GraphError::Conflict(format!("{id} already exists as {:?}", existing.role)))
            }
            Some(_) => Ok(()),
            None => {
                self.countries.insert(id.to_string(), CountryNode { id: id.to_string(), role });
                Ok(())
            }
        }
    }

    pub fn country(&self, id: &str) -> Option<&CountryNode> {
        self.countries.get(id)
    }

    pub fn countries(&self) -> impl Iterator<Item = &CountryNode> {
        self.countries.values()
    }

    /// Adds a dataset or survey source. Re-adding an identical source is a
    /// no-op; a different source under the same key is a conflict.
    pub fn add_source(&mut self, source: Source) -> Result<SourceKey, GraphError> {
        if source.title().trim().is_empty() {
            return Err(GraphError::InvalidSource("source title is empty".into()));
        }
        if let Source::Survey(s) = &source {
            if parse_period(&s.period).is_none() {
                return Err(GraphError::InvalidSource(format!(
                    "survey {:?} period {:?} is not YYYY or YYYY-YYYY",
                    s.title, s.period
                )));
            }
        }
        let key = source.key();
        match self.sources.get(&key) {
            Some(existing) if *existing != source => {
                Err(GraphError::Conflict(format!("source {key} already exists with other metadata")))
            }
            Some(_) => Ok(key),
            None => {
                self.sources.insert(key.clone(), source);
                Ok(key)
            }
        }
    }

    pub fn source(&self, key: &SourceKey) -> Option<&Source> {
        self.sources.get(key)
    }

    pub fn sources(&self) -> impl Iterator<Item = &Source> {
        self.sources.values()
    }

    /// Attaches a statistic to its occupation, source and context. A
    /// statistic with the same key replaces the previous one.
    pub fn attach_statistics(&mut self, stats: StatisticsNode) -> Result<StatKey, GraphError> {
        if !self.occupations.contains_key(&stats.occupation) {
            return Err(GraphError::MissingNode(format!("occupation {}", stats.occupation)));
        }
        if !self.sources.contains_key(&stats.source) {
            return Err(GraphError::MissingNode(format!("source {}", stats.source)));
        }
        let Some(country) = self.countries.get(&stats.context) else {
            return Err(GraphError::MissingNode(format!("country/language {}", stats.context)));
        };
        let mut violations = stats.intrinsic_violations();
        let relation = stats.relation();
        if country.role != relation.expected_role() {
            violations.push(Violation::WrongRelationKind {
                statistic: stats.key().to_string(),
                relation,
                role: country.role,
            });
        }
        if !violations.is_empty() {
            return Err(GraphError::InvalidStatistics(violations));
        }
        let key = stats.key();
        self.statistics.insert(key.clone(), stats);
        Ok(key)
    }

    pub fn statistic(&self, key: &StatKey) -> Option<&StatisticsNode> {
        self.statistics.get(key)
    }

    pub fn statistics(&self) -> impl Iterator<Item = &StatisticsNode> {
        self.statistics.values()
    }

    pub fn statistics_for(&self, occupation: &OccupationKey) -> impl Iterator<Item = &StatisticsNode> + '_ {
        let occupation = occupation.clone();
        self.statistics.values().filter(move |s| s.occupation == occupation)
    }

    pub fn node_count(&self) -> usize {
        self.occupations.len() + self.countries.len() + self.sources.len() + self.statistics.len()
    }

    pub fn subclass_edge_count(&self) -> usize {
        self.occupations.keys().filter(|k| self.parent_of(k).is_some()).count()
    }

    /// `subclassOf` edges plus, per statistic, `hasStatistics`, the source
    /// edge and the context edge.
    pub fn edge_count(&self) -> usize {
        self.subclass_edge_count() + 3 * self.statistics.len()
    }

    /// Every invariant violation in the graph; empty iff the graph is consistent.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for node in self.occupations.values() {
            if node.level() > 1 && self.parent_of(&node.key).is_none() {
                out.push(Violation::OrphanCode(node.key.clone()));
            }
            if node.title.is_empty() {
                out.push(Violation::EmptyTitle(node.key.to_string()));
            }
        }
        for source in self.sources.values() {
            if source.title().is_empty() {
                out.push(Violation::EmptyTitle(source.key().to_string()));
            }
            if let Source::Survey(s) = source {
                if parse_period(&s.period).is_none() {
                    out.push(Violation::InvalidPeriod { survey: s.title.clone(), period: s.period.clone() });
                }
            }
        }
        for stats in self.statistics.values() {
            let id = stats.key().to_string();
            if !self.occupations.contains_key(&stats.occupation) {
                out.push(Violation::DanglingReference { statistic: id.clone(), target: stats.occupation.to_string() });
            }
            if !self.sources.contains_key(&stats.source) {
                out.push(Violation::DanglingReference { statistic: id.clone(), target: stats.source.to_string() });
            }
            match self.countries.get(&stats.context) {
                None => out.push(Violation::DanglingReference { statistic: id.clone(), target: stats.context.clone() }),
                Some(c) if c.role != stats.relation().expected_role() => out.push(Violation::WrongRelationKind {
                    statistic: id.clone(),
                    relation: stats.relation(),
                    role: c.role,
                }),
                Some(_) => {}
            }
            out.extend(stats.intrinsic_violations());
        }
        out
    }

    /// Consumes the graph, returning it unchanged iff it validates.
    pub fn finalize(self) -> Result<KnowledgeGraph, GraphError> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(GraphError::Invalid(violations))
        }
    }

    /// Records in canonical order: occupations by (scheme, code), then
    /// countries, sources, and statistics by (occupation, source title, year).
    pub fn records(&self) -> Vec<Record> {
        let mut out = Vec::with_capacity(self.node_count());
        out.extend(self.occupations.values().map(Record::from_occupation));
        out.extend(self.countries.values().map(|c| Record::Country { id: c.id.clone(), role: c.role }));
        out.extend(self.sources.values().map(Record::from_source));
        out.extend(self.statistics.values().map(Record::from_statistics));
        out
    }

    /// Writes the graph without validating it.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<(), GraphError> {
        writeln!(w, "{{\"gost_graph_version\":{GRAPH_FORMAT_VERSION}}}")?;
        for record in self.records() {
            writeln!(w, "{}", record.to_line())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serialized graph is UTF-8")
    }

    /// Validates, then writes the graph file.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GraphError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(GraphError::Invalid(violations));
        }
        fs::write(path, self.to_jsonl())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<KnowledgeGraph, GraphError> {
        let text = fs::read_to_string(path)?;
        Self::from_jsonl(&text)
    }

    /// Parses a graph file. Checks the schema and references only; invariant
    /// violations are left for [`KnowledgeGraph::validate`] to report.
    pub fn from_jsonl(text: &str) -> Result<KnowledgeGraph, GraphError> {
        let fmt_err = |line: usize, message: String| GraphError::Format { line, message };
        if text.is_empty() {
            return Err(fmt_err(1, "empty file, header record missing".into()));
        }
        if !text.ends_with('\n') {
            return Err(fmt_err(text.lines().count(), "truncated record (no trailing newline)".into()));
        }
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or_else(|| fmt_err(1, "header missing".into()))?;
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Header {
            gost_graph_version: u32,
        }
        let header: Header = serde_json::from_str(header).map_err(|e| fmt_err(1, format!("bad header: {e}")))?;
        if header.gost_graph_version != GRAPH_FORMAT_VERSION {
            return Err(fmt_err(1, format!("unsupported graph version {}", header.gost_graph_version)));
        }

        let mut graph = KnowledgeGraph::new();
        let mut pending_stats = Vec::new();
        for (line_no, line) in lines {
            if line.trim().is_empty() {
                return Err(fmt_err(line_no, "blank line".into()));
            }
            let record: Record = serde_json::from_str(line).map_err(|e| fmt_err(line_no, e.to_string()))?;
            match record {
                Record::Occupation { scheme, code, title, description } => {
                    let key = OccupationKey::new(&scheme, &code).map_err(|e| fmt_err(line_no, e.to_string()))?;
                    if graph.occupations.contains_key(&key) {
                        return Err(fmt_err(line_no, format!("duplicate occupation {key}")));
                    }
                    graph.occupations.insert(key.clone(), OccupationNode { key, title, description });
                }
                Record::Country { id, role } => {
                    if graph.countries.insert(id.clone(), CountryNode { id: id.clone(), role }).is_some() {
                        return Err(fmt_err(line_no, format!("duplicate country {id}")));
                    }
                }
                Record::Dataset { title, description } => {
                    let src = Source::Dataset(DatasetSource { title, description });
                    if graph.sources.insert(src.key(), src.clone()).is_some() {
                        return Err(fmt_err(line_no, format!("duplicate source {}", src.key())));
                    }
                }
                Record::Survey { title, description, period } => {
                    let src = Source::Survey(SurveySource { title, description, period });
                    if graph.sources.insert(src.key(), src.clone()).is_some() {
                        return Err(fmt_err(line_no, format!("duplicate source {}", src.key())));
                    }
                }
                Record::Statistics(rec) => pending_stats.push((line_no, rec)),
            }
        }
        for (line_no, rec) in pending_stats {
            let stats = rec.into_node().map_err(|m| fmt_err(line_no, m))?;
            if !graph.occupations.contains_key(&stats.occupation) {
                return Err(fmt_err(line_no, format!("unknown occupation {}", stats.occupation)));
            }
            if !graph.sources.contains_key(&stats.source) {
                return Err(fmt_err(line_no, format!("unknown source {}", stats.source)));
            }
            if !graph.countries.contains_key(&stats.context) {
                return Err(fmt_err(line_no, format!("unknown context {}", stats.context)));
            }
            let key = stats.key();
            if graph.statistics.insert(key.clone(), stats).is_some() {
                return Err(fmt_err(line_no, format!("duplicate statistic {key}")));
            }
        }
        Ok(graph)
    }

    /// One line per node (`rdf:type`) and one per edge, N-Triples style.
    pub fn to_triples(&self) -> Vec<String> {
        let occ = |k: &OccupationKey| iri(&format!("occupation/{k}"));
        let ctry = |id: &str| match self.countries.get(id).map(|c| c.role) {
            Some(CountryRole::Language) => iri(&format!("language/{id}")),
            _ => iri(&format!("country/{id}")),
        };
        let src = |k: &SourceKey| iri(&format!("{k}"));
        let stat = |k: &StatKey| iri(&k.to_string());
        let ty = |s: String, t: &str| format!("{s} <rdf:type> <gost:{t}> .");

        let mut out = Vec::with_capacity(self.node_count() + self.edge_count());
        for n in self.occupations.values() {
            out.push(ty(occ(&n.key), "Occupation"));
        }
        for c in self.countries.values() {
            out.push(ty(ctry(&c.id), "Country"));
        }
        for s in self.sources.values() {
            let t = match s {
                Source::Dataset(_) => "Dataset",
                Source::Survey(_) => "Survey",
            };
            out.push(ty(src(&s.key()), t));
        }
        for k in self.statistics.keys() {
            out.push(ty(stat(k), "Statistics"));
        }
        for n in self.occupations.values() {
            if let Some(p) = self.parent_of(&n.key) {
                out.push(format!("{} <gost:subclassOf> {} .", occ(&n.key), occ(p)));
            }
        }
        for (k, s) in self.statistics.iter() {
            out.push(format!("{} <gost:hasStatistics> {} .", occ(&s.occupation), stat(k)));
            out.push(format!("{} <gost:hasSource> {} .", stat(k), src(&s.source)));
            out.push(format!("{} <gost:{}> {} .", stat(k), s.relation().name(), ctry(&s.context)));
        }
        out
    }
}

fn iri(path: &str) -> String {
    let mut s = String::from("<gost:");
    for b in path.bytes() {
        if b.is_ascii_alphanumeric() || b"/:-._".contains(&b) {
            s.push(b as char);
        } else {
            s.push_str(&format!("%{b:02X}"));
        }
    }
    s.push('>');
    s
}

/// One line of the graph file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Record {
    Occupation { scheme: String, code: String, title: String, description: String },
    Country { id: String, role: CountryRole },
    Survey { title: String, description: String, period: String },
    Dataset { title: String, description: String },
    Statistics(StatisticsRecord),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextRecord {
    pub relation: Relation,
    pub id: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatisticsRecord {
    pub occupation: OccupationKey,
    pub male_pct: Percent,
    pub female_pct: Percent,
    pub male_count: Option<u64>,
    pub female_count: Option<u64>,
    pub unclear_count: Option<u64>,
    pub source: SourceKey,
    pub context: ContextRecord,
    pub year_from: Option<i32>,
    pub year_to: Option<i32>,
}

impl StatisticsRecord {
    fn into_node(self) -> Result<StatisticsNode, String> {
        let expected = Relation::for_source(self.source.kind);
        if self.context.relation != expected {
            return Err(format!(
                "{} source requires relation {}, found {}",
                self.source,
                expected.name(),
                self.context.relation.name()
            ));
        }
        Ok(StatisticsNode {
            occupation: self.occupation,
            male_pct: self.male_pct,
            female_pct: self.female_pct,
            male_count: self.male_count,
            female_count: self.female_count,
            unclear_count: self.unclear_count,
            source: self.source,
            context: self.context.id,
            year_from: self.year_from,
            year_to: self.year_to,
        })
    }
}

impl Record {
    fn from_occupation(n: &OccupationNode) -> Record {
        Record::Occupation {
            scheme: n.key.scheme.clone(),
            code: n.key.code.clone(),
            title: n.title.clone(),
            description: n.description.clone(),
        }
    }

    fn from_source(s: &Source) -> Record {
        match s {
            Source::Dataset(d) => Record::Dataset { title: d.title.clone(), description: d.description.clone() },
            Source::Survey(s) => {
                Record::Survey { title: s.title.clone(), description: s.description.clone(), period: s.period.clone() }
            }
        }
    }

    pub fn from_statistics(s: &StatisticsNode) -> Record {
        Record::Statistics(StatisticsRecord {
            occupation: s.occupation.clone(),
            male_pct: s.male_pct,
            female_pct: s.female_pct,
            male_count: s.male_count,
            female_count: s.female_count,
            unclear_count: s.unclear_count,
            source: s.source.clone(),
            context: ContextRecord { relation: s.relation(), id: s.context.clone() },
            year_from: s.year_from,
            year_to: s.year_to,
        })
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}
