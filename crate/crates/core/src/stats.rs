//! Aggregation of gender resolutions into dataset statistics, and reports
//! comparing corpus and survey distributions.

use std::collections::BTreeMap;
use std::fmt;

use log::{debug, warn};
use serde::Serialize;
use thiserror::Error;

use crate::gender::GenderLabel;
use crate::graph::{
    CountryRole, DatasetSource, GraphError, KnowledgeGraph, OccupationKey, Percent, Source, SourceKey, SourceKind,
    StatKey, StatisticsNode,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct GenderCounts {
    pub male: u64,
    pub female: u64,
    pub unclear: u64,
}

impl GenderCounts {
    pub fn record(&mut self, label: GenderLabel) {
        match label {
            GenderLabel::Male => self.male += 1,
            GenderLabel::Female => self.female += 1,
            GenderLabel::NotClear => self.unclear += 1,
        }
    }

    pub fn add(&mut self, other: GenderCounts) {
        self.male += other.male;
        self.female += other.female;
        self.unclear += other.unclear;
    }
}

/// Per-shard counts keyed by (occupation, language).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialCounts {
    counts: BTreeMap<(OccupationKey, String), GenderCounts>,
}

impl PartialCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, occupation: &OccupationKey, lang: &str, label: GenderLabel) {
        self.counts.entry((occupation.clone(), lang.to_string())).or_default().record(label);
    }

    pub fn accumulate<'a>(
        resolutions: impl IntoIterator<Item = (&'a OccupationKey, &'a str, GenderLabel)>,
    ) -> PartialCounts {
        let mut out = PartialCounts::new();
        for (occ, lang, label) in resolutions {
            out.record(occ, lang, label);
        }
        out
    }

    /// Component-wise addition.
    pub fn merge(&mut self, other: &PartialCounts) {
        for (k, c) in &other.counts {
            self.counts.entry(k.clone()).or_default().add(*c);
        }
    }

    pub fn get(&self, occupation: &OccupationKey, lang: &str) -> Option<GenderCounts> {
        self.counts.get(&(occupation.clone(), lang.to_string())).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OccupationKey, &str, GenderCounts)> {
        self.counts.iter().map(|((o, l), c)| (o, l.as_str(), *c))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetMeta {
    pub title: String,
    pub description: String,
}

/// Adds the dataset source and language nodes and attaches one statistic
/// per (occupation, language) with at least one gendered mention.
/// Zero-evidence entries are skipped.
pub fn finalize_dataset_stats(
    counts: &PartialCounts,
    meta: &DatasetMeta,
    graph: &mut KnowledgeGraph,
) -> Result<Vec<StatKey>, GraphError> {
    let source = graph.add_source(Source::Dataset(DatasetSource {
        title: meta.title.clone(),
        description: meta.description.clone(),
    }))?;
    let mut out = Vec::new();
    for (occ, lang, c) in counts.iter() {
        let Some(node) = StatisticsNode::from_counts(occ.clone(), c.male, c.female, c.unclear, source.clone(), lang)
        else {
            continue;
        };
        graph.add_country(lang, CountryRole::Language)?;
        out.push(graph.attach_statistics(node)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Corpus,
    Survey,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Corpus => "corpus",
            Side::Survey => "survey",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("unknown occupation {0}")]
    UnknownOccupation(OccupationKey),
    #[error("no {side} statistics for {occupation} ({context})")]
    MissingStatistics { side: Side, occupation: OccupationKey, context: String },
    #[error("invalid roll-up level {0}: expected 1-4")]
    InvalidLevel(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MisalignmentRow {
    pub occupation: OccupationKey,
    pub corpus_male_pct: Percent,
    pub survey_male_pct: Percent,
    /// `|corpus - survey|` in percentage points.
    pub divergence_pp: Percent,
    pub corpus_source: String,
    pub survey_source: String,
    pub lang: String,
    pub country: String,
    pub year_from: Option<i32>,
    pub year_to: Option<i32>,
}

fn check_occupation(graph: &KnowledgeGraph, code: &OccupationKey) -> Result<(), StatsError> {
    if graph.contains_occupation(code) {
        Ok(())
    } else {
        Err(StatsError::UnknownOccupation(code.clone()))
    }
}

/// Pairs every corpus statistic of `(code, lang)` with every survey
/// statistic of `(code, country)`, optionally restricted to surveys whose
/// year range contains `year`.
pub fn misalignment_report(
    graph: &KnowledgeGraph,
    code: &OccupationKey,
    lang: &str,
    country: &str,
    year: Option<i32>,
) -> Result<Vec<MisalignmentRow>, StatsError> {
    check_occupation(graph, code)?;
    let corpus: Vec<&StatisticsNode> =
        graph.statistics_for(code).filter(|s| s.source.kind == SourceKind::Dataset && s.context == lang).collect();
    let survey: Vec<&StatisticsNode> = graph
        .statistics_for(code)
        .filter(|s| s.source.kind == SourceKind::Survey && s.context == country)
        .filter(|s| year.is_none_or(|y| covers(s, y)))
        .collect();
    if corpus.is_empty() {
        return Err(StatsError::MissingStatistics {
            side: Side::Corpus,
            occupation: code.clone(),
            context: lang.to_string(),
        });
    }
    if survey.is_empty() {
        return Err(StatsError::MissingStatistics {
            side: Side::Survey,
            occupation: code.clone(),
            context: country.to_string(),
        });
    }
    let mut rows = Vec::with_capacity(corpus.len() * survey.len());
    for c in &corpus {
        for s in &survey {
            rows.push(MisalignmentRow {
                occupation: code.clone(),
                corpus_male_pct: c.male_pct,
                survey_male_pct: s.male_pct,
                divergence_pp: c.male_pct.abs_diff(s.male_pct),
                corpus_source: c.source.title.clone(),
                survey_source: s.source.title.clone(),
                lang: lang.to_string(),
                country: country.to_string(),
                year_from: s.year_from,
                year_to: s.year_to,
            });
        }
    }
    Ok(rows)
}

fn covers(s: &StatisticsNode, year: i32) -> bool {
    match (s.year_from, s.year_to) {
        (Some(a), Some(b)) => a <= year && year <= b,
        (Some(a), None) | (None, Some(a)) => a == year,
        (None, None) => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrendPoint {
    pub year: i32,
    pub male_pct: Percent,
    pub female_pct: Percent,
    pub source: String,
}

/// Survey statistics of `(code, country)` whose start year lies in
/// `[year_from, year_to]`, sorted by year then source title.
pub fn trend(
    graph: &KnowledgeGraph,
    code: &OccupationKey,
    country: &str,
    year_from: i32,
    year_to: i32,
) -> Result<Vec<TrendPoint>, StatsError> {
    check_occupation(graph, code)?;
    let mut points: Vec<TrendPoint> = graph
        .statistics_for(code)
        .filter(|s| s.source.kind == SourceKind::Survey && s.context == country)
        .filter_map(|s| {
            let year = s.year_from?;
            (year_from <= year && year <= year_to).then(|| TrendPoint {
                year,
                male_pct: s.male_pct,
                female_pct: s.female_pct,
                source: s.source.title.clone(),
            })
        })
        .collect();
    points.sort_by(|a, b| (a.year, &a.source).cmp(&(b.year, &b.source)));
    Ok(points)
}

/// Trend series as CSV with header `year,male_pct,female_pct`.
pub fn trend_csv(points: &[TrendPoint]) -> String {
    let mut out = String::from("year,male_pct,female_pct\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.year, p.male_pct, p.female_pct));
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Rollup {
    /// Aggregated nodes in key order.
    pub nodes: Vec<StatisticsNode>,
    /// Percentage-only statistics left out of the sums.
    pub skipped: Vec<StatKey>,
}

/// Sums the counts of every statistic at or below `target_level` into its
/// ancestor at that level, per (source, context, years), and recomputes
/// percentages from the sums. Statistics above the target level are ignored.
pub fn rollup(graph: &KnowledgeGraph, target_level: usize) -> Result<Rollup, StatsError> {
    if !(1..=4).contains(&target_level) {
        return Err(StatsError::InvalidLevel(target_level));
    }
    type Group = (OccupationKey, SourceKey, String, Option<i32>, Option<i32>);
    let mut groups: BTreeMap<Group, GenderCounts> = BTreeMap::new();
    let mut skipped = Vec::new();
    for s in graph.statistics() {
        let Some(ancestor) = s.occupation.ancestor_at(target_level) else { continue };
        let (Some(male), Some(female)) = (s.male_count, s.female_count) else {
            debug!("statistic {} has no counts; left out of the roll-up", s.key());
            skipped.push(s.key());
            continue;
        };
        let group = (ancestor, s.source.clone(), s.context.clone(), s.year_from, s.year_to);
        groups.entry(group).or_default().add(GenderCounts { male, female, unclear: s.unclear_count.unwrap_or(0) });
    }
    if !skipped.is_empty() {
        warn!("{} statistic(s) without counts left out of the roll-up", skipped.len());
    }
    let nodes = groups
        .into_iter()
        .filter_map(|((occ, source, context, year_from, year_to), c)| {
            let mut node = StatisticsNode::from_counts(occ, c.male, c.female, c.unclear, source, context)?;
            node.year_from = year_from;
            node.year_to = year_to;
            Some(node)
        })
        .collect();
    Ok(Rollup { nodes, skipped })
}
