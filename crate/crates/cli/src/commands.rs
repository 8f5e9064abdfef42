use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use gost_core::annotation::AnnotationSet;
use gost_core::corpus::load_corpus;
use gost_core::extract::{load_external_mentions, load_lexicon, Gazetteer};
use gost_core::graph::Record;
use gost_core::ingest::{load_classification, load_survey, SurveyMeta};
use gost_core::link::{embedding_keys, EmbeddingStore, LinkConfig};
use gost_core::pipeline::{self, AuditStatus, PipelineConfig, Resources};
use gost_core::stats::{self, DatasetMeta, MisalignmentRow, TrendPoint};
use gost_core::{GenderLabel, GenderLexicon, KnowledgeGraph, OccupationKey};
use log::{info, warn};
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::{
    AnalyzeArgs, BuildKgArgs, Command, Format, GraphOutArgs, IngestSurveyArgs, MisalignmentArgs, ReportCommand,
    RollupArgs, TrendArgs,
};

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::BuildKg(a) => build_kg(a),
        Command::IngestSurvey(a) => ingest_survey(a),
        Command::Analyze(a) => analyze(a),
        Command::Report(ReportCommand::Misalignment(a)) => misalignment(a),
        Command::Report(ReportCommand::Trend(a)) => trend(a),
        Command::Report(ReportCommand::Rollup(a)) => rollup(a),
        Command::Validate(a) => validate(&a.kg),
        Command::ListEmbeddingKeys(a) => list_embedding_keys(a),
        Command::ExportTriples(a) => export_triples(a),
    }
}

/// Prefixes the error message with `path`, keeping the exit class.
fn at<E: Into<CliError>>(path: &Path) -> impl FnOnce(E) -> CliError + '_ {
    move |e| match e.into() {
        CliError::Domain(m) => CliError::Domain(format!("{}: {m}", path.display())),
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
    }
}

fn load_graph(path: &Path) -> Result<KnowledgeGraph, CliError> {
    KnowledgeGraph::load(path).map_err(at(path))
}

fn save_graph(graph: &KnowledgeGraph, path: &Path) -> Result<(), CliError> {
    graph.save(path).map_err(at(path))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| CliError::io(path, e))
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_code(code: &str) -> Result<OccupationKey, CliError> {
    code.parse().map_err(|e| CliError::Domain(format!("{e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialize");
    s.push('\n');
    s
}

fn build_kg(a: BuildKgArgs) -> Result<(), CliError> {
    let mut graph = KnowledgeGraph::new();
    let report = load_classification(&mut graph, &a.isco, &a.scheme).map_err(at(&a.isco))?;
    for e in &report.errors {
        eprintln!("{}: line {}: skipped: {}", a.isco.display(), e.line, e.reason);
    }
    let violations = graph.validate();
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        return Err(CliError::Domain(format!("graph has {} violation(s); not written", violations.len())));
    }
    save_graph(&graph, &a.out)?;
    println!(
        "{} occupations; {} nodes, {} edges written to {}",
        report.added,
        graph.node_count(),
        graph.edge_count(),
        a.out.display()
    );
    Ok(())
}

fn ingest_survey(a: IngestSurveyArgs) -> Result<(), CliError> {
    let mut graph = load_graph(&a.graph.kg)?;
    let meta = SurveyMeta::load(&a.meta).map_err(at(&a.meta))?;
    let report = load_survey(&mut graph, &a.survey, &meta).map_err(at(&a.survey))?;
    for r in &report.rejected {
        eprintln!("{}: line {}: rejected: {}", a.survey.display(), r.line, r.reason);
    }
    println!("{} row(s) attached ({} replaced), {} rejected", report.attached, report.replaced, report.rejected.len());
    if report.attached == 0 && !report.rejected.is_empty() {
        return Err(CliError::Domain("every survey row was rejected; graph not written".into()));
    }
    save_graph(&graph, a.out.as_deref().unwrap_or(&a.graph.kg))
}

fn analyze(a: AnalyzeArgs) -> Result<(), CliError> {
    let mut graph = load_graph(&a.graph.kg)?;
    let docs = load_corpus(&a.corpus).map_err(at(&a.corpus))?;

    let mut entries = Vec::new();
    for path in &a.lexicon {
        let (found, dropped) = load_lexicon(path).map_err(|e| CliError::io(path, e))?;
        for d in dropped {
            warn!("{}: {d}", path.display());
        }
        entries.extend(found);
    }
    let lexicon = GenderLexicon::with_entries(&entries);
    let (gazetteer, dropped) = Gazetteer::build(&graph, entries);
    for d in dropped {
        warn!("lexicon: {d}");
    }

    let annotations = match &a.annotations {
        Some(p) => Some(AnnotationSet::load(p).map_err(at(p))?),
        None => None,
    };
    let store = match &a.embeddings {
        Some(p) => Some(EmbeddingStore::load(p).map_err(at(p))?),
        None => None,
    };
    let external = match &a.mentions {
        Some(p) => {
            let import = load_external_mentions(p, docs.iter().map(|d| d.doc_id.as_str())).map_err(at(p))?;
            for (line, reason) in &import.rejected {
                eprintln!("{}: line {line}: rejected: {reason}", p.display());
            }
            Some(import.candidates)
        }
        None => None,
    };

    let resources = Resources {
        graph: &graph,
        gazetteer: &gazetteer,
        lexicon: &lexicon,
        store: store.as_ref(),
        annotations: annotations.as_ref(),
        external: external.as_deref(),
    };
    let config = PipelineConfig {
        fuzzy_threshold: a.fuzzy_threshold,
        link: LinkConfig { embedding_threshold: a.link_threshold, lexical_threshold: a.lexical_threshold },
    };
    let analysis = pipeline::analyze(&docs, resources, config, usize::from(a.shards))?;

    let meta = DatasetMeta { title: a.dataset_title.clone(), description: a.dataset_description.clone() };
    let keys = stats::finalize_dataset_stats(&analysis.counts, &meta, &mut graph)?;

    let out = a.out.clone().unwrap_or_else(|| a.graph.kg.clone());
    save_graph(&graph, &out)?;
    let audit_path = a.audit.clone().unwrap_or_else(|| out.with_extension("audit.jsonl"));
    write_file(&audit_path, &analysis.audit_jsonl())?;
    if let Some(p) = &a.stats_out {
        let mut lines = String::new();
        for k in &keys {
            let node = graph.statistic(k).expect("attached statistic is present");
            lines.push_str(&Record::from_statistics(node).to_line());
            lines.push('\n');
        }
        write_file(p, &lines)?;
    }

    let count = |status: AuditStatus| analysis.audit.iter().filter(|r| r.status == status).count();
    let unclear = analysis.audit.iter().filter(|r| r.label == Some(GenderLabel::NotClear)).count();
    println!(
        "{} document(s); {} mention(s) counted ({} not clear), {} unlinked, {} hallucinated, {} duplicate; {} statistic(s) attached",
        docs.len(),
        count(AuditStatus::Counted),
        unclear,
        count(AuditStatus::Unlinked),
        count(AuditStatus::Hallucinated),
        count(AuditStatus::Duplicate),
        keys.len()
    );
    info!("graph written to {}, audit to {}", out.display(), audit_path.display());
    Ok(())
}

fn misalignment_table(rows: &[MisalignmentRow]) -> String {
    let mut s = String::from("code\tyear\tcorpus_male_pct\tsurvey_male_pct\tdivergence_pp\tcorpus\tsurvey\n");
    for r in rows {
        let year = match (r.year_from, r.year_to) {
            (Some(a), Some(b)) if a == b => a.to_string(),
            (Some(a), Some(b)) => format!("{a}-{b}"),
            _ => "-".into(),
        };
        let _ = writeln!(
            s,
            "{}\t{year}\t{}\t{}\t{}\t{}\t{}",
            r.occupation.code, r.corpus_male_pct, r.survey_male_pct, r.divergence_pp, r.corpus_source, r.survey_source
        );
    }
    s
}

fn misalignment(a: MisalignmentArgs) -> Result<(), CliError> {
    let graph = load_graph(&a.graph.kg)?;
    let code = parse_code(&a.code)?;
    let rows = stats::misalignment_report(&graph, &code, &a.lang, &a.country, a.year)?;
    let content = match a.format {
        Format::Table | Format::Csv => misalignment_table(&rows),
        Format::Json => to_json(&json!({
            "query": { "code": code, "lang": a.lang, "country": a.country, "year": a.year },
            "rows": rows,
        })),
    };
    emit(a.out.as_deref(), &content)
}

fn trend_table(points: &[TrendPoint]) -> String {
    let mut s = String::from("year\tmale_pct\tfemale_pct\tsource\n");
    for p in points {
        let _ = writeln!(s, "{}\t{}\t{}\t{}", p.year, p.male_pct, p.female_pct, p.source);
    }
    s
}

fn trend(a: TrendArgs) -> Result<(), CliError> {
    let graph = load_graph(&a.graph.kg)?;
    let code = parse_code(&a.code)?;
    let points = stats::trend(&graph, &code, &a.country, a.from, a.to)?;
    if points.is_empty() {
        warn!("no survey statistics for {code} in {} between {} and {}", a.country, a.from, a.to);
    }
    let content = match a.format {
        Format::Csv => stats::trend_csv(&points),
        Format::Table => trend_table(&points),
        Format::Json => to_json(&json!({
            "query": { "code": code, "country": a.country, "from": a.from, "to": a.to },
            "rows": points,
        })),
    };
    emit(a.out.as_deref(), &content)
}

fn rollup(a: RollupArgs) -> Result<(), CliError> {
    let graph = load_graph(&a.graph.kg)?;
    let result = stats::rollup(&graph, a.level)?;
    let content = match a.format {
        Format::Json => {
            let rows: Vec<Record> = result.nodes.iter().map(Record::from_statistics).collect();
            to_json(&json!({ "query": { "level": a.level }, "rows": rows }))
        }
        Format::Table | Format::Csv => {
            let mut s = String::from("code\tsource\tcontext\tmale\tfemale\tmale_pct\tfemale_pct\n");
            for n in &result.nodes {
                let _ = writeln!(
                    s,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    n.occupation.code,
                    n.source,
                    n.context,
                    n.male_count.unwrap_or(0),
                    n.female_count.unwrap_or(0),
                    n.male_pct,
                    n.female_pct
                );
            }
            s
        }
    };
    emit(a.out.as_deref(), &content)
}

fn validate(kg: &Path) -> Result<(), CliError> {
    let graph = load_graph(kg)?;
    let violations = graph.validate();
    if violations.is_empty() {
        println!("valid: {} nodes, {} edges", graph.node_count(), graph.edge_count());
        return Ok(());
    }
    for v in &violations {
        println!("violation: {v}");
    }
    Err(CliError::Domain(format!("{} violation(s)", violations.len())))
}

fn lines(items: impl IntoIterator<Item = String>) -> String {
    let mut s = String::new();
    for item in items {
        s.push_str(&item);
        s.push('\n');
    }
    s
}

fn list_embedding_keys(a: GraphOutArgs) -> Result<(), CliError> {
    let graph = load_graph(&a.graph.kg)?;
    emit(a.out.as_deref(), &lines(embedding_keys(&graph)))
}

fn export_triples(a: GraphOutArgs) -> Result<(), CliError> {
    let graph = load_graph(&a.graph.kg)?;
    emit(a.out.as_deref(), &lines(graph.to_triples()))
}
