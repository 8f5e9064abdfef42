//! `gost`: build the occupation knowledge graph, ingest labour surveys, run
//! the corpus pipeline and query the resulting statistics.
//!
//! Exit codes: 0 on success, 1 when inputs violate a domain rule (invalid
//! graph, unknown code, rejected rows, missing lexicon), 2 when a file is
//! missing or malformed or the arguments are wrong.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod config;
pub mod error;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "gost", version, about = "Occupation-gender knowledge graph tools")]
pub struct Cli {
    /// JSON file whose keys mirror long flag names; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// More logging (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph from a classification CSV (code,title,description).
    BuildKg(BuildKgArgs),
    /// Attach survey statistics to a graph.
    IngestSurvey(IngestSurveyArgs),
    /// Run the corpus pipeline and attach dataset statistics.
    Analyze(AnalyzeArgs),
    /// Query statistics.
    #[command(subcommand)]
    Report(ReportCommand),
    /// Check every graph invariant.
    Validate(GraphArg),
    /// Print the occupation descriptions to embed, one per line.
    ListEmbeddingKeys(GraphOutArgs),
    /// Export the graph as N-Triples-like lines.
    ExportTriples(GraphOutArgs),
}

#[derive(Debug, Args)]
pub struct GraphArg {
    /// Graph file.
    #[arg(long, env = "GOST_KG", value_name = "FILE")]
    pub kg: PathBuf,
}

#[derive(Debug, Args)]
pub struct GraphOutArgs {
    #[command(flatten)]
    pub graph: GraphArg,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildKgArgs {
    #[arg(long, value_name = "CSV")]
    pub isco: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[arg(long, default_value = gost_core::graph::DEFAULT_SCHEME)]
    pub scheme: String,
}

#[derive(Debug, Args)]
pub struct IngestSurveyArgs {
    #[command(flatten)]
    pub graph: GraphArg,
    /// CSV with country,year,scheme,code,male_pct,female_pct[,male_count,female_count].
    #[arg(long, value_name = "CSV")]
    pub survey: PathBuf,
    /// JSON with title, description and period of the survey.
    #[arg(long, value_name = "FILE")]
    pub meta: PathBuf,
    /// Where to write the updated graph; defaults to --kg.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub graph: GraphArg,
    /// Corpus JSONL with doc_id, lang and text.
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Lexicon TSV; repeat for several languages.
    #[arg(long, value_name = "TSV")]
    pub lexicon: Vec<PathBuf>,
    /// Annotation JSONL; without it the heuristic gender rules apply.
    #[arg(long, value_name = "FILE")]
    pub annotations: Option<PathBuf>,
    /// External extractor output; replaces gazetteer detection.
    #[arg(long, value_name = "FILE")]
    pub mentions: Option<PathBuf>,
    /// Description vectors for embedding linking.
    #[arg(long, value_name = "FILE")]
    pub embeddings: Option<PathBuf>,
    #[arg(long, default_value_t = gost_core::extract::DEFAULT_FUZZY_THRESHOLD, value_parser = unit_interval)]
    pub fuzzy_threshold: f64,
    #[arg(long, default_value_t = gost_core::link::DEFAULT_EMBEDDING_THRESHOLD, value_parser = unit_interval)]
    pub link_threshold: f64,
    #[arg(long, default_value_t = gost_core::link::DEFAULT_LEXICAL_THRESHOLD, value_parser = unit_interval)]
    pub lexical_threshold: f64,
    #[arg(long, default_value = "corpus")]
    pub dataset_title: String,
    #[arg(long, default_value = "")]
    pub dataset_description: String,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub shards: u16,
    /// Per-mention audit JSONL; defaults to the graph output path with `.audit.jsonl`.
    #[arg(long, value_name = "FILE")]
    pub audit: Option<PathBuf>,
    /// Dataset statistics JSONL.
    #[arg(long, value_name = "FILE")]
    pub stats_out: Option<PathBuf>,
    /// Where to write the updated graph; defaults to --kg.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// Corpus against survey distribution for one occupation.
    Misalignment(MisalignmentArgs),
    /// Survey series for one occupation and country.
    Trend(TrendArgs),
    /// Sum count-bearing statistics up the hierarchy.
    Rollup(RollupArgs),
}

#[derive(Debug, Args)]
pub struct MisalignmentArgs {
    #[command(flatten)]
    pub graph: GraphArg,
    #[arg(long)]
    pub code: String,
    #[arg(long)]
    pub lang: String,
    #[arg(long)]
    pub country: String,
    #[arg(long)]
    pub year: Option<i32>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrendArgs {
    #[command(flatten)]
    pub graph: GraphArg,
    #[arg(long)]
    pub code: String,
    #[arg(long)]
    pub country: String,
    #[arg(long, default_value_t = 1900)]
    pub from: i32,
    #[arg(long, default_value_t = 2100)]
    pub to: i32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RollupArgs {
    #[command(flatten)]
    pub graph: GraphArg,
    /// Target code length, 1-4.
    #[arg(long)]
    pub level: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run(args: impl IntoIterator<Item = OsString>) -> u8 {
    let args = match config::expand(args.into_iter().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    init_logging(cli.verbose);
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
