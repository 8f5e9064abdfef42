use std::io;
use std::path::Path;

use gost_core::annotation::AnnotationError;
use gost_core::corpus::CorpusError;
use gost_core::ingest::IngestError;
use gost_core::link::LinkError;
use gost_core::pipeline::PipelineError;
use gost_core::stats::StatsError;
use gost_core::GraphError;
use thiserror::Error;

/// Command failure, split by exit code: `Domain` exits 1, `Input` exits 2.
#[derive(Debug, Error)]
pub enum CliError {
    /// Inputs were readable but violate a domain rule.
    #[error("{0}")]
    Domain(String),
    /// A file is missing, unreadable or malformed, or the arguments are wrong.
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Input(_) => 2,
        }
    }

    pub fn io(path: &Path, e: io::Error) -> CliError {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Io(_) | GraphError::Format { .. } => CliError::Input(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Graph(g) => g.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<AnnotationError> for CliError {
    fn from(e: AnnotationError) -> Self {
        match e {
            AnnotationError::Invalid { .. } => CliError::Domain(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<LinkError> for CliError {
    fn from(e: LinkError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Domain(e.to_string())
    }
}
