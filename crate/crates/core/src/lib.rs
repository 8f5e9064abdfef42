//! Occupation-gender knowledge graph construction and corpus analytics.
//!
//! The crate builds a graph of ISCO-08 style occupations annotated with gender
//! statistics from labour surveys and from text corpora, and runs a three-stage
//! corpus pipeline over documents: occupation mention detection
//! ([`extract`]), linking to graph occupations ([`link`]) and gender
//! identification ([`gender`]). [`stats`] turns the resolutions into graph
//! statistics and compares corpus and survey distributions.

pub mod annotation;
pub mod corpus;
pub mod extract;
pub mod gender;
pub mod graph;
pub mod ingest;
pub mod link;
pub mod pipeline;
pub mod stats;
pub mod text;

pub use annotation::{AnnotatedDocument, AnnotationError, AnnotationSet};
pub use corpus::{CorpusDoc, CorpusError};
pub use extract::{Gazetteer, GazetteerEntry, MentionCandidate, MentionSource, Span};
pub use gender::{Gender, GenderLabel, GenderLexicon, GenderResolution, ResolutionMethod};
pub use graph::{
    CountryRole, GraphError, KnowledgeGraph, OccupationKey, Percent, Source, SourceKey, StatisticsNode, Violation,
};
pub use link::{EmbeddingStore, LinkMethod, LinkedMention, Linker};
pub use stats::{GenderCounts, MisalignmentRow, PartialCounts};
