//! Paraphrase evaluation: lexical and embedding-based metrics, ParaScore,
//! and meta-evaluation of metrics against human judgments.
//!
//! The crate root re-exports the types shared with the command-line and
//! benchmark crates.

pub mod benchmark;
pub mod error;
pub mod io;
pub mod lexical;
pub mod meta_eval;
pub mod parascore;
pub mod scoring;
pub mod similarity;
pub mod synthetic;
pub mod text;

pub use benchmark::{Benchmark, EvalInstance, InputGroup, ScoreVector};
pub use error::{Error, Result};
pub use io::{ReportDocument, ReportFormat, ReportRow, SplitConfig};
pub use lexical::{BleuConfig, PrecisionRecallF1, RougeVariant, Smoothing};
pub use meta_eval::{CorrelationKind, CorrelationReport, DistKey};
pub use parascore::{
    CompositeScore, DivergenceShape, ParaScoreConfig, ParaScoreMode, ParaScorer, TuneOutcome,
};
pub use scoring::{Metric, MetricParams};
pub use similarity::{
    EmbeddingProvider, SentenceSimMode, SimilarityBackend, SimilarityBackendDescriptor,
};
pub use text::{TokenScheme, TokenSequence, Tokenizer};

/// Toolkit version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
