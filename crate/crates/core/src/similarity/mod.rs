//! Pluggable embedding providers and the sentence similarity `Sim(a, b)`
//! built on top of them.
//!
//! A [`SimilarityBackendDescriptor`] names the provider and how sentence
//! similarity is derived from token embeddings. [`SimilarityBackend`] is the
//! live object: it owns the provider, an optional [`IdfTable`], and answers
//! [`SimilarityBackend::sim`] queries.
//!
//! Every provider returns unit-norm rows, so both similarity modes are
//! invariant to positive rescaling of the raw vectors.

mod fallback;
mod file;
mod greedy;
mod idf;
mod remote;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexical::PrecisionRecallF1;
use crate::text::TokenSequence;

pub use fallback::FallbackProvider;
pub use file::{FileProvider, DEFAULT_TOKEN};
pub use greedy::{greedy_match_score, mean_pool_cosine};
pub use idf::{build_idf, IdfSource, IdfTable};
pub use remote::{RemoteOptions, RemoteProvider, REMOTE_TIMEOUT_ENV};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    DeterministicFallback,
    EmbeddingFile,
    RemoteService,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentenceSimMode {
    /// F1 of greedy token matching.
    GreedyF1,
    /// Cosine of mean-pooled token embeddings.
    MeanPoolCosine,
}

impl FromStr for SentenceSimMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy-f1" | "greedy_f1" => Ok(SentenceSimMode::GreedyF1),
            "mean-pool-cosine" | "mean_pool_cosine" => Ok(SentenceSimMode::MeanPoolCosine),
            other => Err(Error::InvalidConfig(format!("unknown similarity mode {other:?}"))),
        }
    }
}

impl fmt::Display for SentenceSimMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SentenceSimMode::GreedyF1 => "greedy-f1",
            SentenceSimMode::MeanPoolCosine => "mean-pool-cosine",
        })
    }
}

/// Names the provider behind `Sim` and how sentence similarity is computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityBackendDescriptor {
    pub provider: ProviderKind,
    pub sentence_sim_mode: SentenceSimMode,
    pub idf_enabled: bool,
    pub endpoint_or_path: String,
}

impl SimilarityBackendDescriptor {
    pub fn fallback() -> Self {
        Self {
            provider: ProviderKind::DeterministicFallback,
            sentence_sim_mode: SentenceSimMode::GreedyF1,
            idf_enabled: false,
            endpoint_or_path: String::new(),
        }
    }

    /// Parses `fallback`, `file:PATH` or `remote:URL`.
    pub fn parse_provider(spec: &str) -> Result<Self> {
        let (provider, target) = if spec == "fallback" {
            (ProviderKind::DeterministicFallback, "")
        } else if let Some(path) = spec.strip_prefix("file:") {
            (ProviderKind::EmbeddingFile, path)
        } else if let Some(url) = spec.strip_prefix("remote:") {
            (ProviderKind::RemoteService, url)
        } else {
            return Err(Error::InvalidConfig(format!(
                "backend must be fallback, file:PATH or remote:URL, got {spec:?}"
            )));
        };
        let descriptor = Self {
            provider,
            endpoint_or_path: target.to_string(),
            ..Self::fallback()
        };
        descriptor.validate()?;
        Ok(descriptor)
    }

    pub fn with_mode(mut self, mode: SentenceSimMode) -> Self {
        self.sentence_sim_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.provider != ProviderKind::DeterministicFallback && self.endpoint_or_path.is_empty() {
            return Err(Error::InvalidConfig(
                "embedding file and remote providers need a path or endpoint".into(),
            ));
        }
        Ok(())
    }
}

/// Unit-norm token embeddings, one row per token.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenEmbeddings {
    tokens: Vec<String>,
    dim: usize,
    data: Vec<f64>,
}

impl TokenEmbeddings {
    /// Normalizes each row to unit length. Rows must be finite, non-zero and
    /// `dim` wide.
    pub fn from_rows(tokens: Vec<String>, dim: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != tokens.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: tokens.len(),
            });
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (token, row) in tokens.iter().zip(&rows) {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    metric: format!("embedding of {token:?}"),
                    index: 0,
                });
            }
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::ZeroVector(token.clone()));
            }
            data.extend(row.iter().map(|v| v / norm));
        }
        Ok(Self { tokens, dim, data })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1)).take(self.tokens.len())
    }
}

/// Source of token embeddings. Implementations must be safe to call from
/// several threads at once.
pub trait EmbeddingProvider: Send + Sync {
    fn embed(&self, seq: &TokenSequence) -> Result<TokenEmbeddings>;
    fn dim(&self) -> usize;
}

/// A live similarity backend.
#[derive(Clone)]
pub struct SimilarityBackend {
    descriptor: SimilarityBackendDescriptor,
    provider: Arc<dyn EmbeddingProvider>,
    idf: Option<Arc<IdfTable>>,
}

impl fmt::Debug for SimilarityBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimilarityBackend")
            .field("descriptor", &self.descriptor)
            .field("dim", &self.provider.dim())
            .field("idf", &self.idf.is_some())
            .finish()
    }
}

impl SimilarityBackend {
    /// Opens the provider named by `descriptor`. When `idf_enabled` is set,
    /// attach a table with [`SimilarityBackend::with_idf`] before scoring.
    pub fn from_descriptor(descriptor: SimilarityBackendDescriptor) -> Result<Self> {
        descriptor.validate()?;
        let provider: Arc<dyn EmbeddingProvider> = match descriptor.provider {
            ProviderKind::DeterministicFallback => Arc::new(FallbackProvider::default()),
            ProviderKind::EmbeddingFile => Arc::new(FileProvider::load(&descriptor.endpoint_or_path)?),
            ProviderKind::RemoteService => Arc::new(RemoteProvider::connect(
                &descriptor.endpoint_or_path,
                RemoteOptions::from_env(),
            )?),
        };
        Ok(Self::with_provider(descriptor, provider))
    }

    pub fn with_provider(
        descriptor: SimilarityBackendDescriptor,
        provider: Arc<dyn EmbeddingProvider>,
    ) -> Self {
        Self {
            descriptor,
            provider,
            idf: None,
        }
    }

    /// Deterministic hash-based backend with greedy F1 similarity.
    pub fn fallback() -> Self {
        Self::with_provider(
            SimilarityBackendDescriptor::fallback(),
            Arc::new(FallbackProvider::default()),
        )
    }

    pub fn with_idf(mut self, idf: IdfTable) -> Self {
        self.descriptor.idf_enabled = true;
        self.idf = Some(Arc::new(idf));
        self
    }

    /// Same provider, different sentence similarity mode.
    pub fn with_mode(&self, mode: SentenceSimMode) -> Self {
        let mut other = self.clone();
        other.descriptor.sentence_sim_mode = mode;
        other
    }

    pub fn descriptor(&self) -> &SimilarityBackendDescriptor {
        &self.descriptor
    }

    pub fn idf(&self) -> Option<&IdfTable> {
        self.idf.as_deref()
    }

    pub fn embed(&self, seq: &TokenSequence) -> Result<TokenEmbeddings> {
        self.provider.embed(seq)
    }

    fn idf_for_scoring(&self) -> Result<Option<&IdfTable>> {
        match (&self.idf, self.descriptor.idf_enabled) {
            (Some(table), _) => Ok(Some(table)),
            (None, false) => Ok(None),
            (None, true) => Err(Error::InvalidConfig(
                "idf is enabled but no idf table is attached".into(),
            )),
        }
    }

    /// Greedy matching precision/recall/F1 of `candidate` against `target`.
    pub fn greedy(&self, candidate: &TokenSequence, target: &TokenSequence) -> Result<PrecisionRecallF1> {
        let cand = self.embed(candidate)?;
        let targ = self.embed(target)?;
        greedy_match_score(&cand, &targ, self.idf_for_scoring()?)
    }

    /// Sentence similarity in `[0, 1]` under the configured mode.
    pub fn sim(&self, a: &TokenSequence, b: &TokenSequence) -> Result<f64> {
        match self.descriptor.sentence_sim_mode {
            SentenceSimMode::GreedyF1 => Ok(self.greedy(b, a)?.f1),
            SentenceSimMode::MeanPoolCosine => {
                let ea = self.embed(a)?;
                let eb = self.embed(b)?;
                mean_pool_cosine(&ea, &eb)
            }
        }
    }
}
