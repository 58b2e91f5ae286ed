//! The metric roster and batch scoring of whole benchmarks.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmark::{Benchmark, ScoreVector};
use crate::error::{Error, Result};
use crate::lexical::{bleu, ibleu, ned, rouge, self_bleu, BleuConfig, RougeVariant};
use crate::meta_eval::DistKey;
use crate::parascore::{bert_ibleu, ParaScoreConfig, ParaScoreMode, ParaScorer, DEFAULT_BETA};
use crate::similarity::SimilarityBackend;
use crate::text::TokenSequence;

/// iBLEU weight on the self-BLEU penalty.
pub const DEFAULT_ALPHA: f64 = 0.2;

/// A metric from the roster. `*Free` variants compare the candidate with the
/// input instead of the reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    Bleu4,
    Bleu4Free,
    SelfBleu,
    IBleu,
    Rouge(RougeVariant),
    RougeFree(RougeVariant),
    Ned,
    BertScore,
    BertScoreFree,
    BertIBleu,
    ParaScore,
    ParaScoreFree,
}

impl Metric {
    pub const ALL: [Metric; 16] = [
        Metric::Bleu4,
        Metric::Bleu4Free,
        Metric::SelfBleu,
        Metric::IBleu,
        Metric::Rouge(RougeVariant::R1),
        Metric::RougeFree(RougeVariant::R1),
        Metric::Rouge(RougeVariant::R2),
        Metric::RougeFree(RougeVariant::R2),
        Metric::Rouge(RougeVariant::RL),
        Metric::RougeFree(RougeVariant::RL),
        Metric::Ned,
        Metric::BertScore,
        Metric::BertScoreFree,
        Metric::BertIBleu,
        Metric::ParaScore,
        Metric::ParaScoreFree,
    ];

    /// True when scoring reads the reference.
    pub fn needs_reference(self) -> bool {
        matches!(
            self,
            Metric::Bleu4 | Metric::IBleu | Metric::Rouge(_) | Metric::BertScore | Metric::ParaScore
        )
    }

    /// The reference-free counterpart, if the metric has one.
    pub fn free_variant(self) -> Option<Metric> {
        match self {
            Metric::Bleu4 => Some(Metric::Bleu4Free),
            Metric::Rouge(v) => Some(Metric::RougeFree(v)),
            Metric::BertScore => Some(Metric::BertScoreFree),
            Metric::ParaScore => Some(Metric::ParaScoreFree),
            _ => None,
        }
    }
}

fn rouge_suffix(v: RougeVariant) -> &'static str {
    match v {
        RougeVariant::R1 => "1",
        RougeVariant::R2 => "2",
        RougeVariant::RL => "L",
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Bleu4 => f.write_str("bleu4"),
            Metric::Bleu4Free => f.write_str("bleu4-free"),
            Metric::SelfBleu => f.write_str("selfbleu"),
            Metric::IBleu => f.write_str("ibleu"),
            Metric::Rouge(v) => write!(f, "rouge{}", rouge_suffix(*v)),
            Metric::RougeFree(v) => write!(f, "rouge{}-free", rouge_suffix(*v)),
            Metric::Ned => f.write_str("ned"),
            Metric::BertScore => f.write_str("bertscore"),
            Metric::BertScoreFree => f.write_str("bertscore-free"),
            Metric::BertIBleu => f.write_str("bert-ibleu"),
            Metric::ParaScore => f.write_str("parascore"),
            Metric::ParaScoreFree => f.write_str("parascore-free"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown metric {s:?}")))
    }
}

/// Hyper-parameters shared by the roster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub bleu: BleuConfig,
    pub alpha: f64,
    pub beta: f64,
    pub parascore: ParaScoreConfig,
}

impl Default for MetricParams {
    fn default() -> Self {
        Self {
            bleu: BleuConfig::default(),
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            parascore: ParaScoreConfig::default(),
        }
    }
}

struct Texts {
    x: TokenSequence,
    r: Option<TokenSequence>,
    c: TokenSequence,
}

fn texts(benchmark: &Benchmark) -> Vec<Texts> {
    let tok = benchmark.tokenizer();
    benchmark
        .instances()
        .par_iter()
        .map(|inst| Texts {
            x: tok.tokenize(&inst.input),
            r: inst.reference.as_deref().map(|r| tok.tokenize(r)),
            c: tok.tokenize(&inst.candidate),
        })
        .collect()
}

/// Scores every instance; output order is instance order.
pub fn score_benchmark(
    benchmark: &Benchmark,
    metric: Metric,
    backend: &SimilarityBackend,
    params: &MetricParams,
) -> Result<ScoreVector> {
    let id = metric.to_string();
    let values = match metric {
        Metric::ParaScore | Metric::ParaScoreFree => {
            let mode = if metric == Metric::ParaScore {
                ParaScoreMode::Based
            } else {
                ParaScoreMode::Free
            };
            ParaScorer::new(backend, params.parascore)?
                .score_benchmark(benchmark, mode)?
                .into_iter()
                .map(|s| s.total)
                .collect()
        }
        _ => {
            params.bleu.validate()?;
            texts(benchmark)
                .par_iter()
                .enumerate()
                .map(|(index, t)| {
                    let r = || t.r.as_ref().ok_or(Error::MissingReference { index });
                    match metric {
                        Metric::Bleu4 => bleu(&t.c, r()?, &params.bleu),
                        Metric::Bleu4Free => bleu(&t.c, &t.x, &params.bleu),
                        Metric::SelfBleu => self_bleu(&t.c, &t.x, &params.bleu),
                        Metric::IBleu => ibleu(&t.c, r()?, &t.x, params.alpha, &params.bleu),
                        Metric::Rouge(v) => Ok(rouge(&t.c, r()?, v)?.f1),
                        Metric::RougeFree(v) => Ok(rouge(&t.c, &t.x, v)?.f1),
                        Metric::Ned => ned(&t.x, &t.c),
                        Metric::BertScore => backend.sim(r()?, &t.c),
                        Metric::BertScoreFree => backend.sim(&t.x, &t.c),
                        Metric::BertIBleu => bert_ibleu(&t.x, &t.c, params.beta, backend, &params.bleu),
                        Metric::ParaScore | Metric::ParaScoreFree => unreachable!(),
                    }
                })
                .collect::<Result<Vec<f64>>>()?
        }
    };
    ScoreVector::for_benchmark(id, values, benchmark)
}

/// Normalized edit distance of each candidate to its input or reference.
pub fn distance_vector(benchmark: &Benchmark, key: DistKey) -> Result<ScoreVector> {
    let values = texts(benchmark)
        .par_iter()
        .enumerate()
        .map(|(index, t)| match key {
            DistKey::ToInput => ned(&t.x, &t.c),
            DistKey::ToReference => ned(t.r.as_ref().ok_or(Error::MissingReference { index })?, &t.c),
        })
        .collect::<Result<Vec<f64>>>()?;
    let id = match key {
        DistKey::ToInput => "dist_xc",
        DistKey::ToReference => "dist_rc",
    };
    ScoreVector::for_benchmark(id, values, benchmark)
}

/// `Sim(X, C)` for every instance.
pub fn input_similarity_vector(benchmark: &Benchmark, backend: &SimilarityBackend) -> Result<ScoreVector> {
    let values = texts(benchmark)
        .par_iter()
        .map(|t| backend.sim(&t.x, &t.c))
        .collect::<Result<Vec<f64>>>()?;
    ScoreVector::for_benchmark("sim_xc", values, benchmark)
}
