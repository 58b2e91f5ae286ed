use std::collections::{HashMap, HashSet};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::benchmark::Benchmark;
use crate::error::{Error, Result};

/// Per-token importance weights for greedy matching.
#[derive(Debug, Clone, PartialEq)]
pub struct IdfTable {
    weights: HashMap<String, f64>,
    default_weight: f64,
}

impl IdfTable {
    pub fn new(weights: HashMap<String, f64>, default_weight: f64) -> Result<Self> {
        let ok = |w: f64| w.is_finite() && w >= 0.0;
        if !ok(default_weight) || !weights.values().all(|&w| ok(w)) {
            return Err(Error::InvalidConfig(
                "idf weights must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            weights,
            default_weight,
        })
    }

    pub fn weight(&self, token: &str) -> f64 {
        self.weights.get(token).copied().unwrap_or(self.default_weight)
    }

    pub fn default_weight(&self) -> f64 {
        self.default_weight
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Which sentences of a benchmark document frequencies are counted over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdfSource {
    References,
    Inputs,
}

impl FromStr for IdfSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "references" => Ok(IdfSource::References),
            "inputs" => Ok(IdfSource::Inputs),
            other => Err(Error::InvalidConfig(format!("unknown idf source {other:?}"))),
        }
    }
}

/// `weight(t) = ln((N + 1) / (df(t) + 1))` over the distinct input (or
/// reference) sentences of the benchmark; unseen tokens get `ln(N + 1)`.
pub fn build_idf(benchmark: &Benchmark, source: IdfSource) -> Result<IdfTable> {
    if benchmark.is_empty() {
        return Err(Error::TooFewInstances { needed: 1, got: 0 });
    }
    let tokenizer = benchmark.tokenizer();
    let sentences: Vec<&str> = benchmark
        .groups()
        .iter()
        .filter_map(|g| match source {
            IdfSource::Inputs => Some(g.input.as_str()),
            IdfSource::References => g.reference.as_deref(),
        })
        .collect();

    let mut df: HashMap<String, usize> = HashMap::new();
    for sentence in &sentences {
        let seq = tokenizer.tokenize(sentence);
        let distinct: HashSet<&String> = seq.tokens().iter().collect();
        for token in distinct {
            *df.entry(token.clone()).or_insert(0) += 1;
        }
    }

    let n = sentences.len() as f64;
    let weights = df
        .into_iter()
        .map(|(t, d)| (t, ((n + 1.0) / (d as f64 + 1.0)).ln()))
        .collect();
    IdfTable::new(weights, (n + 1.0).ln())
}
