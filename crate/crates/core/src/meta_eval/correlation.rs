use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    Pearson,
    Spearman,
}

impl FromStr for CorrelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pearson" => Ok(CorrelationKind::Pearson),
            "spearman" => Ok(CorrelationKind::Spearman),
            other => Err(Error::InvalidConfig(format!("unknown correlation {other:?}"))),
        }
    }
}

impl fmt::Display for CorrelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrelationKind::Pearson => "pearson",
            CorrelationKind::Spearman => "spearman",
        })
    }
}

fn check_inputs(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: a.len(),
        });
    }
    Ok(())
}

fn is_constant(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Pearson product-moment correlation.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    check_inputs(a, b)?;
    if is_constant(a) || is_constant(b) {
        return Err(Error::ConstantInput);
    }
    let (ma, mb) = (mean(a), mean(b));
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    if va == 0.0 || vb == 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok((cov / (va.sqrt() * vb.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation: Pearson over average ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    check_inputs(a, b)?;
    pearson(&average_ranks(a), &average_ranks(b))
}

pub fn correlation(kind: CorrelationKind, a: &[f64], b: &[f64]) -> Result<f64> {
    match kind {
        CorrelationKind::Pearson => pearson(a, b),
        CorrelationKind::Spearman => spearman(a, b),
    }
}

/// Pearson and Spearman of one metric against human scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub metric_id: String,
    pub pearson: f64,
    pub spearman: f64,
    pub n: usize,
}

impl CorrelationReport {
    pub fn compute(metric_id: impl Into<String>, scores: &[f64], human: &[f64]) -> Result<Self> {
        Ok(Self {
            metric_id: metric_id.into(),
            pearson: pearson(scores, human)?,
            spearman: spearman(scores, human)?,
            n: scores.len(),
        })
    }

    pub fn get(&self, kind: CorrelationKind) -> f64 {
        match kind {
            CorrelationKind::Pearson => self.pearson,
            CorrelationKind::Spearman => self.spearman,
        }
    }
}

/// Mean over metric families of `free - based` correlation. Positive means
/// the reference-free variants agree better with humans.
pub fn delta_free_vs_based(
    free: &[CorrelationReport],
    based: &[CorrelationReport],
    kind: CorrelationKind,
) -> Result<f64> {
    if free.len() != based.len() || free.is_empty() {
        return Err(Error::LengthMismatch {
            left: free.len(),
            right: based.len(),
        });
    }
    let total: f64 = free
        .iter()
        .zip(based)
        .map(|(f, b)| f.get(kind) - b.get(kind))
        .sum();
    Ok(total / free.len() as f64)
}
