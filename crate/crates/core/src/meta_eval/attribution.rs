//! Candidate pairs that differ strongly in one quality factor while nearly
//! matching in the other, and correlations of within-pair differences with
//! the human-score difference.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::correlation::{pearson, spearman, CorrelationReport};
use crate::benchmark::{Benchmark, ScoreVector};
use crate::error::{Error, Result};

/// Default thresholds for the semantic-promoted subset.
pub const S_SIM_ETA: (f64, f64) = (0.05, 0.15);
/// Default thresholds for the divergence-promoted subset.
pub const S_DIV_ETA: (f64, f64) = (0.05, 0.10);
/// Default `d(j, k)` split point for the divergence-promoted subset.
pub const S_DIV_SPLIT: f64 = 0.35;

/// Two candidates of the same input, `j < k`, with cached distances to and
/// similarities with that input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionPair {
    /// Group id of the shared input.
    pub x_index: usize,
    pub j: usize,
    pub k: usize,
    pub dist_xj: f64,
    pub dist_xk: f64,
    pub sim_xj: f64,
    pub sim_xk: f64,
    pub delta_s: f64,
    pub delta_h: f64,
    pub delta_d: f64,
}

impl AttributionPair {
    /// `min(Dist(X, C_j), Dist(X, C_k))`.
    pub fn min_dist(&self) -> f64 {
        self.dist_xj.min(self.dist_xk)
    }
}

/// Pair selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCriterion {
    /// `|ΔDist| <= eta1` and `|ΔSim| >= eta2`.
    SemanticPromoted,
    /// `|ΔSim| <= eta1` and `|ΔDist| >= eta2`.
    DivergencePromoted,
    /// Only `|ΔDist| <= eta1`; the unfiltered baseline for the semantic subset.
    DistanceMatched,
}

impl PairCriterion {
    pub fn accepts(self, delta_dist: f64, delta_sim: f64, eta1: f64, eta2: f64) -> bool {
        let (dd, ds) = (delta_dist.abs(), delta_sim.abs());
        match self {
            PairCriterion::SemanticPromoted => dd <= eta1 && ds >= eta2,
            PairCriterion::DivergencePromoted => ds <= eta1 && dd >= eta2,
            PairCriterion::DistanceMatched => dd <= eta1,
        }
    }
}

/// Enumerates unordered candidate pairs within each input group and keeps
/// those accepted by `criterion`. Output is ordered by group, then `j`, then `k`.
pub fn build_pairs(
    benchmark: &Benchmark,
    dist: &ScoreVector,
    sim: &ScoreVector,
    criterion: PairCriterion,
    eta1: f64,
    eta2: f64,
) -> Result<Vec<AttributionPair>> {
    dist.check_aligned(benchmark)?;
    sim.check_aligned(benchmark)?;
    if !(eta1 >= 0.0 && eta2 >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "thresholds must be non-negative, got eta1={eta1}, eta2={eta2}"
        )));
    }
    let (d, s) = (dist.values(), sim.values());
    let h: Vec<f64> = benchmark.human_scores();

    let per_group: Vec<Vec<AttributionPair>> = benchmark
        .groups()
        .par_iter()
        .enumerate()
        .map(|(gid, group)| {
            let mut out = Vec::new();
            for (a, &j) in group.indices.iter().enumerate() {
                for &k in &group.indices[a + 1..] {
                    let delta_d = d[j] - d[k];
                    let delta_s = s[j] - s[k];
                    if criterion.accepts(delta_d, delta_s, eta1, eta2) {
                        out.push(AttributionPair {
                            x_index: gid,
                            j,
                            k,
                            dist_xj: d[j],
                            dist_xk: d[k],
                            sim_xj: s[j],
                            sim_xk: s[k],
                            delta_s,
                            delta_h: h[j] - h[k],
                            delta_d,
                        });
                    }
                }
            }
            out
        })
        .collect();
    Ok(per_group.into_iter().flatten().collect())
}

/// Semantic-promoted pairs: nearly equal distance, clearly different similarity.
pub fn build_s_sim(
    benchmark: &Benchmark,
    dist: &ScoreVector,
    sim: &ScoreVector,
    eta1: f64,
    eta2: f64,
) -> Result<Vec<AttributionPair>> {
    build_pairs(benchmark, dist, sim, PairCriterion::SemanticPromoted, eta1, eta2)
}

/// Divergence-promoted pairs: nearly equal similarity, clearly different distance.
pub fn build_s_div(
    benchmark: &Benchmark,
    dist: &ScoreVector,
    sim: &ScoreVector,
    eta1: f64,
    eta2: f64,
) -> Result<Vec<AttributionPair>> {
    build_pairs(benchmark, dist, sim, PairCriterion::DivergencePromoted, eta1, eta2)
}

/// Splits pairs into those with `min(dist) <= threshold` and the rest.
pub fn split_s_div(
    pairs: &[AttributionPair],
    threshold: f64,
) -> (Vec<AttributionPair>, Vec<AttributionPair>) {
    pairs.iter().cloned().partition(|p| p.min_dist() <= threshold)
}

/// Which within-pair difference is correlated with `Δh`.
#[derive(Debug, Clone, Copy)]
pub enum DeltaQuantity<'a> {
    Sim,
    Dist,
    /// `M(X, C_j) - M(X, C_k)` for a metric's score vector.
    Metric(&'a ScoreVector),
}

impl DeltaQuantity<'_> {
    fn label(&self) -> String {
        match self {
            DeltaQuantity::Sim => "delta_s".into(),
            DeltaQuantity::Dist => "delta_d".into(),
            DeltaQuantity::Metric(m) => format!("delta_m:{}", m.metric_id()),
        }
    }

    fn of(&self, pair: &AttributionPair) -> f64 {
        match self {
            DeltaQuantity::Sim => pair.delta_s,
            DeltaQuantity::Dist => pair.delta_d,
            DeltaQuantity::Metric(m) => m.values()[pair.j] - m.values()[pair.k],
        }
    }
}

/// Pearson and Spearman of the chosen `Δ` against `Δh` over `pairs`.
pub fn pair_delta_correlation(
    pairs: &[AttributionPair],
    quantity: DeltaQuantity<'_>,
) -> Result<CorrelationReport> {
    if pairs.len() < 3 {
        return Err(Error::TooFewPairs { got: pairs.len() });
    }
    if let DeltaQuantity::Metric(m) = quantity {
        if let Some(max) = pairs.iter().map(|p| p.j.max(p.k)).max() {
            if max >= m.len() {
                return Err(Error::LengthMismatch {
                    left: m.len(),
                    right: max + 1,
                });
            }
        }
    }
    let deltas: Vec<f64> = pairs.iter().map(|p| quantity.of(p)).collect();
    let dh: Vec<f64> = pairs.iter().map(|p| p.delta_h).collect();
    Ok(CorrelationReport {
        metric_id: quantity.label(),
        pearson: pearson(&deltas, &dh)?,
        spearman: spearman(&deltas, &dh)?,
        n: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::EvalInstance;
    use crate::text::Tokenizer;

    fn bench(h: &[f64]) -> Benchmark {
        let instances = h
            .iter()
            .enumerate()
            .map(|(i, &h)| EvalInstance::new("x", None, format!("c{i}"), h).unwrap())
            .collect();
        Benchmark::new("b", "en", Tokenizer::default(), instances).unwrap()
    }

    fn sv(v: &[f64]) -> ScoreVector {
        ScoreVector::new("v", v.to_vec()).unwrap()
    }

    #[test]
    fn s_sim_membership() {
        let b = bench(&[0.1, 0.9, 0.5]);
        let dist = sv(&[0.30, 0.33, 0.50]);
        let sim = sv(&[0.40, 0.60, 0.41]);
        let pairs = build_s_sim(&b, &dist, &sim, 0.05, 0.15).unwrap();
        // (0,1): |ΔDist| = 0.03, |ΔSim| = 0.20 -> in; (0,2), (1,2): ΔDist too large
        assert_eq!(pairs.len(), 1);
        let p = &pairs[0];
        assert_eq!((p.j, p.k), (0, 1));
        assert!((p.delta_s - (0.40 - 0.60)).abs() < 1e-12);
        assert!((p.delta_h - (0.1 - 0.9)).abs() < 1e-12);
        assert!((p.delta_d - (0.30 - 0.33)).abs() < 1e-12);
    }

    #[test]
    fn s_div_membership() {
        let b = bench(&[0.1, 0.9, 0.5]);
        let dist = sv(&[0.10, 0.25, 0.26]);
        let sim = sv(&[0.50, 0.52, 0.60]);
        let pairs = build_s_div(&b, &dist, &sim, 0.05, 0.10).unwrap();
        // (0,1): |ΔSim| = 0.02, |ΔDist| = 0.15 -> in; (0,2): |ΔSim| = 0.10 -> out
        assert_eq!(pairs.iter().map(|p| (p.j, p.k)).collect::<Vec<_>>(), [(0, 1)]);
    }

    #[test]
    fn distance_matched_ignores_sim() {
        let b = bench(&[0.1, 0.9]);
        let pairs = build_pairs(&b, &sv(&[0.3, 0.31]), &sv(&[0.5, 0.5]), PairCriterion::DistanceMatched, 0.05, 0.15).unwrap();
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn pairs_never_cross_groups() {
        let instances = vec![
            EvalInstance::new("x1", None, "a", 0.1).unwrap(),
            EvalInstance::new("x2", None, "b", 0.9).unwrap(),
        ];
        let b = Benchmark::new("b", "en", Tokenizer::default(), instances).unwrap();
        let pairs = build_pairs(&b, &sv(&[0.3, 0.3]), &sv(&[0.1, 0.9]), PairCriterion::SemanticPromoted, 0.05, 0.15).unwrap();
        assert!(pairs.is_empty());
    }

    fn pair(dj: f64, dk: f64) -> AttributionPair {
        AttributionPair {
            x_index: 0,
            j: 0,
            k: 1,
            dist_xj: dj,
            dist_xk: dk,
            sim_xj: 0.5,
            sim_xk: 0.5,
            delta_s: 0.0,
            delta_h: 0.0,
            delta_d: dj - dk,
        }
    }

    #[test]
    fn split_by_min_distance() {
        let pairs = [pair(0.2, 0.4), pair(0.5, 0.9), pair(0.35, 0.8)];
        let (div1, div2) = split_s_div(&pairs, S_DIV_SPLIT);
        assert_eq!(div1, [pairs[0].clone(), pairs[2].clone()]);
        assert_eq!(div2, [pairs[1].clone()]);
    }

    #[test]
    fn delta_correlation_signs() {
        let h = [0.1, 0.4, 0.2, 0.9, 0.6];
        let b = bench(&h);
        let dist = sv(&[0.3; 5]);
        let same = sv(&h);
        let pairs = build_pairs(&b, &dist, &same, PairCriterion::DistanceMatched, 0.05, 0.0).unwrap();
        assert_eq!(pairs.len(), 10);
        let r = pair_delta_correlation(&pairs, DeltaQuantity::Sim).unwrap();
        assert!((r.pearson - 1.0).abs() < 1e-12);
        let neg = sv(&h.map(|v| -v));
        let r = pair_delta_correlation(&pairs, DeltaQuantity::Metric(&neg)).unwrap();
        assert!((r.pearson + 1.0).abs() < 1e-12);
        assert_eq!(r.metric_id, "delta_m:v");
    }

    #[test]
    fn delta_correlation_errors() {
        assert!(matches!(
            pair_delta_correlation(&[pair(0.1, 0.2)], DeltaQuantity::Dist),
            Err(Error::TooFewPairs { got: 1 })
        ));
        let flat = [pair(0.1, 0.2), pair(0.1, 0.3), pair(0.2, 0.5)];
        assert!(matches!(
            pair_delta_correlation(&flat, DeltaQuantity::Dist),
            Err(Error::ConstantInput)
        ));
    }
}
