use serde::{Deserialize, Serialize};

use crate::benchmark::{Benchmark, ScoreVector};
use crate::error::{Error, Result};

/// Which lexical distance instances are bucketed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistKey {
    ToReference,
    ToInput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceGroup {
    /// 1 (closest) through 4 (farthest).
    pub group_index: usize,
    pub instance_indices: Vec<usize>,
    pub dist_key: DistKey,
    pub min_dist: f64,
    pub max_dist: f64,
}

/// Splits instances into four equal-size groups by ascending distance.
/// With `n = 4q + r`, the first `r` groups get `q + 1` instances. Equal
/// distances keep instance-index order.
pub fn quartile_groups(
    benchmark: &Benchmark,
    dist: &ScoreVector,
    key: DistKey,
) -> Result<Vec<DistanceGroup>> {
    dist.check_aligned(benchmark)?;
    let n = dist.len();
    if n < 4 {
        return Err(Error::TooFewInstances { needed: 4, got: n });
    }
    let values = dist.values();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));

    let (q, r) = (n / 4, n % 4);
    let mut groups = Vec::with_capacity(4);
    let mut start = 0;
    for g in 0..4 {
        let size = q + usize::from(g < r);
        let members = order[start..start + size].to_vec();
        start += size;
        let min_dist = members.first().map_or(f64::NAN, |&i| values[i]);
        let max_dist = members.last().map_or(f64::NAN, |&i| values[i]);
        groups.push(DistanceGroup {
            group_index: g + 1,
            instance_indices: members,
            dist_key: key,
            min_dist,
            max_dist,
        });
    }
    Ok(groups)
}

/// Case I: candidate closer to the reference than to the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CasePartition {
    pub case1_indices: Vec<usize>,
    pub case2_indices: Vec<usize>,
    /// Shares of Case I and Case II.
    pub proportions: (f64, f64),
}

/// Case I iff `Dist(R, C) < Dist(X, C)`; ties fall into Case II.
pub fn case_partition(
    benchmark: &Benchmark,
    dist_cr: &ScoreVector,
    dist_xc: &ScoreVector,
) -> Result<CasePartition> {
    dist_cr.check_aligned(benchmark)?;
    dist_xc.check_aligned(benchmark)?;
    if let Some(index) = benchmark.instances().iter().position(|i| i.reference.is_none()) {
        return Err(Error::MissingReference { index });
    }
    if benchmark.is_empty() {
        return Err(Error::TooFewInstances { needed: 1, got: 0 });
    }
    let (case1, case2): (Vec<usize>, Vec<usize>) = (0..benchmark.len())
        .partition(|&i| dist_cr.values()[i] < dist_xc.values()[i]);
    let n = benchmark.len() as f64;
    let p1 = case1.len() as f64 / n;
    Ok(CasePartition {
        proportions: (p1, case2.len() as f64 / n),
        case1_indices: case1,
        case2_indices: case2,
    })
}
