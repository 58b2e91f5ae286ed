use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benchmark::{Benchmark, EvalInstance};
use crate::error::{Error, Result};

pub const DEFAULT_DEV_FRACTION: f64 = 0.10;
pub const DEFAULT_EXTEND_FRACTION: f64 = 0.20;

/// Dev/test split by input group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub dev_fraction: f64,
    pub seed: u64,
}

impl SplitConfig {
    pub fn new(dev_fraction: f64, seed: u64) -> Result<Self> {
        let config = Self { dev_fraction, seed };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dev_fraction > 0.0 && self.dev_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "dev fraction must be in (0, 1), got {}",
                self.dev_fraction
            )));
        }
        Ok(())
    }
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            dev_fraction: DEFAULT_DEV_FRACTION,
            seed: 0,
        }
    }
}

/// `round(fraction * n)` with ties to even.
pub fn rounded_count(fraction: f64, n: usize) -> usize {
    (fraction * n as f64).round_ties_even() as usize
}

/// The first `count` group ids of a seeded shuffle, ascending.
fn choose_groups(n_groups: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..n_groups).collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut chosen = ids[..count.min(n_groups)].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Splits into `(dev, test)`. All candidates of one input land on the same side.
pub fn split_dev_test(benchmark: &Benchmark, config: &SplitConfig) -> Result<(Benchmark, Benchmark)> {
    config.validate()?;
    let n_groups = benchmark.groups().len();
    if n_groups < 10 {
        return Err(Error::TooFewGroups {
            needed: 10,
            got: n_groups,
        });
    }
    let dev_ids = choose_groups(n_groups, rounded_count(config.dev_fraction, n_groups), config.seed);
    let mut in_dev = vec![false; n_groups];
    for &g in &dev_ids {
        in_dev[g] = true;
    }
    let test_ids: Vec<usize> = (0..n_groups).filter(|&g| !in_dev[g]).collect();
    let name = benchmark.name();
    Ok((
        benchmark.select_groups(format!("{name}-dev"), &dev_ids),
        benchmark.select_groups(format!("{name}-test"), &test_ids),
    ))
}

/// Appends a copy candidate (`C = X`, score 0, same reference) for
/// `round(fraction * #groups)` seeded-chosen input groups.
pub fn extend_benchmark(benchmark: &Benchmark, fraction: f64, seed: u64) -> Result<Benchmark> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidConfig(format!(
            "extend fraction must be in [0, 1], got {fraction}"
        )));
    }
    let groups = benchmark.groups();
    let chosen = choose_groups(groups.len(), rounded_count(fraction, groups.len()), seed);
    let extra: Vec<EvalInstance> = chosen
        .iter()
        .map(|&g| EvalInstance {
            input: groups[g].input.clone(),
            reference: groups[g].reference.clone(),
            candidate: groups[g].input.clone(),
            score: 0.0,
        })
        .collect();
    benchmark.with_extra_instances(extra)
}
