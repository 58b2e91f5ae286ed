//! Meta-evaluation: how well metric scores agree with human judgments, overall
//! and on distance-based partitions and attribution subsets.

pub mod attribution;
pub mod correlation;
pub mod partition;

pub use attribution::{
    build_pairs, build_s_div, build_s_sim, pair_delta_correlation, split_s_div, AttributionPair,
    DeltaQuantity, PairCriterion, S_DIV_ETA, S_DIV_SPLIT, S_SIM_ETA,
};
pub use correlation::{
    average_ranks, correlation, delta_free_vs_based, pearson, spearman, CorrelationKind,
    CorrelationReport,
};
pub use partition::{case_partition, quartile_groups, CasePartition, DistKey, DistanceGroup};
