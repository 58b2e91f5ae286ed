//! Benchmark files, dev/test splits, extended benchmarks and report output.

pub mod loader;
pub mod report;
pub mod split;

pub use loader::{load_benchmark, read_benchmark, save_benchmark, write_benchmark, TSV_HEADER};
pub use report::{emit_report, fixed4, ReportDocument, ReportFormat, ReportRow};
pub use split::{
    extend_benchmark, rounded_count, split_dev_test, SplitConfig, DEFAULT_DEV_FRACTION,
    DEFAULT_EXTEND_FRACTION,
};
