use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "paraeval", version, about = "Paraphrase metric scoring and meta-evaluation")]
pub struct Cli {
    /// Worker threads for batch scoring (default: number of processors).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-instance scores of one metric.
    Score(ScoreArgs),
    /// Correlation of metrics with human scores over the whole benchmark.
    Evaluate(EvaluateArgs),
    /// Correlations on distance-based partitions and attribution subsets.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Grid-search omega on a dev split and report test correlation.
    Tune(TuneArgs),
    /// Add zero-score copy candidates for a fraction of inputs.
    Extend(ExtendArgs),
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Correlations within four equal-size distance groups.
    DistanceGroups(DistanceGroupsArgs),
    /// Correlations on Case I (closer to the reference) and Case II.
    Cases(CasesArgs),
    /// Correlation of within-pair differences with human-score differences.
    Attribution(AttributionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Whitespace,
    Character,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdfChoice {
    None,
    References,
    Inputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ablation {
    None,
    /// Linear DS over the whole range, no plateau.
    NoThresh,
    /// Reference similarity only, no max with the input similarity.
    NoMax,
    /// Similarity alone (omega forced to 0).
    NoDs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Markdown,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Correlations {
    Pearson,
    Spearman,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    Pearson,
    Spearman,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Free,
    Based,
}

/// Benchmark location and tokenization.
#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchmarkArgs {
    #[arg(long)]
    pub benchmark: PathBuf,

    /// Language tag; picks character tokens for zh/ja/ko.
    #[arg(long, default_value = "en")]
    pub language: String,

    /// Overrides the tokenization implied by --language.
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
}

/// Similarity backend and metric hyper-parameters.
#[derive(Debug, Clone, Args, Serialize)]
pub struct MetricArgs {
    /// fallback, file:PATH or remote:URL.
    #[arg(long, default_value = "fallback")]
    pub backend: String,

    /// greedy-f1 or mean-pool-cosine.
    #[arg(long, default_value = "greedy-f1")]
    pub sim_mode: String,

    #[arg(long, value_enum, default_value_t = IdfChoice::None)]
    pub idf: IdfChoice,

    #[arg(long, default_value_t = 0.05)]
    pub omega: f64,

    #[arg(long, default_value_t = 0.35)]
    pub gamma: f64,

    /// iBLEU self-BLEU weight.
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,

    /// BERT-iBLEU weight.
    #[arg(long, default_value_t = 4.0)]
    pub beta: f64,

    /// none, add-k or add-k:K.
    #[arg(long, default_value = "add-k:1")]
    pub smoothing: String,

    #[arg(long, value_enum, default_value_t = Ablation::None)]
    pub ablation: Ablation,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Result file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Manifest file; defaults to `<out>.manifest.json`, or the error stream without --out.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScoreArgs {
    #[arg(long)]
    pub metric: String,
    #[command(flatten)]
    pub bench: BenchmarkArgs,
    #[command(flatten)]
    pub metric_args: MetricArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    /// Metrics to report, comma separated; defaults to the whole roster
    /// (reference-free metrics only when references are missing).
    #[arg(long = "metric", value_delimiter = ',')]
    pub metrics: Vec<String>,

    #[arg(long, value_enum, default_value_t = Correlations::Both)]
    pub correlations: Correlations,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub bench: BenchmarkArgs,
    #[command(flatten)]
    pub metric_args: MetricArgs,
    #[command(flatten)]
    pub report: ReportArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistKeyArg {
    ToReference,
    ToInput,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DistanceGroupsArgs {
    #[arg(long, value_enum, default_value_t = DistKeyArg::ToReference)]
    pub dist_key: DistKeyArg,
    #[command(flatten)]
    pub bench: BenchmarkArgs,
    #[command(flatten)]
    pub metric_args: MetricArgs,
    #[command(flatten)]
    pub report: ReportArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CasesArgs {
    #[command(flatten)]
    pub bench: BenchmarkArgs,
    #[command(flatten)]
    pub metric_args: MetricArgs,
    #[command(flatten)]
    pub report: ReportArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subset {
    SSim,
    SDiv,
    /// Distance-matched pairs only, no similarity constraint.
    Base,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    DeltaS,
    DeltaD,
    DeltaM,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AttributionArgs {
    #[arg(long, value_enum)]
    pub subset: Subset,
    /// Closeness threshold; defaults to 0.05.
    #[arg(long)]
    pub eta1: Option<f64>,
    /// Separation threshold; defaults to 0.15 for s-sim and 0.10 for s-div.
    #[arg(long)]
    pub eta2: Option<f64>,
    /// Splits s-div by the smaller distance of each pair.
    #[arg(long, default_value_t = 0.35)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = Quantity::DeltaM)]
    pub quantity: Quantity,
    #[command(flatten)]
    pub bench: BenchmarkArgs,
    #[command(flatten)]
    pub metric_args: MetricArgs,
    #[command(flatten)]
    pub report: ReportArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TuneArgs {
    /// START:STOP:STEP, inclusive.
    #[arg(long, default_value = "0:0.5:0.01")]
    pub grid: String,
    #[arg(long, value_enum, default_value_t = Objective::Pearson)]
    pub objective: Objective,
    #[arg(long, default_value_t = 0.10)]
    pub dev_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to based when every instance has a reference.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[command(flatten)]
    pub bench: BenchmarkArgs,
    #[command(flatten)]
    pub metric_args: MetricArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtendArgs {
    #[arg(long, default_value_t = 0.20)]
    pub fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub bench: BenchmarkArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
