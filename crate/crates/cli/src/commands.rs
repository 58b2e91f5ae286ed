use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use paraeval_core::io::{extend_benchmark, split_dev_test, write_benchmark};
use paraeval_core::meta_eval::{
    build_pairs, build_s_div, build_s_sim, case_partition, correlation, delta_free_vs_based,
    pair_delta_correlation, quartile_groups, split_s_div, AttributionPair, DeltaQuantity,
    PairCriterion, S_DIV_ETA, S_SIM_ETA,
};
use paraeval_core::parascore::{omega_grid, tune_omega};
use paraeval_core::scoring::{distance_vector, input_similarity_vector, score_benchmark};
use paraeval_core::{
    Benchmark, CorrelationKind, CorrelationReport, DistKey, Error, Metric, MetricParams,
    ParaScoreMode, ParaScorer, ReportDocument, ReportFormat, ReportRow, Result, ScoreVector,
    SimilarityBackend, SplitConfig,
};

use crate::args::*;
use crate::context;
use crate::manifest::{digest, RunManifest};

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn finish<C: Serialize>(
    command: &str,
    config: &C,
    threads: usize,
    seed: Option<u64>,
    bench: &BenchmarkArgs,
    output: &OutputArgs,
) -> Result<()> {
    RunManifest {
        command: command.into(),
        version: paraeval_core::VERSION,
        config,
        threads,
        seed,
        inputs: vec![digest(&bench.benchmark)?],
        outputs: output.out.iter().cloned().collect(),
    }
    .emit(output)?;
    Ok(())
}

/// Correlation that is undefined on this segment yields `None`.
fn segment_correlation(kind: CorrelationKind, a: &[f64], b: &[f64]) -> Result<Option<f64>> {
    match correlation(kind, a, b) {
        Ok(r) => Ok(Some(r)),
        Err(Error::ConstantInput | Error::TooFewSamples { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn wanted(choice: Correlations) -> (bool, bool) {
    match choice {
        Correlations::Pearson => (true, false),
        Correlations::Spearman => (false, true),
        Correlations::Both => (true, true),
    }
}

fn report_format(format: Format) -> ReportFormat {
    match format {
        Format::Csv => ReportFormat::Csv,
        Format::Markdown => ReportFormat::Markdown,
        Format::Jsonl => ReportFormat::JsonLines,
    }
}

fn segment_row(
    metric_id: &str,
    segment: &str,
    scores: &[f64],
    human: &[f64],
    choice: Correlations,
) -> Result<ReportRow> {
    let (p, s) = wanted(choice);
    Ok(ReportRow {
        metric_id: metric_id.into(),
        segment: segment.into(),
        pearson: if p { segment_correlation(CorrelationKind::Pearson, scores, human)? } else { None },
        spearman: if s { segment_correlation(CorrelationKind::Spearman, scores, human)? } else { None },
        n: scores.len(),
    })
}

struct Setup {
    bench: Benchmark,
    backend: SimilarityBackend,
    params: MetricParams,
}

fn setup(bench: &BenchmarkArgs, metric: &MetricArgs) -> Result<Setup> {
    let b = context::load(bench)?;
    let params = context::params(metric, &b)?;
    let backend = context::backend(metric, &b)?;
    Ok(Setup { bench: b, backend, params })
}

fn score_all(s: &Setup, metrics: &[Metric]) -> Result<Vec<ScoreVector>> {
    metrics
        .iter()
        .map(|&m| score_benchmark(&s.bench, m, &s.backend, &s.params))
        .collect()
}

pub fn score(a: &ScoreArgs, threads: usize) -> Result<()> {
    let s = setup(&a.bench, &a.metric_args)?;
    let metric: Metric = a.metric.parse()?;
    let mut text = String::new();
    match metric {
        Metric::ParaScore | Metric::ParaScoreFree => {
            let mode = if metric == Metric::ParaScore { ParaScoreMode::Based } else { ParaScoreMode::Free };
            let scores = ParaScorer::new(&s.backend, s.params.parascore)?.score_benchmark(&s.bench, mode)?;
            let _ = writeln!(text, "index,{metric},sim_component,ds_component,which_sim");
            for (i, c) in scores.iter().enumerate() {
                let source = serde_json::to_value(c.which_sim).map_err(std::io::Error::from)?;
                let _ = writeln!(
                    text,
                    "{i},{},{},{},{}",
                    c.total,
                    c.sim_component,
                    c.ds_component,
                    source.as_str().unwrap_or_default()
                );
            }
        }
        _ => {
            let scores = score_benchmark(&s.bench, metric, &s.backend, &s.params)?;
            let _ = writeln!(text, "index,{metric}");
            for (i, v) in scores.values().iter().enumerate() {
                let _ = writeln!(text, "{i},{v}");
            }
        }
    }
    write_output(&a.output.out, &text)?;
    finish("score", a, threads, None, &a.bench, &a.output)
}

pub fn evaluate(a: &EvaluateArgs, threads: usize) -> Result<()> {
    let s = setup(&a.bench, &a.metric_args)?;
    let metrics = context::metrics(&a.report.metrics, &s.bench)?;
    let human = s.bench.human_scores();
    let (p, sp) = wanted(a.report.correlations);
    let mut doc = ReportDocument::new(report_format(a.report.format));
    for sv in score_all(&s, &metrics)? {
        // whole-benchmark correlations must exist; degenerate data is an error
        doc.push(ReportRow {
            metric_id: sv.metric_id().into(),
            segment: "all".into(),
            pearson: if p { Some(correlation(CorrelationKind::Pearson, sv.values(), &human)?) } else { None },
            spearman: if sp { Some(correlation(CorrelationKind::Spearman, sv.values(), &human)?) } else { None },
            n: sv.len(),
        });
    }
    write_output(&a.output.out, &doc.render()?)?;
    finish("evaluate", a, threads, None, &a.bench, &a.output)
}

pub fn distance_groups(a: &DistanceGroupsArgs, threads: usize) -> Result<()> {
    let s = setup(&a.bench, &a.metric_args)?;
    let metrics = context::metrics(&a.report.metrics, &s.bench)?;
    let key = match a.dist_key {
        DistKeyArg::ToReference => DistKey::ToReference,
        DistKeyArg::ToInput => DistKey::ToInput,
    };
    let dist = distance_vector(&s.bench, key)?;
    let groups = quartile_groups(&s.bench, &dist, key)?;
    let human = ScoreVector::new("human", s.bench.human_scores())?;
    let mut doc = ReportDocument::new(report_format(a.report.format));
    for sv in score_all(&s, &metrics)? {
        for g in &groups {
            let segment = format!("group{} [{:.4}, {:.4}]", g.group_index, g.min_dist, g.max_dist);
            let row = segment_row(
                sv.metric_id(),
                &segment,
                &sv.gather(&g.instance_indices),
                &human.gather(&g.instance_indices),
                a.report.correlations,
            )?;
            doc.push(row);
        }
    }
    write_output(&a.output.out, &doc.render()?)?;
    finish("analyze distance-groups", a, threads, None, &a.bench, &a.output)
}

pub fn cases(a: &CasesArgs, threads: usize) -> Result<()> {
    let s = setup(&a.bench, &a.metric_args)?;
    let metrics = context::metrics(&a.report.metrics, &s.bench)?;
    let dist_cr = distance_vector(&s.bench, DistKey::ToReference)?;
    let dist_xc = distance_vector(&s.bench, DistKey::ToInput)?;
    let partition = case_partition(&s.bench, &dist_cr, &dist_xc)?;
    let human = ScoreVector::new("human", s.bench.human_scores())?;
    let scores = score_all(&s, &metrics)?;
    let (want_p, want_s) = wanted(a.report.correlations);

    let mut doc = ReportDocument::new(report_format(a.report.format));
    let segments = [
        ("case1", &partition.case1_indices),
        ("case2", &partition.case2_indices),
    ];
    for (segment, indices) in segments {
        let h = human.gather(indices);
        let mut full: Vec<(Metric, Option<CorrelationReport>)> = Vec::new();
        for (&m, sv) in metrics.iter().zip(&scores) {
            let values = sv.gather(indices);
            let pearson = segment_correlation(CorrelationKind::Pearson, &values, &h)?;
            let spearman = segment_correlation(CorrelationKind::Spearman, &values, &h)?;
            doc.push(ReportRow {
                metric_id: sv.metric_id().into(),
                segment: segment.into(),
                pearson: pearson.filter(|_| want_p),
                spearman: spearman.filter(|_| want_s),
                n: values.len(),
            });
            let report = match (pearson, spearman) {
                (Some(pearson), Some(spearman)) => Some(CorrelationReport {
                    metric_id: sv.metric_id().into(),
                    pearson,
                    spearman,
                    n: values.len(),
                }),
                _ => None,
            };
            full.push((m, report));
        }

        // average free-minus-based gap over metric families present in the list
        let (mut free, mut based) = (Vec::new(), Vec::new());
        for (m, report) in &full {
            let Some(free_metric) = m.free_variant() else { continue };
            let partner = full.iter().find(|(f, _)| *f == free_metric);
            if let (Some(b), Some((_, Some(f)))) = (report, partner) {
                based.push(b.clone());
                free.push(f.clone());
            }
        }
        if !free.is_empty() {
            doc.push(ReportRow {
                metric_id: "delta(free-based)".into(),
                segment: segment.into(),
                pearson: if want_p { Some(delta_free_vs_based(&free, &based, CorrelationKind::Pearson)?) } else { None },
                spearman: if want_s { Some(delta_free_vs_based(&free, &based, CorrelationKind::Spearman)?) } else { None },
                n: free.len(),
            });
        }
    }
    write_output(&a.output.out, &doc.render()?)?;
    finish("analyze cases", a, threads, None, &a.bench, &a.output)
}

fn pair_rows(
    doc: &mut ReportDocument,
    segment: &str,
    pairs: &[AttributionPair],
    quantities: &[DeltaQuantity<'_>],
    choice: Correlations,
) -> Result<()> {
    let (want_p, want_s) = wanted(choice);
    for q in quantities {
        let row = match pair_delta_correlation(pairs, *q) {
            Ok(r) => ReportRow {
                metric_id: r.metric_id,
                segment: segment.into(),
                pearson: Some(r.pearson).filter(|_| want_p),
                spearman: Some(r.spearman).filter(|_| want_s),
                n: r.n,
            },
            Err(Error::TooFewPairs { .. } | Error::ConstantInput) => {
                let label = match q {
                    DeltaQuantity::Sim => "delta_s".to_string(),
                    DeltaQuantity::Dist => "delta_d".to_string(),
                    DeltaQuantity::Metric(m) => format!("delta_m:{}", m.metric_id()),
                };
                ReportRow {
                    metric_id: label,
                    segment: segment.into(),
                    pearson: None,
                    spearman: None,
                    n: pairs.len(),
                }
            }
            Err(e) => return Err(e),
        };
        doc.push(row);
    }
    Ok(())
}

pub fn attribution(a: &AttributionArgs, threads: usize) -> Result<()> {
    let s = setup(&a.bench, &a.metric_args)?;
    let dist = distance_vector(&s.bench, DistKey::ToInput)?;
    let sim = input_similarity_vector(&s.bench, &s.backend)?;
    let metric_scores = match a.quantity {
        Quantity::DeltaM => score_all(&s, &context::metrics(&a.report.metrics, &s.bench)?)?,
        _ => Vec::new(),
    };
    let quantities: Vec<DeltaQuantity<'_>> = match a.quantity {
        Quantity::DeltaS => vec![DeltaQuantity::Sim],
        Quantity::DeltaD => vec![DeltaQuantity::Dist],
        Quantity::DeltaM => metric_scores.iter().map(DeltaQuantity::Metric).collect(),
    };

    let mut doc = ReportDocument::new(report_format(a.report.format));
    let choice = a.report.correlations;
    match a.subset {
        Subset::SSim => {
            let (eta1, eta2) = (a.eta1.unwrap_or(S_SIM_ETA.0), a.eta2.unwrap_or(S_SIM_ETA.1));
            let pairs = build_s_sim(&s.bench, &dist, &sim, eta1, eta2)?;
            pair_rows(&mut doc, "s-sim", &pairs, &quantities, choice)?;
        }
        Subset::SDiv => {
            let (eta1, eta2) = (a.eta1.unwrap_or(S_DIV_ETA.0), a.eta2.unwrap_or(S_DIV_ETA.1));
            let pairs = build_s_div(&s.bench, &dist, &sim, eta1, eta2)?;
            let (near, far) = split_s_div(&pairs, a.threshold);
            pair_rows(&mut doc, "s-div", &pairs, &quantities, choice)?;
            pair_rows(&mut doc, "s-div1", &near, &quantities, choice)?;
            pair_rows(&mut doc, "s-div2", &far, &quantities, choice)?;
        }
        Subset::Base => {
            let eta1 = a.eta1.unwrap_or(S_SIM_ETA.0);
            let pairs = build_pairs(&s.bench, &dist, &sim, PairCriterion::DistanceMatched, eta1, 0.0)?;
            pair_rows(&mut doc, "base", &pairs, &quantities, choice)?;
        }
    }
    write_output(&a.output.out, &doc.render()?)?;
    finish("analyze attribution", a, threads, None, &a.bench, &a.output)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidConfig(format!("grid must be START:STOP:STEP, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    omega_grid(nums[0], nums[1], nums[2])
}

#[derive(Serialize)]
struct TestCorrelation {
    pearson: Option<f64>,
    spearman: Option<f64>,
    n: usize,
}

#[derive(Serialize)]
struct TuneReport {
    mode: &'static str,
    objective: &'static str,
    omega: f64,
    dev_objective: f64,
    dev_groups: usize,
    test_groups: usize,
    test: TestCorrelation,
    curve: Vec<(f64, Option<f64>)>,
}

pub fn tune(a: &TuneArgs, threads: usize) -> Result<()> {
    let s = setup(&a.bench, &a.metric_args)?;
    let grid = parse_grid(&a.grid)?;
    let split = SplitConfig::new(a.dev_fraction, a.seed)?;
    let (dev, test) = split_dev_test(&s.bench, &split)?;
    let mode = match a.mode {
        Some(Mode::Free) => ParaScoreMode::Free,
        Some(Mode::Based) => ParaScoreMode::Based,
        None if s.bench.has_references() => ParaScoreMode::Based,
        None => ParaScoreMode::Free,
    };
    let objective = match a.objective {
        Objective::Pearson => CorrelationKind::Pearson,
        Objective::Spearman => CorrelationKind::Spearman,
    };
    let outcome = tune_omega(&dev, &s.backend, &s.params.parascore, &grid, objective, mode)?;

    let tuned = ParaScorer::new(&s.backend, s.params.parascore.with_omega(outcome.omega))?;
    let totals: Vec<f64> = tuned.score_benchmark(&test, mode)?.iter().map(|c| c.total).collect();
    let human = test.human_scores();
    let report = TuneReport {
        mode: if mode == ParaScoreMode::Based { "based" } else { "free" },
        objective: if objective == CorrelationKind::Pearson { "pearson" } else { "spearman" },
        omega: outcome.omega,
        dev_objective: outcome.objective_value,
        dev_groups: dev.groups().len(),
        test_groups: test.groups().len(),
        test: TestCorrelation {
            pearson: segment_correlation(CorrelationKind::Pearson, &totals, &human)?,
            spearman: segment_correlation(CorrelationKind::Spearman, &totals, &human)?,
            n: totals.len(),
        },
        curve: outcome.curve,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(std::io::Error::from)?;
    text.push('\n');
    write_output(&a.output.out, &text)?;
    finish("tune", a, threads, Some(a.seed), &a.bench, &a.output)
}

pub fn extend(a: &ExtendArgs, threads: usize) -> Result<()> {
    let bench = context::load(&a.bench)?;
    let extended = extend_benchmark(&bench, a.fraction, a.seed)?;
    let mut bytes = Vec::new();
    write_benchmark(&extended, &mut bytes)?;
    write_output(&a.output.out, &String::from_utf8(bytes).expect("JSON is UTF-8"))?;
    finish("extend", a, threads, Some(a.seed), &a.bench, &a.output)
}
