//! Turns flags into core objects.

use paraeval_core::io::load_benchmark;
use paraeval_core::similarity::{build_idf, IdfSource};
use paraeval_core::{
    Benchmark, BleuConfig, DivergenceShape, Error, Metric, MetricParams, ParaScoreConfig, Result,
    SentenceSimMode, SimilarityBackend, SimilarityBackendDescriptor, Smoothing, TokenScheme,
    Tokenizer,
};

use crate::args::{Ablation, BenchmarkArgs, IdfChoice, MetricArgs, Scheme};

pub fn load(args: &BenchmarkArgs) -> Result<Benchmark> {
    let tokenizer = match args.scheme {
        Some(Scheme::Whitespace) => Tokenizer::new(TokenScheme::Whitespace),
        Some(Scheme::Character) => Tokenizer::new(TokenScheme::Character),
        None => Tokenizer::for_language(&args.language),
    };
    load_benchmark(&args.benchmark, tokenizer, &args.language)
}

pub fn backend(args: &MetricArgs, benchmark: &Benchmark) -> Result<SimilarityBackend> {
    let mode: SentenceSimMode = args.sim_mode.parse()?;
    let descriptor = SimilarityBackendDescriptor::parse_provider(&args.backend)?.with_mode(mode);
    let backend = SimilarityBackend::from_descriptor(descriptor)?;
    Ok(match args.idf {
        IdfChoice::None => backend,
        IdfChoice::References => backend.with_idf(build_idf(benchmark, IdfSource::References)?),
        IdfChoice::Inputs => backend.with_idf(build_idf(benchmark, IdfSource::Inputs)?),
    })
}

pub fn params(args: &MetricArgs, benchmark: &Benchmark) -> Result<MetricParams> {
    let smoothing: Smoothing = args.smoothing.parse()?;
    let mut parascore = ParaScoreConfig {
        omega: args.omega,
        gamma: args.gamma,
        dist_scheme: benchmark.tokenizer().scheme,
        ..ParaScoreConfig::default()
    };
    match args.ablation {
        Ablation::None => {}
        Ablation::NoThresh => parascore.shape = DivergenceShape::Unthresholded,
        Ablation::NoMax => parascore.use_max = false,
        Ablation::NoDs => parascore.omega = 0.0,
    }
    parascore.validate()?;
    if !(0.0..=1.0).contains(&args.alpha) {
        return Err(Error::InvalidConfig(format!("alpha must be in [0, 1], got {}", args.alpha)));
    }
    if !(args.beta > 0.0 && args.beta.is_finite()) {
        return Err(Error::InvalidConfig(format!("beta must be positive, got {}", args.beta)));
    }
    Ok(MetricParams {
        bleu: BleuConfig::new(4, smoothing)?,
        alpha: args.alpha,
        beta: args.beta,
        parascore,
    })
}

/// Parses a metric list, or picks the roster usable on `benchmark`.
pub fn metrics(names: &[String], benchmark: &Benchmark) -> Result<Vec<Metric>> {
    if names.is_empty() {
        let with_refs = benchmark.has_references();
        return Ok(Metric::ALL
            .into_iter()
            .filter(|m| with_refs || !m.needs_reference())
            .collect());
    }
    names.iter().map(|n| n.trim().parse()).collect()
}
