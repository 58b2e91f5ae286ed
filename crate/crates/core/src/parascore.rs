//! ParaScore: semantic similarity plus a thresholded lexical-divergence
//! bonus, in reference-based and reference-free form. Also BERT-iBLEU and its
//! split into `Sim + Mix`, and dev-set tuning of the divergence weight.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmark::Benchmark;
use crate::error::{Error, Result};
use crate::lexical::{ned, self_bleu, BleuConfig};
use crate::meta_eval::{correlation, CorrelationKind};
use crate::similarity::SimilarityBackend;
use crate::text::{TokenScheme, TokenSequence};

pub const DEFAULT_GAMMA: f64 = 0.35;
/// Used when ω has not been tuned on a dev set.
pub const DEFAULT_OMEGA: f64 = 0.05;
pub const DEFAULT_BETA: f64 = 4.0;

fn check_distance(d: f64, gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::Domain(d));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidConfig(format!("gamma must be positive, got {gamma}")));
    }
    Ok(())
}

/// `d * (gamma + 1) / gamma - 1`, arranged so both endpoints are exact:
/// `-1` at `d = 0` and `gamma` at `d = gamma`.
fn linear_branch(d: f64, gamma: f64) -> f64 {
    d + (d / gamma - 1.0)
}

/// Sectional divergence score: rises linearly from -1 at `d = 0` to `gamma`
/// at `d = gamma`, then stays flat.
pub fn ds(d: f64, gamma: f64) -> Result<f64> {
    check_distance(d, gamma)?;
    if d > gamma {
        Ok(gamma)
    } else {
        Ok(linear_branch(d, gamma))
    }
}

/// The linear branch of [`ds`] extended over all of `[0, 1]` (no plateau).
pub fn ds_unthresholded(d: f64, gamma: f64) -> Result<f64> {
    check_distance(d, gamma)?;
    Ok(linear_branch(d, gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceShape {
    Sectional,
    /// Ablation: drop the plateau above gamma.
    Unthresholded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParaScoreConfig {
    pub omega: f64,
    pub gamma: f64,
    /// Tokenization used for the edit distance inside DS.
    pub dist_scheme: TokenScheme,
    pub shape: DivergenceShape,
    /// Reference-based mode takes `max(Sim(X, C), Sim(R, C))`; when false
    /// (ablation) it uses `Sim(R, C)` alone.
    pub use_max: bool,
}

impl Default for ParaScoreConfig {
    fn default() -> Self {
        Self {
            omega: DEFAULT_OMEGA,
            gamma: DEFAULT_GAMMA,
            dist_scheme: TokenScheme::Whitespace,
            shape: DivergenceShape::Sectional,
            use_max: true,
        }
    }
}

impl ParaScoreConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "gamma must be in (0, 1], got {}",
                self.gamma
            )));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "omega must be finite and >= 0, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimSource {
    Input,
    Reference,
}

/// A ParaScore value with its parts: `total = sim_component + omega * ds_component`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositeScore {
    pub total: f64,
    pub sim_component: f64,
    pub ds_component: f64,
    pub omega: f64,
    pub which_sim: SimSource,
}

impl CompositeScore {
    fn compose(sim_component: f64, ds_component: f64, omega: f64, which_sim: SimSource) -> Self {
        Self {
            total: sim_component + omega * ds_component,
            sim_component,
            ds_component,
            omega,
            which_sim,
        }
    }
}

/// Reference-based or reference-free ParaScore.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParaScoreMode {
    Free,
    Based,
}

impl FromStr for ParaScoreMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(ParaScoreMode::Free),
            "based" => Ok(ParaScoreMode::Based),
            other => Err(Error::InvalidConfig(format!("unknown ParaScore mode {other:?}"))),
        }
    }
}

/// Scores candidates with a fixed backend and configuration.
#[derive(Debug, Clone)]
pub struct ParaScorer<'a> {
    backend: &'a SimilarityBackend,
    config: ParaScoreConfig,
}

impl<'a> ParaScorer<'a> {
    pub fn new(backend: &'a SimilarityBackend, config: ParaScoreConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { backend, config })
    }

    pub fn config(&self) -> &ParaScoreConfig {
        &self.config
    }

    /// DS of the candidate's normalized edit distance to the input.
    pub fn divergence(&self, input: &TokenSequence, candidate: &TokenSequence) -> Result<f64> {
        let scheme = self.config.dist_scheme;
        let d = ned(&input.retokenize(scheme), &candidate.retokenize(scheme))?;
        match self.config.shape {
            DivergenceShape::Sectional => ds(d, self.config.gamma),
            DivergenceShape::Unthresholded => ds_unthresholded(d, self.config.gamma),
        }
    }

    /// `max(Sim(X, C), Sim(R, C)) + omega * DS(X, C)`. Ties pick the input.
    pub fn score(
        &self,
        input: &TokenSequence,
        reference: Option<&TokenSequence>,
        candidate: &TokenSequence,
    ) -> Result<CompositeScore> {
        let reference = reference.ok_or(Error::MissingReference { index: 0 })?;
        let sim_reference = self.backend.sim(reference, candidate)?;
        let div = self.divergence(input, candidate)?;
        if !self.config.use_max {
            return Ok(CompositeScore::compose(sim_reference, div, self.config.omega, SimSource::Reference));
        }
        let sim_input = self.backend.sim(input, candidate)?;
        let (sim, source) = if sim_input >= sim_reference {
            (sim_input, SimSource::Input)
        } else {
            (sim_reference, SimSource::Reference)
        };
        Ok(CompositeScore::compose(sim, div, self.config.omega, source))
    }

    /// `Sim(X, C) + omega * DS(X, C)`.
    pub fn score_free(&self, input: &TokenSequence, candidate: &TokenSequence) -> Result<CompositeScore> {
        let sim = self.backend.sim(input, candidate)?;
        let div = self.divergence(input, candidate)?;
        Ok(CompositeScore::compose(sim, div, self.config.omega, SimSource::Input))
    }

    /// Scores every instance of `benchmark`, in instance order.
    pub fn score_benchmark(&self, benchmark: &Benchmark, mode: ParaScoreMode) -> Result<Vec<CompositeScore>> {
        let tokenizer = benchmark.tokenizer();
        benchmark
            .instances()
            .par_iter()
            .enumerate()
            .map(|(index, inst)| {
                let x = tokenizer.tokenize(&inst.input);
                let c = tokenizer.tokenize(&inst.candidate);
                match mode {
                    ParaScoreMode::Free => self.score_free(&x, &c),
                    ParaScoreMode::Based => {
                        let r = inst
                            .reference
                            .as_deref()
                            .ok_or(Error::MissingReference { index })?;
                        self.score(&x, Some(&tokenizer.tokenize(r)), &c)
                    }
                }
            })
            .collect()
    }
}

/// Weighted harmonic mean `(beta + 1) / (beta / sim + 1 / div)`; zero when
/// either part is zero.
pub fn bert_ibleu_closed_form(sim: f64, div: f64, beta: f64) -> f64 {
    if sim <= 0.0 || div <= 0.0 {
        return 0.0;
    }
    (beta + 1.0) / (beta / sim + 1.0 / div)
}

/// BERT-iBLEU of candidate `c` for input `x`, with `Div = 1 - SelfBLEU`.
pub fn bert_ibleu(
    input: &TokenSequence,
    candidate: &TokenSequence,
    beta: f64,
    backend: &SimilarityBackend,
    bleu_config: &BleuConfig,
) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidConfig(format!("beta must be positive, got {beta}")));
    }
    let sim = backend.sim(input, candidate)?;
    let div = 1.0 - self_bleu(candidate, input, bleu_config)?;
    Ok(bert_ibleu_closed_form(sim, div, beta))
}

/// What BERT-iBLEU adds on top of `sim`: `(sim * div - sim^2) / (beta * div + sim)`.
pub fn mix_term(sim: f64, div: f64, beta: f64) -> Result<f64> {
    let denominator = beta * div + sim;
    if denominator == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    Ok((sim * div - sim * sim) / denominator)
}

/// Inclusive arithmetic grid `start, start + step, ..., stop`.
pub fn omega_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "bad grid {start}:{stop}:{step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOutcome {
    pub omega: f64,
    pub objective_value: f64,
    /// Objective at every grid point, ascending in omega; `None` where the
    /// correlation is undefined.
    pub curve: Vec<(f64, Option<f64>)>,
}

/// Grid search for the omega maximizing the correlation between ParaScore and
/// human scores on `dev`. Ties go to the smaller omega.
pub fn tune_omega(
    dev: &Benchmark,
    backend: &SimilarityBackend,
    template: &ParaScoreConfig,
    grid: &[f64],
    objective: CorrelationKind,
    mode: ParaScoreMode,
) -> Result<TuneOutcome> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let human = dev.human_scores();
    if human.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::DegenerateHumanScores);
    }

    // omega only scales the divergence part, so components are computed once
    let parts = ParaScorer::new(backend, *template)?.score_benchmark(dev, mode)?;

    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);

    let curve: Vec<(f64, Option<f64>)> = sorted
        .par_iter()
        .map(|&omega| {
            template.with_omega(omega).validate()?;
            let totals: Vec<f64> = parts
                .iter()
                .map(|p| p.sim_component + omega * p.ds_component)
                .collect();
            match correlation(objective, &totals, &human) {
                Ok(r) => Ok((omega, Some(r))),
                Err(Error::ConstantInput) => Ok((omega, None)),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let mut best: Option<(f64, f64)> = None;
    for &(omega, value) in &curve {
        if let Some(v) = value {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((omega, v));
            }
        }
    }
    let (omega, objective_value) = best.ok_or(Error::ConstantInput)?;
    Ok(TuneOutcome {
        omega,
        objective_value,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::EvalInstance;
    use crate::text::{tokenize, Tokenizer};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ws(s: &str) -> TokenSequence {
        tokenize(s, TokenScheme::Whitespace)
    }

    #[test]
    fn ds_examples() {
        assert_eq!(ds(0.0, 0.35).unwrap(), -1.0);
        assert_eq!(ds(0.35, 0.35).unwrap(), 0.35);
        assert_eq!(ds(0.7, 0.35).unwrap(), 0.35);
        assert_abs_diff_eq!(ds(0.175, 0.35).unwrap(), -0.325, epsilon = 1e-12);
        assert!(matches!(ds(1.2, 0.35), Err(Error::Domain(_))));
        assert!(matches!(ds(-0.1, 0.35), Err(Error::Domain(_))));
        assert!(ds(0.5, 0.0).is_err());
    }

    #[test]
    fn unthresholded_keeps_rising() {
        assert_eq!(ds_unthresholded(0.0, 0.35).unwrap(), -1.0);
        assert!(ds_unthresholded(0.7, 0.35).unwrap() > ds_unthresholded(0.35, 0.35).unwrap());
    }

    #[test]
    fn ds_monotone_on_grid() {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let v = ds(i as f64 / 1000.0, 0.35).unwrap();
            assert!(v >= prev);
            assert!((-1.0..=0.35).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn copy_is_penalized_by_omega() {
        let backend = SimilarityBackend::fallback();
        let scorer = ParaScorer::new(&backend, ParaScoreConfig::default()).unwrap();
        let x = ws("the weather is lovely today");
        let r = ws("it is a beautiful day");
        let s = scorer.score(&x, Some(&r), &x).unwrap();
        assert_eq!(s.which_sim, SimSource::Input);
        assert_abs_diff_eq!(s.total, 1.0 - 0.05, epsilon = 1e-12);
        let free = scorer.score_free(&x, &x).unwrap();
        assert_abs_diff_eq!(free.total, 0.95, epsilon = 1e-12);
        assert!(matches!(scorer.score(&x, None, &x), Err(Error::MissingReference { .. })));
    }

    #[test]
    fn without_max_uses_reference_only() {
        let backend = SimilarityBackend::fallback();
        let cfg = ParaScoreConfig {
            use_max: false,
            ..ParaScoreConfig::default()
        };
        let scorer = ParaScorer::new(&backend, cfg).unwrap();
        let x = ws("the weather is lovely today");
        let r = ws("it is a beautiful day");
        let s = scorer.score(&x, Some(&r), &x).unwrap();
        assert_eq!(s.which_sim, SimSource::Reference);
        assert_eq!(s.sim_component, backend.sim(&r, &x).unwrap());
        assert_eq!(s.ds_component, -1.0);
    }

    #[test]
    fn omega_zero_is_bare_sim() {
        let backend = SimilarityBackend::fallback();
        let cfg = ParaScoreConfig::default().with_omega(0.0);
        let scorer = ParaScorer::new(&backend, cfg).unwrap();
        let x = ws("a b c d e f");
        let c = ws("a c b x y f");
        let s = scorer.score_free(&x, &c).unwrap();
        assert_eq!(s.total, backend.sim(&x, &c).unwrap());
        assert!(s.ds_component > -1.0);
    }

    #[test]
    fn composite_arithmetic() {
        // sim(X,C) = 0.8, sim(R,C) = 0.9, ned = 0.5, omega = 0.05, gamma = 0.35
        let ds_part = ds(0.5, 0.35).unwrap();
        let s = CompositeScore::compose(0.8f64.max(0.9), ds_part, 0.05, SimSource::Reference);
        assert_abs_diff_eq!(s.total, 0.9175, epsilon = 1e-12);
        // plateau minus copy: omega * (1 + gamma)
        let omega = 0.2;
        let high = CompositeScore::compose(0.6, ds(0.9, 0.35).unwrap(), omega, SimSource::Input);
        let copy = CompositeScore::compose(0.6, ds(0.0, 0.35).unwrap(), omega, SimSource::Input);
        assert_abs_diff_eq!(copy.total, 0.6 - omega, epsilon = 1e-12);
        assert_abs_diff_eq!(high.total, 0.6 + omega * 0.35, epsilon = 1e-12);
        assert_abs_diff_eq!(high.total - copy.total, omega * 1.35, epsilon = 1e-12);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ParaScoreConfig::default();
        cfg.gamma = 0.0;
        assert!(cfg.validate().is_err());
        let cfg = ParaScoreConfig::default().with_omega(-0.1);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn bert_ibleu_examples() {
        assert_eq!(bert_ibleu_closed_form(1.0, 1.0, 4.0), 1.0);
        assert_abs_diff_eq!(bert_ibleu_closed_form(0.8, 0.5, 4.0), 5.0 / 7.0, epsilon = 1e-15);
        assert_eq!(bert_ibleu_closed_form(0.8, 0.0, 4.0), 0.0);

        let backend = SimilarityBackend::fallback();
        let x = ws("a b c d e");
        let copy = bert_ibleu(&x, &x, 4.0, &backend, &BleuConfig::default()).unwrap();
        assert_eq!(copy, 0.0);
        assert!(bert_ibleu(&x, &x, 0.0, &backend, &BleuConfig::default()).is_err());
    }

    #[test]
    fn mix_term_examples() {
        assert_abs_diff_eq!(mix_term(0.8, 0.5, 4.0).unwrap(), -0.24 / 2.8, epsilon = 1e-15);
        assert_eq!(mix_term(0.6, 0.6, 4.0).unwrap(), 0.0);
        assert!(matches!(mix_term(0.0, 0.0, 4.0), Err(Error::DegenerateDenominator)));
    }

    #[test]
    fn grid_is_inclusive() {
        let g = omega_grid(0.0, 0.5, 0.01).unwrap();
        assert_eq!(g.len(), 51);
        assert_abs_diff_eq!(*g.last().unwrap(), 0.5, epsilon = 1e-12);
        assert!(omega_grid(0.0, 0.5, 0.0).is_err());
        assert!(omega_grid(0.5, 0.0, 0.1).is_err());
    }

    fn tiny_dev(scores: &[f64]) -> Benchmark {
        let cands = ["a b c d", "a b x d", "d c b a", "q r s t", "a q c t"];
        let instances = scores
            .iter()
            .zip(cands.iter().cycle())
            .enumerate()
            .map(|(i, (&h, c))| {
                EvalInstance::new(format!("a b c d {}", i / 5), None, format!("{c} {}", i % 3), h).unwrap()
            })
            .collect();
        Benchmark::new("dev", "en", Tokenizer::default(), instances).unwrap()
    }

    #[test]
    fn tune_errors() {
        let backend = SimilarityBackend::fallback();
        let dev = tiny_dev(&[0.5; 10]);
        let cfg = ParaScoreConfig::default();
        assert!(matches!(
            tune_omega(&dev, &backend, &cfg, &[], CorrelationKind::Pearson, ParaScoreMode::Free),
            Err(Error::EmptyGrid)
        ));
        assert!(matches!(
            tune_omega(&dev, &backend, &cfg, &[0.1], CorrelationKind::Pearson, ParaScoreMode::Free),
            Err(Error::DegenerateHumanScores)
        ));
    }

    #[test]
    fn singleton_grid_returns_its_point() {
        let backend = SimilarityBackend::fallback();
        let dev = tiny_dev(&[0.1, 0.9, 0.3, 0.5, 0.7, 0.2, 0.8, 0.4, 0.6, 0.0]);
        let out = tune_omega(
            &dev,
            &backend,
            &ParaScoreConfig::default(),
            &[0.05],
            CorrelationKind::Spearman,
            ParaScoreMode::Free,
        )
        .unwrap();
        assert_eq!(out.omega, 0.05);
        assert_eq!(out.curve.len(), 1);
    }

    proptest! {
        #[test]
        fn ds_continuity_gap(gamma in 0.01f64..1.0, frac in 0.0001f64..1.0) {
            let eps = gamma * frac;
            let gap = (ds(gamma - eps, gamma).unwrap() - ds(gamma, gamma).unwrap()).abs();
            prop_assert!(gap <= eps * (gamma + 1.0) / gamma + 1e-12);
        }

        #[test]
        fn mix_identity(sim in 0.01f64..=1.0, div in 0.01f64..=1.0, beta in 0.5f64..12.0) {
            let lhs = sim + mix_term(sim, div, beta).unwrap();
            prop_assert!((lhs - bert_ibleu_closed_form(sim, div, beta)).abs() < 1e-9);
        }
    }
}
