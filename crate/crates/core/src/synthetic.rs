//! Seeded synthetic benchmarks whose human scores are a known function of
//! similarity and divergence, for direction-level checks without annotations.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmark::{Benchmark, EvalInstance};
use crate::error::{Error, Result};
use crate::lexical::ned;
use crate::parascore::{ds, DEFAULT_GAMMA};
use crate::similarity::SimilarityBackend;
use crate::text::Tokenizer;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub inputs: usize,
    pub candidates_per_input: usize,
    pub vocab_size: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub sim_weight: f64,
    pub ds_weight: f64,
    /// Half-width of the uniform noise added to each human score.
    pub noise: f64,
    pub gamma: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            inputs: 500,
            candidates_per_input: 8,
            vocab_size: 2000,
            min_len: 8,
            max_len: 16,
            sim_weight: 0.9,
            ds_weight: 0.1,
            noise: 0.05,
            gamma: DEFAULT_GAMMA,
            seed: 17,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.inputs > 0
            && self.candidates_per_input > 0
            && self.vocab_size >= 2
            && self.min_len >= 2
            && self.min_len <= self.max_len
            && self.noise >= 0.0;
        if !ok {
            return Err(Error::InvalidConfig(format!("bad synthetic config {self:?}")));
        }
        Ok(())
    }
}

fn word(rng: &mut ChaCha8Rng, vocab: usize) -> String {
    format!("w{}", rng.gen_range(0..vocab))
}

/// Applies `edits` random substitutions, adjacent swaps, deletions and
/// insertions. Never returns an empty sentence.
fn perturb(tokens: &[String], edits: usize, rng: &mut ChaCha8Rng, vocab: usize) -> Vec<String> {
    let mut out = tokens.to_vec();
    for _ in 0..edits {
        let pos = rng.gen_range(0..out.len());
        match rng.gen_range(0..4) {
            0 => out[pos] = word(rng, vocab),
            1 if out.len() > 1 => {
                let other = if pos + 1 < out.len() { pos + 1 } else { pos - 1 };
                out.swap(pos, other);
            }
            2 if out.len() > 2 => {
                out.remove(pos);
            }
            _ => out.insert(pos, word(rng, vocab)),
        }
    }
    out
}

/// Builds `inputs × candidates_per_input` instances. Candidates spread from
/// light to heavy rewrites; each gets
/// `h = clamp(sim_weight * Sim(X, C) + ds_weight * DS(X, C) + noise)`.
pub fn generate(config: &SyntheticConfig, backend: &SimilarityBackend) -> Result<Benchmark> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut drafts = Vec::with_capacity(config.inputs * config.candidates_per_input);
    let mut seen_inputs = HashSet::new();

    while seen_inputs.len() < config.inputs {
        let len = rng.gen_range(config.min_len..=config.max_len);
        let x: Vec<String> = (0..len).map(|_| word(&mut rng, config.vocab_size)).collect();
        let x_text = x.join(" ");
        if !seen_inputs.insert(x_text.clone()) {
            continue;
        }
        let r_text = perturb(&x, len / 3 + 1, &mut rng, config.vocab_size).join(" ");
        let mut seen = HashSet::from([x_text.clone()]);
        let mut made = 0;
        while made < config.candidates_per_input {
            // rewrite intensity sweeps from light to a near-full rewrite
            let max_edits = 1 + made * len / config.candidates_per_input;
            let edits = rng.gen_range(1..=max_edits);
            let c_text = perturb(&x, edits, &mut rng, config.vocab_size).join(" ");
            if seen.insert(c_text.clone()) {
                let noise = rng.gen_range(-config.noise..=config.noise);
                drafts.push((x_text.clone(), r_text.clone(), c_text, noise));
                made += 1;
            }
        }
    }

    let tokenizer = Tokenizer::default();
    let instances = drafts
        .into_par_iter()
        .map(|(x, r, c, noise)| {
            let (xs, cs) = (tokenizer.tokenize(&x), tokenizer.tokenize(&c));
            let sim = backend.sim(&xs, &cs)?;
            let div = ds(ned(&xs, &cs)?, config.gamma)?;
            let h = (config.sim_weight * sim + config.ds_weight * div + noise).clamp(0.0, 1.0);
            EvalInstance::new(x, Some(r), c, h)
        })
        .collect::<Result<Vec<_>>>()?;
    Benchmark::new(
        format!("synthetic-{}", config.seed),
        "en",
        tokenizer,
        instances,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SyntheticConfig {
        SyntheticConfig {
            inputs: 20,
            candidates_per_input: 5,
            ..SyntheticConfig::default()
        }
    }

    #[test]
    fn shape_and_determinism() {
        let backend = SimilarityBackend::fallback();
        let a = generate(&small(), &backend).unwrap();
        assert_eq!(a.groups().len(), 20);
        assert_eq!(a.len(), 100);
        assert!(a.has_references());
        assert!(a.instances().iter().all(|i| i.candidate != i.input));
        let b = generate(&small(), &backend).unwrap();
        assert_eq!(a.instances(), b.instances());
        let c = generate(&SyntheticConfig { seed: 99, ..small() }, &backend).unwrap();
        assert_ne!(a.instances(), c.instances());
    }

    #[test]
    fn candidates_unique_per_group() {
        let b = generate(&small(), &SimilarityBackend::fallback()).unwrap();
        for g in b.groups() {
            let set: HashSet<&str> = g.indices.iter().map(|&i| b.instances()[i].candidate.as_str()).collect();
            assert_eq!(set.len(), g.indices.len());
        }
    }

    #[test]
    fn rejects_bad_config() {
        let bad = SyntheticConfig { min_len: 9, max_len: 3, ..small() };
        assert!(generate(&bad, &SimilarityBackend::fallback()).is_err());
    }
}
