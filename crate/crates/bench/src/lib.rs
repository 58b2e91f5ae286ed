//! Shared fixtures for the criterion benches.

use paraeval_core::synthetic::{generate, SyntheticConfig};
use paraeval_core::{Benchmark, SimilarityBackend, TokenScheme, TokenSequence};

/// A seeded synthetic benchmark of `inputs × 8` candidates.
pub fn synthetic(inputs: usize) -> Benchmark {
    let config = SyntheticConfig {
        inputs,
        seed: 1,
        ..SyntheticConfig::default()
    };
    generate(&config, &SimilarityBackend::fallback()).expect("valid synthetic config")
}

/// `len` tokens over a small vocabulary, stepping by `stride`.
pub fn sentence(len: usize, stride: usize) -> TokenSequence {
    let tokens: Vec<String> = (0..len).map(|i| format!("w{}", (i * stride) % 97)).collect();
    TokenSequence::new(tokens, TokenScheme::Whitespace)
}
