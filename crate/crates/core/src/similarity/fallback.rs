use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EmbeddingProvider, TokenEmbeddings};
use crate::error::Result;
use crate::text::TokenSequence;

const DEFAULT_DIM: usize = 64;
const DEFAULT_SEED: u64 = 0x7061_7261_6576_616c;

/// Context-free provider: every token maps to a pseudo-random unit vector
/// seeded by a hash of its string. Needs no model and no network.
#[derive(Debug, Clone)]
pub struct FallbackProvider {
    dim: usize,
    seed: u64,
}

impl FallbackProvider {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        Self { dim, seed }
    }

    fn token_vector(&self, token: &str) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(token.as_bytes()) ^ self.seed);
        (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }
}

impl Default for FallbackProvider {
    fn default() -> Self {
        Self::new(DEFAULT_DIM, DEFAULT_SEED)
    }
}

// FNV-1a, 64 bit. Stable across platforms and toolchains, unlike std's hasher.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |hash, &b| {
        (hash ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

impl EmbeddingProvider for FallbackProvider {
    fn embed(&self, seq: &TokenSequence) -> Result<TokenEmbeddings> {
        let rows = seq.tokens().iter().map(|t| self.token_vector(t)).collect();
        TokenEmbeddings::from_rows(seq.tokens().to_vec(), self.dim, rows)
    }

    fn dim(&self) -> usize {
        self.dim
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{tokenize, TokenScheme};
    use proptest::prelude::*;

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a(b"a"), 0xaf63_dc4c_8601_ec8c);
    }

    #[test]
    fn deterministic_and_unit_norm() {
        let p = FallbackProvider::default();
        let s = tokenize("a b c", TokenScheme::Whitespace);
        let first = p.embed(&s).unwrap();
        let second = p.embed(&s).unwrap();
        assert_eq!(first, second);
        assert_eq!(first.len(), 3);
        assert_eq!(first.dim(), 64);
        for row in first.rows() {
            let norm: f64 = row.iter().map(|v| v * v).sum();
            assert!((norm - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn same_token_same_row() {
        let p = FallbackProvider::default();
        let e = p.embed(&tokenize("x y x", TokenScheme::Whitespace)).unwrap();
        assert_eq!(e.row(0), e.row(2));
        assert_ne!(e.row(0), e.row(1));
    }

    proptest! {
        #[test]
        fn row_count_matches_tokens(text in "[a-z ]{0,60}") {
            let seq = tokenize(&text, TokenScheme::Whitespace);
            let e = FallbackProvider::default().embed(&seq).unwrap();
            prop_assert_eq!(e.len(), seq.len());
        }
    }
}
