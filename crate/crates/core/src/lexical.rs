//! Surface-overlap metrics: sentence BLEU, SelfBLEU, iBLEU, ROUGE-1/2/L,
//! Levenshtein distance and normalized edit distance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{ngrams, TokenSequence};

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRecallF1 {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrecisionRecallF1 {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let sum = precision + recall;
        let f1 = if sum == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / sum
        };
        Self {
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Smoothing {
    None,
    /// Adds `k` to the matched and total count of every n-gram order.
    AddK { k: f64 },
}

impl fmt::Display for Smoothing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothing::None => f.write_str("none"),
            Smoothing::AddK { k } => write!(f, "add-k:{k}"),
        }
    }
}

impl FromStr for Smoothing {
    type Err = Error;

    /// Accepts `none`, `add-k` (k = 1) and `add-k:K`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Smoothing::None),
            "add-k" | "add_k" => Ok(Smoothing::AddK { k: 1.0 }),
            other => {
                let k = other
                    .strip_prefix("add-k:")
                    .or_else(|| other.strip_prefix("add_k:"))
                    .and_then(|k| k.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown smoothing {other:?}")))?;
                Ok(Smoothing::AddK { k })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BleuConfig {
    pub max_n: usize,
    pub smoothing: Smoothing,
}

impl BleuConfig {
    pub fn new(max_n: usize, smoothing: Smoothing) -> Result<Self> {
        let config = Self { max_n, smoothing };
        config.validate()?;
        Ok(config)
    }

    pub fn unsmoothed(max_n: usize) -> Self {
        Self {
            max_n,
            smoothing: Smoothing::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.max_n) {
            return Err(Error::InvalidConfig(format!(
                "BLEU max_n must be in 1..=8, got {}",
                self.max_n
            )));
        }
        if let Smoothing::AddK { k } = self.smoothing {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "add-k smoothing needs k > 0, got {k}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for BleuConfig {
    fn default() -> Self {
        Self {
            max_n: 4,
            smoothing: Smoothing::AddK { k: 1.0 },
        }
    }
}

/// Clipped n-gram matches and total candidate n-grams.
fn clipped_overlap(candidate: &TokenSequence, target: &TokenSequence, n: usize) -> (usize, usize) {
    let cand = ngrams(candidate, n);
    let targ = ngrams(target, n);
    let matched = cand
        .iter()
        .map(|(gram, &count)| count.min(targ.get(gram).copied().unwrap_or(0)))
        .sum();
    let total = candidate.len().saturating_sub(n - 1);
    (matched, total)
}

fn non_empty(seqs: [&TokenSequence; 2]) -> Result<()> {
    if seqs.iter().any(|s| s.is_empty()) {
        Err(Error::EmptySequence)
    } else {
        Ok(())
    }
}

/// Sentence-level BLEU of `candidate` against a single `target`: geometric
/// mean of clipped n-gram precisions up to `max_n`, times the brevity penalty.
pub fn bleu(candidate: &TokenSequence, target: &TokenSequence, config: &BleuConfig) -> Result<f64> {
    config.validate()?;
    non_empty([candidate, target])?;

    let mut log_sum = 0.0;
    for n in 1..=config.max_n {
        let (matched, total) = clipped_overlap(candidate, target, n);
        let precision = match config.smoothing {
            Smoothing::None if total == 0 => 0.0,
            Smoothing::None => matched as f64 / total as f64,
            Smoothing::AddK { k } => (matched as f64 + k) / (total as f64 + k),
        };
        if precision == 0.0 {
            return Ok(0.0);
        }
        log_sum += precision.ln();
    }

    let c = candidate.len() as f64;
    let r = target.len() as f64;
    let brevity = if c >= r { 1.0 } else { (1.0 - r / c).exp() };
    Ok((brevity * (log_sum / config.max_n as f64).exp()).min(1.0))
}

/// BLEU of the candidate against the input; high values indicate copying.
pub fn self_bleu(candidate: &TokenSequence, input: &TokenSequence, config: &BleuConfig) -> Result<f64> {
    bleu(candidate, input, config)
}

/// `BLEU(C, R) - alpha * SelfBLEU(C, X)`.
pub fn ibleu(
    candidate: &TokenSequence,
    reference: &TokenSequence,
    input: &TokenSequence,
    alpha: f64,
    config: &BleuConfig,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!(
            "iBLEU alpha must be in [0, 1], got {alpha}"
        )));
    }
    Ok(bleu(candidate, reference, config)? - alpha * self_bleu(candidate, input, config)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RougeVariant {
    R1,
    R2,
    RL,
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// ROUGE-1/2 (clipped n-gram overlap) or ROUGE-L (longest common subsequence).
pub fn rouge(
    candidate: &TokenSequence,
    target: &TokenSequence,
    variant: RougeVariant,
) -> Result<PrecisionRecallF1> {
    non_empty([candidate, target])?;
    let (overlap, cand_total, targ_total) = match variant {
        RougeVariant::R1 | RougeVariant::R2 => {
            let n = if variant == RougeVariant::R1 { 1 } else { 2 };
            let (matched, cand_total) = clipped_overlap(candidate, target, n);
            (matched, cand_total, target.len().saturating_sub(n - 1))
        }
        RougeVariant::RL => (
            lcs_len(candidate.tokens(), target.tokens()),
            candidate.len(),
            target.len(),
        ),
    };
    Ok(PrecisionRecallF1::from_pr(
        ratio(overlap, cand_total),
        ratio(overlap, targ_total),
    ))
}

/// Levenshtein distance with unit insert, delete and substitute costs.
pub fn edit_distance_slices<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let above = row[j + 1];
            row[j + 1] = if x == y {
                diag
            } else {
                1 + diag.min(above).min(row[j])
            };
            diag = above;
        }
    }
    row[b.len()]
}

pub fn edit_distance(a: &TokenSequence, b: &TokenSequence) -> usize {
    edit_distance_slices(a.tokens(), b.tokens())
}

/// Edit distance divided by the longer sequence's length.
pub fn ned(a: &TokenSequence, b: &TokenSequence) -> Result<f64> {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return Err(Error::BothEmpty);
    }
    Ok(edit_distance(a, b) as f64 / longest as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{tokenize, TokenScheme};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ws(tokens: &[&str]) -> TokenSequence {
        TokenSequence::from_tokens(tokens, TokenScheme::Whitespace)
    }

    fn chars(s: &str) -> TokenSequence {
        tokenize(s, TokenScheme::Character)
    }

    #[test]
    fn f1_zero_when_both_zero() {
        assert_eq!(PrecisionRecallF1::from_pr(0.0, 0.0).f1, 0.0);
        assert_abs_diff_eq!(PrecisionRecallF1::from_pr(0.5, 1.0).f1, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn bleu_identical_is_one() {
        let s = ws(&["a", "b", "c", "d", "e"]);
        assert_eq!(bleu(&s, &s, &BleuConfig::unsmoothed(4)).unwrap(), 1.0);
        assert_eq!(bleu(&s, &s, &BleuConfig::default()).unwrap(), 1.0);
    }

    #[test]
    fn bleu_brevity_example() {
        let c = ws(&["the", "cat", "sat"]);
        let t = ws(&["the", "cat", "sat", "down"]);
        let got = bleu(&c, &t, &BleuConfig::unsmoothed(2)).unwrap();
        // p1 = 3/3, p2 = 2/2, BP = exp(1 - 4/3)
        assert_abs_diff_eq!(got, (1.0f64 - 4.0 / 3.0).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(got, 0.7165, epsilon = 1e-4);
    }

    #[test]
    fn bleu_disjoint_add_one() {
        let c = ws(&["a", "b", "c", "d", "e"]);
        let t = ws(&["f", "g", "h", "i", "j"]);
        let got = bleu(&c, &t, &BleuConfig::default()).unwrap();
        // candidate n-gram totals 5, 4, 3, 2 -> precisions 1/6, 1/5, 1/4, 1/3
        let expected = (1.0f64 / 6.0 * 1.0 / 5.0 * 1.0 / 4.0 * 1.0 / 3.0).powf(0.25);
        assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
        assert!(got > 0.0);
        assert_eq!(bleu(&c, &t, &BleuConfig::unsmoothed(4)).unwrap(), 0.0);
    }

    #[test]
    fn bleu_empty_is_error() {
        let empty = ws(&[]);
        let s = ws(&["a"]);
        assert!(matches!(bleu(&empty, &s, &BleuConfig::default()), Err(Error::EmptySequence)));
        assert!(matches!(bleu(&s, &empty, &BleuConfig::default()), Err(Error::EmptySequence)));
    }

    #[test]
    fn bleu_config_bounds() {
        assert!(BleuConfig::new(0, Smoothing::None).is_err());
        assert!(BleuConfig::new(9, Smoothing::None).is_err());
        assert!(BleuConfig::new(4, Smoothing::AddK { k: 0.0 }).is_err());
        assert!(BleuConfig::new(8, Smoothing::AddK { k: 0.5 }).is_ok());
    }

    #[test]
    fn smoothing_parses() {
        assert_eq!("none".parse::<Smoothing>().unwrap(), Smoothing::None);
        assert_eq!("add-k".parse::<Smoothing>().unwrap(), Smoothing::AddK { k: 1.0 });
        assert_eq!("add-k:0.5".parse::<Smoothing>().unwrap(), Smoothing::AddK { k: 0.5 });
        assert!("laplace".parse::<Smoothing>().is_err());
    }

    #[test]
    fn self_bleu_examples() {
        let x = ws(&["a", "b", "c", "d"]);
        let cfg = BleuConfig::unsmoothed(4);
        assert_eq!(self_bleu(&x, &x, &cfg).unwrap(), 1.0);
        assert_eq!(self_bleu(&ws(&["e", "f", "g", "h"]), &x, &cfg).unwrap(), 0.0);
        let c = ws(&["a", "b", "x", "d"]);
        assert_eq!(self_bleu(&c, &x, &cfg).unwrap(), bleu(&c, &x, &cfg).unwrap());
    }

    #[test]
    fn ibleu_examples() {
        let cfg = BleuConfig::unsmoothed(4);
        let x = ws(&["a", "b", "c", "d"]);
        let r = ws(&["e", "f", "g", "h"]);
        // BLEU = 1, SelfBLEU = 0
        assert_eq!(ibleu(&r, &r, &x, 0.2, &cfg).unwrap(), 1.0);
        // all three identical
        assert_abs_diff_eq!(ibleu(&x, &x, &x, 0.3, &cfg).unwrap(), 0.7, epsilon = 1e-15);
        assert!(ibleu(&x, &x, &x, 1.5, &cfg).is_err());
    }

    #[test]
    fn ibleu_half_bleu_full_copy() {
        // BLEU(C, R) = 0.5 via unigram-only config, SelfBLEU = 1
        let cfg = BleuConfig::unsmoothed(1);
        let c = ws(&["a", "b"]);
        let r = ws(&["a", "z"]);
        assert_eq!(bleu(&c, &r, &cfg).unwrap(), 0.5);
        assert_abs_diff_eq!(ibleu(&c, &r, &c, 0.2, &cfg).unwrap(), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn rouge_examples() {
        let s = ws(&["a", "b", "c"]);
        for v in [RougeVariant::R1, RougeVariant::R2, RougeVariant::RL] {
            let prf = rouge(&s, &s, v).unwrap();
            assert_eq!((prf.precision, prf.recall, prf.f1), (1.0, 1.0, 1.0));
        }
        let r1 = rouge(&s, &ws(&["a", "b", "d"]), RougeVariant::R1).unwrap();
        assert_abs_diff_eq!(r1.precision, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r1.recall, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r1.f1, 2.0 / 3.0, epsilon = 1e-15);

        let rl = rouge(&s, &ws(&["c", "a", "b"]), RougeVariant::RL).unwrap();
        assert_abs_diff_eq!(rl.f1, 2.0 / 3.0, epsilon = 1e-15);

        // bigrams: cand {ab, bc}, target {ab, bd} -> 1 match
        let r2 = rouge(&s, &ws(&["a", "b", "d"]), RougeVariant::R2).unwrap();
        assert_abs_diff_eq!(r2.f1, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rouge_clips_repeats() {
        let r1 = rouge(&ws(&["a", "a", "a"]), &ws(&["a", "b"]), RougeVariant::R1).unwrap();
        assert_abs_diff_eq!(r1.precision, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r1.recall, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn edit_distance_examples() {
        let s = ws(&["a", "b"]);
        assert_eq!(edit_distance(&s, &s), 0);
        assert_eq!(edit_distance(&ws(&[]), &ws(&["a", "b", "c"])), 3);
        assert_eq!(edit_distance(&chars("kitten"), &chars("sitting")), 3);
    }

    #[test]
    fn ned_examples() {
        let s = ws(&["a", "b"]);
        assert_eq!(ned(&s, &s).unwrap(), 0.0);
        assert_eq!(ned(&s, &ws(&["c", "d"])).unwrap(), 1.0);
        assert_abs_diff_eq!(ned(&chars("kitten"), &chars("sitting")).unwrap(), 3.0 / 7.0, epsilon = 1e-15);
        assert!(matches!(ned(&ws(&[]), &ws(&[])), Err(Error::BothEmpty)));
        assert_eq!(ned(&ws(&[]), &s).unwrap(), 1.0);
    }

    fn seq_strategy() -> impl Strategy<Value = TokenSequence> {
        proptest::collection::vec("[a-e]", 0..10)
            .prop_map(|t| TokenSequence::new(t, TokenScheme::Whitespace))
    }

    proptest! {
        #[test]
        fn ned_symmetric_and_bounded(a in seq_strategy(), b in seq_strategy()) {
            prop_assume!(!(a.is_empty() && b.is_empty()));
            let ab = ned(&a, &b).unwrap();
            prop_assert_eq!(ab, ned(&b, &a).unwrap());
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(ab == 0.0, a == b);
        }

        #[test]
        fn edit_distance_metric_axioms(a in seq_strategy(), b in seq_strategy(), c in seq_strategy()) {
            let ab = edit_distance(&a, &b);
            prop_assert_eq!(ab, edit_distance(&b, &a));
            prop_assert!(ab <= a.len().max(b.len()));
            prop_assert!(ab <= edit_distance(&a, &c) + edit_distance(&c, &b));
        }

        #[test]
        fn bleu_self_is_one(tokens in proptest::collection::vec("[a-z]{1,3}", 4..16)) {
            let s = TokenSequence::new(tokens, TokenScheme::Whitespace);
            prop_assert_eq!(bleu(&s, &s, &BleuConfig::unsmoothed(4)).unwrap(), 1.0);
        }

        #[test]
        fn bleu_in_unit_interval(a in seq_strategy(), b in seq_strategy()) {
            prop_assume!(!a.is_empty() && !b.is_empty());
            let v = bleu(&a, &b, &BleuConfig::default()).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn rouge_f1_consistent(a in seq_strategy(), b in seq_strategy()) {
            prop_assume!(!a.is_empty() && !b.is_empty());
            for v in [RougeVariant::R1, RougeVariant::R2, RougeVariant::RL] {
                let prf = rouge(&a, &b, v).unwrap();
                let again = PrecisionRecallF1::from_pr(prf.precision, prf.recall);
                prop_assert!((again.f1 - prf.f1).abs() <= 1e-12);
            }
        }

        #[test]
        fn ibleu_alpha_zero_is_bleu(a in seq_strategy(), b in seq_strategy(), x in seq_strategy()) {
            prop_assume!(!a.is_empty() && !b.is_empty() && !x.is_empty());
            let cfg = BleuConfig::default();
            prop_assert_eq!(ibleu(&a, &b, &x, 0.0, &cfg).unwrap(), bleu(&a, &b, &cfg).unwrap());
        }
    }
}
