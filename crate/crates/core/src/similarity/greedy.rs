use super::{IdfTable, TokenEmbeddings};
use crate::error::{Error, Result};
use crate::lexical::PrecisionRecallF1;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_pair(a: &TokenEmbeddings, b: &TokenEmbeddings) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyEmbeddings);
    }
    Ok(())
}

/// Weighted mean of per-token best matches. Falls back to uniform weights
/// when every weight is zero.
fn weighted_mean(best: &[f64], tokens: &[String], idf: Option<&IdfTable>) -> f64 {
    if let Some(idf) = idf {
        let weights: Vec<f64> = tokens.iter().map(|t| idf.weight(t)).collect();
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            return best.iter().zip(&weights).map(|(b, w)| b * w).sum::<f64>() / total;
        }
    }
    best.iter().sum::<f64>() / best.len() as f64
}

/// Greedy token matching: every candidate token is paired with its most
/// similar target token (precision) and vice versa (recall). Cosines are
/// clamped to `[0, 1]`.
pub fn greedy_match_score(
    candidate: &TokenEmbeddings,
    target: &TokenEmbeddings,
    idf: Option<&IdfTable>,
) -> Result<PrecisionRecallF1> {
    check_pair(candidate, target)?;

    let mut row_best = vec![0.0f64; candidate.len()];
    let mut col_best = vec![0.0f64; target.len()];
    for (i, c) in candidate.rows().enumerate() {
        for (j, t) in target.rows().enumerate() {
            let cos = dot(c, t).clamp(0.0, 1.0);
            row_best[i] = row_best[i].max(cos);
            col_best[j] = col_best[j].max(cos);
        }
    }

    let precision = weighted_mean(&row_best, candidate.tokens(), idf);
    let recall = weighted_mean(&col_best, target.tokens(), idf);
    Ok(PrecisionRecallF1::from_pr(precision, recall))
}

/// Cosine of the mean-pooled rows, clamped to `[0, 1]`.
pub fn mean_pool_cosine(a: &TokenEmbeddings, b: &TokenEmbeddings) -> Result<f64> {
    check_pair(a, b)?;
    let pool = |e: &TokenEmbeddings| {
        let mut mean = vec![0.0; e.dim()];
        for row in e.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        let n = e.len() as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    };
    let (pa, pb) = (pool(a), pool(b));
    let norms = dot(&pa, &pa).sqrt() * dot(&pb, &pb).sqrt();
    if norms == 0.0 {
        return Ok(0.0);
    }
    Ok((dot(&pa, &pb) / norms).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn emb(rows: Vec<Vec<f64>>) -> TokenEmbeddings {
        let tokens = (0..rows.len()).map(|i| format!("t{i}")).collect();
        let dim = rows[0].len();
        TokenEmbeddings::from_rows(tokens, dim, rows).unwrap()
    }

    #[test]
    fn identical_matrices_match_perfectly() {
        let a = emb(vec![vec![1.0, 2.0, 0.5], vec![-1.0, 0.0, 3.0]]);
        let prf = greedy_match_score(&a, &a, None).unwrap();
        assert_eq!((prf.precision, prf.recall, prf.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn orthogonal_rows_score_zero() {
        let a = emb(vec![vec![1.0, 0.0, 0.0]]);
        let b = emb(vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let prf = greedy_match_score(&a, &b, None).unwrap();
        assert_eq!((prf.precision, prf.recall, prf.f1), (0.0, 0.0, 0.0));
        // anti-parallel rows clamp to zero too
        let c = emb(vec![vec![-1.0, 0.0, 0.0]]);
        assert_eq!(greedy_match_score(&a, &c, None).unwrap().f1, 0.0);
        assert_eq!(mean_pool_cosine(&a, &c).unwrap(), 0.0);
    }

    #[test]
    fn hand_computed_example() {
        // cand {e1, e2}, targ {e1, (e1 + e2)/sqrt2}
        let cand = emb(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let targ = emb(vec![vec![1.0, 0.0], vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]]);
        let prf = greedy_match_score(&cand, &targ, None).unwrap();
        // precision: e1 -> 1, e2 -> 1/sqrt2; recall: e1 -> 1, diag -> 1/sqrt2
        let expected = (1.0 + FRAC_1_SQRT_2) / 2.0;
        assert!((prf.precision - expected).abs() < 1e-12);
        assert!((prf.recall - expected).abs() < 1e-12);
        assert!((prf.f1 - 0.853_553_390_593_273_7).abs() < 1e-12);
    }

    #[test]
    fn mismatched_inputs() {
        let a = emb(vec![vec![1.0, 0.0]]);
        let b = emb(vec![vec![1.0, 0.0, 0.0]]);
        assert!(matches!(
            greedy_match_score(&a, &b, None),
            Err(Error::DimensionMismatch { .. })
        ));
        let empty = TokenEmbeddings::from_rows(vec![], 2, vec![]).unwrap();
        assert!(matches!(greedy_match_score(&a, &empty, None), Err(Error::EmptyEmbeddings)));
    }

    #[test]
    fn idf_weights_shift_precision() {
        let cand = emb(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let targ = emb(vec![vec![1.0, 0.0]]);
        let idf = IdfTable::new(
            HashMap::from([("t0".to_string(), 3.0), ("t1".to_string(), 1.0)]),
            1.0,
        )
        .unwrap();
        let prf = greedy_match_score(&cand, &targ, Some(&idf)).unwrap();
        assert!((prf.precision - 0.75).abs() < 1e-15);
        assert_eq!(prf.recall, 1.0);
    }

    fn matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
        proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 4), 1..6)
            .prop_filter("non-zero rows", |rows| {
                rows.iter().all(|r| r.iter().any(|v| v.abs() > 1e-3))
            })
    }

    proptest! {
        #[test]
        fn swapping_sides_swaps_precision_and_recall(a in matrix(), b in matrix()) {
            let (a, b) = (emb(a), emb(b));
            let ab = greedy_match_score(&a, &b, None).unwrap();
            let ba = greedy_match_score(&b, &a, None).unwrap();
            prop_assert_eq!(ab.precision, ba.recall);
            prop_assert_eq!(ab.recall, ba.precision);
            prop_assert!((0.0..=1.0).contains(&ab.f1));
        }

        #[test]
        fn uniform_idf_matches_unweighted(a in matrix(), b in matrix(), w in 0.1f64..5.0) {
            let (a, b) = (emb(a), emb(b));
            let idf = IdfTable::new(HashMap::new(), w).unwrap();
            let plain = greedy_match_score(&a, &b, None).unwrap();
            let weighted = greedy_match_score(&a, &b, Some(&idf)).unwrap();
            prop_assert!((plain.precision - weighted.precision).abs() <= 1e-12);
            prop_assert!((plain.recall - weighted.recall).abs() <= 1e-12);
            prop_assert!((plain.f1 - weighted.f1).abs() <= 1e-12);
        }
    }
}
