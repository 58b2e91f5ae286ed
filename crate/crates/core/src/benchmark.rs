//! Evaluation records, benchmarks grouped by input sentence, and per-instance
//! score vectors.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::Tokenizer;

/// One judged paraphrase: input `X`, optional reference `R`, candidate `C`
/// and a human score in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalInstance {
    pub input: String,
    pub reference: Option<String>,
    pub candidate: String,
    pub score: f64,
}

impl EvalInstance {
    pub fn new(
        input: impl Into<String>,
        reference: Option<String>,
        candidate: impl Into<String>,
        score: f64,
    ) -> Result<Self> {
        let instance = Self {
            input: input.into(),
            reference,
            candidate: candidate.into(),
            score,
        };
        instance.validate(0)?;
        Ok(instance)
    }

    /// Checks the record invariants, reporting `line` on failure.
    pub(crate) fn validate(&self, line: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.score) {
            return Err(Error::ScoreOutOfRange {
                line,
                score: self.score,
            });
        }
        if self.input.trim().is_empty() {
            return Err(Error::Parse {
                line,
                message: "input is empty".into(),
            });
        }
        if self.candidate.trim().is_empty() {
            return Err(Error::Parse {
                line,
                message: "candidate is empty".into(),
            });
        }
        Ok(())
    }
}

/// All candidates that share one input sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct InputGroup {
    pub input: String,
    pub reference: Option<String>,
    pub indices: Vec<usize>,
}

/// A validated collection of instances grouped by input sentence.
///
/// Groups are ordered by first appearance of their input; indices within a
/// group are ascending.
#[derive(Debug, Clone)]
pub struct Benchmark {
    name: String,
    language_tag: String,
    tokenizer: Tokenizer,
    instances: Vec<EvalInstance>,
    groups: Vec<InputGroup>,
    group_of: Vec<usize>,
}

impl Benchmark {
    pub fn new(
        name: impl Into<String>,
        language_tag: impl Into<String>,
        tokenizer: Tokenizer,
        instances: Vec<EvalInstance>,
    ) -> Result<Self> {
        let mut groups: Vec<InputGroup> = Vec::new();
        let mut lookup: HashMap<&str, usize> = HashMap::new();
        let mut group_of = Vec::with_capacity(instances.len());

        for (index, inst) in instances.iter().enumerate() {
            inst.validate(index + 1)?;
            let gid = match lookup.get(inst.input.as_str()) {
                Some(&gid) => {
                    if groups[gid].reference != inst.reference {
                        return Err(Error::InconsistentReference { line: index + 1 });
                    }
                    groups[gid].indices.push(index);
                    gid
                }
                None => {
                    let gid = groups.len();
                    lookup.insert(inst.input.as_str(), gid);
                    groups.push(InputGroup {
                        input: inst.input.clone(),
                        reference: inst.reference.clone(),
                        indices: vec![index],
                    });
                    gid
                }
            };
            group_of.push(gid);
        }

        Ok(Self {
            name: name.into(),
            language_tag: language_tag.into(),
            tokenizer,
            instances,
            groups,
            group_of,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn language_tag(&self) -> &str {
        &self.language_tag
    }

    pub fn tokenizer(&self) -> Tokenizer {
        self.tokenizer
    }

    pub fn instances(&self) -> &[EvalInstance] {
        &self.instances
    }

    pub fn groups(&self) -> &[InputGroup] {
        &self.groups
    }

    /// Group id of instance `index`.
    pub fn group_of(&self, index: usize) -> usize {
        self.group_of[index]
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn human_scores(&self) -> Vec<f64> {
        self.instances.iter().map(|i| i.score).collect()
    }

    /// True when every instance carries a reference.
    pub fn has_references(&self) -> bool {
        self.instances.iter().all(|i| i.reference.is_some())
    }

    /// Builds a new benchmark from the given groups, keeping original
    /// instance order.
    pub fn select_groups(&self, name: impl Into<String>, group_ids: &[usize]) -> Benchmark {
        let mut keep = vec![false; self.groups.len()];
        for &g in group_ids {
            keep[g] = true;
        }
        let instances = self
            .instances
            .iter()
            .enumerate()
            .filter(|(i, _)| keep[self.group_of[*i]])
            .map(|(_, inst)| inst.clone())
            .collect();
        Benchmark::new(name, self.language_tag.clone(), self.tokenizer, instances)
            .expect("subset of a valid benchmark is valid")
    }

    /// Appends instances, revalidating the grouping.
    pub fn with_extra_instances(&self, extra: Vec<EvalInstance>) -> Result<Benchmark> {
        let mut instances = self.instances.clone();
        instances.extend(extra);
        Benchmark::new(
            self.name.clone(),
            self.language_tag.clone(),
            self.tokenizer,
            instances,
        )
    }
}

/// Per-instance outputs of one metric, aligned with a benchmark's instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    metric_id: String,
    values: Vec<f64>,
}

impl ScoreVector {
    pub fn new(metric_id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let metric_id = metric_id.into();
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                metric: metric_id,
                index,
            });
        }
        Ok(Self { metric_id, values })
    }

    /// Like [`ScoreVector::new`], additionally checking alignment with `benchmark`.
    pub fn for_benchmark(
        metric_id: impl Into<String>,
        values: Vec<f64>,
        benchmark: &Benchmark,
    ) -> Result<Self> {
        let sv = Self::new(metric_id, values)?;
        sv.check_aligned(benchmark)?;
        Ok(sv)
    }

    pub fn check_aligned(&self, benchmark: &Benchmark) -> Result<()> {
        if self.values.len() != benchmark.len() {
            return Err(Error::LengthMismatch {
                left: self.values.len(),
                right: benchmark.len(),
            });
        }
        Ok(())
    }

    pub fn metric_id(&self) -> &str {
        &self.metric_id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values at the given instance indices.
    pub fn gather(&self, indices: &[usize]) -> Vec<f64> {
        indices.iter().map(|&i| self.values[i]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(x: &str, r: Option<&str>, c: &str, h: f64) -> EvalInstance {
        EvalInstance {
            input: x.into(),
            reference: r.map(str::to_string),
            candidate: c.into(),
            score: h,
        }
    }

    #[test]
    fn groups_follow_first_appearance() {
        let b = Benchmark::new(
            "t",
            "en",
            Tokenizer::default(),
            vec![
                inst("x1", Some("r1"), "a", 0.1),
                inst("x2", Some("r2"), "b", 0.2),
                inst("x1", Some("r1"), "c", 0.3),
            ],
        )
        .unwrap();
        assert_eq!(b.groups().len(), 2);
        assert_eq!(b.groups()[0].indices, vec![0, 2]);
        assert_eq!(b.groups()[1].indices, vec![1]);
        assert_eq!(b.group_of(2), 0);
        assert!(b.has_references());
    }

    #[test]
    fn conflicting_reference_rejected() {
        let err = Benchmark::new(
            "t",
            "en",
            Tokenizer::default(),
            vec![inst("x", Some("r1"), "a", 0.1), inst("x", Some("r2"), "b", 0.2)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InconsistentReference { line: 2 }));
    }

    #[test]
    fn score_range_enforced() {
        assert!(matches!(
            EvalInstance::new("x", None, "c", 1.3),
            Err(Error::ScoreOutOfRange { .. })
        ));
        assert!(EvalInstance::new("x", None, "c", 1.0).is_ok());
        assert!(EvalInstance::new("x", None, " ", 0.5).is_err());
        assert!(EvalInstance::new("x", None, "c", f64::NAN).is_err());
    }

    #[test]
    fn score_vector_rejects_nan() {
        assert!(matches!(
            ScoreVector::new("m", vec![0.0, f64::NAN]),
            Err(Error::NonFinite { index: 1, .. })
        ));
    }

    proptest! {
        #[test]
        fn groups_partition_indices(choices in proptest::collection::vec(0usize..6, 1..60)) {
            let instances: Vec<_> = choices
                .iter()
                .enumerate()
                .map(|(i, g)| inst(&format!("x{g}"), None, &format!("c{i}"), 0.5))
                .collect();
            let b = Benchmark::new("p", "en", Tokenizer::default(), instances).unwrap();
            let mut seen = vec![0usize; b.len()];
            for g in b.groups() {
                for &i in &g.indices {
                    seen[i] += 1;
                    prop_assert_eq!(&b.instances()[i].input, &g.input);
                }
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
        }
    }
}
