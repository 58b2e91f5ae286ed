use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use paraeval_bench::sentence;
use paraeval_core::lexical::{bleu, edit_distance, rouge};
use paraeval_core::{BleuConfig, ParaScoreConfig, ParaScorer, RougeVariant, SimilarityBackend};

criterion_group!(benches, bench_lexical, bench_semantic);
criterion_main!(benches);

fn bench_lexical(c: &mut Criterion) {
    let mut group = c.benchmark_group("lexical");
    let config = BleuConfig::default();
    for len in [10, 40, 160] {
        let (a, b) = (sentence(len, 3), sentence(len, 7));
        group.bench_with_input(BenchmarkId::new("bleu4", len), &len, |bench, _| {
            bench.iter(|| bleu(black_box(&a), black_box(&b), &config))
        });
        group.bench_with_input(BenchmarkId::new("rougeL", len), &len, |bench, _| {
            bench.iter(|| rouge(black_box(&a), black_box(&b), RougeVariant::RL))
        });
        group.bench_with_input(BenchmarkId::new("edit_distance", len), &len, |bench, _| {
            bench.iter(|| edit_distance(black_box(&a), black_box(&b)))
        });
    }
    group.finish();
}

fn bench_semantic(c: &mut Criterion) {
    let backend = SimilarityBackend::fallback();
    let scorer = ParaScorer::new(&backend, ParaScoreConfig::default()).unwrap();
    let mut group = c.benchmark_group("semantic");
    for len in [10, 40] {
        let (x, r, cand) = (sentence(len, 3), sentence(len, 5), sentence(len, 7));
        group.bench_with_input(BenchmarkId::new("greedy_f1", len), &len, |bench, _| {
            bench.iter(|| backend.sim(black_box(&x), black_box(&cand)))
        });
        group.bench_with_input(BenchmarkId::new("parascore", len), &len, |bench, _| {
            bench.iter(|| scorer.score(black_box(&x), Some(&r), black_box(&cand)))
        });
    }
    group.finish();
}
