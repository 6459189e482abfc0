use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spamadjust::clustering::kmeans;
use spamadjust::evaluation::{cross_validate_tokens, pr_auc, roc_auc};
use spamadjust::features::{build_matrix, build_vocabulary, vectorize};
use spamadjust::textproc::{normalize, stem};
use spamadjust::{Label, WeightingScheme};
use spamadjust_bench::{config, prose, tokens};

fn text(c: &mut Criterion) {
    let cfg = config(10, 10);
    let doc = prose(2_000);
    let mut g = c.benchmark_group("text");
    g.throughput(Throughput::Elements(2_000));
    g.bench_function("normalize", |b| b.iter(|| normalize(black_box(&doc), &cfg.tokenizer)));
    g.bench_function("stem", |b| {
        b.iter(|| doc.split(' ').map(|w| stem(black_box(w)).len()).sum::<usize>())
    });
    g.finish();
}

fn features(c: &mut Criterion) {
    let (docs, _) = tokens(500, 500);
    let ids: Vec<usize> = (0..docs.len()).collect();
    let vocab = build_vocabulary(&docs, 2, 0.95).unwrap();
    let mut g = c.benchmark_group("features");
    g.bench_function("build_vocabulary/1000", |b| b.iter(|| build_vocabulary(black_box(&docs), 2, 0.95)));
    for scheme in [WeightingScheme::Count, WeightingScheme::TfIdf] {
        g.bench_with_input(BenchmarkId::new("build_matrix", scheme), &scheme, |b, &s| {
            b.iter(|| build_matrix(black_box(&docs), &ids, &vocab, s))
        });
    }
    g.bench_function("vectorize", |b| b.iter(|| vectorize(black_box(&docs[0]), &vocab, WeightingScheme::TfIdf)));
    g.finish();
}

fn clustering(c: &mut Criterion) {
    let (docs, _) = tokens(500, 500);
    let ids: Vec<usize> = (0..docs.len()).collect();
    let vocab = build_vocabulary(&docs, 2, 0.95).unwrap();
    let rows = build_matrix(&docs, &ids, &vocab, WeightingScheme::Count).normalized_rows();
    let mut g = c.benchmark_group("kmeans");
    g.sample_size(20);
    for k in [2, 4, 8] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| kmeans(black_box(&rows), vocab.len(), k, 100))
        });
    }
    g.finish();
}

fn metrics(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 10_000;
    let scores: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let labels: Vec<Label> = (0..n).map(|_| if rng.gen() { Label::Spam } else { Label::Ham }).collect();
    let mut g = c.benchmark_group("metrics");
    g.throughput(Throughput::Elements(n as u64));
    g.bench_function("roc_auc", |b| b.iter(|| roc_auc(black_box(&scores), &labels)));
    g.bench_function("pr_auc", |b| b.iter(|| pr_auc(black_box(&scores), &labels)));
    g.finish();
}

fn cross_validation(c: &mut Criterion) {
    let (docs, labels) = tokens(200, 200);
    let mut g = c.benchmark_group("cross_validate");
    g.sample_size(10);
    for weighting in ["false", "true"] {
        let mut cfg = config(200, 200);
        cfg.set("weighting", weighting).unwrap();
        g.bench_with_input(BenchmarkId::new("weighting", weighting), &cfg, |b, cfg| {
            b.iter(|| cross_validate_tokens(black_box(&docs), &labels, cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, text, features, clustering, metrics, cross_validation);
criterion_main!(benches);
