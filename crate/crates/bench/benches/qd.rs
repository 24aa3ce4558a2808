use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::Rng;
use smol_bench::{filled_arm_archive, random_genomes, rng};
use smol_core::{
    compute_cvt_centroids, evaluate_batch, iso_line, mann_whitney_one_sided, Alternative, Crawler, CrawlerParams,
    Descriptor, ScaledArm, ScaledArmParams, Task, VariationParams,
};

fn cvt(c: &mut Criterion) {
    c.bench_function("cvt k=256 n=25600", |b| b.iter(|| compute_cvt_centroids(256, 2, 25_600, 1).unwrap()));
    let centroids = compute_cvt_centroids(1024, 2, 100_000, 2024).unwrap();
    let mut r = rng(1);
    let queries: Vec<Descriptor> =
        (0..1024).map(|_| Descriptor::new(vec![r.random(), r.random()]).unwrap()).collect();
    c.bench_function("assign_cell k=1024 x1024", |b| {
        b.iter(|| queries.iter().map(|q| centroids.assign_cell(q).unwrap()).sum::<usize>())
    });
}

fn archive(c: &mut Criterion) {
    let centroids = Arc::new(compute_cvt_centroids(1024, 2, 100_000, 2024).unwrap());
    let full = filled_arm_archive(Arc::clone(&centroids), 20_000, 3);
    let arm = ScaledArm::new(ScaledArmParams::default()).unwrap();
    c.bench_function("reevaluate_and_transfer arm", |b| {
        b.iter(|| full.reevaluate_and_transfer(&arm, black_box(1.2)).unwrap())
    });
    c.bench_function("select_parents 256", |b| {
        let mut r = rng(4);
        b.iter(|| full.select_parents(256, &mut r).unwrap())
    });
    let params = VariationParams::default();
    let parents = random_genomes(2, 8, 5);
    c.bench_function("iso_line len=8", |b| {
        let mut r = rng(6);
        b.iter(|| iso_line(&parents[0], &parents[1], &params, &mut r).unwrap())
    });
    c.bench_function("arm batch 256", |b| {
        b.iter_batched(|| random_genomes(256, 8, 7), |g| evaluate_batch(g, &arm, 1.0), BatchSize::SmallInput)
    });
}

fn crawler(c: &mut Criterion) {
    let crawler = Crawler::new(CrawlerParams::default()).unwrap();
    let g = random_genomes(1, crawler.genome_len(), 8).remove(0);
    c.bench_function("crawler rollout 500 steps", |b| b.iter(|| crawler.rollout(&g, 1.0).unwrap()));
}

fn stats(c: &mut Criterion) {
    let mut r = rng(9);
    let a: Vec<f64> = (0..10).map(|_| r.random()).collect();
    let b: Vec<f64> = (0..10).map(|_| r.random()).collect();
    c.bench_function("mann_whitney exact 10x10", |bench| {
        bench.iter(|| mann_whitney_one_sided(&a, &b, Alternative::BGreater).unwrap())
    });
}

criterion_group!(benches, cvt, archive, crawler, stats);
criterion_main!(benches);
