use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use dinet_bench::{bench_cohort, cumulative_graph, weekly_graph};
use dinet_core::cooccur::build_week_graph;
use dinet_core::ingest::partition_weeks;
use dinet_core::metrics::{average_clustering, betweenness_scores, closeness_scores};
use dinet_core::nullmodel::{null_clustering_baseline, NullModelConfig};
use dinet_core::stats::{spearman_pvalue, spearman_rho, PValueMethod};

fn bench_graph_build(c: &mut Criterion) {
    let cohort = bench_cohort();
    let parts = partition_weeks(&cohort.log, &cohort.calendar);
    c.bench_function("build_week_graph_semester", |b| {
        b.iter(|| {
            for slice in &parts.slices {
                black_box(build_week_graph(
                    &slice.log,
                    slice.label,
                    cohort.spec.threshold,
                    &cohort.calendar,
                ));
            }
        })
    });
}

fn bench_metrics(c: &mut Criterion) {
    let cohort = bench_cohort();
    let g = cumulative_graph(&cohort);
    c.bench_function("betweenness_cumulative", |b| {
        b.iter(|| black_box(betweenness_scores(g.graph()).unwrap()))
    });
    c.bench_function("closeness_cumulative", |b| {
        b.iter(|| black_box(closeness_scores(g.graph()).unwrap()))
    });
    c.bench_function("average_clustering_cumulative", |b| {
        b.iter(|| black_box(average_clustering(g.graph()).unwrap()))
    });
}

fn bench_null_model(c: &mut Criterion) {
    let cohort = bench_cohort();
    let g = weekly_graph(&cohort);
    let cfg = NullModelConfig {
        replicate_count: 100,
        master_seed: 11,
        ..Default::default()
    };
    c.bench_function("null_baseline_100_replicates", |b| {
        b.iter(|| black_box(null_clustering_baseline(&g, &cfg).unwrap()))
    });
}

fn bench_stats(c: &mut Criterion) {
    let x: Vec<f64> = (0..30).map(|i| ((i * 37) % 13) as f64).collect();
    let y: Vec<f64> = (0..30).map(|i| ((i * 17) % 11) as f64).collect();
    c.bench_function("spearman_rho_n30", |b| {
        b.iter(|| black_box(spearman_rho(&x, &y).unwrap()))
    });
    c.bench_function("exact_permutation_p_n9", |b| {
        b.iter(|| black_box(spearman_pvalue(0.5, 9, PValueMethod::ExactPermutation).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_graph_build,
    bench_metrics,
    bench_null_model,
    bench_stats
);
criterion_main!(benches);
