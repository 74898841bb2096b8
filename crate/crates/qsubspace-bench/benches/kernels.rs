//! Hot-path benchmarks: pairwise verification throughput, packed rank
//! computation, rank-metric code construction, and exact clique search.

use std::time::Duration;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use qsubspace::{corollary_943, exact_augment, expurgate6, gabidulin, Field, Subspace, VerifyMode};

fn f2() -> Field {
    Field::new(2, 1).unwrap()
}

/// Sampled pair verification on the 5013-plane code in F_2^9: the
/// workload behind the exhaustive acceptance checks.
fn pair_check_throughput(c: &mut Criterion) {
    let code = corollary_943(&f2()).unwrap().output;
    let pairs = 1_000_000u64;
    let mut g = c.benchmark_group("verify");
    g.throughput(Throughput::Elements(pairs));
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("sampled_pairs", code.len()), |b| {
        b.iter(|| {
            let report = code
                .verify(1, VerifyMode::Sampled { pairs, seed: 7 })
                .unwrap();
            black_box(report.pairs_checked)
        })
    });
    g.finish();
}

/// Intersection dimension of two 3-spaces of F_2^9 (a packed-row rank
/// computation on a stacked 6x9 matrix): the single-pair kernel.
fn packed_rank(c: &mut Criterion) {
    let code = corollary_943(&f2()).unwrap().output;
    let pairs: Vec<(Subspace, Subspace)> = (0..256)
        .map(|i| {
            let a = code.codeword(i * 17 % code.len()).clone();
            let b = code.codeword((i * 31 + 1) % code.len()).clone();
            (a, b)
        })
        .collect();
    let mut g = c.benchmark_group("rank");
    g.throughput(Throughput::Elements(pairs.len() as u64));
    g.bench_function("intersection_dim_256", |b| {
        b.iter(|| {
            let mut acc = 0usize;
            for (a, w) in &pairs {
                acc += a.intersection_dim(w);
            }
            black_box(acc)
        })
    });
    g.finish();
}

/// Building the 4096-codeword Gabidulin code (q=2, m=n=4, d=2) from
/// linearized polynomials, including matrix realization.
fn gabidulin_build(c: &mut Criterion) {
    let field = f2();
    c.bench_function("gabidulin_2_4_4_2", |b| {
        b.iter(|| black_box(gabidulin(&field, 4, 4, 2).unwrap().len()))
    });
}

/// Exact maximum-clique augmentation of the expurgated 56-plane code up
/// to the full 77-plane base (branch and bound over 121 candidates).
fn clique_search(c: &mut Criterion) {
    let (gc, _) = expurgate6(&f2()).unwrap();
    let code = gc.into_code();
    let mut g = c.benchmark_group("clique");
    g.sample_size(20);
    g.bench_function("exact_augment_56_to_77", |b| {
        b.iter(|| {
            let aug = exact_augment(&code, Duration::from_secs(300)).unwrap();
            black_box(aug.code.len())
        })
    });
    g.finish();
}

criterion_group!(
    benches,
    pair_check_throughput,
    packed_rank,
    gabidulin_build,
    clique_search
);
criterion_main!(benches);
