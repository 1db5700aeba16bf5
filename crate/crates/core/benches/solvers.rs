//! Inverse-limit solvers, and the fiber-product solver on the default rayon
//! pool against a single-thread pool. Build with `--no-default-features`
//! for the sequential fallback.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use profinite::approx::{all_approximations, surjective_approximations, SourceGroup};
use profinite::fingroup::catalog::default_catalog;
use profinite::limit::{inverse_limit_with, Diagram, Solver};
use profinite::profinite::fp_catalog;
use profinite::Budget;

fn corpus() -> Vec<(String, Diagram)> {
    let b = Budget::default();
    let mut out = Vec::new();
    for bound in [6, 8] {
        let d = surjective_approximations(&SourceGroup::integers(), bound, &b).unwrap();
        out.push((format!("Z surjective {bound}"), Diagram::from_approx(&d)));
    }
    let f22 = SourceGroup::fp_space(2, 2).unwrap();
    let d = all_approximations(&f22, 4, &fp_catalog(2, 2, 4), &b).unwrap();
    out.push(("F2^2 full 4".into(), Diagram::from_approx(&d)));
    let d = all_approximations(&SourceGroup::cyclic(4), 4, &default_catalog(4), &b).unwrap();
    out.push(("Z/4 full 4".into(), Diagram::from_approx(&d)));
    out
}

fn solvers(c: &mut Criterion) {
    let budget = Budget::default();
    let mut group = c.benchmark_group("solver");
    for (name, d) in corpus() {
        if d.product_order() <= 100_000 {
            group.bench_with_input(BenchmarkId::new("brute_force", &name), &d, |bch, d| {
                bch.iter(|| inverse_limit_with(black_box(d), Solver::BruteForce, &budget).unwrap())
            });
        }
        group.bench_with_input(BenchmarkId::new("fiber_product", &name), &d, |bch, d| {
            bch.iter(|| inverse_limit_with(black_box(d), Solver::FiberProduct, &budget).unwrap())
        });
    }
    group.finish();
}

#[cfg(feature = "parallel")]
fn threads(c: &mut Criterion) {
    let budget = Budget::default();
    let b = Budget::default();
    let d =
        Diagram::from_approx(&surjective_approximations(&SourceGroup::integers(), 12, &b).unwrap());
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let mut group = c.benchmark_group("threads");
    group.bench_function("default_pool", |bch| {
        bch.iter(|| inverse_limit_with(black_box(&d), Solver::FiberProduct, &budget).unwrap())
    });
    group.bench_function("one_thread", |bch| {
        bch.iter(|| {
            single.install(|| {
                inverse_limit_with(black_box(&d), Solver::FiberProduct, &budget).unwrap()
            })
        })
    });
    group.finish();
}

#[cfg(not(feature = "parallel"))]
fn threads(_: &mut Criterion) {}

criterion_group!(benches, solvers, threads);
criterion_main!(benches);
