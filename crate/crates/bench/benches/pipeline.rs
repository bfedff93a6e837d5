use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use tumatch_bench::{random_markets, random_tu_markets};
use tumatch_core::budget::Budget;
use tumatch_core::continuum::choose_continuum;
use tumatch_core::demand::market_demand_type;
use tumatch_core::generate::{random_firm_pref, random_subpopulation};
use tumatch_core::round::{solve, SolveOptions};
use tumatch_core::unimodular::is_totally_unimodular;

fn demand_type(c: &mut Criterion) {
    let mut group = c.benchmark_group("demand_type");
    for n in [3, 5, 8] {
        let markets = random_markets(1, 20, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &markets, |b, markets| {
            b.iter(|| {
                markets
                    .iter()
                    .map(|m| market_demand_type(black_box(m)).len())
                    .sum::<usize>()
            })
        });
    }
    group.finish();
}

fn tu_test(c: &mut Criterion) {
    let budget = Budget::default();
    let mut group = c.benchmark_group("is_totally_unimodular");
    for n in [3, 5, 8] {
        let matrices: Vec<_> = random_markets(2, 20, n)
            .iter()
            .map(|m| market_demand_type(m).matrix())
            .collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &matrices, |b, matrices| {
            b.iter(|| {
                matrices
                    .iter()
                    .filter(|m| {
                        is_totally_unimodular(black_box(m), &budget)
                            .unwrap()
                            .is_totally_unimodular()
                    })
                    .count()
            })
        });
    }
    group.finish();
}

fn consumption(c: &mut Criterion) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let cases: Vec<_> = (0..100)
        .map(|_| {
            (
                random_firm_pref(&mut rng, 5, 6),
                random_subpopulation(&mut rng, 5, 12),
            )
        })
        .collect();
    c.bench_function("choose_continuum", |b| {
        b.iter(|| {
            cases
                .iter()
                .map(|(p, x)| choose_continuum(p, black_box(x)).0.len())
                .sum::<usize>()
        })
    });
}

fn solve_tu(c: &mut Criterion) {
    let options = SolveOptions::default();
    let mut group = c.benchmark_group("solve");
    group.sample_size(20);
    for n in [3, 4] {
        let markets = random_tu_markets(4, 10, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &markets, |b, markets| {
            b.iter(|| {
                for m in markets {
                    solve(black_box(m), &options).unwrap();
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, demand_type, tu_test, consumption, solve_tu);
criterion_main!(benches);
