use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use metacat_core::corpus::build_fol_env;
use metacat_core::laws::{monoidal_laws, syntax_laws};
use metacat_core::oracle::differential_run_with;
use metacat_core::par::Execution;
use metacat_core::{check_all, registered_env};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn differential(c: &mut Criterion) {
    let env = build_fol_env();
    let env = registered_env(&env, &check_all(&env));
    let mut group = c.benchmark_group("differential_1000");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| differential_run_with(exec, black_box(&env), 1000, 7))
        });
    }
    group.finish();
}

fn law_sweeps(c: &mut Criterion) {
    let env = build_fol_env();
    let mut group = c.benchmark_group("law_sweeps");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("syntax_1000", name), &exec, |b, &exec| {
            b.iter(|| syntax_laws(black_box(&env.signature), 1000, 1, exec))
        });
        group.bench_with_input(BenchmarkId::new("monoidal_200", name), &exec, |b, &exec| {
            b.iter(|| monoidal_laws(black_box(&env), 200, 1, exec))
        });
    }
    group.finish();
}

fn corpus(c: &mut Criterion) {
    let env = build_fol_env();
    c.bench_function("check_all_corpus", |b| {
        b.iter(|| check_all(black_box(&env)))
    });
}

criterion_group!(benches, differential, law_sweeps, corpus);
criterion_main!(benches);
