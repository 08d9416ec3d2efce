use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lightcone_core::io::{export_mesh, run_analyze, MeshKind, RunConfig};
use lightcone_core::sweep::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn analyze(c: &mut Criterion) {
    let mut g = c.benchmark_group("analyze");
    g.sample_size(10);
    for n in [32, 64] {
        let cfg = RunConfig::builtin("paper-example")
            .unwrap()
            .with_grid(n, n)
            .unwrap();
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &cfg, |b, cfg| {
                b.iter(|| run_analyze(cfg, exec))
            });
        }
    }
    g.finish();
}

fn mesh(c: &mut Criterion) {
    let mut g = c.benchmark_group("focal_mesh");
    g.sample_size(10);
    let cfg = RunConfig::builtin("paper-example")
        .unwrap()
        .with_grid(64, 64)
        .unwrap();
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| export_mesh(&cfg, MeshKind::FocalMinus, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, analyze, mesh);
criterion_main!(benches);
