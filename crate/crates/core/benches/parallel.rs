use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lagconf::configuration::LinkConfig;
use lagconf::estimators::{axiom_suite, calabi_limit};
use lagconf::par::Exec;
use lagconf::profile::{random_piecewise_cubic, RadialProfile};
use lagconf::rational::q;
use lagconf::recurrence::{enumerate_clique_free, rotation_densities, RotationModel};

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_clique_free");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "k=3,N=12"), &exec, |b, &exec| {
            b.iter(|| enumerate_clique_free(3, 12, exec).unwrap())
        });
    }
    group.finish();
}

fn tau_table(c: &mut Criterion) {
    let h: RadialProfile = "poly:[0,1]@[0,1/2]".parse().unwrap();
    let mut group = c.benchmark_group("calabi_limit");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "k_max=2000"), &exec, |b, &exec| {
            b.iter(|| calabi_limit(q(2, 5), black_box(&h), 2000, exec).unwrap())
        });
    }
    group.finish();
}

fn rotation(c: &mut Criterion) {
    let model = RotationModel::new(2f64.sqrt() - 1.0, 0.1).unwrap();
    let mut group = c.benchmark_group("rotation_densities");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "n=100000"), &exec, |b, &exec| {
            b.iter(|| rotation_densities(black_box(&model), 100_000, exec))
        });
    }
    group.finish();
}

fn axioms(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let samples: Vec<RadialProfile> = (0..100).map(|_| random_piecewise_cubic(&mut rng)).collect();
    let config = LinkConfig::new(3, q(3, 10), q(1, 20)).unwrap();
    let mut group = c.benchmark_group("axiom_suite");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "100 profiles"), &exec, |b, &exec| {
            b.iter(|| axiom_suite(&config, black_box(&samples), 1, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, tau_table, rotation, axioms);
criterion_main!(benches);
