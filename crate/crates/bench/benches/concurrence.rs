use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mconc::mixed::prepare;
use mconc::states;
use mconc::{
    closed_form_cn, evaluate, named_spec, optimize_lower_bound, roof_direct_search, BoundOptions,
    NamedConcurrence, RoofOptions, SystemShape,
};

fn pure(c: &mut Criterion) {
    let mut group = c.benchmark_group("pure");
    for n in [3, 5, 7] {
        let shape = SystemShape::qubits(n).unwrap();
        let spec = named_spec(NamedConcurrence::CN, shape.clone()).unwrap();
        let psi = states::random_pure(shape, 1);
        group.bench_with_input(BenchmarkId::new("evaluate_cn", n), &psi, |b, psi| {
            b.iter(|| evaluate(&spec, psi).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("closed_form_cn", n), &psi, |b, psi| {
            b.iter(|| closed_form_cn(psi).unwrap())
        });
    }
    group.finish();
}

fn mixed(c: &mut Criterion) {
    let mut group = c.benchmark_group("mixed");
    group.sample_size(10);
    let shape = SystemShape::qubits(3).unwrap();
    let c3 = named_spec(NamedConcurrence::C3, shape.clone()).unwrap();
    for rank in [2, 4] {
        let rho = states::random_density(shape.clone(), rank, 5).unwrap();
        let (_, _, t) = prepare(&rho, &c3).unwrap();
        group.bench_function(BenchmarkId::new("lower_bound_c3", rank), |b| {
            b.iter(|| optimize_lower_bound(&t, &BoundOptions::default()).unwrap())
        });
        group.bench_function(BenchmarkId::new("roof_c3", rank), |b| {
            b.iter(|| roof_direct_search(&rho, &c3, &RoofOptions { restarts: 2, ..Default::default() }).unwrap())
        });
    }
    let two = SystemShape::qubits(2).unwrap();
    let bip = named_spec(NamedConcurrence::Bipartite, two.clone()).unwrap();
    let rho = states::random_density(two, 4, 5).unwrap();
    group.bench_function("roof_bipartite_full_rank", |b| {
        b.iter(|| roof_direct_search(&rho, &bip, &RoofOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, pure, mixed);
criterion_main!(benches);
