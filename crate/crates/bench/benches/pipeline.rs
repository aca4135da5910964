use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use supersurf::crosscheck::{verify_example, PaperTables, Pipeline};
use supersurf::dsl::{elaborate_symbolic, SurfaceSpec};
use supersurf::geometry::{check_identities, Probes};
use supersurf::random::{element, metric, rng, MetricShape};
use supersurf::{IdentityKind, Parity, ScalarAlgebra};

const EXAMPLE1: &str = include_str!("../../core/fixtures/example1.surf");
const EXAMPLE3: &str = include_str!("../../core/fixtures/example3.surf");
const EXAMPLE3_PAPER: &str = include_str!("../../core/fixtures/example3.paper");

fn star(c: &mut Criterion) {
    let mut r = rng(1);
    let a = element(&mut r, 2, 4, Parity::Even, 2);
    let b = element(&mut r, 2, 4, Parity::Odd, 2);
    c.bench_function("star N=4 P=2", |bch| bch.iter(|| black_box(&a).star(black_box(&b))));
    c.bench_function("inverse N=4 P=2", |bch| {
        let u = a.add(&supersurf::ExactScalar::one(4)).sub(&a.classical());
        bch.iter(|| black_box(&u).invert().unwrap())
    });
}

fn symbolic(c: &mut Criterion) {
    let one = SurfaceSpec::parse(EXAMPLE1).unwrap();
    let three = SurfaceSpec::parse(EXAMPLE3).unwrap();
    let paper = PaperTables::parse(EXAMPLE3_PAPER, &three).unwrap();
    c.bench_function("symbolic pipeline example 1", |b| {
        b.iter(|| Pipeline::run(elaborate_symbolic(&one).unwrap()))
    });
    c.bench_function("symbolic pipeline example 3", |b| {
        b.iter(|| Pipeline::run(elaborate_symbolic(&three).unwrap()))
    });
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    g.bench_function("example 3, three binding sets", |b| {
        b.iter(|| verify_example("example3.surf", &three, &paper, &[1, 2, 3]).unwrap())
    });
    g.finish();
}

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    g.sample_size(10);
    let shape = |odd, degree| MetricShape { odd, order: 3, graded_symmetric: true, degree };
    let plain = metric(&mut rng(2), shape(0, 2)).unwrap();
    g.bench_function("pipeline P=0 N=3", |b| b.iter(|| Pipeline::run(plain.clone())));
    let sup = metric(&mut rng(3), shape(2, 1)).unwrap();
    g.bench_function("pipeline P=2 N=3", |b| b.iter(|| Pipeline::run(sup.clone())));
    let probes = Probes::standard(plain.surface());
    g.bench_function("identities P=0 N=3", |b| {
        b.iter(|| check_identities(&plain, &probes, &IdentityKind::ALL))
    });
    g.finish();
}

criterion_group!(benches, star, symbolic, exact);
criterion_main!(benches);
