use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hypermaj_core::{
    default_grid, expand, gram, klemes_example, klemes_matrices, majorizes, power_majorizes,
    random_majorization_pair, recover_factorization, roots, sym_eigenvalues, EntryRange,
    QuadraticFactorization, DEFAULT_TOL,
};

fn pair(n: usize) -> (hypermaj_core::RealVector, hypermaj_core::RealVector) {
    let range = EntryRange::theorem(1.0, 10.0).unwrap();
    random_majorization_pair(n, 2 * n, range, 7).unwrap()
}

fn bench_majorizes(c: &mut Criterion) {
    let mut group = c.benchmark_group("majorizes");
    for n in [4, 64, 1024] {
        let (u, v) = pair(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &(u, v), |b, (u, v)| {
            b.iter(|| majorizes(black_box(u), black_box(v), DEFAULT_TOL).unwrap())
        });
    }
    group.finish();
}

fn bench_recover(c: &mut Criterion) {
    let mut group = c.benchmark_group("recover_factorization");
    for n in [2, 4, 6] {
        let (u, _) = pair(n);
        let p = expand(&QuadraticFactorization::new(u).unwrap());
        group.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| recover_factorization(black_box(p), DEFAULT_TOL).unwrap())
        });
    }
    group.finish();
}

fn bench_power_majorizes(c: &mut Criterion) {
    let grid = default_grid(64.0).unwrap();
    let mut group = c.benchmark_group("power_majorizes");
    for n in [2, 6] {
        let (u, v) = pair(n);
        let x = roots(&QuadraticFactorization::new(u).unwrap());
        let y = roots(&QuadraticFactorization::new(v).unwrap());
        group.bench_with_input(BenchmarkId::from_parameter(n), &(x, y), |b, (x, y)| {
            b.iter(|| power_majorizes(black_box(x), black_box(y), &grid, DEFAULT_TOL).unwrap())
        });
    }
    group.finish();
}

fn bench_linalg(c: &mut Criterion) {
    let (a, _) = klemes_matrices();
    let x = gram(&a);
    c.bench_function("gram_4x4", |b| b.iter(|| gram(black_box(&a))));
    c.bench_function("sym_eigenvalues_4x4", |b| {
        b.iter(|| sym_eigenvalues(black_box(&x), 1e-12).unwrap())
    });
    c.bench_function("klemes_example", |b| b.iter(klemes_example));
}

criterion_group!(
    benches,
    bench_majorizes,
    bench_recover,
    bench_power_majorizes,
    bench_linalg
);
criterion_main!(benches);
