use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use logdgla_bench::{double_complex, forms, model};
use logdgla_core::{
    bracket, build_koszul, dprime, dsecond, e_page, from_model, peel_primitive, solve_dprime, Truncation,
};

fn differentials(c: &mut Criterion) {
    let mut group = c.benchmark_group("differentials");
    for name in ["abelian-two-branch", "gl2-carry-two-branches", "log-three"] {
        let m = model(name);
        let fs = forms(&m, 1, 1, 4, 32);
        group.bench_with_input(BenchmarkId::new("dprime", name), &fs, |b, fs| {
            b.iter(|| fs.iter().map(|f| dprime(black_box(f)).len()).sum::<usize>())
        });
        group.bench_with_input(BenchmarkId::new("dsecond", name), &fs, |b, fs| {
            b.iter(|| fs.iter().map(|f| dsecond(black_box(f)).len()).sum::<usize>())
        });
    }
    group.finish();
}

fn brackets(c: &mut Criterion) {
    let m = model("gl2-carry-two-branches");
    let xs = forms(&m, 1, 0, 3, 16);
    let ys = forms(&m, 0, 1, 3, 16);
    c.bench_function("bracket/gl2-carry-two-branches", |b| {
        b.iter(|| xs.iter().zip(&ys).map(|(x, y)| bracket(black_box(x), black_box(y)).unwrap().len()).sum::<usize>())
    });
}

fn primitives(c: &mut Criterion) {
    let m = model("mixed-three");
    let t = Truncation::new(4, 2);
    let closed: Vec<_> = forms(&m, 1, 1, 2, 16).iter().map(dprime).filter(|f| !f.is_zero()).collect();
    let mut group = c.benchmark_group("primitive/mixed-three");
    group.bench_function("peel", |b| {
        b.iter(|| closed.iter().map(|w| peel_primitive(w, &t).unwrap().len()).sum::<usize>())
    });
    group.bench_function("solve", |b| {
        b.iter(|| closed.iter().filter(|w| solve_dprime(w, &t).unwrap().is_some()).count())
    });
    group.finish();
}

fn complexes(c: &mut Criterion) {
    let m = model("log-three");
    c.bench_function("koszul/log-three/T=(3,2)", |b| {
        b.iter(|| build_koszul(&m, 0, &Truncation::new(3, 2)).unwrap().dims())
    });
    let m = model("gl2-carry");
    let t = Truncation::new(3, 3);
    c.bench_function("model-complex/gl2-carry/T=(3,3)", |b| {
        b.iter(|| from_model(&m, 0..=1, 0..=1, &t).complex.total_len())
    });
    let mut group = c.benchmark_group("spectral-sequence");
    for side in [2, 3, 4] {
        let dc = double_complex(side, 6);
        group.bench_with_input(BenchmarkId::new("E_2", side), &dc, |b, dc| b.iter(|| e_page(dc, 2).dims));
    }
    group.finish();
}

criterion_group!(benches, differentials, brackets, primitives, complexes);
criterion_main!(benches);
