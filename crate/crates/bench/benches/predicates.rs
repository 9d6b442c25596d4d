use std::hint::black_box;

use cone_lab_core::centroid::{find_centroid_section, hammer_check};
use cone_lab_core::characterize::{css_sweep, fbi_defect, fit_ellipsoid, section_fit_points};
use cone_lab_core::cone::section_of;
use cone_lab_core::gamma::gamma_curve;
use cone_lab_core::harness::family::{kgon, lp_ball};
use cone_lab_core::linalg::vector;
use cone_lab_core::{ConeSpec, Hyperplane};
use criterion::{criterion_group, criterion_main, Criterion};

fn gamma(c: &mut Criterion) {
    let lorentz = ConeSpec::lorentz(4).unwrap();
    let a = vector(&[1.0, 0.3, -0.2, 0.1]);
    c.bench_function("gamma_curve/lorentz4/64", |b| b.iter(|| gamma_curve(&lorentz, black_box(&a), 64).unwrap()));
    let square = kgon(4).unwrap();
    let a = vector(&[1.0, 0.3, 0.1]);
    c.bench_function("gamma_curve/square/64", |b| b.iter(|| gamma_curve(&square, black_box(&a), 64).unwrap()));
}

fn predicates(c: &mut Criterion) {
    let lorentz = ConeSpec::lorentz(5).unwrap();
    let a = vector(&[1.0, 0.2, 0.1, -0.3, 0.0]);
    c.bench_function("fbi_defect/lorentz5", |b| b.iter(|| fbi_defect(&lorentz, black_box(&a), 64, 1e-8).unwrap()));
    let hexagon = kgon(6).unwrap();
    c.bench_function("css_sweep/hexagon/16", |b| b.iter(|| css_sweep(&hexagon, 16, black_box(7)).unwrap()));
    let disk = section_of(&ConeSpec::lorentz(3).unwrap(), &Hyperplane::new(vector(&[1., 0., 0.]), 1.0).unwrap(), 64).unwrap();
    let pts = section_fit_points(&disk);
    c.bench_function("fit_ellipsoid/disk/64", |b| b.iter(|| fit_ellipsoid(black_box(&pts)).unwrap()));
}

fn centroids(c: &mut Criterion) {
    let tri = kgon(3).unwrap();
    let section = section_of(&tri, &Hyperplane::new(vector(&[1., 0.2, 0.1]), 1.0).unwrap(), 64).unwrap();
    c.bench_function("hammer_check/triangle/256", |b| b.iter(|| hammer_check(black_box(&section), 256).unwrap()));
    let lorentz = ConeSpec::lorentz(4).unwrap();
    let p = vector(&[1.0, 0.3, 0.1, 0.0]);
    c.bench_function("find_centroid_section/lorentz4", |b| {
        b.iter(|| find_centroid_section(&lorentz, black_box(&p), 1e-6).unwrap())
    });
}

fn construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("lp_ball");
    group.sample_size(20);
    group.bench_function("8192", |b| b.iter(|| lp_ball(black_box(4.0), 8192).unwrap()));
    group.finish();
}

criterion_group!(benches, gamma, predicates, centroids, construction);
criterion_main!(benches);
