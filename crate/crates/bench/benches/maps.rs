use std::hint::black_box;

use confwarp_bench::lattice;
use confwarp_core::{confmap, elliptic, Complex64, MapParams};
use criterion::{criterion_group, criterion_main, Criterion};

fn elliptic_functions(c: &mut Criterion) {
    c.bench_function("complete_k", |b| b.iter(|| elliptic::complete_k(black_box(0.5))));
    c.bench_function("jacobi_real", |b| b.iter(|| elliptic::jacobi(black_box(1.3), black_box(0.5))));
    let z = Complex64::new(0.7, -0.4);
    c.bench_function("jacobi_sn_dn_complex", |b| {
        b.iter(|| elliptic::jacobi_sn_dn_complex(black_box(z), black_box(0.5)))
    });
    c.bench_function("incomplete_f_complex", |b| {
        b.iter(|| elliptic::incomplete_f_complex(black_box(z), black_box(0.5)))
    });
}

fn point_maps(c: &mut Criterion) {
    let points = lattice(32, 0.99);
    let disk: Vec<_> = points.iter().map(|&z| confmap::square_to_disk(z).unwrap()).collect();
    let params = MapParams::default_set()[2];
    let mut group = c.benchmark_group("point_maps_1024");
    group.bench_function("square_to_disk", |b| {
        b.iter(|| points.iter().map(|&z| confmap::square_to_disk(black_box(z)).unwrap()).sum::<Complex64>())
    });
    group.bench_function("disk_to_square", |b| {
        b.iter(|| disk.iter().map(|&w| confmap::disk_to_square(black_box(w)).unwrap()).sum::<Complex64>())
    });
    group.bench_function("pullback_augment_point", |b| {
        b.iter(|| {
            points.iter().map(|&z| confmap::pullback_augment_point(black_box(z), &params).unwrap()).sum::<Complex64>()
        })
    });
    group.finish();
}

criterion_group!(benches, elliptic_functions, point_maps);
criterion_main!(benches);
