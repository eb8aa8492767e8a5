// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use padic_torsion::heuristics::DEFAULT_TOL;
use padic_torsion::{
    class_group, cl_average, make_field, ray_class_p_part, residue_unit_group, smith_normal_form, torsion_structure,
    IntMatrix, SplittingProfile, DEFAULT_N_MAX,
};
use padic_torsion_bench::SAMPLE_FIELDS;

fn torsion(c: &mut Criterion) {
    let mut g = c.benchmark_group("torsion_structure");
    for &d in SAMPLE_FIELDS {
        let k = make_field(d).unwrap();
        g.bench_with_input(BenchmarkId::new("p=3", d), &k, |b, k| b.iter(|| torsion_structure(black_box(k), 3, DEFAULT_N_MAX)));
    }
    g.finish();
}

fn pieces(c: &mut Criterion) {
    let k = make_field(-3299).unwrap();
    c.bench_function("class_group d=-3299", |b| b.iter(|| class_group(black_box(&k), 3)));
    let big = make_field(-9_999_991).unwrap();
    c.bench_function("class_group d=-9999991", |b| b.iter(|| class_group(black_box(&big), 5)));
    for p in [3u64, 5, 7] {
        c.bench_function(&format!("residue_unit_group d=-129 p={p} n=6"), |b| {
            b.iter(|| residue_unit_group(black_box(&make_field(-129).unwrap()), p, 6))
        });
    }
    c.bench_function("ray_class d=-129 p=3 n=5", |b| b.iter(|| ray_class_p_part(black_box(&make_field(-129).unwrap()), 3, 5)));
}

fn linalg(c: &mut Criterion) {
    // deterministic dense 30x30 matrix with small entries
    let rows: Vec<Vec<i64>> = (0..30).map(|i| (0..30).map(|j| ((i * 37 + j * 11 + i * j) % 19) - 9).collect()).collect();
    let m = IntMatrix::from_rows(30, &rows);
    c.bench_function("smith_normal_form 30x30", |b| b.iter(|| smith_normal_form(black_box(&m))));
}

fn heuristics(c: &mut Criterion) {
    let profile = SplittingProfile::uniform(1, 1);
    c.bench_function("cl_average table", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
                for u in 0..2 {
                    acc += cl_average(p, &profile, u, DEFAULT_TOL);
                }
            }
            black_box(acc)
        })
    });
}

criterion_group!(benches, torsion, pieces, linalg, heuristics);
criterion_main!(benches);
