//! Benchmarks along the decision pipeline, from field primitives to the two
//! full decision routes. Inputs are deterministic (fixed seeds), so numbers
//! are comparable across runs and machines.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use num_bigint::BigInt;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selquant_bench::{field, hadamard_instance, random_instance};
use selquant_core::decide::{decide_approx, decide_exact, derive_constants, default_scheme};
use selquant_core::Matrix;

/// Newton approximants of √2 at growing precision: the integer recurrence
/// doubles its accuracy per step, so cost should grow roughly linearly in
/// the final bit count. Schemes memoize computed levels, so each iteration
/// starts from a fresh scheme to measure the real recurrence work.
fn newton_approximant(c: &mut Criterion) {
    let mut group = c.benchmark_group("newton_approximant");
    for bits in [1_000u64, 4_000, 16_000] {
        group.bench_function(format!("{bits}_bits"), |b| {
            b.iter_batched(
                || default_scheme(&field()).expect("√2 certifies"),
                |scheme| black_box(scheme.approximant(black_box(bits))),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

/// Fraction-free integer determinants on dense seeded matrices — the inner
/// loop of the approximant route.
fn integer_determinant(c: &mut Criterion) {
    let mut group = c.benchmark_group("integer_determinant");
    for (p, entry_bits) in [(6usize, 1_000u64), (11, 1_000), (11, 10_000)] {
        let mut rng = ChaCha8Rng::seed_from_u64(p as u64 ^ entry_bits);
        let data: Vec<BigInt> = (0..p * p)
            .map(|_| {
                let mut bytes = vec![0u8; (entry_bits / 8) as usize + 1];
                rng.fill_bytes(&mut bytes);
                BigInt::from_signed_bytes_le(&bytes)
            })
            .collect();
        let m = Matrix::new(p, p, data).expect("square matrix");
        group.bench_function(format!("p{p}_{entry_bits}bit"), |b| {
            b.iter_batched(|| m.clone(), |m| black_box(m.det()), BatchSize::SmallInput)
        });
    }
    group.finish();
}

/// The exact route on the rotate-and-measure fixture (vanishing order 0, so
/// this measures field-valued Gaussian elimination at `z = 1`).
fn exact_route(c: &mut Criterion) {
    let inst = hadamard_instance().expect("fixture builds");
    c.bench_function("exact_route/hadamard_p6", |b| {
        b.iter(|| black_box(decide_exact(black_box(&inst))))
    });

    let inst = random_instance(3, 11).expect("suite instance builds");
    c.bench_function("exact_route/random_p11", |b| {
        b.iter(|| black_box(decide_exact(black_box(&inst))))
    });
}

/// The certified big-integer route, split into its three phases on the
/// rotate-and-measure fixture: constant derivation, Newton approximant at
/// the certified precision, determinant assembly and comparison.
fn approx_route(c: &mut Criterion) {
    let inst = hadamard_instance().expect("fixture builds");
    let constants = derive_constants(&inst).expect("constants derive");
    let scheme = default_scheme(inst.field()).expect("√2 certifies");

    c.bench_function("approx_route/constants_p6", |b| {
        b.iter(|| black_box(derive_constants(black_box(&inst))))
    });
    c.bench_function("approx_route/newton_at_nu_p6", |b| {
        b.iter_batched(
            || default_scheme(inst.field()).expect("√2 certifies"),
            |fresh| black_box(fresh.approximant(black_box(constants.nu))),
            BatchSize::SmallInput,
        )
    });
    c.bench_function("approx_route/determinants_p6", |b| {
        b.iter(|| black_box(decide_approx(black_box(&inst), &scheme, &constants)))
    });
}

criterion_group! {
    name = pipeline;
    config = Criterion::default().sample_size(10);
    targets = newton_approximant, integer_determinant, exact_route, approx_route
}
criterion_main!(pipeline);
