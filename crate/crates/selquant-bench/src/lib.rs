//! Benchmark-only crate: shared fixtures for the criterion benches in
//! `benches/`. The library itself exposes a few deterministic instance
//! builders so every bench measures the same inputs on every run.

use selquant_core::decide::DecisionInstance;
use selquant_core::field::Field;
use selquant_core::process::build_decision_matrix;
use selquant_core::suite;
use selquant_core::{FieldElement, NumberField, Result};

use num_bigint::BigInt;
use num_rational::BigRational;

/// `ℚ[√2]` — the workhorse field for all fixtures.
pub fn field() -> Field {
    NumberField::sqrt2()
}

fn half(field: &Field) -> FieldElement {
    field.from_rational(BigRational::new(BigInt::from(1), BigInt::from(2)))
}

/// The rotate-and-measure fixture at cutpoint 1/2: dimension 2, decision
/// matrix dimension 6, halting probability exactly 1.
pub fn hadamard_instance() -> Result<DecisionInstance> {
    let field = field();
    let (op, rho) = suite::hadamard_measure(&field)?;
    let dm = build_decision_matrix(&op, &rho, &half(&field))?;
    Ok(DecisionInstance::from_decision_matrix(&dm))
}

/// A seeded random instance of Hilbert dimension `n` (decision dimension
/// `n² + 2`) over `ℚ[√2]`, real entries, cutpoint 1/2.
pub fn random_instance(n: usize, seed: u64) -> Result<DecisionInstance> {
    use rand_chacha::rand_core::SeedableRng;
    let field = field();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let op = suite::random_operation(&field, n, 2, false, &mut rng)?;
    let rho = suite::random_density(&field, n, false, &mut rng)?;
    let dm = build_decision_matrix(&op, &rho, &half(&field))?;
    Ok(DecisionInstance::from_decision_matrix(&dm))
}
