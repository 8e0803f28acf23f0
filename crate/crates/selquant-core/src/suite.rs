//! Deterministic generators of random — but exactly valid — test instances.
//!
//! Everything here is built so that validity is an algebraic identity, not
//! an approximation: unit vectors come from chains of Givens rotations whose
//! cosine/sine pairs satisfy `c² + s² = 1` exactly in the field (Pythagorean
//! pairs like `(3/5, 4/5)`, plus `(√½, √½)` when the field has it), unitaries
//! are products of such rotations with permutations, sign flips, and — in the
//! complex variant — `i`-phases. Kraus families are unitaries scaled by the
//! coordinates of a unit vector, optionally split by a projector, so
//! completeness `Σ A†A = I` holds by construction and `validate()` is a
//! tautology rather than a tolerance check.
//!
//! All generators take a caller-provided [`ChaCha8Rng`] (or seed) and are
//! fully reproducible.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{Field, FieldElement};
use crate::frontends::sqrt_in_field;
use crate::linalg::Matrix;
use crate::process::{DensityMatrix, SelectiveOperation};
use crate::ComplexFieldElement;
use crate::Result;

fn brat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact rotation pairs `(c, s)` with `c² + s² = 1` available in `field`,
/// cheapest denominator first (the 45° rotation `(√½, √½)` when the field
/// has it, then the Pythagorean pairs in increasing denominator).
fn rotation_pairs(field: &Field) -> Vec<(FieldElement, FieldElement)> {
    let mut pairs = Vec::with_capacity(4);
    if let Some(s) = sqrt_in_field(&field.from_rational(brat(1, 2))) {
        pairs.push((s.clone(), s));
    }
    pairs.extend([
        (
            field.from_rational(brat(3, 5)),
            field.from_rational(brat(4, 5)),
        ),
        (
            field.from_rational(brat(5, 13)),
            field.from_rational(brat(12, 13)),
        ),
        (
            field.from_rational(brat(8, 17)),
            field.from_rational(brat(15, 17)),
        ),
    ]);
    pairs
}

/// Pick a rotation pair, biased toward the cheapest one. Instance entry
/// denominators multiply with every rotation, and the certified precision
/// exponents grow linearly in their bit-length (with the approximant length
/// and determinant sizes growing quadratically on top of that), so the
/// expensive 13- and 17-denominator pairs are kept as occasional variety
/// rather than the norm.
fn pick_pair<'a>(
    pairs: &'a [(FieldElement, FieldElement)],
    rng: &mut ChaCha8Rng,
) -> &'a (FieldElement, FieldElement) {
    let raw = rng.gen_range(0..pairs.len() + 2);
    &pairs[if raw >= pairs.len() { 0 } else { raw }]
}

/// A vector with `Σ v_k² = 1` exactly: start at `e_1` and stir with random
/// Givens rotations (each preserves the sum of squares identically).
///
/// The number of rotations is kept small on purpose: every rotation
/// multiplies coordinate denominators by up to 17, and everything downstream
/// of an instance — certified precision exponents, approximant lengths, the
/// bit-size of the determinants — scales with the bit-length of those
/// denominators. A handful of rotations already mixes all coordinates while
/// keeping random instances cheap to decide.
pub fn random_unit_vector(field: &Field, len: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    assert!(len >= 1, "unit vectors need at least one coordinate");
    let mut v = vec![field.zero(); len];
    v[0] = field.one();
    if len == 1 {
        return v;
    }
    let pairs = rotation_pairs(field);
    for _ in 0..len {
        let i = rng.gen_range(0..len);
        let mut j = rng.gen_range(0..len - 1);
        if j >= i {
            j += 1;
        }
        let (c, s) = pick_pair(&pairs, rng);
        let (vi, vj) = (v[i].clone(), v[j].clone());
        v[i] = vi.mul(c).sub(&vj.mul(s));
        v[j] = vi.mul(s).add(&vj.mul(c));
    }
    v
}

/// An exact unitary: a product of embedded Givens rotations, coordinate
/// swaps, and sign flips; with `phases`, also diagonal `i`-phases (making
/// the result genuinely complex).
///
/// As with [`random_unit_vector`], the round count stays small so entry
/// denominators stay small: decision budgets grow linearly in their
/// bit-length, and big-integer determinant work grows faster than that.
pub fn random_unitary(
    field: &Field,
    n: usize,
    phases: bool,
    rng: &mut ChaCha8Rng,
) -> Matrix<ComplexFieldElement> {
    let zero = ComplexFieldElement::zero(field);
    let mut u = Matrix::identity(n, &zero);
    if n == 1 {
        if phases {
            u.set(0, 0, ComplexFieldElement::i(field));
        }
        return u;
    }
    let pairs = rotation_pairs(field);
    let rounds = n + 1;
    for round in 0..rounds {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..4) {
            // left-multiply by a Givens rotation in the (i, j) plane
            0 | 1 => {
                let (c, s) = pick_pair(&pairs, rng);
                let c = ComplexFieldElement::from_real(c.clone());
                let s = ComplexFieldElement::from_real(s.clone());
                for col in 0..n {
                    let a = u[(i, col)].clone();
                    let b = u[(j, col)].clone();
                    u.set(i, col, a.mul(&c).sub(&b.mul(&s)));
                    u.set(j, col, a.mul(&s).add(&b.mul(&c)));
                }
            }
            // swap two rows
            2 => {
                for col in 0..n {
                    let a = u[(i, col)].clone();
                    let b = u[(j, col)].clone();
                    u.set(i, col, b);
                    u.set(j, col, a);
                }
            }
            // flip a row sign; with phases, sometimes multiply by i instead
            _ => {
                let factor = if phases && rng.gen_bool(0.5) {
                    ComplexFieldElement::i(field)
                } else {
                    ComplexFieldElement::one(field).neg()
                };
                for col in 0..n {
                    let a = u[(i, col)].clone();
                    u.set(i, col, a.mul(&factor));
                }
            }
        }
        // guarantee at least one phase so "complex" unitaries are complex
        if phases && round == 0 {
            let k = rng.gen_range(0..n);
            let i_elem = ComplexFieldElement::i(field);
            for col in 0..n {
                let a = u[(k, col)].clone();
                u.set(k, col, a.mul(&i_elem));
            }
        }
    }
    u
}

/// A random exact density matrix `V·diag(w)·V†` with unit-trace weights
/// `w_k = v_k²` from a random unit vector.
pub fn random_density(
    field: &Field,
    n: usize,
    phases: bool,
    rng: &mut ChaCha8Rng,
) -> Result<DensityMatrix> {
    let weights = random_unit_vector(field, n, rng);
    let v = random_unitary(field, n, phases, rng);
    let zero = ComplexFieldElement::zero(field);
    let mut diag = Matrix::zeros(n, n, &zero);
    for (k, w) in weights.iter().enumerate() {
        diag.set(k, k, ComplexFieldElement::from_real(w.mul(w)));
    }
    let m = v.matmul(&diag)?.matmul(&v.dagger())?;
    DensityMatrix::new(m)
}

/// A random exactly-complete selective operation on dimension `n` with the
/// given number of outputs: unitaries scaled by unit-vector coordinates,
/// with outputs 0 and 1 always inhabited, and an occasional projector split
/// for rank-deficient Kraus operators.
pub fn random_operation(
    field: &Field,
    n: usize,
    outputs: usize,
    phases: bool,
    rng: &mut ChaCha8Rng,
) -> Result<SelectiveOperation> {
    assert!(outputs >= 2, "decision processes need at least outputs 0 and 1");
    let pieces = rng.gen_range(2..=3).max(2);
    let amps = random_unit_vector(field, pieces, rng);
    let zero = ComplexFieldElement::zero(field);
    let mut counters = vec![0usize; outputs];
    let mut entries = Vec::new();
    for (k, amp) in amps.iter().enumerate() {
        let u = random_unitary(field, n, phases, rng);
        let scaled = u.scale(&ComplexFieldElement::from_real(amp.clone()));
        // outputs 0 and 1 are always used; later pieces land anywhere
        let out = if k < 2 { k } else { rng.gen_range(0..outputs) };
        if n >= 2 && rng.gen_bool(1.0 / 3.0) {
            // split by a nontrivial diagonal projector: P·A and (I−P)·A
            // jointly contribute A†A to the completeness sum, so the two
            // halves may even carry different outputs
            let cut = rng.gen_range(1..n);
            let mut p = Matrix::zeros(n, n, &zero);
            for d in 0..cut {
                p.set(d, d, ComplexFieldElement::one(field));
            }
            let q = Matrix::identity(n, &zero).sub(&p)?;
            let other = rng.gen_range(0..outputs);
            for (dest, proj) in [(out, &p), (other, &q)] {
                counters[dest] += 1;
                entries.push(((dest, counters[dest]), proj.matmul(&scaled)?));
            }
        } else {
            counters[out] += 1;
            entries.push(((out, counters[out]), scaled));
        }
    }
    let branches = counters.iter().copied().max().unwrap_or(1).max(1);
    SelectiveOperation::new(field, n, outputs, branches, entries)
}

/// A named, ready-to-decide instance.
pub struct SuiteInstance {
    pub name: String,
    pub op: SelectiveOperation,
    pub rho: DensityMatrix,
}

/// `count` real operation/state pairs over `field`, dimensions cycling
/// through 2 and 3, all exactly valid. Seeded and reproducible.
pub fn real_suite(field: &Field, count: usize, seed: u64) -> Result<Vec<SuiteInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let n = if k % 3 == 2 { 3 } else { 2 };
        let outputs = if k % 4 == 3 { 3 } else { 2 };
        let op = random_operation(field, n, outputs, false, &mut rng)?;
        let rho = random_density(field, n, false, &mut rng)?;
        out.push(SuiteInstance {
            name: format!("real[{k}] (n = {n}, outputs = {outputs})"),
            op,
            rho,
        });
    }
    Ok(out)
}

/// `count` genuinely complex operation/state pairs over `field` (dimension
/// 2, so the realified decision pipeline stays tractable; output alphabets
/// alternate between binary and ternary).
pub fn complex_suite(field: &Field, count: usize, seed: u64) -> Result<Vec<SuiteInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let outputs = if k % 2 == 1 { 3 } else { 2 };
        let op = random_operation(field, 2, outputs, true, &mut rng)?;
        let rho = random_density(field, 2, true, &mut rng)?;
        out.push(SuiteInstance {
            name: format!("complex[{k}] (n = 2)"),
            op,
            rho,
        });
    }
    Ok(out)
}

/// Cutpoints worth testing: the rational landmarks plus an irrational one
/// (`√(1/8) = √2/4`) whenever the field supports it.
pub fn beta_values(field: &Field) -> Vec<FieldElement> {
    let mut betas: Vec<FieldElement> = [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)]
        .into_iter()
        .map(|(n, d)| field.from_rational(brat(n, d)))
        .collect();
    if let Some(b) = sqrt_in_field(&field.from_rational(brat(1, 8))) {
        betas.push(b);
    }
    betas
}

/// The canonical worked example: rotate by 45° (the Hadamard-like
/// reflection), then read the state out — output 1 on basis state `|1⟩`.
/// Starting from `|0⟩` the halting probability is exactly 1, approached as
/// `1 − 2^{−(t+1)}` with each extra step.
pub fn hadamard_measure(field: &Field) -> Result<(SelectiveOperation, DensityMatrix)> {
    let s = sqrt_in_field(&field.from_rational(brat(1, 2))).ok_or_else(|| {
        crate::error::Error::RootNotInField(
            "the 45° rotation needs √(1/2); use a field containing √2".into(),
        )
    })?;
    let sc = ComplexFieldElement::from_real(s);
    let zero = ComplexFieldElement::zero(field);
    let a0 = Matrix::from_rows(vec![
        vec![sc.clone(), sc.clone()],
        vec![zero.clone(), zero.clone()],
    ])
    .unwrap();
    let a1 = Matrix::from_rows(vec![
        vec![zero.clone(), zero.clone()],
        vec![sc.clone(), sc.neg()],
    ])
    .unwrap();
    let op = SelectiveOperation::new(field, 2, 2, 1, vec![((0, 1), a0), ((1, 1), a1)])?;
    let rho = DensityMatrix::basis(field, 2, 0)?;
    Ok((op, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;

    #[test]
    fn unit_vectors_have_unit_square_sum() {
        let field = NumberField::sqrt2();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for len in 1..=6 {
            let v = random_unit_vector(&field, len, &mut rng);
            let sum = v
                .iter()
                .fold(field.zero(), |acc, x| acc.add(&x.mul(x)));
            assert_eq!(sum, field.one(), "len = {len}");
        }
    }

    #[test]
    fn random_unitaries_are_exactly_unitary() {
        for (name, field) in [
            ("sqrt2", NumberField::sqrt2()),
            ("golden", NumberField::golden()),
            ("rational", NumberField::rational()),
        ] {
            let mut rng = ChaCha8Rng::seed_from_u64(23);
            for n in 1..=4 {
                for phases in [false, true] {
                    let u = random_unitary(&field, n, phases, &mut rng);
                    let id = Matrix::identity(n, &ComplexFieldElement::zero(&field));
                    assert_eq!(
                        u.dagger().matmul(&u).unwrap(),
                        id,
                        "{name}, n = {n}, phases = {phases}"
                    );
                }
            }
        }
    }

    #[test]
    fn complex_unitaries_are_genuinely_complex() {
        let field = NumberField::sqrt2();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for n in 2..=3 {
            let u = random_unitary(&field, n, true, &mut rng);
            assert!(
                u.data().iter().any(|e| !e.im.is_zero()),
                "n = {n}: expected at least one imaginary entry"
            );
        }
    }

    #[test]
    fn random_densities_pass_their_own_validation() {
        let field = NumberField::sqrt2();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for n in 1..=3 {
            for phases in [false, true] {
                // DensityMatrix::new re-checks Hermitian/trace/PSD exactly
                random_density(&field, n, phases, &mut rng).unwrap();
            }
        }
    }

    #[test]
    fn suite_operations_are_complete_and_reproducible() {
        let field = NumberField::sqrt2();
        let suite = real_suite(&field, 8, 7).unwrap();
        assert_eq!(suite.len(), 8);
        for inst in &suite {
            inst.op.validate().unwrap_or_else(|e| panic!("{}: {e}", inst.name));
            assert!(inst.op.is_real(), "{}", inst.name);
            assert!(inst.rho.is_real(), "{}", inst.name);
        }
        // regenerating with the same seed gives the same operations
        let again = real_suite(&field, 8, 7).unwrap();
        for (a, b) in suite.iter().zip(again.iter()) {
            assert_eq!(
                a.op.entries().collect::<Vec<_>>(),
                b.op.entries().collect::<Vec<_>>()
            );
            assert_eq!(a.rho.matrix(), b.rho.matrix());
        }
        // and a different seed does not
        let other = real_suite(&field, 8, 8).unwrap();
        assert!(suite.iter().zip(other.iter()).any(|(a, b)| {
            a.op.entries().collect::<Vec<_>>() != b.op.entries().collect::<Vec<_>>()
        }));
    }

    #[test]
    fn complex_suite_exercises_the_complex_path() {
        let field = NumberField::sqrt2();
        let suite = complex_suite(&field, 6, 19).unwrap();
        for inst in &suite {
            inst.op.validate().unwrap_or_else(|e| panic!("{}: {e}", inst.name));
        }
        assert!(
            suite.iter().any(|inst| !inst.op.is_real() || !inst.rho.is_real()),
            "a complex suite should contain complex instances"
        );
    }

    #[test]
    fn beta_grid_includes_an_irrational_cutpoint_when_possible() {
        let sqrt2 = NumberField::sqrt2();
        let betas = beta_values(&sqrt2);
        assert_eq!(betas.len(), 6);
        let irrational = &betas[5];
        assert_eq!(irrational.mul(irrational), sqrt2.from_rational(brat(1, 8)));

        let rational = NumberField::rational();
        assert_eq!(beta_values(&rational).len(), 5);
    }

    #[test]
    fn hadamard_fixture_converges_to_one() {
        let field = NumberField::sqrt2();
        let (op, rho) = hadamard_measure(&field).unwrap();
        op.validate().unwrap();
        // halting probability after T steps is 1 − 2^{−(T+1)}
        let t: u64 = 6;
        let expected = field.one().sub(&field.from_rational(brat(1, 128)));
        assert_eq!(
            op.halting_probability_truncated(&rho, t).unwrap(),
            expected
        );
    }
}
