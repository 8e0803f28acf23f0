//! Floating-point spectral-radius estimation.
//!
//! This is the one deliberately inexact corner of the crate: a quick
//! diagnostic for "is this evolution matrix contractive?", never used on the
//! decision path. Power iteration is run on both the matrix and its
//! transpose from several deterministic starting vectors; a run counts as
//! converged when a trailing window of norm-growth estimates agrees to the
//! requested tolerance, and the final answer is the largest converged
//! estimate.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::field::{ComplexFieldElement, FieldElement};
use crate::linalg::{Matrix, Scalar};
use crate::Result;

/// Lossy conversion to a complex double, for handing exact scalars to
/// floating-point routines.
pub trait ToC64 {
    fn to_c64(&self) -> (f64, f64);
}

impl ToC64 for BigInt {
    fn to_c64(&self) -> (f64, f64) {
        (self.to_f64().unwrap_or(f64::INFINITY), 0.0)
    }
}

impl ToC64 for BigRational {
    fn to_c64(&self) -> (f64, f64) {
        (self.to_f64().unwrap_or(f64::INFINITY), 0.0)
    }
}

impl ToC64 for FieldElement {
    fn to_c64(&self) -> (f64, f64) {
        (self.to_f64(), 0.0)
    }
}

impl ToC64 for ComplexFieldElement {
    fn to_c64(&self) -> (f64, f64) {
        self.to_f64_pair()
    }
}

const MAX_ITERS: usize = 20_000;
const WINDOW: usize = 12;
const RANDOM_STARTS: u64 = 4;

fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn matvec(a: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum())
        .collect()
}

/// One power-iteration run; `Some(estimate)` on convergence.
fn run_from(a: &[Vec<Complex64>], start: Vec<Complex64>, tol: f64) -> Option<f64> {
    let norm = l2_norm(&start);
    if norm == 0.0 {
        return None;
    }
    let mut v: Vec<Complex64> = start.iter().map(|z| z / norm).collect();
    let mut window: Vec<f64> = Vec::with_capacity(WINDOW);
    for _ in 0..MAX_ITERS {
        let w = matvec(a, &v);
        let growth = l2_norm(&w);
        if growth == 0.0 {
            // Landed exactly in the kernel: this start certifies nothing
            // beyond a zero lower bound, which is always a valid candidate.
            return Some(0.0);
        }
        window.push(growth);
        if window.len() > WINDOW {
            window.remove(0);
        }
        if window.len() == WINDOW {
            let max = window.iter().cloned().fold(f64::MIN, f64::max);
            let min = window.iter().cloned().fold(f64::MAX, f64::min);
            if max - min <= tol * max.max(1.0) {
                return Some(growth);
            }
        }
        v = w.iter().map(|z| z / growth).collect();
    }
    None
}

fn starts(n: usize) -> Vec<Vec<Complex64>> {
    let mut out = Vec::new();
    out.push(vec![Complex64::new(1.0, 0.0); n]);
    for seed in 0..RANDOM_STARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EC7_0A17 + seed);
        out.push(
            (0..n)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect(),
        );
    }
    out
}

/// Estimate the spectral radius of a square matrix to roughly `tol`
/// relative accuracy. Returns [`Error::NoConvergence`] when no run settles,
/// which happens for matrices whose dominant eigenvalues tie in modulus
/// without tying in value (e.g. pure rotations); the matrices this crate
/// feeds it — completely positive evolution blocks — have a real
/// nonnegative dominant eigenvalue and converge.
pub fn spectral_radius_estimate<T: Scalar + ToC64>(m: &Matrix<T>, tol: f64) -> Result<f64> {
    if m.rows() != m.cols() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(0.0);
    }
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    let a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (re, im) = m[(i, j)].to_c64();
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect();
    let at: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| a[j][i]).collect())
        .collect();

    let mut best: Option<f64> = None;
    for mat in [&a, &at] {
        for start in starts(n) {
            if let Some(est) = run_from(mat, start, tol) {
                best = Some(best.map_or(est, |b: f64| b.max(est)));
            }
        }
    }
    best.ok_or(Error::NoConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;
    use crate::linalg::{int_matrix, rational_matrix};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn diagonal_dominant_eigenvalue() {
        let m = int_matrix(&[&[3, 0], &[0, 2]]);
        let est = spectral_radius_estimate(&m, 1e-10).unwrap();
        assert!((est - 3.0).abs() < 1e-8, "estimate {est}");
    }

    #[test]
    fn stochastic_matrix_has_radius_one() {
        let m = rational_matrix(&[&[(1, 2), (1, 3)], &[(1, 2), (2, 3)]]);
        let est = spectral_radius_estimate(&m, 1e-10).unwrap();
        assert!((est - 1.0).abs() < 1e-8, "estimate {est}");
    }

    #[test]
    fn field_entries_scaled_rotation() {
        // [[1, 1], [-1, 1]]·(√2/2) has both eigenvalues of modulus 1 but is
        // √2/2 times an orthogonal matrix, so every norm ratio is exactly 1.
        let field = NumberField::sqrt2();
        let h = field.generator().scale(
            &BigRational::new(BigInt::from(1), BigInt::from(2)),
        );
        let m = Matrix::from_rows(vec![
            vec![h.clone(), h.clone()],
            vec![h.neg(), h.clone()],
        ])
        .unwrap();
        let est = spectral_radius_estimate(&m, 1e-10).unwrap();
        assert!((est - 1.0).abs() < 1e-9, "estimate {est}");
    }

    #[test]
    fn pure_rotation_reports_no_convergence_or_radius() {
        // A rotation by an irrational angle: eigenvalues e^{±iθ}, tied in
        // modulus. The norm-ratio estimate is exactly 1 at every step (the
        // matrix is orthogonal), so this particular case converges to 1.
        let m = rational_matrix(&[&[(3, 5), (-4, 5)], &[(4, 5), (3, 5)]]);
        let est = spectral_radius_estimate(&m, 1e-10).unwrap();
        assert!((est - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nilpotent_matrix_estimates_zero() {
        let m = int_matrix(&[&[0, 1], &[0, 0]]);
        let est = spectral_radius_estimate(&m, 1e-10).unwrap();
        assert!(est.abs() < 1e-6, "estimate {est}");
    }

    #[test]
    fn rejects_non_square() {
        let m = int_matrix(&[&[1, 2, 3], &[4, 5, 6]]);
        assert!(matches!(
            spectral_radius_estimate(&m, 1e-9),
            Err(Error::NotSquare { .. })
        ));
    }
}
