//! Exact determinants and characteristic polynomials.
//!
//! Two workhorse algorithms:
//!
//! * [`det_bareiss`] — one-step fraction-free elimination for integral
//!   domains (big integers, polynomials over a field). Intermediate entries
//!   stay in the domain; every division is exact by the Sylvester identity,
//!   and row swaps (with sign tracking) handle zero pivots.
//! * [`det_gauss`] — ordinary Gaussian elimination for field scalars
//!   (rationals, field elements), where division is cheap and fraction-free
//!   bookkeeping would only inflate intermediate values.
//!
//! [`det_reference`] is an O(n!) cofactor expansion used as an independent
//! oracle in tests, and [`charpoly`] computes characteristic-polynomial
//! coefficients by the Faddeev–LeVerrier recurrence (divisions only by the
//! integers 1..n, so it stays exact over any field scalar of characteristic
//! zero).

use crate::error::Error;
use crate::Result;

use super::{ExactDivScalar, FieldScalar, Matrix, PolyOverField, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;

fn require_square<T: Scalar>(m: &Matrix<T>) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if m.rows() == 0 {
        return Err(Error::RingMismatch(
            "determinant of an empty matrix (use an explicit convention at the call site)".into(),
        ));
    }
    Ok(m.rows())
}

/// Fraction-free determinant over an integral domain.
pub fn det_bareiss<T: ExactDivScalar>(m: &Matrix<T>) -> Result<T> {
    let n = require_square(m)?;
    let zero = m[(0, 0)].zero_like();
    let one = m[(0, 0)].one_like();
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].clone()).collect())
        .collect();
    let mut negate = false;
    let mut prev = one;
    for k in 0..n - 1 {
        if a[k][k].s_is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].s_is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return Ok(zero),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k].s_mul(&a[i][j]).s_sub(&a[i][k].s_mul(&a[k][j]));
                a[i][j] = num.s_exact_div(&prev);
            }
            a[i][k] = zero.clone();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { d.s_neg() } else { d })
}

/// Gaussian-elimination determinant over a field.
pub fn det_gauss<T: FieldScalar>(m: &Matrix<T>) -> Result<T> {
    let n = require_square(m)?;
    let zero = m[(0, 0)].zero_like();
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].clone()).collect())
        .collect();
    let mut det = m[(0, 0)].one_like();
    let mut negate = false;
    for k in 0..n {
        if a[k][k].s_is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].s_is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return Ok(zero),
            }
        }
        let pivot = a[k][k].clone();
        det = det.s_mul(&pivot);
        let inv = pivot.s_inv().expect("nonzero pivot is invertible in a field");
        for i in k + 1..n {
            if a[i][k].s_is_zero() {
                continue;
            }
            let factor = a[i][k].s_mul(&inv);
            for j in k..n {
                let delta = factor.s_mul(&a[k][j]);
                a[i][j] = a[i][j].s_sub(&delta);
            }
        }
    }
    Ok(if negate { det.s_neg() } else { det })
}

/// Cofactor-expansion determinant — exponential, test oracle only.
pub fn det_reference<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    let n = require_square(m)?;
    if n == 1 {
        return Ok(m[(0, 0)].clone());
    }
    let mut acc = m[(0, 0)].zero_like();
    for j in 0..n {
        if m[(0, j)].s_is_zero() {
            continue;
        }
        let sub = det_reference(&m.minor(0, j)?)?;
        let term = m[(0, j)].s_mul(&sub);
        acc = if j % 2 == 0 {
            acc.s_add(&term)
        } else {
            acc.s_sub(&term)
        };
    }
    Ok(acc)
}

/// Characteristic polynomial coefficients of a square matrix, little-endian:
/// `det(xI − A) = Σ_k c[k]·x^k` with `c[n] = 1`, via Faddeev–LeVerrier.
/// The only divisions are by 1, 2, …, n.
pub fn charpoly<T: FieldScalar>(m: &Matrix<T>) -> Result<Vec<T>> {
    let n = require_square(m)?;
    let one = m[(0, 0)].one_like();
    let mut c = vec![one.zero_like(); n + 1];
    c[n] = one.clone();
    let mut aux = Matrix::identity(n, &m[(0, 0)]);
    for k in 1..=n {
        let mk = m.matmul(&aux)?;
        // c[n−k] = −tr(M_k)/k
        let mut k_scalar = one.zero_like();
        for _ in 0..k {
            k_scalar = k_scalar.s_add(&one);
        }
        let tr = mk.trace()?;
        c[n - k] = tr.s_neg().s_div(&k_scalar)?;
        // N_{k} = M_k + c[n−k]·I
        aux = mk;
        for i in 0..n {
            let v = aux[(i, i)].s_add(&c[n - k]);
            aux.set(i, i, v);
        }
    }
    Ok(c)
}

/// Preferred determinant strategy per concrete scalar: fraction-free for
/// integral domains (integers, polynomial rings), Gaussian for fields.
pub trait DetDefault: Scalar {
    fn det_default(m: &Matrix<Self>) -> Result<Self>;
}

impl DetDefault for BigInt {
    fn det_default(m: &Matrix<Self>) -> Result<Self> {
        det_bareiss(m)
    }
}

impl DetDefault for BigRational {
    fn det_default(m: &Matrix<Self>) -> Result<Self> {
        det_gauss(m)
    }
}

impl DetDefault for crate::field::FieldElement {
    fn det_default(m: &Matrix<Self>) -> Result<Self> {
        det_gauss(m)
    }
}

impl DetDefault for crate::field::ComplexFieldElement {
    fn det_default(m: &Matrix<Self>) -> Result<Self> {
        det_gauss(m)
    }
}

impl DetDefault for PolyOverField {
    fn det_default(m: &Matrix<Self>) -> Result<Self> {
        det_bareiss(m)
    }
}

impl<T: DetDefault> Matrix<T> {
    /// Determinant via the scalar's preferred exact algorithm.
    pub fn det(&self) -> Result<T> {
        T::det_default(self)
    }
}
