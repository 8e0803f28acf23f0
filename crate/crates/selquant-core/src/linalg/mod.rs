//! Dense exact matrices over the scalar rings used throughout the crate.
//!
//! Everything is generic over a small [`Scalar`] trait implemented by
//! `BigInt`, `BigRational`, [`FieldElement`], [`ComplexFieldElement`] and
//! [`PolyOverField`]. Zero/one are *instance-based* (`zero_like`) because
//! field elements and polynomials carry their field handle and cannot be
//! conjured out of thin air.
//!
//! Indexing is 0-based throughout. `minor(i, j)` removes row `i` and column
//! `j` (so `minor(0, 1)` of `[[1,2],[3,4]]` is `[[3]]`).

mod det;
mod poly;
mod spectral;

pub use det::{charpoly, det_bareiss, det_gauss, det_reference, DetDefault};
pub use poly::PolyOverField;
pub use spectral::{spectral_radius_estimate, ToC64};

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::field::{ComplexFieldElement, FieldElement};
use crate::Result;

/// Ring operations needed by the matrix code. `s_conj` is the identity on
/// real scalar rings and complex conjugation on complexified elements.
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn s_add(&self, rhs: &Self) -> Self;
    fn s_sub(&self, rhs: &Self) -> Self;
    fn s_mul(&self, rhs: &Self) -> Self;
    fn s_neg(&self) -> Self;
    fn s_is_zero(&self) -> bool;
    fn s_conj(&self) -> Self {
        self.clone()
    }
}

/// Integral domains with exact division, as required by fraction-free
/// elimination. `s_exact_div` panics on inexact division: inside Bareiss
/// the divisions are exact by the Sylvester identity, so inexactness is a
/// bug, not a data condition.
pub trait ExactDivScalar: Scalar {
    fn s_exact_div(&self, rhs: &Self) -> Self;
}

/// Scalars forming a field (invertible nonzero elements).
pub trait FieldScalar: Scalar {
    fn s_inv(&self) -> Result<Self>;
    fn s_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.s_mul(&rhs.s_inv()?))
    }
}

// ---- scalar impls -----------------------------------------------------------

impl Scalar for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn s_add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn s_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn s_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn s_neg(&self) -> Self {
        -self
    }
    fn s_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl ExactDivScalar for BigInt {
    fn s_exact_div(&self, rhs: &Self) -> Self {
        let (q, r) = num_integer::Integer::div_rem(self, rhs);
        assert!(r.is_zero(), "inexact integer division in fraction-free elimination");
        q
    }
}

impl Scalar for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn s_add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn s_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn s_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn s_neg(&self) -> Self {
        -self
    }
    fn s_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl FieldScalar for BigRational {
    fn s_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(BigRational::one() / self.clone())
    }
}

impl Scalar for FieldElement {
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn one_like(&self) -> Self {
        self.field().one()
    }
    fn s_add(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn s_sub(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn s_mul(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn s_neg(&self) -> Self {
        self.neg()
    }
    fn s_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl FieldScalar for FieldElement {
    fn s_inv(&self) -> Result<Self> {
        self.inv()
    }
}

impl Scalar for ComplexFieldElement {
    fn zero_like(&self) -> Self {
        ComplexFieldElement::zero(self.field())
    }
    fn one_like(&self) -> Self {
        ComplexFieldElement::one(self.field())
    }
    fn s_add(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn s_sub(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn s_mul(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn s_neg(&self) -> Self {
        self.neg()
    }
    fn s_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn s_conj(&self) -> Self {
        self.conj()
    }
}

impl FieldScalar for ComplexFieldElement {
    fn s_inv(&self) -> Result<Self> {
        ComplexFieldElement::one(self.field()).div(self)
    }
}

/// A dense row-major matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::RingMismatch(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::RingMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zeros(rows: usize, cols: usize, exemplar: &T) -> Self {
        Self {
            rows,
            cols,
            data: vec![exemplar.zero_like(); rows * cols],
        }
    }

    pub fn identity(n: usize, exemplar: &T) -> Self {
        let mut m = Self::zeros(n, n, exemplar);
        for i in 0..n {
            m[(i, i)] = exemplar.one_like();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let c = self.cols;
        self.data[i * c + j] = v;
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Conjugate transpose (equals `transpose` over real scalar rings).
    pub fn dagger(&self) -> Self {
        let mut out = self.transpose();
        for v in &mut out.data {
            *v = v.s_conj();
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::RingMismatch("matrix addition shape mismatch".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.s_add(b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::RingMismatch("matrix subtraction shape mismatch".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.s_sub(b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.s_mul(c)).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::RingMismatch(format!(
                "matmul shape mismatch: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.data.is_empty() || other.data.is_empty() {
            return Err(Error::RingMismatch("matmul on empty matrix".into()));
        }
        let zero = self.data[0].zero_like();
        let mut out = Matrix::zeros(self.rows, other.cols, &zero);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.s_is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.s_is_zero() {
                        continue;
                    }
                    let prod = a.s_mul(b);
                    let cur = out[(i, j)].s_add(&prod);
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.rows == 0 {
            return Err(Error::RingMismatch("trace of empty matrix".into()));
        }
        let mut acc = self.data[0].zero_like();
        for i in 0..self.rows {
            acc = acc.s_add(&self[(i, i)]);
        }
        Ok(acc)
    }

    /// Kronecker product, defined for arbitrary rectangular shapes:
    /// `(A ⊗ B)[i·p + k, j·q + l] = A[i,j] · B[k,l]` for `B` of shape `p×q`.
    pub fn kron(&self, other: &Self) -> Self {
        let p = other.rows;
        let q = other.cols;
        let rows = self.rows * p;
        let cols = self.cols * q;
        if self.data.is_empty() || other.data.is_empty() {
            return Self {
                rows,
                cols,
                data: Vec::new(),
            };
        }
        let zero = self.data[0].zero_like();
        let mut out = Matrix::zeros(rows, cols, &zero);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.s_is_zero() {
                    continue;
                }
                for k in 0..p {
                    for l in 0..q {
                        let b = &other[(k, l)];
                        if b.s_is_zero() {
                            continue;
                        }
                        out.set(i * p + k, j * q + l, a.s_mul(b));
                    }
                }
            }
        }
        out
    }

    /// Row-major vectorization as a column vector:
    /// `vec(A)[i·cols + j] = A[i,j]`. With this convention,
    /// `vec(A·B·C) = (A ⊗ Cᵀ)·vec(B)`.
    pub fn vectorize(&self) -> Matrix<T> {
        Matrix {
            rows: self.rows * self.cols,
            cols: 1,
            data: self.data.clone(),
        }
    }

    /// Delete row `i` and column `j` (0-based).
    pub fn minor(&self, i: usize, j: usize) -> Result<Matrix<T>> {
        if i >= self.rows || j >= self.cols {
            return Err(Error::IndexOutOfRange(format!(
                "minor({i},{j}) of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for r in 0..self.rows {
            if r == i {
                continue;
            }
            for c in 0..self.cols {
                if c == j {
                    continue;
                }
                data.push(self[(r, c)].clone());
            }
        }
        Ok(Matrix {
            rows: self.rows - 1,
            cols: self.cols - 1,
            data,
        })
    }

    /// Entry `(i, j)` of `A^t`, computed by `t` vector–matrix products
    /// (O(t·n²) scalar multiplications; the full power is never formed).
    pub fn pow_entry(&self, t: u64, i: usize, j: usize) -> Result<T> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if i >= self.rows || j >= self.cols {
            return Err(Error::IndexOutOfRange(format!(
                "pow_entry({i},{j}) of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let zero = self.data[0].zero_like();
        let one = self.data[0].one_like();
        // row vector e_i, propagated through t multiplications by self
        let mut v: Vec<T> = vec![zero.clone(); self.rows];
        v[i] = one;
        for _ in 0..t {
            let mut next = vec![zero.clone(); self.cols];
            for (k, vk) in v.iter().enumerate() {
                if vk.s_is_zero() {
                    continue;
                }
                for c in 0..self.cols {
                    let m = &self[(k, c)];
                    if m.s_is_zero() {
                        continue;
                    }
                    next[c] = next[c].s_add(&vk.s_mul(m));
                }
            }
            v = next;
        }
        Ok(v[j].clone())
    }

    /// True iff `A == A†`.
    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.dagger()
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

/// Exact rational helpers for tests and fixtures.
pub fn rational_matrix(rows: &[&[(i64, i64)]]) -> Matrix<BigRational> {
    let data = rows
        .iter()
        .flat_map(|row| {
            row.iter()
                .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
        })
        .collect();
    Matrix::new(rows.len(), rows.first().map_or(0, |r| r.len()), data).unwrap()
}

/// Integer matrix literal helper.
pub fn int_matrix(rows: &[&[i64]]) -> Matrix<BigInt> {
    let data = rows
        .iter()
        .flat_map(|row| row.iter().map(|&n| BigInt::from(n)))
        .collect();
    Matrix::new(rows.len(), rows.first().map_or(0, |r| r.len()), data).unwrap()
}
