//! Univariate polynomials with number-field coefficients.
//!
//! These appear as matrix entries when forming `det(I − z·M)` over
//! `ℚ[α][z]`: the determinant of a matrix of such polynomials is again such
//! a polynomial, computed fraction-free (polynomial rings over a field are
//! integral domains with exact division by nonzero divisors of products —
//! exactly what Bareiss elimination needs).

use std::fmt;

use crate::field::{Field, FieldElement};
use crate::linalg::{ExactDivScalar, Scalar};

/// Dense little-endian polynomial over a number field.
#[derive(Clone)]
pub struct PolyOverField {
    field: Field,
    coeffs: Vec<FieldElement>,
}

impl PartialEq for PolyOverField {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_root(&other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for PolyOverField {}

impl PolyOverField {
    pub fn new(field: &Field, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().map_or(false, FieldElement::is_zero) {
            coeffs.pop();
        }
        Self {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &Field) -> Self {
        Self {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: FieldElement) -> Self {
        let field = c.field().clone();
        Self::new(&field, vec![c])
    }

    /// The monomial `z`.
    pub fn x(field: &Field) -> Self {
        Self::new(field, vec![field.zero(), field.one()])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> FieldElement {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero_poly(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Coefficients of the expansion around 1: returns `t` with
    /// `q(z) = Σ_j t[j]·(z − 1)^j`, computed by repeated synthetic division
    /// by `(z − 1)`. Exactly `deg q + 1` entries (empty for the zero
    /// polynomial).
    pub fn taylor_at_one(&self) -> Vec<FieldElement> {
        let mut work = self.coeffs.clone();
        let mut out = Vec::with_capacity(work.len());
        while !work.is_empty() {
            // Ruffini step at root 1: quotient coefficients top-down,
            // remainder = value of `work` at 1.
            let mut quotient = vec![self.field.zero(); work.len() - 1];
            let mut carry = self.field.zero();
            for k in (1..work.len()).rev() {
                carry = work[k].add(&carry);
                quotient[k - 1] = carry.clone();
            }
            let remainder = work[0].add(&carry);
            out.push(remainder);
            work = quotient;
        }
        out
    }

    fn add_impl(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k).add(&other.coeff(k))).collect();
        Self::new(&self.field, coeffs)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero_poly() || other.is_zero_poly() {
            return Self::zero(&self.field);
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::new(&self.field, coeffs)
    }

    /// Exact division; panics if the remainder is nonzero (callers inside
    /// fraction-free elimination have an exactness guarantee).
    fn exact_div_impl(&self, other: &Self) -> Self {
        assert!(!other.is_zero_poly(), "polynomial division by zero");
        if self.is_zero_poly() {
            return Self::zero(&self.field);
        }
        let db = other.degree().unwrap();
        let da = self.degree().unwrap();
        assert!(da >= db, "inexact polynomial division (degree underflow)");
        let lead_inv = other.coeffs[db]
            .inv()
            .expect("leading coefficient of a nonzero divisor is invertible");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![self.field.zero(); da - db + 1];
        for k in (0..=da - db).rev() {
            let factor = rem[k + db].mul(&lead_inv);
            if factor.is_zero() {
                continue;
            }
            quot[k] = factor.clone();
            for j in 0..=db {
                rem[k + j] = rem[k + j].sub(&factor.mul(&other.coeffs[j]));
            }
        }
        assert!(
            rem.iter().all(FieldElement::is_zero),
            "inexact polynomial division in fraction-free elimination"
        );
        Self::new(&self.field, quot)
    }
}

impl fmt::Debug for PolyOverField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero_poly() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})·z"),
                _ => format!("({c})·z^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Scalar for PolyOverField {
    fn zero_like(&self) -> Self {
        Self::zero(&self.field)
    }
    fn one_like(&self) -> Self {
        Self::constant(self.field.one())
    }
    fn s_add(&self, rhs: &Self) -> Self {
        self.add_impl(rhs)
    }
    fn s_sub(&self, rhs: &Self) -> Self {
        self.add_impl(&rhs.s_neg())
    }
    fn s_mul(&self, rhs: &Self) -> Self {
        self.mul_impl(rhs)
    }
    fn s_neg(&self) -> Self {
        Self::new(
            &self.field,
            self.coeffs.iter().map(FieldElement::neg).collect(),
        )
    }
    fn s_is_zero(&self) -> bool {
        self.is_zero_poly()
    }
}

impl ExactDivScalar for PolyOverField {
    fn s_exact_div(&self, rhs: &Self) -> Self {
        self.exact_div_impl(rhs)
    }
}
