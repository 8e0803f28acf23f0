//! Real algebraic number fields `ℚ[α]` and their elements.
//!
//! A [`NumberField`] is described by an integer minimal polynomial `p`
//! (square-free, certified by `gcd(p, p') = const`) together with a rational
//! interval that isolates exactly one real root α (certified by a Sturm
//! count). Elements are rational coefficient vectors of length `deg p`
//! representing `c₀ + c₁α + … + c_{d−1}α^{d−1}`; all arithmetic is exact.
//!
//! Sign determination never touches floating point: the isolating interval
//! is bisected until the interval evaluation of the element's coefficient
//! polynomial has a definite sign. Under an *irreducible* minimal polynomial
//! every nonzero representation has a nonzero value, so this terminates; the
//! square-freeness certificate alone does not exclude a reducible minimal
//! polynomial, in which case a nonzero vector can represent the value zero
//! and sign determination aborts loudly after a generous iteration cap (see
//! [`NumberField::new_irreducibility_checked`] for the optional stronger
//! check).
//!
//! The module also houses the two analytic bounds the certified decision
//! pipeline is built on: a Mahler-type lower bound on `|g(α)|` for integer
//! polynomials `g` ([`mahler_bound`]) and a perturbation bound for rational
//! functions evaluated near a point where the denominator is bounded away
//! from zero ([`rational_perturbation_bound`]).

use std::fmt;
use std::sync::{Arc, Mutex, OnceLock, Weak};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::intpoly::{rat, IntPolynomial};
use crate::interval::RationalInterval;
use crate::Result;

/// Shared handle to a number field. Elements hold one of these; cloning is
/// cheap and all clones share the same root-refinement cache.
pub type Field = Arc<NumberField>;

/// A real algebraic number field `ℚ[α]`.
pub struct NumberField {
    minpoly: IntPolynomial,
    degree: usize,
    /// Monic rational coefficients of the minimal polynomial (length d+1).
    monic: Vec<BigRational>,
    /// `reduction[t]` gives α^{d+t} as a vector in the power basis, t < d−1.
    reduction: Vec<Vec<BigRational>>,
    /// Isolating interval as supplied at construction (identity of the root).
    original: RationalInterval,
    /// Monotonically refined isolating interval (cache; never widens).
    refined: Mutex<RationalInterval>,
    /// Cached double-precision approximation of α (diagnostics only).
    approx: OnceLock<f64>,
    /// Back-reference so `&self` methods can mint elements that share the Arc.
    weak: Weak<NumberField>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("minpoly", &self.minpoly)
            .field("isolating", &self.original)
            .finish()
    }
}

/// Iteration cap for sign determination and root refinement. Reaching it
/// means a nonzero coefficient vector evaluates to zero at α — impossible
/// over an irreducible minimal polynomial, so the cap converts a silent
/// infinite loop caused by a reducible one into a loud failure.
const REFINE_CAP: usize = 4096;

impl NumberField {
    /// Construct a field from a square-free integer minimal polynomial and
    /// an interval isolating exactly one of its real roots.
    ///
    /// Checks performed (all exact): degree ≥ 1, square-freeness via
    /// `gcd(p, p')`, nonvanishing of `p` at both endpoints, and a Sturm count
    /// of exactly one root inside the interval. Irreducibility is *not*
    /// checked here; see [`NumberField::new_irreducibility_checked`].
    pub fn new(minpoly: IntPolynomial, isolating: RationalInterval) -> Result<Field> {
        Self::build(minpoly, isolating, false)
    }

    /// Like [`NumberField::new`] but additionally runs a best-effort
    /// reducibility search (complete through degree 4 for moderate
    /// coefficients) and rejects proven-reducible inputs.
    pub fn new_irreducibility_checked(
        minpoly: IntPolynomial,
        isolating: RationalInterval,
    ) -> Result<Field> {
        Self::build(minpoly, isolating, true)
    }

    fn build(
        minpoly: IntPolynomial,
        isolating: RationalInterval,
        check_irreducible: bool,
    ) -> Result<Field> {
        let degree = match minpoly.degree() {
            None | Some(0) => {
                return Err(Error::DegenerateDegrees(
                    "minimal polynomial must have degree ≥ 1".into(),
                ))
            }
            Some(d) => d,
        };
        if !minpoly.is_square_free() {
            return Err(Error::NotSquareFree);
        }
        if check_irreducible {
            if let Some(witness) = minpoly.reducibility_witness() {
                return Err(Error::Reducible(witness));
            }
        }
        if minpoly.sign_at(isolating.lo()) == 0 || minpoly.sign_at(isolating.hi()) == 0 {
            return Err(Error::NotIsolating(
                "minimal polynomial vanishes at an interval endpoint".into(),
            ));
        }
        let count = minpoly.sturm_count(isolating.lo(), isolating.hi())?;
        if count != 1 {
            return Err(Error::NotIsolating(format!(
                "interval contains {count} roots, expected exactly 1"
            )));
        }

        let lc = BigRational::from(minpoly.leading());
        let monic: Vec<BigRational> = (0..=degree)
            .map(|k| BigRational::from(minpoly.coeff(k)) / lc.clone())
            .collect();

        // α^d in the power basis, then shift-and-fold for the higher powers.
        let base: Vec<BigRational> = (0..degree).map(|k| -monic[k].clone()).collect();
        let mut reduction = vec![base.clone()];
        for _ in 1..degree.saturating_sub(1) {
            let prev = reduction.last().unwrap();
            let carry = prev[degree - 1].clone();
            let mut next = vec![BigRational::zero(); degree];
            for k in 1..degree {
                next[k] = prev[k - 1].clone();
            }
            for k in 0..degree {
                next[k] += &carry * &base[k];
            }
            reduction.push(next);
        }
        if degree == 1 {
            reduction.clear();
        }

        Ok(Arc::new_cyclic(|weak| NumberField {
            minpoly,
            degree,
            monic,
            reduction,
            original: isolating.clone(),
            refined: Mutex::new(isolating),
            approx: OnceLock::new(),
            weak: weak.clone(),
        }))
    }

    fn handle(&self) -> Field {
        self.weak
            .upgrade()
            .expect("field handle outlived its Arc — construct fields via NumberField::new")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn minpoly(&self) -> &IntPolynomial {
        &self.minpoly
    }

    /// Snapshot of the current (possibly refined) isolating interval.
    pub fn isolating(&self) -> RationalInterval {
        self.refined.lock().unwrap().clone()
    }

    /// The isolating interval as given at construction time.
    pub fn isolating_original(&self) -> &RationalInterval {
        &self.original
    }

    /// Shrink the cached isolating interval to width ≤ `target` by bisection
    /// and return it. Refinement is monotone: the cache only ever narrows,
    /// so every previously handed-out interval still contains α.
    pub fn refine_to_width(&self, target: &BigRational) -> RationalInterval {
        assert!(target.is_positive(), "refinement width must be positive");
        let mut guard = self.refined.lock().unwrap();
        let mut iter = 0usize;
        while guard.width() > *target {
            let mid = guard.midpoint();
            match self.minpoly.sign_at(&mid) {
                0 => {
                    // Exact rational root hit: collapse to a point interval.
                    *guard = RationalInterval::point(mid);
                    break;
                }
                s => {
                    let lo_sign = self.minpoly.sign_at(guard.lo());
                    debug_assert!(lo_sign != 0);
                    *guard = if s == lo_sign {
                        RationalInterval::new(mid, guard.hi().clone()).unwrap()
                    } else {
                        RationalInterval::new(guard.lo().clone(), mid).unwrap()
                    };
                }
            }
            iter += 1;
            assert!(
                iter <= REFINE_CAP,
                "root refinement exceeded {REFINE_CAP} bisections; this cannot happen \
                 for a valid isolating interval"
            );
        }
        guard.clone()
    }

    /// One bisection step; returns the narrowed interval.
    fn refine_step(&self) -> RationalInterval {
        let current_width = self.refined.lock().unwrap().width();
        if current_width.is_zero() {
            return self.isolating();
        }
        let half = current_width / BigRational::from(BigInt::from(2));
        self.refine_to_width(&half)
    }

    /// Double-precision approximation of α — diagnostics and sampling only,
    /// never used in any decision path.
    pub fn generator_f64(&self) -> f64 {
        *self.approx.get_or_init(|| {
            let narrow = self.refine_to_width(&crate::interval::two_pow_neg(60));
            narrow.midpoint().to_f64().unwrap_or(f64::NAN)
        })
    }

    /// True iff both handles denote the same root of the same polynomial.
    /// Pointer-identical handles short-circuit; structurally equal fields
    /// are compared by checking that the two isolating intervals isolate a
    /// common root.
    pub fn same_root(&self, other: &NumberField) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.minpoly != other.minpoly {
            return false;
        }
        let a = &self.original;
        let b = &other.original;
        let lo = a.lo().max(b.lo()).clone();
        let hi = a.hi().min(b.hi()).clone();
        if lo > hi {
            return false; // disjoint isolating intervals → different roots
        }
        // One root in the overlap means it is the unique root of both.
        matches!(self.minpoly.sturm_count(&lo, &hi), Ok(1))
    }

    // ---- element constructors -------------------------------------------

    /// The distinguished root α as a field element.
    pub fn generator(&self) -> FieldElement {
        if self.degree == 1 {
            // ℚ-case: α is itself rational, −c₀/c₁.
            let root = -BigRational::new(self.minpoly.coeff(0), self.minpoly.coeff(1));
            return self.from_rational(root);
        }
        let mut coeffs = vec![BigRational::zero(); self.degree];
        coeffs[1] = BigRational::one();
        FieldElement {
            field: self.handle(),
            coeffs,
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.handle(),
            coeffs: vec![BigRational::zero(); self.degree],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, r: BigRational) -> FieldElement {
        let mut coeffs = vec![BigRational::zero(); self.degree];
        coeffs[0] = r;
        FieldElement {
            field: self.handle(),
            coeffs,
        }
    }

    pub fn from_integer(&self, n: i64) -> FieldElement {
        self.from_rational(BigRational::from(BigInt::from(n)))
    }

    /// Element from an explicit coefficient vector (length ≤ d, zero-padded).
    pub fn from_coeffs(&self, mut coeffs: Vec<BigRational>) -> Result<FieldElement> {
        if coeffs.len() > self.degree {
            // Allow longer vectors only when the tail is zero.
            if coeffs[self.degree..].iter().any(|c| !c.is_zero()) {
                return Err(Error::FieldMismatch);
            }
            coeffs.truncate(self.degree);
        }
        coeffs.resize(self.degree, BigRational::zero());
        Ok(FieldElement {
            field: self.handle(),
            coeffs,
        })
    }

    // ---- presets -----------------------------------------------------------

    /// `ℚ[√2]`: x² − 2 isolated on [1, 2].
    pub fn sqrt2() -> Field {
        Self::new(
            IntPolynomial::from_i64(&[-2, 0, 1]),
            interval_i64(1, 2),
        )
        .expect("preset field is valid")
    }

    /// The golden ratio field: x² − x − 1 isolated on [1, 2].
    pub fn golden() -> Field {
        Self::new(
            IntPolynomial::from_i64(&[-1, -1, 1]),
            interval_i64(1, 2),
        )
        .expect("preset field is valid")
    }

    /// `ℚ[∛2]`: x³ − 2 isolated on [1, 3/2].
    pub fn cbrt2() -> Field {
        Self::new(
            IntPolynomial::from_i64(&[-2, 0, 0, 1]),
            RationalInterval::new(
                BigRational::from(BigInt::from(1)),
                BigRational::new(BigInt::from(3), BigInt::from(2)),
            )
            .unwrap(),
        )
        .expect("preset field is valid")
    }

    /// `ℚ[cos(π/8)]`: 8x⁴ − 8x² + 1 isolated on [3/4, 1] (the other positive
    /// root, cos(3π/8) ≈ 0.383, lies below 3/4).
    pub fn cos_pi8() -> Field {
        Self::new(
            IntPolynomial::from_i64(&[1, 0, -8, 0, 8]),
            RationalInterval::new(
                BigRational::new(BigInt::from(3), BigInt::from(4)),
                BigRational::from(BigInt::from(1)),
            )
            .unwrap(),
        )
        .expect("preset field is valid")
    }

    /// Plain ℚ presented as a degree-1 field: minimal polynomial x,
    /// root 0 isolated on [−1/2, 1/2].
    pub fn rational() -> Field {
        Self::new(
            IntPolynomial::from_i64(&[0, 1]),
            RationalInterval::new(
                BigRational::new(BigInt::from(-1), BigInt::from(2)),
                BigRational::new(BigInt::from(1), BigInt::from(2)),
            )
            .unwrap(),
        )
        .expect("preset field is valid")
    }

    /// Look up a preset by name (used by the CLI and test fixtures).
    pub fn preset(name: &str) -> Option<Field> {
        match name {
            "sqrt2" => Some(Self::sqrt2()),
            "golden" => Some(Self::golden()),
            "cbrt2" => Some(Self::cbrt2()),
            "cos_pi8" => Some(Self::cos_pi8()),
            "rational" => Some(Self::rational()),
            _ => None,
        }
    }

    /// Names accepted by [`NumberField::preset`].
    pub fn preset_names() -> &'static [&'static str] {
        &["sqrt2", "golden", "cbrt2", "cos_pi8", "rational"]
    }
}

fn interval_i64(lo: i64, hi: i64) -> RationalInterval {
    RationalInterval::new(
        BigRational::from(BigInt::from(lo)),
        BigRational::from(BigInt::from(hi)),
    )
    .unwrap()
}

/// An element of a number field: a rational vector in the power basis of α.
///
/// Equality is representation equality (coefficient-wise); under an
/// irreducible minimal polynomial this coincides with value equality.
/// Arithmetic panics if the operands belong to different fields — mixing
/// fields is a programming error, not a data error.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    coeffs: Vec<BigRational>,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `Some(r)` iff the element is visibly rational (all higher coefficients
    /// are zero).
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn assert_same_field(&self, other: &FieldElement) {
        assert!(
            self.field.same_root(&other.field),
            "field element arithmetic across different number fields"
        );
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.assert_same_field(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        FieldElement {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.assert_same_field(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        FieldElement {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.assert_same_field(other);
        let d = self.field.degree;
        if d == 1 {
            return FieldElement {
                field: self.field.clone(),
                coeffs: vec![&self.coeffs[0] * &other.coeffs[0]],
            };
        }
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] += a * b;
            }
        }
        let mut out: Vec<BigRational> = prod[..d].to_vec();
        for t in 0..(d - 1) {
            let c = &prod[d + t];
            if c.is_zero() {
                continue;
            }
            for k in 0..d {
                out[k] += c * &self.field.reduction[t][k];
            }
        }
        FieldElement {
            field: self.field.clone(),
            coeffs: out,
        }
    }

    /// Multiply by an exact rational scalar.
    pub fn scale(&self, c: &BigRational) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in
    /// `ℚ[x]/(p)`. Fails with [`Error::DivisionByZero`] on the zero element
    /// and with [`Error::Reducible`] if the element's polynomial shares a
    /// nontrivial factor with the minimal polynomial (only possible when the
    /// minimal polynomial is reducible).
    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let elem: rat::RPoly = rat::trim(self.coeffs.clone());
        let modulus: rat::RPoly = self.field.monic.clone();
        let (g, s, _) = rat::ext_gcd(&elem, &modulus);
        match rat::deg(&g) {
            Some(0) => {
                // s·elem ≡ g (mod p) with g a nonzero constant.
                let inv_g = BigRational::one() / g[0].clone();
                let (_, reduced) = rat::divmod(&rat::scale(&s, &inv_g), &modulus);
                self.field.from_coeffs(reduced)
            }
            _ => Err(Error::Reducible(
                "a nonzero element is not invertible; the minimal polynomial \
                 must be reducible"
                    .into(),
            )),
        }
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.assert_same_field(other);
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact sign of the element's value: −1, 0, or +1. Never consults
    /// floating point; refines the field's isolating interval until the
    /// interval evaluation of the coefficient polynomial excludes zero.
    ///
    /// # Panics
    ///
    /// After a generous refinement cap if the element's value cannot be
    /// separated from zero — which is impossible when the minimal polynomial
    /// is irreducible and means a reducible minimal polynomial slipped past
    /// the (optional) reducibility check.
    pub fn sign(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if let Some(r) = self.as_rational() {
            return if r.is_positive() {
                1
            } else if r.is_negative() {
                -1
            } else {
                0
            };
        }
        let poly = coeffs_to_intpoly_scaled(&self.coeffs);
        let mut iv = self.field.isolating();
        for _ in 0..REFINE_CAP {
            if let Some(s) = poly.eval_interval(&iv).definite_sign() {
                return s;
            }
            iv = self.field.refine_step();
        }
        panic!(
            "sign determination did not separate a nonzero coefficient vector \
             from zero after {REFINE_CAP} refinements; the minimal polynomial \
             is almost certainly reducible — rebuild the field with \
             NumberField::new_irreducibility_checked"
        );
    }

    /// Absolute value (sign-based, exact).
    pub fn abs(&self) -> FieldElement {
        if self.sign() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Double-precision approximation — diagnostics and sampling only.
    pub fn to_f64(&self) -> f64 {
        let alpha = self.field.generator_f64();
        let mut acc = 0.0f64;
        for c in self.coeffs.iter().rev() {
            acc = acc * alpha + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }
}

/// The coefficient vector as an integer polynomial times a positive rational
/// (content extracted), suitable for interval evaluation. Sign is preserved.
fn coeffs_to_intpoly_scaled(coeffs: &[BigRational]) -> IntPolynomial {
    // Clear denominators: the common denominator is positive, so the sign of
    // the value is unchanged.
    let mut denom = BigInt::one();
    for c in coeffs {
        denom = num_integer::lcm(denom, c.denom().clone());
    }
    IntPolynomial::new(
        coeffs
            .iter()
            .map(|c| c.numer() * (&denom / c.denom()))
            .collect(),
    )
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_root(&other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({self})")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let mag = c.abs();
            match k {
                0 => write!(f, "{mag}")?,
                1 => {
                    if mag.is_one() {
                        write!(f, "a")?
                    } else {
                        write!(f, "{mag}*a")?
                    }
                }
                _ => {
                    if mag.is_one() {
                        write!(f, "a^{k}")?
                    } else {
                        write!(f, "{mag}*a^{k}")?
                    }
                }
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl std::ops::$trait for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                FieldElement::$inner(self, rhs)
            }
        }
        impl std::ops::$trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                FieldElement::$inner(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(&self)
    }
}

/// A complexified field element `re + i·im` with both parts in the same real
/// number field. The imaginary unit is symbolic — the underlying field stays
/// real, which is what the realification step relies on.
#[derive(Clone, PartialEq, Eq)]
pub struct ComplexFieldElement {
    pub re: FieldElement,
    pub im: FieldElement,
}

impl ComplexFieldElement {
    pub fn new(re: FieldElement, im: FieldElement) -> Self {
        assert!(
            re.field.same_root(&im.field),
            "real and imaginary parts must share a field"
        );
        Self { re, im }
    }

    pub fn from_real(re: FieldElement) -> Self {
        let im = re.field.zero();
        Self { re, im }
    }

    pub fn zero(field: &Field) -> Self {
        Self {
            re: field.zero(),
            im: field.zero(),
        }
    }

    pub fn one(field: &Field) -> Self {
        Self {
            re: field.one(),
            im: field.zero(),
        }
    }

    /// The imaginary unit.
    pub fn i(field: &Field) -> Self {
        Self {
            re: field.zero(),
            im: field.one(),
        }
    }

    pub fn field(&self) -> &Field {
        self.re.field()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            re: self.re.add(&other.re),
            im: self.im.add(&other.im),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            re: self.re.sub(&other.re),
            im: self.im.sub(&other.im),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        // (a+bi)(c+di) = (ac − bd) + (ad + bc)i
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        Self { re, im }
    }

    /// |z|² = re² + im², a real field element.
    pub fn norm_sq(&self) -> FieldElement {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        let n = other.norm_sq();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv_n = n.inv()?;
        let num = self.mul(&other.conj());
        Ok(Self {
            re: num.re.mul(&inv_n),
            im: num.im.mul(&inv_n),
        })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            re: self.re.scale(c),
            im: self.im.scale(c),
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for ComplexFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "({}) + ({})i", self.re, self.im)
        }
    }
}

impl fmt::Debug for ComplexFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexFieldElement({self})")
    }
}

// ---- analytic bounds -------------------------------------------------------

/// Lower bound on `|g(α)|` for any integer polynomial `g` with `g(α) ≠ 0`,
/// where α is a root of the *irreducible* integer polynomial `f` and
/// `|α| ≤ alpha_abs_upper`:
///
/// ```text
/// |g(α)| ≥ 1 / ( (d_f + d_g − 1)! · ‖f‖^{d_g} · ‖g‖^{d_f − 1} · Σ_{t<d_f} U^t )
/// ```
///
/// with `‖·‖` the coefficient max-norm and `U = alpha_abs_upper`. The bound
/// is monotone nonincreasing in `d_g`, `‖g‖`, and `U`, so it may be evaluated
/// at envelope values that dominate a whole family of `g`'s.
///
/// *Contract:* `f` must be irreducible — square-freeness is not enough,
/// because a `g` vanishing at a conjugate root of a reducible `f` breaks the
/// resultant argument underlying the bound. The shipped preset fields all
/// have genuinely irreducible minimal polynomials.
pub fn mahler_bound(
    f: &IntPolynomial,
    g: &IntPolynomial,
    alpha_abs_upper: &BigRational,
) -> Result<BigRational> {
    let df = match f.degree() {
        None | Some(0) => {
            return Err(Error::DegenerateDegrees(
                "f must have degree ≥ 1".into(),
            ))
        }
        Some(d) => d,
    };
    if g.is_zero() {
        return Err(Error::DegenerateDegrees(
            "g must be nonzero (a zero polynomial has no nonzero value to bound)".into(),
        ));
    }
    let dg = g.degree().unwrap();
    mahler_bound_envelope(df, &f.height(), dg, &g.height(), alpha_abs_upper)
}

/// Envelope form of [`mahler_bound`]: same formula, but taking the degrees
/// and max-norms directly so callers can plug in dominating values.
pub fn mahler_bound_envelope(
    df: usize,
    f_height: &BigUint,
    dg: usize,
    g_height: &BigUint,
    alpha_abs_upper: &BigRational,
) -> Result<BigRational> {
    if df == 0 {
        return Err(Error::DegenerateDegrees("d_f must be ≥ 1".into()));
    }
    if f_height.is_zero() || g_height.is_zero() {
        return Err(Error::DegenerateDegrees(
            "polynomial heights must be ≥ 1".into(),
        ));
    }
    let factorial = factorial_biguint(df + dg - 1);
    let hf_pow = f_height.pow(dg as u32);
    let hg_pow = g_height.pow((df - 1) as u32);
    // Σ_{t=0}^{d_f−1} U^t, evaluated exactly.
    let u = alpha_abs_upper;
    let mut geom = BigRational::zero();
    let mut upow = BigRational::one();
    for _ in 0..df {
        geom += &upow;
        upow *= u;
    }
    let denom = BigRational::from(BigInt::from(factorial * hf_pow * hg_pow)) * geom;
    debug_assert!(denom.is_positive());
    Ok(BigRational::one() / denom)
}

fn factorial_biguint(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= BigUint::from(k);
    }
    acc
}

/// Stability bound for the rational function `u/v` near 0: given integer
/// polynomials `u, v` and `δ > 0` with `|v(0)| ≥ δ`, returns `(ε, errcoef)`
/// with `d = max(deg u, deg v, 1)`:
///
/// ```text
/// ε = δ / (2·d·‖v‖)        errcoef = 4·d·‖u‖·‖v‖ / δ²
/// ```
///
/// guaranteeing, for every real `|z| ≤ ε`: `|v(z)| ≥ δ/2`, and
/// `|u(0)/v(0) − u(z)/v(z)| ≤ |z| · errcoef`.
///
/// # Panics
///
/// If `δ ≤ 0` or `v` is the zero polynomial (the precondition `|v(0)| ≥ δ`
/// is the caller's obligation and cannot hold in either case).
pub fn rational_perturbation_bound(
    u: &IntPolynomial,
    v: &IntPolynomial,
    delta: &BigRational,
) -> (BigRational, BigRational) {
    assert!(delta.is_positive(), "δ must be positive");
    assert!(!v.is_zero(), "v must be nonzero");
    let d = BigInt::from(u.degree_or_zero().max(v.degree_or_zero()).max(1));
    let u_height = BigRational::from(BigInt::from(u.height()));
    let v_height = BigRational::from(BigInt::from(v.height()));
    let two = BigRational::from(BigInt::from(2));
    let four = BigRational::from(BigInt::from(4));
    let d = BigRational::from(d);
    let epsilon = delta / (&two * &d * &v_height);
    let errcoef = &four * &d * &u_height * &v_height / (delta * delta);
    (epsilon, errcoef)
}
