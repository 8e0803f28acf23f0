//! Integer polynomials: evaluation, Sturm chains, square-freeness, norms.
//!
//! Coefficients are stored little-endian (`coeffs[k]` multiplies `x^k`) with
//! trailing zeros trimmed, so the zero polynomial has an empty coefficient
//! vector and `degree()` of `None`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::interval::RationalInterval;
use crate::Result;

/// A univariate polynomial with `BigInt` coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Build from little-endian coefficients; trailing zeros are trimmed.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    /// Coefficient of `x^k` (zero beyond the stored length).
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    /// Max-norm `max |c_k|`.
    pub fn height(&self) -> BigUint {
        self.coeffs
            .iter()
            .map(|c| c.magnitude().clone())
            .max()
            .unwrap_or_else(BigUint::zero)
    }

    /// 1-norm `Σ |c_k|`.
    pub fn one_norm(&self) -> BigUint {
        self.coeffs
            .iter()
            .fold(BigUint::zero(), |acc, c| acc + c.magnitude())
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from(c.clone());
        }
        acc
    }

    /// Interval extension by Horner; the result contains `p(x)` for every
    /// `x` in the input interval.
    pub fn eval_interval(&self, x: &RationalInterval) -> RationalInterval {
        let mut acc = RationalInterval::point(BigRational::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc
                .mul(x)
                .translate(&BigRational::from(c.clone()));
        }
        acc
    }

    /// Sign of `p(x)` at an exact rational point: −1, 0, or +1.
    pub fn sign_at(&self, x: &BigRational) -> i8 {
        let v = self.eval_rational(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn derivative(&self) -> IntPolynomial {
        if self.coeffs.len() <= 1 {
            return IntPolynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigInt::from(k))
            .collect();
        IntPolynomial::new(coeffs)
    }

    pub fn neg(&self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        IntPolynomial::new(coeffs)
    }

    pub fn sub(&self, other: &IntPolynomial) -> IntPolynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPolynomial::new(coeffs)
    }

    pub fn scale(&self, c: &BigInt) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// True iff `gcd(p, p')` is constant, i.e. `p` has no repeated complex root.
    pub fn is_square_free(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        if self.degree() == Some(0) {
            return true;
        }
        let g = rat::gcd(&rat::from_int(self), &rat::from_int(&self.derivative()));
        rat::deg(&g) == Some(0)
    }

    /// Number of distinct real roots in the open interval `(lo, hi)`,
    /// by Sturm's theorem. Fails if either endpoint is itself a root.
    pub fn sturm_count(&self, lo: &BigRational, hi: &BigRational) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::DegenerateDegrees("zero polynomial".into()));
        }
        if self.sign_at(lo) == 0 || self.sign_at(hi) == 0 {
            return Err(Error::NotIsolating(
                "polynomial vanishes at an interval endpoint".into(),
            ));
        }
        if lo >= hi {
            return Ok(0);
        }
        let chain = sturm_chain(self);
        let va = sign_variations(&chain, lo);
        let vb = sign_variations(&chain, hi);
        Ok(va.saturating_sub(vb))
    }

    /// Best-effort reducibility proof over ℚ. Returns a human-readable
    /// witness when the polynomial is *provably* reducible: a rational root
    /// (complete for degree ≤ 3), or a quadratic integer factor found by
    /// bounded search (completes degree 4 for moderate coefficients).
    /// `None` means "no factor found", which for degree ≥ 5 is not a proof
    /// of irreducibility.
    pub fn reducibility_witness(&self) -> Option<String> {
        let deg = self.degree()?;
        if deg < 2 {
            return None;
        }
        if self.coeff(0).is_zero() {
            return Some("x divides the polynomial (root at 0)".into());
        }
        if let Some(root) = self.rational_root() {
            return Some(format!("rational root {root}"));
        }
        if deg == 4 {
            if let Some(w) = self.quadratic_factor_witness() {
                return Some(w);
            }
        }
        None
    }

    /// Search for a rational root r/s with r | c₀ and s | lc (both bounded).
    fn rational_root(&self) -> Option<BigRational> {
        const DIVISOR_CAP: u64 = 1_000_000;
        let c0 = self.coeff(0).magnitude().clone();
        let lc = self.leading().magnitude().clone();
        let rs = bounded_divisors(&c0, DIVISOR_CAP)?;
        let ss = bounded_divisors(&lc, DIVISOR_CAP)?;
        for r in &rs {
            for s in &ss {
                for sgn in [1i64, -1] {
                    let cand = BigRational::new(BigInt::from(sgn) * BigInt::from(r.clone()), BigInt::from(s.clone()));
                    if self.eval_rational(&cand).is_zero() {
                        return Some(cand);
                    }
                }
            }
        }
        None
    }

    /// Bounded search for an integer factorization p = (ax²+bx+c)(dx²+ex+f)
    /// of a quartic with no rational root. Coefficient ranges follow a
    /// Landau–Mignotte-type bound; the search is capped and gives up
    /// (returns `None`) on very large inputs.
    fn quadratic_factor_witness(&self) -> Option<String> {
        let p4 = self.coeff(4);
        let p3 = self.coeff(3);
        let p2 = self.coeff(2);
        let p1 = self.coeff(1);
        let p0 = self.coeff(0);

        const DIVISOR_CAP: u64 = 100_000;
        let lead_divs = bounded_divisors(self.leading().magnitude(), DIVISOR_CAP)?;
        let const_divs = bounded_divisors(p0.magnitude(), DIVISOR_CAP)?;

        // |b| is bounded by a factor-height bound; cap the whole search.
        let bound = BigInt::from(16u32) * BigInt::from(self.one_norm() + BigUint::one());
        let bound: i64 = bound.try_into().ok().filter(|&b: &i64| b <= 4096)?;

        for a_mag in &lead_divs {
            let a = BigInt::from(a_mag.clone());
            let d = &p4 / &a; // exact: a ranges over divisors of p4's magnitude
            if (&a * &d) != p4 {
                continue;
            }
            for c_mag in &const_divs {
                for c_sign in [1i64, -1] {
                    let c = BigInt::from(c_sign) * BigInt::from(c_mag.clone());
                    if c.is_zero() {
                        continue;
                    }
                    let f = &p0 / &c;
                    if (&c * &f) != p0 {
                        continue;
                    }
                    for b_raw in -bound..=bound {
                        let b = BigInt::from(b_raw);
                        // x³ match: a·e + b·d = p3  →  e = (p3 − b·d)/a
                        let num = &p3 - &b * &d;
                        if (&num % &a) != BigInt::zero() {
                            continue;
                        }
                        let e = num / &a;
                        // x² and x¹ matches close the system.
                        if &a * &f + &b * &e + &c * &d == p2 && &b * &f + &c * &e == p1 {
                            return Some(format!(
                                "quadratic factor ({a})x² + ({b})x + ({c})"
                            ));
                        }
                    }
                }
            }
        }
        None
    }
}

/// All positive divisors of `n`, or `None` if `n` exceeds the trial-division cap.
fn bounded_divisors(n: &BigUint, cap: u64) -> Option<Vec<BigUint>> {
    if n.is_zero() {
        // Divisor set of 0 is everything; callers never hit this (constant
        // term zero is handled before the root search).
        return Some(vec![BigUint::one()]);
    }
    let n_u64: u64 = n.try_into().ok().filter(|&v: &u64| v <= cap)?;
    let mut divs = Vec::new();
    let mut k = 1u64;
    while k * k <= n_u64 {
        if n_u64 % k == 0 {
            divs.push(BigUint::from(k));
            if k != n_u64 / k {
                divs.push(BigUint::from(n_u64 / k));
            }
        }
        k += 1;
    }
    divs.sort();
    Some(divs)
}

/// Canonical Sturm chain: s₀ = p, s₁ = p′, s_{k+1} = −rem(s_{k−1}, s_k).
fn sturm_chain(p: &IntPolynomial) -> Vec<rat::RPoly> {
    let mut chain = vec![rat::from_int(p), rat::from_int(&p.derivative())];
    loop {
        let n = chain.len();
        if rat::is_zero(&chain[n - 1]) {
            chain.pop();
            break;
        }
        let (_, r) = rat::divmod(&chain[n - 2], &chain[n - 1]);
        if rat::is_zero(&r) {
            break;
        }
        chain.push(rat::neg(&r));
    }
    chain
}

/// Sign variations of the chain evaluated at `x`, zeros skipped.
fn sign_variations(chain: &[rat::RPoly], x: &BigRational) -> usize {
    let mut last: i8 = 0;
    let mut variations = 0;
    for s in chain {
        let v = rat::eval(s, x);
        let sgn: i8 = if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        };
        if sgn != 0 {
            if last != 0 && sgn != last {
                variations += 1;
            }
            last = sgn;
        }
    }
    variations
}

/// Dense little-endian polynomials over ℚ — internal helpers shared by the
/// Sturm machinery above and the field-inversion code.
pub(crate) mod rat {
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    use super::IntPolynomial;

    pub type RPoly = Vec<BigRational>;

    pub fn trim(mut v: RPoly) -> RPoly {
        while v.last().map_or(false, Zero::is_zero) {
            v.pop();
        }
        v
    }

    pub fn is_zero(v: &RPoly) -> bool {
        v.iter().all(Zero::is_zero)
    }

    pub fn deg(v: &RPoly) -> Option<usize> {
        v.iter().rposition(|c| !c.is_zero())
    }

    pub fn from_int(p: &IntPolynomial) -> RPoly {
        p.coeffs()
            .iter()
            .map(|c| BigRational::from(c.clone()))
            .collect()
    }

    pub fn eval(v: &RPoly, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in v.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn neg(v: &RPoly) -> RPoly {
        v.iter().map(|c| -c.clone()).collect()
    }

    pub fn sub(a: &RPoly, b: &RPoly) -> RPoly {
        let n = a.len().max(b.len());
        let item = |v: &RPoly, k: usize| v.get(k).cloned().unwrap_or_else(BigRational::zero);
        trim((0..n).map(|k| item(a, k) - item(b, k)).collect())
    }

    pub fn mul(a: &RPoly, b: &RPoly) -> RPoly {
        if is_zero(a) || is_zero(b) {
            return Vec::new();
        }
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }

    pub fn scale(a: &RPoly, c: &BigRational) -> RPoly {
        trim(a.iter().map(|x| x * c).collect())
    }

    /// Euclidean division: `a = q·b + r` with `deg r < deg b`. `b` nonzero.
    pub fn divmod(a: &RPoly, b: &RPoly) -> (RPoly, RPoly) {
        let db = deg(b).expect("division by zero polynomial");
        let lead = b[db].clone();
        let mut r = trim(a.clone());
        let mut q: RPoly = Vec::new();
        while let Some(dr) = deg(&r) {
            if dr < db {
                break;
            }
            let shift = dr - db;
            let factor = &r[dr] / &lead;
            if q.len() <= shift {
                q.resize(shift + 1, BigRational::zero());
            }
            q[shift] = factor.clone();
            for k in 0..=db {
                let delta = &b[k] * &factor;
                r[k + shift] -= delta;
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    /// Monic gcd by Euclid's algorithm.
    pub fn gcd(a: &RPoly, b: &RPoly) -> RPoly {
        let mut x = trim(a.clone());
        let mut y = trim(b.clone());
        while !is_zero(&y) {
            let (_, r) = divmod(&x, &y);
            x = y;
            y = r;
        }
        monic(&x)
    }

    pub fn monic(v: &RPoly) -> RPoly {
        match deg(v) {
            None => Vec::new(),
            Some(d) => {
                let inv = BigRational::one() / v[d].clone();
                scale(v, &inv)
            }
        }
    }

    /// Extended Euclid: returns (g, s, t) with s·a + t·b = g, g monic (or zero).
    pub fn ext_gcd(a: &RPoly, b: &RPoly) -> (RPoly, RPoly, RPoly) {
        let mut r0 = trim(a.clone());
        let mut r1 = trim(b.clone());
        let mut s0: RPoly = vec![BigRational::one()];
        let mut s1: RPoly = Vec::new();
        let mut t0: RPoly = Vec::new();
        let mut t1: RPoly = vec![BigRational::one()];
        while !is_zero(&r1) {
            let (q, r) = divmod(&r0, &r1);
            let next_s = sub(&s0, &mul(&q, &s1));
            let next_t = sub(&t0, &mul(&q, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = next_s;
            t0 = t1;
            t1 = next_t;
        }
        match deg(&r0) {
            None => (Vec::new(), Vec::new(), Vec::new()),
            Some(d) => {
                let inv = BigRational::one() / r0[d].clone();
                (scale(&r0, &inv), scale(&s0, &inv), scale(&t0, &inv))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn construction_trims() {
        let p = IntPolynomial::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert!(IntPolynomial::from_i64(&[0, 0]).is_zero());
        assert_eq!(IntPolynomial::zero().degree(), None);
    }

    #[test]
    fn eval_and_derivative() {
        // p = x³ − 2x + 5
        let p = IntPolynomial::from_i64(&[5, -2, 0, 1]);
        assert_eq!(p.eval_int(&BigInt::from(3)), BigInt::from(26));
        assert_eq!(p.eval_rational(&q(1, 2)), q(33, 8));
        let dp = p.derivative();
        assert_eq!(dp, IntPolynomial::from_i64(&[-2, 0, 3]));
    }

    #[test]
    fn norms() {
        let p = IntPolynomial::from_i64(&[-3, 0, 7, -1]);
        assert_eq!(p.height(), BigUint::from(7u32));
        assert_eq!(p.one_norm(), BigUint::from(11u32));
    }

    #[test]
    fn interval_evaluation_contains_true_values() {
        let p = IntPolynomial::from_i64(&[-2, 0, 1]); // x² − 2
        let iv = RationalInterval::new(q(1, 1), q(3, 2)).unwrap();
        let out = p.eval_interval(&iv);
        // p(1) = −1 and p(3/2) = 1/4 must both be inside.
        assert!(out.contains(&q(-1, 1)));
        assert!(out.contains(&q(1, 4)));
    }

    #[test]
    fn sturm_counts_match_known_roots() {
        // x² − 2 has one root in (1, 2), none in (2, 3), two in (−2, 2).
        let p = IntPolynomial::from_i64(&[-2, 0, 1]);
        assert_eq!(p.sturm_count(&q(1, 1), &q(2, 1)).unwrap(), 1);
        assert_eq!(p.sturm_count(&q(2, 1), &q(3, 1)).unwrap(), 0);
        assert_eq!(p.sturm_count(&q(-2, 1), &q(2, 1)).unwrap(), 2);

        // x³ − 2 has exactly one real root, in (1, 3/2).
        let c = IntPolynomial::from_i64(&[-2, 0, 0, 1]);
        assert_eq!(c.sturm_count(&q(1, 1), &q(3, 2)).unwrap(), 1);
        assert_eq!(c.sturm_count(&q(-10, 1), &q(10, 1)).unwrap(), 1);

        // Endpoint root is rejected.
        assert!(p.sturm_count(&q(0, 1), &q(2, 1)).is_ok());
        let lin = IntPolynomial::from_i64(&[-1, 1]); // x − 1
        assert!(lin.sturm_count(&q(1, 1), &q(2, 1)).is_err());
    }

    #[test]
    fn square_freeness() {
        assert!(IntPolynomial::from_i64(&[-2, 0, 1]).is_square_free());
        // (x − 1)² = x² − 2x + 1
        assert!(!IntPolynomial::from_i64(&[1, -2, 1]).is_square_free());
        // x²(x−1) = x³ − x²
        assert!(!IntPolynomial::from_i64(&[0, 0, -1, 1]).is_square_free());
        assert!(!IntPolynomial::zero().is_square_free());
    }

    #[test]
    fn reducibility_witnesses() {
        // x² − 1 = (x−1)(x+1): rational root.
        assert!(IntPolynomial::from_i64(&[-1, 0, 1])
            .reducibility_witness()
            .is_some());
        // x⁴ + 4 = (x² − 2x + 2)(x² + 2x + 2): no rational root, quadratic pair.
        assert!(IntPolynomial::from_i64(&[4, 0, 0, 0, 1])
            .reducibility_witness()
            .is_some());
        // Genuinely irreducible inputs come back clean.
        assert!(IntPolynomial::from_i64(&[-2, 0, 1])
            .reducibility_witness()
            .is_none());
        assert!(IntPolynomial::from_i64(&[-2, 0, 0, 1])
            .reducibility_witness()
            .is_none());
        assert!(IntPolynomial::from_i64(&[1, 0, -8, 0, 8])
            .reducibility_witness()
            .is_none());
    }

    #[test]
    fn rational_poly_division() {
        use super::rat;
        // (x³ + 1) / (x + 1) = x² − x + 1 remainder 0
        let a = rat::from_int(&IntPolynomial::from_i64(&[1, 0, 0, 1]));
        let b = rat::from_int(&IntPolynomial::from_i64(&[1, 1]));
        let (qt, r) = rat::divmod(&a, &b);
        assert!(rat::is_zero(&r));
        assert_eq!(qt, rat::from_int(&IntPolynomial::from_i64(&[1, -1, 1])));
    }

    #[test]
    fn ext_gcd_bezout_identity() {
        use super::rat;
        // gcd(x² − 2, x) = 1 with explicit Bézout cofactors.
        let a = rat::from_int(&IntPolynomial::from_i64(&[-2, 0, 1]));
        let b = rat::from_int(&IntPolynomial::from_i64(&[0, 1]));
        let (g, s, t) = rat::ext_gcd(&a, &b);
        assert_eq!(rat::deg(&g), Some(0));
        let lhs = rat::sub(&rat::mul(&s, &a), &rat::neg(&rat::mul(&t, &b)));
        assert_eq!(lhs, g);
        let _ = BigRational::from_f64(0.5); // keep FromPrimitive import exercised
    }
}
