//! Division-free Newton iteration on number-field generators.
//!
//! The Newton step for a degree-`d` integer polynomial `p` is turned into a
//! pair of homogeneous degree-`d` bivariate integer forms `(u₀, u₁)` with
//!
//! ```text
//! u₀(x, y) = Σ_j (j − 1)·p_j · x^j y^{d−j}        ( = x·P′ − P )
//! u₁(x, y) = Σ_{j≥1} j·p_j · x^{j−1} y^{d−j+1}    ( = y·P′ )
//! ```
//!
//! where `P`, `P′` are the degree-`d` homogenizations of `p` and `p′`, so
//! that `u₀/u₁` evaluated at a fraction `f/g` is exactly the classical
//! Newton update `f/g − p(f/g)/p′(f/g)` — but computed entirely in ℤ.
//! A precision-doubling recurrence then reaches `2^k`-digit agreement with
//! the root in `k` integer steps.
//!
//! [`NewtonScheme::certify`] proves, before any iteration runs, that the
//! provided seed ratio lies in a quadratic convergence basin: it finds a
//! radius ξ ≤ 1/2 and an interval-arithmetic contraction constant
//! `K = max(max|p″|/(2·min|p′|), 1)` over the ξ-inflated isolating interval
//! with `K·ξ ≤ 1/2` and `|seed − α| < ξ`. These conditions give the
//! standard Newton remainder chain `K·|x_k − α| ≤ (K·ξ)^{2^k} < 2^{-2^k}`,
//! so the level-`k` iterate is within `2^{-2^k}` of α — certified, not
//! observed.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::field::Field;
use crate::intpoly::IntPolynomial;
use crate::Result;

/// A bivariate integer polynomial, stored dense as `coeffs[i][j]·x^i·y^j`.
#[derive(Clone, PartialEq, Eq)]
pub struct BivarPoly {
    coeffs: Vec<Vec<BigInt>>,
}

impl BivarPoly {
    fn zero(x_deg: usize, y_deg: usize) -> Self {
        Self {
            coeffs: vec![vec![BigInt::zero(); y_deg + 1]; x_deg + 1],
        }
    }

    fn set(&mut self, i: usize, j: usize, c: BigInt) {
        self.coeffs[i][j] = c;
    }

    fn add_to(&mut self, i: usize, j: usize, c: &BigInt) {
        self.coeffs[i][j] += c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(Zero::is_zero)
    }

    /// Structural equality modulo padding.
    fn equivalent(&self, other: &Self) -> bool {
        let xi = self.coeffs.len().max(other.coeffs.len());
        let yj = self
            .coeffs
            .iter()
            .chain(&other.coeffs)
            .map(Vec::len)
            .max()
            .unwrap_or(0);
        let at = |p: &BivarPoly, i: usize, j: usize| {
            p.coeffs
                .get(i)
                .and_then(|row| row.get(j))
                .cloned()
                .unwrap_or_else(BigInt::zero)
        };
        (0..xi).all(|i| (0..yj).all(|j| at(self, i, j) == at(other, i, j)))
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(
            self.coeffs.len() + other.coeffs.len(),
            self.coeffs
                .iter()
                .map(Vec::len)
                .max()
                .unwrap_or(0)
                + other.coeffs.iter().map(Vec::len).max().unwrap_or(0),
        );
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (k, orow) in other.coeffs.iter().enumerate() {
                    for (l, b) in orow.iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        let prod = a * b;
                        out.add_to(i + k, j + l, &prod);
                    }
                }
            }
        }
        out
    }

    /// Evaluate at big integers with cached power tables.
    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let xd = self.coeffs.len();
        let yd = self.coeffs.iter().map(Vec::len).max().unwrap_or(0);
        let mut xp = Vec::with_capacity(xd);
        let mut yp = Vec::with_capacity(yd);
        xp.push(BigInt::one());
        for _ in 1..xd {
            xp.push(xp.last().unwrap() * x);
        }
        yp.push(BigInt::one());
        for _ in 1..yd {
            yp.push(yp.last().unwrap() * y);
        }
        let mut acc = BigInt::zero();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    acc += c * &xp[i] * &yp[j];
                }
            }
        }
        acc
    }
}

impl fmt::Debug for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    terms.push(format!("{c}·x^{i}y^{j}"));
                }
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Build the update forms `(u₀, u₁)` for a polynomial of degree ≥ 1 and
/// cross-check them against the independently constructed `x·P′ − P` and
/// `y·P′`.
pub fn build_newton_polys(p: &IntPolynomial) -> Result<(BivarPoly, BivarPoly)> {
    let d = match p.degree() {
        None | Some(0) => {
            return Err(Error::DegenerateDegrees(
                "Newton update forms need degree ≥ 1".into(),
            ))
        }
        Some(d) => d,
    };

    let mut u0 = BivarPoly::zero(d, d);
    let mut u1 = BivarPoly::zero(d, d);
    for j in 0..=d {
        let pj = p.coeff(j);
        if pj.is_zero() {
            continue;
        }
        // u₀ term: (j−1)·p_j · x^j y^{d−j}
        let c0 = (BigInt::from(j as i64) - BigInt::one()) * &pj;
        if !c0.is_zero() {
            u0.add_to(j, d - j, &c0);
        }
        // u₁ term: j·p_j · x^{j−1} y^{d−j+1}
        if j >= 1 {
            let c1 = BigInt::from(j as i64) * &pj;
            u1.add_to(j - 1, d - j + 1, &c1);
        }
    }

    // Independent construction: P homogenizes p to degree d, Pd homogenizes
    // p′ to degree d−1; the forms must equal x·Pd − P and y·Pd exactly.
    let mut cap_p = BivarPoly::zero(d, d);
    for j in 0..=d {
        cap_p.set(j, d - j, p.coeff(j));
    }
    let dp = p.derivative();
    let mut cap_pd = BivarPoly::zero(d, d);
    for j in 0..d {
        cap_pd.set(j, d - 1 - j, dp.coeff(j));
    }
    let x = monomial(1, 0);
    let y = monomial(0, 1);
    let check_u0 = sub(&x.mul(&cap_pd), &cap_p);
    let check_u1 = y.mul(&cap_pd);
    assert!(
        u0.equivalent(&check_u0) && u1.equivalent(&check_u1),
        "update-form construction disagrees with x·P′ − P / y·P′ — internal bug"
    );

    Ok((u0, u1))
}

fn monomial(i: usize, j: usize) -> BivarPoly {
    let mut m = BivarPoly::zero(i, j);
    m.set(i, j, BigInt::one());
    m
}

fn sub(a: &BivarPoly, b: &BivarPoly) -> BivarPoly {
    let xi = a.coeffs.len().max(b.coeffs.len());
    let yj = a
        .coeffs
        .iter()
        .chain(&b.coeffs)
        .map(Vec::len)
        .max()
        .unwrap_or(0);
    let mut out = BivarPoly::zero(xi.saturating_sub(1), yj.saturating_sub(1));
    let at = |p: &BivarPoly, i: usize, j: usize| {
        p.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    };
    for i in 0..xi {
        for j in 0..yj {
            out.set(i, j, at(a, i, j) - at(b, i, j));
        }
    }
    out
}

/// A big-integer approximant `num/den ≈ α` with certified error `< 2^{-precision}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approximant {
    pub num: BigInt,
    pub den: BigInt,
    /// The `n` this approximant was requested at: `|num/den − α| < 2^{-n}`.
    pub precision: u64,
    /// Number of doubling levels actually evaluated (instrumentation;
    /// equals ⌈log₂ n⌉ on a fresh scheme).
    pub levels: u32,
}

impl Approximant {
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }

    /// Total bits of numerator and denominator (size diagnostics).
    pub fn bit_size(&self) -> u64 {
        self.num.bits() + self.den.bits()
    }
}

/// Divide out the gcd and normalize the denominator to be positive.
/// Ratio and precision are untouched; `0/5` becomes `0/1`.
pub fn reduce(ap: &Approximant) -> Approximant {
    let (num, den) = reduce_pair(&ap.num, &ap.den);
    Approximant {
        num,
        den,
        precision: ap.precision,
        levels: ap.levels,
    }
}

fn reduce_pair(num: &BigInt, den: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(!den.is_zero());
    let g = num.gcd(den);
    let (mut n, mut d) = (num / &g, den / &g);
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    (n, d)
}

/// A certified Newton iteration: update forms, seed, basin radius ξ, and
/// contraction constant K, plus a memo table so repeated precision requests
/// share work.
pub struct NewtonScheme {
    field: Field,
    u0: BivarPoly,
    u1: BivarPoly,
    seed: (BigInt, BigInt),
    xi: BigRational,
    contraction_k: BigRational,
    reduce_intermediate: bool,
    memo: Mutex<HashMap<u64, (BigInt, BigInt)>>,
}

impl fmt::Debug for NewtonScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NewtonScheme")
            .field("seed", &self.seed)
            .field("xi", &self.xi)
            .field("contraction_k", &self.contraction_k)
            .field("reduce_intermediate", &self.reduce_intermediate)
            .finish()
    }
}

impl NewtonScheme {
    /// Certify that `a0/a1` seeds a quadratic basin around the field's root
    /// and build the iteration scheme. `a1` must be nonzero.
    ///
    /// The search proceeds by scale halving: for each candidate radius ξ the
    /// isolating interval is refined to width ξ/8 and inflated by ξ, the
    /// derivative is bounded away from zero on that window by interval
    /// evaluation, and the three certification conditions (ξ ≤ 1/2,
    /// K·ξ ≤ 1/2, |seed − α| < ξ) are checked exactly. Seeds that provably
    /// sit outside every candidate basin are rejected with
    /// [`Error::SeedOutsideBasin`].
    pub fn certify(field: &Field, a0: &BigInt, a1: &BigInt) -> Result<NewtonScheme> {
        if a1.is_zero() {
            return Err(Error::SeedOutsideBasin(
                "seed denominator is zero".into(),
            ));
        }
        let (u0, u1) = build_newton_polys(field.minpoly())?;
        let s = BigRational::new(a0.clone(), a1.clone());
        let half = BigRational::new(BigInt::one(), BigInt::from(2));

        let mut candidates: Vec<BigRational> = Vec::new();
        let mut xi = half.clone();
        for _ in 0..128 {
            candidates.push(xi.clone());
            xi /= BigRational::from(BigInt::from(2));
        }

        let mut derivative_unbounded = true;
        for xi in &candidates {
            match Self::try_certify_at(field, &s, xi) {
                CertifyOutcome::Certified(k) => {
                    return Ok(Self::assemble(field, u0, u1, a0, a1, xi.clone(), k));
                }
                CertifyOutcome::DerivativeUnbounded => {
                    // Finer scales may still separate p′ from zero.
                }
                CertifyOutcome::ConditionsFailed => {
                    derivative_unbounded = false;
                }
                CertifyOutcome::SeedTooFar { seed_distance_lb } => {
                    // |seed − α| ≥ this xi, hence ≥ every smaller xi too.
                    // One rescue attempt at a radius snug around the seed
                    // distance, in case halving jumped over a workable scale.
                    let rescue = &seed_distance_lb * BigRational::from(BigInt::from(2));
                    if rescue <= half {
                        if let CertifyOutcome::Certified(k) =
                            Self::try_certify_at(field, &s, &rescue)
                        {
                            return Ok(Self::assemble(field, u0, u1, a0, a1, rescue, k));
                        }
                    }
                    return Err(Error::SeedOutsideBasin(format!(
                        "|seed − root| ≥ {seed_distance_lb}, no radius ≤ 1/2 certifies"
                    )));
                }
            }
        }
        if derivative_unbounded {
            Err(Error::DerivativeVanishes)
        } else {
            Err(Error::SeedOutsideBasin(
                "no candidate radius satisfied the contraction conditions".into(),
            ))
        }
    }

    fn assemble(
        field: &Field,
        u0: BivarPoly,
        u1: BivarPoly,
        a0: &BigInt,
        a1: &BigInt,
        xi: BigRational,
        contraction_k: BigRational,
    ) -> NewtonScheme {
        NewtonScheme {
            field: field.clone(),
            u0,
            u1,
            seed: (a0.clone(), a1.clone()),
            xi,
            contraction_k,
            reduce_intermediate: true,
            memo: Mutex::new(HashMap::new()),
        }
    }

    fn try_certify_at(field: &Field, s: &BigRational, xi: &BigRational) -> CertifyOutcome {
        let eighth = xi / BigRational::from(BigInt::from(8));
        let iv = field.refine_to_width(&eighth);
        // Upper and lower bounds on |s − α| from the interval.
        let dist_up = (s - iv.lo()).abs().max((s - iv.hi()).abs());
        let dist_lb = if iv.contains(s) {
            BigRational::zero()
        } else if s < iv.lo() {
            iv.lo() - s
        } else {
            s - iv.hi()
        };
        if &dist_lb >= xi {
            return CertifyOutcome::SeedTooFar {
                seed_distance_lb: dist_lb,
            };
        }
        let window = iv.inflate(xi);
        let p = field.minpoly();
        let d1 = p.derivative().eval_interval(&window);
        if d1.definite_sign().is_none() {
            return CertifyOutcome::DerivativeUnbounded;
        }
        let min_d1 = d1.abs_lower();
        let max_d2 = p.derivative().derivative().eval_interval(&window).abs_upper();
        let two = BigRational::from(BigInt::from(2));
        let k = (max_d2 / (&two * &min_d1)).max(BigRational::one());
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if xi * &k <= half && dist_up < *xi {
            CertifyOutcome::Certified(k)
        } else {
            CertifyOutcome::ConditionsFailed
        }
    }

    /// Switch off gcd-reduction between doubling levels (raw mode). The
    /// emitted ratios are identical — both forms are homogeneous of the same
    /// degree, so a common factor of `(f, g)` scales numerator and
    /// denominator of the next level by the same power — but intermediate
    /// integers grow faster. Useful for size comparisons.
    pub fn with_raw_levels(mut self) -> Self {
        self.reduce_intermediate = false;
        self.memo.lock().unwrap().clear();
        self
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn xi(&self) -> &BigRational {
        &self.xi
    }

    pub fn contraction_k(&self) -> &BigRational {
        &self.contraction_k
    }

    pub fn seed(&self) -> (&BigInt, &BigInt) {
        (&self.seed.0, &self.seed.1)
    }

    /// Number of memoized levels currently held (instrumentation).
    pub fn memo_len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }

    /// The approximant at precision `n`: `|num/den − α| < 2^{-n}`.
    ///
    /// Levels follow the halving chain `n, ⌈n/2⌉, …, 1`, so a fresh request
    /// evaluates exactly `⌈log₂ n⌉` update steps; repeated requests reuse
    /// memoized levels.
    pub fn approximant(&self, n: u64) -> Approximant {
        let mut chain = Vec::new();
        let mut m = n;
        while m > 1 {
            chain.push(m);
            m = m.div_ceil(2);
        }
        // chain holds n, ⌈n/2⌉, …, 2 (possibly empty); levels below 2 use the seed.
        let levels_total = chain.len() as u32;

        let mut memo = self.memo.lock().unwrap();
        let mut current: (BigInt, BigInt) = (self.seed.0.clone(), self.seed.1.clone());
        for &level in chain.iter().rev() {
            if let Some(hit) = memo.get(&level) {
                current = hit.clone();
                continue;
            }
            let f = self.u0.eval(&current.0, &current.1);
            let g = self.u1.eval(&current.0, &current.1);
            assert!(
                !g.is_zero(),
                "denominator form vanished inside a certified basin — internal bug"
            );
            current = if self.reduce_intermediate {
                reduce_pair(&f, &g)
            } else {
                (f, g)
            };
            memo.insert(level, current.clone());
        }

        Approximant {
            num: current.0,
            den: current.1,
            precision: n,
            levels: levels_total,
        }
    }

    /// The provable error exponent for a precision-`n` request:
    /// the approximant satisfies `|num/den − α| < 2^{-certified_exponent(n)}`
    /// and `certified_exponent(n) ≥ max(n, 1)`.
    pub fn certified_exponent(n: u64) -> u64 {
        if n <= 1 {
            return 1;
        }
        let levels = (n - 1).ilog2() as u64 + 1; // ⌈log₂ n⌉ for n ≥ 2
        1u64 << levels
    }
}

enum CertifyOutcome {
    Certified(BigRational),
    DerivativeUnbounded,
    ConditionsFailed,
    SeedTooFar { seed_distance_lb: BigRational },
}
