//! The decision engine: does an iterated selective operation eventually emit
//! output 1 with probability strictly above the cutpoint β?
//!
//! The quantity decided is `L = Pr[halt with 1] − β`, which equals the
//! convergent series `Σ_{t≥0} M^t[p,1]` over the decision matrix `M`
//! ([`crate::process::build_decision_matrix`]). Two independent routes
//! evaluate it:
//!
//! * **exact** ([`series_limit_exact`]): `Σ_t M^t[p,1] =
//!   lim_{z↑1} (−1)^{1+p}·det((I−zM)₁,ₚ)/det(I−zM)`; both determinants are
//!   computed fraction-free over `ℚ[α][z]`, expanded around `z = 1`, and the
//!   limit is read off the first nonvanishing Taylor coefficients.
//! * **approx** ([`decide_approx`]): the same ratio with `α` replaced by a
//!   certified Newton approximant `f/g` and `z` by `1 − 2^{−μ}`, evaluated in
//!   big integers; [`derive_constants`] derives `μ`, `ν`, and the acceptance
//!   threshold per instance from rigorous separation bounds, so the integer
//!   sign test `2^{c₁}·U·V − V² > 0` provably agrees with the exact route.
//!
//! [`markov_absorption`] is the classical warm-up: the same determinant-ratio
//! formula deciding absorption probabilities of a stochastic chain.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::field::{mahler_bound_envelope, Field, FieldElement};
use crate::linalg::{Matrix, PolyOverField};
use crate::newton::{reduce, NewtonScheme};
use crate::process::DecisionMatrix;
use crate::process::{build_decision_matrix, DensityMatrix, SelectiveOperation};
use crate::Result;

/// A matrix whose corner power series `Σ_t M^t[p,1]` is to be evaluated.
/// The caller asserts that all eigenvalues have magnitude ≤ 1 and the series
/// converges — automatic for matrices from
/// [`build_decision_matrix`], an obligation for hand-built instances
/// (divergence is surfaced as [`Error::NoLimit`] only when the vanishing
/// orders betray it).
#[derive(Clone, Debug)]
pub struct DecisionInstance {
    m: Matrix<FieldElement>,
    label: String,
}

impl DecisionInstance {
    pub fn new(m: Matrix<FieldElement>, label: impl Into<String>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() < 2 {
            return Err(Error::BadDimension(
                "decision instances need dimension ≥ 2: the target entry (p, 1) must exist off the diagonal"
                    .into(),
            ));
        }
        Ok(Self {
            m,
            label: label.into(),
        })
    }

    pub fn from_decision_matrix(dm: &DecisionMatrix) -> Self {
        Self {
            m: dm.matrix().clone(),
            label: format!(
                "decision matrix (operation dimension {}, beta = {})",
                dm.source_dim(),
                dm.beta()
            ),
        }
    }

    pub fn matrix(&self) -> &Matrix<FieldElement> {
        &self.m
    }

    /// The dimension `p`; the series target is entry `(p, 1)` (1-based).
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn field(&self) -> &Field {
        self.m[(0, 0)].field()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accept => write!(f, "Accept"),
            Verdict::Reject => write!(f, "Reject"),
        }
    }
}

/// Which route produced a [`DecisionResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    Approx,
    Markov,
}

/// Route selector for [`decide_process`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RouteChoice {
    Exact,
    Approx,
    /// Run both and fail loudly on disagreement (a disagreement is a bug).
    Both,
}

/// Everything the engine can report about how a verdict was reached.
#[derive(Clone, Debug, Default)]
pub struct Diagnostics {
    /// Least `k` with the denominator's k-th Taylor coefficient at `z = 1`
    /// nonzero (the order of vanishing of `det(I − zM)`).
    pub vanishing_order: Option<usize>,
    pub num_degree: Option<usize>,
    pub den_degree: Option<usize>,
    pub constants: Option<BoundConstants>,
    /// The big-integer route's ratio `U/V` (approximates the limit).
    pub approx_ratio: Option<BigRational>,
    pub u_bits: Option<u64>,
    pub v_bits: Option<u64>,
    /// Set when precision parameters were overridden below their derived
    /// values, voiding the agreement guarantee.
    pub uncertified: bool,
}

#[derive(Clone, Debug)]
pub struct DecisionResult {
    pub verdict: Verdict,
    pub method: Method,
    /// The exact limit `Pr[halt with 1] − β` when the exact route ran.
    pub witness: Option<FieldElement>,
    pub diagnostics: Diagnostics,
}

fn brat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_pow(base: &BigRational, exp: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Smallest `c ≥ 0` with `2^{−c} ≤ eps`. Panics on `eps ≤ 0`.
fn ceil_log2_inv(eps: &BigRational) -> u64 {
    assert!(eps.is_positive(), "precision budget must be positive");
    if *eps >= BigRational::one() {
        return 0;
    }
    // smallest c with 2^c ≥ den/num, i.e. 2^c ≥ ceil(den/num)
    let t = (eps.denom() + eps.numer() - BigInt::one()).div_floor(eps.numer());
    (&t - BigInt::one()).bits()
}

fn limit_sign_is_positive(p: usize) -> bool {
    // the cofactor sign (−1)^{1+p}
    (p + 1) % 2 == 0
}

/// Evaluate `Σ_{t≥0} M^t[p,1]` exactly as the one-sided limit
/// `lim_{z↑1} (−1)^{1+p}·det((I−zM)₁,ₚ)/det(I−zM)`.
///
/// Both determinants live in `ℚ[α][z]`; expanding them around `z = 1` and
/// comparing vanishing orders gives the limit: if the denominator first
/// fails to vanish at order `k`, the numerator must vanish to order ≥ `k`
/// (otherwise the series diverges — [`Error::NoLimit`]), and the limit is
/// the sign-corrected ratio of the order-`k` coefficients. (Substituting
/// `z = 1 − x` flips each Taylor coefficient's sign by `(−1)^j`, which
/// cancels between numerator and denominator at equal order, so the
/// coefficients can be read in either variable.)
pub fn series_limit_exact(inst: &DecisionInstance) -> Result<FieldElement> {
    Ok(series_limit_internal(inst)?.0)
}

fn series_limit_internal(inst: &DecisionInstance) -> Result<(FieldElement, Diagnostics)> {
    let p = inst.dim();
    let field = inst.field().clone();

    // Fast path: the order-0 Taylor coefficients are the determinants
    // evaluated at z = 1 (evaluation commutes with det). When det(I − M) is
    // already nonzero in the field the vanishing order is 0 and the limit is
    // a plain ratio of field determinants — no polynomial arithmetic. This
    // is what keeps large but well-behaved instances (for example compiled
    // circuits, whose decision matrices are nilpotent) tractable.
    let at_one = Matrix::identity(p, &field.one()).sub(&inst.m)?;
    let den1: FieldElement = at_one.det()?;
    if !den1.is_zero() {
        let num1: FieldElement = at_one.minor(0, p - 1)?.det()?;
        let ratio = num1.div(&den1)?;
        let limit = if limit_sign_is_positive(p) {
            ratio
        } else {
            ratio.neg()
        };
        let diagnostics = Diagnostics {
            vanishing_order: Some(0),
            ..Diagnostics::default()
        };
        return Ok((limit, diagnostics));
    }

    let mut a = Matrix::zeros(p, p, &PolyOverField::zero(&field));
    for r in 0..p {
        for c in 0..p {
            let constant = if r == c { field.one() } else { field.zero() };
            a.set(
                r,
                c,
                PolyOverField::new(&field, vec![constant, inst.m[(r, c)].neg()]),
            );
        }
    }
    let den: PolyOverField = a.det()?;
    if den.is_zero_poly() {
        return Err(Error::SingularAtOne);
    }
    let num: PolyOverField = a.minor(0, p - 1)?.det()?;

    let dt = den.taylor_at_one();
    let nt = num.taylor_at_one();
    let k = dt
        .iter()
        .position(|c| !c.is_zero())
        .expect("a nonzero polynomial has a nonzero Taylor coefficient");
    if let Some(ka) = nt.iter().position(|c| !c.is_zero()) {
        if ka < k {
            return Err(Error::NoLimit {
                num_order: ka,
                den_order: k,
            });
        }
    }
    let a_k = nt.get(k).cloned().unwrap_or_else(|| field.zero());
    let ratio = a_k.div(&dt[k])?;
    let limit = if limit_sign_is_positive(p) {
        ratio
    } else {
        ratio.neg()
    };
    let diagnostics = Diagnostics {
        vanishing_order: Some(k),
        num_degree: num.degree(),
        den_degree: den.degree(),
        ..Diagnostics::default()
    };
    Ok((limit, diagnostics))
}

/// Decide a [`DecisionInstance`] by the exact route: Accept iff the series
/// limit is strictly positive.
pub fn decide_exact(inst: &DecisionInstance) -> Result<DecisionResult> {
    let (limit, diagnostics) = series_limit_internal(inst)?;
    let verdict = if limit.sign() > 0 {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    Ok(DecisionResult {
        verdict,
        method: Method::Exact,
        witness: Some(limit),
        diagnostics,
    })
}

/// Instance-specific precision budget for the big-integer route. All values
/// are rigorous (never sampled or floating-point), derived in
/// [`derive_constants`]; the route's guarantee is:
///
/// * the limit is either 0 or at least `separation = 2·2^{−c1}` in absolute
///   value, and
/// * the computed ratio `U/V` differs from the limit by less than
///   `2^{−c1}`,
///
/// so comparing `U/V` against the threshold `2^{−c1}` (via the integer sign
/// of `2^{c1}·U·V − V²`) reproduces the exact verdict.
#[derive(Clone, Debug)]
pub struct BoundConstants {
    /// Degree cap in the field generator for the cleared determinant
    /// polynomials.
    pub n_deg: usize,
    /// Degree cap in `z`.
    pub n_deg_z: usize,
    /// Coefficient 1-norm cap for the cleared determinant polynomials.
    pub n_height: BigUint,
    /// Coefficient cap after the Taylor shift to `z = 1`.
    pub coeff_height: BigUint,
    /// Upper bound on `|q(α)|` over the capped polynomial family.
    pub value_bound: BigRational,
    /// Lower bound on `|b(α)|` for any nonzero integer polynomial within the
    /// caps (a Mahler-type root-separation bound).
    pub mahler_floor: BigRational,
    /// Acceptance threshold exponent: the test compares `U/V` to `2^{−c1}`.
    pub c1_exponent: u64,
    /// `2·2^{−c1}` — nonzero limits are at least this far from zero.
    pub separation: BigRational,
    /// `z`-substitution precision: the route evaluates at `z = 1 − 2^{−μ}`.
    pub mu: u64,
    /// Generator-approximant precision: `|f/g − α| < 2^{−ν}`.
    pub nu: u64,
    /// LCM of all entry denominators, cleared out of the matrix.
    pub clearing_denominator: BigInt,
}

/// Derive rigorous per-instance constants for [`decide_approx`].
///
/// The chain: clear denominators (`h`), bound the cleared determinants'
/// coefficient norms by row-product envelopes (`n_height`), absorb the
/// Taylor shift to `z = 1` (`coeff_height`), lower-bound any nonzero Taylor
/// coefficient at the generator by a Mahler-type bound (`mahler_floor`) and
/// upper-bound all of them (`value_bound`); their ratio separates nonzero
/// limits from zero (`c1_exponent`). Two applications of the rational
/// perturbation bound then size `μ` (for `z → 1`) and `ν` (for `α̃ → α`) so
/// each substitution moves the ratio by less than half the threshold.
pub fn derive_constants(inst: &DecisionInstance) -> Result<BoundConstants> {
    let p = inst.dim();
    let field = inst.field();
    let d = field.degree();

    // 1. clearing denominator
    let mut h = BigInt::one();
    for e in inst.m.data() {
        for co in e.coeffs() {
            h = h.lcm(co.denom());
        }
    }

    // 2–3. row-product envelope for the cleared determinants:
    // each entry of h·(I − zM) has coefficient 1-norm ≤ h + Σ_c ‖h·M[r][c]‖₁.
    let mut rowsums: Vec<BigInt> = Vec::with_capacity(p);
    for r in 0..p {
        let mut rs = h.clone();
        for c in 0..p {
            for co in inst.m[(r, c)].coeffs() {
                rs += (co.numer() * &h).div_floor(co.denom()).abs();
            }
        }
        rowsums.push(rs);
    }
    let prod_all = rowsums.iter().fold(BigInt::one(), |acc, r| acc * r);
    let prod_tail = rowsums[1..].iter().fold(h.clone(), |acc, r| acc * r);
    let n_height = prod_all.max(prod_tail).to_biguint().expect("row products are positive");

    // 4. Taylor shift z = 1 − x multiplies the 1-norm by at most 2^{deg_z} ≤ 2^p.
    let coeff_height = &n_height << (p + 1);

    // 5. Mahler floor over the capped family.
    let iv = field.refine_to_width(&brat(1, 8));
    let u_abs = iv.abs_upper();
    let n_deg = (d - 1) * p;
    let mahler_floor = mahler_bound_envelope(
        d,
        &field.minpoly().height(),
        n_deg,
        &coeff_height,
        &u_abs,
    )?;

    // 6. value bound: |q(α)| ≤ coeff_height · Σ_{t ≤ n_deg} |α|^t.
    let mut geo = BigRational::zero();
    let mut pow = BigRational::one();
    for _ in 0..=n_deg {
        geo += &pow;
        pow *= &u_abs;
    }
    let value_bound = BigRational::from(BigInt::from(coeff_height.clone())) * geo;

    // 7. separation: a nonzero limit is ≥ mahler_floor/value_bound in
    // magnitude; take τ = 2^{−c1} ≤ half of that.
    let sep0 = &mahler_floor / &value_bound;
    let c1_exponent = ceil_log2_inv(&(&sep0 / BigInt::from(2))).max(1);
    let tau = BigRational::new(BigInt::one(), BigInt::one() << c1_exponent);
    let separation = &tau * BigInt::from(2);

    // 8. z-substitution precision: perturbation bound in x = 1 − z around 0
    // for polynomials of degree ≤ p with |coefficients at α| ≤ value_bound
    // and denominator constant term ≥ mahler_floor.
    let p_rat = BigRational::from(BigInt::from(p as i64));
    let radius1 = &mahler_floor / (brat(2, 1) * &p_rat * &value_bound);
    let budget1 = (&tau / BigInt::from(2)) * &mahler_floor * &mahler_floor
        / (brat(4, 1) * &p_rat * &value_bound * &value_bound);
    let eps1 = radius1.min(budget1);
    let mu = ceil_log2_inv(&eps1).max(1);

    // 9. generator precision: perturbation bound in w = α̃ − α around 0. The
    // denominator's value at (α, 1 − 2^{−μ}) is ≥ ξ^p·mahler_floor/2, and
    // shifting the y-polynomials to α inflates coefficients by (1+|α|)^deg.
    let xi = BigRational::new(BigInt::one(), BigInt::one() << mu);
    let delta2 = rat_pow(&xi, p) * &mahler_floor / BigInt::from(2);
    let shift = BigRational::one() + &u_abs;
    let r_max = BigRational::from(BigInt::from(n_height.clone())) * rat_pow(&shift, n_deg);
    let d_r = BigRational::from(BigInt::from(n_deg.max(1) as i64));
    let radius2 = &delta2 / (brat(2, 1) * &d_r * &r_max);
    let budget2 =
        (&tau / BigInt::from(2)) * &delta2 * &delta2 / (brat(4, 1) * &d_r * &r_max * &r_max);
    let eps2 = radius2.min(budget2);
    let nu = ceil_log2_inv(&eps2).max(1);

    Ok(BoundConstants {
        n_deg,
        n_deg_z: p,
        n_height,
        coeff_height,
        value_bound,
        mahler_floor,
        c1_exponent,
        separation,
        mu,
        nu,
        clearing_denominator: h,
    })
}

/// Decide an instance through the big-integer pipeline: substitute the
/// Newton approximant `α̃ = f/g` (at precision `ν`) and `z = 1 − 2^{−μ}`,
/// clear all denominators, and read the verdict off one integer sign:
///
/// ```text
/// A[i][j] = Σ_t E[i][j][t]·f^t·g^{d−t}          (E = h·M as integer polynomials)
/// B = h·g^d·2^μ·I − (2^μ − 1)·A
/// V = det B;  U = (−1)^{1+p}·h·g^d·2^μ·det(B₁,ₚ)
/// Accept ⟺ 2^{c₁}·U·V − V² > 0   (⟺ U/V > 2^{−c₁})
/// ```
///
/// `V ≠ 0` is guaranteed by the constants derivation; `V = 0` therefore
/// signals a bug and is surfaced loudly, never retried.
pub fn decide_approx(
    inst: &DecisionInstance,
    scheme: &NewtonScheme,
    constants: &BoundConstants,
) -> Result<DecisionResult> {
    if !scheme.field().same_root(inst.field()) {
        return Err(Error::FieldMismatch);
    }
    let p = inst.dim();
    let d = inst.field().degree();
    let h = &constants.clearing_denominator;

    let ap = reduce(&scheme.approximant(constants.nu + 2));
    let (mut f, mut g) = (ap.num, ap.den);
    // The recurrence integers overshoot the requested accuracy by a large
    // constant factor in bit-length. Replace f/g by its rounding to ν + 2
    // fractional dyadic bits whenever that is shorter: the rounding moves
    // the value by at most 2^{−(ν+3)} on top of the recurrence's
    // 2^{−(ν+2)}, so the substituted ratio still meets the 2^{−ν} accuracy
    // the constants were derived for — while every matrix entry below stays
    // ν-sized instead of inheriting the raw integers' length.
    let dyadic_bits = constants.nu + 2;
    if g.bits() > dyadic_bits + 1 {
        let scaled = BigRational::new(&f * (BigInt::one() << dyadic_bits), g);
        f = scaled.round().to_integer();
        g = BigInt::one() << dyadic_bits;
    }

    // power tables f^t (t ≤ d−1) and g^t (t ≤ d)
    let mut fpow = vec![BigInt::one()];
    for _ in 1..d {
        fpow.push(fpow.last().unwrap() * &f);
    }
    let mut gpow = vec![BigInt::one()];
    for _ in 1..=d {
        gpow.push(gpow.last().unwrap() * &g);
    }

    let two_mu = BigInt::one() << constants.mu;
    let fac = &two_mu - BigInt::one();
    let diag = h * &gpow[d] * &two_mu;

    let mut b = Matrix::zeros(p, p, &BigInt::zero());
    for r in 0..p {
        for c in 0..p {
            let mut acc = BigInt::zero();
            for (t, co) in inst.m[(r, c)].coeffs().iter().enumerate() {
                if co.is_zero() {
                    continue;
                }
                let e = (co.numer() * h).div_floor(co.denom());
                debug_assert_eq!(&e * co.denom(), co.numer() * h, "h must clear denominators");
                acc += e * &fpow[t] * &gpow[d - t];
            }
            let mut entry = -(&fac * acc);
            if r == c {
                entry += &diag;
            }
            b.set(r, c, entry);
        }
    }

    let v = b.det()?;
    if v.is_zero() {
        return Err(Error::InternalBoundViolation(
            "det(B) = 0: the derived μ/ν failed to keep the denominator away from its root"
                .into(),
        ));
    }
    let minor_det = b.minor(0, p - 1)?.det()?;
    let u = if limit_sign_is_positive(p) {
        &diag * minor_det
    } else {
        -(&diag * minor_det)
    };

    let f_val = (BigInt::one() << constants.c1_exponent) * &u * &v - &v * &v;
    let verdict = if f_val.is_positive() {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    let diagnostics = Diagnostics {
        constants: Some(constants.clone()),
        u_bits: Some(u.bits()),
        v_bits: Some(v.bits()),
        approx_ratio: Some(BigRational::new(u, v)),
        ..Diagnostics::default()
    };
    Ok(DecisionResult {
        verdict,
        method: Method::Approx,
        witness: None,
        diagnostics,
    })
}

/// A certified Newton scheme for a field, seeded from the midpoint of its
/// isolating interval (refined enough that certification succeeds without
/// rescue in practice).
pub fn default_scheme(field: &Field) -> Result<NewtonScheme> {
    let iv = field.refine_to_width(&brat(1, 64));
    let mid = iv.midpoint();
    NewtonScheme::certify(field, mid.numer(), mid.denom())
}

/// Decide `Pr[halt with 1] > β` for a selective operation and initial state.
///
/// Validates the operation, realifies only when entries are genuinely
/// complex (realification is semantically transparent but quadruples the
/// decision-matrix dimension), builds the decision matrix, and runs the
/// chosen route(s). With [`RouteChoice::Both`] the two verdicts must agree;
/// disagreement is a bug and returns [`Error::RouteMismatch`].
pub fn decide_process(
    op: &SelectiveOperation,
    rho: &DensityMatrix,
    beta: &FieldElement,
    route: RouteChoice,
) -> Result<DecisionResult> {
    op.validate()?;
    let realified;
    let (op_r, rho_r) = if op.is_real() && rho.is_real() {
        (op, rho)
    } else {
        realified = op.realify(rho)?;
        (&realified.0, &realified.1)
    };
    let dm = build_decision_matrix(op_r, rho_r, beta)?;
    let inst = DecisionInstance::from_decision_matrix(&dm);
    match route {
        RouteChoice::Exact => decide_exact(&inst),
        RouteChoice::Approx => {
            let constants = derive_constants(&inst)?;
            let scheme = default_scheme(inst.field())?;
            decide_approx(&inst, &scheme, &constants)
        }
        RouteChoice::Both => {
            let exact = decide_exact(&inst)?;
            let constants = derive_constants(&inst)?;
            let scheme = default_scheme(inst.field())?;
            let approx = decide_approx(&inst, &scheme, &constants)?;
            if exact.verdict != approx.verdict {
                return Err(Error::RouteMismatch {
                    exact: exact.verdict.to_string(),
                    approx: approx.verdict.to_string(),
                });
            }
            let mut diagnostics = approx.diagnostics;
            diagnostics.vanishing_order = exact.diagnostics.vanishing_order;
            diagnostics.num_degree = exact.diagnostics.num_degree;
            diagnostics.den_degree = exact.diagnostics.den_degree;
            Ok(DecisionResult {
                verdict: exact.verdict,
                method: Method::Exact,
                witness: exact.witness,
                diagnostics,
            })
        }
    }
}

/// Check that every entry is ≥ 0 and every column sums exactly to 1.
pub(crate) fn check_column_stochastic(a: &Matrix<FieldElement>) -> Result<()> {
    let n = a.rows();
    let field = a[(0, 0)].field().clone();
    let one = field.one();
    for c in 0..n {
        let mut sum = field.zero();
        for r in 0..n {
            if a[(r, c)].sign() < 0 {
                return Err(Error::NotStochastic(format!(
                    "entry ({r}, {c}) = {} is negative",
                    a[(r, c)]
                )));
            }
            sum = sum.add(&a[(r, c)]);
        }
        if sum != one {
            return Err(Error::NotStochastic(format!(
                "column {c} sums to {sum}, not 1"
            )));
        }
    }
    Ok(())
}

/// For a checked column-stochastic matrix: nonnegative entries + unit column
/// sums make "diagonal entry is 1" the whole absorbing condition.
pub(crate) fn absorbing_flags(a: &Matrix<FieldElement>) -> Vec<bool> {
    let one = a[(0, 0)].field().one();
    (0..a.rows()).map(|s| a[(s, s)] == one).collect()
}

/// Exact absorption probability of a column-stochastic chain: starting from
/// `start`, the probability of eventually being absorbed in `target`
/// (0-based states).
///
/// With `B` the transition matrix after zeroing the columns of absorbing
/// states, the answer is `Σ_t B^t[target, start] =
/// (−1)^{start+target}·det((I−B) minus row `start`, column `target`)/det(I−B)`.
/// Preconditions checked exactly: the matrix is column-stochastic, `target`
/// is absorbing, and every state can reach some absorbing state (replacing a
/// spectral-radius assumption with a decidable graph property).
pub fn markov_absorption(
    a: &Matrix<FieldElement>,
    start: usize,
    target: usize,
) -> Result<FieldElement> {
    if !a.is_square() || a.rows() == 0 {
        return Err(Error::NotStochastic(format!(
            "expected a nonempty square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if start >= n || target >= n {
        return Err(Error::IndexOutOfRange(format!(
            "start {start} / target {target} in a {n}-state chain"
        )));
    }
    let field = a[(0, 0)].field().clone();
    check_column_stochastic(a)?;
    let absorbing = absorbing_flags(a);
    if !absorbing[target] {
        return Err(Error::NonAbsorbingChain(format!(
            "target state {target} is not absorbing"
        )));
    }
    // reverse reachability from the absorbing set
    let mut reached = absorbing.clone();
    let mut queue: VecDeque<usize> = (0..n).filter(|&s| absorbing[s]).collect();
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if !reached[j] && !a[(i, j)].is_zero() {
                reached[j] = true;
                queue.push_back(j);
            }
        }
    }
    if let Some(stuck) = (0..n).position(|s| !reached[s]) {
        return Err(Error::NonAbsorbingChain(format!(
            "state {stuck} cannot reach any absorbing state"
        )));
    }
    if n == 1 {
        return Ok(field.one()); // start = target = the single absorbing state
    }
    // I − B with absorbing columns of B zeroed (their I−B columns stay e_c)
    let mut imb = Matrix::identity(n, &field.zero());
    for c in 0..n {
        if absorbing[c] {
            continue;
        }
        for r in 0..n {
            let delta = if r == c { field.one() } else { field.zero() };
            imb.set(r, c, delta.sub(&a[(r, c)]));
        }
    }
    let det = imb.det()?;
    let minor_det = imb.minor(start, target)?.det()?;
    let ratio = minor_det.div(&det)?;
    Ok(if (start + target) % 2 == 0 {
        ratio
    } else {
        ratio.neg()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;
    use crate::linalg::Matrix;
    use crate::process::{DensityMatrix, SelectiveOperation};
    use crate::ComplexFieldElement;

    fn q(n: i64, d: i64) -> BigRational {
        brat(n, d)
    }

    fn fe_matrix(field: &Field, rows: &[&[(i64, i64)]]) -> Matrix<FieldElement> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| field.from_rational(q(n, d))).collect())
                .collect(),
        )
        .unwrap()
    }

    fn hadamard_measure() -> (SelectiveOperation, DensityMatrix) {
        let field = NumberField::sqrt2();
        let s = field.generator().scale(&q(1, 2));
        let z = field.zero();
        let row =
            |a: &FieldElement, b: &FieldElement| vec![ComplexFieldElement::from_real(a.clone()), ComplexFieldElement::from_real(b.clone())];
        let a0 = Matrix::from_rows(vec![row(&s, &s), row(&z, &z)]).unwrap();
        let a1 = Matrix::from_rows(vec![row(&z, &z), row(&s, &s.neg())]).unwrap();
        let op =
            SelectiveOperation::new(&field, 2, 2, 1, vec![((0, 1), a0), ((1, 1), a1)]).unwrap();
        let rho = DensityMatrix::basis(&field, 2, 0).unwrap();
        (op, rho)
    }

    #[test]
    fn geometric_series_limit() {
        // M = [[1/2, 0], [1/2, 0]]: Σ_t M^t[2,1] = 1/2 + 1/4 + … = 1.
        let field = NumberField::sqrt2();
        let m = fe_matrix(&field, &[&[(1, 2), (0, 1)], &[(1, 2), (0, 1)]]);
        let inst = DecisionInstance::new(m, "geometric").unwrap();
        assert_eq!(series_limit_exact(&inst).unwrap(), field.one());
    }

    #[test]
    fn zero_limit_when_target_unreachable() {
        let field = NumberField::sqrt2();
        let m = fe_matrix(&field, &[&[(0, 1), (0, 1)], &[(0, 1), (0, 1)]]);
        let inst = DecisionInstance::new(m, "zero").unwrap();
        assert!(series_limit_exact(&inst).unwrap().is_zero());
    }

    #[test]
    fn divergent_series_detected_by_order_mismatch() {
        // M = [[1, 0], [1, 0]]: Σ_t M^t[2,1] = 1 + 1 + … diverges, and the
        // denominator vanishes at z = 1 while the numerator does not.
        let field = NumberField::sqrt2();
        let m = fe_matrix(&field, &[&[(1, 1), (0, 1)], &[(1, 1), (0, 1)]]);
        let inst = DecisionInstance::new(m, "divergent").unwrap();
        match series_limit_exact(&inst) {
            Err(Error::NoLimit {
                num_order,
                den_order,
            }) => {
                assert_eq!((num_order, den_order), (0, 1));
            }
            other => panic!("expected NoLimit, got {other:?}"),
        }
    }

    #[test]
    fn tiny_instances_are_rejected() {
        let field = NumberField::sqrt2();
        let m = fe_matrix(&field, &[&[(1, 2)]]);
        assert!(DecisionInstance::new(m, "too small").is_err());
    }

    #[test]
    fn hadamard_measure_exact_decisions() {
        let (op, rho) = hadamard_measure();
        let field = op.field().clone();
        // halting probability is exactly 1, so Accept iff β < 1
        for (num, den, accept) in [(0, 1, true), (1, 4, true), (1, 2, true), (3, 4, true), (1, 1, false)] {
            let beta = field.from_rational(q(num, den));
            let res = decide_process(&op, &rho, &beta, RouteChoice::Exact).unwrap();
            let expect = if accept { Verdict::Accept } else { Verdict::Reject };
            assert_eq!(res.verdict, expect, "β = {num}/{den}");
            // witness = 1 − β exactly
            let witness = res.witness.unwrap();
            assert_eq!(witness, field.one().sub(&beta));
        }
    }

    #[test]
    fn never_halting_process_rejects_at_zero() {
        let field = NumberField::sqrt2();
        let id = Matrix::identity(2, &ComplexFieldElement::zero(&field));
        let op = SelectiveOperation::new(&field, 2, 2, 1, vec![((0, 1), id)]).unwrap();
        let rho = DensityMatrix::basis(&field, 2, 0).unwrap();
        let res = decide_process(&op, &rho, &field.zero(), RouteChoice::Exact).unwrap();
        assert_eq!(res.verdict, Verdict::Reject);
        assert!(res.witness.unwrap().is_zero());
    }

    #[test]
    fn constants_are_finite_and_monotone() {
        let field = NumberField::sqrt2();
        let m = fe_matrix(&field, &[&[(1, 2), (0, 1)], &[(1, 2), (0, 1)]]);
        let inst = DecisionInstance::new(m.clone(), "base").unwrap();
        let c = derive_constants(&inst).unwrap();
        assert!(c.mu >= 1 && c.nu >= 1 && c.c1_exponent >= 1);
        assert!(c.separation.is_positive());
        assert!(c.mahler_floor.is_positive());

        // tripling every entry keeps the clearing denominator but grows the
        // numerators, so the precision requirements can only grow (doubling
        // would cancel the denominator 2 and shrink every cap instead)
        let tripled = m.scale(&field.from_integer(3));
        let inst2 = DecisionInstance::new(tripled, "tripled").unwrap();
        let c2 = derive_constants(&inst2).unwrap();
        assert!(c2.mu >= c.mu);
        assert!(c2.nu >= c.nu);
        assert!(c2.c1_exponent >= c.c1_exponent);

        // a purely rational instance collapses the Mahler floor to 1
        let rational = NumberField::rational();
        let m3 = fe_matrix(&rational, &[&[(1, 2), (0, 1)], &[(1, 2), (0, 1)]]);
        let inst3 = DecisionInstance::new(m3, "rational").unwrap();
        let c3 = derive_constants(&inst3).unwrap();
        assert_eq!(c3.mahler_floor, BigRational::one());
        assert!(c3.mu <= 64, "rational thresholds stay small, got μ = {}", c3.mu);
    }

    #[test]
    fn approx_route_agrees_and_is_certified() {
        let (op, rho) = hadamard_measure();
        let field = op.field().clone();
        for (num, den) in [(0, 1), (1, 4), (1, 2), (1, 1)] {
            let beta = field.from_rational(q(num, den));
            let both = decide_process(&op, &rho, &beta, RouteChoice::Both).unwrap();
            let exact = decide_process(&op, &rho, &beta, RouteChoice::Exact).unwrap();
            assert_eq!(both.verdict, exact.verdict, "β = {num}/{den}");

            // internal certificate: |U/V − limit| < separation/2, exactly
            let constants = both.diagnostics.constants.as_ref().unwrap();
            let ratio = both.diagnostics.approx_ratio.as_ref().unwrap();
            let limit = exact.witness.unwrap();
            let err = limit.sub(&field.from_rational(ratio.clone())).abs();
            let half_sep = field.from_rational(&constants.separation / BigInt::from(2));
            assert!(err.sub(&half_sep).sign() < 0, "β = {num}/{den}");
        }
    }

    #[test]
    fn three_state_fair_split_absorption() {
        let field = NumberField::rational();
        // column 0 splits to states 1 and 2; both absorbing
        let a = fe_matrix(
            &field,
            &[
                &[(0, 1), (0, 1), (0, 1)],
                &[(1, 2), (1, 1), (0, 1)],
                &[(1, 2), (0, 1), (1, 1)],
            ],
        );
        assert_eq!(markov_absorption(&a, 0, 1).unwrap(), field.from_rational(q(1, 2)));
        assert_eq!(markov_absorption(&a, 0, 2).unwrap(), field.from_rational(q(1, 2)));
        // start at an absorbing state
        assert_eq!(markov_absorption(&a, 1, 1).unwrap(), field.one());
        assert!(markov_absorption(&a, 2, 1).unwrap().is_zero());
    }

    #[test]
    fn gamblers_ruin_is_even() {
        let field = NumberField::rational();
        let z = (0, 1);
        let h = (1, 2);
        let o = (1, 1);
        let a = fe_matrix(
            &field,
            &[
                &[o, h, z, z, z],
                &[z, z, h, z, z],
                &[z, h, z, h, z],
                &[z, z, h, z, z],
                &[z, z, z, h, o],
            ],
        );
        assert_eq!(markov_absorption(&a, 2, 4).unwrap(), field.from_rational(q(1, 2)));
        assert_eq!(markov_absorption(&a, 2, 0).unwrap(), field.from_rational(q(1, 2)));
        // nearer the winning edge: classical ruin probabilities k/4
        assert_eq!(markov_absorption(&a, 3, 4).unwrap(), field.from_rational(q(3, 4)));
    }

    #[test]
    fn markov_precondition_failures() {
        let field = NumberField::rational();
        // column sums ≠ 1
        let a = fe_matrix(&field, &[&[(1, 2), (0, 1)], &[(1, 4), (1, 1)]]);
        assert!(matches!(markov_absorption(&a, 0, 1), Err(Error::NotStochastic(_))));
        // target not absorbing (a pure swap)
        let a = fe_matrix(&field, &[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        assert!(matches!(
            markov_absorption(&a, 0, 1),
            Err(Error::NonAbsorbingChain(_))
        ));
        // a trapped cycle that never reaches the absorbing state
        let a = fe_matrix(
            &field,
            &[
                &[(0, 1), (1, 1), (0, 1)],
                &[(1, 1), (0, 1), (0, 1)],
                &[(0, 1), (0, 1), (1, 1)],
            ],
        );
        assert!(matches!(
            markov_absorption(&a, 0, 2),
            Err(Error::NonAbsorbingChain(_))
        ));
        // negative entry
        let a = fe_matrix(&field, &[&[(3, 2), (0, 1)], &[(-1, 2), (1, 1)]]);
        assert!(matches!(markov_absorption(&a, 0, 1), Err(Error::NotStochastic(_))));
    }

    #[test]
    fn single_state_chain() {
        let field = NumberField::rational();
        let a = fe_matrix(&field, &[&[(1, 1)]]);
        assert_eq!(markov_absorption(&a, 0, 0).unwrap(), field.one());
    }

    #[test]
    fn ceil_log2_inv_reference_values() {
        assert_eq!(ceil_log2_inv(&brat(1, 1)), 0);
        assert_eq!(ceil_log2_inv(&brat(1, 2)), 1);
        assert_eq!(ceil_log2_inv(&brat(1, 3)), 2);
        assert_eq!(ceil_log2_inv(&brat(1, 4)), 2);
        assert_eq!(ceil_log2_inv(&brat(3, 8)), 2);
        assert_eq!(ceil_log2_inv(&brat(1, 1024)), 10);
        assert_eq!(ceil_log2_inv(&brat(5, 2)), 0);
    }
}
