//! Selective quantum operations and the processes they induce.
//!
//! A *selective quantum operation* is a finite family of Kraus branches
//! `A[i,j]` — output symbol `i`, internal branch `j` — satisfying
//! `Σ_{i,j} A[i,j]† A[i,j] = I` exactly. Iterating it from a density matrix
//! produces a stochastic stream of output symbols; everything in this module
//! computes distributional quantities of that stream in exact field
//! arithmetic. The only floating-point code is [`SelectiveOperation::sample_trajectory`],
//! a Monte-Carlo cross-check that never feeds the decision path.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::field::{ComplexFieldElement, Field, FieldElement};
use crate::linalg::{charpoly, Matrix};
use crate::Result;

/// Whether [`SelectiveOperation::apply_branch`] renormalizes by the branch
/// probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `E_i(ρ) = F_i(ρ)/p_i(ρ)` — a density matrix again; undefined when
    /// `p_i(ρ) = 0`.
    Normalized,
    /// `F_i(ρ) = Σ_j A[i,j] ρ A[i,j]†` — trace equals `p_i(ρ)`.
    Unnormalized,
}

fn czero(field: &Field) -> ComplexFieldElement {
    ComplexFieldElement::zero(field)
}

fn cmat_zeros(field: &Field, rows: usize, cols: usize) -> Matrix<ComplexFieldElement> {
    Matrix::zeros(rows, cols, &czero(field))
}

/// Trace of an exactly-Hermitian matrix, returned as the real field element
/// it provably is.
fn real_trace(m: &Matrix<ComplexFieldElement>) -> Result<FieldElement> {
    let t = m.trace()?;
    if !t.im.is_zero() {
        return Err(Error::BadDensityMatrix(format!(
            "trace has nonzero imaginary part {}",
            t.im
        )));
    }
    Ok(t.re)
}

/// A density matrix: Hermitian, unit-trace, positive semidefinite — all
/// three verified exactly at construction.
///
/// Positive semidefiniteness is decided without computing eigenvalues: for a
/// Hermitian matrix the spectrum is real, so `det(λI − ρ) = Σ_k (−1)^k e_k
/// λ^{n−k}` has all roots ≥ 0 exactly when every signed characteristic
/// coefficient `e_k` (the sum of k×k principal minors) is ≥ 0.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: Matrix<ComplexFieldElement>,
}

impl DensityMatrix {
    pub fn new(m: Matrix<ComplexFieldElement>) -> Result<Self> {
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::BadDensityMatrix(format!(
                "expected a nonempty square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_hermitian() {
            return Err(Error::BadDensityMatrix("not Hermitian".into()));
        }
        let n = m.rows();
        let field = m[(0, 0)].field().clone();
        let tr = real_trace(&m)?;
        if tr != field.one() {
            return Err(Error::BadDensityMatrix(format!("trace is {tr}, not 1")));
        }
        // e_k = (−1)^k · c_{n−k} where det(λI − ρ) = Σ_j c_j λ^j.
        let c = charpoly(&m)?;
        for k in 0..=n {
            let signed = if k % 2 == 0 {
                c[n - k].clone()
            } else {
                c[n - k].neg()
            };
            if !signed.im.is_zero() {
                return Err(Error::BadDensityMatrix(format!(
                    "characteristic coefficient e_{k} is not real: {signed}"
                )));
            }
            if signed.re.sign() < 0 {
                return Err(Error::BadDensityMatrix(format!(
                    "not positive semidefinite: e_{k} = {} < 0",
                    signed.re
                )));
            }
        }
        Ok(Self { m })
    }

    /// `|ψ⟩⟨ψ|` for a unit vector ψ (norm checked exactly).
    pub fn pure(state: &[ComplexFieldElement]) -> Result<Self> {
        if state.is_empty() {
            return Err(Error::BadDensityMatrix("empty state vector".into()));
        }
        let field = state[0].field().clone();
        let mut norm = field.zero();
        for v in state {
            norm = norm.add(&v.norm_sq());
        }
        if norm != field.one() {
            return Err(Error::BadDensityMatrix(format!(
                "state vector has squared norm {norm}, not 1"
            )));
        }
        let n = state.len();
        let mut m = cmat_zeros(&field, n, n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, state[r].mul(&state[c].conj()));
            }
        }
        // Rank-one projector with unit trace; skip the generic re-checks.
        Ok(Self { m })
    }

    /// The computational basis state `|k⟩⟨k|` in dimension `n`.
    pub fn basis(field: &Field, n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::IndexOutOfRange(format!(
                "basis state {k} in dimension {n}"
            )));
        }
        let mut state = vec![czero(field); n];
        state[k] = ComplexFieldElement::one(field);
        Self::pure(&state)
    }

    pub fn matrix(&self) -> &Matrix<ComplexFieldElement> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn field(&self) -> &Field {
        self.m[(0, 0)].field()
    }

    pub fn is_real(&self) -> bool {
        self.m.data().iter().all(ComplexFieldElement::is_real)
    }
}

/// A selective quantum operation `{A[i,j]}` with `outputs` output symbols
/// (`0 ≤ i < outputs`) and `branches` internal branches (`1 ≤ j ≤ branches`).
/// Branches not supplied are zero matrices.
#[derive(Clone, Debug)]
pub struct SelectiveOperation {
    field: Field,
    dim: usize,
    outputs: usize,
    branches: usize,
    kraus: BTreeMap<(usize, usize), Matrix<ComplexFieldElement>>,
}

impl SelectiveOperation {
    /// Structural construction: checks shapes, index ranges, and field
    /// consistency. Completeness (`Σ A†A = I`) is checked separately by
    /// [`SelectiveOperation::validate`] so that deliberately broken
    /// operations can be built for testing and error reporting.
    pub fn new(
        field: &Field,
        dim: usize,
        outputs: usize,
        branches: usize,
        entries: Vec<((usize, usize), Matrix<ComplexFieldElement>)>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadDimension("operation dimension must be ≥ 1".into()));
        }
        if outputs == 0 || branches == 0 {
            return Err(Error::BadDimension(
                "need at least one output symbol and one branch".into(),
            ));
        }
        let mut kraus = BTreeMap::new();
        for ((i, j), m) in entries {
            if i >= outputs || j == 0 || j > branches {
                return Err(Error::IndexOutOfRange(format!(
                    "kraus index (i={i}, j={j}) with outputs={outputs}, branches={branches}"
                )));
            }
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::BadDimension(format!(
                    "kraus matrix ({i},{j}) is {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                )));
            }
            for e in m.data() {
                if !e.field().same_root(field) {
                    return Err(Error::FieldMismatch);
                }
            }
            if m.data().iter().all(ComplexFieldElement::is_zero) {
                continue; // zero branches are represented by absence
            }
            if kraus.insert((i, j), m).is_some() {
                return Err(Error::IndexOutOfRange(format!(
                    "duplicate kraus index (i={i}, j={j})"
                )));
            }
        }
        Ok(Self {
            field: field.clone(),
            dim,
            outputs,
            branches,
            kraus,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn branches(&self) -> usize {
        self.branches
    }

    pub fn kraus(&self, i: usize, j: usize) -> Option<&Matrix<ComplexFieldElement>> {
        self.kraus.get(&(i, j))
    }

    /// All nonzero branches, in deterministic `(i, j)` order.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Matrix<ComplexFieldElement>)> {
        self.kraus.iter()
    }

    /// The nonzero branches of output `i`.
    pub fn branches_of(&self, i: usize) -> impl Iterator<Item = &Matrix<ComplexFieldElement>> {
        self.kraus
            .range((i, 0)..(i + 1, 0))
            .map(|(_, m)| m)
    }

    pub fn is_real(&self) -> bool {
        self.kraus
            .values()
            .all(|m| m.data().iter().all(ComplexFieldElement::is_real))
    }

    /// Verify the completeness relation `Σ_{i,j} A†A = I` exactly; on
    /// failure, reports the entry of `Σ A†A − I` with the largest squared
    /// magnitude.
    pub fn validate(&self) -> Result<()> {
        let mut sum = cmat_zeros(&self.field, self.dim, self.dim);
        for m in self.kraus.values() {
            sum = sum.add(&m.dagger().matmul(m)?)?;
        }
        let dev = sum.sub(&Matrix::identity(self.dim, &czero(&self.field)))?;
        let mut worst: Option<(FieldElement, usize, usize)> = None;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let mag = dev[(r, c)].norm_sq();
                if mag.is_zero() {
                    continue;
                }
                let better = match &worst {
                    None => true,
                    Some((best, _, _)) => mag.sub(best).sign() > 0,
                };
                if better {
                    worst = Some((mag, r, c));
                }
            }
        }
        match worst {
            None => Ok(()),
            Some((_, r, c)) => Err(Error::CompletenessViolation {
                row: r,
                col: c,
                deviation: format!("{}", dev[(r, c)]),
            }),
        }
    }

    /// The unnormalized branch map `F_i(X) = Σ_j A[i,j] X A[i,j]†` on an
    /// arbitrary matrix.
    pub fn branch_map(
        &self,
        x: &Matrix<ComplexFieldElement>,
        i: usize,
    ) -> Result<Matrix<ComplexFieldElement>> {
        if i >= self.outputs {
            return Err(Error::IndexOutOfRange(format!(
                "output {i} of an operation with {} outputs",
                self.outputs
            )));
        }
        let mut out = cmat_zeros(&self.field, self.dim, self.dim);
        for (_, a) in self.kraus.range((i, 0)..(i + 1, 0)) {
            out = out.add(&a.matmul(x)?.matmul(&a.dagger())?)?;
        }
        Ok(out)
    }

    /// `p_i(ρ) = tr(F_i(ρ))`, exact. The values over all `i` sum to 1 for a
    /// complete operation.
    pub fn branch_probability(&self, rho: &DensityMatrix, i: usize) -> Result<FieldElement> {
        real_trace(&self.branch_map(rho.matrix(), i)?)
    }

    /// Post-measurement state for output `i`: normalized `E_i(ρ)` or raw
    /// `F_i(ρ)` depending on `mode`. In [`Mode::Normalized`] the result is a
    /// valid density matrix whenever the inputs are valid.
    pub fn apply_branch(
        &self,
        rho: &DensityMatrix,
        i: usize,
        mode: Mode,
    ) -> Result<Matrix<ComplexFieldElement>> {
        let f = self.branch_map(rho.matrix(), i)?;
        match mode {
            Mode::Unnormalized => Ok(f),
            Mode::Normalized => {
                let p = real_trace(&f)?;
                if p.is_zero() {
                    return Err(Error::UndefinedBranch(i));
                }
                let inv = ComplexFieldElement::from_real(p.inv()?);
                Ok(f.scale(&inv))
            }
        }
    }

    /// `Pr[R₁ = r₁, …, R_t = r_t] = tr(F_{r_t} ∘ ⋯ ∘ F_{r_1}(ρ))`, exact.
    /// The empty prefix has probability 1.
    pub fn prefix_probability(&self, rho: &DensityMatrix, prefix: &[usize]) -> Result<FieldElement> {
        let mut cur = rho.matrix().clone();
        for &r in prefix {
            cur = self.branch_map(&cur, r)?;
        }
        real_trace(&cur)
    }

    /// Encode complex amplitudes as real 2×2 blocks: each branch `A` becomes
    /// `[[Re A, Im A], [−Im A, Re A]]` and the state becomes
    /// `½·[[Re ρ, Im ρ], [−Im ρ, Re ρ]]`. Dimensions double; every prefix
    /// probability is preserved exactly.
    pub fn realify(&self, rho: &DensityMatrix) -> Result<(SelectiveOperation, DensityMatrix)> {
        if rho.dim() != self.dim {
            return Err(Error::BadDimension(format!(
                "state dimension {} does not match operation dimension {}",
                rho.dim(),
                self.dim
            )));
        }
        let entries = self
            .kraus
            .iter()
            .map(|(&(i, j), a)| ((i, j), realify_blocks(a, false)))
            .collect();
        let op = SelectiveOperation::new(&self.field, 2 * self.dim, self.outputs, self.branches, entries)?;
        let rho2 = realify_blocks(rho.matrix(), true);
        Ok((op, DensityMatrix::new(rho2)?))
    }

    /// `Σ_{t=0}^{T} tr(F₁(F₀^t(ρ)))` — the probability of emitting output 1
    /// preceded only by 0s, within the first `T+1` steps. Computed by
    /// iterating `F₀` once per step; nondecreasing in `T` and ≤ 1.
    pub fn halting_probability_truncated(&self, rho: &DensityMatrix, t_max: u64) -> Result<FieldElement> {
        if self.outputs < 2 {
            return Err(Error::BadDimension(
                "operation has no output symbol 1".into(),
            ));
        }
        let mut cur = rho.matrix().clone();
        let mut total = self.field.zero();
        for step in 0..=t_max {
            total = total.add(&real_trace(&self.branch_map(&cur, 1)?)?);
            if step < t_max {
                cur = self.branch_map(&cur, 0)?;
                if cur.data().iter().all(ComplexFieldElement::is_zero) {
                    break;
                }
            }
        }
        Ok(total)
    }

    /// Sample `max_steps` output symbols with double-precision branch
    /// probabilities and a deterministic seeded generator.
    ///
    /// Statistical validation only: the floating-point state drifts from the
    /// exact semantics, so this must never feed a decision. Identical seeds
    /// yield identical trajectories.
    pub fn sample_trajectory(&self, rho: &DensityMatrix, seed: u64, max_steps: usize) -> Vec<usize> {
        let n = self.dim;
        let to_c64 = |m: &Matrix<ComplexFieldElement>| -> Vec<Vec<Complex64>> {
            (0..n)
                .map(|r| {
                    (0..n)
                        .map(|c| {
                            let (re, im) = m[(r, c)].to_f64_pair();
                            Complex64::new(re, im)
                        })
                        .collect()
                })
                .collect()
        };
        let branch_mats: Vec<Vec<Vec<Vec<Complex64>>>> = (0..self.outputs)
            .map(|i| {
                self.kraus
                    .range((i, 0)..(i + 1, 0))
                    .map(|(_, a)| to_c64(a))
                    .collect()
            })
            .collect();
        let matmul = |a: &Vec<Vec<Complex64>>, b: &Vec<Vec<Complex64>>| -> Vec<Vec<Complex64>> {
            (0..n)
                .map(|r| {
                    (0..n)
                        .map(|c| (0..n).map(|k| a[r][k] * b[k][c]).sum())
                        .collect()
                })
                .collect()
        };
        let dagger = |a: &Vec<Vec<Complex64>>| -> Vec<Vec<Complex64>> {
            (0..n)
                .map(|r| (0..n).map(|c| a[c][r].conj()).collect())
                .collect()
        };

        let mut state = to_c64(rho.matrix());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(max_steps);
        for _ in 0..max_steps {
            let images: Vec<Vec<Vec<Complex64>>> = branch_mats
                .iter()
                .map(|mats| {
                    let mut f = vec![vec![Complex64::new(0.0, 0.0); n]; n];
                    for a in mats {
                        let img = matmul(&matmul(a, &state), &dagger(a));
                        for r in 0..n {
                            for c in 0..n {
                                f[r][c] += img[r][c];
                            }
                        }
                    }
                    f
                })
                .collect();
            let probs: Vec<f64> = images
                .iter()
                .map(|f| (0..n).map(|d| f[d][d].re).sum::<f64>().max(0.0))
                .collect();
            let total: f64 = probs.iter().sum();
            let mut draw = rng.gen::<f64>() * total;
            let mut chosen = self.outputs - 1;
            for (i, p) in probs.iter().enumerate() {
                if *p <= 0.0 {
                    continue;
                }
                if draw < *p {
                    chosen = i;
                    break;
                }
                draw -= p;
            }
            out.push(chosen);
            let p = probs[chosen];
            state = images[chosen]
                .iter()
                .map(|row| row.iter().map(|z| z / p).collect())
                .collect();
        }
        out
    }
}

/// `[[Re M, Im M], [−Im M, Re M]]`, halved when `halve` is set (the state
/// encoding carries a global ½ so its trace stays 1).
fn realify_blocks(m: &Matrix<ComplexFieldElement>, halve: bool) -> Matrix<ComplexFieldElement> {
    let n = m.rows();
    let field = m[(0, 0)].field().clone();
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut out = cmat_zeros(&field, 2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let re = m[(r, c)].re.clone();
            let im = m[(r, c)].im.clone();
            let (re, im) = if halve {
                (re.scale(&half), im.scale(&half))
            } else {
                (re, im)
            };
            out.set(r, c, ComplexFieldElement::from_real(re.clone()));
            out.set(r, n + c, ComplexFieldElement::from_real(im.clone()));
            out.set(n + r, c, ComplexFieldElement::from_real(im.neg()));
            out.set(n + r, n + c, ComplexFieldElement::from_real(re));
        }
    }
    out
}

/// The `(n²+2)-dimensional` real matrix whose powers' corner entries are
/// prefix-halting probabilities: `M^{t+2}[p, 1] = Pr[0^t·1]` (1-based
/// corners), and whose power series telescopes to the halting probability
/// minus β.
#[derive(Clone, Debug)]
pub struct DecisionMatrix {
    m: Matrix<FieldElement>,
    beta: FieldElement,
    source_dim: usize,
}

impl DecisionMatrix {
    pub fn matrix(&self) -> &Matrix<FieldElement> {
        &self.m
    }

    /// Full dimension `n² + 2`.
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn beta(&self) -> &FieldElement {
        &self.beta
    }

    /// Dimension `n` of the operation this matrix encodes.
    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    /// `M^t[p, 1]` for the fixed corner target (1-based indices `p` and 1).
    pub fn power_entry(&self, t: u64) -> Result<FieldElement> {
        self.m.pow_entry(t, self.m.rows() - 1, 0)
    }

    /// `Σ_{t=0}^{T} M^t[p, 1]`, by iterating one matrix–vector product per
    /// step. Equals `(Σ_{t ≤ T−2} Pr[0^t·1]) − β` for `T ≥ 1`.
    pub fn partial_sum(&self, t_max: u64) -> FieldElement {
        let p = self.m.rows();
        let field = self.beta.field().clone();
        // column vector M^t e₁, accumulating coordinate p
        let mut v: Vec<FieldElement> = vec![field.zero(); p];
        v[0] = field.one();
        let mut total = field.zero();
        for step in 0..=t_max {
            total = total.add(&v[p - 1]);
            if step < t_max {
                let mut next = vec![field.zero(); p];
                for (k, vk) in v.iter().enumerate() {
                    if vk.is_zero() {
                        continue;
                    }
                    for r in 0..p {
                        if self.m[(r, k)].is_zero() {
                            continue;
                        }
                        next[r] = next[r].add(&self.m[(r, k)].mul(vk));
                    }
                }
                v = next;
            }
        }
        total
    }
}

/// Assemble the decision matrix for a **real** operation and state with
/// cutpoint `β ∈ [0, 1]`:
///
/// ```text
///         ┌ 0      0                     0 ┐      p = n² + 2
///     M = │ vec(ρ) Σ_j A₀ⱼ ⊗ A₀ⱼ        0 │
///         └ −β     vec(Σ_j A₁ⱼᵀA₁ⱼ)ᵀ    0 ┘
/// ```
///
/// Row-major vectorization makes the middle block the matrix of
/// `X ↦ F₀(X)`, so `M^{t+2}[p, 1] = Pr[0^t·1]` exactly.
pub fn build_decision_matrix(
    op: &SelectiveOperation,
    rho: &DensityMatrix,
    beta: &FieldElement,
) -> Result<DecisionMatrix> {
    if !op.is_real() || !rho.is_real() {
        return Err(Error::NotReal);
    }
    if op.outputs() < 2 {
        return Err(Error::BadDimension(
            "operation has no output symbol 1".into(),
        ));
    }
    if rho.dim() != op.dim() {
        return Err(Error::BadDimension(format!(
            "state dimension {} does not match operation dimension {}",
            rho.dim(),
            op.dim()
        )));
    }
    if beta.sign() < 0 || beta.field().one().sub(beta).sign() < 0 {
        return Err(Error::BetaOutOfRange);
    }
    let n = op.dim();
    let p = n * n + 2;
    let field = op.field().clone();
    let re_of = |m: &Matrix<ComplexFieldElement>| -> Matrix<FieldElement> { m.map(|e| e.re.clone()) };

    let mut big = Matrix::zeros(p, p, &field.zero());

    // middle block: Σ_j A₀ⱼ ⊗ A₀ⱼ (real entries, so conjugation is trivial)
    let mut mid = Matrix::zeros(n * n, n * n, &field.zero());
    for a in op.branches_of(0) {
        let ar = re_of(a);
        mid = mid.add(&ar.kron(&ar))?;
    }
    let rho_vec = re_of(rho.matrix()).vectorize();
    for r in 0..n * n {
        big.set(1 + r, 0, rho_vec[(r, 0)].clone());
        for c in 0..n * n {
            big.set(1 + r, 1 + c, mid[(r, c)].clone());
        }
    }

    // bottom row: −β, then vec(Σ_j A₁ⱼᵀ A₁ⱼ)ᵀ
    let mut w = Matrix::zeros(n, n, &field.zero());
    for a in op.branches_of(1) {
        let ar = re_of(a);
        w = w.add(&ar.transpose().matmul(&ar)?)?;
    }
    let w_vec = w.vectorize();
    big.set(p - 1, 0, beta.neg());
    for c in 0..n * n {
        big.set(p - 1, 1 + c, w_vec[(c, 0)].clone());
    }

    Ok(DecisionMatrix {
        m: big,
        beta: beta.clone(),
        source_dim: n,
    })
}
