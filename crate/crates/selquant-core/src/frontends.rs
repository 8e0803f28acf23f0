//! Frontends that compile familiar models — quantum circuits and classical
//! Markov chains — into selective operations, so the decision engine can be
//! exercised against independently computable answers.
//!
//! * A [`CircuitSpec`] runs a fixed gate list on `width` qubits and measures
//!   one output qubit. [`circuit_accept_probability`] computes
//!   `Pr[output = 1]` directly by exact density-matrix evolution;
//!   [`circuit_to_process`] compiles the same circuit into a selective
//!   operation whose probability of halting with output 1 equals that
//!   acceptance probability *exactly* (the circuit is wired to an index
//!   register that cycles through the gates and measures on wrap-around).
//! * A [`MarkovSpec`] is a column-stochastic chain with distinguished
//!   absorbing accept/reject states. [`markov_to_process`] rewrites each
//!   transition `p·|r⟩⟨c|` as a Kraus operator `√p·|r⟩⟨c|`, taking square
//!   roots in the field or — optionally — splitting rational `p` into a sum
//!   of ≤ 4 rational squares ([`SqrtEncoding`]).
//!
//! All state indices in this module's API are 0-based; qubit positions are
//! 1-based with qubit 1 the most significant bit of a basis index.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::decide::{absorbing_flags, check_column_stochastic, markov_absorption};
use crate::error::Error;
use crate::field::{Field, FieldElement};
use crate::linalg::Matrix;
use crate::process::{DensityMatrix, SelectiveOperation};
use crate::ComplexFieldElement;
use crate::Result;

/// Hard cap on circuit width: density evolution is O(8^width) per gate.
pub const MAX_CIRCUIT_WIDTH: usize = 6;

fn brat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// ---------------------------------------------------------------------------
// square roots in the field
// ---------------------------------------------------------------------------

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let sn = q.numer().sqrt();
    let sd = q.denom().sqrt();
    if &(&sn * &sn) == q.numer() && &(&sd * &sd) == q.denom() {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

/// For degree-2 fields, solve `(b0 + b1·α)² = q0 + q1·α` in closed form.
/// With `α² = r1·α + r0` (read off the minimal polynomial), matching
/// coefficients and eliminating `b0 = (q1 − w·r1)/(2·b1)` for `w = b1² ≠ 0`
/// leaves a rational quadratic:
///
/// ```text
/// w²·(r1² + 4r0) − w·(2·q1·r1 + 4·q0) + q1² = 0
/// ```
///
/// whose admissible roots are the rational perfect squares `w ≥ 0`.
fn quadratic_sqrt(field: &Field, q0: &BigRational, q1: &BigRational) -> Option<FieldElement> {
    let mp = field.minpoly().coeffs(); // c0 + c1·y + c2·y²
    let c0 = BigRational::from(mp[0].clone());
    let c1 = BigRational::from(mp[1].clone());
    let c2 = BigRational::from(mp[2].clone());
    let r1 = -&c1 / &c2;
    let r0 = -&c0 / &c2;

    let a = &r1 * &r1 + brat(4, 1) * &r0; // minpoly discriminant / c2² — nonzero, and
    if !a.is_positive() {
        return None; // positive whenever the field has a real root
    }
    let b = brat(2, 1) * q1 * &r1 + brat(4, 1) * q0;
    let c = q1 * q1;
    let disc = &b * &b - brat(4, 1) * &a * &c;
    let sd = rational_sqrt(&disc)?;
    for w in [(&b + &sd) / (brat(2, 1) * &a), (&b - &sd) / (brat(2, 1) * &a)] {
        if !w.is_positive() {
            continue; // w = b1² must be positive (b1 = 0 is the rational case)
        }
        if let Some(b1) = rational_sqrt(&w) {
            let b0 = (q1 - &w * &r1) / (brat(2, 1) * &b1);
            if let Ok(cand) = field.from_coeffs(vec![b0, b1]) {
                return Some(cand);
            }
        }
    }
    None
}

/// The square root of `x` within its own field, if one exists: rational
/// perfect squares in any field, plus a complete closed form over degree-2
/// fields. Returns the nonnegative root; `None` means "no root in *this*
/// field" (it may well exist in a larger one).
pub fn sqrt_in_field(x: &FieldElement) -> Option<FieldElement> {
    let field = x.field().clone();
    match x.sign() {
        s if s < 0 => return None,
        0 => return Some(field.zero()),
        _ => {}
    }
    let coeffs = x.coeffs();
    if coeffs.iter().skip(1).all(|c| c.is_zero()) {
        if let Some(r) = rational_sqrt(&coeffs[0]) {
            return Some(field.from_rational(r));
        }
        // a rational can still be a square of an irrational (2 = (√2)²):
        // fall through to the degree-2 closed form
    }
    if field.degree() == 2 {
        let q1 = coeffs.get(1).cloned().unwrap_or_else(BigRational::zero);
        if let Some(cand) = quadratic_sqrt(&field, &coeffs[0], &q1) {
            // the derivation is exact, but verify anyway: a wrong root here
            // would silently corrupt every downstream Kraus operator
            if cand.mul(&cand) == *x {
                return Some(if cand.sign() < 0 { cand.neg() } else { cand });
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// gates and circuits
// ---------------------------------------------------------------------------

/// A gate on `arity` qubits, given by Kraus operators summing to identity
/// (`Σ K†K = I`, checked exactly). Unitaries are the single-operator case;
/// measurements and noise channels use several.
#[derive(Clone, Debug)]
pub struct GateSpec {
    arity: usize,
    kraus: Vec<Matrix<ComplexFieldElement>>,
    name: Option<String>,
}

impl GateSpec {
    pub fn new(arity: usize, kraus: Vec<Matrix<ComplexFieldElement>>) -> Result<Self> {
        if arity == 0 || arity > MAX_CIRCUIT_WIDTH {
            return Err(Error::BadGate(format!(
                "gate arity must be between 1 and {MAX_CIRCUIT_WIDTH}, got {arity}"
            )));
        }
        if kraus.is_empty() {
            return Err(Error::BadGate("a gate needs at least one Kraus operator".into()));
        }
        let dim = 1usize << arity;
        let field = kraus[0][(0, 0)].field().clone();
        let zero = ComplexFieldElement::zero(&field);
        let mut sum = Matrix::zeros(dim, dim, &zero);
        for k in &kraus {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::BadGate(format!(
                    "an arity-{arity} gate needs {dim}x{dim} Kraus operators, got {}x{}",
                    k.rows(),
                    k.cols()
                )));
            }
            if !k[(0, 0)].field().same_root(&field) {
                return Err(Error::FieldMismatch);
            }
            sum = sum.add(&k.dagger().matmul(k)?)?;
        }
        let identity = Matrix::identity(dim, &zero);
        for r in 0..dim {
            for c in 0..dim {
                let dev = sum[(r, c)].sub(&identity[(r, c)]);
                if !dev.is_zero() {
                    return Err(Error::CompletenessViolation {
                        row: r,
                        col: c,
                        deviation: dev.to_string(),
                    });
                }
            }
        }
        Ok(Self {
            arity,
            kraus,
            name: None,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The preset name this gate was built from, if any (explicit Kraus
    /// gates have none). Serialization uses it to keep files readable.
    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn kraus(&self) -> &[Matrix<ComplexFieldElement>] {
        &self.kraus
    }

    pub fn field(&self) -> &Field {
        self.kraus[0][(0, 0)].field()
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["H", "X", "Z", "CNOT", "MEASURE"]
    }

    /// Build a named preset over `field`. All presets are real; `H` needs
    /// `√(1/2)` in the field and fails with [`Error::RootNotInField`]
    /// otherwise. The complex phase gate `S` is deliberately *not* a preset:
    /// asking for it explains how to pass it as explicit Kraus data instead.
    pub fn preset(field: &Field, name: &str) -> Result<GateSpec> {
        let zero = ComplexFieldElement::zero(field);
        let one = ComplexFieldElement::one(field);
        let from_rows = |rows: Vec<Vec<ComplexFieldElement>>| Matrix::from_rows(rows).unwrap();
        let built = match name {
            "H" => {
                let half = field.from_rational(brat(1, 2));
                let s = sqrt_in_field(&half).ok_or_else(|| {
                    Error::RootNotInField(
                        "the H gate needs a square root of 1/2; use a field containing √2 \
                         (e.g. the \"sqrt2\" preset field)"
                            .into(),
                    )
                })?;
                let s = ComplexFieldElement::from_real(s);
                let m = from_rows(vec![
                    vec![s.clone(), s.clone()],
                    vec![s.clone(), s.neg()],
                ]);
                GateSpec::new(1, vec![m])
            }
            "X" => GateSpec::new(
                1,
                vec![from_rows(vec![
                    vec![zero.clone(), one.clone()],
                    vec![one.clone(), zero.clone()],
                ])],
            ),
            "Z" => GateSpec::new(
                1,
                vec![from_rows(vec![
                    vec![one.clone(), zero.clone()],
                    vec![zero.clone(), one.neg()],
                ])],
            ),
            // control = first target qubit, target = second
            "CNOT" => {
                let mut m = Matrix::zeros(4, 4, &zero);
                for (col, row) in [(0usize, 0usize), (1, 1), (2, 3), (3, 2)] {
                    m.set(row, col, one.clone());
                }
                GateSpec::new(2, vec![m])
            }
            "MEASURE" => {
                let mut p0 = Matrix::zeros(2, 2, &zero);
                p0.set(0, 0, one.clone());
                let mut p1 = Matrix::zeros(2, 2, &zero);
                p1.set(1, 1, one.clone());
                GateSpec::new(1, vec![p0, p1])
            }
            "S" => Err(Error::BadGate(
                "the S gate has a complex entry; pass it as an explicit Kraus gate \
                 [[1, 0], [0, i]] — complex entries are handled exactly and realified \
                 automatically when a decision is requested"
                    .into(),
            )),
            other => Err(Error::BadGate(format!(
                "unknown gate preset {other:?}; available: {}",
                Self::preset_names().join(", ")
            ))),
        };
        built.map(|mut gate| {
            gate.name = Some(name.to_string());
            gate
        })
    }
}

/// Position of qubit `q` (1-based, qubit 1 = most significant) inside a
/// `width`-qubit basis index.
fn qubit_bit(x: usize, q: usize, width: usize) -> usize {
    (x >> (width - q)) & 1
}

/// Map a full-register basis index to the index of the reordered register
/// that lists the target qubits first (in target order) and the remaining
/// qubits after them (in ascending position).
fn embed_index(x: usize, targets: &[usize], width: usize) -> usize {
    let k = targets.len();
    let mut y = 0usize;
    for (j, &t) in targets.iter().enumerate() {
        y |= qubit_bit(x, t, width) << (width - 1 - j);
    }
    let mut slot = 0;
    for q in 1..=width {
        if !targets.contains(&q) {
            y |= qubit_bit(x, q, width) << (width - k - 1 - slot);
            slot += 1;
        }
    }
    y
}

/// Extend a gate to the full `width`-qubit register: tensor with identity on
/// the untouched qubits, then permute so the gate acts on `targets`
/// (1-based, distinct, order-sensitive — `CNOT` on `[2, 1]` swaps the roles
/// of control and target).
pub fn expand_gate(
    gate: &GateSpec,
    targets: &[usize],
    width: usize,
) -> Result<Vec<Matrix<ComplexFieldElement>>> {
    if targets.len() != gate.arity() {
        return Err(Error::BadTargets(format!(
            "gate of arity {} applied to {} targets",
            gate.arity(),
            targets.len()
        )));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t == 0 || t > width {
            return Err(Error::BadTargets(format!(
                "target qubit {t} outside 1..={width}"
            )));
        }
        if targets[..i].contains(&t) {
            return Err(Error::BadTargets(format!("target qubit {t} repeated")));
        }
    }
    let field = gate.field().clone();
    let dim = 1usize << width;
    let rest = width - gate.arity();
    let zero = ComplexFieldElement::zero(&field);
    let id_rest = Matrix::identity(1usize << rest, &zero);
    let mut out = Vec::with_capacity(gate.kraus().len());
    for k in gate.kraus() {
        let big = k.kron(&id_rest);
        let mut m = Matrix::zeros(dim, dim, &zero);
        for x in 0..dim {
            for x2 in 0..dim {
                let v = &big[(embed_index(x, targets, width), embed_index(x2, targets, width))];
                if !v.is_zero() {
                    m.set(x, x2, v.clone());
                }
            }
        }
        out.push(m);
    }
    Ok(out)
}

/// A fixed-width circuit: a gate list applied in order to `|0…0⟩`, then one
/// designated qubit is read out. Qubits are numbered 1..=width, qubit 1
/// being the most significant bit of a basis index.
#[derive(Clone, Debug)]
pub struct CircuitSpec {
    field: Field,
    width: usize,
    gates: Vec<(GateSpec, Vec<usize>)>,
    output: usize,
}

impl CircuitSpec {
    pub fn new(
        field: &Field,
        width: usize,
        gates: Vec<(GateSpec, Vec<usize>)>,
        output: usize,
    ) -> Result<Self> {
        if width == 0 || width > MAX_CIRCUIT_WIDTH {
            return Err(Error::BadDimension(format!(
                "circuit width must be between 1 and {MAX_CIRCUIT_WIDTH}, got {width}"
            )));
        }
        if output == 0 || output > width {
            return Err(Error::BadTargets(format!(
                "output qubit {output} outside 1..={width}"
            )));
        }
        for (gate, targets) in &gates {
            if !gate.field().same_root(field) {
                return Err(Error::FieldMismatch);
            }
            // validate targets eagerly; expansion re-checks
            expand_gate(gate, targets, width)?;
        }
        Ok(Self {
            field: field.clone(),
            width,
            gates,
            output,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[(GateSpec, Vec<usize>)] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }
}

/// `Pr[measuring the output qubit yields 1]`, by direct exact density-matrix
/// evolution — the independent answer the compiled process must reproduce.
pub fn circuit_accept_probability(circuit: &CircuitSpec) -> Result<FieldElement> {
    let s = circuit.width;
    let dim = 1usize << s;
    let field = &circuit.field;
    let mut rho = DensityMatrix::basis(field, dim, 0)?.matrix().clone();
    for (gate, targets) in &circuit.gates {
        let ks = expand_gate(gate, targets, s)?;
        let mut next = Matrix::zeros(dim, dim, &ComplexFieldElement::zero(field));
        for k in &ks {
            next = next.add(&k.matmul(&rho)?.matmul(&k.dagger())?)?;
        }
        rho = next;
    }
    let mut acc = field.zero();
    for x in 0..dim {
        if qubit_bit(x, circuit.output, s) == 1 {
            let e = &rho[(x, x)];
            debug_assert!(e.im.is_zero(), "diagonal of a Hermitian matrix is real");
            acc = acc.add(&e.re);
        }
    }
    Ok(acc)
}

/// Compile a circuit into a selective operation whose probability of halting
/// with output 1 equals [`circuit_accept_probability`] exactly.
///
/// The register is `data ⊗ index` (basis `|x, c⟩ ↦ x·R + c`), where the
/// index counts gates and `R` is the gate count rounded up to a power of
/// two. Gate `c < r−1` fires as output 0 and advances the index; the last
/// gate folds in the output-qubit measurement and resets the index, emitting
/// 1 (output qubit read 1) or 2 (read 0). Every run therefore emits
/// `0^{r−1}` followed by 1 or 2, so `Σ_t Pr[0^t·1]` collapses to the single
/// term `Pr[0^{r−1}·1] = Pr[accept]`. Unused index states are identity-wired
/// with output 0 and are unreachable from the initial state. An empty gate
/// list is padded with one identity gate so the measurement step exists.
pub fn circuit_to_process(circuit: &CircuitSpec) -> Result<(SelectiveOperation, DensityMatrix)> {
    let s = circuit.width;
    let ddim = 1usize << s;
    let field = circuit.field.clone();
    let zero = ComplexFieldElement::zero(&field);

    let mut gates = circuit.gates.clone();
    if gates.is_empty() {
        let id = Matrix::identity(2, &zero);
        gates.push((GateSpec::new(1, vec![id])?, vec![1]));
    }
    let r = gates.len();
    let rr = r.next_power_of_two().max(2); // index register size
    let dim = ddim * rr;

    // data ⊗ |to⟩⟨from| accumulated into the (i, j) Kraus slot
    let mut ops: BTreeMap<(usize, usize), Matrix<ComplexFieldElement>> = BTreeMap::new();
    let add_block =
        |ops: &mut BTreeMap<(usize, usize), Matrix<ComplexFieldElement>>,
         i: usize,
         j: usize,
         data: &Matrix<ComplexFieldElement>,
         from: usize,
         to: usize| {
            let entry = ops
                .entry((i, j))
                .or_insert_with(|| Matrix::zeros(dim, dim, &zero));
            for x in 0..ddim {
                for x2 in 0..ddim {
                    let v = &data[(x, x2)];
                    if !v.is_zero() {
                        let cur = entry[(x * rr + to, x2 * rr + from)].add(v);
                        entry.set(x * rr + to, x2 * rr + from, cur);
                    }
                }
            }
        };

    // output-qubit projectors on the data register
    let mut pi1 = Matrix::zeros(ddim, ddim, &zero);
    for x in 0..ddim {
        if qubit_bit(x, circuit.output, s) == 1 {
            pi1.set(x, x, ComplexFieldElement::one(&field));
        }
    }
    let pi0 = Matrix::identity(ddim, &zero).sub(&pi1)?;

    let mut max_branches = 1;
    for (c, (gate, targets)) in gates.iter().enumerate() {
        let ks = expand_gate(gate, targets, s)?;
        max_branches = max_branches.max(ks.len());
        for (jm1, k) in ks.iter().enumerate() {
            let j = jm1 + 1;
            if c + 1 < r {
                add_block(&mut ops, 0, j, k, c, c + 1);
            } else {
                add_block(&mut ops, 1, j, &pi1.matmul(k)?, c, 0);
                add_block(&mut ops, 2, j, &pi0.matmul(k)?, c, 0);
            }
        }
    }
    let id_data = Matrix::identity(ddim, &zero);
    for c in r..rr {
        add_block(&mut ops, 0, 1, &id_data, c, (c + 1) % rr);
    }

    let entries: Vec<_> = ops.into_iter().collect();
    let op = SelectiveOperation::new(&field, dim, 3, max_branches, entries)?;
    let rho = DensityMatrix::basis(&field, dim, 0)?;
    Ok((op, rho))
}

// ---------------------------------------------------------------------------
// Markov chains
// ---------------------------------------------------------------------------

/// A column-stochastic chain with designated start, accept, and reject
/// states (0-based). Accept and reject must be distinct and absorbing;
/// stochasticity and absorption are checked exactly at construction.
#[derive(Clone, Debug)]
pub struct MarkovSpec {
    matrix: Matrix<FieldElement>,
    start: usize,
    accept: usize,
    reject: usize,
}

impl MarkovSpec {
    pub fn new(
        matrix: Matrix<FieldElement>,
        start: usize,
        accept: usize,
        reject: usize,
    ) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::NotStochastic(format!(
                "expected a nonempty square matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let n = matrix.rows();
        for (name, s) in [("start", start), ("accept", accept), ("reject", reject)] {
            if s >= n {
                return Err(Error::IndexOutOfRange(format!(
                    "{name} state {s} in an {n}-state chain"
                )));
            }
        }
        if accept == reject {
            return Err(Error::NonAbsorbingChain(
                "accept and reject must be distinct states".into(),
            ));
        }
        check_column_stochastic(&matrix)?;
        let absorbing = absorbing_flags(&matrix);
        for (name, s) in [("accept", accept), ("reject", reject)] {
            if !absorbing[s] {
                return Err(Error::NonAbsorbingChain(format!(
                    "{name} state {s} is not absorbing"
                )));
            }
        }
        Ok(Self {
            matrix,
            start,
            accept,
            reject,
        })
    }

    pub fn matrix(&self) -> &Matrix<FieldElement> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accept(&self) -> usize {
        self.accept
    }

    pub fn reject(&self) -> usize {
        self.reject
    }

    pub fn field(&self) -> &Field {
        self.matrix[(0, 0)].field()
    }

    /// The chain's own answer, via the determinant formula — what the
    /// compiled process must reproduce.
    pub fn absorption_probability(&self) -> Result<FieldElement> {
        markov_absorption(&self.matrix, self.start, self.accept)
    }
}

/// How [`markov_to_process`] turns transition probabilities into amplitudes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqrtEncoding {
    /// Each transition needs `√p` in the field; fail otherwise.
    FieldRootOnly,
    /// Fall back to splitting rational `p` into a sum of ≤ 4 rational
    /// squares (several Kraus operators per transition).
    FieldRootOrSplit,
}

fn isqrt_u64(v: u64) -> u64 {
    let mut r = (v as f64).sqrt() as u64;
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    while r * r > v {
        r -= 1;
    }
    r
}

/// A sorted representation `n = a² + b² + c² + d²` (always exists).
fn four_squares(n: u64) -> [u64; 4] {
    for a in (0..=isqrt_u64(n)).rev() {
        let ra = n - a * a;
        for b in (0..=isqrt_u64(ra).min(a)).rev() {
            let rb = ra - b * b;
            for c in (0..=isqrt_u64(rb).min(b)).rev() {
                let rc = rb - c * c;
                let d = isqrt_u64(rc);
                if d * d == rc && d <= c {
                    return [a, b, c, d];
                }
            }
        }
    }
    unreachable!("every nonnegative integer is a sum of four squares")
}

/// Split `p = num/den` into rational squares: `p = Σ (m_k/den)²` with
/// `Σ m_k² = num·den`. Only rational, modestly sized `p` qualify.
fn split_into_squares(p: &FieldElement) -> Result<Vec<FieldElement>> {
    let field = p.field().clone();
    let coeffs = p.coeffs();
    if !coeffs.iter().skip(1).all(|c| c.is_zero()) {
        return Err(Error::RootNotInField(format!(
            "transition probability {p} is irrational and has no square root in the field; \
             square splitting only applies to rational probabilities"
        )));
    }
    let q = &coeffs[0];
    let n_big = q.numer() * q.denom();
    let n = n_big.to_u64().filter(|&n| n <= 1 << 20).ok_or_else(|| {
        Error::RootNotInField(format!(
            "splitting {q} into four squares would search up to {n_big} candidates; \
             use a field containing the square root instead"
        ))
    })?;
    Ok(four_squares(n)
        .into_iter()
        .filter(|&m| m != 0)
        .map(|m| field.from_rational(BigRational::new(BigInt::from(m), q.denom().clone())))
        .collect())
}

/// Compile a chain into a selective operation: every transition `p·|r⟩⟨c|`
/// becomes one or more Kraus operators with squared amplitudes summing to
/// `p`, labelled with output 1 when the destination is the accept state,
/// 2 for the reject state, and 0 otherwise. The probability of halting with
/// output 1 equals the chain's absorption probability into accept, exactly:
/// a trajectory emits `0^t·1` precisely when it first enters accept at step
/// `t + 1` (the accept self-loop re-emits 1 forever, which no `0^t·1` prefix
/// ever matches).
pub fn markov_to_process(
    spec: &MarkovSpec,
    encoding: SqrtEncoding,
) -> Result<(SelectiveOperation, DensityMatrix)> {
    let n = spec.dim();
    let field = spec.field().clone();
    let class = |r: usize| {
        if r == spec.accept {
            1
        } else if r == spec.reject {
            2
        } else {
            0
        }
    };
    let mut counters = [0usize; 3];
    let mut entries = Vec::new();
    for c in 0..n {
        for r in 0..n {
            let p = &spec.matrix[(r, c)];
            if p.is_zero() {
                continue;
            }
            let amplitudes = match sqrt_in_field(p) {
                Some(root) => vec![root],
                None => match encoding {
                    SqrtEncoding::FieldRootOnly => {
                        return Err(Error::RootNotInField(format!(
                            "transition probability {p} (state {c} → {r}) has no square root \
                             in the field; extend the field or enable square splitting"
                        )))
                    }
                    SqrtEncoding::FieldRootOrSplit => split_into_squares(p)?,
                },
            };
            let i = class(r);
            for amp in amplitudes {
                counters[i] += 1;
                let mut m = Matrix::zeros(n, n, &ComplexFieldElement::zero(&field));
                m.set(r, c, ComplexFieldElement::from_real(amp));
                entries.push(((i, counters[i]), m));
            }
        }
    }
    let branches = counters.iter().copied().max().unwrap_or(1).max(1);
    let op = SelectiveOperation::new(&field, n, 3, branches, entries)?;
    let rho = DensityMatrix::basis(&field, n, spec.start)?;
    Ok((op, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;

    fn q(n: i64, d: i64) -> BigRational {
        brat(n, d)
    }

    fn fe_matrix(field: &Field, rows: &[&[(i64, i64)]]) -> Matrix<FieldElement> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&(n, d)| field.from_rational(q(n, d)))
                        .collect()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn square_roots_of_rationals() {
        let field = NumberField::rational();
        let nine_quarters = field.from_rational(q(9, 4));
        assert_eq!(
            sqrt_in_field(&nine_quarters).unwrap(),
            field.from_rational(q(3, 2))
        );
        assert!(sqrt_in_field(&field.from_rational(q(1, 2))).is_none());
        assert!(sqrt_in_field(&field.from_integer(-4)).is_none());
        assert!(sqrt_in_field(&field.zero()).unwrap().is_zero());
    }

    #[test]
    fn square_roots_in_quadratic_fields() {
        let field = NumberField::sqrt2();
        // 1/2 = (√2/2)²
        let half = field.from_rational(q(1, 2));
        let root = sqrt_in_field(&half).unwrap();
        assert_eq!(root, field.generator().scale(&q(1, 2)));
        // 2 = (√2)², even though 2 itself is rational
        let two = field.from_integer(2);
        assert_eq!(sqrt_in_field(&two).unwrap(), field.generator());
        // 3 + 2√2 = (1 + √2)²
        let x = field.from_coeffs(vec![q(3, 1), q(2, 1)]).unwrap();
        let expected = field.from_coeffs(vec![q(1, 1), q(1, 1)]).unwrap();
        assert_eq!(sqrt_in_field(&x).unwrap(), expected);
        // 3 has no root in ℚ[√2]
        assert!(sqrt_in_field(&field.from_integer(3)).is_none());
        // negative elements have none: 2√2 − 3 < 0
        let neg = field.from_coeffs(vec![q(-3, 1), q(2, 1)]).unwrap();
        assert!(sqrt_in_field(&neg).is_none());

        // golden field: the generator itself is a square's root — α² = α + 1
        let golden = NumberField::golden();
        let alpha_sq = golden.from_coeffs(vec![q(1, 1), q(1, 1)]).unwrap();
        assert_eq!(sqrt_in_field(&alpha_sq).unwrap(), golden.generator());
    }

    #[test]
    fn gate_presets() {
        let field = NumberField::sqrt2();
        for name in GateSpec::preset_names() {
            let gate = GateSpec::preset(&field, name).unwrap();
            assert!(!gate.kraus().is_empty(), "{name}");
        }
        assert_eq!(
            GateSpec::preset(&field, "MEASURE").unwrap().kraus().len(),
            2
        );
        // H needs √(1/2)
        let rational = NumberField::rational();
        assert!(matches!(
            GateSpec::preset(&rational, "H"),
            Err(Error::RootNotInField(_))
        ));
        // S points at the explicit-Kraus escape hatch; unknowns are named
        assert!(matches!(
            GateSpec::preset(&field, "S"),
            Err(Error::BadGate(_))
        ));
        assert!(matches!(
            GateSpec::preset(&field, "TOFFOLI"),
            Err(Error::BadGate(_))
        ));
        // incomplete Kraus data is rejected
        let half_id = Matrix::identity(2, &ComplexFieldElement::zero(&field))
            .scale(&ComplexFieldElement::from_real(field.from_rational(q(1, 2))));
        assert!(matches!(
            GateSpec::new(1, vec![half_id]),
            Err(Error::CompletenessViolation { .. })
        ));
    }

    #[test]
    fn gate_expansion_matches_kronecker_products() {
        let field = NumberField::sqrt2();
        let h = GateSpec::preset(&field, "H").unwrap();
        let id = Matrix::identity(2, &ComplexFieldElement::zero(&field));

        let on_first = expand_gate(&h, &[1], 2).unwrap();
        assert_eq!(on_first[0], h.kraus()[0].kron(&id));
        let on_second = expand_gate(&h, &[2], 2).unwrap();
        assert_eq!(on_second[0], id.kron(&h.kraus()[0]));
    }

    #[test]
    fn reversed_cnot_swaps_control_and_target() {
        let field = NumberField::sqrt2();
        let cnot = GateSpec::preset(&field, "CNOT").unwrap();
        let rev = expand_gate(&cnot, &[2, 1], 2).unwrap();
        // control on qubit 2: |q1 q2⟩ — flips q1 when q2 = 1:
        // |00⟩→|00⟩, |01⟩→|11⟩, |10⟩→|10⟩, |11⟩→|01⟩
        let zero = ComplexFieldElement::zero(&field);
        let one = ComplexFieldElement::one(&field);
        let mut expected = Matrix::zeros(4, 4, &zero);
        for (col, row) in [(0usize, 0usize), (1, 3), (2, 2), (3, 1)] {
            expected.set(row, col, one.clone());
        }
        assert_eq!(rev[0], expected);
    }

    #[test]
    fn bad_targets_are_rejected() {
        let field = NumberField::sqrt2();
        let h = GateSpec::preset(&field, "H").unwrap();
        let cnot = GateSpec::preset(&field, "CNOT").unwrap();
        assert!(matches!(
            expand_gate(&h, &[3], 2),
            Err(Error::BadTargets(_))
        ));
        assert!(matches!(
            expand_gate(&cnot, &[1, 1], 2),
            Err(Error::BadTargets(_))
        ));
        assert!(matches!(
            expand_gate(&cnot, &[1], 2),
            Err(Error::BadTargets(_))
        ));
    }

    fn s_gate(field: &Field) -> GateSpec {
        let zero = ComplexFieldElement::zero(field);
        let one = ComplexFieldElement::one(field);
        let i = ComplexFieldElement::i(field);
        GateSpec::new(
            1,
            vec![Matrix::from_rows(vec![vec![one, zero.clone()], vec![zero, i]]).unwrap()],
        )
        .unwrap()
    }

    fn test_circuits(field: &Field) -> Vec<(&'static str, CircuitSpec, BigRational)> {
        let h = || GateSpec::preset(field, "H").unwrap();
        let x = || GateSpec::preset(field, "X").unwrap();
        let cnot = || GateSpec::preset(field, "CNOT").unwrap();
        let s = || s_gate(field);
        vec![
            (
                "empty",
                CircuitSpec::new(field, 1, vec![], 1).unwrap(),
                q(0, 1),
            ),
            (
                "single H",
                CircuitSpec::new(field, 1, vec![(h(), vec![1])], 1).unwrap(),
                q(1, 2),
            ),
            (
                "H twice",
                CircuitSpec::new(field, 1, vec![(h(), vec![1]), (h(), vec![1])], 1).unwrap(),
                q(0, 1),
            ),
            (
                "X",
                CircuitSpec::new(field, 1, vec![(x(), vec![1])], 1).unwrap(),
                q(1, 1),
            ),
            (
                "Bell pair, second qubit",
                CircuitSpec::new(field, 2, vec![(h(), vec![1]), (cnot(), vec![1, 2])], 2).unwrap(),
                q(1, 2),
            ),
            (
                "H S H",
                CircuitSpec::new(
                    field,
                    1,
                    vec![(h(), vec![1]), (s(), vec![1]), (h(), vec![1])],
                    1,
                )
                .unwrap(),
                q(1, 2),
            ),
            (
                "H H S",
                CircuitSpec::new(
                    field,
                    1,
                    vec![(h(), vec![1]), (h(), vec![1]), (s(), vec![1])],
                    1,
                )
                .unwrap(),
                q(0, 1),
            ),
        ]
    }

    #[test]
    fn acceptance_probabilities_of_reference_circuits() {
        let field = NumberField::sqrt2();
        for (name, circuit, expected) in test_circuits(&field) {
            let p = circuit_accept_probability(&circuit).unwrap();
            assert_eq!(p, field.from_rational(expected.clone()), "{name}");
        }
    }

    #[test]
    fn compiled_circuits_halt_with_the_acceptance_probability() {
        let field = NumberField::sqrt2();
        for (name, circuit, expected) in test_circuits(&field) {
            let (op, rho) = circuit_to_process(&circuit).unwrap();
            op.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            // halting happens at t = r − 1 exactly, so a short truncation
            // already equals the full halting probability
            let t_max = (circuit.gates().len() as u64).max(1) + 1;
            let halted = op.halting_probability_truncated(&rho, t_max).unwrap();
            assert_eq!(halted, field.from_rational(expected.clone()), "{name}");
        }
    }

    #[test]
    fn compiled_circuit_emits_nothing_before_the_wrap() {
        let field = NumberField::sqrt2();
        let h = GateSpec::preset(&field, "H").unwrap();
        let circuit = CircuitSpec::new(
            &field,
            1,
            vec![(h.clone(), vec![1]), (h.clone(), vec![1])],
            1,
        )
        .unwrap();
        let (op, rho) = circuit_to_process(&circuit).unwrap();
        // prefixes: output only at step r−1 = 1; H·H = I sends |0⟩ to |0⟩,
        // so the read is deterministically 0 (output 2)
        assert!(op.prefix_probability(&rho, &[1]).unwrap().is_zero());
        assert!(op.prefix_probability(&rho, &[0, 1]).unwrap().is_zero());
        assert_eq!(op.prefix_probability(&rho, &[0, 2]).unwrap(), field.one());
        assert!(op.prefix_probability(&rho, &[0, 0]).unwrap().is_zero());
    }

    #[test]
    fn four_square_decompositions() {
        for n in [0u64, 1, 2, 3, 4, 7, 12, 30, 31, 310, 9999, 65535] {
            let [a, b, c, d] = four_squares(n);
            assert_eq!(a * a + b * b + c * c + d * d, n, "n = {n}");
            assert!(a >= b && b >= c && c >= d, "n = {n}");
        }
    }

    fn fair_split_chain(field: &Field) -> MarkovSpec {
        let a = fe_matrix(
            field,
            &[
                &[(0, 1), (0, 1), (0, 1)],
                &[(1, 2), (1, 1), (0, 1)],
                &[(1, 2), (0, 1), (1, 1)],
            ],
        );
        MarkovSpec::new(a, 0, 1, 2).unwrap()
    }

    #[test]
    fn markov_compilation_over_a_root_carrying_field() {
        let field = NumberField::sqrt2();
        let spec = fair_split_chain(&field);
        let (op, rho) = markov_to_process(&spec, SqrtEncoding::FieldRootOnly).unwrap();
        op.validate().unwrap();
        // absorption happens in one step here
        let halted = op.halting_probability_truncated(&rho, 3).unwrap();
        assert_eq!(halted, spec.absorption_probability().unwrap());
        assert_eq!(halted, field.from_rational(q(1, 2)));
    }

    #[test]
    fn markov_compilation_by_square_splitting() {
        let field = NumberField::rational();
        let spec = fair_split_chain(&field);
        // no √(1/2) in ℚ …
        assert!(matches!(
            markov_to_process(&spec, SqrtEncoding::FieldRootOnly),
            Err(Error::RootNotInField(_))
        ));
        // … but 1/2 = (1/2)² + (1/2)² splits
        let (op, rho) = markov_to_process(&spec, SqrtEncoding::FieldRootOrSplit).unwrap();
        op.validate().unwrap();
        let halted = op.halting_probability_truncated(&rho, 3).unwrap();
        assert_eq!(halted, field.from_rational(q(1, 2)));
    }

    #[test]
    fn deterministic_chain_accepts_surely() {
        let field = NumberField::rational();
        let a = fe_matrix(
            &field,
            &[
                &[(0, 1), (0, 1), (0, 1)],
                &[(1, 1), (1, 1), (0, 1)],
                &[(0, 1), (0, 1), (1, 1)],
            ],
        );
        let spec = MarkovSpec::new(a, 0, 1, 2).unwrap();
        let (op, rho) = markov_to_process(&spec, SqrtEncoding::FieldRootOnly).unwrap();
        op.validate().unwrap();
        assert_eq!(
            op.halting_probability_truncated(&rho, 2).unwrap(),
            field.one()
        );
    }

    #[test]
    fn markov_spec_validation() {
        let field = NumberField::rational();
        // accept == reject
        let a = fe_matrix(&field, &[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]]);
        assert!(matches!(
            MarkovSpec::new(a.clone(), 0, 1, 1),
            Err(Error::NonAbsorbingChain(_))
        ));
        // accept not absorbing
        let b = fe_matrix(
            &field,
            &[
                &[(0, 1), (1, 2), (0, 1)],
                &[(1, 1), (0, 1), (0, 1)],
                &[(0, 1), (1, 2), (1, 1)],
            ],
        );
        assert!(matches!(
            MarkovSpec::new(b, 0, 1, 2),
            Err(Error::NonAbsorbingChain(_))
        ));
        // not stochastic
        let c = fe_matrix(&field, &[&[(1, 1), (1, 2)], &[(0, 1), (1, 4)]]);
        assert!(matches!(
            MarkovSpec::new(c, 0, 0, 1),
            Err(Error::NotStochastic(_))
        ));
        // irrational probabilities refuse to split
        let sqrt2 = NumberField::sqrt2();
        let half_gen = sqrt2.generator().scale(&q(1, 2)); // √2/2 ≈ 0.707
        let complement = sqrt2.one().sub(&half_gen);
        let rows = vec![
            vec![sqrt2.zero(), sqrt2.zero(), sqrt2.zero()],
            vec![half_gen, sqrt2.one(), sqrt2.zero()],
            vec![complement, sqrt2.zero(), sqrt2.one()],
        ];
        let m = Matrix::from_rows(rows).unwrap();
        let spec = MarkovSpec::new(m, 0, 1, 2).unwrap();
        // √(√2/2) ∉ ℚ[√2] and the entry is irrational, so both encodings fail
        assert!(matches!(
            markov_to_process(&spec, SqrtEncoding::FieldRootOrSplit),
            Err(Error::RootNotInField(_))
        ));
    }
}
