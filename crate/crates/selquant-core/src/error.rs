//! Error type shared by every module of the crate.
//!
//! Invariant violations that can only arise from caller-supplied data are
//! errors; violations of invariants this crate itself maintains are panics
//! (they indicate a bug, not bad input).

use thiserror::Error;

/// Everything that can go wrong across the crate.
#[derive(Debug, Error)]
pub enum Error {
    // ---- number fields -------------------------------------------------
    /// The minimal polynomial shares a root with its derivative.
    #[error("minimal polynomial is not square-free")]
    NotSquareFree,

    /// The interval does not isolate exactly one root, or an endpoint is a root.
    #[error("interval does not isolate exactly one root ({0})")]
    NotIsolating(String),

    /// The optional irreducibility check proved the polynomial reducible.
    #[error("minimal polynomial is reducible: {0}")]
    Reducible(String),

    /// Division by the zero element of the field (or a zero denominator).
    #[error("division by zero")]
    DivisionByZero,

    /// The degree preconditions of a bound computation are violated
    /// (e.g. a constant or zero polynomial where a root-carrying one is needed).
    #[error("degenerate degrees: {0}")]
    DegenerateDegrees(String),

    /// Two elements from different number fields were mixed.
    #[error("elements belong to different number fields")]
    FieldMismatch,

    // ---- Newton iteration ----------------------------------------------
    /// The starting ratio could not be certified to lie in a quadratic
    /// convergence basin of the isolated root.
    #[error("seed ratio lies outside a certifiable convergence basin ({0})")]
    SeedOutsideBasin(String),

    /// The derivative could not be bounded away from zero near the root.
    #[error("derivative vanishes (or cannot be bounded away from zero) near the root")]
    DerivativeVanishes,

    // ---- linear algebra -------------------------------------------------
    /// Matrix shapes (or scalar rings) are incompatible for the operation.
    #[error("incompatible shapes or scalar rings: {0}")]
    RingMismatch(String),

    /// A square matrix was required.
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    /// A row/column/state index is out of range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// The floating-point spectral estimator failed to stabilize.
    #[error("power iteration did not converge within the iteration budget")]
    NoConvergence,

    // ---- selective operations -------------------------------------------
    /// `Σ A†A ≠ I`. Carries the entry of maximal deviation.
    #[error("completeness violation: entry ({row},{col}) of Σ A†A deviates from identity by {deviation}")]
    CompletenessViolation {
        row: usize,
        col: usize,
        deviation: String,
    },

    /// Normalized branch application conditioned on a zero-probability output.
    #[error("branch {0} has probability zero; normalized update is undefined")]
    UndefinedBranch(usize),

    /// The operation (or state) has nonzero imaginary parts where a real
    /// one is required.
    #[error("matrix has nonzero imaginary entries; realify first")]
    NotReal,

    /// A density matrix failed its defining checks.
    #[error("not a density matrix: {0}")]
    BadDensityMatrix(String),

    /// The cutpoint must satisfy 0 ≤ β ≤ 1.
    #[error("cutpoint beta out of range [0, 1]")]
    BetaOutOfRange,

    // ---- decision routes --------------------------------------------------
    /// The power series has no finite limit at the evaluation point
    /// (numerator vanishes to lower order than the denominator).
    #[error("series has no finite limit at z = 1 (numerator order {num_order} < denominator order {den_order})")]
    NoLimit { num_order: usize, den_order: usize },

    /// The denominator determinant is identically zero.
    #[error("denominator determinant vanishes identically at z = 1")]
    SingularAtOne,

    /// A certified internal bound was violated at runtime; this should be
    /// impossible for constants produced by `derive_constants` and indicates
    /// corrupted inputs or hand-tuned precision parameters that are too small.
    #[error("internal bound violation: {0}")]
    InternalBoundViolation(String),

    /// The two decision routes disagree — certified impossible; surfaced
    /// loudly instead of picking a winner.
    #[error("decision routes disagree: exact says {exact}, approx says {approx}")]
    RouteMismatch { exact: String, approx: String },

    /// Instance dimensions too small for the decision pipeline.
    #[error("bad dimension: {0}")]
    BadDimension(String),

    // ---- Markov chains ----------------------------------------------------
    /// Columns must be nonnegative and sum to one exactly.
    #[error("matrix is not column-stochastic: {0}")]
    NotStochastic(String),

    /// Some state cannot reach any absorbing state (or the target is not
    /// absorbing), so absorption probabilities are not given by the
    /// determinant formula.
    #[error("chain is not absorbing: {0}")]
    NonAbsorbingChain(String),

    /// A required square root does not exist in the field and the
    /// square-splitting fallback is disabled or inapplicable.
    #[error("square root not in field: {0}")]
    RootNotInField(String),

    // ---- circuits -----------------------------------------------------------
    /// Gate target qubits are out of range, repeated, or of wrong arity.
    #[error("bad gate targets: {0}")]
    BadTargets(String),

    /// A gate preset is unavailable (unknown name, or entries outside the field).
    #[error("bad gate: {0}")]
    BadGate(String),

    // ---- serialization -------------------------------------------------------
    /// Structurally invalid input file (bad rational literal, wrong lengths, ...).
    #[error("format error: {0}")]
    Format(String),

    /// JSON syntax error.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
