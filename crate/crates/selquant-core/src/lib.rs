//! Exact simulation and cutpoint decision for selective quantum processes
//! whose amplitudes live in a real algebraic number field.
//!
//! # Overview
//!
//! A *selective quantum operation* is a finite family of Kraus branches
//! `A[i,j]` (output `i`, internal branch `j`) satisfying the completeness
//! relation `Σ A†A = I`. Repeatedly applying the operation to a density
//! matrix and reading the emitted outputs yields a distribution over output
//! strings. This crate answers questions about that distribution *exactly*:
//! every amplitude is an element of a fixed number field `ℚ[α]`, every
//! probability is computed as a field element, and the central question —
//! "is the probability of eventually emitting output 1 strictly above a
//! cutpoint β?" — is decided with no floating-point arithmetic anywhere in
//! the trusted path.
//!
//! Two independent decision routes are provided and cross-checked:
//!
//! * **exact**: the halting probability minus β is expressed as the limit of
//!   a rational function built from two determinants over the polynomial
//!   ring `ℚ[α][z]`, evaluated by vanishing-order comparison at `z = 1`
//!   ([`decide::series_limit_exact`]);
//! * **approx**: the same ratio is certified through big-integer determinants
//!   of a matrix assembled from a Newton approximant of α and a dyadic
//!   approximation of `z → 1`, with all precision parameters derived from
//!   instance-specific separation bounds ([`decide::derive_constants`],
//!   [`decide::decide_approx`]).
//!
//! # Quick start
//!
//! ```
//! use selquant_core::field::NumberField;
//! use num_rational::BigRational;
//! use num_bigint::BigInt;
//!
//! // ℚ[√2]: minimal polynomial x² − 2, root isolated in [1, 2].
//! let field = NumberField::sqrt2();
//! let alpha = field.generator();
//! let two = &alpha * &alpha;
//! assert_eq!(two, field.from_integer(2));
//! assert_eq!(alpha.sign(), 1);
//! ```
//!
//! # Modules
//!
//! * [`intpoly`] — integer polynomials: Sturm chains, square-freeness, norms.
//! * [`interval`] — rational interval arithmetic for root isolation.
//! * [`field`] — number fields `ℚ[α]`, real and complexified elements, and
//!   the separation bounds (Mahler-type root separation, rational
//!   perturbation bounds) that drive the certified pipeline.
//! * [`newton`] — division-free Newton iteration producing big-integer
//!   approximants `f/g` of α with certified error `< 2^{-n}`.
//! * [`linalg`] — dense exact matrices over the scalar rings used here,
//!   fraction-free and field determinants, Kronecker/vectorization helpers.
//! * [`process`] — selective quantum operations: validation, branch and
//!   prefix probabilities, realification, the decision matrix, truncated
//!   halting sums, and seeded floating-point trajectory sampling.
//! * [`decide`] — the two decision routes, per-instance constant derivation,
//!   and exact absorption probabilities for Markov chains.
//! * [`frontends`] — quantum circuits and Markov chains compiled into
//!   selective operations; gate presets and expansion.
//! * [`suite`] — deterministic generators for structurally valid random
//!   operations and states (test suites, benches).
//! * [`io`] — JSON (de)serialization for fields, matrices, processes,
//!   circuits, and chains.

pub mod decide;
pub mod error;
pub mod field;
pub mod frontends;
pub mod intpoly;
pub mod interval;
pub mod io;
pub mod linalg;
pub mod newton;
pub mod process;
pub mod suite;

pub use decide::{DecisionInstance, DecisionResult, Method, RouteChoice, Verdict};
pub use error::Error;
pub use field::{ComplexFieldElement, FieldElement, NumberField};
pub use frontends::{CircuitSpec, GateSpec, MarkovSpec, SqrtEncoding};
pub use intpoly::IntPolynomial;
pub use interval::RationalInterval;
pub use linalg::{Matrix, PolyOverField};
pub use newton::{Approximant, NewtonScheme};
pub use process::{DecisionMatrix, DensityMatrix, SelectiveOperation};

/// Convenience result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
