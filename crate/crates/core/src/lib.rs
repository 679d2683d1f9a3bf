//! Exact subgroup testing for prime-arity qudit Clifford circuits.
//!
//! The library decides membership of a quantum circuit in the identity,
//! Pauli and Clifford groups (`ITP`/`PTP`/`CTP`), over qudits of any prime
//! arity `q`. Everything that can be decided exactly is decided exactly:
//!
//! - [`clifford`] tracks the conjugation tableau of a circuit over the
//!   gate set `{F, S, CNOT, X, Z}` and runs the white-box identity test.
//! - [`phasepoly`] compiles a circuit into a quadratic phase polynomial
//!   (sum-over-paths) and evaluates its trace as an exact Gauss sum,
//!   yielding values of the form `q^(k/2) · (root of unity)` or zero.
//! - [`dense`] is the brute-force ground truth: dense unitaries, Pauli
//!   decompositions, EPR-test probabilities, commutator enumeration.
//! - [`testing`] hosts the black-box/white-box testers, the composition
//!   combinator, and the reductions between the three testing problems
//!   with their completeness/soundness bookkeeping.
//!
//! Randomness is always seeded; no call in this crate reads wall-clock
//! entropy. Values are immutable after construction and all operations
//! are pure, so everything is safe to share across threads (the one
//! exception is the query counter on [`testing::OracleHandle`]).

pub mod clifford;
pub mod dense;
pub mod error;
pub mod modring;
pub mod pauli;
pub mod phasepoly;
pub mod testing;

pub use num_complex::Complex64;

pub use clifford::{CliffordCircuit, ConjugationTableau, Gate};
pub use dense::DenseUnitary;
pub use error::Error;
pub use modring::{AffineSolutionSet, DiagonalizedForm, ModMatrix, ModVector};
pub use pauli::PauliOperator;
pub use phasepoly::{ExactScaledRoot, PathSumState, QuadraticPhasePolynomial};
pub use testing::{OracleHandle, Problem, Promise, TesterReport, Verdict};

/// Default cap on the dense dimension `q^n` (and `q^(2n)` for two-register
/// statevector work). Exhaustive Pauli enumeration is `q^(2n)` terms, so
/// this keeps brute-force verification desk-scale.
pub const DEFAULT_DIM_CAP: u64 = 4096;
