//! Subgroup-testing deciders and the reductions between them.
//!
//! The three problems are identity testing (`Itp`), Pauli testing (`Ptp`)
//! and Clifford testing (`Ctp`), each asking membership up to global
//! phase. Black-box testers reach the input only through an
//! [`OracleHandle`], which counts queries; white-box machinery (exact
//! deciders, reduction constructions) reads the backing directly.
//!
//! Declared completeness/soundness values are bookkeeping from the
//! composition rule `(c, s) = (c₁c₂, s₁ + s₂ − s₁s₂)` and the reduction
//! statements; they are never measured. Empirical rates are reported
//! separately by the seeded Monte Carlo helpers.

use std::cell::Cell;

use num_complex::Complex64;
use rand::Rng;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::clifford::{build_commutator_circuit, build_ctp_to_ptp_circuit, wb_pauli_test, CliffordCircuit, Gate};
use crate::dense::{
    apply_circuit_to_state, apply_matrix_to_state, epr_overlap, equal_up_to_global_phase, is_pauli_up_to_phase,
    maximally_entangled_state, pauli_decompose, pow_dim, DenseUnitary,
};
use crate::error::Error;
use crate::modring::ModVector;
use crate::pauli::{sample_basis_pauli, PauliOperator};

/// Acceptance threshold for the deterministic tester and the exact
/// deciders: probabilities/coefficients this close to 1 count as 1.
const DECISION_TOL: f64 = 1e-9;

/// A Pauli coefficient below this is treated as zero when counting the
/// support of a decomposition.
const COEFF_ZERO_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Itp,
    Ptp,
    Ctp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Promise {
    Pauli,
    Clifford,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn accepted(self) -> bool {
        self == Verdict::Accept
    }

    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }
}

/// Whether a tester draws samples or evaluates acceptance probabilities
/// exactly (accepting those within `DECISION_TOL` of 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Deterministic,
    Sampled,
}

#[derive(Debug, Clone)]
pub enum Backing {
    Circuit(CliffordCircuit),
    Dense(DenseUnitary),
}

/// Query-counted access to the tested operator. Black-box testers only
/// call [`apply`](OracleHandle::apply) / [`apply_inverse`](OracleHandle::apply_inverse);
/// each call is one query.
#[derive(Debug)]
pub struct OracleHandle {
    backing: Backing,
    queries: Cell<u64>,
}

impl OracleHandle {
    pub fn from_circuit(c: CliffordCircuit) -> Self {
        OracleHandle { backing: Backing::Circuit(c), queries: Cell::new(0) }
    }

    pub fn from_dense(u: DenseUnitary) -> Self {
        OracleHandle { backing: Backing::Dense(u), queries: Cell::new(0) }
    }

    pub fn n(&self) -> usize {
        match &self.backing {
            Backing::Circuit(c) => c.n(),
            Backing::Dense(u) => u.n(),
        }
    }

    pub fn q(&self) -> u64 {
        match &self.backing {
            Backing::Circuit(c) => c.q(),
            Backing::Dense(u) => u.q(),
        }
    }

    pub fn query_count(&self) -> u64 {
        self.queries.get()
    }

    pub fn reset_queries(&self) {
        self.queries.set(0);
    }

    pub fn backing_circuit(&self) -> Option<&CliffordCircuit> {
        match &self.backing {
            Backing::Circuit(c) => Some(c),
            Backing::Dense(_) => None,
        }
    }

    /// Apply the operator to wires `[offset, offset+n)` of a state over
    /// `total` wires. Counts one query.
    pub fn apply(&self, total: usize, offset: usize, state: &mut Vec<Complex64>) {
        self.queries.set(self.queries.get() + 1);
        match &self.backing {
            Backing::Circuit(c) => apply_circuit_to_state(c, total, offset, state),
            Backing::Dense(u) => apply_matrix_to_state(u, total, offset, state),
        }
    }

    /// Apply the inverse operator. Counts one query.
    pub fn apply_inverse(&self, total: usize, offset: usize, state: &mut Vec<Complex64>) {
        self.queries.set(self.queries.get() + 1);
        match &self.backing {
            Backing::Circuit(c) => apply_circuit_to_state(&c.dagger(), total, offset, state),
            Backing::Dense(u) => apply_matrix_to_state(&u.dagger(), total, offset, state),
        }
    }

    /// White-box dense view; charges no query.
    pub fn dense(&self, cap: u64) -> Result<DenseUnitary, Error> {
        match &self.backing {
            Backing::Circuit(c) => DenseUnitary::from_circuit(c, cap),
            Backing::Dense(u) => {
                let d = pow_dim(u.q(), u.n()).unwrap_or(u64::MAX);
                if d > cap {
                    return Err(Error::CapExceeded { required: d, cap });
                }
                Ok(u.clone())
            }
        }
    }
}

/// Empirical acceptance statistics attached to a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Empirical {
    pub accept_rate: f64,
    pub trials: u64,
}

/// Outcome of one tester run plus its declared guarantees.
#[derive(Debug, Clone)]
pub struct TesterReport {
    pub verdict: Verdict,
    pub declared_completeness: f64,
    pub declared_soundness: f64,
    pub repetitions: u32,
    pub seed: u64,
    pub queries: u64,
    pub empirical: Option<Empirical>,
}

impl TesterReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "verdict": match self.verdict { Verdict::Accept => "accept", Verdict::Reject => "reject" },
            "declared": { "c": self.declared_completeness, "s": self.declared_soundness },
            "empirical": self.empirical.map(|e| json!({ "accept_rate": e.accept_rate, "trials": e.trials })),
            "queries": self.queries,
        })
    }
}

/// One EPR-test acceptance probability obtained through a single oracle
/// query: prepare `|e⟩`, apply the operator to register A, project.
fn epr_probability_via_query(h: &OracleHandle, cap: u64) -> Result<f64, Error> {
    let (n, q) = (h.n(), h.q());
    let d = pow_dim(q, n).ok_or(Error::CapExceeded { required: u64::MAX, cap })?;
    let d2 = d.checked_mul(d).ok_or(Error::CapExceeded { required: u64::MAX, cap })?;
    if d2 > cap {
        return Err(Error::CapExceeded { required: d2, cap });
    }
    let mut state = maximally_entangled_state(n, q);
    h.apply(2 * n, 0, &mut state);
    Ok(epr_overlap(&state, d as usize).norm_sqr().clamp(0.0, 1.0))
}

/// The black-box promise identity tester: `reps` EPR repetitions, accept
/// iff all accept. Declared soundness is 0 under the Pauli promise and
/// `q^{−reps}` under the Clifford promise; completeness is perfect.
///
/// Sampled mode issues one oracle query per repetition. Deterministic
/// mode evaluates the analytic acceptance probability `|τ̂|²` from the
/// white-box dense view (no queries) and accepts iff it is 1 within
/// `DECISION_TOL`.
pub fn bb_promise_identity_test(
    h: &OracleHandle,
    promise: Promise,
    reps: u32,
    seed: u64,
    mode: RunMode,
    cap: u64,
) -> Result<TesterReport, Error> {
    assert!(reps >= 1, "at least one repetition");
    let q = h.q();
    let declared_soundness = match promise {
        Promise::Pauli => 0.0,
        Promise::Clifford => (q as f64).powi(-(reps as i32)),
    };
    let verdict = match mode {
        RunMode::Deterministic => {
            let p = h.dense(cap)?.normalized_trace().norm_sqr();
            Verdict::from_bool(p >= 1.0 - DECISION_TOL)
        }
        RunMode::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut all = true;
            for _ in 0..reps {
                let p = epr_probability_via_query(h, cap)?;
                if !rng.gen_bool(p) {
                    all = false;
                }
            }
            Verdict::from_bool(all)
        }
    };
    Ok(TesterReport {
        verdict,
        declared_completeness: 1.0,
        declared_soundness,
        repetitions: reps,
        seed,
        queries: h.query_count(),
        empirical: None,
    })
}

/// A subgroup tester with declared completeness/soundness.
pub trait Tester {
    fn declared(&self) -> (f64, f64);
    fn run(&self, h: &OracleHandle, seed: u64) -> Result<Verdict, Error>;
}

/// The EPR promise tester as a [`Tester`].
pub struct EprPromiseTester {
    pub promise: Promise,
    pub reps: u32,
    pub mode: RunMode,
    pub cap: u64,
    pub q: u64,
}

impl Tester for EprPromiseTester {
    fn declared(&self) -> (f64, f64) {
        let s = match self.promise {
            Promise::Pauli => 0.0,
            Promise::Clifford => (self.q as f64).powi(-(self.reps as i32)),
        };
        (1.0, s)
    }

    fn run(&self, h: &OracleHandle, seed: u64) -> Result<Verdict, Error> {
        bb_promise_identity_test(h, self.promise, self.reps, seed, self.mode, self.cap).map(|r| r.verdict)
    }
}

/// Ground-truth decider backed by the dense oracle; declared (1, 0).
pub struct ExactSolver {
    pub problem: Problem,
    pub cap: u64,
}

impl Tester for ExactSolver {
    fn declared(&self) -> (f64, f64) {
        (1.0, 0.0)
    }

    fn run(&self, h: &OracleHandle, _seed: u64) -> Result<Verdict, Error> {
        decide_exact(h, self.problem, self.cap)
    }
}

/// A solver of known, deliberately imperfect quality: accepts members
/// with probability `completeness` and non-members with probability
/// `soundness` (ground truth via [`decide_exact`]). Used to validate the
/// declared-parameter formulas by Monte Carlo.
pub struct SyntheticCoinTester {
    pub problem: Problem,
    pub completeness: f64,
    pub soundness: f64,
    pub cap: u64,
}

impl Tester for SyntheticCoinTester {
    fn declared(&self) -> (f64, f64) {
        (self.completeness, self.soundness)
    }

    fn run(&self, h: &OracleHandle, seed: u64) -> Result<Verdict, Error> {
        let truth = decide_exact(h, self.problem, self.cap)?;
        let p = if truth.accepted() { self.completeness } else { self.soundness };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Verdict::from_bool(rng.gen_bool(p.clamp(0.0, 1.0))))
    }
}

/// AND-composition of a group tester with a promise tester, with the
/// declared parameters `(c₁c₂, s₁ + s₂ − s₁s₂)`. The two runs use
/// disjoint seeds derived from the given one.
pub struct ComposedTester<'a> {
    group_tester: &'a dyn Tester,
    promise_tester: &'a dyn Tester,
}

pub fn compose_testers<'a>(group_tester: &'a dyn Tester, promise_tester: &'a dyn Tester) -> ComposedTester<'a> {
    ComposedTester { group_tester, promise_tester }
}

impl Tester for ComposedTester<'_> {
    fn declared(&self) -> (f64, f64) {
        let (c1, s1) = self.group_tester.declared();
        let (c2, s2) = self.promise_tester.declared();
        (c1 * c2, s1 + s2 - s1 * s2)
    }

    fn run(&self, h: &OracleHandle, seed: u64) -> Result<Verdict, Error> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s1, s2) = (rng.next_u64(), rng.next_u64());
        let v1 = self.group_tester.run(h, s1)?;
        let v2 = self.promise_tester.run(h, s2)?;
        Ok(Verdict::from_bool(v1.accepted() && v2.accepted()))
    }
}

fn generator_paulis(n: usize, q: u64) -> Vec<PauliOperator> {
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut x = ModVector::zeros(q, n);
        x.set(i, 1);
        out.push(PauliOperator::basis(q, x, ModVector::zeros(q, n)));
    }
    for i in 0..n {
        let mut z = ModVector::zeros(q, n);
        z.set(i, 1);
        out.push(PauliOperator::basis(q, ModVector::zeros(q, n), z));
    }
    out
}

/// Small-instance ground truth for the three problems.
///
/// - `Itp`: dense comparison with the identity up to global phase.
/// - `Ptp`: Pauli decomposition must have a single unit coefficient.
///   Above the enumeration cap the decision falls back to the tableau
///   (circuit backing) or the structural single-coefficient check; both
///   routes are exact and are tested to agree with the decomposition.
/// - `Ctp`: conjugating each of the 2n generators must give a Pauli.
pub fn decide_exact(h: &OracleHandle, problem: Problem, cap: u64) -> Result<Verdict, Error> {
    let (n, q) = (h.n(), h.q());
    match problem {
        Problem::Itp => {
            let u = h.dense(cap)?;
            let id = DenseUnitary::identity(n, q);
            Ok(Verdict::from_bool(equal_up_to_global_phase(&u, &id, DECISION_TOL)))
        }
        Problem::Ptp => {
            let enumeration = pow_dim(q, 2 * n).unwrap_or(u64::MAX);
            if enumeration <= cap {
                let u = h.dense(cap)?;
                let d = pauli_decompose(&u, cap)?;
                let support: Vec<&Complex64> = d.coefficients().iter().filter(|c| c.norm() > COEFF_ZERO_TOL).collect();
                Ok(Verdict::from_bool(support.len() == 1 && (support[0].norm() - 1.0).abs() <= DECISION_TOL))
            } else if let Some(c) = h.backing_circuit() {
                Ok(Verdict::from_bool(wb_pauli_test(c)))
            } else {
                let u = h.dense(cap)?;
                Ok(Verdict::from_bool(is_pauli_up_to_phase(&u, DECISION_TOL)))
            }
        }
        Problem::Ctp => {
            let u = h.dense(cap)?;
            let ud = u.dagger();
            for p in generator_paulis(n, q) {
                let conj = u.matrix_product(&DenseUnitary::from_pauli(&p)).matrix_product(&ud);
                if !is_pauli_up_to_phase(&conj, DECISION_TOL) {
                    return Ok(Verdict::Reject);
                }
            }
            Ok(Verdict::Accept)
        }
    }
}

fn report_from(t: &dyn Tester, verdict: Verdict, reps: u32, seed: u64, queries: u64) -> TesterReport {
    let (c, s) = t.declared();
    TesterReport {
        verdict,
        declared_completeness: c,
        declared_soundness: s,
        repetitions: reps,
        seed,
        queries,
        empirical: None,
    }
}

/// Identity testing from a Pauli-testing solver: AND the solver with the
/// EPR test under the Pauli promise. The EPR leg is (1, 0) there, so the
/// declared parameters equal the solver's.
pub fn reduce_itp_to_ptp(
    ptp_solver: &dyn Tester,
    h: &OracleHandle,
    reps: u32,
    seed: u64,
    mode: RunMode,
    cap: u64,
) -> Result<TesterReport, Error> {
    let epr = EprPromiseTester { promise: Promise::Pauli, reps, mode, cap, q: h.q() };
    let composed = compose_testers(ptp_solver, &epr);
    let verdict = composed.run(h, seed)?;
    Ok(report_from(&composed, verdict, reps, seed, h.query_count()))
}

/// Identity testing from a Clifford-testing solver; the EPR leg under the
/// Clifford promise contributes soundness `q^{−reps}`, so a solver with
/// `(c, s)` yields `(c, s + (1−s)·q^{−reps})`.
pub fn reduce_itp_to_ctp(
    ctp_solver: &dyn Tester,
    h: &OracleHandle,
    reps: u32,
    seed: u64,
    mode: RunMode,
    cap: u64,
) -> Result<TesterReport, Error> {
    let epr = EprPromiseTester { promise: Promise::Clifford, reps, mode, cap, q: h.q() };
    let composed = compose_testers(ctp_solver, &epr);
    let verdict = composed.run(h, seed)?;
    Ok(report_from(&composed, verdict, reps, seed, h.query_count()))
}

/// Clifford testing from a Pauli-testing solver: deterministic rewrite of
/// the input into the block-conjugation circuit, then one solver call.
/// Parameters carry over unchanged.
pub fn reduce_ctp_to_ptp(c: &CliffordCircuit, ptp_solver: &dyn Tester, seed: u64) -> Result<TesterReport, Error> {
    let rewritten = build_ctp_to_ptp_circuit(c);
    let h = OracleHandle::from_circuit(rewritten);
    let verdict = ptp_solver.run(&h, seed)?;
    let (dc, ds) = ptp_solver.declared();
    Ok(TesterReport {
        verdict,
        declared_completeness: dc,
        declared_soundness: ds,
        repetitions: 1,
        seed,
        queries: h.query_count(),
        empirical: None,
    })
}

/// Pauli testing from an identity-testing solver: sample a basis Pauli
/// `P`, hand the commutator circuit to the solver. A non-Pauli input
/// commutes with at most a `1/q` fraction of the basis, so a solver with
/// `(c, s)` yields `(c, s + (1−s)/q)`.
pub fn reduce_ptp_to_itp(c: &CliffordCircuit, itp_solver: &dyn Tester, seed: u64) -> Result<TesterReport, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = sample_basis_pauli(c.n(), c.q(), rng.next_u64());
    let commutator = build_commutator_circuit(c, &p);
    let h = OracleHandle::from_circuit(commutator);
    let verdict = itp_solver.run(&h, rng.next_u64())?;
    let (dc, ds) = itp_solver.declared();
    let q = c.q() as f64;
    Ok(TesterReport {
        verdict,
        declared_completeness: dc,
        declared_soundness: ds + (1.0 - ds) / q,
        repetitions: 1,
        seed,
        queries: h.query_count(),
        empirical: None,
    })
}

/// A certified non-member of the identity subgroup: a bare `X` gate.
pub fn dummy_non_identity(n: usize, q: u64) -> CliffordCircuit {
    CliffordCircuit::new(n, q, vec![Gate::X(0)])
}

/// A certified non-member of the Pauli subgroup: a `CNOT` (or `F` on a
/// single wire); both conjugate some generator outside the Pauli group's
/// phase action.
pub fn dummy_non_pauli(n: usize, q: u64) -> CliffordCircuit {
    if n >= 2 {
        CliffordCircuit::new(n, q, vec![Gate::Cnot(0, 1)])
    } else {
        CliffordCircuit::new(n, q, vec![Gate::F(0)])
    }
}

/// Randomized Karp form of the identity-to-Pauli reduction: run the EPR
/// promise leg; on acceptance emit the input unchanged, otherwise emit a
/// fixed non-Pauli dummy. The emitted instance is then decided by any
/// Pauli-testing solver.
pub fn karp_reduce_itp_to_ptp(c: &CliffordCircuit, reps: u32, seed: u64, cap: u64) -> Result<CliffordCircuit, Error> {
    let h = OracleHandle::from_circuit(c.clone());
    let report = bb_promise_identity_test(&h, Promise::Pauli, reps, seed, RunMode::Sampled, cap)?;
    Ok(if report.verdict.accepted() { c.clone() } else { dummy_non_pauli(c.n(), c.q()) })
}

/// Empirical acceptance rate of a seeded experiment over independent
/// trials (per-trial seeds come from one ChaCha stream).
pub fn empirical_rate(
    mut experiment: impl FnMut(u64) -> Result<Verdict, Error>,
    trials: u64,
    seed: u64,
) -> Result<Empirical, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..trials {
        if experiment(rng.next_u64())?.accepted() {
            hits += 1;
        }
    }
    Ok(Empirical { accept_rate: hits as f64 / trials.max(1) as f64, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::random_clifford_circuit;
    use crate::pauli::enumerate_basis;
    use crate::DEFAULT_DIM_CAP;
    use ndarray::array;

    fn t_gate() -> DenseUnitary {
        DenseUnitary::new(
            1,
            2,
            array![
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, std::f64::consts::PI / 4.0)]
            ],
        )
        .unwrap()
    }

    fn circuit_handle(text: &str) -> OracleHandle {
        OracleHandle::from_circuit(CliffordCircuit::parse_str(text).unwrap())
    }

    #[test]
    fn exact_decisions_respect_the_subgroup_chain() {
        let cases: Vec<(OracleHandle, [bool; 3])> = vec![
            (circuit_handle("qudits 1 2\n"), [true, true, true]),
            (circuit_handle("qudits 1 2\nX 0\n"), [false, true, true]),
            (circuit_handle("qudits 1 2\nS 0\n"), [false, false, true]),
            (circuit_handle("qudits 2 3\nCNOT 0 1\n"), [false, false, true]),
            (OracleHandle::from_dense(t_gate()), [false, false, false]),
        ];
        for (h, expect) in cases {
            for (problem, &e) in [Problem::Itp, Problem::Ptp, Problem::Ctp].iter().zip(&expect) {
                let v = decide_exact(&h, *problem, DEFAULT_DIM_CAP).unwrap();
                assert_eq!(v.accepted(), e, "{problem:?}");
            }
        }
    }

    #[test]
    fn verdict_monotonicity_on_random_circuits() {
        for &q in &[2u64, 3] {
            for seed in 0..15u64 {
                let c = random_clifford_circuit(2, q, 10, seed * 7 + 3);
                let h = OracleHandle::from_circuit(c);
                let itp = decide_exact(&h, Problem::Itp, DEFAULT_DIM_CAP).unwrap().accepted();
                let ptp = decide_exact(&h, Problem::Ptp, DEFAULT_DIM_CAP).unwrap().accepted();
                let ctp = decide_exact(&h, Problem::Ctp, DEFAULT_DIM_CAP).unwrap().accepted();
                assert!(!itp || ptp, "identity members are Pauli members");
                assert!(!ptp || ctp, "Pauli members are Clifford members");
                assert!(ctp, "every circuit over this gate set is Clifford");
            }
        }
    }

    #[test]
    fn apply_and_apply_inverse_cancel() {
        for text in ["qudits 2 3\nF 0\nCNOT 0 1\nS 1\n", "qudits 1 2\nS 0\nF 0\n"] {
            let h = circuit_handle(text);
            let (n, q) = (h.n(), h.q());
            let dim = (q as usize).pow(n as u32);
            let mut state: Vec<Complex64> = (0..dim).map(|k| Complex64::new(1.0 + k as f64, 0.5 * k as f64)).collect();
            let norm: f64 = state.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in state.iter_mut() {
                *a /= norm;
            }
            let original = state.clone();
            h.apply(n, 0, &mut state);
            h.apply_inverse(n, 0, &mut state);
            assert_eq!(h.query_count(), 2, "each direction is one query");
            for (a, b) in state.iter().zip(&original) {
                assert!((a - b).norm() < 1e-9);
            }
        }
        // Dense backing behaves the same way.
        let u = crate::dense::random_unitary(1, 3, 77);
        let h = OracleHandle::from_dense(u);
        let mut state = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        let original = state.clone();
        h.apply(1, 0, &mut state);
        h.apply_inverse(1, 0, &mut state);
        assert_eq!(h.query_count(), 2);
        for (a, b) in state.iter().zip(&original) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn epr_queries_are_counted_per_repetition() {
        let h = circuit_handle("qudits 1 2\nS 0\n");
        let r = bb_promise_identity_test(&h, Promise::Clifford, 7, 123, RunMode::Sampled, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(h.query_count(), 7);
        assert_eq!(r.repetitions, 7);
        assert_eq!(r.queries, 7);

        h.reset_queries();
        let _ = bb_promise_identity_test(&h, Promise::Clifford, 1, 5, RunMode::Sampled, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(h.query_count(), 1, "a single EPR run makes a single query");

        // Deterministic mode reads the white-box view, no queries.
        h.reset_queries();
        let _ = bb_promise_identity_test(&h, Promise::Clifford, 4, 5, RunMode::Deterministic, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(h.query_count(), 0);
    }

    #[test]
    fn bb_test_examples() {
        // Identity accepts in every mode, with perfect declared completeness.
        let h = circuit_handle("qudits 2 3\n");
        for mode in [RunMode::Deterministic, RunMode::Sampled] {
            let r = bb_promise_identity_test(&h, Promise::Clifford, 3, 9, mode, DEFAULT_DIM_CAP).unwrap();
            assert!(r.verdict.accepted());
            assert_eq!(r.declared_completeness, 1.0);
            assert!((r.declared_soundness - 27f64.recip()).abs() < 1e-15);
        }

        // A Pauli non-identity never accepts (perfect soundness).
        let h = circuit_handle("qudits 1 2\nX 0\n");
        for seed in 0..50 {
            let r = bb_promise_identity_test(&h, Promise::Pauli, 1, seed, RunMode::Sampled, DEFAULT_DIM_CAP).unwrap();
            assert!(!r.verdict.accepted());
            assert_eq!(r.declared_soundness, 0.0);
        }

        // The S gate is accepted about half the time under one repetition.
        let h = circuit_handle("qudits 1 2\nS 0\n");
        let emp = empirical_rate(
            |seed| {
                bb_promise_identity_test(&h, Promise::Clifford, 1, seed, RunMode::Sampled, DEFAULT_DIM_CAP)
                    .map(|r| r.verdict)
            },
            2000,
            44,
        )
        .unwrap();
        let sigma = (0.5f64 * 0.5 / 2000.0).sqrt();
        assert!((emp.accept_rate - 0.5).abs() < 4.0 * sigma, "rate {}", emp.accept_rate);
        // Deterministic mode rejects it outright.
        let r = bb_promise_identity_test(&h, Promise::Clifford, 1, 0, RunMode::Deterministic, DEFAULT_DIM_CAP).unwrap();
        assert!(!r.verdict.accepted());
    }

    struct FixedTester {
        c: f64,
        s: f64,
        verdict: Verdict,
    }

    impl Tester for FixedTester {
        fn declared(&self) -> (f64, f64) {
            (self.c, self.s)
        }

        fn run(&self, _h: &OracleHandle, _seed: u64) -> Result<Verdict, Error> {
            Ok(self.verdict)
        }
    }

    #[test]
    fn composition_declares_the_product_formula() {
        let a = FixedTester { c: 1.0, s: 0.5, verdict: Verdict::Accept };
        let b = FixedTester { c: 1.0, s: 0.0, verdict: Verdict::Accept };
        let comp = compose_testers(&a, &b);
        assert_eq!(comp.declared(), (1.0, 0.5));

        let a = FixedTester { c: 0.9, s: 0.25, verdict: Verdict::Accept };
        let b = FixedTester { c: 0.8, s: 0.5, verdict: Verdict::Reject };
        let comp = compose_testers(&a, &b);
        let (c, s) = comp.declared();
        assert!((c - 0.72).abs() < 1e-15);
        assert!((s - 0.625).abs() < 1e-15);

        // AND semantics.
        let h = circuit_handle("qudits 1 2\n");
        assert!(!comp.run(&h, 0).unwrap().accepted());
        let both = compose_testers(
            &FixedTester { c: 1.0, s: 0.0, verdict: Verdict::Accept },
            &FixedTester { c: 1.0, s: 0.0, verdict: Verdict::Accept },
        );
        assert!(both.run(&h, 0).unwrap().accepted());
    }

    #[test]
    fn itp_reductions_examples() {
        let exact_ptp = ExactSolver { problem: Problem::Ptp, cap: DEFAULT_DIM_CAP };
        let exact_ctp = ExactSolver { problem: Problem::Ctp, cap: DEFAULT_DIM_CAP };

        // Identity through the PTP route: accept with declared (1, 0).
        let h = circuit_handle("qudits 1 2\n");
        let r = reduce_itp_to_ptp(&exact_ptp, &h, 1, 7, RunMode::Sampled, DEFAULT_DIM_CAP).unwrap();
        assert!(r.verdict.accepted());
        assert_eq!((r.declared_completeness, r.declared_soundness), (1.0, 0.0));

        // T gate: the PTP leg already rejects.
        let h = OracleHandle::from_dense(t_gate());
        let r = reduce_itp_to_ptp(&exact_ptp, &h, 1, 7, RunMode::Sampled, DEFAULT_DIM_CAP).unwrap();
        assert!(!r.verdict.accepted());

        // S gate through the CTP route: CTP accepts, the EPR leg rejects
        // about half the time; declared soundness is 0 + (1−0)/q = 1/2.
        let h = circuit_handle("qudits 1 2\nS 0\n");
        let r = reduce_itp_to_ctp(&exact_ctp, &h, 1, 7, RunMode::Sampled, DEFAULT_DIM_CAP).unwrap();
        assert!((r.declared_soundness - 0.5).abs() < 1e-15);
        let emp = empirical_rate(
            |seed| reduce_itp_to_ctp(&exact_ctp, &h, 1, seed, RunMode::Sampled, DEFAULT_DIM_CAP).map(|r| r.verdict),
            2000,
            1,
        )
        .unwrap();
        let sigma = (0.25f64 / 2000.0).sqrt();
        assert!((emp.accept_rate - 0.5).abs() < 4.0 * sigma, "rate {}", emp.accept_rate);
    }

    #[test]
    fn ctp_to_ptp_reduction_examples() {
        let exact_ptp = ExactSolver { problem: Problem::Ptp, cap: 65536 };
        // Clifford inputs rewrite to Pauli circuits.
        for text in ["qudits 1 2\nS 0\n", "qudits 1 2\n", "qudits 1 3\nF 0\nS 0\n"] {
            let c = CliffordCircuit::parse_str(text).unwrap();
            let r = reduce_ctp_to_ptp(&c, &exact_ptp, 3).unwrap();
            assert!(r.verdict.accepted(), "{text:?} should reduce to a Pauli circuit");
        }
    }

    #[test]
    fn non_normalizing_input_rewrites_to_non_pauli() {
        // Dense analogue of the Clifford-to-Pauli rewrite for an input
        // outside the Clifford group: the blocks T·X·T† ⊗ T·Z·T†. The X
        // block picks up a non-Pauli factor, so the rewrite must fail
        // exact Pauli testing.
        let t = t_gate();
        let x =
            DenseUnitary::from_pauli(&PauliOperator::basis(2, ModVector::new(2, vec![1]), ModVector::new(2, vec![0])));
        let z =
            DenseUnitary::from_pauli(&PauliOperator::basis(2, ModVector::new(2, vec![0]), ModVector::new(2, vec![1])));
        let bx = t.matrix_product(&x).matrix_product(&t.dagger());
        let bz = t.matrix_product(&z).matrix_product(&t.dagger());
        let big = DenseUnitary::new(2, 2, crate::dense::kron(bx.matrix(), bz.matrix())).unwrap();
        assert!(!is_pauli_up_to_phase(&big, 1e-9));
        assert!(pauli_decompose(&big, DEFAULT_DIM_CAP).unwrap().nonzero_count(1e-7) >= 2);
        let h = OracleHandle::from_dense(big);
        assert!(!decide_exact(&h, Problem::Ptp, DEFAULT_DIM_CAP).unwrap().accepted());
    }

    #[test]
    fn ptp_to_itp_reduction_examples() {
        let exact_itp = ExactSolver { problem: Problem::Itp, cap: DEFAULT_DIM_CAP };

        // A Pauli circuit commutes with every basis element: always accept.
        let c = CliffordCircuit::parse_str("qudits 1 2\nX 0\n").unwrap();
        for seed in 0..20 {
            let r = reduce_ptp_to_itp(&c, &exact_itp, seed).unwrap();
            assert!(r.verdict.accepted());
            assert_eq!((r.declared_completeness, r.declared_soundness), (1.0, 0.5));
        }

        // For F on a qubit, two of the four basis Paulis commute up to
        // phase (I and XZ): exhaustive acceptance is 2/4 = 1/q exactly,
        // matching the dense enumeration and saturating the bound.
        let c = CliffordCircuit::parse_str("qudits 1 2\nF 0\n").unwrap();
        let mut hits = 0;
        for p in enumerate_basis(1, 2) {
            let h = OracleHandle::from_circuit(build_commutator_circuit(&c, &p));
            if decide_exact(&h, Problem::Itp, DEFAULT_DIM_CAP).unwrap().accepted() {
                hits += 1;
            }
        }
        assert_eq!(hits, 2);
        let u = DenseUnitary::from_circuit(&c, 64).unwrap();
        let frac = crate::dense::commutator_identity_probability(&u, 1e-9, DEFAULT_DIM_CAP).unwrap();
        assert_eq!((frac.numerator, frac.denominator), (2, 4));
    }

    #[test]
    fn karp_reduction_and_dummies() {
        // Identity input: EPR leg always accepts, the input passes through.
        let id = CliffordCircuit::parse_str("qudits 1 2\nF 0\nF 0\n").unwrap();
        let out = karp_reduce_itp_to_ptp(&id, 4, 11, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(out, id);

        // An S gate fails some of 8 repetitions with overwhelming
        // probability at this seed, so the dummy is emitted; the dummy is
        // itself a certified PTP non-member.
        let s = CliffordCircuit::parse_str("qudits 1 2\nS 0\n").unwrap();
        let out = karp_reduce_itp_to_ptp(&s, 8, 11, DEFAULT_DIM_CAP).unwrap();
        let h = OracleHandle::from_circuit(out);
        assert!(!decide_exact(&h, Problem::Ptp, DEFAULT_DIM_CAP).unwrap().accepted());

        // The dummies certify the right non-memberships.
        let h = OracleHandle::from_circuit(dummy_non_identity(2, 3));
        assert!(!decide_exact(&h, Problem::Itp, DEFAULT_DIM_CAP).unwrap().accepted());
        assert!(decide_exact(&h, Problem::Ptp, DEFAULT_DIM_CAP).unwrap().accepted());
        for n in [1usize, 2] {
            let h = OracleHandle::from_circuit(dummy_non_pauli(n, 2));
            assert!(!decide_exact(&h, Problem::Ptp, DEFAULT_DIM_CAP).unwrap().accepted());
            assert!(decide_exact(&h, Problem::Ctp, DEFAULT_DIM_CAP).unwrap().accepted());
        }
    }

    #[test]
    fn report_json_shape() {
        let h = circuit_handle("qudits 1 2\nS 0\n");
        let mut r = bb_promise_identity_test(&h, Promise::Clifford, 2, 3, RunMode::Sampled, DEFAULT_DIM_CAP).unwrap();
        r.empirical = Some(Empirical { accept_rate: 0.25, trials: 100 });
        let v = r.to_json();
        assert!(v["verdict"].is_string());
        assert!(v["declared"]["c"].is_f64() || v["declared"]["c"].is_number());
        assert!(v["declared"]["s"].is_number());
        assert_eq!(v["queries"].as_u64(), Some(2));
        assert_eq!(v["empirical"]["trials"].as_u64(), Some(100));
    }

    #[test]
    fn cap_errors_propagate() {
        let h = circuit_handle("qudits 2 5\n"); // dim 25, dim² = 625
        match bb_promise_identity_test(&h, Promise::Pauli, 1, 0, RunMode::Sampled, 100) {
            Err(Error::CapExceeded { required: 625, cap: 100 }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
        match decide_exact(&h, Problem::Itp, 10) {
            Err(Error::CapExceeded { required: 25, cap: 10 }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }
}
