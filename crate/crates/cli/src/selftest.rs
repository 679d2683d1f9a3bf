//! Built-in verification subset: a fast cross-check of the exact engines
//! against the dense oracle, printing one line per check.

use qsub::clifford::{
    build_commutator_circuit, build_ctp_to_ptp_circuit, random_clifford_circuit, wb_identity_test, wb_pauli_test,
    CliffordCircuit,
};
use qsub::dense::{commutator_identity_probability, epr_acceptance, equal_up_to_global_phase, DenseUnitary, EprMode};
use qsub::pauli::enumerate_basis;
use qsub::phasepoly::{exact_trace, gauss_sum_binary, QuadraticPhasePolynomial};
use qsub::testing::{decide_exact, OracleHandle, Problem};
use qsub::DEFAULT_DIM_CAP;

struct Harness {
    failures: u32,
}

impl Harness {
    fn check(&mut self, name: &str, ok: bool) {
        println!("selftest: {name} ... {}", if ok { "ok" } else { "FAILED" });
        if !ok {
            self.failures += 1;
        }
    }
}

pub fn run(seed: u64) -> bool {
    let mut h = Harness { failures: 0 };
    let cap = DEFAULT_DIM_CAP;

    // Exact traces against dense traces on random circuits.
    let mut trace_ok = true;
    for &q in &[2u64, 3] {
        for n in 1..=2usize {
            for k in 0..20u64 {
                let c = random_clifford_circuit(n, q, (k % 25) as usize, seed ^ (k * 1009 + q * 7 + n as u64));
                let exact = exact_trace(&c).to_complex();
                let dense = DenseUnitary::from_circuit(&c, cap).unwrap().normalized_trace();
                trace_ok &= (exact - dense).norm() < 1e-9;
            }
        }
    }
    h.check("exact trace matches dense trace (80 random circuits)", trace_ok);

    // White-box identity test against dense identity-up-to-phase.
    let mut wb_ok = true;
    for &q in &[2u64, 3] {
        for k in 0..20u64 {
            let c = random_clifford_circuit(2, q, (k % 13) as usize, seed ^ (k * 31 + q));
            let u = DenseUnitary::from_circuit(&c, cap).unwrap();
            let dense_id = equal_up_to_global_phase(&u, &DenseUnitary::identity(2, q), 1e-9);
            wb_ok &= wb_identity_test(&c) == dense_id;
        }
    }
    h.check("white-box identity test agrees with dense comparison", wb_ok);

    // Binary Gauss sums against enumeration, all respectful 2-variable forms.
    let mut gauss_ok = true;
    for s0 in 0..4u64 {
        for s1 in 0..4u64 {
            for cr in [0u64, 2] {
                for l0 in [0u64, 2] {
                    for l1 in [0u64, 2] {
                        let mut poly = QuadraticPhasePolynomial::zero(4, 2);
                        poly.add_square(0, s0);
                        poly.add_square(1, s1);
                        poly.add_cross(0, 1, cr);
                        poly.add_linear(0, l0);
                        poly.add_linear(1, l1);
                        let exact = gauss_sum_binary(&poly).to_complex();
                        let mut brute = qsub::Complex64::new(0.0, 0.0);
                        for x0 in 0..2u64 {
                            for x1 in 0..2u64 {
                                let e = poly.evaluate(&[x0, x1]);
                                brute += qsub::Complex64::from_polar(1.0, std::f64::consts::PI * e as f64 / 2.0);
                            }
                        }
                        gauss_ok &= (exact - brute).norm() < 1e-9;
                    }
                }
            }
        }
    }
    h.check("binary Gauss sums match enumeration (512 forms)", gauss_ok);

    // EPR acceptance of the phase gate is exactly 1/2.
    let s_gate = CliffordCircuit::parse_str("qudits 1 2\nS 0\n").unwrap();
    let u = DenseUnitary::from_circuit(&s_gate, cap).unwrap();
    let p = epr_acceptance(&u, EprMode::Analytic, cap).unwrap();
    h.check("EPR acceptance of the phase gate is 1/2", (p - 0.5).abs() < 1e-12);

    // Commutator enumeration: the phase gate commutes with exactly half
    // the basis, and the commutator circuits agree with exact identity tests.
    let frac = commutator_identity_probability(&u, 1e-9, cap).unwrap();
    let mut hits = 0;
    for p in enumerate_basis(1, 2) {
        let hh = OracleHandle::from_circuit(build_commutator_circuit(&s_gate, &p));
        if decide_exact(&hh, Problem::Itp, cap).unwrap().accepted() {
            hits += 1;
        }
    }
    h.check(
        "commutator enumeration is tight for the phase gate (1/2)",
        (frac.numerator, frac.denominator) == (2, 4) && hits == 2,
    );

    // The Clifford-to-Pauli rewrite of a Clifford circuit is a Pauli circuit.
    let mut ctp_ok = true;
    for &q in &[2u64, 3] {
        for k in 0..5u64 {
            let c = random_clifford_circuit(1, q, 6, seed ^ (k + 77 * q));
            let emitted = build_ctp_to_ptp_circuit(&c);
            ctp_ok &= wb_pauli_test(&emitted);
            let hh = OracleHandle::from_circuit(emitted);
            ctp_ok &= decide_exact(&hh, Problem::Ptp, 65536).unwrap().accepted();
        }
    }
    h.check("Clifford-to-Pauli rewrites pass exact Pauli testing", ctp_ok);

    if h.failures == 0 {
        println!("selftest: all checks passed");
        true
    } else {
        println!("selftest: {} check(s) FAILED", h.failures);
        false
    }
}
