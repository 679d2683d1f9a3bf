//! The q-ary Pauli group on `n` qudits.
//!
//! An element is stored in the normal form `ω^c · X^x · Z^z`, where `x`
//! and `z` are exponent vectors in `Z_q^n` (one `X^{x_i} Z^{z_i}` factor
//! per wire) and the phase exponent `c` lives mod `q′`, with `q′ = q` for
//! odd `q` and `q′ = 4` for qubits. The normal form is unique, so equality
//! is field-by-field comparison; equality *up to global phase* ignores `c`.
//!
//! All reordering obeys `Z^b X^a = ω_q^{⟨a,b⟩} X^a Z^b`, the n-wire form of
//! the defining relation between the shift and clock operators.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::modring::{is_prime, ModVector};
use crate::phasepoly::ExactScaledRoot;

/// Phase-exponent modulus: 4 for qubits, q for odd prime q.
pub fn phase_modulus(q: u64) -> u64 {
    if q == 2 {
        4
    } else {
        q
    }
}

/// An element `ω_{q′}^{phase_exp} · X^{x_vec} · Z^{z_vec}` of the q-ary
/// Pauli group on `n` qudits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    q: u64,
    phase_exp: u64,
    x_vec: ModVector,
    z_vec: ModVector,
}

impl PauliOperator {
    /// The identity element with phase 0.
    pub fn identity(n: usize, q: u64) -> Self {
        Self::new(q, 0, ModVector::zeros(q, n), ModVector::zeros(q, n))
    }

    /// A phaseless basis element `X^x Z^z`.
    pub fn basis(q: u64, x_vec: ModVector, z_vec: ModVector) -> Self {
        Self::new(q, 0, x_vec, z_vec)
    }

    pub fn new(q: u64, phase_exp: u64, x_vec: ModVector, z_vec: ModVector) -> Self {
        assert!(is_prime(q), "arity {q} must be prime");
        assert_eq!(x_vec.modulus(), q, "x exponents must be mod {q}");
        assert_eq!(z_vec.modulus(), q, "z exponents must be mod {q}");
        assert_eq!(x_vec.len(), z_vec.len(), "x/z width mismatch");
        assert!(!x_vec.is_empty(), "need at least one wire");
        PauliOperator { n: x_vec.len(), q, phase_exp: phase_exp % phase_modulus(q), x_vec, z_vec }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn phase_exp(&self) -> u64 {
        self.phase_exp
    }

    pub fn x_vec(&self) -> &ModVector {
        &self.x_vec
    }

    pub fn z_vec(&self) -> &ModVector {
        &self.z_vec
    }

    /// True when both exponent vectors vanish (the element is a pure phase).
    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x_vec.is_zero() && self.z_vec.is_zero()
    }

    /// Equality ignoring the global phase exponent.
    pub fn equals_up_to_phase(&self, other: &PauliOperator) -> bool {
        self.q == other.q && self.x_vec == other.x_vec && self.z_vec == other.z_vec
    }

    /// Group product; the result equals the matrix product `self · other`.
    ///
    /// Moving `other`'s X block left past `self`'s Z block contributes the
    /// reordering phase `ω_q^{⟨z_self, x_other⟩}`.
    pub fn multiply(&self, other: &PauliOperator) -> PauliOperator {
        assert_eq!(self.q, other.q, "arity mismatch");
        assert_eq!(self.n, other.n, "width mismatch");
        let q = self.q;
        let qp = phase_modulus(q);
        let swap = self.z_vec.dot(&other.x_vec);
        let swap_qp = if q == 2 { 2 * swap } else { swap };
        let phase = (self.phase_exp + other.phase_exp + swap_qp) % qp;
        PauliOperator::new(q, phase, self.x_vec.add(&other.x_vec), self.z_vec.add(&other.z_vec))
    }

    /// The group inverse.
    pub fn dagger(&self) -> PauliOperator {
        let q = self.q;
        let qp = phase_modulus(q);
        let xz = self.x_vec.dot(&self.z_vec);
        let xz_qp = if q == 2 { 2 * xz } else { xz };
        let phase = ((qp - self.phase_exp) + xz_qp) % qp;
        PauliOperator::new(q, phase, self.x_vec.neg(), self.z_vec.neg())
    }

    /// Integer power by repeated multiplication (exponents here are < q).
    pub fn pow(&self, k: u64) -> PauliOperator {
        let mut acc = PauliOperator::identity(self.n, self.q);
        for _ in 0..k {
            acc = acc.multiply(self);
        }
        acc
    }

    /// `self · other = ω_q^γ · other · self`; returns γ mod q.
    pub fn commutation_phase(&self, other: &PauliOperator) -> u64 {
        assert_eq!(self.q, other.q, "arity mismatch");
        assert_eq!(self.n, other.n, "width mismatch");
        let q = self.q;
        (self.z_vec.dot(&other.x_vec) + q - self.x_vec.dot(&other.z_vec) % q) % q
    }
}

/// Exponent picked up by the basis term `X^a Z^b` under conjugation by the
/// basis Pauli `P = X^x Z^z`: `P† (X^a Z^b) P = ω_q^{⟨b,x⟩ − ⟨a,z⟩} X^a Z^b`.
pub fn commutation_exponent(p: &PauliOperator, a: &ModVector, b: &ModVector) -> u64 {
    assert_eq!(a.len(), p.n, "width mismatch");
    assert_eq!(b.len(), p.n, "width mismatch");
    let q = p.q;
    (b.dot(&p.x_vec) + q - a.dot(&p.z_vec) % q) % q
}

/// Exact normalized trace of a Pauli operator: `ω^{phase_exp}` when both
/// exponent vectors vanish, and exactly zero otherwise (non-identity
/// single-qudit Paulis are traceless and the trace factors over wires).
pub fn exact_trace_pauli(p: &PauliOperator) -> ExactScaledRoot {
    if !p.is_identity_up_to_phase() {
        return ExactScaledRoot::zero(p.q);
    }
    let order = ExactScaledRoot::root_order(p.q);
    let step = order / phase_modulus(p.q);
    ExactScaledRoot::new(p.q, 0, (p.phase_exp * step) % order)
}

/// Uniform sample from the q^{2n} phaseless basis elements `X^a Z^b`.
/// Deterministic for a given seed.
pub fn sample_basis_pauli(n: usize, q: u64, seed: u64) -> PauliOperator {
    assert!(n >= 1, "need at least one wire");
    assert!(is_prime(q), "arity {q} must be prime");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = ModVector::new(q, (0..n).map(|_| rng.gen_range(0..q)).collect());
    let z = ModVector::new(q, (0..n).map(|_| rng.gen_range(0..q)).collect());
    PauliOperator::basis(q, x, z)
}

/// All q^{2n} phaseless basis elements in lexicographic (x, z) order.
pub fn enumerate_basis(n: usize, q: u64) -> Vec<PauliOperator> {
    let total = (q as usize).pow(2 * n as u32);
    (0..total)
        .map(|mut idx| {
            let mut digits = vec![0u64; 2 * n];
            for slot in digits.iter_mut().rev() {
                *slot = (idx % q as usize) as u64;
                idx /= q as usize;
            }
            let x = ModVector::new(q, digits[..n].to_vec());
            let z = ModVector::new(q, digits[n..].to_vec());
            PauliOperator::basis(q, x, z)
        })
        .collect()
}

fn join(v: &ModVector) -> String {
    v.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for PauliOperator {
    /// Literal form `w^c X[a,b,...] Z[c,d,...] q=q`, where `w` is the
    /// primitive q′-th root of unity. Round-trips bit-exactly via `FromStr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w^{} X[{}] Z[{}] q={}", self.phase_exp, join(&self.x_vec), join(&self.z_vec), self.q)
    }
}

fn parse_vec_body(tok: &str, tag: char) -> Result<Vec<u64>, Error> {
    let inner = tok
        .strip_prefix(tag)
        .and_then(|s| s.strip_prefix('['))
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::parse(1, format!("expected {tag}[...], got {tok:?}")))?;
    inner
        .split(',')
        .map(|p| p.trim().parse::<u64>().map_err(|_| Error::parse(1, format!("bad entry {p:?} in {tag} vector"))))
        .collect()
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(Error::parse(1, "expected `w^c X[...] Z[...] q=q`"));
        }
        let phase: u64 = toks[0]
            .strip_prefix("w^")
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Error::parse(1, format!("bad phase token {:?}", toks[0])))?;
        let x = parse_vec_body(toks[1], 'X')?;
        let z = parse_vec_body(toks[2], 'Z')?;
        let q: u64 = toks[3]
            .strip_prefix("q=")
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Error::parse(1, format!("bad arity token {:?}", toks[3])))?;
        if !is_prime(q) {
            return Err(Error::parse(1, format!("arity {q} must be prime")));
        }
        if x.len() != z.len() || x.is_empty() {
            return Err(Error::parse(1, "X and Z vectors must be nonempty and of equal length"));
        }
        // Unreduced exponents are accepted on input; Display always emits
        // the reduced canonical form.
        Ok(PauliOperator::new(q, phase, ModVector::new(q, x), ModVector::new(q, z)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single(q: u64, x: u64, z: u64) -> PauliOperator {
        PauliOperator::basis(q, ModVector::new(q, vec![x]), ModVector::new(q, vec![z]))
    }

    #[test]
    fn qubit_xz_reordering_phases() {
        let x = single(2, 1, 0);
        let z = single(2, 0, 1);
        let xz = x.multiply(&z);
        assert_eq!(xz.phase_exp(), 0);
        assert_eq!((xz.x_vec().get(0), xz.z_vec().get(0)), (1, 1));
        // ZX = −XZ.
        let zx = z.multiply(&x);
        assert_eq!(zx.phase_exp(), 2);
        assert!(zx.equals_up_to_phase(&xz));
    }

    #[test]
    fn qutrit_zx_picks_up_omega() {
        // Z·X = ω·XZ from the defining relation XZ = ω^{-1}ZX; the dense
        // homomorphism tests pin the same sign.
        let x = single(3, 1, 0);
        let z = single(3, 0, 1);
        let zx = z.multiply(&x);
        assert_eq!(zx.phase_exp(), 1);
        assert_eq!(x.multiply(&z).phase_exp(), 0);
    }

    #[test]
    fn product_with_dagger_is_exact_identity() {
        for q in [2u64, 3, 5] {
            for seed in 0..10 {
                let p = sample_basis_pauli(2, q, seed);
                let prod = p.multiply(&p.dagger());
                assert!(prod.is_identity_up_to_phase());
                assert_eq!(prod.phase_exp(), 0);
            }
        }
    }

    #[test]
    fn generator_order_is_q_or_four() {
        for q in [2u64, 3, 5] {
            for seed in 20..30 {
                let p = sample_basis_pauli(2, q, seed);
                let ord = if q == 2 { 4 } else { q };
                let pk = p.pow(ord);
                assert!(pk.is_identity_up_to_phase());
                assert_eq!(pk.phase_exp(), 0, "P^{ord} must be the exact identity");
            }
        }
    }

    #[test]
    fn commutation_exponent_examples() {
        // a = b = 0 commutes with everything.
        let p = single(3, 2, 1);
        assert_eq!(commutation_exponent(&p, &ModVector::zeros(3, 1), &ModVector::zeros(3, 1)), 0);

        // Conjugating an X term by Z on a qubit flips its sign.
        let z = single(2, 0, 1);
        assert_eq!(commutation_exponent(&z, &ModVector::new(2, vec![1]), &ModVector::new(2, vec![0])), 1);

        // ⟨b,x⟩ − ⟨a,z⟩ = 2 − 1 = 1 mod 3.
        let p = PauliOperator::basis(3, ModVector::new(3, vec![0, 2]), ModVector::new(3, vec![1, 0]));
        let a = ModVector::new(3, vec![1, 0]);
        let b = ModVector::new(3, vec![0, 1]);
        assert_eq!(commutation_exponent(&p, &a, &b), 1);
    }

    #[test]
    fn trace_of_identity_and_nonidentity() {
        let id = PauliOperator::identity(2, 3);
        let t = exact_trace_pauli(&id);
        assert!(!t.is_zero());
        assert_eq!((t.half_power(), t.phase_exp()), (0, 0));

        // Any X component kills the trace; so does a pure Z on a qutrit
        // (1 + ω + ω² = 0).
        assert!(exact_trace_pauli(&single(3, 1, 0)).is_zero());
        assert!(exact_trace_pauli(&single(3, 0, 1)).is_zero());

        // Phase carries through: value of ω_4^3 on qubits.
        let p = PauliOperator::new(2, 3, ModVector::zeros(2, 1), ModVector::zeros(2, 1));
        let t = exact_trace_pauli(&p);
        assert_eq!((t.half_power(), t.phase_exp()), (0, 6));
        let v = t.to_complex();
        assert!((v.re - 0.0).abs() < 1e-12 && (v.im + 1.0).abs() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "width mismatch")]
    fn multiply_rejects_width_mismatch() {
        let a = sample_basis_pauli(1, 3, 0);
        let b = sample_basis_pauli(2, 3, 0);
        a.multiply(&b);
    }

    #[test]
    #[should_panic(expected = "arity mismatch")]
    fn multiply_rejects_arity_mismatch() {
        let a = sample_basis_pauli(2, 2, 0);
        let b = sample_basis_pauli(2, 3, 0);
        a.multiply(&b);
    }

    #[test]
    #[should_panic(expected = "width mismatch")]
    fn commutation_exponent_rejects_width_mismatch() {
        let p = sample_basis_pauli(2, 3, 0);
        commutation_exponent(&p, &ModVector::zeros(3, 1), &ModVector::zeros(3, 1));
    }

    #[test]
    fn sampling_is_deterministic_and_in_range() {
        let a = sample_basis_pauli(2, 3, 42);
        let b = sample_basis_pauli(2, 3, 42);
        assert_eq!(a, b);
        for seed in 0..100 {
            let p = sample_basis_pauli(2, 3, seed);
            assert!(p.x_vec().entries().iter().all(|&e| e < 3));
            assert!(p.z_vec().entries().iter().all(|&e| e < 3));
            assert_eq!(p.phase_exp(), 0);
        }
    }

    #[test]
    fn sampling_is_roughly_uniform_on_qubit_basis() {
        let mut counts = [0usize; 4];
        for seed in 0..4096u64 {
            let p = sample_basis_pauli(1, 2, seed);
            counts[(p.x_vec().get(0) * 2 + p.z_vec().get(0)) as usize] += 1;
        }
        for &c in &counts {
            assert!((c as i64 - 1024).unsigned_abs() < 150, "counts {counts:?} too far from uniform");
        }
    }

    #[test]
    fn literal_round_trip_examples() {
        let p = PauliOperator::new(3, 2, ModVector::new(3, vec![1, 0]), ModVector::new(3, vec![2, 2]));
        let s = p.to_string();
        assert_eq!(s, "w^2 X[1,0] Z[2,2] q=3");
        let back: PauliOperator = s.parse().unwrap();
        assert_eq!(back, p);

        // Unreduced exponents are reduced on input.
        let q: PauliOperator = "w^3 X[1,0] Z[2,2] q=3".parse().unwrap();
        assert_eq!(q.phase_exp(), 0);
        assert_eq!(q.to_string(), "w^0 X[1,0] Z[2,2] q=3");

        assert!("w^0 X[0] Z[0] q=4".parse::<PauliOperator>().is_err());
        assert!("w^0 X[0,1] Z[0] q=3".parse::<PauliOperator>().is_err());
        assert!("w^0 X[0] Z[0]".parse::<PauliOperator>().is_err());
    }

    proptest! {
        #[test]
        fn literal_round_trip(qi in 0usize..3, n in 1usize..5, seed in 0u64..5000, phase_raw in 0u64..20) {
            let q = [2u64, 3, 5][qi];
            let base = sample_basis_pauli(n, q, seed);
            let p = PauliOperator::new(q, phase_raw % phase_modulus(q), base.x_vec().clone(), base.z_vec().clone());
            let s = p.to_string();
            let back: PauliOperator = s.parse().unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.to_string(), s);
        }

        #[test]
        fn multiplication_is_associative(seed in 0u64..2000) {
            let q = [2u64, 3, 5][(seed % 3) as usize];
            let a = sample_basis_pauli(2, q, seed);
            let b = sample_basis_pauli(2, q, seed.wrapping_add(1));
            let c = sample_basis_pauli(2, q, seed.wrapping_add(2));
            prop_assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
        }

        #[test]
        fn commutation_phase_is_antisymmetric(seed in 0u64..2000) {
            let q = [2u64, 3, 5][(seed % 3) as usize];
            let a = sample_basis_pauli(2, q, seed);
            let b = sample_basis_pauli(2, q, seed.wrapping_add(7));
            let g1 = a.commutation_phase(&b);
            let g2 = b.commutation_phase(&a);
            prop_assert_eq!((g1 + g2) % q, 0);
            // P·Q and ω^γ·(Q·P) must be the same element.
            let qp = phase_modulus(q);
            let step = if q == 2 { 2 } else { 1 };
            let lhs = a.multiply(&b);
            let rhs = b.multiply(&a);
            prop_assert_eq!(lhs.phase_exp(), (rhs.phase_exp() + step * g1) % qp);
        }
    }
}
