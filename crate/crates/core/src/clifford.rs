//! Clifford circuits over the gate set `{F, S, CNOT, X, Z}` for prime
//! arity `q`, their conjugation tableaus, and the white-box membership
//! tests built on them.
//!
//! Gate semantics (the X/Z gates are the Pauli generators themselves):
//!
//! - `F |x⟩ = q^{-1/2} Σ_a ω_q^{ax} |a⟩`   (Fourier; Hadamard at q = 2)
//! - `S |x⟩ = ω_q^{x(x-1)/2} |x⟩` for odd q, `S |x⟩ = ω_4^x |x⟩` at q = 2
//! - `CNOT |x,y⟩ = |x, x+y mod q⟩`
//!
//! A circuit is an ordered gate list; `gates[0]` is applied first, so the
//! implemented unitary is `g_last ··· g_1 g_0`.
//!
//! The per-gate conjugation rules used by the tableau were fixed by dense
//! conjugation of every `X^a Z^b` at small width; `tests` re-derives them
//! against the dense oracle so a convention slip cannot survive.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::modring::{is_prime, ModVector};
use crate::pauli::{phase_modulus, PauliOperator};

/// One gate of the Clifford alphabet, with 0-indexed wires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    F(usize),
    S(usize),
    Cnot(usize, usize),
    X(usize),
    Z(usize),
}

impl Gate {
    fn wires_in_range(&self, n: usize) -> bool {
        match *self {
            Gate::F(i) | Gate::S(i) | Gate::X(i) | Gate::Z(i) => i < n,
            Gate::Cnot(c, t) => c < n && t < n && c != t,
        }
    }

    fn shifted(&self, offset: usize) -> Gate {
        match *self {
            Gate::F(i) => Gate::F(i + offset),
            Gate::S(i) => Gate::S(i + offset),
            Gate::Cnot(c, t) => Gate::Cnot(c + offset, t + offset),
            Gate::X(i) => Gate::X(i + offset),
            Gate::Z(i) => Gate::Z(i + offset),
        }
    }

    /// Order of the gate in the unitary group (global phases included).
    fn order(&self, q: u64) -> u64 {
        match *self {
            Gate::F(_) => {
                if q == 2 {
                    2
                } else {
                    4
                }
            }
            Gate::S(_) => {
                if q == 2 {
                    4
                } else {
                    q
                }
            }
            Gate::Cnot(..) | Gate::X(_) | Gate::Z(_) => q,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::F(i) => write!(f, "F {i}"),
            Gate::S(i) => write!(f, "S {i}"),
            Gate::Cnot(c, t) => write!(f, "CNOT {c} {t}"),
            Gate::X(i) => write!(f, "X {i}"),
            Gate::Z(i) => write!(f, "Z {i}"),
        }
    }
}

/// An ordered list of Clifford gates on `n` wires of prime arity `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordCircuit {
    n: usize,
    q: u64,
    gates: Vec<Gate>,
}

impl CliffordCircuit {
    pub fn new(n: usize, q: u64, gates: Vec<Gate>) -> Self {
        assert!(n >= 1, "need at least one wire");
        assert!(is_prime(q), "arity {q} must be prime");
        for g in &gates {
            assert!(g.wires_in_range(n), "gate {g} out of range for {n} wires");
        }
        CliffordCircuit { n, q, gates }
    }

    pub fn empty(n: usize, q: u64) -> Self {
        Self::new(n, q, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// `self` followed by `other` (so the unitary is `other · self`).
    pub fn concat(&self, other: &CliffordCircuit) -> CliffordCircuit {
        assert_eq!(self.n, other.n, "width mismatch");
        assert_eq!(self.q, other.q, "arity mismatch");
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        CliffordCircuit { n: self.n, q: self.q, gates }
    }

    /// The inverse circuit: reversed gate order, each gate replaced by
    /// order−1 repetitions of itself (the alphabet stays closed).
    pub fn dagger(&self) -> CliffordCircuit {
        let mut gates = Vec::new();
        for g in self.gates.iter().rev() {
            for _ in 0..(g.order(self.q) - 1) {
                gates.push(*g);
            }
        }
        CliffordCircuit { n: self.n, q: self.q, gates }
    }

    /// The same gates embedded at a wire offset inside a wider circuit.
    pub fn shifted_gates(&self, offset: usize) -> Vec<Gate> {
        self.gates.iter().map(|g| g.shifted(offset)).collect()
    }

    /// Canonical text form; parses back bit-exactly.
    pub fn to_text(&self) -> String {
        let mut out = format!("qudits {} {}\n", self.n, self.q);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Parse the one-directive-per-line circuit format. `#` starts a
    /// comment; the first directive must be `qudits <n> <q>`.
    pub fn parse_str(text: &str) -> Result<Self, Error> {
        let mut header: Option<(usize, u64)> = None;
        let mut gates: Vec<Gate> = Vec::new();
        let mut last_line = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match header {
                None => {
                    if toks[0] != "qudits" {
                        return Err(Error::parse(line_no, format!("expected `qudits <n> <q>`, got {line:?}")));
                    }
                    if toks.len() != 3 {
                        return Err(Error::parse(line_no, "qudits directive takes exactly two arguments"));
                    }
                    let n: usize =
                        toks[1].parse().map_err(|_| Error::parse(line_no, format!("bad wire count {:?}", toks[1])))?;
                    let q: u64 =
                        toks[2].parse().map_err(|_| Error::parse(line_no, format!("bad arity {:?}", toks[2])))?;
                    if n == 0 {
                        return Err(Error::parse(line_no, "wire count must be positive"));
                    }
                    if !is_prime(q) {
                        return Err(Error::parse(line_no, format!("arity {q} must be prime")));
                    }
                    header = Some((n, q));
                }
                Some((n, _)) => {
                    let wire = |tok: &str| -> Result<usize, Error> {
                        let w: usize =
                            tok.parse().map_err(|_| Error::parse(line_no, format!("bad wire index {tok:?}")))?;
                        if w >= n {
                            return Err(Error::parse(line_no, format!("wire {w} out of range (circuit has {n})")));
                        }
                        Ok(w)
                    };
                    let gate = match (toks[0], toks.len()) {
                        ("F", 2) => Gate::F(wire(toks[1])?),
                        ("S", 2) => Gate::S(wire(toks[1])?),
                        ("X", 2) => Gate::X(wire(toks[1])?),
                        ("Z", 2) => Gate::Z(wire(toks[1])?),
                        ("CNOT", 3) => {
                            let c = wire(toks[1])?;
                            let t = wire(toks[2])?;
                            if c == t {
                                return Err(Error::parse(line_no, "CNOT control and target must differ"));
                            }
                            Gate::Cnot(c, t)
                        }
                        (other, _) => {
                            return Err(Error::parse(
                                line_no,
                                format!("unknown or malformed directive {other:?} ({} tokens)", toks.len()),
                            ))
                        }
                    };
                    gates.push(gate);
                }
            }
        }
        let (n, q) = header.ok_or_else(|| Error::parse(last_line.max(1), "missing `qudits <n> <q>` header"))?;
        Ok(CliffordCircuit { n, q, gates })
    }
}

/// Conjugate a Pauli by a single gate: `g · P · g†`.
///
/// Derived relations, with `(a, b)` the local X/Z exponents on the touched
/// wire and phases written as exponents of `ω_q` (doubled into `ω_4` units
/// at q = 2):
///
/// - `F X^a Z^b F† = ω^{−ab} X^{−b} Z^{a}`
/// - `S X^a Z^b S† = ω^{a(a−1)/2} X^a Z^{a+b}` (odd q); `ω_4^{a} X^a Z^{a+b}` (q = 2)
/// - `CNOT`: `a_t += a_c`, `b_c −= b_t`, no phase
/// - `X X^a Z^b X† = ω^{−b} X^a Z^b`, `Z X^a Z^b Z† = ω^{a} X^a Z^b`
pub fn conjugate_by_gate(gate: Gate, p: &PauliOperator) -> PauliOperator {
    let q = p.q();
    let qp = phase_modulus(q);
    let mut phase = p.phase_exp();
    let mut x = p.x_vec().clone();
    let mut z = p.z_vec().clone();
    // Adds t (in ω_q units) to the phase exponent.
    let bump = |phase: &mut u64, t: u64| {
        let t = t % q;
        *phase = (*phase + if q == 2 { 2 * t } else { t }) % qp;
    };
    match gate {
        Gate::F(i) => {
            let (a, b) = (x.get(i), z.get(i));
            bump(&mut phase, (q - a * b % q) % q);
            x.set(i, (q - b) % q);
            z.set(i, a);
        }
        Gate::S(i) => {
            let a = x.get(i);
            if q == 2 {
                phase = (phase + a) % 4;
            } else {
                let inv2 = (q + 1) / 2;
                bump(&mut phase, a * ((a + q - 1) % q) % q * inv2);
            }
            z.set(i, (z.get(i) + a) % q);
        }
        Gate::Cnot(c, t) => {
            x.set(t, (x.get(t) + x.get(c)) % q);
            z.set(c, (z.get(c) + q - z.get(t)) % q);
        }
        Gate::X(i) => {
            let b = z.get(i);
            bump(&mut phase, (q - b) % q);
        }
        Gate::Z(i) => {
            let a = x.get(i);
            bump(&mut phase, a);
        }
    }
    PauliOperator::new(q, phase, x, z)
}

/// The images `C·Xᵢ·C†` and `C·Zᵢ·C†` of the 2n single-wire Pauli
/// generators under conjugation by a circuit. Conjugation is a group
/// homomorphism, so these determine the image of every Pauli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugationTableau {
    n: usize,
    q: u64,
    x_images: Vec<PauliOperator>,
    z_images: Vec<PauliOperator>,
}

/// Build the tableau gate by gate. Cost is `O(n · |gates|)` Pauli updates.
pub fn conjugation_tableau(c: &CliffordCircuit) -> ConjugationTableau {
    let (n, q) = (c.n(), c.q());
    let mut x_images: Vec<PauliOperator> = Vec::with_capacity(n);
    let mut z_images: Vec<PauliOperator> = Vec::with_capacity(n);
    for i in 0..n {
        let mut xv = ModVector::zeros(q, n);
        xv.set(i, 1);
        x_images.push(PauliOperator::basis(q, xv, ModVector::zeros(q, n)));
        let mut zv = ModVector::zeros(q, n);
        zv.set(i, 1);
        z_images.push(PauliOperator::basis(q, ModVector::zeros(q, n), zv));
    }
    // C = g_k ··· g_0, so C P C† conjugates by g_0 first.
    for &g in c.gates() {
        for img in x_images.iter_mut().chain(z_images.iter_mut()) {
            *img = conjugate_by_gate(g, img);
        }
    }
    ConjugationTableau { n, q, x_images, z_images }
}

impl ConjugationTableau {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn x_image(&self, i: usize) -> &PauliOperator {
        &self.x_images[i]
    }

    pub fn z_image(&self, i: usize) -> &PauliOperator {
        &self.z_images[i]
    }

    /// Image of an arbitrary Pauli: the product of generator-image powers
    /// in the fixed order `X₁^{a₁}···Xₙ^{aₙ} Z₁^{b₁}···Zₙ^{bₙ}`, carrying
    /// the operand's own phase along.
    pub fn conjugate_pauli(&self, p: &PauliOperator) -> PauliOperator {
        assert_eq!(self.n, p.n(), "width mismatch");
        assert_eq!(self.q, p.q(), "arity mismatch");
        let mut acc = PauliOperator::new(
            self.q,
            p.phase_exp(),
            ModVector::zeros(self.q, self.n),
            ModVector::zeros(self.q, self.n),
        );
        for i in 0..self.n {
            acc = acc.multiply(&self.x_images[i].pow(p.x_vec().get(i)));
        }
        for i in 0..self.n {
            acc = acc.multiply(&self.z_images[i].pow(p.z_vec().get(i)));
        }
        acc
    }

    /// True when every generator image is exactly the generator with phase
    /// zero; equivalently, the conjugation action is trivial.
    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| {
            let xi = &self.x_images[i];
            let zi = &self.z_images[i];
            xi.phase_exp() == 0
                && zi.phase_exp() == 0
                && xi.x_vec().get(i) == 1
                && xi.x_vec().entries().iter().enumerate().all(|(j, &e)| e == u64::from(j == i))
                && xi.z_vec().is_zero()
                && zi.z_vec().entries().iter().enumerate().all(|(j, &e)| e == u64::from(j == i))
                && zi.x_vec().is_zero()
        })
    }

    /// True when every generator image has the generator's exponent
    /// vectors (phases free); the conjugation action is by phases only.
    pub fn fixes_all_generators_up_to_phase(&self) -> bool {
        (0..self.n).all(|i| {
            let xi = &self.x_images[i];
            let zi = &self.z_images[i];
            xi.x_vec().entries().iter().enumerate().all(|(j, &e)| e == u64::from(j == i))
                && xi.z_vec().is_zero()
                && zi.z_vec().entries().iter().enumerate().all(|(j, &e)| e == u64::from(j == i))
                && zi.x_vec().is_zero()
        })
    }
}

/// White-box identity test: accept iff conjugation by the circuit fixes
/// every Pauli generator exactly (vectors and phase). Paulis span the full
/// matrix algebra, so a circuit that commutes with all of them is a global
/// phase, and conversely; the test has no error in either direction.
pub fn wb_identity_test(c: &CliffordCircuit) -> bool {
    conjugation_tableau(c).is_identity()
}

/// White-box Pauli-membership test: accept iff conjugation by the circuit
/// maps every generator to itself up to a phase. Conjugation by a Pauli
/// only introduces phases, and a circuit whose action is phase-only
/// matches the basis Pauli with the same commutation pattern, hence is a
/// Pauli up to global phase.
pub fn wb_pauli_test(c: &CliffordCircuit) -> bool {
    conjugation_tableau(c).fixes_all_generators_up_to_phase()
}

/// The Clifford-to-Pauli reduction circuit on `2n·n` wires: the input
/// circuit on each of 2n blocks, then `X` on wire `i` of block `i` and `Z`
/// on wire `i` of block `n+i`, then the inverse circuit on each block.
/// The result conjugates each Pauli generator by the circuit blockwise, so
/// it is a Pauli exactly when the input normalizes the Pauli group.
pub fn build_ctp_to_ptp_circuit(c: &CliffordCircuit) -> CliffordCircuit {
    let (n, q) = (c.n(), c.q());
    let wires = 2 * n * n;
    let mut gates: Vec<Gate> = Vec::new();
    for block in 0..2 * n {
        gates.extend(c.shifted_gates(block * n));
    }
    for i in 0..n {
        gates.push(Gate::X(i * n + i));
    }
    for i in 0..n {
        gates.push(Gate::Z((n + i) * n + i));
    }
    let dag = c.dagger();
    for block in 0..2 * n {
        gates.extend(dag.shifted_gates(block * n));
    }
    CliffordCircuit::new(wires, q, gates)
}

/// Realize a phaseless basis Pauli `X^x Z^z` as a gate list (Z gates
/// first, so the X block ends up on the left of the product).
pub fn pauli_as_circuit(p: &PauliOperator) -> CliffordCircuit {
    assert_eq!(p.phase_exp(), 0, "only phaseless basis Paulis are realized as circuits");
    let (n, q) = (p.n(), p.q());
    let mut gates = Vec::new();
    for i in 0..n {
        for _ in 0..p.z_vec().get(i) {
            gates.push(Gate::Z(i));
        }
    }
    for i in 0..n {
        for _ in 0..p.x_vec().get(i) {
            gates.push(Gate::X(i));
        }
    }
    CliffordCircuit::new(n, q, gates)
}

/// The commutator circuit `C ∥ P ∥ C† ∥ P†`. Its unitary is a commutator
/// word of `C` and `P`, which is a global phase exactly when the two
/// commute up to phase.
pub fn build_commutator_circuit(c: &CliffordCircuit, p: &PauliOperator) -> CliffordCircuit {
    assert_eq!(c.n(), p.n(), "width mismatch");
    assert_eq!(c.q(), p.q(), "arity mismatch");
    let pc = pauli_as_circuit(p);
    c.concat(&pc).concat(&c.dagger()).concat(&pc.dagger())
}

/// `depth` gates drawn uniformly from `{F(i), S(i), CNOT(c,t)}` with
/// uniform wire choices; deterministic per seed. Single-wire circuits
/// draw from `{F, S}` only.
pub fn random_clifford_circuit(n: usize, q: u64, depth: usize, seed: u64) -> CliffordCircuit {
    assert!(n >= 1, "need at least one wire");
    assert!(is_prime(q), "arity {q} must be prime");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = if n >= 2 { 3 } else { 2 };
    let gates = (0..depth)
        .map(|_| match rng.gen_range(0..kinds) {
            0 => Gate::F(rng.gen_range(0..n)),
            1 => Gate::S(rng.gen_range(0..n)),
            _ => {
                let c = rng.gen_range(0..n);
                let mut t = rng.gen_range(0..n - 1);
                if t >= c {
                    t += 1;
                }
                Gate::Cnot(c, t)
            }
        })
        .collect();
    CliffordCircuit::new(n, q, gates)
}
