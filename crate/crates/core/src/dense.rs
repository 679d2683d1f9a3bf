//! Brute-force ground truth: dense unitaries, traces, Pauli
//! decompositions, EPR-test probabilities and exhaustive commutator
//! enumeration, all at desk scale (`q^n` capped, 4096 by default).
//!
//! Wire 0 is the most significant digit of a basis index, matching the
//! tensor order `U₀ ⊗ U₁ ⊗ ···`.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordCircuit, Gate};
use crate::error::Error;
use crate::modring::ModVector;
use crate::pauli::{enumerate_basis, PauliOperator};

/// `q^n` as u64, or `None` on overflow.
pub fn pow_dim(q: u64, n: usize) -> Option<u64> {
    q.checked_pow(u32::try_from(n).ok()?)
}

fn check_cap(required: u64, cap: u64) -> Result<(), Error> {
    if required > cap {
        Err(Error::CapExceeded { required, cap })
    } else {
        Ok(())
    }
}

/// `e^{2πi·e/m}`.
fn root(m: u64, e: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (e % m) as f64 / m as f64)
}

/// Largest entry-wise absolute difference between two matrices.
pub fn max_abs_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    assert_eq!(a.dim(), b.dim(), "dimension mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Kronecker product (first factor on the most significant digits).
pub fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Apply one gate to a state vector over `total` wires, with the gate's
/// wire indices shifted by `offset`.
pub fn apply_gate_to_state(g: Gate, q: u64, total: usize, offset: usize, state: &mut Vec<Complex64>) {
    let qs = q as usize;
    let dim = qs.pow(total as u32);
    assert_eq!(state.len(), dim, "state length mismatch");
    let stride_of = |w: usize| qs.pow((total - 1 - w) as u32);
    match g {
        Gate::F(i) => {
            let w = i + offset;
            let stride = stride_of(w);
            let scale = 1.0 / (q as f64).sqrt();
            let mut out = vec![Complex64::new(0.0, 0.0); dim];
            for hi in 0..dim / (stride * qs) {
                for lo in 0..stride {
                    let base = hi * stride * qs + lo;
                    for a in 0..qs {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for x in 0..qs {
                            acc += root(q, a as u64 * x as u64) * state[base + x * stride];
                        }
                        out[base + a * stride] = acc * scale;
                    }
                }
            }
            *state = out;
        }
        Gate::S(i) => {
            let w = i + offset;
            let stride = stride_of(w);
            for (idx, amp) in state.iter_mut().enumerate() {
                let x = (idx / stride) % qs;
                let ph = if q == 2 {
                    root(4, x as u64)
                } else {
                    let inv2 = (q + 1) / 2;
                    root(q, x as u64 * ((x as u64 + q - 1) % q) % q * inv2)
                };
                *amp *= ph;
            }
        }
        Gate::Z(i) => {
            let w = i + offset;
            let stride = stride_of(w);
            for (idx, amp) in state.iter_mut().enumerate() {
                let x = (idx / stride) % qs;
                *amp *= root(q, x as u64);
            }
        }
        Gate::X(i) => {
            let w = i + offset;
            let stride = stride_of(w);
            let mut out = vec![Complex64::new(0.0, 0.0); dim];
            for (idx, &amp) in state.iter().enumerate() {
                let x = (idx / stride) % qs;
                let target = idx - x * stride + ((x + 1) % qs) * stride;
                out[target] = amp;
            }
            *state = out;
        }
        Gate::Cnot(c, t) => {
            let (wc, wt) = (c + offset, t + offset);
            let (sc, st) = (stride_of(wc), stride_of(wt));
            let mut out = vec![Complex64::new(0.0, 0.0); dim];
            for (idx, &amp) in state.iter().enumerate() {
                let xc = (idx / sc) % qs;
                let xt = (idx / st) % qs;
                let target = idx - xt * st + ((xt + xc) % qs) * st;
                out[target] = amp;
            }
            *state = out;
        }
    }
}

/// Apply a whole circuit to a state over `total` wires, at a wire offset.
pub fn apply_circuit_to_state(c: &CliffordCircuit, total: usize, offset: usize, state: &mut Vec<Complex64>) {
    assert!(offset + c.n() <= total, "circuit does not fit at the given offset");
    for &g in c.gates() {
        apply_gate_to_state(g, c.q(), total, offset, state);
    }
}

/// Apply a dense matrix (on `nu` contiguous wires starting at `offset`)
/// to a state over `total` wires.
pub fn apply_matrix_to_state(u: &DenseUnitary, total: usize, offset: usize, state: &mut [Complex64]) {
    let qs = u.q as usize;
    let nu = u.n;
    assert!(offset + nu <= total, "matrix does not fit at the given offset");
    let du = qs.pow(nu as u32);
    let low = qs.pow((total - offset - nu) as u32);
    let high = state.len() / (du * low);
    let mut scratch = vec![Complex64::new(0.0, 0.0); du];
    for h in 0..high {
        for l in 0..low {
            let at = |r: usize| h * du * low + r * low + l;
            for (r, s) in scratch.iter_mut().enumerate() {
                *s = state[at(r)];
            }
            for r in 0..du {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..du {
                    acc += u.mat[(r, k)] * scratch[k];
                }
                state[at(r)] = acc;
            }
        }
    }
}

/// A dense `q^n × q^n` unitary.
#[derive(Debug, Clone)]
pub struct DenseUnitary {
    n: usize,
    q: u64,
    mat: Array2<Complex64>,
}

impl DenseUnitary {
    /// Wrap a matrix, checking unitarity to `tol` (max entry of `UU† − I`).
    pub fn new_with_tolerance(n: usize, q: u64, mat: Array2<Complex64>, tol: f64) -> Result<Self, Error> {
        let dim = pow_dim(q, n)
            .and_then(|d| usize::try_from(d).ok())
            .ok_or(Error::CapExceeded { required: u64::MAX, cap: u64::MAX })?;
        if mat.dim() != (dim, dim) {
            return Err(Error::BadShape(format!("expected {dim}×{dim}, got {:?}", mat.dim())));
        }
        let u = DenseUnitary { n, q, mat };
        let dev = u.unitarity_deviation();
        if dev > tol {
            return Err(Error::NotUnitary { max_dev: dev });
        }
        Ok(u)
    }

    pub fn new(n: usize, q: u64, mat: Array2<Complex64>) -> Result<Self, Error> {
        Self::new_with_tolerance(n, q, mat, 1e-9)
    }

    /// For matrices that are unitary by construction.
    fn from_parts(n: usize, q: u64, mat: Array2<Complex64>) -> Self {
        DenseUnitary { n, q, mat }
    }

    pub fn identity(n: usize, q: u64) -> Self {
        let dim = (q as usize).pow(n as u32);
        Self::from_parts(n, q, Array2::eye(dim))
    }

    /// Max entry of `U·U† − I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.mat.dot(&self.dagger_matrix());
        let eye: Array2<Complex64> = Array2::eye(self.dim());
        max_abs_diff(&prod, &eye)
    }

    /// Product of the per-gate matrices, built column by column.
    pub fn from_circuit(c: &CliffordCircuit, cap: u64) -> Result<Self, Error> {
        let dim_u64 = pow_dim(c.q(), c.n()).ok_or(Error::CapExceeded { required: u64::MAX, cap })?;
        check_cap(dim_u64, cap)?;
        let dim = dim_u64 as usize;
        let mut mat = Array2::zeros((dim, dim));
        for col in 0..dim {
            let mut state = vec![Complex64::new(0.0, 0.0); dim];
            state[col] = Complex64::new(1.0, 0.0);
            apply_circuit_to_state(c, c.n(), 0, &mut state);
            for (row, amp) in state.into_iter().enumerate() {
                mat[(row, col)] = amp;
            }
        }
        Ok(Self::from_parts(c.n(), c.q(), mat))
    }

    /// Dense realization of `ω^c · X^x Z^z`: entry `ω_{q′}^c · ω_q^{⟨z,m⟩}`
    /// at `(m + x, m)`.
    pub fn from_pauli(p: &PauliOperator) -> Self {
        let (n, q) = (p.n(), p.q());
        let qs = q as usize;
        let dim = qs.pow(n as u32);
        let qp = crate::pauli::phase_modulus(q);
        let global = root(qp, p.phase_exp());
        let mut mat = Array2::zeros((dim, dim));
        for m in 0..dim {
            let digits = index_digits(m, qs, n);
            let zdot: u64 = digits.iter().enumerate().map(|(w, &d)| p.z_vec().get(w) * d as u64).sum();
            let mut row = 0usize;
            for (w, &d) in digits.iter().enumerate() {
                row = row * qs + ((d as u64 + p.x_vec().get(w)) % q) as usize;
            }
            mat[(row, m)] = global * root(q, zdot);
        }
        Self::from_parts(n, q, mat)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.mat
    }

    fn dagger_matrix(&self) -> Array2<Complex64> {
        self.mat.t().mapv(|v| v.conj())
    }

    pub fn dagger(&self) -> Self {
        Self::from_parts(self.n, self.q, self.dagger_matrix())
    }

    pub fn matrix_product(&self, other: &DenseUnitary) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        Self::from_parts(self.n, self.q, self.mat.dot(&other.mat))
    }

    /// `τ̂(U) = tr(U)/q^n`; always at most 1 in absolute value.
    pub fn normalized_trace(&self) -> Complex64 {
        let d = self.dim();
        let sum: Complex64 = (0..d).map(|i| self.mat[(i, i)]).sum();
        sum / d as f64
    }
}

fn index_digits(idx: usize, q: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0usize; n];
    let mut rest = idx;
    for slot in out.iter_mut().rev() {
        *slot = rest % q;
        rest /= q;
    }
    out
}

/// True iff `U = e^{iφ}·V` for some φ, within `tol`. The candidate phase
/// is read off the first max-magnitude entry of `V`.
pub fn equal_up_to_global_phase(u: &DenseUnitary, v: &DenseUnitary, tol: f64) -> bool {
    assert_eq!(u.dim(), v.dim(), "dimension mismatch");
    let mut best = (0usize, 0usize);
    let mut best_mag = -1.0f64;
    for (idx, val) in v.mat.indexed_iter() {
        if val.norm() > best_mag {
            best_mag = val.norm();
            best = idx;
        }
    }
    if best_mag <= tol {
        return max_abs_diff(&u.mat, &v.mat) <= tol;
    }
    let phase = u.mat[best] / v.mat[best];
    if (phase.norm() - 1.0).abs() > tol {
        return false;
    }
    u.mat.iter().zip(v.mat.iter()).all(|(a, b)| (a - phase * b).norm() <= tol)
}

/// How the EPR-test acceptance probability is computed.
#[derive(Debug, Clone, Copy)]
pub enum EprMode {
    /// `|τ̂(U)|²` straight from the trace.
    Analytic,
    /// Explicitly prepare `|e⟩`, apply `U ⊗ I`, project back on `|e⟩`.
    Statevector,
    /// Seeded Bernoulli draws at the statevector probability.
    Sample { shots: u64, seed: u64 },
}

/// Acceptance probability of the single-query EPR identity test on `U`.
pub fn epr_acceptance(u: &DenseUnitary, mode: EprMode, cap: u64) -> Result<f64, Error> {
    match mode {
        EprMode::Analytic => Ok(u.normalized_trace().norm_sqr()),
        EprMode::Statevector => epr_statevector(u, cap),
        EprMode::Sample { shots, seed } => {
            let p = epr_statevector(u, cap)?.clamp(0.0, 1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let hits = (0..shots).filter(|_| rng.gen_bool(p)).count();
            Ok(hits as f64 / shots.max(1) as f64)
        }
    }
}

fn epr_statevector(u: &DenseUnitary, cap: u64) -> Result<f64, Error> {
    let d = pow_dim(u.q, u.n).unwrap();
    check_cap(d.checked_mul(d).ok_or(Error::CapExceeded { required: u64::MAX, cap })?, cap)?;
    let mut state = maximally_entangled_state(u.n, u.q);
    apply_matrix_to_state(u, 2 * u.n, 0, &mut state);
    Ok(epr_overlap(&state, d as usize).norm_sqr())
}

/// `|e⟩ = q^{-n/2} Σ_x |x⟩|x⟩` over two n-qudit registers.
pub fn maximally_entangled_state(n: usize, q: u64) -> Vec<Complex64> {
    let d = (q as usize).pow(n as u32);
    let mut state = vec![Complex64::new(0.0, 0.0); d * d];
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for x in 0..d {
        state[x * d + x] = amp;
    }
    state
}

/// `⟨e|ψ⟩` for a two-register state of A-register dimension `d`.
pub fn epr_overlap(state: &[Complex64], d: usize) -> Complex64 {
    let scale = 1.0 / (d as f64).sqrt();
    (0..d).map(|x| state[x * d + x]).sum::<Complex64>() * scale
}

/// Coefficients `m_{a,b} = ⟨X^aZ^b, M⟩` of a matrix in the Pauli basis,
/// indexed by the flattened digit string `(a, b)`.
#[derive(Debug, Clone)]
pub struct PauliDecomposition {
    n: usize,
    q: u64,
    coeffs: Vec<Complex64>,
}

impl PauliDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficient(&self, x: &ModVector, z: &ModVector) -> Complex64 {
        let qs = self.q as usize;
        let mut idx = 0usize;
        for w in 0..self.n {
            idx = idx * qs + x.get(w) as usize;
        }
        for w in 0..self.n {
            idx = idx * qs + z.get(w) as usize;
        }
        self.coeffs[idx]
    }

    pub fn nonzero_count(&self, tol: f64) -> usize {
        self.coeffs.iter().filter(|c| c.norm() > tol).count()
    }

    /// `Σ |m_{a,b}|²`; equals 1 for unitary input by orthonormality.
    pub fn parseval_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ m_{a,b} · X^a Z^b` as a dense matrix.
    pub fn reconstruct(&self) -> Array2<Complex64> {
        let qs = self.q as usize;
        let dim = qs.pow(self.n as u32);
        let mut out = Array2::zeros((dim, dim));
        for (pidx, p) in enumerate_basis(self.n, self.q).into_iter().enumerate() {
            let co = self.coeffs[pidx];
            if co.norm() == 0.0 {
                continue;
            }
            for m in 0..dim {
                let digits = index_digits(m, qs, self.n);
                let zdot: u64 = digits.iter().enumerate().map(|(w, &d)| p.z_vec().get(w) * d as u64).sum();
                let mut row = 0usize;
                for (w, &d) in digits.iter().enumerate() {
                    row = row * qs + ((d as u64 + p.x_vec().get(w)) % self.q) as usize;
                }
                out[(row, m)] += co * root(self.q, zdot);
            }
        }
        out
    }
}

/// Decompose `M` over the orthonormal Pauli basis:
/// `m_{a,b} = τ̂((X^aZ^b)† M)`. Costs `q^{2n}` inner products of `O(q^n)`
/// terms each, so the cap bounds `q^{2n}`.
pub fn pauli_decompose(m: &DenseUnitary, cap: u64) -> Result<PauliDecomposition, Error> {
    let enumeration = pow_dim(m.q, 2 * m.n).ok_or(Error::CapExceeded { required: u64::MAX, cap })?;
    check_cap(enumeration, cap)?;
    let qs = m.q as usize;
    let dim = m.dim();
    let digit_table: Vec<Vec<usize>> = (0..dim).map(|idx| index_digits(idx, qs, m.n)).collect();
    let coeffs = enumerate_basis(m.n, m.q)
        .into_iter()
        .map(|p| {
            let mut acc = Complex64::new(0.0, 0.0);
            for col in 0..dim {
                let digits = &digit_table[col];
                let zdot: u64 = digits.iter().enumerate().map(|(w, &d)| p.z_vec().get(w) * d as u64).sum();
                let mut row = 0usize;
                for (w, &d) in digits.iter().enumerate() {
                    row = row * qs + ((d as u64 + p.x_vec().get(w)) % m.q) as usize;
                }
                acc += root(m.q, zdot).conj() * m.mat[(row, col)];
            }
            acc / dim as f64
        })
        .collect();
    Ok(PauliDecomposition { n: m.n, q: m.q, coeffs })
}

/// An exact count-based probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactFraction {
    pub numerator: u64,
    pub denominator: u64,
}

impl ExactFraction {
    pub fn as_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// Exact fraction of basis Paulis `P` with `U†P†UP` a global phase,
/// decided by comparing `U·P` and `P·U` up to phase. Enumerates all
/// `q^{2n}` basis elements.
pub fn commutator_identity_probability(u: &DenseUnitary, tol: f64, cap: u64) -> Result<ExactFraction, Error> {
    let enumeration = pow_dim(u.q, 2 * u.n).ok_or(Error::CapExceeded { required: u64::MAX, cap })?;
    check_cap(enumeration, cap)?;
    let qs = u.q as usize;
    let dim = u.dim();
    let mut hits = 0u64;
    let basis = enumerate_basis(u.n, u.q);
    let total = basis.len() as u64;
    for p in basis {
        // (UP)[r,c] = ω^{⟨z,c⟩}·U[r, c+x];  row r+x of PU is ω^{⟨z,r⟩}·(row r of U).
        let mut up = Array2::zeros((dim, dim));
        let mut pu = Array2::zeros((dim, dim));
        for k in 0..dim {
            let kd = index_digits(k, qs, u.n);
            let zdot: u64 = kd.iter().enumerate().map(|(w, &d)| p.z_vec().get(w) * d as u64).sum();
            let mut shifted = 0usize;
            for (w, &d) in kd.iter().enumerate() {
                shifted = shifted * qs + ((d as u64 + p.x_vec().get(w)) % u.q) as usize;
            }
            let ph = root(u.q, zdot);
            for r in 0..dim {
                up[(r, k)] = ph * u.mat[(r, shifted)];
                pu[(shifted, r)] = ph * u.mat[(k, r)];
            }
        }
        let a = DenseUnitary::from_parts(u.n, u.q, up);
        let b = DenseUnitary::from_parts(u.n, u.q, pu);
        if equal_up_to_global_phase(&a, &b, tol) {
            hits += 1;
        }
    }
    Ok(ExactFraction { numerator: hits, denominator: total })
}

/// Decide whether `U` is a Pauli up to global phase, without enumerating
/// the whole basis: read a candidate `(x, z)` off the matrix structure,
/// then check that the single Pauli coefficient `|⟨X^xZ^z, U⟩|` is 1
/// within `tol`. (A unit coefficient forces `(X^xZ^z)†U` to be a global
/// phase, and the basis is orthonormal, so nothing else survives.)
pub fn is_pauli_up_to_phase(u: &DenseUnitary, tol: f64) -> bool {
    let qs = u.q as usize;
    let dim = u.dim();
    // Candidate x from the image of |0⟩.
    let mut r0 = 0usize;
    let mut best = -1.0f64;
    for r in 0..dim {
        let m = u.mat[(r, 0)].norm();
        if m > best {
            best = m;
            r0 = r;
        }
    }
    if best < 0.5 {
        return false; // column 0 is spread out; not a generalized permutation
    }
    let c0 = u.mat[(r0, 0)];
    let x_digits = index_digits(r0, qs, u.n);
    // Candidate z from the columns of the unit vectors δ_i.
    let mut z_digits = vec![0u64; u.n];
    for w in 0..u.n {
        let col = qs.pow((u.n - 1 - w) as u32); // index of δ_w
        let mut row = 0usize;
        for (v, &xd) in x_digits.iter().enumerate() {
            let d = usize::from(v == w);
            row = row * qs + (d + xd) % qs;
        }
        let val = u.mat[(row, col)];
        if val.norm() < 0.5 {
            return false;
        }
        let ratio = val / c0;
        let step = 2.0 * std::f64::consts::PI / u.q as f64;
        let k = (ratio.arg() / step).round() as i64;
        z_digits[w] = k.rem_euclid(u.q as i64) as u64;
    }
    // The single coefficient decides.
    let mut acc = Complex64::new(0.0, 0.0);
    for col in 0..dim {
        let cd = index_digits(col, qs, u.n);
        let zdot: u64 = cd.iter().enumerate().map(|(w, &d)| z_digits[w] * d as u64).sum();
        let mut row = 0usize;
        for (w, &d) in cd.iter().enumerate() {
            row = row * qs + (d + x_digits[w]) % qs;
        }
        acc += root(u.q, zdot).conj() * u.mat[(row, col)];
    }
    (acc.norm() / dim as f64) >= 1.0 - tol
}

/// A generic unitary: Gram-Schmidt orthonormalization of a seeded
/// complex Gaussian matrix.
pub fn random_unitary(n: usize, q: u64, seed: u64) -> DenseUnitary {
    let dim = (q as usize).pow(n as u32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mat: Array2<Complex64> = Array2::zeros((dim, dim));
    for v in mat.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v = Complex64::new(re, im);
    }
    // Two passes of modified Gram-Schmidt on the columns.
    for _ in 0..2 {
        for j in 0..dim {
            for k in 0..j {
                let proj: Complex64 = (0..dim).map(|r| mat[(r, k)].conj() * mat[(r, j)]).sum();
                for r in 0..dim {
                    let sub = proj * mat[(r, k)];
                    mat[(r, j)] -= sub;
                }
            }
            let norm: f64 = (0..dim).map(|r| mat[(r, j)].norm_sqr()).sum::<f64>().sqrt();
            for r in 0..dim {
                mat[(r, j)] /= norm;
            }
        }
    }
    DenseUnitary::new(n, q, mat).expect("Gram-Schmidt output is unitary")
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    n: usize,
    q: u64,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Serialize as `{"n":…, "q":…, "re":[[…]], "im":[[…]]}`, row-major.
pub fn matrix_to_json(u: &DenseUnitary) -> String {
    let dim = u.dim();
    let file = MatrixFile {
        n: u.n,
        q: u.q,
        re: (0..dim).map(|r| (0..dim).map(|c| u.mat[(r, c)].re).collect()).collect(),
        im: (0..dim).map(|r| (0..dim).map(|c| u.mat[(r, c)].im).collect()).collect(),
    };
    serde_json::to_string(&file).expect("matrix serialization cannot fail")
}

/// Load a matrix file; rejects non-unitary content (tolerance 1e-6).
pub fn matrix_from_json(text: &str, cap: u64) -> Result<DenseUnitary, Error> {
    let file: MatrixFile = serde_json::from_str(text)?;
    if !crate::modring::is_prime(file.q) {
        return Err(Error::BadShape(format!("arity {} must be prime", file.q)));
    }
    let dim_u64 = pow_dim(file.q, file.n).ok_or(Error::CapExceeded { required: u64::MAX, cap })?;
    check_cap(dim_u64, cap)?;
    let dim = dim_u64 as usize;
    let rows_ok = |m: &Vec<Vec<f64>>| m.len() == dim && m.iter().all(|r| r.len() == dim);
    if !rows_ok(&file.re) || !rows_ok(&file.im) {
        return Err(Error::BadShape(format!("expected {dim}×{dim} re/im blocks")));
    }
    let mut mat = Array2::zeros((dim, dim));
    for r in 0..dim {
        for c in 0..dim {
            mat[(r, c)] = Complex64::new(file.re[r][c], file.im[r][c]);
        }
    }
    DenseUnitary::new_with_tolerance(file.n, file.q, mat, 1e-6)
}
