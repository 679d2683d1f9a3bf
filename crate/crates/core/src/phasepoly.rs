//! Sum-over-paths compilation of Clifford circuits and exact Gauss-sum
//! evaluation of their traces.
//!
//! A circuit on `n` qudits with `k` Fourier gates becomes a symbolic state
//!
//! ```text
//!   C|x⟩ = q^{-k/2} · Σ_v  ω_{q′}^{phase(x, v)} |labels(x, v)⟩
//! ```
//!
//! with one path variable per `F` gate, affine wire labels mod `q`, and a
//! quadratic phase polynomial mod `q′` (`q′ = 4` at q = 2, else `q`). The
//! normalized trace is then a Gauss sum over the affine subspace
//! `labels(x, v) = x`, and quadratic Gauss sums over `Z_q` evaluate in
//! closed form to `q^{k/2} · (root of unity)` or zero, which is exactly
//! what [`ExactScaledRoot`] stores.
//!
//! At q = 2 the phase polynomials are *respectful*: every non-square
//! monomial has an even coefficient. Respectfulness survives integer
//! affine substitution (since `(x+y)² = x² + 2xy + y²`) and makes the
//! value of the polynomial mod 4 depend only on the variables mod 2, so
//! binary path sums may be re-parametrized freely. The binary evaluator
//! recurses on the last variable; the odd-prime evaluator diagonalizes
//! the form and multiplies per-variable closed forms.

use num_complex::Complex64;

use crate::clifford::{CliffordCircuit, Gate};
use crate::modring::{diagonalize_quadratic, inverse_mod_prime, is_prime, solve_affine_system, ModMatrix, ModVector};
use crate::pauli::phase_modulus;

/// An exact value `q^{half_power/2} · e^{2πi·phase_exp/L}` or zero, with
/// `L = 8` for q = 2 and `L = 4q` for odd q. These groups of roots of
/// unity are the smallest closed under `ω_{q′}` rotations, the Gauss-sum
/// factors (±1, ±i and `ζ = e^{iπ/4}`), and conjugation.
#[derive(Debug, Clone, Copy)]
pub struct ExactScaledRoot {
    q: u64,
    is_zero: bool,
    half_power: i64,
    phase_exp: u64,
}

impl ExactScaledRoot {
    /// Order of the phase group: 8 for qubits, 4q for odd q.
    pub fn root_order(q: u64) -> u64 {
        if q == 2 {
            8
        } else {
            4 * q
        }
    }

    pub fn zero(q: u64) -> Self {
        ExactScaledRoot { q, is_zero: true, half_power: 0, phase_exp: 0 }
    }

    pub fn new(q: u64, half_power: i64, phase_exp: u64) -> Self {
        ExactScaledRoot { q, is_zero: false, half_power, phase_exp: phase_exp % Self::root_order(q) }
    }

    pub fn one(q: u64) -> Self {
        Self::new(q, 0, 0)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero
    }

    pub fn half_power(&self) -> i64 {
        self.half_power
    }

    pub fn phase_exp(&self) -> u64 {
        self.phase_exp
    }

    pub fn order(&self) -> u64 {
        Self::root_order(self.q)
    }

    pub fn mul(&self, other: &ExactScaledRoot) -> ExactScaledRoot {
        assert_eq!(self.q, other.q, "arity mismatch");
        if self.is_zero || other.is_zero {
            return Self::zero(self.q);
        }
        Self::new(self.q, self.half_power + other.half_power, self.phase_exp + other.phase_exp)
    }

    pub fn conj(&self) -> ExactScaledRoot {
        if self.is_zero {
            return *self;
        }
        let l = self.order();
        Self::new(self.q, self.half_power, (l - self.phase_exp) % l)
    }

    /// Multiply by `q^{dh/2}`.
    pub fn shifted(&self, dh: i64) -> ExactScaledRoot {
        if self.is_zero {
            return *self;
        }
        Self::new(self.q, self.half_power + dh, self.phase_exp)
    }

    /// Multiply by `e^{2πi·dt/L}`.
    pub fn rotated(&self, dt: u64) -> ExactScaledRoot {
        if self.is_zero {
            return *self;
        }
        Self::new(self.q, self.half_power, self.phase_exp + dt)
    }

    /// Multiply by `ω_{q′}^t`.
    pub fn times_omega_qprime(&self, t: u64) -> ExactScaledRoot {
        let step = self.order() / phase_modulus(self.q);
        self.rotated(t % phase_modulus(self.q) * step)
    }

    pub fn magnitude(&self) -> f64 {
        if self.is_zero {
            0.0
        } else {
            (self.q as f64).powf(self.half_power as f64 / 2.0)
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero {
            return Complex64::new(0.0, 0.0);
        }
        let angle = 2.0 * std::f64::consts::PI * self.phase_exp as f64 / self.order() as f64;
        Complex64::from_polar(self.magnitude(), angle)
    }
}

impl PartialEq for ExactScaledRoot {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
            && (self.is_zero == other.is_zero)
            && (self.is_zero || (self.half_power == other.half_power && self.phase_exp == other.phase_exp))
    }
}

impl Eq for ExactScaledRoot {}

impl std::fmt::Display for ExactScaledRoot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero {
            write!(f, "0")
        } else {
            write!(f, "{}^({}/2)·exp(2πi·{}/{})", self.q, self.half_power, self.phase_exp, self.order())
        }
    }
}

/// A quadratic polynomial over `Z_modulus`:
/// `Σ square[i]·xᵢ² + Σ_{i<j} cross[i,j]·xᵢxⱼ + Σ linear[i]·xᵢ + constant`.
///
/// `cross` stores the monomial coefficient symmetrically. For modulus 4
/// the respectful invariant is that every cross and linear coefficient is
/// even; square coefficients and the constant are unrestricted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticPhasePolynomial {
    modulus: u64,
    num_vars: usize,
    square: Vec<u64>,
    cross: Vec<u64>, // row-major num_vars × num_vars, symmetric, zero diagonal
    linear: Vec<u64>,
    constant: u64,
}

impl QuadraticPhasePolynomial {
    pub fn zero(modulus: u64, num_vars: usize) -> Self {
        assert!(modulus == 4 || (is_prime(modulus) && modulus % 2 == 1), "phase modulus must be 4 or an odd prime");
        QuadraticPhasePolynomial {
            modulus,
            num_vars,
            square: vec![0; num_vars],
            cross: vec![0; num_vars * num_vars],
            linear: vec![0; num_vars],
            constant: 0,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn square(&self, i: usize) -> u64 {
        self.square[i]
    }

    pub fn cross(&self, i: usize, j: usize) -> u64 {
        assert_ne!(i, j, "cross coefficients live off the diagonal");
        self.cross[i * self.num_vars + j]
    }

    pub fn linear(&self, i: usize) -> u64 {
        self.linear[i]
    }

    pub fn constant(&self) -> u64 {
        self.constant
    }

    pub fn add_square(&mut self, i: usize, k: u64) {
        self.square[i] = (self.square[i] + k) % self.modulus;
    }

    pub fn add_cross(&mut self, i: usize, j: usize, k: u64) {
        assert_ne!(i, j, "cross coefficients live off the diagonal");
        let m = self.modulus;
        let v = (self.cross[i * self.num_vars + j] + k) % m;
        self.cross[i * self.num_vars + j] = v;
        self.cross[j * self.num_vars + i] = v;
    }

    pub fn add_linear(&mut self, i: usize, k: u64) {
        self.linear[i] = (self.linear[i] + k) % self.modulus;
    }

    pub fn add_constant(&mut self, k: u64) {
        self.constant = (self.constant + k) % self.modulus;
    }

    /// Append fresh variables (with zero coefficients).
    pub fn extend_vars(&mut self, extra: usize) {
        let old = self.num_vars;
        let new = old + extra;
        let mut cross = vec![0; new * new];
        for i in 0..old {
            cross[i * new..i * new + old].copy_from_slice(&self.cross[i * old..(i + 1) * old]);
        }
        self.cross = cross;
        self.square.resize(new, 0);
        self.linear.resize(new, 0);
        self.num_vars = new;
    }

    /// Evaluate at an integer point (entries are lifted as given).
    pub fn evaluate(&self, x: &[u64]) -> u64 {
        assert_eq!(x.len(), self.num_vars, "dimension mismatch");
        let m = self.modulus;
        let mut acc = self.constant;
        for i in 0..self.num_vars {
            let xi = x[i] % m;
            acc = (acc + self.square[i] * xi % m * xi) % m;
            acc = (acc + self.linear[i] * xi) % m;
            for j in (i + 1)..self.num_vars {
                acc = (acc + self.cross[i * self.num_vars + j] * xi % m * (x[j] % m)) % m;
            }
        }
        acc
    }

    /// Every non-square monomial coefficient is even (the invariant that
    /// makes a mod-4 polynomial well defined on residues mod 2).
    pub fn is_respectful(&self) -> bool {
        self.modulus == 4 && self.cross.iter().all(|&c| c % 2 == 0) && self.linear.iter().all(|&c| c % 2 == 0)
    }

    /// Accumulate `k · (Σ a_s y_s + a0) · (Σ b_t y_t + b0)`.
    fn add_scaled_product(&mut self, k: u64, a: (&[u64], u64), b: (&[u64], u64)) {
        let m = self.modulus;
        let k = k % m;
        if k == 0 {
            return;
        }
        let (ac, a0) = a;
        let (bc, b0) = b;
        for s in 0..self.num_vars {
            if ac[s] == 0 {
                continue;
            }
            for t in 0..self.num_vars {
                if bc[t] == 0 {
                    continue;
                }
                let co = k * (ac[s] % m) % m * (bc[t] % m) % m;
                if s == t {
                    self.add_square(s, co);
                } else {
                    // The (s,t) and (t,s) iterations each contribute their
                    // own share of the x_s·x_t monomial; keep storage symmetric.
                    let v = (self.cross[s * self.num_vars + t] + co) % m;
                    self.cross[s * self.num_vars + t] = v;
                    self.cross[t * self.num_vars + s] = v;
                }
            }
            self.add_linear(s, k * (ac[s] % m) % m * (b0 % m));
        }
        for t in 0..self.num_vars {
            if bc[t] != 0 {
                self.add_linear(t, k * (bc[t] % m) % m * (a0 % m));
            }
        }
        self.add_constant(k * (a0 % m) % m * (b0 % m));
    }

    /// Accumulate `k · (Σ a_s y_s + a0)`.
    fn add_scaled_affine(&mut self, k: u64, a: (&[u64], u64)) {
        let (ac, a0) = a;
        for s in 0..self.num_vars {
            if ac[s] != 0 {
                self.add_linear(s, k % self.modulus * (ac[s] % self.modulus));
            }
        }
        self.add_constant(k % self.modulus * (a0 % self.modulus));
    }

    /// Substitute `x = basis·y + offset` (entry-wise integer lift) and
    /// return the polynomial in the new variables. For modulus 4 the
    /// basis/offset are mod 2 and respectfulness is preserved.
    pub fn substitute_affine(&self, basis: &ModMatrix, offset: &ModVector) -> QuadraticPhasePolynomial {
        assert_eq!(basis.rows(), self.num_vars, "substitution must cover every variable");
        assert_eq!(offset.len(), self.num_vars, "offset length mismatch");
        let expected = if self.modulus == 4 { 2 } else { self.modulus };
        assert_eq!(basis.modulus(), expected, "substitution entries must be mod {expected}");

        let new_vars = basis.cols();
        let rows: Vec<(Vec<u64>, u64)> =
            (0..self.num_vars).map(|i| ((0..new_vars).map(|c| basis.get(i, c)).collect(), offset.get(i))).collect();

        let mut out = QuadraticPhasePolynomial::zero(self.modulus, new_vars);
        for i in 0..self.num_vars {
            if self.square[i] != 0 {
                let (c, e) = &rows[i];
                out.add_scaled_product(self.square[i], (c, *e), (c, *e));
            }
            if self.linear[i] != 0 {
                let (c, e) = &rows[i];
                out.add_scaled_affine(self.linear[i], (c, *e));
            }
            for j in (i + 1)..self.num_vars {
                let co = self.cross[i * self.num_vars + j];
                if co != 0 {
                    let (ci, ei) = &rows[i];
                    let (cj, ej) = &rows[j];
                    out.add_scaled_product(co, (ci, *ei), (cj, *ej));
                }
            }
        }
        out.add_constant(self.constant);
        if self.modulus == 4 {
            debug_assert!(
                !self.is_respectful() || out.is_respectful(),
                "integer affine substitution must preserve respectfulness"
            );
        }
        out
    }

    /// Negate every coefficient (the polynomial of the conjugate sum).
    fn negated(&self) -> QuadraticPhasePolynomial {
        let m = self.modulus;
        let neg = |v: u64| (m - v % m) % m;
        QuadraticPhasePolynomial {
            modulus: m,
            num_vars: self.num_vars,
            square: self.square.iter().map(|&v| neg(v)).collect(),
            cross: self.cross.iter().map(|&v| neg(v)).collect(),
            linear: self.linear.iter().map(|&v| neg(v)).collect(),
            constant: neg(self.constant),
        }
    }

    /// Split off the last variable `v`: returns the coefficients of
    /// `ℓ` mod 2 in `h = c_v·x_v² + 2·x_v·ℓ(x′) + g(x′)` together with the
    /// remainder `g`. Only meaningful for respectful mod-4 polynomials.
    fn split_last_linear(&self) -> (Vec<u64>, u64, QuadraticPhasePolynomial) {
        let v = self.num_vars - 1;
        let ell: Vec<u64> = (0..v).map(|j| self.cross[v * self.num_vars + j] / 2 % 2).collect();
        let ell0 = self.linear[v] / 2 % 2;
        let mut g = QuadraticPhasePolynomial::zero(self.modulus, v);
        g.square.copy_from_slice(&self.square[..v]);
        g.linear.copy_from_slice(&self.linear[..v]);
        g.constant = self.constant;
        for i in 0..v {
            for j in 0..v {
                g.cross[i * v + j] = self.cross[i * self.num_vars + j];
            }
        }
        (ell, ell0, g)
    }

    /// Subtract the integer square `(Σ c_j x_j + e)²` with `c_j, e ∈ {0,1}`.
    fn subtract_affine_square(&mut self, coeffs: &[u64], e: u64) {
        let m = self.modulus;
        let neg = |v: u64| (m - v % m) % m;
        for (j, &cj) in coeffs.iter().enumerate() {
            if cj == 0 {
                continue;
            }
            self.add_square(j, neg(1));
            self.add_linear(j, neg(2 * e));
            for (k, &ck) in coeffs.iter().enumerate().skip(j + 1) {
                if ck != 0 {
                    self.add_cross(j, k, neg(2));
                }
            }
        }
        self.add_constant(neg(e * e));
    }
}

/// Exact value of `Σ_{x ∈ {0,1}^n} ω₄^{h(x)}` for a respectful `h`.
///
/// The recursion on the last variable `x_v` follows the shape of the sum:
/// a square coefficient of 2 folds into the linear part (`2x² = 2x` on
/// binary values); coefficient 0 either factors out a 2 or restricts to
/// the subspace `ℓ(x′) = 0 (mod 2)`; coefficient 1 contributes `√2·ζ` and
/// completes the square; coefficient 3 conjugates the sum for `−h`.
pub fn gauss_sum_binary(h: &QuadraticPhasePolynomial) -> ExactScaledRoot {
    assert_eq!(h.modulus(), 4, "binary Gauss sums take mod-4 polynomials");
    assert!(h.is_respectful(), "binary Gauss sums are defined for respectful polynomials only");
    gauss_binary_rec(h)
}

fn gauss_binary_rec(h: &QuadraticPhasePolynomial) -> ExactScaledRoot {
    assert!(h.is_respectful(), "respectfulness must be preserved by every recursion step");
    let m = h.num_vars();
    if m == 0 {
        return ExactScaledRoot::new(2, 0, 2 * h.constant() % 8);
    }
    let v = m - 1;
    let mut h = h.clone();
    if h.square[v] == 2 {
        h.square[v] = 0;
        h.linear[v] = (h.linear[v] + 2) % 4;
    }
    match h.square[v] {
        0 => {
            let (ell, ell0, g) = h.split_last_linear();
            if ell.iter().all(|&c| c == 0) {
                if ell0 == 0 {
                    // x_v is absent: summing over it doubles the rest.
                    gauss_binary_rec(&g).shifted(2)
                } else {
                    // ω₄^{2·x_v} sums to 1 + (−1) = 0 whatever x′ is.
                    ExactScaledRoot::zero(2)
                }
            } else {
                // Substitute the solution space of ℓ(x′) = 0 (mod 2).
                let a = {
                    let mut mat = ModMatrix::zeros(2, 1, v);
                    for (j, &c) in ell.iter().enumerate() {
                        mat.set(0, j, c);
                    }
                    mat
                };
                let rhs = ModVector::new(2, vec![(2 - ell0) % 2]);
                let sol = solve_affine_system(&a, &rhs).expect("a nonconstant linear form has zeros");
                let sub = g.substitute_affine(&sol.basis, &sol.offset);
                gauss_binary_rec(&sub).shifted(2)
            }
        }
        1 => {
            // Σ_{x_v} ω₄^{x_v² + 2x_vℓ} = √2·ζ·ω₄^{−ℓ²}.
            let (ell, ell0, g) = h.split_last_linear();
            let mut g2 = g;
            g2.subtract_affine_square(&ell, ell0);
            gauss_binary_rec(&g2).shifted(1).rotated(1)
        }
        3 => gauss_binary_rec(&h.negated()).conj(),
        _ => unreachable!("square coefficient 2 was folded away"),
    }
}

/// True when `a` is a quadratic non-residue mod the odd prime `q`
/// (Euler's criterion).
fn is_nonresidue(a: u64, q: u64) -> bool {
    let mut base = a % q;
    let mut exp = (q - 1) / 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc == q - 1
}

/// Exact value of `Σ_{x ∈ Z_q^n} ω_q^{h(x)}` for an odd prime `q`.
///
/// The form is diagonalized; each variable then contributes `q` (no
/// quadratic or linear part), zero (pure linear), or the one-variable
/// quadratic Gauss sum `ω_q^{−b²/(4a)} · η(a) · g_q` with `|g_q| = √q`
/// (`g_q = √q` for q ≡ 1 mod 4 and `i·√q` for q ≡ 3 mod 4).
pub fn gauss_sum_odd(h: &QuadraticPhasePolynomial) -> ExactScaledRoot {
    let q = h.modulus();
    assert!(is_prime(q) && q % 2 == 1, "odd-prime evaluator got modulus {q}");
    let n = h.num_vars();
    let inv2 = (q + 1) / 2;

    let mut qmat = ModMatrix::zeros(q, n, n);
    for i in 0..n {
        qmat.set(i, i, h.square(i));
        for j in 0..i {
            let half = h.cross(i, j) * inv2 % q;
            qmat.set(i, j, half);
            qmat.set(j, i, half);
        }
    }
    let lin = ModVector::new(q, h.linear.clone());
    let d = diagonalize_quadratic(&qmat, &lin, h.constant());

    let order = ExactScaledRoot::root_order(q);
    let mut acc = ExactScaledRoot::new(q, 0, 4 * d.constant % order);
    for i in 0..n {
        let (a, b) = (d.diagonal_coeffs[i], d.linear_coeffs[i]);
        if a == 0 {
            if b == 0 {
                acc = acc.shifted(2); // full sum over one free variable
            } else {
                return ExactScaledRoot::zero(q); // complete set of q-th roots
            }
        } else {
            let e = (q - b * b % q * inverse_mod_prime(4 % q * a % q, q) % q) % q;
            let mut rot = 4 * e % order;
            if is_nonresidue(a, q) {
                rot = (rot + 2 * q) % order;
            }
            if q % 4 == 3 {
                rot = (rot + q) % order;
            }
            acc = acc.mul(&ExactScaledRoot::new(q, 1, rot));
        }
    }
    acc
}

/// An affine expression `Σ coeffs[i]·tᵢ + constant` over `Z_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineExpr {
    pub coeffs: Vec<u64>,
    pub constant: u64,
}

impl AffineExpr {
    fn var(num_vars: usize, i: usize) -> Self {
        let mut coeffs = vec![0; num_vars];
        coeffs[i] = 1;
        AffineExpr { coeffs, constant: 0 }
    }

    fn add(&self, other: &AffineExpr, q: u64) -> Self {
        AffineExpr {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| (a + b) % q).collect(),
            constant: (self.constant + other.constant) % q,
        }
    }

    fn evaluate(&self, point: &[u64], q: u64) -> u64 {
        let mut acc = self.constant;
        for (c, &x) in self.coeffs.iter().zip(point) {
            acc = (acc + c * (x % q)) % q;
        }
        acc
    }
}

/// The symbolic state of a circuit prefix: affine wire labels over the
/// input variables (indices `0..n`) and one path variable per `F` gate
/// (indices `n..n+k`), a phase polynomial over the same variables, and
/// the accumulated normalization `q^{-k/2}`.
#[derive(Debug, Clone)]
pub struct PathSumState {
    n: usize,
    q: u64,
    labels: Vec<AffineExpr>,
    phase: QuadraticPhasePolynomial,
    path_vars: usize,
}

impl PathSumState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn path_vars(&self) -> usize {
        self.path_vars
    }

    pub fn labels(&self) -> &[AffineExpr] {
        &self.labels
    }

    pub fn phase(&self) -> &QuadraticPhasePolynomial {
        &self.phase
    }

    /// Exponent of √q in the accumulated normalization: −(number of F gates).
    pub fn norm_half_power(&self) -> i64 {
        -(self.path_vars as i64)
    }

    fn num_vars(&self) -> usize {
        self.n + self.path_vars
    }

    fn new_path_var(&mut self) -> usize {
        for l in &mut self.labels {
            l.coeffs.push(0);
        }
        self.phase.extend_vars(1);
        self.path_vars += 1;
        self.n + self.path_vars - 1
    }

    /// Realize the symbolic state on a concrete input: returns the dense
    /// vector `C|x⟩` of dimension `q^n` (wire 0 is the most significant
    /// digit). Cost is `q^k` terms.
    pub fn realize_state(&self, x: &[u64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n, "input width mismatch");
        let q = self.q;
        let qp = phase_modulus(q);
        let dim = (q as usize).pow(self.n as u32);
        let mut state = vec![Complex64::new(0.0, 0.0); dim];
        let terms = (q as usize).pow(self.path_vars as u32);
        let scale = (q as f64).powf(-(self.path_vars as f64) / 2.0);
        let mut point: Vec<u64> = x.iter().map(|&e| e % q).collect();
        point.resize(self.num_vars(), 0);
        for t in 0..terms {
            let mut rest = t;
            for j in 0..self.path_vars {
                point[self.n + j] = (rest % q as usize) as u64;
                rest /= q as usize;
            }
            let mut idx = 0usize;
            for label in &self.labels {
                idx = idx * q as usize + label.evaluate(&point, q) as usize;
            }
            let e = self.phase.evaluate(&point);
            let angle = 2.0 * std::f64::consts::PI * e as f64 / qp as f64;
            state[idx] += Complex64::from_polar(scale, angle);
        }
        state
    }
}

/// Run the sum-over-paths rules over a circuit.
///
/// Per-gate updates, writing `ℓ` for the label of the touched wire:
/// `CNOT` adds the control label to the target; `X` adds 1 to the label;
/// `Z` adds `ℓ` (odd q) or `2ℓ` (q = 2) to the phase; `S` adds
/// `ℓ(ℓ−1)/2` (odd q) or the integer-lift square `ℓ²` (q = 2, using that
/// `(Σ zᵢ)² mod 4` computes the XOR of binary values); `F` introduces a
/// path variable `v`, adds `v·ℓ` (doubled at q = 2) and relabels to `v`.
pub fn build_path_sum(c: &CliffordCircuit) -> PathSumState {
    let (n, q) = (c.n(), c.q());
    let qp = phase_modulus(q);
    let mut st = PathSumState {
        n,
        q,
        labels: (0..n).map(|i| AffineExpr::var(n, i)).collect(),
        phase: QuadraticPhasePolynomial::zero(qp, n),
        path_vars: 0,
    };
    let unit = if q == 2 { 2 } else { 1 };
    for &g in c.gates() {
        match g {
            Gate::Cnot(cw, t) => {
                st.labels[t] = st.labels[t].add(&st.labels[cw], q);
            }
            Gate::X(i) => {
                st.labels[i].constant = (st.labels[i].constant + 1) % q;
            }
            Gate::Z(i) => {
                let l = st.labels[i].clone();
                st.phase.add_scaled_affine(unit, (&l.coeffs, l.constant));
            }
            Gate::S(i) => {
                let l = st.labels[i].clone();
                if q == 2 {
                    st.phase.add_scaled_product(1, (&l.coeffs, l.constant), (&l.coeffs, l.constant));
                } else {
                    let inv2 = (q + 1) / 2;
                    st.phase.add_scaled_product(inv2, (&l.coeffs, l.constant), (&l.coeffs, l.constant));
                    st.phase.add_scaled_affine(q - inv2, (&l.coeffs, l.constant));
                }
            }
            Gate::F(i) => {
                let v = st.new_path_var();
                let l = st.labels[i].clone();
                let vexpr = AffineExpr::var(st.num_vars(), v);
                st.phase.add_scaled_product(unit, (&vexpr.coeffs, 0), (&l.coeffs, l.constant));
                st.labels[i] = vexpr;
            }
        }
    }
    st
}

/// Exact normalized trace `τ̂(C) = τ(C)/q^n`, computed by imposing
/// `labels(x, v) = x` as an affine system, substituting its solution
/// space into the phase polynomial, and evaluating the resulting Gauss
/// sum. Infeasible constraints mean an exactly zero trace.
pub fn exact_trace(c: &CliffordCircuit) -> ExactScaledRoot {
    let st = build_path_sum(c);
    let (n, q, k) = (st.n, st.q, st.path_vars);
    let vars = n + k;

    let mut a = ModMatrix::zeros(q, n, vars);
    let mut b = ModVector::zeros(q, n);
    for i in 0..n {
        for (j, &co) in st.labels[i].coeffs.iter().enumerate() {
            a.set(i, j, co);
        }
        a.set(i, i, (a.get(i, i) + q - 1) % q);
        b.set(i, (q - st.labels[i].constant % q) % q);
    }

    match solve_affine_system(&a, &b) {
        None => ExactScaledRoot::zero(q),
        Some(sol) => {
            let h = st.phase.substitute_affine(&sol.basis, &sol.offset);
            let g = if q == 2 { gauss_sum_binary(&h) } else { gauss_sum_odd(&h) };
            // τ = q^{-k/2}·G and τ̂ divides by q^n on top of that.
            g.shifted(-(k as i64) - 2 * (n as i64))
        }
    }
}
