//! Exact linear and quadratic algebra over `Z_m`, for `m` a prime or 4.
//!
//! Vectors and matrices hold residues reduced into `[0, m)`. Linear
//! systems are solved by Gaussian elimination with first-nonzero pivoting,
//! so solution-space parametrizations are identical across runs. Quadratic
//! forms over odd-prime moduli are diagonalized by congruence transforms;
//! the binary phase ring (`m = 4`) is handled elsewhere by a dedicated
//! algorithm and is rejected here.
//!
//! Dimension mismatches and unsupported moduli are programming errors and
//! panic. Moduli are restricted to primes and 4: composite arities are not
//! meaningful for any construction in this crate.

/// Deterministic trial-division primality check; moduli here are small.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    if m % 2 == 0 {
        return m == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).is_some_and(|dd| dd <= m) {
        if m % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Moduli accepted by this module: primes, plus 4 for the binary phase ring.
pub fn is_supported_modulus(m: u64) -> bool {
    is_prime(m) || m == 4
}

fn check_modulus(m: u64) {
    assert!(is_supported_modulus(m), "unsupported modulus {m}: must be prime or 4");
}

/// Reduce a signed integer into `[0, m)`.
pub fn reduce_i64(v: i64, m: u64) -> u64 {
    let m_i = m as i64;
    (((v % m_i) + m_i) % m_i) as u64
}

/// Multiplicative inverse mod a prime.
pub fn inverse_mod_prime(a: u64, q: u64) -> u64 {
    assert!(is_prime(q), "modulus {q} is not prime");
    let a = a % q;
    assert!(a != 0, "0 has no inverse mod {q}");
    // Fermat: a^(q-2) mod q.
    let mut base = a;
    let mut exp = q - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc
}

/// A vector of residues mod a fixed modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModVector {
    modulus: u64,
    entries: Vec<u64>,
}

impl ModVector {
    pub fn new(modulus: u64, entries: Vec<u64>) -> Self {
        check_modulus(modulus);
        let entries = entries.into_iter().map(|e| e % modulus).collect();
        ModVector { modulus, entries }
    }

    pub fn from_i64(modulus: u64, entries: &[i64]) -> Self {
        check_modulus(modulus);
        ModVector { modulus, entries: entries.iter().map(|&e| reduce_i64(e, modulus)).collect() }
    }

    pub fn zeros(modulus: u64, len: usize) -> Self {
        check_modulus(modulus);
        ModVector { modulus, entries: vec![0; len] }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> u64 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, v: u64) {
        self.entries[i] = v % self.modulus;
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// Inner product mod the common modulus.
    pub fn dot(&self, other: &ModVector) -> u64 {
        assert_eq!(self.modulus, other.modulus, "modulus mismatch");
        assert_eq!(self.len(), other.len(), "length mismatch");
        let m = self.modulus;
        self.entries.iter().zip(&other.entries).fold(0u64, |acc, (&a, &b)| (acc + a * b) % m)
    }

    pub fn add(&self, other: &ModVector) -> ModVector {
        assert_eq!(self.modulus, other.modulus, "modulus mismatch");
        assert_eq!(self.len(), other.len(), "length mismatch");
        let m = self.modulus;
        ModVector { modulus: m, entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| (a + b) % m).collect() }
    }

    pub fn neg(&self) -> ModVector {
        let m = self.modulus;
        ModVector { modulus: m, entries: self.entries.iter().map(|&a| (m - a) % m).collect() }
    }

    pub fn scale(&self, k: u64) -> ModVector {
        let m = self.modulus;
        let k = k % m;
        ModVector { modulus: m, entries: self.entries.iter().map(|&a| a * k % m).collect() }
    }
}

/// A row-major matrix of residues mod a fixed modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMatrix {
    modulus: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(modulus: u64, rows: usize, cols: usize) -> Self {
        check_modulus(modulus);
        ModMatrix { modulus, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(modulus: u64, n: usize) -> Self {
        let mut m = Self::zeros(modulus, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(modulus: u64, rows: &[Vec<i64>]) -> Self {
        check_modulus(modulus);
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        let data = rows.iter().flatten().map(|&e| reduce_i64(e, modulus)).collect();
        ModMatrix { modulus, rows: nrows, cols: ncols, data }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.data[r * self.cols + c] = v % self.modulus;
    }

    pub fn column(&self, c: usize) -> ModVector {
        ModVector::new(self.modulus, (0..self.rows).map(|r| self.get(r, c)).collect())
    }

    pub fn transpose(&self) -> ModMatrix {
        let mut t = ModMatrix::zeros(self.modulus, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &ModVector) -> ModVector {
        assert_eq!(self.modulus, v.modulus(), "modulus mismatch");
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        let m = self.modulus;
        let entries =
            (0..self.rows).map(|r| (0..self.cols).fold(0u64, |acc, c| (acc + self.get(r, c) * v.get(c)) % m)).collect();
        ModVector { modulus: m, entries }
    }

    pub fn mul_mat(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!(self.modulus, other.modulus, "modulus mismatch");
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let m = self.modulus;
        let mut out = ModMatrix::zeros(m, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = 0u64;
                for k in 0..self.cols {
                    acc = (acc + self.get(r, k) * other.get(k, c)) % m;
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }
}

/// The complete solution set of a feasible system `A·w = b (mod q)`:
/// every solution is `basis·y + offset` for exactly one `y` in `Z_q^free_dim`.
#[derive(Debug, Clone)]
pub struct AffineSolutionSet {
    /// Columns span the kernel of `A`; shape `cols(A) × free_dim`.
    pub basis: ModMatrix,
    /// A particular solution.
    pub offset: ModVector,
    /// Number of free variables: `cols(A) − rank(A)`.
    pub free_dim: usize,
}

impl AffineSolutionSet {
    /// The solution `basis·y + offset` for a parameter vector `y`.
    pub fn point(&self, y: &ModVector) -> ModVector {
        self.basis.mul_vec(y).add(&self.offset)
    }
}

/// Solve `A·w = b (mod q)` for prime `q`. Returns `None` when the system
/// is infeasible. Elimination pivots on the first nonzero entry in each
/// column, making the returned parametrization deterministic.
pub fn solve_affine_system(a: &ModMatrix, b: &ModVector) -> Option<AffineSolutionSet> {
    let q = a.modulus();
    assert!(is_prime(q), "solve_affine_system requires a prime modulus, got {q}");
    assert_eq!(q, b.modulus(), "modulus mismatch");
    assert_eq!(a.rows(), b.len(), "dimension mismatch: {} rows vs {} rhs entries", a.rows(), b.len());

    let rows = a.rows();
    let cols = a.cols();
    let mut m = a.clone();
    let mut rhs = b.clone();

    // Reduced row echelon form of [A | b].
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let Some(src) = (pivot_row..rows).find(|&r| m.get(r, col) != 0) else {
            continue;
        };
        if src != pivot_row {
            for c in 0..cols {
                let (x, y) = (m.get(pivot_row, c), m.get(src, c));
                m.set(pivot_row, c, y);
                m.set(src, c, x);
            }
            let (x, y) = (rhs.get(pivot_row), rhs.get(src));
            rhs.set(pivot_row, y);
            rhs.set(src, x);
        }
        let inv = inverse_mod_prime(m.get(pivot_row, col), q);
        for c in 0..cols {
            m.set(pivot_row, c, m.get(pivot_row, c) * inv % q);
        }
        rhs.set(pivot_row, rhs.get(pivot_row) * inv % q);
        for r in 0..rows {
            if r != pivot_row && m.get(r, col) != 0 {
                let f = m.get(r, col);
                for c in 0..cols {
                    let v = (m.get(r, c) + (q - f % q) * m.get(pivot_row, c)) % q;
                    m.set(r, c, v);
                }
                let v = (rhs.get(r) + (q - f % q) * rhs.get(pivot_row)) % q;
                rhs.set(r, v);
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    let rank = pivot_cols.len();

    // Inconsistent row: 0 = nonzero.
    for r in rank..rows {
        if rhs.get(r) != 0 {
            return None;
        }
    }

    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let free_dim = free_cols.len();

    let mut offset = ModVector::zeros(q, cols);
    for (r, &pc) in pivot_cols.iter().enumerate() {
        offset.set(pc, rhs.get(r));
    }

    let mut basis = ModMatrix::zeros(q, cols, free_dim);
    for (k, &fc) in free_cols.iter().enumerate() {
        basis.set(fc, k, 1);
        for (r, &pc) in pivot_cols.iter().enumerate() {
            basis.set(pc, k, (q - m.get(r, fc)) % q);
        }
    }

    Some(AffineSolutionSet { basis, offset, free_dim })
}

/// A quadratic-plus-linear form brought to diagonal shape by an invertible
/// change of variables: substituting `x = change_of_vars·y` into the
/// original form gives `Σ aᵢ·yᵢ² + Σ bᵢ·yᵢ + constant` identically mod q.
#[derive(Debug, Clone)]
pub struct DiagonalizedForm {
    pub diagonal_coeffs: Vec<u64>,
    pub linear_coeffs: Vec<u64>,
    pub constant: u64,
    pub change_of_vars: ModMatrix,
}

/// Congruence-diagonalize `xᵀQx + ℓᵀx + c` over an odd prime field.
///
/// `Q` is the symmetric coefficient matrix (so the `x_i x_j` monomial has
/// coefficient `2·Q[i][j]` for `i ≠ j`). A zero diagonal with a nonzero
/// cross entry is repaired by the substitution `x_j → x_j + x_i`, which
/// puts `2·Q[i][j] ≠ 0` on the diagonal before the square is completed.
pub fn diagonalize_quadratic(q_mat: &ModMatrix, linear: &ModVector, constant: u64) -> DiagonalizedForm {
    let q = q_mat.modulus();
    assert!(is_prime(q) && q % 2 == 1, "diagonalization requires an odd prime modulus, got {q}");
    assert!(q_mat.is_symmetric(), "coefficient matrix must be symmetric");
    assert_eq!(q_mat.rows(), linear.len(), "dimension mismatch");
    assert_eq!(q, linear.modulus(), "modulus mismatch");

    let n = q_mat.rows();
    let mut quad = q_mat.clone();
    let mut change = ModMatrix::identity(q, n);

    // Applies x = S·y to the current form: quad ← SᵀQS, change ← change·S.
    let apply = |quad: &mut ModMatrix, change: &mut ModMatrix, s: &ModMatrix| {
        *quad = s.transpose().mul_mat(quad).mul_mat(s);
        *change = change.mul_mat(s);
    };

    for i in 0..n {
        if quad.get(i, i) == 0 {
            if let Some(j) = ((i + 1)..n).find(|&j| quad.get(j, j) != 0) {
                // Swap variables i and j.
                let mut s = ModMatrix::identity(q, n);
                s.set(i, i, 0);
                s.set(j, j, 0);
                s.set(i, j, 1);
                s.set(j, i, 1);
                apply(&mut quad, &mut change, &s);
            } else if let Some(j) = ((i + 1)..n).find(|&j| quad.get(i, j) != 0) {
                // x_j → x_j + x_i turns the cross term into a pivot 2·Q[i][j].
                let mut s = ModMatrix::identity(q, n);
                s.set(j, i, 1);
                apply(&mut quad, &mut change, &s);
            } else {
                continue; // variable i has no quadratic part left
            }
        }
        let pivot = quad.get(i, i);
        let inv = inverse_mod_prime(pivot, q);
        for j in (i + 1)..n {
            let cross = quad.get(i, j);
            if cross != 0 {
                // x_i → x_i − (Q[i][j]/Q[i][i])·x_j clears the (i,j) cross term.
                let mut s = ModMatrix::identity(q, n);
                s.set(i, j, (q - cross * inv % q) % q);
                apply(&mut quad, &mut change, &s);
            }
        }
    }

    let linear_new = change.transpose().mul_vec(linear);
    DiagonalizedForm {
        diagonal_coeffs: (0..n).map(|i| quad.get(i, i)).collect(),
        linear_coeffs: linear_new.entries().to_vec(),
        constant: constant % q,
        change_of_vars: change,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumerate all vectors in Z_q^len in lexicographic order.
    pub(crate) fn enumerate_vectors(q: u64, len: usize) -> Vec<Vec<u64>> {
        let total = (q as usize).pow(len as u32);
        (0..total)
            .map(|mut idx| {
                let mut v = vec![0u64; len];
                for slot in v.iter_mut().rev() {
                    *slot = (idx % q as usize) as u64;
                    idx /= q as usize;
                }
                v
            })
            .collect()
    }

    fn eval_form(q_mat: &ModMatrix, linear: &ModVector, constant: u64, x: &[u64]) -> u64 {
        let q = q_mat.modulus();
        let mut acc = constant % q;
        for i in 0..x.len() {
            acc = (acc + linear.get(i) * x[i]) % q;
            for j in 0..x.len() {
                acc = (acc + q_mat.get(i, j) * x[i] % q * x[j]) % q;
            }
        }
        acc
    }

    fn eval_diag(d: &DiagonalizedForm, q: u64, y: &[u64]) -> u64 {
        let mut acc = d.constant;
        for i in 0..y.len() {
            acc = (acc + d.diagonal_coeffs[i] * y[i] % q * y[i]) % q;
            acc = (acc + d.linear_coeffs[i] * y[i]) % q;
        }
        acc
    }

    #[test]
    fn solves_parity_kernel() {
        // x + y = 0 mod 2: kernel spanned by (1,1), offset 0.
        let a = ModMatrix::from_rows(2, &[vec![1, 1]]);
        let b = ModVector::new(2, vec![0]);
        let sol = solve_affine_system(&a, &b).unwrap();
        assert_eq!(sol.free_dim, 1);
        assert!(sol.offset.is_zero());
        assert_eq!(sol.basis.column(0).entries(), &[1, 1]);
    }

    #[test]
    fn solves_pinned_variable() {
        let a = ModMatrix::from_rows(2, &[vec![1]]);
        let b = ModVector::new(2, vec![1]);
        let sol = solve_affine_system(&a, &b).unwrap();
        assert_eq!(sol.free_dim, 0);
        assert_eq!(sol.basis.cols(), 0);
        assert_eq!(sol.offset.entries(), &[1]);
    }

    #[test]
    fn solves_scaled_equation_mod_3() {
        // 2w = 1 mod 3. Oracle: scan residues; only w = 2 gives 2·2 = 4 ≡ 1.
        let expected: Vec<u64> = (0..3).filter(|w| 2 * w % 3 == 1).collect();
        assert_eq!(expected, vec![2]);
        let a = ModMatrix::from_rows(3, &[vec![2]]);
        let b = ModVector::new(3, vec![1]);
        let sol = solve_affine_system(&a, &b).unwrap();
        assert_eq!(sol.offset.entries(), &[2]);
        assert_eq!(sol.free_dim, 0);
    }

    #[test]
    fn detects_infeasible_system() {
        // x = 0 and x = 1 simultaneously.
        let a = ModMatrix::from_rows(3, &[vec![1], vec![1]]);
        let b = ModVector::new(3, vec![0, 1]);
        assert!(solve_affine_system(&a, &b).is_none());
    }

    #[test]
    fn solution_sets_are_complete_and_correct() {
        // Every parametrized point solves the system, and the number of
        // solutions found by exhaustive scan matches q^free_dim.
        let cases: Vec<(u64, Vec<Vec<i64>>, Vec<u64>)> = vec![
            (2, vec![vec![1, 1, 0], vec![0, 1, 1]], vec![1, 0]),
            (3, vec![vec![1, 2, 0], vec![2, 1, 1]], vec![2, 1]),
            (5, vec![vec![1, 2, 3], vec![2, 4, 1], vec![3, 1, 4]], vec![0, 2, 3]),
            (3, vec![vec![1, 1], vec![2, 2]], vec![1, 2]),
            (7, vec![vec![0, 0]], vec![0]),
        ];
        for (q, rows, rhs) in cases {
            let a = ModMatrix::from_rows(q, &rows);
            let b = ModVector::new(q, rhs);
            let cols = a.cols();
            let brute: Vec<Vec<u64>> = enumerate_vectors(q, cols)
                .into_iter()
                .filter(|w| {
                    let wv = ModVector::new(q, w.clone());
                    a.mul_vec(&wv) == b
                })
                .collect();
            match solve_affine_system(&a, &b) {
                None => assert!(brute.is_empty()),
                Some(sol) => {
                    assert_eq!((q as usize).pow(sol.free_dim as u32), brute.len());
                    let mut seen: Vec<Vec<u64>> = Vec::new();
                    for y in enumerate_vectors(q, sol.free_dim) {
                        let w = sol.point(&ModVector::new(q, y));
                        assert_eq!(a.mul_vec(&w), b, "parametrized point must solve the system");
                        seen.push(w.entries().to_vec());
                    }
                    seen.sort();
                    seen.dedup();
                    assert_eq!(seen.len(), brute.len(), "parametrization must be injective");
                }
            }
        }
    }

    #[test]
    fn rank_nullity_holds() {
        for q in [2u64, 3, 5] {
            for rows in 1..=3usize {
                for cols in 1..=3usize {
                    // A deterministic spread of matrices.
                    for salt in 0..20u64 {
                        let a = {
                            let mut m = ModMatrix::zeros(q, rows, cols);
                            for r in 0..rows {
                                for c in 0..cols {
                                    m.set(r, c, (salt * 7 + r as u64 * 3 + c as u64 * 5) % q);
                                }
                            }
                            m
                        };
                        let b = ModVector::zeros(q, rows);
                        let sol = solve_affine_system(&a, &b).expect("homogeneous is feasible");
                        let rank = cols - sol.free_dim;
                        assert!(rank <= rows.min(cols));
                        assert_eq!(sol.free_dim + rank, cols);
                    }
                }
            }
        }
    }

    #[test]
    fn diagonalize_leaves_pure_linear_untouched() {
        let q = 5;
        let zero = ModMatrix::zeros(q, 3, 3);
        let linear = ModVector::new(q, vec![1, 2, 3]);
        let d = diagonalize_quadratic(&zero, &linear, 4);
        assert_eq!(d.diagonal_coeffs, vec![0, 0, 0]);
        assert_eq!(d.linear_coeffs, vec![1, 2, 3]);
        assert_eq!(d.constant, 4);
        assert_eq!(d.change_of_vars, ModMatrix::identity(q, 3));
    }

    #[test]
    fn diagonalize_full_form_mod_3() {
        // x² + xy + y²: symmetric matrix [[1, 2], [2, 1]] since 2·2 ≡ 1 mod 3.
        // The form is a perfect square mod 3, namely (x + 2y)², so its diagonal
        // shape has rank 1; the pointwise identity is the real check.
        let q = 3;
        let qm = ModMatrix::from_rows(q, &[vec![1, 2], vec![2, 1]]);
        let linear = ModVector::zeros(q, 2);
        let d = diagonalize_quadratic(&qm, &linear, 0);
        assert_eq!(d.diagonal_coeffs, vec![1, 0]);
        for x in enumerate_vectors(q, 2) {
            let y = solve_change_of_vars(&d.change_of_vars, &x);
            assert_eq!(eval_form(&qm, &linear, 0, &x), eval_diag(&d, q, &y));
        }
    }

    #[test]
    fn diagonalize_zero_diagonal_cross_mod_5() {
        // 2xy: zero diagonal, cross coefficient 2 → Q = [[0,1],[1,0]].
        let q = 5;
        let qm = ModMatrix::from_rows(q, &[vec![0, 1], vec![1, 0]]);
        let linear = ModVector::new(q, vec![3, 1]);
        let d = diagonalize_quadratic(&qm, &linear, 2);
        for x in enumerate_vectors(q, 2) {
            let y = solve_change_of_vars(&d.change_of_vars, &x);
            assert_eq!(eval_form(&qm, &linear, 2, &x), eval_diag(&d, q, &y));
        }
    }

    /// Invert x = M·y by scanning (dims here are tiny). Verifies invertibility.
    fn solve_change_of_vars(m: &ModMatrix, x: &[u64]) -> Vec<u64> {
        let q = m.modulus();
        let sol = solve_affine_system(m, &ModVector::new(q, x.to_vec())).expect("invertible");
        assert_eq!(sol.free_dim, 0, "change of variables must be invertible");
        sol.offset.entries().to_vec()
    }

    #[test]
    fn diagonalize_substitution_identity_exhaustive() {
        // All symmetric forms in 2 vars over q = 3,5 and a sample in 3-4 vars over q = 7.
        for q in [3u64, 5] {
            for a in 0..q {
                for b in 0..q {
                    for c in 0..q {
                        let qm = ModMatrix::from_rows(q, &[vec![a as i64, b as i64], vec![b as i64, c as i64]]);
                        let linear = ModVector::new(q, vec![a, c]);
                        let d = diagonalize_quadratic(&qm, &linear, b);
                        for x in enumerate_vectors(q, 2) {
                            let y = solve_change_of_vars(&d.change_of_vars, &x);
                            assert_eq!(eval_form(&qm, &linear, b, &x), eval_diag(&d, q, &y));
                        }
                    }
                }
            }
        }
        let q = 7u64;
        for dim in [3usize, 4] {
            for salt in 0..12u64 {
                let mut qm = ModMatrix::zeros(q, dim, dim);
                for i in 0..dim {
                    for j in 0..=i {
                        let v = (salt * 11 + i as u64 * 5 + j as u64 * 3) % q;
                        qm.set(i, j, v);
                        qm.set(j, i, v);
                    }
                }
                let linear = ModVector::new(q, (0..dim as u64).map(|i| (salt + i) % q).collect());
                let d = diagonalize_quadratic(&qm, &linear, salt % q);
                for x in enumerate_vectors(q, dim) {
                    let y = solve_change_of_vars(&d.change_of_vars, &x);
                    assert_eq!(eval_form(&qm, &linear, salt % q, &x), eval_diag(&d, q, &y));
                }
            }
        }
    }

    #[test]
    #[should_panic(expected = "odd prime")]
    fn diagonalize_rejects_even_modulus() {
        let qm = ModMatrix::zeros(2, 1, 1);
        let linear = ModVector::zeros(2, 1);
        diagonalize_quadratic(&qm, &linear, 0);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn solve_rejects_dimension_mismatch() {
        let a = ModMatrix::from_rows(3, &[vec![1, 2]]);
        let b = ModVector::new(3, vec![0, 0]);
        solve_affine_system(&a, &b);
    }

    #[test]
    #[should_panic(expected = "unsupported modulus")]
    fn composite_modulus_rejected() {
        ModVector::zeros(6, 2);
    }

    #[test]
    fn modulus_4_is_supported_for_storage() {
        let v = ModVector::new(4, vec![5, 7]);
        assert_eq!(v.entries(), &[1, 3]);
    }
}
