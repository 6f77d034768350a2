//! Gabidulin codes: Moore generator matrices, encoding, bounded-distance
//! rank decoding, duals, the Λ_i stacking operator, and recovery of a
//! generator vector from an arbitrary generator matrix of a Gabidulin code.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::{expand_to_base, rank_weight, BaseMatrix, ExtMatrix, ExtVector};

/// k×n Moore matrix with entry (i, j) = g_j^{[i]}.
pub fn moore_matrix(g: &ExtVector, k: usize) -> Result<ExtMatrix> {
    let n = g.len();
    let m = g.field().m();
    if !(1 <= k && k <= n && n <= m) {
        return Err(Error::Param(format!(
            "need 1 <= k <= n <= m, got k = {k}, n = {n}, m = {m}"
        )));
    }
    if rank_weight(g) != n {
        return Err(Error::Param("generator vector does not have full rank weight".into()));
    }
    let mut rows = Vec::with_capacity(k);
    let mut current = g.clone();
    for _ in 0..k {
        rows.push(current.clone());
        current = current.frobenius(1);
    }
    Ok(ExtMatrix::from_rows(rows))
}

/// Λ_i(M): the ((i+1)·rows)×cols stack of M^{[0]}, ..., M^{[i]}.
pub fn lambda_op(m: &ExtMatrix, i: usize) -> ExtMatrix {
    let mut out = m.clone();
    let mut block = m.clone();
    for _ in 0..i {
        block = block.frobenius(1);
        out = out.vstack(&block);
    }
    out
}

/// dim Λ_i(code generated by M), i.e. the rank of the stacked matrix over F_{q^m}.
pub fn lambda_code_dim(m: &ExtMatrix, i: usize) -> usize {
    lambda_op(m, i).rank()
}

/// An (n, k) Gabidulin code Gab_k(g) with ‖g‖ = n ≤ m.
#[derive(Clone, Debug)]
pub struct GabidulinCode {
    g: ExtVector,
    k: usize,
    dual: OnceLock<ExtVector>,
}

impl PartialEq for GabidulinCode {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g && self.k == other.k
    }
}

impl GabidulinCode {
    pub fn new(g: ExtVector, k: usize) -> Result<Self> {
        // moore_matrix validates k <= n <= m and the rank weight of g
        moore_matrix(&g, k)?;
        Ok(GabidulinCode {
            g,
            k,
            dual: OnceLock::new(),
        })
    }

    pub fn field(&self) -> &Field {
        self.g.field()
    }

    pub fn g(&self) -> &ExtVector {
        &self.g
    }

    pub fn n(&self) -> usize {
        self.g.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Error capability t = ⌊(n − k)/2⌋.
    pub fn t(&self) -> usize {
        (self.n() - self.k) / 2
    }

    pub fn generator_matrix(&self) -> ExtMatrix {
        moore_matrix(&self.g, self.k).expect("validated at construction")
    }

    /// h with Gab_{n−k}(h) equal to the dual code.
    ///
    /// h is obtained from the spanning vector of the 1-dimensional dual of
    /// Gab_{n−1}(g), Frobenius-shifted by −(n−k−1) so that the orthogonality
    /// exponents line up; normalized so its first nonzero coordinate is 1.
    pub fn dual_generator(&self) -> Result<ExtVector> {
        let (n, k) = (self.n(), self.k);
        if k == n {
            return Err(Error::Param("the full code has an empty dual".into()));
        }
        if let Some(h) = self.dual.get() {
            return Ok(h.clone());
        }
        let top = moore_matrix(&self.g, n - 1)?;
        let kernel = top.right_kernel();
        debug_assert_eq!(kernel.rows(), 1);
        let h0 = kernel.row(0);
        let h = h0.frobenius(-((n - k - 1) as i64)).normalized();
        let _ = self.dual.set(h.clone());
        Ok(h)
    }

    pub fn encode(&self, msg: &ExtVector) -> Result<ExtVector> {
        if msg.len() != self.k {
            return Err(Error::Param(format!(
                "message length {} != dimension {}",
                msg.len(),
                self.k
            )));
        }
        Ok(msg.mul_ext(&self.generator_matrix()))
    }

    /// Syndrome of y against the parity-check Moore matrix: s_i = Σ_l y_l h_l^{[i]}.
    fn syndrome(&self, y: &ExtVector, h: &ExtVector) -> Vec<FieldElement> {
        let d = self.n() - self.k;
        let mut out = Vec::with_capacity(d);
        let mut hrow = h.clone();
        for _ in 0..d {
            out.push(y.dot(&hrow));
            hrow = hrow.frobenius(1);
        }
        out
    }

    /// Bounded-distance decoding: if some codeword c has rank_weight(y − c) ≤ t,
    /// returns the unique (msg, e = y − c); otherwise a decoding failure.
    ///
    /// Syndrome decoder: solve the key equation for the error-span polynomial,
    /// extract the error values from its F_q-root space, then the error
    /// locations over F_q. Every candidate is verified exactly, so a returned
    /// answer is always the true nearest codeword.
    pub fn decode(&self, y: &ExtVector) -> Result<(ExtVector, ExtVector)> {
        let field = self.field().clone();
        let (n, k) = (self.n(), self.k);
        if y.len() != n {
            return Err(Error::Param(format!("word length {} != n = {n}", y.len())));
        }
        let t = self.t();
        if k == n {
            // trivial full code: zero radius
            let msg = self.generator_matrix().solve_left(y).map_err(|_| {
                Error::DecodingFailure { radius: 0 }
            })?;
            return Ok((msg, ExtVector::zero(&field, n)));
        }
        let h = self.dual_generator()?;
        let s = self.syndrome(y, &h);
        if s.iter().all(|x| x.is_zero()) {
            let msg = self
                .generator_matrix()
                .solve_left(y)
                .map_err(|_| Error::DecodingFailure { radius: t })?;
            return Ok((msg, ExtVector::zero(&field, n)));
        }
        let h_exp = expand_to_base(&h);
        for r in 1..=t {
            if let Some(out) = self.try_error_rank(y, &s, &h_exp, r) {
                return Ok(out);
            }
        }
        Err(Error::DecodingFailure { radius: t })
    }

    /// Attempt reconstruction of an error of rank exactly r; None if any step
    /// is inconsistent or the final verification fails.
    fn try_error_rank(
        &self,
        y: &ExtVector,
        s: &[FieldElement],
        h_exp: &BaseMatrix,
        r: usize,
    ) -> Option<(ExtVector, ExtVector)> {
        let field = self.field().clone();
        let (n, k) = (self.n(), self.k);
        let d = n - k;
        let t = self.t();
        if d - r < r {
            return None;
        }
        // Key equation: Σ_{p=0}^{r} λ_p s_{i−p}^{[p]} = 0 for i = r..d−1, λ_r = 1.
        let rows = d - r;
        let a = ExtMatrix::from_fn(&field, rows, r, |row, p| {
            let i = row + r;
            s[i - p].frobenius(p as i64)
        });
        let rhs = ExtVector::new(
            field.clone(),
            (0..rows)
                .map(|row| -&s[row].frobenius(r as i64))
                .collect(),
        );
        // a·λ = rhs  ⇔  λ·aᵀ = rhs
        let lambda = a.transpose().solve_left(&rhs).ok()?;
        // Λ(z) = z^{[r]} + Σ λ_p z^{[p]}; its F_q-root space holds the error values.
        let m = field.m();
        let mut lam_map = BaseMatrix::zeros(field.q(), m, m);
        for j in 0..m {
            let mut coeffs = vec![0u32; m];
            coeffs[j] = 1;
            let basis_el = field.from_coeffs(coeffs).expect("valid coeffs");
            let mut img = basis_el.frobenius(r as i64);
            for (p, lp) in lambda.iter().enumerate() {
                img = &img + &(lp * &basis_el.frobenius(p as i64));
            }
            for (row, &c) in img.coeffs().iter().enumerate() {
                lam_map.set(row, j, c);
            }
        }
        let root_basis = lam_map.kernel(); // m × dim
        if root_basis.cols() != r {
            return None;
        }
        let e_vals: Vec<FieldElement> = (0..r)
            .map(|j| field.from_coeffs(root_basis.column(j)).expect("in range"))
            .collect();
        // Solve Σ_j E_j^{[−i]} x_j = s_i^{[−i]} for the x_j.
        let c = ExtMatrix::from_fn(&field, d, r, |i, j| e_vals[j].frobenius(-(i as i64)));
        let drhs = ExtVector::new(
            field.clone(),
            (0..d).map(|i| s[i].frobenius(-(i as i64))).collect(),
        );
        let x = c.transpose().solve_left(&drhs).ok()?;
        // Error locations over F_q: x_j = Σ_l ε_{j,l} h_l.
        let mut eps: Vec<Vec<u32>> = Vec::with_capacity(r);
        for j in 0..r {
            let target = x.get(j).coeffs().to_vec();
            eps.push(h_exp.solve(&target)?);
        }
        // e_l = Σ_j E_j ε_{j,l}
        let e = ExtVector::new(
            field.clone(),
            (0..n)
                .map(|l| {
                    let mut acc = field.zero();
                    for j in 0..r {
                        if eps[j][l] != 0 {
                            acc = &acc + &e_vals[j].scale(eps[j][l]);
                        }
                    }
                    acc
                })
                .collect(),
        );
        if rank_weight(&e) > t {
            return None;
        }
        let c_word = y.sub(&e);
        let gen = self.generator_matrix();
        let msg = gen.solve_left(&c_word).ok()?;
        if msg.mul_ext(&gen) != c_word {
            return None;
        }
        Some((msg, e))
    }
}

/// Recover a Gabidulin description from an arbitrary generator matrix of an
/// (n, k)-Gabidulin code:
///
/// 1. D := Λ_{n−k−1}(Mcode) must have rank n − 1;
/// 2. h spans its 1-dimensional dual;
/// 3. the dual of the input code is Gab_{n−k}(h^{[−(n−k−1)]});
/// 4. its own dual generator gives g′ with Gab_k(g′) row-space-equal to Mcode
///    (verified, else an error).
pub fn recover_generator(mcode: &ExtMatrix, n: usize, k: usize) -> Result<GabidulinCode> {
    if mcode.cols() != n || k >= n {
        return Err(Error::Param(format!(
            "bad shape: {}x{} matrix for claimed (n, k) = ({n}, {k})",
            mcode.rows(),
            mcode.cols()
        )));
    }
    if mcode.rank() != k {
        return Err(Error::NotGabidulin(format!(
            "matrix rank {} != claimed dimension {k}",
            mcode.rank()
        )));
    }
    let d = lambda_op(mcode, n - k - 1);
    let dim = d.rank();
    if dim != n - 1 {
        return Err(Error::NotGabidulin(format!(
            "dim Λ_{}(code) = {dim}, expected {}",
            n - k - 1,
            n - 1
        )));
    }
    let kernel = d.right_kernel();
    debug_assert_eq!(kernel.rows(), 1);
    let h = kernel.row(0).normalized();
    if rank_weight(&h) != n {
        return Err(Error::NotGabidulin(format!(
            "dual spanning vector has rank weight {} != n = {n}",
            rank_weight(&h)
        )));
    }
    let h_shift = h.frobenius(-((n - k - 1) as i64)).normalized();
    let dual_code = GabidulinCode::new(h_shift, n - k)?;
    let g_prime = dual_code.dual_generator()?;
    let code = GabidulinCode::new(g_prime, k)?;
    if !code.generator_matrix().row_space_eq(mcode) {
        return Err(Error::Recovery(
            "recovered generator does not span the input row space".into(),
        ));
    }
    Ok(code)
}
