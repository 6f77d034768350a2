//! Exact linear algebra over F_{q^m} and F_q: dense matrices, rank weight,
//! rank-reduction factorization, block inversion, kernels over the base
//! field, and the structured random sampling used by key generation and
//! the attack.
//!
//! Everything is deterministic: echelon forms pick the leftmost pivot in
//! the topmost row, so recovered matrices are reproducible across runs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{inv_mod, Field, FieldElement};

const MAX_SAMPLING_TRIES: usize = 10_000;

/// A vector over F_{q^m}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtVector {
    field: Field,
    entries: Vec<FieldElement>,
}

impl ExtVector {
    pub fn new(field: Field, entries: Vec<FieldElement>) -> Self {
        debug_assert!(entries.iter().all(|e| e.field() == &field));
        ExtVector { field, entries }
    }

    pub fn zero(field: &Field, n: usize) -> Self {
        ExtVector {
            field: field.clone(),
            entries: vec![field.zero(); n],
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> &FieldElement {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FieldElement> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &ExtVector) -> ExtVector {
        assert_eq!(self.len(), other.len());
        ExtVector {
            field: self.field.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ExtVector) -> ExtVector {
        assert_eq!(self.len(), other.len());
        ExtVector {
            field: self.field.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &FieldElement) -> ExtVector {
        ExtVector {
            field: self.field.clone(),
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn frobenius(&self, i: i64) -> ExtVector {
        ExtVector {
            field: self.field.clone(),
            entries: self.entries.iter().map(|a| a.frobenius(i)).collect(),
        }
    }

    pub fn dot(&self, other: &ExtVector) -> FieldElement {
        assert_eq!(self.len(), other.len());
        let mut acc = self.field.zero();
        for (a, b) in self.entries.iter().zip(&other.entries) {
            acc = &acc + &(a * b);
        }
        acc
    }

    /// v · T for a base-field matrix T (len × cols).
    pub fn mul_base(&self, t: &BaseMatrix) -> ExtVector {
        assert_eq!(self.len(), t.rows());
        let mut out = Vec::with_capacity(t.cols());
        for j in 0..t.cols() {
            let mut acc = self.field.zero();
            for (l, e) in self.entries.iter().enumerate() {
                let c = t.get(l, j);
                if c != 0 {
                    acc = &acc + &e.scale(c);
                }
            }
            out.push(acc);
        }
        ExtVector {
            field: self.field.clone(),
            entries: out,
        }
    }

    /// v · M for an extension-field matrix M (len × cols).
    pub fn mul_ext(&self, m: &ExtMatrix) -> ExtVector {
        assert_eq!(self.len(), m.rows());
        let mut out = Vec::with_capacity(m.cols());
        for j in 0..m.cols() {
            let mut acc = self.field.zero();
            for (l, e) in self.entries.iter().enumerate() {
                acc = &acc + &(e * m.get(l, j));
            }
            out.push(acc);
        }
        ExtVector {
            field: self.field.clone(),
            entries: out,
        }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> ExtVector {
        ExtVector {
            field: self.field.clone(),
            entries: self.entries[range].to_vec(),
        }
    }

    pub fn concat(&self, other: &ExtVector) -> ExtVector {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        ExtVector {
            field: self.field.clone(),
            entries,
        }
    }

    /// Normalize so the first nonzero coordinate is 1.
    pub fn normalized(&self) -> ExtVector {
        match self.entries.iter().find(|e| !e.is_zero()) {
            Some(first) => self.scale(&first.inv().expect("nonzero")),
            None => self.clone(),
        }
    }
}

/// A dense matrix over F_{q^m}, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl ExtMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        ExtMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<ExtVector>) -> Self {
        assert!(!rows.is_empty());
        let field = rows[0].field().clone();
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in &rows {
            assert_eq!(r.len(), cols);
            data.extend_from_slice(r.entries());
        }
        ExtMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_fn(
        field: &Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExtMatrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn random<R: Rng + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(field, rows, cols, |_, _| field.random(rng))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> ExtVector {
        ExtVector {
            field: self.field.clone(),
            entries: self.data[i * self.cols..(i + 1) * self.cols].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &ExtMatrix) -> ExtMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ExtMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ExtMatrix) -> ExtMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ExtMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &ExtMatrix) -> ExtMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ExtMatrix::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = &out.data[i * other.cols + j] + &(a * other.get(l, j));
                    out.data[i * other.cols + j] = v;
                }
            }
        }
        out
    }

    /// M · T for a base-field matrix T.
    pub fn mul_base(&self, t: &BaseMatrix) -> ExtMatrix {
        assert_eq!(self.cols, t.rows());
        let mut out = ExtMatrix::zeros(&self.field, self.rows, t.cols());
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..t.cols() {
                    let c = t.get(l, j);
                    if c != 0 {
                        let v = &out.data[i * t.cols() + j] + &a.scale(c);
                        out.data[i * t.cols() + j] = v;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> ExtMatrix {
        ExtMatrix::from_fn(&self.field, self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    /// Entrywise Frobenius power M^{[i]}.
    pub fn frobenius(&self, i: i64) -> ExtMatrix {
        ExtMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| e.frobenius(i)).collect(),
        }
    }

    pub fn hstack(&self, other: &ExtMatrix) -> ExtMatrix {
        assert_eq!(self.rows, other.rows);
        ExtMatrix::from_fn(&self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &ExtMatrix) -> ExtMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        ExtMatrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn columns(&self, range: std::ops::Range<usize>) -> ExtMatrix {
        ExtMatrix::from_fn(&self.field, self.rows, range.len(), |i, j| {
            self.get(i, range.start + j).clone()
        })
    }

    /// Reduced row echelon form; returns (rref, pivot column indices).
    pub fn rref(&self) -> (ExtMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, row * m.cols + j);
                }
            }
            let inv = m.get(row, col).inv().expect("nonzero pivot");
            for j in col..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r != row && !m.get(r, col).is_zero() {
                    let factor = m.get(r, col).clone();
                    for j in col..m.cols {
                        let v = m.get(r, j) - &(&factor * m.get(row, j));
                        m.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    /// Rank over F_{q^m}.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Result<ExtMatrix> {
        if self.rows != self.cols {
            return Err(Error::Param("inverse of a non-square matrix".into()));
        }
        let aug = self.hstack(&ExtMatrix::identity(&self.field, self.rows));
        let (r, pivots) = aug.rref();
        if pivots.len() != self.rows || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(Error::Singular(format!("{}x{} matrix", self.rows, self.cols)));
        }
        Ok(r.columns(self.cols..2 * self.cols))
    }

    /// Basis (as rows) of { z : M zᵀ = 0 } over F_{q^m}.
    pub fn right_kernel(&self) -> ExtMatrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut rows = Vec::new();
        for &f in &free {
            let mut v = vec![self.field.zero(); self.cols];
            v[f] = self.field.one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(i, f);
            }
            rows.push(ExtVector::new(self.field.clone(), v));
        }
        if rows.is_empty() {
            ExtMatrix::zeros(&self.field, 0, self.cols)
        } else {
            ExtMatrix::from_rows(rows)
        }
    }

    /// Row spaces compared as sets (via canonical reduced echelon forms).
    pub fn row_space_eq(&self, other: &ExtMatrix) -> bool {
        if self.cols != other.cols {
            return false;
        }
        let (a, pa) = self.rref();
        let (b, pb) = other.rref();
        if pa != pb {
            return false;
        }
        (0..pa.len()).all(|i| a.row(i) == b.row(i))
    }

    /// One solution x of x · M = y, if consistent.
    pub fn solve_left(&self, y: &ExtVector) -> Result<ExtVector> {
        assert_eq!(self.cols, y.len());
        // solve Mᵀ xᵀ = yᵀ
        let mt = self.transpose();
        let aug = mt.hstack(&ExtMatrix::from_rows(vec![y.clone()]).transpose());
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.rows) {
            return Err(Error::Singular("inconsistent linear system".into()));
        }
        let mut x = vec![self.field.zero(); self.rows];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.rows).clone();
        }
        Ok(ExtVector::new(self.field.clone(), x))
    }

    /// Expansion over the base field: stacks the m×cols expansion of every row.
    pub fn expand_to_base(&self) -> BaseMatrix {
        let m = self.field.m();
        let mut out = BaseMatrix::zeros(self.field.q(), m * self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for (r, &c) in self.get(i, j).coeffs().iter().enumerate() {
                    out.set(i * m + r, j, c);
                }
            }
        }
        out
    }

    /// Column rank over F_q (Def. of rank weight extended to matrices).
    pub fn rank_weight(&self) -> usize {
        self.expand_to_base().rank()
    }
}

/// A dense matrix over the base field F_q, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseMatrix {
    q: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl BaseMatrix {
    pub fn zeros(q: u32, rows: usize, cols: usize) -> Self {
        BaseMatrix {
            q,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(q: u32, n: usize) -> Self {
        let mut m = Self::zeros(q, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_fn(q: u32, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j) % q);
            }
        }
        BaseMatrix { q, rows, cols, data }
    }

    pub fn random<R: Rng + ?Sized>(q: u32, rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(q, rows, cols, |_, _| rng.random_range(0..q))
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.q;
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, other: &BaseMatrix) -> BaseMatrix {
        assert_eq!(self.cols, other.rows);
        let q = self.q as u64;
        let mut out = BaseMatrix::zeros(self.q, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] =
                        ((out.data[idx] as u64 + a * other.get(l, j) as u64) % q) as u32;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> BaseMatrix {
        BaseMatrix::from_fn(self.q, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn hstack(&self, other: &BaseMatrix) -> BaseMatrix {
        assert_eq!(self.rows, other.rows);
        BaseMatrix::from_fn(self.q, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                other.get(i, j - self.cols)
            }
        })
    }

    /// Block-diagonal assembly diag(self, other).
    pub fn block_diag(&self, other: &BaseMatrix) -> BaseMatrix {
        BaseMatrix::from_fn(
            self.q,
            self.rows + other.rows,
            self.cols + other.cols,
            |i, j| {
                if i < self.rows && j < self.cols {
                    self.get(i, j)
                } else if i >= self.rows && j >= self.cols {
                    other.get(i - self.rows, j - self.cols)
                } else {
                    0
                }
            },
        )
    }

    pub fn rref(&self) -> (BaseMatrix, Vec<usize>) {
        let q = self.q;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if p != row {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, row * m.cols + j);
                }
            }
            let inv = inv_mod(m.get(row, col), q) as u64;
            for j in col..m.cols {
                let v = ((m.get(row, j) as u64 * inv) % q as u64) as u32;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                let factor = m.get(r, col) as u64;
                if r != row && factor != 0 {
                    for j in col..m.cols {
                        let sub = (factor * m.get(row, j) as u64) % q as u64;
                        let v = ((m.get(r, j) as u64 + q as u64 - sub) % q as u64) as u32;
                        m.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Result<BaseMatrix> {
        if self.rows != self.cols {
            return Err(Error::Param("inverse of a non-square matrix".into()));
        }
        let aug = self.hstack(&BaseMatrix::identity(self.q, self.rows));
        let (r, pivots) = aug.rref();
        if pivots.len() != self.rows || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(Error::Singular(format!("{}x{} base matrix", self.rows, self.cols)));
        }
        let mut out = BaseMatrix::zeros(self.q, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, r.get(i, self.cols + j));
            }
        }
        Ok(out)
    }

    /// Basis of { x : M x = 0 }, returned as the columns of an n×d matrix.
    pub fn kernel(&self) -> BaseMatrix {
        let (r, pivots) = self.rref();
        let q = self.q;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = BaseMatrix::zeros(q, self.cols, free.len());
        for (col, &f) in free.iter().enumerate() {
            out.set(f, col, 1);
            for (i, &p) in pivots.iter().enumerate() {
                let v = r.get(i, f);
                out.set(p, col, (q - v) % q);
            }
        }
        out
    }

    /// One solution of M x = b (b a column), if consistent.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hstack(&BaseMatrix::from_fn(self.q, self.rows, 1, |i, _| b[i]));
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols);
        }
        Some(x)
    }

    /// Embed into F_{q^m} entries.
    pub fn lift(&self, field: &Field) -> ExtMatrix {
        assert_eq!(field.q(), self.q);
        ExtMatrix::from_fn(field, self.rows, self.cols, |i, j| field.embed(self.get(i, j)))
    }
}

/// m×n base matrix whose column j is the coefficient vector of x_j.
pub fn expand_to_base(x: &ExtVector) -> BaseMatrix {
    let m = x.field().m();
    BaseMatrix::from_fn(x.field().q(), m, x.len(), |i, j| x.get(j).coeffs()[i])
}

/// Rank weight ‖x‖: dimension of the F_q-span of the coordinates.
pub fn rank_weight(x: &ExtVector) -> usize {
    expand_to_base(x).rank()
}

/// Rank weight of a matrix: the column rank over F_q.
pub fn rank_weight_matrix(m: &ExtMatrix) -> usize {
    m.rank_weight()
}

/// Factor M·T = (M* | 0) with T ∈ GL_n(F_q) and ‖M*‖ = ‖M‖.
///
/// The boundary case ‖M‖ = n returns T = I so the operation is total.
pub fn rank_reduce(m: &ExtMatrix) -> (ExtMatrix, BaseMatrix) {
    let q = m.field().q();
    let n = m.cols();
    let expansion = m.expand_to_base();
    let kernel = expansion.kernel(); // n × (n - s)
    let s = n - kernel.cols();
    if s == n {
        return (m.clone(), BaseMatrix::identity(q, n));
    }
    // T = (completion | kernel basis): first s columns span a complement,
    // the rest send columns of M to zero.
    let mut cols: Vec<Vec<u32>> = Vec::with_capacity(n);
    // greedy completion by standard basis vectors in front of the kernel
    let mut chosen: Vec<Vec<u32>> = Vec::new();
    let kernel_cols: Vec<Vec<u32>> = (0..kernel.cols()).map(|j| kernel.column(j)).collect();
    for e in 0..n {
        if chosen.len() == s {
            break;
        }
        let mut cand = vec![0u32; n];
        cand[e] = 1;
        let mut test = chosen.clone();
        test.push(cand.clone());
        test.extend(kernel_cols.iter().cloned());
        let tm = BaseMatrix::from_fn(q, n, test.len(), |i, j| test[j][i]);
        if tm.rank() == test.len() {
            chosen.push(cand);
        }
    }
    assert_eq!(chosen.len(), s);
    cols.extend(chosen);
    cols.extend(kernel_cols);
    let t = BaseMatrix::from_fn(q, n, n, |i, j| cols[j][i]);
    let reduced = m.mul_base(&t);
    let m_star = reduced.columns(0..s);
    (m_star, t)
}

/// F_q-basis of { x ∈ F_q^n : Σ v_i x_i = 0 }, as columns of an n×d matrix.
pub fn fq_kernel(v: &ExtVector) -> BaseMatrix {
    expand_to_base(v).kernel()
}

/// Complete independent F_q-columns to an invertible n×n matrix (greedy, with
/// standard basis vectors appended after the inputs).
pub fn complete_to_invertible(cols: &BaseMatrix, n: usize) -> Result<BaseMatrix> {
    let q = cols.q();
    assert_eq!(cols.rows(), n);
    if cols.rank() != cols.cols() {
        return Err(Error::Param("input columns are F_q-dependent".into()));
    }
    let mut chosen: Vec<Vec<u32>> = (0..cols.cols()).map(|j| cols.column(j)).collect();
    for e in 0..n {
        if chosen.len() == n {
            break;
        }
        let mut cand = vec![0u32; n];
        cand[e] = 1;
        chosen.push(cand);
        let tm = BaseMatrix::from_fn(q, n, chosen.len(), |i, j| chosen[j][i]);
        if tm.rank() != chosen.len() {
            chosen.pop();
        }
    }
    if chosen.len() != n {
        return Err(Error::Param("could not complete to an invertible matrix".into()));
    }
    Ok(BaseMatrix::from_fn(q, n, n, |i, j| chosen[j][i]))
}

/// Inverse of the block-lower-triangular matrix ((A, 0), (C, D)).
pub fn block_lower_inverse(a: &ExtMatrix, c: &ExtMatrix, d: &ExtMatrix) -> Result<ExtMatrix> {
    let field = a.field().clone();
    let (na, nd) = (a.rows(), d.rows());
    assert_eq!(a.cols(), na);
    assert_eq!(d.cols(), nd);
    assert_eq!((c.rows(), c.cols()), (nd, na));
    let ai = a.inverse()?;
    let di = d.inverse()?;
    let lower_left = di.mul(c).mul(&ai);
    Ok(ExtMatrix::from_fn(&field, na + nd, na + nd, |i, j| {
        if i < na && j < na {
            ai.get(i, j).clone()
        } else if i >= na && j < na {
            -lower_left.get(i - na, j)
        } else if i >= na && j >= na {
            di.get(i - na, j - na).clone()
        } else {
            field.zero()
        }
    }))
}

/// Uniform g ∈ F_{q^m}^n with ‖g‖ = n, by rejection.
pub fn sample_full_rank_vector<R: Rng + ?Sized>(
    field: &Field,
    n: usize,
    rng: &mut R,
) -> Result<ExtVector> {
    if n > field.m() {
        return Err(Error::Param(format!(
            "rank weight n = {n} cannot exceed m = {}",
            field.m()
        )));
    }
    for _ in 0..MAX_SAMPLING_TRIES {
        let v = ExtVector::new(
            field.clone(),
            (0..n).map(|_| field.random(rng)).collect(),
        );
        if rank_weight(&v) == n {
            return Ok(v);
        }
    }
    Err(Error::Sampling(MAX_SAMPLING_TRIES))
}

/// k×n matrix with rank weight exactly r, built as (k×r full-weight over
/// F_{q^m}) × (r×n full-rank over F_q).
pub fn sample_rank_bounded_matrix<R: Rng + ?Sized>(
    field: &Field,
    k: usize,
    n: usize,
    r: usize,
    rng: &mut R,
) -> Result<ExtMatrix> {
    if r > n || r > k * field.m() {
        return Err(Error::Param(format!(
            "rank {r} infeasible for a {k}x{n} matrix over F_{{{}^{}}}",
            field.q(),
            field.m()
        )));
    }
    if r == 0 {
        return Ok(ExtMatrix::zeros(field, k, n));
    }
    for _ in 0..MAX_SAMPLING_TRIES {
        let a = ExtMatrix::random(field, k, r, rng);
        if a.rank_weight() != r {
            continue;
        }
        let b = BaseMatrix::random(field.q(), r, n, rng);
        if b.rank() != r {
            continue;
        }
        return Ok(a.mul_base(&b));
    }
    Err(Error::Sampling(MAX_SAMPLING_TRIES))
}

/// Error vector of rank weight exactly r.
pub fn sample_rank_vector<R: Rng + ?Sized>(
    field: &Field,
    n: usize,
    r: usize,
    rng: &mut R,
) -> Result<ExtVector> {
    let m = sample_rank_bounded_matrix(field, 1, n, r, rng)?;
    Ok(m.row(0))
}

/// Uniformly random invertible n×n matrix over F_q.
pub fn sample_gl_base<R: Rng + ?Sized>(q: u32, n: usize, rng: &mut R) -> Result<BaseMatrix> {
    for _ in 0..MAX_SAMPLING_TRIES {
        let m = BaseMatrix::random(q, n, n, rng);
        if m.rank() == n {
            return Ok(m);
        }
    }
    Err(Error::Sampling(MAX_SAMPLING_TRIES))
}

/// Uniformly random invertible n×n matrix over F_{q^m}.
pub fn sample_gl_ext<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Result<ExtMatrix> {
    for _ in 0..MAX_SAMPLING_TRIES {
        let m = ExtMatrix::random(field, n, n, rng);
        if m.rank() == n {
            return Ok(m);
        }
    }
    Err(Error::Sampling(MAX_SAMPLING_TRIES))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn gf4() -> Field {
        Field::with_modulus(2, 2, vec![1, 1, 1]).unwrap()
    }

    fn vec_of(field: &Field, encs: &[u128]) -> ExtVector {
        ExtVector::new(
            field.clone(),
            encs.iter().map(|&e| field.from_int(e).unwrap()).collect(),
        )
    }

    /// Independent rank-weight oracle: enumerate every F_q-linear combination
    /// of the coordinates; the span has q^r elements.
    fn rank_weight_oracle(x: &ExtVector) -> usize {
        let q = x.field().q();
        let n = x.len();
        let mut span = std::collections::HashSet::new();
        let total = (q as u64).pow(n as u32);
        for mut idx in 0..total {
            let mut acc = x.field().zero();
            for j in 0..n {
                let c = (idx % q as u64) as u32;
                idx /= q as u64;
                if c != 0 {
                    acc = &acc + &x.get(j).scale(c);
                }
            }
            span.insert(acc.to_int());
        }
        let mut r = 0;
        let mut sz = 1u64;
        while sz < span.len() as u64 {
            sz *= q as u64;
            r += 1;
        }
        assert_eq!(sz, span.len() as u64, "span is not a subspace?");
        r
    }

    #[test]
    fn expand_examples() {
        let f = gf4();
        let z = ExtVector::zero(&f, 3);
        let e = expand_to_base(&z);
        assert_eq!((e.rows(), e.cols()), (2, 3));
        assert!((0..2).all(|i| (0..3).all(|j| e.get(i, j) == 0)));

        let v = vec_of(&f, &[1, 2]); // (1, ω)
        let e = expand_to_base(&v);
        assert_eq!((e.column(0), e.column(1)), (vec![1, 0], vec![0, 1]));

        let v = vec_of(&f, &[3]); // (ω+1,)
        assert_eq!(expand_to_base(&v).column(0), vec![1, 1]);
    }

    #[test]
    fn rank_weight_examples() {
        let f = gf4();
        assert_eq!(rank_weight(&ExtVector::zero(&f, 4)), 0);
        let ones = vec_of(&f, &[1, 1, 1, 1, 1]);
        assert_eq!(rank_weight(&ones), 1);
        let v = vec_of(&f, &[1, 2, 3]); // (1, ω, ω+1)
        assert_eq!(rank_weight_oracle(&v), 2);
        assert_eq!(rank_weight(&v), 2);
    }

    #[test]
    fn rank_weight_matrix_examples() {
        let f = gf4();
        assert_eq!(rank_weight_matrix(&ExtMatrix::zeros(&f, 2, 3)), 0);
        assert_eq!(rank_weight_matrix(&ExtMatrix::identity(&f, 3)), 3);
        let row = ExtMatrix::from_rows(vec![vec_of(&f, &[1, 2, 3])]);
        assert_eq!(rank_weight_matrix(&row), 2);
    }

    #[test]
    fn rank_reduce_cases() {
        let f = gf4();
        // zero matrix: empty M*, T = I
        let (ms, t) = rank_reduce(&ExtMatrix::zeros(&f, 2, 3));
        assert_eq!(ms.cols(), 0);
        assert_eq!(t, BaseMatrix::identity(2, 3));
        // full rank weight: identity T
        let m = ExtMatrix::identity(&f, 2);
        let (ms, t) = rank_reduce(&m);
        assert_eq!(ms, m);
        assert_eq!(t, BaseMatrix::identity(2, 2));
        // the (1, ω, ω+1) row: two columns survive
        let m = ExtMatrix::from_rows(vec![vec_of(&f, &[1, 2, 3])]);
        let (ms, t) = rank_reduce(&m);
        assert_eq!(ms.cols(), 2);
        assert_eq!(t.rank(), 3);
        let prod = m.mul_base(&t);
        assert!(prod.get(0, 2).is_zero());
        assert_eq!(prod.columns(0..2), ms);
        assert_eq!(rank_weight_matrix(&ms), 2);
    }

    #[test]
    fn rank_reduce_random() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let f = Field::new(2, 8).unwrap();
        for _ in 0..30 {
            let r = rng.random_range(0..=4usize);
            let m = sample_rank_bounded_matrix(&f, 3, 6, r, &mut rng).unwrap();
            let (ms, t) = rank_reduce(&m);
            assert_eq!(ms.cols(), r);
            assert_eq!(t.rank(), 6);
            let prod = m.mul_base(&t);
            for i in 0..3 {
                for j in r..6 {
                    assert!(prod.get(i, j).is_zero());
                }
            }
            assert_eq!(prod.columns(0..r), ms);
        }
    }

    #[test]
    fn fq_kernel_examples() {
        let f = gf4();
        assert_eq!(fq_kernel(&ExtVector::zero(&f, 3)).cols(), 3);
        // rank weight 2 = m: empty kernel needs ‖v‖ = n
        let v = vec_of(&f, &[1, 2]);
        assert_eq!(fq_kernel(&v).cols(), 0);
        // 1 + ω + (ω+1) = 0
        let v = vec_of(&f, &[1, 2, 3]);
        let k = fq_kernel(&v);
        assert_eq!(k.cols(), 1);
        assert_eq!(k.column(0), vec![1, 1, 1]);
        // basis vectors really annihilate v
        let t = BaseMatrix::from_fn(2, 3, 1, |i, _| k.get(i, 0));
        assert!(v.mul_base(&t).is_zero());
    }

    #[test]
    fn completion() {
        let empty = BaseMatrix::zeros(2, 3, 0);
        assert_eq!(complete_to_invertible(&empty, 3).unwrap(), BaseMatrix::identity(2, 3));
        let e1 = BaseMatrix::from_fn(2, 3, 1, |i, _| u32::from(i == 0));
        let t = complete_to_invertible(&e1, 3).unwrap();
        assert_eq!(t.rank(), 3);
        let ones = BaseMatrix::from_fn(2, 3, 1, |_, _| 1);
        let t = complete_to_invertible(&ones, 3).unwrap();
        assert_eq!(t.rank(), 3);
        assert_eq!(t.column(0), vec![1, 1, 1]);
        // dependent inputs are rejected
        let dep = BaseMatrix::from_fn(2, 3, 2, |_, _| 1);
        assert!(complete_to_invertible(&dep, 3).is_err());
    }

    #[test]
    fn block_inverse() {
        let f = gf4();
        let i2 = ExtMatrix::identity(&f, 2);
        let z = ExtMatrix::zeros(&f, 2, 2);
        let p = block_lower_inverse(&i2, &z, &i2).unwrap();
        assert_eq!(p, ExtMatrix::identity(&f, 4));

        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = sample_gl_ext(&f, 2, &mut rng).unwrap();
            let d = sample_gl_ext(&f, 2, &mut rng).unwrap();
            let c = ExtMatrix::random(&f, 2, 2, &mut rng);
            let inv = block_lower_inverse(&a, &c, &d).unwrap();
            let full = ExtMatrix::from_fn(&f, 4, 4, |i, j| {
                if i < 2 && j < 2 {
                    a.get(i, j).clone()
                } else if i >= 2 && j < 2 {
                    c.get(i - 2, j).clone()
                } else if i >= 2 && j >= 2 {
                    d.get(i - 2, j - 2).clone()
                } else {
                    f.zero()
                }
            });
            assert_eq!(full.mul(&inv), ExtMatrix::identity(&f, 4));
            // agree with the generic inverse oracle
            assert_eq!(inv, full.inverse().unwrap());
        }
    }

    #[test]
    fn sampling_contracts() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let f = Field::new(2, 20).unwrap();
        let g = sample_full_rank_vector(&f, 20, &mut rng).unwrap();
        assert_eq!(rank_weight(&g), 20);
        assert!(sample_full_rank_vector(&f, 21, &mut rng).is_err());

        let f8 = Field::new(2, 8).unwrap();
        let m = sample_rank_bounded_matrix(&f8, 2, 4, 2, &mut rng).unwrap();
        assert_eq!(rank_weight_matrix(&m), 2);
        let m = sample_rank_bounded_matrix(&f8, 2, 4, 0, &mut rng).unwrap();
        assert!(m.is_zero());
        let m = sample_rank_bounded_matrix(&f8, 2, 4, 4, &mut rng).unwrap();
        assert_eq!(rank_weight_matrix(&m), 4);
        assert!(sample_rank_bounded_matrix(&f8, 2, 4, 5, &mut rng).is_err());

        let g1 = sample_gl_base(2, 1, &mut rng).unwrap();
        assert_eq!(g1.get(0, 0), 1);
        let g = sample_gl_base(2, 12, &mut rng).unwrap();
        assert_eq!(g.rank(), 12);
        let ge = sample_gl_ext(&f8, 5, &mut rng).unwrap();
        assert_eq!(ge.rank(), 5);
    }

    #[test]
    fn gl_acceptance_rate_matches_formula() {
        // fraction of invertible 20x20 F_2 matrices ≈ Π_{i=1..20} (1 - 2^{-i})
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let n = 20;
        let trials = 2000;
        let mut ok = 0;
        for _ in 0..trials {
            if BaseMatrix::random(2, n, n, &mut rng).rank() == n {
                ok += 1;
            }
        }
        let expected: f64 = (1..=n as i32).map(|i| 1.0 - 2f64.powi(-i)).product();
        let observed = ok as f64 / trials as f64;
        assert!(
            (observed - expected).abs() < 0.04,
            "observed {observed}, expected {expected}"
        );
    }

    #[test]
    fn full_rank_vector_acceptance_rate() {
        // q=2, m=n=20: acceptance ≈ Π_{i=1..20}(1 - 2^{i-1-20})
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        let f = Field::new(2, 20).unwrap();
        let trials = 1500;
        let mut ok = 0;
        for _ in 0..trials {
            let v = ExtVector::new(f.clone(), (0..20).map(|_| f.random(&mut rng)).collect());
            if rank_weight(&v) == 20 {
                ok += 1;
            }
        }
        let expected: f64 = (0..20).map(|i| 1.0 - 2f64.powi(i - 20)).product();
        let observed = ok as f64 / trials as f64;
        assert!(
            (observed - expected).abs() < 0.05,
            "observed {observed}, expected {expected}"
        );
    }

    #[test]
    fn rank_weight_isometry_and_bounds() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let f = Field::new(2, 8).unwrap();
        for _ in 0..300 {
            let x = ExtVector::new(f.clone(), (0..6).map(|_| f.random(&mut rng)).collect());
            let y = ExtVector::new(f.clone(), (0..6).map(|_| f.random(&mut rng)).collect());
            let t = sample_gl_base(2, 6, &mut rng).unwrap();
            // isometry under GL_n(F_q)
            assert_eq!(rank_weight(&x.mul_base(&t)), rank_weight(&x));
            // subadditivity
            assert!(rank_weight(&x.add(&y)) <= rank_weight(&x) + rank_weight(&y));
        }
    }

    #[test]
    fn codeword_rank_bounded_by_matrix_rank_weight() {
        // ‖m·M‖ ≤ ‖M‖ over 10^3 samples
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let f = Field::new(2, 8).unwrap();
        for _ in 0..1000 {
            let r = rng.random_range(0..=4usize);
            let m = sample_rank_bounded_matrix(&f, 3, 6, r, &mut rng).unwrap();
            let v = ExtVector::new(f.clone(), (0..3).map(|_| f.random(&mut rng)).collect());
            assert!(rank_weight(&v.mul_ext(&m)) <= r);
        }
    }

    #[test]
    fn matrix_frobenius_multiplicative() {
        // (A·B)^{[i]} = A^{[i]}·B^{[i]}
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let f = Field::new(2, 6).unwrap();
        for _ in 0..50 {
            let a = ExtMatrix::random(&f, 3, 4, &mut rng);
            let b = ExtMatrix::random(&f, 4, 2, &mut rng);
            let i = rng.random_range(0..12i64);
            assert_eq!(a.mul(&b).frobenius(i), a.frobenius(i).mul(&b.frobenius(i)));
        }
    }

    #[test]
    fn solve_and_kernels() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let f = Field::new(2, 6).unwrap();
        for _ in 0..40 {
            let m = ExtMatrix::random(&f, 3, 5, &mut rng);
            let x = ExtVector::new(f.clone(), (0..3).map(|_| f.random(&mut rng)).collect());
            let y = x.mul_ext(&m);
            let sol = m.solve_left(&y).unwrap();
            assert_eq!(sol.mul_ext(&m), y);
            // right kernel rows annihilate
            let k = m.right_kernel();
            assert_eq!(k.rows() + m.rank(), 5);
            for i in 0..k.rows() {
                let kr = k.row(i);
                for r in 0..3 {
                    assert!(m.row(r).dot(&kr).is_zero());
                }
            }
        }
    }

    #[test]
    fn row_space_equality() {
        let mut rng = ChaCha12Rng::seed_from_u64(14);
        let f = Field::new(2, 6).unwrap();
        let m = ExtMatrix::random(&f, 3, 5, &mut rng);
        let s = sample_gl_ext(&f, 3, &mut rng).unwrap();
        assert!(m.row_space_eq(&s.mul(&m)));
        let other = ExtMatrix::random(&f, 3, 5, &mut rng);
        assert!(!m.row_space_eq(&other) || m.rref().0 == other.rref().0);
    }

    proptest::proptest! {
        #[test]
        fn rank_weight_invariant_under_nonzero_scaling(
            encs in proptest::collection::vec(0u128..(1u128 << 10), 8),
            scalar in 1u128..(1u128 << 10),
        ) {
            let f = Field::new(2, 10).unwrap();
            let v = ExtVector::new(
                f.clone(),
                encs.iter().map(|&e| f.from_int(e).unwrap()).collect(),
            );
            let alpha = f.from_int(scalar).unwrap();
            proptest::prop_assert_eq!(rank_weight(&v.scale(&alpha)), rank_weight(&v));
        }
    }
}
