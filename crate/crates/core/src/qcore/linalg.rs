//! Dense complex linear algebra at arbitrary precision.
//!
//! Everything here is written for the small matrices that arise from spin
//! representations (dimension well below a hundred), so the algorithms favour
//! robustness over asymptotic speed: cyclic Jacobi for Hermitian spectra,
//! full-pivot elimination for null spaces.

use std::ops::{Index, IndexMut};

use rug::Float;

use super::scalar::Complex;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    prec: u32,
    data: Vec<Complex>,
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.cols + j]
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        Self { rows, cols, prec, data: vec![Complex::zero(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Self::zeros(n, n, prec);
        for i in 0..n {
            m[(i, i)] = Complex::one(prec);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, prec: u32, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, prec, data }
    }

    pub fn diag(entries: &[Complex], prec: u32) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len(), prec);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn real_diag(entries: &[Float], prec: u32) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len(), prec);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = Complex::from_real(Float::with_val(prec, e));
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex>], rows: usize, prec: u32) -> Self {
        Self::from_fn(rows, columns.len(), prec, |i, j| columns[j][i].clone())
    }

    /// `v w^T` (no conjugation).
    pub fn outer(v: &[Complex], w: &[Complex], prec: u32) -> Self {
        Self::from_fn(v.len(), w.len(), prec, |i, j| &v[i] * &w[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Complex> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex]) {
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = x.clone();
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.prec, |i, j| self[(j, i)].clone())
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, prec: self.prec, data: self.data.iter().map(Complex::conj).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.prec, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols, self.prec);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    out.data[i * other.cols + j].mul_add_assign(a, b);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Complex::zero(self.prec);
                for (k, x) in v.iter().enumerate() {
                    acc.mul_add_assign(&self[(i, k)], x);
                }
                acc
            })
            .collect()
    }

    /// `A^dagger v`.
    pub fn adjoint_matvec(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(self.rows, v.len(), "adjoint_matvec shape mismatch");
        (0..self.cols)
            .map(|j| {
                let mut acc = Complex::zero(self.prec);
                for (i, x) in v.iter().enumerate() {
                    acc.conj_mul_add_assign(&self[(i, j)], x);
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        CMatrix { rows: self.rows, cols: self.cols, prec: self.prec, data }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, prec: self.prec, data }
    }

    pub fn add_assign(&mut self, other: &CMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn scale(&self, c: &Complex) -> CMatrix {
        let data = self.data.iter().map(|a| a * c).collect();
        CMatrix { rows: self.rows, cols: self.cols, prec: self.prec, data }
    }

    pub fn scale_real(&self, r: &Float) -> CMatrix {
        let data = self.data.iter().map(|a| a.scale(r)).collect();
        CMatrix { rows: self.rows, cols: self.cols, prec: self.prec, data }
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (r2, c2) = (other.rows, other.cols);
        CMatrix::from_fn(self.rows * r2, self.cols * c2, self.prec, |i, j| {
            &self[(i / r2, j / c2)] * &other[(i % r2, j % c2)]
        })
    }

    pub fn trace(&self) -> Complex {
        let mut acc = Complex::zero(self.prec);
        for i in 0..self.rows.min(self.cols) {
            acc += &self[(i, i)];
        }
        acc
    }

    pub fn frobenius_norm(&self) -> Float {
        let mut acc = Float::new(self.prec);
        for a in &self.data {
            acc += a.norm_sqr();
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> Float {
        let mut m = Float::new(self.prec);
        for a in &self.data {
            let v = a.abs();
            if v > m {
                m = v;
            }
        }
        m
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &CMatrix) -> Float {
        self.sub(other).frobenius_norm()
    }

    /// Largest entry of `|A - A^dagger|`.
    pub fn hermitian_defect(&self) -> Float {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CMatrix {
        CMatrix::from_fn(rows.len(), cols.len(), self.prec, |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        if !self.is_square() {
            return Err(Error::Domain("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n, self.prec);
        let scale = self.max_abs();
        let floor = Float::with_val(self.prec, &scale >> (self.prec as i32 - 8));
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a[(x, col)].abs().partial_cmp(&a[(y, col)].abs()).unwrap())
                .unwrap();
            if a[(piv, col)].abs() <= floor {
                return Err(Error::Structural("singular matrix in inverse".into()));
            }
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let p = a[(col, col)].recip();
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] * &p;
                inv[(col, j)] = &inv[(col, j)] * &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let t = &f * &a[(col, j)];
                    a[(r, j)] -= &t;
                    let t = &f * &inv[(col, j)];
                    inv[(r, j)] -= &t;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// `sum conj(a_i) b_i`.
pub fn vdot(a: &[Complex], b: &[Complex]) -> Complex {
    let prec = a.first().or(b.first()).map_or(64, Complex::prec);
    let mut acc = Complex::zero(prec);
    for (x, y) in a.iter().zip(b) {
        acc.conj_mul_add_assign(x, y);
    }
    acc
}

pub fn vnorm(v: &[Complex]) -> Float {
    let prec = v.first().map_or(64, Complex::prec);
    let mut acc = Float::new(prec);
    for x in v {
        acc += x.norm_sqr();
    }
    acc.sqrt()
}

pub fn vscale(v: &[Complex], c: &Complex) -> Vec<Complex> {
    v.iter().map(|x| x * c).collect()
}

pub fn vsub(a: &[Complex], b: &[Complex]) -> Vec<Complex> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vconj(v: &[Complex]) -> Vec<Complex> {
    v.iter().map(Complex::conj).collect()
}

pub fn kron_vec(a: &[Complex], b: &[Complex]) -> Vec<Complex> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn normalize(v: &[Complex]) -> Result<Vec<Complex>> {
    let n = vnorm(v);
    if n.is_zero() {
        return Err(Error::Domain("cannot normalize the zero vector".into()));
    }
    let r = Float::with_val(n.prec(), n.recip_ref());
    Ok(v.iter().map(|x| x.scale(&r)).collect())
}

/// Rotates `v` so its first entry of magnitude above `tol` is real positive.
pub fn fix_phase_first(v: &mut [Complex], tol: &Float) {
    if let Some(x) = v.iter().find(|x| x.abs() > *tol) {
        let ph = x.phase().conj();
        for y in v.iter_mut() {
            *y = &*y * &ph;
        }
    }
}

/// Same as [`fix_phase_first`] but keyed on the last significant entry.
pub fn fix_phase_last(v: &mut [Complex], tol: &Float) {
    if let Some(x) = v.iter().rev().find(|x| x.abs() > *tol) {
        let ph = x.phase().conj();
        for y in v.iter_mut() {
            *y = &*y * &ph;
        }
    }
}

/// Modified Gram-Schmidt with one reorthogonalization pass; vectors whose
/// residual norm falls below `tol` are dropped.
pub fn gram_schmidt(vectors: &[Vec<Complex>], tol: &Float) -> Vec<Vec<Complex>> {
    let mut basis: Vec<Vec<Complex>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = vdot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    let t = bi * &c;
                    *wi -= &t;
                }
            }
        }
        if vnorm(&w) > *tol {
            basis.push(normalize(&w).expect("nonzero after threshold"));
        }
    }
    basis
}

/// Hermitian eigendecomposition: ascending eigenvalues and the matching
/// orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<Float>,
    pub vectors: CMatrix,
}

impl Eigh {
    pub fn vector(&self, j: usize) -> Vec<Complex> {
        self.vectors.column(j)
    }
}

/// Cyclic complex Jacobi. The input is symmetrized first, so a matrix that is
/// Hermitian only up to rounding is handled gracefully.
pub fn eigh(m: &CMatrix) -> Result<Eigh> {
    if !m.is_square() {
        return Err(Error::Domain("eigh of a non-square matrix".into()));
    }
    let n = m.rows();
    let prec = m.prec();
    let half = Float::with_val(prec, 0.5);
    let mut a = m.add(&m.adjoint()).scale_real(&half);
    for i in 0..n {
        a[(i, i)].im = Float::new(prec);
    }
    let mut v = CMatrix::identity(n, prec);
    let scale = a.frobenius_norm();
    if scale.is_zero() || n == 1 {
        return Ok(sorted(a, v));
    }
    let stop = Float::with_val(prec, &scale >> (prec as i32 - 6));

    for _sweep in 0..100 {
        let mut off = Float::new(prec);
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            return Ok(sorted(a, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let r = a[(p, q)].abs();
                if r.is_zero() {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, &r);
            }
        }
    }
    Err(Error::NeedsPrecision("Jacobi eigensolver did not converge".into()))
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, r: &Float) {
    let prec = a.prec();
    let n = a.rows();
    // a_pq = r e^{i phi}; eph = e^{-i phi}
    let eph = a[(p, q)].phase().conj();
    let tau = Float::with_val(prec, &a[(q, q)].re - &a[(p, p)].re) / Float::with_val(prec, r * 2u32);
    let root = (Float::with_val(prec, tau.square_ref()) + 1u32).sqrt();
    let t = if tau.is_sign_negative() {
        Float::with_val(prec, -1) / (Float::with_val(prec, -&tau) + &root)
    } else {
        Float::with_val(prec, 1) / (tau.clone() + &root)
    };
    let c = (Float::with_val(prec, t.square_ref()) + 1u32).sqrt().recip();
    let s = Float::with_val(prec, &t * &c);

    let cc = Complex::from_real(c.clone());
    let ss = Complex::from_real(s.clone());
    let j_qp = -(&ss * &eph);
    let j_qq = &cc * &eph;
    // A <- A J
    for k in 0..n {
        let akp = a[(k, p)].clone();
        let akq = a[(k, q)].clone();
        a[(k, p)] = &(&akp * &cc) + &(&akq * &j_qp);
        a[(k, q)] = &(&akp * &ss) + &(&akq * &j_qq);
    }
    // A <- J^dagger A
    let jd_pq = j_qp.conj();
    let jd_qq = j_qq.conj();
    for k in 0..n {
        let apk = a[(p, k)].clone();
        let aqk = a[(q, k)].clone();
        a[(p, k)] = &(&apk * &cc) + &(&aqk * &jd_pq);
        a[(q, k)] = &(&apk * &ss) + &(&aqk * &jd_qq);
    }
    a[(p, q)] = Complex::zero(prec);
    a[(q, p)] = Complex::zero(prec);
    a[(p, p)].im = Float::new(prec);
    a[(q, q)].im = Float::new(prec);
    for k in 0..n {
        let vkp = v[(k, p)].clone();
        let vkq = v[(k, q)].clone();
        v[(k, p)] = &(&vkp * &cc) + &(&vkq * &j_qp);
        v[(k, q)] = &(&vkp * &ss) + &(&vkq * &j_qq);
    }
}

fn sorted(a: CMatrix, v: CMatrix) -> Eigh {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.partial_cmp(&a[(y, y)].re).unwrap());
    let values = order.iter().map(|&i| a[(i, i)].re.clone()).collect();
    let vectors = CMatrix::from_fn(n, n, a.prec(), |i, j| v[(i, order[j])].clone());
    Eigh { values, vectors }
}

/// Singular values in descending order, from the spectrum of `A^dagger A`.
pub fn singular_values(m: &CMatrix) -> Result<Vec<Float>> {
    let g = if m.rows() >= m.cols() { m.adjoint().matmul(m) } else { m.matmul(&m.adjoint()) };
    let e = eigh(&g)?;
    let mut out: Vec<Float> = e
        .values
        .into_iter()
        .map(|x| if x.is_sign_negative() { Float::new(m.prec()) } else { x.sqrt() })
        .collect();
    out.reverse();
    Ok(out)
}

/// Null space by reduced row echelon form with full column search per step.
/// Pivots below `tol * max|A|` are treated as zero. The returned basis is
/// orthonormal.
pub fn nullspace(m: &CMatrix, tol: &Float) -> Vec<Vec<Complex>> {
    let (rows, cols) = (m.rows(), m.cols());
    let prec = m.prec();
    let mut a = m.clone();
    let thresh = Float::with_val(prec, tol * m.max_abs());
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (piv, best) = (r..rows)
            .map(|i| (i, a[(i, c)].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if best <= thresh {
            for i in r..rows {
                a[(i, c)] = Complex::zero(prec);
            }
            continue;
        }
        a.swap_rows(r, piv);
        let p = a[(r, c)].recip();
        for j in c..cols {
            a[(r, j)] = &a[(r, j)] * &p;
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..cols {
                let t = &f * &a[(r, j)];
                a[(i, j)] -= &t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let raw: Vec<Vec<Complex>> = free
        .iter()
        .map(|&fc| {
            let mut v = vec![Complex::zero(prec); cols];
            v[fc] = Complex::one(prec);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[(row, fc)].clone();
            }
            v
        })
        .collect();
    let eps = Float::with_val(prec, Float::with_val(prec, 1) >> (prec as i32 / 2));
    gram_schmidt(&raw, &eps)
}
