//! Clebsch-Gordan isometries for the coproduct
//! `Delta(e) = e (x) 1 + k (x) e`, `Delta(f) = 1 (x) f + f (x) k^-1`.

use std::collections::BTreeMap;

use rug::Float;

use super::rep::SpinRep;
use super::spin::Spin;
use crate::error::{Error, Result};
use crate::qcore::linalg::{fix_phase_first, normalize, nullspace};
use crate::qcore::{CMatrix, Complex, QContext};

/// `H_n (x) H_m = sum_K W_K H_K`, tensor index `(a, b) -> a * dim(m) + b`.
#[derive(Clone, Debug)]
pub struct CgDecomposition {
    pub n: Spin,
    pub m: Spin,
    pub blocks: BTreeMap<Spin, CMatrix>,
}

/// Tensor vector stored as a `dim(n) x dim(m)` matrix `V`, so that
/// `(X (x) Y) vec(V) = X V Y^T`.
fn as_matrix(v: &[Complex], dn: usize, dm: usize, prec: u32) -> CMatrix {
    CMatrix::from_fn(dn, dm, prec, |a, b| v[a * dm + b].clone())
}

fn as_vector(m: &CMatrix) -> Vec<Complex> {
    m.entries().to_vec()
}

pub(crate) fn delta_e(rn: &SpinRep, rm: &SpinRep, v: &[Complex]) -> Vec<Complex> {
    let vm = as_matrix(v, rn.dim(), rm.dim(), rn.prec());
    let t = rn.e.matmul(&vm).add(&rn.k.matmul(&vm).matmul(&rm.e.transpose()));
    as_vector(&t)
}

pub(crate) fn delta_f(rn: &SpinRep, rm: &SpinRep, v: &[Complex]) -> Vec<Complex> {
    let vm = as_matrix(v, rn.dim(), rm.dim(), rn.prec());
    let t = vm.matmul(&rm.f.transpose()).add(&rn.f.matmul(&vm).matmul(&rm.kinv.transpose()));
    as_vector(&t)
}

pub(crate) fn delta_k(rn: &SpinRep, rm: &SpinRep, v: &[Complex]) -> Vec<Complex> {
    let vm = as_matrix(v, rn.dim(), rm.dim(), rn.prec());
    as_vector(&rn.k.matmul(&vm).matmul(&rm.k.transpose()))
}

pub fn cg_decompose(rn: &SpinRep, rm: &SpinRep, ctx: &QContext) -> Result<CgDecomposition> {
    let bits = ctx.bits();
    let (dn, dm) = (rn.dim(), rm.dim());
    let total = dn * dm;
    let wn: Vec<i64> = rn.spin.twice_weights().collect();
    let wm: Vec<i64> = rm.spin.twice_weights().collect();
    let tol = ctx.prec().tol_rank();
    let mut blocks = BTreeMap::new();
    for kspin in Spin::tensor_range(rn.spin, rm.spin) {
        let k2 = kspin.twice() as i64;
        let idx: Vec<usize> = (0..total).filter(|&j| wn[j / dm] + wm[j % dm] == k2).collect();
        let cols: Vec<Vec<Complex>> = idx
            .iter()
            .map(|&j| {
                let mut unit = vec![Complex::zero(bits); total];
                unit[j] = Complex::one(bits);
                delta_e(rn, rm, &unit)
            })
            .collect();
        let sub = CMatrix::from_columns(&cols, total, bits);
        let ns = nullspace(&sub, tol);
        if ns.len() != 1 {
            return Err(Error::Structural(format!(
                "highest-weight space of spin {kspin} in {} (x) {} has dimension {}",
                rn.spin,
                rm.spin,
                ns.len()
            )));
        }
        let mut top = vec![Complex::zero(bits); total];
        for (c, &j) in idx.iter().enumerate() {
            top[j] = ns[0][c].clone();
        }
        let mut top = normalize(&top)?;
        fix_phase_first(&mut top, ctx.prec().tol_residual());

        let dk = kspin.dim();
        let kw: Vec<i64> = kspin.twice_weights().collect();
        let mut w = CMatrix::zeros(total, dk, bits);
        w.set_column(dk - 1, &top);
        let mut cur = top;
        for c in (1..dk).rev() {
            let m = kw[c];
            // q^{-i} ([K+i][K-i+1])^{1/2}
            let r = Float::with_val(bits, ctx.square_bracket_half(k2 + m) * ctx.square_bracket_half(k2 - m + 2));
            let coef = Float::with_val(bits, ctx.qpow_half(-m) * r.sqrt());
            let inv = Float::with_val(bits, coef.recip_ref());
            cur = delta_f(rn, rm, &cur).iter().map(|x| x.scale(&inv)).collect();
            w.set_column(c - 1, &cur);
        }
        blocks.insert(kspin, w);
    }
    Ok(CgDecomposition { n: rn.spin, m: rm.spin, blocks })
}

impl CgDecomposition {
    /// Max over blocks of `|W^dagger W - 1|_F`.
    pub fn isometry_residual(&self) -> Float {
        let mut worst = Float::new(64);
        for w in self.blocks.values() {
            let id = CMatrix::identity(w.cols(), w.prec());
            worst = worst.max(&w.adjoint().matmul(w).distance(&id));
        }
        worst
    }

    /// `|sum_K W_K W_K^dagger - 1|_F`.
    pub fn completeness_residual(&self) -> Float {
        let mut it = self.blocks.values();
        let first = it.next().expect("at least one block");
        let mut acc = first.matmul(&first.adjoint());
        for w in it {
            acc.add_assign(&w.matmul(&w.adjoint()));
        }
        acc.distance(&CMatrix::identity(acc.rows(), acc.prec()))
    }

    /// Max over blocks and generators of `|Delta(g) W - W pi_K(g)|_F`.
    pub fn intertwining_residual(&self, rn: &SpinRep, rm: &SpinRep, ctx: &QContext) -> Float {
        let mut worst = Float::new(64);
        for (&kspin, w) in &self.blocks {
            let rk = SpinRep::new(kspin, ctx);
            let apply = |f: &dyn Fn(&[Complex]) -> Vec<Complex>| {
                let cols: Vec<Vec<Complex>> = (0..w.cols()).map(|j| f(&w.column(j))).collect();
                CMatrix::from_columns(&cols, w.rows(), w.prec())
            };
            let pairs = [
                (apply(&|v| delta_k(rn, rm, v)), w.matmul(&rk.k)),
                (apply(&|v| delta_e(rn, rm, v)), w.matmul(&rk.e)),
                (apply(&|v| delta_f(rn, rm, v)), w.matmul(&rk.f)),
            ];
            for (lhs, rhs) in pairs {
                worst = worst.max(&lhs.distance(&rhs));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> QContext {
        QContext::parse("0.5", "0.3", 256).unwrap()
    }

    fn check(n: u32, m: u32, c: &QContext) -> CgDecomposition {
        let rn = SpinRep::new(Spin::from_twice(n), c);
        let rm = SpinRep::new(Spin::from_twice(m), c);
        let cg = cg_decompose(&rn, &rm, c).unwrap();
        let tol = c.prec().tol_residual();
        assert!(cg.isometry_residual() < *tol, "isometry {n}/2 x {m}/2");
        assert!(cg.completeness_residual() < *tol, "completeness {n}/2 x {m}/2");
        assert!(cg.intertwining_residual(&rn, &rm, c) < *tol, "intertwining {n}/2 x {m}/2");
        cg
    }

    #[test]
    fn trivial_factor_is_identity() {
        let c = ctx();
        let cg = check(0, 3, &c);
        assert_eq!(cg.blocks.len(), 1);
        let w = &cg.blocks[&Spin::from_twice(3)];
        assert!(w.distance(&CMatrix::identity(4, 256)) < *c.prec().tol_residual());
    }

    #[test]
    fn half_times_half() {
        let c = ctx();
        let cg = check(1, 1, &c);
        let dims: usize = cg.blocks.keys().map(|s| s.dim()).sum();
        assert_eq!(dims, 4);
        assert_eq!(cg.blocks.keys().map(|s| s.twice()).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn all_pairs_up_to_three() {
        let c = ctx();
        for n in 0..=6 {
            for m in 0..=6 {
                check(n, m, &c);
            }
        }
    }
}
