//! The sesquilinear form of the generating functional, its Gram matrices and
//! the truncated GNS space.

use std::sync::Arc;

use rayon::prelude::*;
use rug::Float;

use crate::error::{Error, Result};
use crate::genfun::GenFunctional;
use crate::oqalg::{AlgElement, PodlesBasisIndex};
use crate::qcore::linalg::{kron_vec, vconj, vdot};
use crate::qcore::{eigh, CMatrix, Complex};
use crate::uqrep::{Convention, QModel, Spin};

/// A coideal basis element `u^n_{v,w}` kept in rank-one form.
#[derive(Clone, Debug)]
pub struct BasisElement {
    pub index: PodlesBasisIndex,
    pub spin: Spin,
    pub v: Vec<Complex>,
    pub w: Vec<Complex>,
}

impl BasisElement {
    pub fn element(&self) -> AlgElement {
        AlgElement::matrix_coeff(self.spin, &self.v, &self.w)
    }

    pub fn counit(&self) -> Complex {
        vdot(&self.v, &self.w)
    }
}

/// Coideal basis of all degrees `0..=n_max`, rank-one form.
pub fn coideal_elements(n_max: u32, convention: Convention, model: &QModel) -> Result<Vec<BasisElement>> {
    let mut out = Vec::new();
    for n in 0..=n_max {
        let spin = Spin::integer(n);
        let basis = model.basis(spin, convention)?;
        let sph = basis.spherical_vector().to_vec();
        for (i, eta) in basis.vectors.iter().enumerate() {
            let (v, w) = match convention {
                Convention::Right => (sph.clone(), eta.clone()),
                Convention::Left => (eta.clone(), sph.clone()),
            };
            let index = PodlesBasisIndex {
                n,
                i,
                convention,
                is_spherical: i == basis.spherical,
                label: basis.values.as_ref().map(|vals| vals[i].clone()),
                source: basis.source,
            };
            out.push(BasisElement { index, spin, v, w });
        }
    }
    Ok(out)
}

/// Evaluates `L` on products of rank-one coefficients without forming the
/// product: `L(u^n_{p,q} u^m_{a,b}) = sum_K lambda_K conj(<W_K eta_K, p (x) a>) <W_K eta_K, q (x) b>`.
pub struct LForm<'a> {
    pub model: &'a QModel,
    pub functional: &'a GenFunctional,
}

impl<'a> LForm<'a> {
    pub fn new(model: &'a QModel, functional: &'a GenFunctional) -> Self {
        Self { model, functional }
    }

    fn lifted_spherical(&self, n: Spin, m: Spin) -> Result<Vec<(u32, Vec<Complex>)>> {
        let cg = self.model.cg(n, m)?;
        let mut out = Vec::new();
        for (k, w) in &cg.blocks {
            let Some(kn) = k.as_integer() else { continue };
            if kn == 0 {
                continue;
            }
            if kn > self.functional.n_max() {
                return Err(Error::Domain(format!(
                    "product reaches degree {kn}, beyond the functional's n_max {}",
                    self.functional.n_max()
                )));
            }
            let eta = self.model.basis(*k, self.functional.convention)?.spherical_vector().to_vec();
            out.push((kn, w.matvec(&eta)));
        }
        Ok(out)
    }

    pub fn product(
        &self,
        n: Spin,
        (p, q): (&[Complex], &[Complex]),
        m: Spin,
        (a, b): (&[Complex], &[Complex]),
    ) -> Result<Complex> {
        let bits = self.model.bits();
        let pa = kron_vec(p, a);
        let qb = kron_vec(q, b);
        let mut out = Complex::zero(bits);
        for (k, z) in self.lifted_spherical(n, m)? {
            let left = vdot(&z, &pa).conj();
            let right = vdot(&z, &qb);
            out += &(&left * &right).scale(self.functional.lambda(k));
        }
        Ok(out)
    }

    /// Slot vectors of `u_{v,w}^*`: `(conj(G^T v), G^-1 conj(w))`.
    pub fn star_slots(&self, spin: Spin, v: &[Complex], w: &[Complex]) -> Result<(Vec<Complex>, Vec<Complex>)> {
        let g = self.model.star(spin)?;
        Ok((vconj(&g.g.transpose().matvec(v)), g.g_inv.matvec(&vconj(w))))
    }

    /// `L(u_{v,w})` for a single rank-one element.
    pub fn single(&self, spin: Spin, v: &[Complex], w: &[Complex]) -> Result<Complex> {
        let one = [Complex::one(self.model.bits())];
        self.product(spin, (v, w), Spin::ZERO, (&one, &one))
    }

    /// `<x, y>_L = L((x - eps(x))^* (y - eps(y)))` on rank-one elements.
    pub fn form(&self, x: &BasisElement, y: &BasisElement) -> Result<Complex> {
        let (vs, ws) = self.star_slots(x.spin, &x.v, &x.w)?;
        let xy = self.product(x.spin, (&vs, &ws), y.spin, (&y.v, &y.w))?;
        let lx_star = self.single(x.spin, &vs, &ws)?;
        let ly = self.single(y.spin, &y.v, &y.w)?;
        let ex = x.counit().conj();
        let ey = y.counit();
        Ok(&(&xy - &(&ex * &ly)) - &(&ey * &lx_star))
    }
}

/// `<x, y>_L` for general coideal elements through full products.
pub fn form_general(x: &AlgElement, y: &AlgElement, model: &QModel, f: &GenFunctional) -> Result<Complex> {
    let xc = x.sub(&AlgElement::scalar(x.counit()));
    let yc = y.sub(&AlgElement::scalar(y.counit()));
    f.apply(&xc.star(model)?.mul(&yc, model)?, model)
}

/// Gram matrix of `elements` under the `L` form, assembled in parallel with
/// a fixed output order.
pub fn gram_matrix(elements: &[BasisElement], model: &QModel, f: &GenFunctional) -> Result<CMatrix> {
    let m = elements.len();
    let form = LForm::new(model, f);
    let entries: Vec<Result<Complex>> = (0..m * m)
        .into_par_iter()
        .map(|k| form.form(&elements[k / m], &elements[k % m]))
        .collect();
    let mut g = CMatrix::zeros(m, m, model.bits());
    for (k, e) in entries.into_iter().enumerate() {
        g[(k / m, k % m)] = e?;
    }
    Ok(g)
}

/// Truncated GNS space over the coideal basis of degrees `0..=n`.
#[derive(Clone, Debug)]
pub struct GnsSpace {
    pub n: u32,
    pub convention: Convention,
    pub elements: Vec<BasisElement>,
    pub gram: CMatrix,
    pub hermitian_defect: Float,
    /// Ascending spectrum of the Gram matrix.
    pub eigenvalues: Vec<Float>,
    pub rank: usize,
    /// Largest eigenvalue treated as zero and smallest kept, for gap reporting.
    pub gap: (Float, Float),
    /// `r x M` map from basis coordinates to orthonormal coordinates,
    /// `T = Lambda^{1/2} U^dagger` on the kept eigenpairs.
    pub to_orthonormal: CMatrix,
    /// `M x r` right inverse `U Lambda^{-1/2}`.
    pub from_orthonormal: CMatrix,
    pub functional: Arc<GenFunctional>,
}

impl GnsSpace {
    pub fn build(n: u32, functional: Arc<GenFunctional>, model: &QModel) -> Result<GnsSpace> {
        if functional.n_max() < 2 * n {
            return Err(Error::Domain(format!("Gram up to degree {n} needs the functional up to {}", 2 * n)));
        }
        let bits = model.bits();
        let convention = functional.convention;
        let elements = coideal_elements(n, convention, model)?;
        let gram = gram_matrix(&elements, model, &functional)?;
        let hermitian_defect = gram.hermitian_defect();
        let e = eigh(&gram)?;
        let tol = model.ctx().prec().tol_rank();
        let min = e.values[0].clone();
        let neg_tol = Float::with_val(bits, -tol);
        if min < neg_tol {
            return Err(Error::Falsification(format!(
                "Gram matrix up to degree {n} ({convention}) has eigenvalue {} below -tol_rank",
                min.to_f64()
            )));
        }
        let kept: Vec<usize> = (0..e.values.len()).filter(|&j| e.values[j] > *tol).collect();
        let rank = kept.len();
        let zero_max = e.values.iter().filter(|v| **v <= *tol).max_by(|a, b| a.partial_cmp(b).unwrap());
        let gap = (
            zero_max.cloned().unwrap_or_else(|| Float::new(bits)),
            kept.first().map(|&j| e.values[j].clone()).unwrap_or_else(|| Float::new(bits)),
        );
        let m = elements.len();
        let to_orthonormal = CMatrix::from_fn(rank, m, bits, |r, i| {
            let s = Float::with_val(bits, e.values[kept[r]].sqrt_ref());
            e.vectors[(i, kept[r])].conj().scale(&s)
        });
        let from_orthonormal = CMatrix::from_fn(m, rank, bits, |i, r| {
            let s = Float::with_val(bits, e.values[kept[r]].sqrt_ref()).recip();
            e.vectors[(i, kept[r])].scale(&s)
        });
        Ok(GnsSpace {
            n,
            convention,
            elements,
            gram,
            hermitian_defect,
            eigenvalues: e.values,
            rank,
            gap,
            to_orthonormal,
            from_orthonormal,
            functional,
        })
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn min_eigenvalue(&self) -> &Float {
        &self.eigenvalues[0]
    }

    /// Coordinates of `x` in the coideal basis; errors when `x` is not in the
    /// truncated span.
    pub fn coordinates(&self, x: &AlgElement, model: &QModel) -> Result<Vec<Complex>> {
        let bits = model.bits();
        let mut c = vec![Complex::zero(bits); self.dim()];
        let mut rebuilt = AlgElement::zero(bits);
        for (i, e) in self.elements.iter().enumerate() {
            if let Some(f) = x.block(e.spin) {
                // coefficient of u_{v,w} for orthonormal slot vectors
                let coeff = coefficient(f, &e.v, &e.w);
                rebuilt = rebuilt.add(&e.element().scale(&coeff));
                c[i] = coeff;
            }
        }
        let miss = x.distance(&rebuilt);
        if miss > *model.ctx().prec().tol_rank() {
            return Err(Error::Domain(format!(
                "element is outside the degree-{} coideal span (residual {})",
                self.n,
                miss.to_f64()
            )));
        }
        Ok(c)
    }

    /// `C_L(x)` in orthonormal coordinates.
    pub fn cocycle_vector(&self, x: &AlgElement, model: &QModel) -> Result<Vec<Complex>> {
        Ok(self.to_orthonormal.matvec(&self.coordinates(x, model)?))
    }

    /// `<x, y>_L` from basis coordinates.
    pub fn form_from_coordinates(&self, cx: &[Complex], cy: &[Complex]) -> Complex {
        let gy = self.gram.matvec(cy);
        vdot(cx, &gy)
    }

    /// Matrix of `pi_L(b)` from the image of the degree-`<= domain` part into
    /// this space, in orthonormal coordinates:
    /// `pi_L(b) C_L(y) = C_L(b y) - C_L(b) eps(y)`.
    pub fn pi_l(&self, b: &AlgElement, domain: u32, model: &QModel) -> Result<CMatrix> {
        let bits = model.bits();
        let deg_b = b.degree().map_or(0, |s| s.twice().div_ceil(2));
        if deg_b + domain > self.n {
            return Err(Error::Domain(format!(
                "pi_L of a degree-{deg_b} element on degree {domain} exceeds the truncation {}",
                self.n
            )));
        }
        let cb = self.coordinates(b, model)?;
        let m = self.dim();
        let dom: Vec<usize> = (0..m).filter(|&i| self.elements[i].index.n <= domain).collect();
        let mut cols = Vec::with_capacity(dom.len());
        for &i in &dom {
            let e = &self.elements[i];
            let by = b.mul(&e.element(), model)?;
            let mut c = self.coordinates(&by, model)?;
            let eps = e.counit();
            for (ci, bi) in c.iter_mut().zip(&cb) {
                *ci -= &(bi * &eps);
            }
            cols.push(c);
        }
        let p = CMatrix::from_columns(&cols, m, bits);
        let (basis, preimage) = self.subspace_image(&dom, model)?;
        Ok(self.to_orthonormal.matmul(&p).matmul(&preimage).matmul(&basis.adjoint()))
    }

    /// Orthonormal basis `B` (`r x k`) of the image of the basis elements
    /// `indices`, with coordinates `X` (`|indices| x k`) such that
    /// `T[:, indices] X = B`.
    pub fn subspace_image(&self, indices: &[usize], model: &QModel) -> Result<(CMatrix, CMatrix)> {
        let bits = model.bits();
        let tol = model.ctx().prec().tol_rank();
        let e = eigh(&self.gram.submatrix(indices, indices))?;
        let kept: Vec<usize> = (0..e.values.len()).filter(|&j| e.values[j] > *tol).collect();
        let preimage = CMatrix::from_fn(indices.len(), kept.len(), bits, |r, c| {
            let s = Float::with_val(bits, e.values[kept[c]].sqrt_ref()).recip();
            e.vectors[(r, kept[c])].scale(&s)
        });
        let t = CMatrix::from_fn(self.rank, indices.len(), bits, |r, c| self.to_orthonormal[(r, indices[c])].clone());
        Ok((t.matmul(&preimage), preimage))
    }
}

/// `v^T F conj(w)`-type extraction: coefficient of `u_{v,w}` in `F` when both
/// slots are unit vectors of orthonormal slot bases.
pub fn coefficient(f: &CMatrix, v: &[Complex], w: &[Complex]) -> Complex {
    let d = v.len();
    let mut out = Complex::zero(f.prec());
    for i in 0..d {
        let mut row = Complex::zero(f.prec());
        for j in 0..d {
            row.mul_add_assign(&f[(i, j)], &w[j].conj());
        }
        out.mul_add_assign(&v[i], &row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfun::{build_functional, LimitMode};
    use crate::qcore::QContext;
    use crate::uqrep::BtForm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(conv: Convention, n_max: u32) -> (QModel, Arc<GenFunctional>) {
        let m = QModel::new(QContext::parse("0.5", "0.3", 256).unwrap(), BtForm::Canonical);
        let f = build_functional(m.ctx(), n_max, LimitMode::Derivative, conv).unwrap();
        (m, Arc::new(f))
    }

    #[test]
    fn fast_form_matches_full_products() {
        for conv in [Convention::Right, Convention::Left] {
            let (m, f) = setup(conv, 4);
            let els = coideal_elements(2, conv, &m).unwrap();
            let lf = LForm::new(&m, &f);
            for x in els.iter().step_by(2) {
                for y in &els {
                    let fast = lf.form(x, y).unwrap();
                    let slow = form_general(&x.element(), &y.element(), &m, &f).unwrap();
                    assert!((&fast - &slow).abs() < *m.ctx().prec().tol_residual(), "{conv}");
                }
            }
        }
    }

    #[test]
    fn gram_is_hermitian_psd_with_zero_unit_row() {
        for conv in [Convention::Right, Convention::Left] {
            let (m, f) = setup(conv, 4);
            let s = GnsSpace::build(2, f, &m).unwrap();
            assert_eq!(s.dim(), 9);
            assert!(s.hermitian_defect < *m.ctx().prec().tol_residual());
            assert!(*s.min_eigenvalue() > -m.ctx().prec().tol_rank().clone());
            for j in 0..s.dim() {
                assert!(s.gram[(0, j)].is_zero());
            }
            assert_eq!(s.rank, 4, "{conv}");
        }
    }

    #[test]
    fn gram_needs_twice_the_degree() {
        let (m, f) = setup(Convention::Right, 3);
        assert!(matches!(GnsSpace::build(2, f, &m), Err(Error::Domain(_))));
    }

    #[test]
    fn cocycle_vectors() {
        let (m, f) = setup(Convention::Right, 4);
        let s = GnsSpace::build(2, f.clone(), &m).unwrap();
        let tol = m.ctx().prec().tol_rank();
        assert!(s.cocycle_vector(&AlgElement::unit(256), &m).unwrap().iter().all(|c| c.abs() < *tol));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut x = AlgElement::zero(256);
        for e in &s.elements {
            let c = Complex::from_f64(256, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            x = x.add(&e.element().scale(&c));
        }
        let cx = s.cocycle_vector(&x, &m).unwrap();
        let norm2 = Float::with_val(256, crate::qcore::linalg::vnorm(&cx).square_ref());
        let direct = form_general(&x, &x, &m, &f).unwrap();
        assert!(Float::with_val(256, &norm2 - &direct.re).abs() < *tol);
        let outside = AlgElement::basis_coeff(Spin::integer(1), 0, 0, 256);
        assert!(s.cocycle_vector(&outside, &m).is_err());
    }

    #[test]
    fn pi_l_satisfies_the_cocycle_identity() {
        let (m, f) = setup(Convention::Right, 6);
        let s = GnsSpace::build(3, f, &m).unwrap();
        let tol = m.ctx().prec().tol_rank();
        let id = s.pi_l(&AlgElement::unit(256), 2, &m).unwrap();
        for e in s.elements.iter().filter(|e| e.index.n <= 2) {
            let c = s.cocycle_vector(&e.element(), &m).unwrap();
            let d = crate::qcore::linalg::vsub(&id.matvec(&c), &c);
            assert!(crate::qcore::linalg::vnorm(&d) < *tol);
        }
        let b = s.elements[2].element();
        let p = s.pi_l(&b, 2, &m).unwrap();
        let cb = s.cocycle_vector(&b, &m).unwrap();
        for e in s.elements.iter().filter(|e| e.index.n <= 2) {
            let y = e.element();
            let lhs = s.cocycle_vector(&b.mul(&y, &m).unwrap(), &m).unwrap();
            let cy = s.cocycle_vector(&y, &m).unwrap();
            let eps = e.counit();
            let rhs: Vec<Complex> = p.matvec(&cy).iter().zip(&cb).map(|(a, c)| a + &(c * &eps)).collect();
            assert!(crate::qcore::linalg::vnorm(&crate::qcore::linalg::vsub(&lhs, &rhs)) < *tol);
        }
        assert!(s.pi_l(&s.elements[5].element(), 3, &m).is_err());
    }

    #[test]
    fn pi_l_is_a_star_representation_on_samples() {
        let (m, f) = setup(Convention::Right, 6);
        let s = GnsSpace::build(3, f, &m).unwrap();
        let tol = m.ctx().prec().tol_rank();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut rand_el = |max: u32| {
            let mut x = AlgElement::zero(256);
            for e in s.elements.iter().filter(|e| e.index.n <= max) {
                let c = Complex::from_f64(256, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                x = x.add(&e.element().scale(&c));
            }
            x
        };
        for _ in 0..4 {
            let b = rand_el(1);
            let x = rand_el(2);
            let y = rand_el(2);
            let cx = s.cocycle_vector(&x, &m).unwrap();
            let cy = s.cocycle_vector(&y, &m).unwrap();
            let lhs = vdot(&cx, &s.pi_l(&b, 2, &m).unwrap().matvec(&cy));
            let rhs = vdot(&s.pi_l(&b.star(&m).unwrap(), 2, &m).unwrap().matvec(&cx), &cy);
            assert!((&lhs - &rhs).abs() < *tol);
        }
    }
}
