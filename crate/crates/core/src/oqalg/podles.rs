//! Basis of the Podles-sphere coideal and the membership test.

use rug::Float;
use serde::Serialize;

use super::element::{AlgElement, Gen, Side, Word};
use crate::error::{Error, Result};
use crate::qcore::linalg::vconj;
use crate::qcore::{CMatrix, Complex};
use crate::uqrep::{left_weight_operator, BasisSource, BtForm, Convention, QModel, Spin};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PodlesBasisIndex {
    pub n: u32,
    /// Position in the slot basis, ascending by eigenvalue when labelled.
    pub i: usize,
    pub convention: Convention,
    pub is_spherical: bool,
    #[serde(skip)]
    pub label: Option<Float>,
    pub source: BasisSource,
}

/// Right: `u^n_{eta_sph, eta_i}`. Left: `u^n_{eta_i, eta_sph}`.
pub fn podles_basis(n: u32, convention: Convention, model: &QModel) -> Result<Vec<(PodlesBasisIndex, AlgElement)>> {
    let spin = Spin::integer(n);
    let basis = model.basis(spin, convention)?;
    let sph = basis.spherical_vector();
    Ok(basis
        .vectors
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let idx = PodlesBasisIndex {
                n,
                i,
                convention,
                is_spherical: i == basis.spherical,
                label: basis.values.as_ref().map(|vals| vals[i].clone()),
                source: basis.source,
            };
            let x = match convention {
                Convention::Right => AlgElement::matrix_coeff(spin, sph, v),
                Convention::Left => AlgElement::matrix_coeff(spin, v, sph),
            };
            (idx, x)
        })
        .collect())
}

/// Right: `|x <| B_t - eps(B_t) x|`. Left: distance of every block from the
/// form whose second slot is the pinned left spherical vector.
pub fn coideal_membership(x: &AlgElement, convention: Convention, model: &QModel) -> Result<Float> {
    let bits = model.bits();
    match convention {
        Convention::Right => {
            let bt = Word::single(Gen::Bt);
            let eps = bt.counit(model);
            Ok(x.act(Side::Right, &bt, model).sub(&x.scale(&eps)).norm())
        }
        Convention::Left => {
            let mut total = Float::new(bits);
            for (s, f) in x.blocks() {
                if !s.is_integer() {
                    total += f.frobenius_norm();
                    continue;
                }
                let eta = model.basis(*s, Convention::Left)?.spherical_vector().to_vec();
                let proj = CMatrix::outer(&vconj(&eta), &eta, bits);
                total += f.sub(&f.matmul(&proj)).frobenius_norm();
            }
            Ok(total)
        }
    }
}

/// `|R(B_t) |> x - eps(B_t) x|` with `R = Ad(k^{1/2}) o S`, available for the
/// canonical form only, where `pi(R(B_t)) = -i Y`.
pub fn twisted_left_membership(x: &AlgElement, model: &QModel) -> Result<Float> {
    if model.form() != BtForm::Canonical {
        return Err(Error::Domain("the twisted left action needs the canonical B_t".into()));
    }
    let bits = model.bits();
    let m_i = Complex::new(Float::new(bits), Float::with_val(bits, -1));
    let mut total = Float::new(bits);
    for (s, f) in x.blocks() {
        let r = left_weight_operator(&model.rep(*s), model.ctx()).scale(&m_i);
        let lhs = f.matmul(&r.transpose());
        total += lhs.sub(&f.scale(&m_i.scale(model.ctx().bracket_a()))).frobenius_norm();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::QContext;

    fn model(form: BtForm) -> QModel {
        QModel::new(QContext::parse("0.5", "0.3", 256).unwrap(), form)
    }

    #[test]
    fn degree_zero_is_the_unit() {
        let m = model(BtForm::Canonical);
        for conv in [Convention::Left, Convention::Right] {
            let b = podles_basis(0, conv, &m).unwrap();
            assert_eq!(b.len(), 1);
            assert_eq!(b[0].1, AlgElement::unit(256));
            assert!(b[0].0.is_spherical);
            assert!(coideal_membership(&b[0].1, conv, &m).unwrap().is_zero());
        }
    }

    #[test]
    fn basis_elements_are_members() {
        for form in [BtForm::Canonical, BtForm::ScalarTerm] {
            let m = model(form);
            let tol = m.ctx().prec().tol_residual().clone();
            for n in 1..=3 {
                for conv in [Convention::Left, Convention::Right] {
                    let b = podles_basis(n, conv, &m).unwrap();
                    assert_eq!(b.len(), 2 * n as usize + 1);
                    assert_eq!(b.iter().filter(|(i, _)| i.is_spherical).count(), 1);
                    for (_, x) in &b {
                        assert!(coideal_membership(x, conv, &m).unwrap() < tol, "{form} {conv} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_left_basis_is_fixed_by_the_twisted_action() {
        let m = model(BtForm::Canonical);
        for n in 0..=3 {
            for (_, x) in podles_basis(n, Convention::Left, &m).unwrap() {
                assert!(twisted_left_membership(&x, &m).unwrap() < *m.ctx().prec().tol_residual());
            }
        }
        assert!(twisted_left_membership(&AlgElement::unit(256), &model(BtForm::ScalarTerm)).is_err());
    }

    #[test]
    fn corrupted_element_is_rejected() {
        let m = model(BtForm::Canonical);
        let spin = Spin::integer(2);
        for conv in [Convention::Left, Convention::Right] {
            let basis = m.basis(spin, conv).unwrap();
            let other = basis.vectors[(basis.spherical + 1) % 5].clone();
            // spherical slot replaced by an orthogonal vector
            let bad = match conv {
                Convention::Right => AlgElement::matrix_coeff(spin, &other, &other),
                Convention::Left => AlgElement::matrix_coeff(spin, &other, &other),
            };
            assert!(coideal_membership(&bad, conv, &m).unwrap() > *m.ctx().prec().tol_rank());
        }
    }

    #[test]
    fn products_and_stars_stay_in_the_right_coideal() {
        let m = model(BtForm::Canonical);
        let tol = m.ctx().prec().tol_residual().clone();
        let b1 = podles_basis(1, Convention::Right, &m).unwrap();
        let b2 = podles_basis(2, Convention::Right, &m).unwrap();
        for (_, x) in &b1 {
            assert!(coideal_membership(&x.star(&m).unwrap(), Convention::Right, &m).unwrap() < tol);
            for (_, y) in &b2 {
                let xy = x.mul(y, &m).unwrap();
                assert!(coideal_membership(&xy, Convention::Right, &m).unwrap() < tol);
            }
        }
    }

    #[test]
    fn spherical_element_torus_values() {
        let m = model(BtForm::Canonical);
        let ctx = m.ctx();
        let b = podles_basis(1, Convention::Left, &m).unwrap();
        let (_, u1) = b.iter().find(|(i, _)| i.is_spherical).unwrap();
        assert!(Float::with_val(256, u1.counit().re.clone() - 1u32).abs() < *ctx.prec().tol_residual());
        let qq = ctx.q_plus_qinv();
        let t2 = Float::with_val(256, ctx.t().square_ref());
        let norm2 = Float::with_val(256, ctx.q() + ctx.qpow_int(-1)) + Float::with_val(256, &t2 / &qq);
        for j in 0..8 {
            let th = Float::with_val(256, j) / 3u32;
            let e = Complex::cis(&th);
            let mut want = &e.scale(ctx.q()) + &e.conj().scale(&ctx.qpow_int(-1));
            want.re += Float::with_val(256, &t2 / &qq);
            let want = want.scale(&Float::with_val(256, norm2.recip_ref()));
            assert!((&u1.eval_torus(&th) - &want).abs() < *ctx.prec().tol_residual());
        }
    }
}
