//! Contragredient intertwiners for the star structure, and diagnostics for
//! candidate unitary antipodes.

use rug::Float;
use serde::Serialize;

use super::rep::{op_matrices, BtForm, SpinRep};
use crate::error::{Error, Result};
use crate::qcore::linalg::nullspace;
use crate::qcore::{eigh, CMatrix, Complex, QContext};

/// `G` with `pi(S(h))^T = G pi(h) G^-1` for `h` in `{k, e, f}`.
#[derive(Clone, Debug)]
pub struct StarIntertwiner {
    pub g: CMatrix,
    pub g_inv: CMatrix,
    pub residual: Float,
}

pub fn star_intertwiner(rep: &SpinRep, ctx: &QContext) -> Result<StarIntertwiner> {
    let bits = ctx.bits();
    let d = rep.dim();
    let gens = [&rep.k, &rep.e, &rep.f];
    let images = rep.antipode_images();
    // unknown g_{il} at column i*d + l; row (h, i, j) of G P - S(P)^T G
    let mut sys = CMatrix::zeros(3 * d * d, d * d, bits);
    for (h, (p, sp)) in gens.iter().zip(&images).enumerate() {
        for i in 0..d {
            for j in 0..d {
                let row = h * d * d + i * d + j;
                for l in 0..d {
                    sys[(row, i * d + l)] += &p[(l, j)];
                    sys[(row, l * d + j)] -= &sp[(l, i)];
                }
            }
        }
    }
    let ns = nullspace(&sys, ctx.prec().tol_rank());
    if ns.len() != 1 {
        return Err(Error::Structural(format!(
            "star intertwiner for spin {} has a solution space of dimension {}",
            rep.spin,
            ns.len()
        )));
    }
    let v = &ns[0];
    let max = v.iter().map(Complex::abs).fold(Float::new(bits), |a, b| a.max(&b));
    let cut = Float::with_val(bits, &max * Float::with_val(bits, 1 - ctx.prec().tol_rank()));
    let pivot = v.iter().find(|x| x.abs() >= cut).expect("nonzero null vector").recip();
    let g = CMatrix::from_fn(d, d, bits, |i, j| &v[i * d + j] * &pivot);
    let g_inv = g.inverse()?;
    let mut residual = Float::new(bits);
    for (p, sp) in gens.iter().zip(&images) {
        let lhs = g.matmul(p).matmul(&g_inv);
        residual = residual.max(&lhs.distance(&sp.transpose()));
    }
    Ok(StarIntertwiner { g, g_inv, residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RCandidate {
    /// `Ad(k^{1/2}) o S`.
    TwistedAntipode,
    /// `Ad(k^{1/2}) o S^-1`.
    TwistedInverseAntipode,
}

impl RCandidate {
    pub const ALL: [RCandidate; 2] = [RCandidate::TwistedAntipode, RCandidate::TwistedInverseAntipode];

    pub fn name(self) -> &'static str {
        match self {
            RCandidate::TwistedAntipode => "Ad(k^1/2) S",
            RCandidate::TwistedInverseAntipode => "Ad(k^1/2) S^-1",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RCandidateEntry {
    pub candidate: RCandidate,
    /// `|i R(B~_t) - k^{-1/2} X_{-a}|_F`.
    pub residual_plus: Float,
    /// `|i R(B~_t) + k^{-1/2} X_{-a}|_F`.
    pub residual_minus: Float,
    pub hermitian_defect: Float,
    /// Ascending spectrum of `i R(B_t)`, present when the image is Hermitian.
    pub spectrum: Option<Vec<Float>>,
    pub target: Vec<Float>,
    pub spectrum_deviation: Option<Float>,
}

#[derive(Clone, Debug)]
pub struct RCandidateReport {
    pub form: BtForm,
    pub entries: Vec<RCandidateEntry>,
}

/// Images of `e - f k` and `k` under `Ad(k^{1/2})` composed with the
/// antipode or its inverse.
fn r_images(rep: &SpinRep, cand: RCandidate) -> (CMatrix, CMatrix) {
    let m1 = Complex::from_f64(rep.prec(), -1.0, 0.0);
    let (se, sfk) = match cand {
        // S(e) = -k^-1 e, S(f k) = S(k) S(f) = -k^-1 f k
        RCandidate::TwistedAntipode => {
            (rep.kinv.matmul(&rep.e).scale(&m1), rep.kinv.matmul(&rep.f).matmul(&rep.k).scale(&m1))
        }
        // S^-1(e) = -e k^-1, S^-1(f k) = S^-1(k) S^-1(f) = -f
        RCandidate::TwistedInverseAntipode => (rep.e.matmul(&rep.kinv).scale(&m1), rep.f.scale(&m1)),
    };
    let tw = |m: &CMatrix| rep.k_half.matmul(m).matmul(&rep.k_half_inv);
    (tw(&se.sub(&sfk)), tw(&rep.kinv))
}

pub fn validate_r_candidate(rep: &SpinRep, form: BtForm, ctx: &QContext) -> Result<RCandidateReport> {
    let bits = ctx.bits();
    let i = Complex::i(bits);
    let br = Complex::from_real(ctx.bracket_a().clone());
    let i_br = &i * &br;
    let q_mhalf = Complex::from_real(ctx.qpow_half(-1));
    let id = CMatrix::identity(rep.dim(), bits);
    let x = op_matrices(rep, form, ctx).x_minus_a;
    let kx = rep.k_half_inv.matmul(&x);
    let target: Vec<Float> = rep
        .spin
        .twice_weights()
        .map(|m| ctx.square_bracket(&Float::with_val(bits, ctx.a() + m)))
        .collect();
    let mut entries = Vec::new();
    for cand in RCandidate::ALL {
        let (r_core, r_k) = r_images(rep, cand);
        let core = r_core.scale(&q_mhalf);
        let r_bt_tilde = core.sub(&r_k.scale(&i_br)).add(&id.scale(&i_br));
        let r_bt = match form {
            BtForm::Canonical => core.sub(&r_k.scale(&i_br)),
            BtForm::ScalarTerm => core.sub(&id.scale(&i_br)),
        };
        let lhs = r_bt_tilde.scale(&i);
        let w = r_bt.scale(&i);
        let hermitian_defect = w.hermitian_defect();
        let (spectrum, spectrum_deviation) = if hermitian_defect < *ctx.prec().tol_rank() {
            let vals = eigh(&w)?.values;
            let dev = vals
                .iter()
                .zip(&target)
                .map(|(a, b)| Float::with_val(bits, a - b).abs())
                .fold(Float::new(bits), |a, b| a.max(&b));
            (Some(vals), Some(dev))
        } else {
            (None, None)
        };
        entries.push(RCandidateEntry {
            candidate: cand,
            residual_plus: lhs.distance(&kx),
            residual_minus: lhs.add(&kx).frobenius_norm(),
            hermitian_defect,
            spectrum,
            target: target.clone(),
            spectrum_deviation,
        });
    }
    Ok(RCandidateReport { form, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uqrep::Spin;

    fn ctx() -> QContext {
        QContext::parse("0.5", "0.3", 256).unwrap()
    }

    #[test]
    fn trivial_spin_intertwiner_is_one() {
        let c = ctx();
        let g = star_intertwiner(&SpinRep::new(Spin::ZERO, &c), &c).unwrap();
        assert_eq!(g.g[(0, 0)], Complex::one(256));
    }

    #[test]
    fn intertwiner_residuals() {
        let c = ctx();
        for s2 in 0..=8 {
            let g = star_intertwiner(&SpinRep::new(Spin::from_twice(s2), &c), &c).unwrap();
            assert!(g.residual < *c.prec().tol_residual(), "2s = {s2}");
            let one = Float::with_val(256, 1);
            assert!(Float::with_val(256, g.g.max_abs() - &one).abs() < *c.prec().tol_residual());
        }
    }

    #[test]
    fn r_report_is_always_produced() {
        let c = ctx();
        for s2 in [0, 1, 2] {
            let rep = SpinRep::new(Spin::from_twice(s2), &c);
            for form in [BtForm::Canonical, BtForm::ScalarTerm] {
                let r = validate_r_candidate(&rep, form, &c).unwrap();
                assert_eq!(r.entries.len(), 2);
            }
        }
    }

    #[test]
    fn scalar_term_spin_half_misses_shifted_brackets() {
        let c = ctx();
        let rep = SpinRep::new(Spin::HALF, &c);
        let r = validate_r_candidate(&rep, BtForm::ScalarTerm, &c).unwrap();
        let e = &r.entries[0];
        let dev = e.spectrum_deviation.as_ref().expect("Hermitian image");
        assert!(*dev > *c.prec().tol_rank());
    }

    #[test]
    fn canonical_twisted_antipode_hits_shifted_brackets() {
        let c = ctx();
        for n in 0..=3 {
            let rep = SpinRep::new(Spin::integer(n), &c);
            let r = validate_r_candidate(&rep, BtForm::Canonical, &c).unwrap();
            let e = &r.entries[0];
            assert!(*e.spectrum_deviation.as_ref().unwrap() < *c.prec().tol_rank(), "n = {n}");
        }
    }
}
