//! Spin representations and the distinguished operators built from them.

use rug::Float;
use serde::{Deserialize, Serialize};

use super::spin::Spin;
use crate::error::{Error, Result};
use crate::qcore::{CMatrix, Complex, QContext};

/// Matrices of a spin representation on the basis `xi_i`, `i = -s..s`
/// ascending. The Koornwinder generators use the identification
/// `e_{-i} = xi_i`, under which `A = k^{1/2}`, `B = k^{-1/2} e`,
/// `C = f k^{1/2}` and `D = k^{-1/2}`.
#[derive(Clone, Debug)]
pub struct SpinRep {
    pub spin: Spin,
    pub k: CMatrix,
    pub kinv: CMatrix,
    pub e: CMatrix,
    pub f: CMatrix,
    pub k_half: CMatrix,
    pub k_half_inv: CMatrix,
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

impl SpinRep {
    pub fn new(spin: Spin, ctx: &QContext) -> Self {
        let bits = ctx.bits();
        let dim = spin.dim();
        let s2 = spin.twice() as i64;
        let weights: Vec<i64> = spin.twice_weights().collect();
        let diag = |f: &dyn Fn(i64) -> Float| {
            CMatrix::real_diag(&weights.iter().map(|&m| f(m)).collect::<Vec<_>>(), bits)
        };
        let k = diag(&|m| ctx.qpow_half(2 * m));
        let kinv = diag(&|m| ctx.qpow_half(-2 * m));
        let k_half = diag(&|m| ctx.qpow_half(m));
        let k_half_inv = diag(&|m| ctx.qpow_half(-m));

        let mut e = CMatrix::zeros(dim, dim, bits);
        let mut f = CMatrix::zeros(dim, dim, bits);
        for (c, &m) in weights.iter().enumerate() {
            if c + 1 < dim {
                // q^{i+1} ([s-i][s+i+1])^{1/2}
                let r = Float::with_val(bits, ctx.square_bracket_half(s2 - m) * ctx.square_bracket_half(s2 + m + 2));
                e[(c + 1, c)] = Complex::from_real(ctx.qpow_half(m + 2) * r.sqrt());
            }
            if c > 0 {
                // q^{-i} ([s+i][s-i+1])^{1/2}
                let r = Float::with_val(bits, ctx.square_bracket_half(s2 + m) * ctx.square_bracket_half(s2 - m + 2));
                f[(c - 1, c)] = Complex::from_real(ctx.qpow_half(-m) * r.sqrt());
            }
        }
        let a = k_half.clone();
        let b = k_half_inv.matmul(&e);
        let c = f.matmul(&k_half);
        let d = k_half_inv.clone();
        Self { spin, k, kinv, e, f, k_half, k_half_inv, a, b, c, d }
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn prec(&self) -> u32 {
        self.k.prec()
    }

    /// `pi(e - f k)`, anti-Hermitian.
    pub fn e_minus_fk(&self) -> CMatrix {
        self.e.sub(&self.f.matmul(&self.k))
    }

    /// Antipode images `(S(k), S(e), S(f)) = (k^-1, -k^-1 e, -f k)`.
    pub fn antipode_images(&self) -> [CMatrix; 3] {
        let m1 = Complex::from_f64(self.prec(), -1.0, 0.0);
        [self.kinv.clone(), self.kinv.matmul(&self.e).scale(&m1), self.f.matmul(&self.k).scale(&m1)]
    }

    /// Named residuals of every defining relation of both algebras and of the
    /// two star-compatibility conditions (Frobenius norms).
    pub fn relation_residuals(&self, ctx: &QContext) -> Vec<(&'static str, Float)> {
        let bits = self.prec();
        let n = self.dim();
        let id = CMatrix::identity(n, bits);
        let q = Complex::from_real(ctx.q().clone());
        let q2 = Complex::from_real(ctx.qpow_int(2));
        let qm2 = Complex::from_real(ctx.qpow_int(-2));
        let qinv = Complex::from_real(ctx.qpow_int(-1));
        let inv_diff = Complex::from_real(Float::with_val(bits, ctx.q_minus_qinv().recip_ref()));
        let comm = |x: &CMatrix, y: &CMatrix| x.matmul(y).sub(&y.matmul(x));
        let ef = comm(&self.e, &self.f);
        let kk = self.k.sub(&self.kinv).scale(&inv_diff);
        let bc = comm(&self.b, &self.c);
        let a2d2 = self.a.matmul(&self.a).sub(&self.d.matmul(&self.d)).scale(&inv_diff);
        vec![
            ("k kinv = 1", self.k.matmul(&self.kinv).distance(&id)),
            ("kinv k = 1", self.kinv.matmul(&self.k).distance(&id)),
            ("k e = q^2 e k", self.k.matmul(&self.e).distance(&self.e.matmul(&self.k).scale(&q2))),
            ("k f = q^-2 f k", self.k.matmul(&self.f).distance(&self.f.matmul(&self.k).scale(&qm2))),
            ("[e,f] = (k - kinv)/(q - q^-1)", ef.distance(&kk)),
            ("A D = 1", self.a.matmul(&self.d).distance(&id)),
            ("D A = 1", self.d.matmul(&self.a).distance(&id)),
            ("A B = q B A", self.a.matmul(&self.b).distance(&self.b.matmul(&self.a).scale(&q))),
            ("A C = q^-1 C A", self.a.matmul(&self.c).distance(&self.c.matmul(&self.a).scale(&qinv))),
            ("[B,C] = (A^2 - D^2)/(q - q^-1)", bc.distance(&a2d2)),
            ("e^dagger = f k", self.e.adjoint().distance(&self.f.matmul(&self.k))),
            ("B^dagger = C", self.b.adjoint().distance(&self.c)),
        ]
    }
}

/// Which form of the twisted primitive element is used.
///
/// `Canonical` carries `k` on the scalar term, `B_t = q^{-1/2}(e - f k) -
/// i [a] k`, so that `B~_t = B_t + i [a]` and `i B_t` has spectrum
/// `{[a + 2j]}`. `ScalarTerm` uses the plain constant `-i [a]`; it is kept for
/// diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BtForm {
    #[default]
    Canonical,
    ScalarTerm,
}

impl std::fmt::Display for BtForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BtForm::Canonical => "canonical",
            BtForm::ScalarTerm => "scalar-term",
        })
    }
}

impl std::str::FromStr for BtForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "canonical" => Ok(BtForm::Canonical),
            "scalar-term" => Ok(BtForm::ScalarTerm),
            other => Err(Error::Parse(format!("unknown B_t form {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OpMatrices {
    pub bt: CMatrix,
    pub bt_tilde: CMatrix,
    pub x_minus_a: CMatrix,
    /// `W = i B_t`, Hermitian.
    pub w: CMatrix,
    /// `epsilon(i B_t) = [a]`.
    pub eps_w: Float,
}

pub fn op_matrices(rep: &SpinRep, form: BtForm, ctx: &QContext) -> OpMatrices {
    let bits = rep.prec();
    let i = Complex::i(bits);
    let br = Complex::from_real(ctx.bracket_a().clone());
    let i_br = &i * &br;
    let q_mhalf = Complex::from_real(ctx.qpow_half(-1));
    let q_half = Complex::from_real(ctx.qpow_half(1));
    let n = rep.dim();
    let id = CMatrix::identity(n, bits);
    let core = rep.e_minus_fk().scale(&q_mhalf);
    let bt = match form {
        BtForm::Canonical => core.sub(&rep.k.scale(&i_br)),
        BtForm::ScalarTerm => core.sub(&id.scale(&i_br)),
    };
    let bt_tilde = core.sub(&rep.k.scale(&i_br)).add(&id.scale(&i_br));
    let x_minus_a = rep
        .b
        .scale(&(&i * &q_half))
        .sub(&rep.c.scale(&(&i * &q_mhalf)))
        .add(&rep.a.sub(&rep.d).scale(&br));
    let w = bt.scale(&i);
    OpMatrices { bt, bt_tilde, x_minus_a, w, eps_w: ctx.bracket_a().clone() }
}

/// `Y = -i q^{1/2}(k^-1 e - f) + [a] k^-1`, the image of `i B_t` under the
/// candidate unitary antipode `Ad(k^{1/2}) o S`. Hermitian; its `[a]`
/// eigenvector is the left spherical vector.
pub fn left_weight_operator(rep: &SpinRep, ctx: &QContext) -> CMatrix {
    let bits = rep.prec();
    let m_i_qh = Complex::new(Float::new(bits), -ctx.qpow_half(1));
    let br = Complex::from_real(ctx.bracket_a().clone());
    rep.kinv.matmul(&rep.e).sub(&rep.f).scale(&m_i_qh).add(&rep.kinv.scale(&br))
}
