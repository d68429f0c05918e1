//! The polynomials `Q_n` and `P_n` and the principal-series scalar.

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::series::poch_real;
use crate::oqalg::AlgElement;
use crate::qcore::{askey_wilson, AwForm, Complex, Polynomial, QContext};
use crate::uqrep::{kernel_coeffs, QModel, Spin};

/// `|c_i|^2` for `i = 0..n` and `|alpha_n|^2 = sum_i q^i |c_i|^2`.
fn kernel_weights(n: u32, ctx: &QContext) -> Result<(Vec<Float>, Float)> {
    let bits = ctx.bits();
    let c = kernel_coeffs(Spin::integer(n), ctx)?;
    let w: Vec<Float> = c.iter().map(|x| x.norm_sqr()).collect();
    let mut alpha2 = Float::new(bits);
    for (i, wi) in (-(n as i64)..=n as i64).zip(&w) {
        alpha2 += Float::with_val(bits, ctx.qpow_int(i) * wi);
    }
    Ok((w[n as usize..].to_vec(), alpha2))
}

/// `Q_n` from the Fourier expansion of `sum_i |c_i|^2 e^{i i theta}`.
pub fn q_poly_fourier(n: u32, ctx: &QContext) -> Result<Polynomial> {
    let (w, alpha2) = kernel_weights(n, ctx)?;
    let inv = Float::with_val(ctx.bits(), alpha2.recip_ref());
    Ok(Polynomial::fourier_to_chebyshev(&w).scale(&inv))
}

/// `|alpha_n|^{-2} |c_n|^2 (q^{2n+2}; q^2)_n^{-1} p_n(x)`.
pub fn q_closed_form(n: u32, x: &Float, ctx: &QContext, form: AwForm) -> Result<Float> {
    let bits = ctx.bits();
    let (w, alpha2) = kernel_weights(n, ctx)?;
    let q2 = ctx.qpow_int(2);
    let poch = poch_real(&ctx.qpow_int(2 * n as i64 + 2), &q2, n as usize);
    let pre = Float::with_val(bits, &w[n as usize] / &alpha2) / poch;
    Ok(pre * askey_wilson(n as usize, x, ctx, form))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteVerdict {
    Agree,
    /// Proportional with a ratio different from one.
    NormalizationMismatch,
    ShapeMismatch,
}

#[derive(Clone, Debug)]
pub struct QPolyReport {
    pub n: u32,
    pub form: AwForm,
    pub q: Polynomial,
    /// Max over the grid of `|Q_n(cos theta) - closed(cos theta)|`.
    pub cross_check_residual: Float,
    /// Least-squares ratio `Q_n / closed` on the grid.
    pub ratio: Float,
    /// Max deviation after rescaling the closed form by `ratio`.
    pub proportional_residual: Float,
    pub verdict: RouteVerdict,
}

/// `theta_j = (j + 1/2) pi / points`, `j = 0..points`.
pub fn theta_grid(points: usize, ctx: &QContext) -> Vec<Float> {
    let pi = ctx.prec().pi();
    (0..points)
        .map(|j| Float::with_val(ctx.bits(), &pi * (2 * j + 1) as u32) / (2 * points) as u32)
        .collect()
}

/// Both routes for `Q_n` on a `theta` grid of `points` nodes (defaults to
/// `4n + 4`), classified by how they disagree, if at all.
pub fn q_poly(n: u32, ctx: &QContext, form: AwForm, points: Option<usize>) -> Result<QPolyReport> {
    let bits = ctx.bits();
    let q = q_poly_fourier(n, ctx)?;
    let grid = theta_grid(points.unwrap_or(4 * n as usize + 4), ctx);
    let mut fourier = Vec::with_capacity(grid.len());
    let mut closed = Vec::with_capacity(grid.len());
    for th in &grid {
        let x = Float::with_val(bits, th.cos_ref());
        fourier.push(q.eval(&x));
        closed.push(q_closed_form(n, &x, ctx, form)?);
    }
    let max_dev = |scale: &Float| {
        fourier
            .iter()
            .zip(&closed)
            .map(|(f, c)| Float::with_val(bits, f - Float::with_val(bits, c * scale)).abs())
            .fold(Float::new(bits), |a, b| a.max(&b))
    };
    let one = Float::with_val(bits, 1);
    let cross_check_residual = max_dev(&one);
    let mut num = Float::new(bits);
    let mut den = Float::new(bits);
    for (f, c) in fourier.iter().zip(&closed) {
        num += Float::with_val(bits, f * c);
        den += Float::with_val(bits, c.square_ref());
    }
    let ratio = if den.is_zero() { Float::new(bits) } else { num / den };
    let proportional_residual = max_dev(&ratio);
    let tol = ctx.prec().tol_rank();
    let verdict = if cross_check_residual < *tol {
        RouteVerdict::Agree
    } else if proportional_residual < *tol {
        RouteVerdict::NormalizationMismatch
    } else {
        RouteVerdict::ShapeMismatch
    };
    Ok(QPolyReport { n, form, q, cross_check_residual, ratio, proportional_residual, verdict })
}

/// `P_n(y) = Q_n(((q + q^-1 + c') y - c') / 2)`.
pub fn p_poly(n: u32, ctx: &QContext) -> Result<Polynomial> {
    let bits = ctx.bits();
    let q = q_poly_fourier(n, ctx)?;
    let alpha = Float::with_val(bits, ctx.q_plus_qinv() + ctx.cprime()) / 2u32;
    let beta = Float::with_val(bits, -ctx.cprime()) / 2u32;
    let p = q.affine_compose(&alpha, &beta);
    let at_one = p.eval(&Float::with_val(bits, 1));
    let dev = Float::with_val(bits, at_one - 1u32).abs();
    if dev > *ctx.prec().tol_rank() {
        return Err(Error::Structural(format!("P_{n}(1) misses 1 by {}", dev.to_f64())));
    }
    Ok(p)
}

/// The argument `(lambda + c') / (q + q^-1 + c')` at which `P_n` is evaluated.
pub fn omega_argument(lambda: &Float, ctx: &QContext) -> Float {
    let bits = ctx.bits();
    Float::with_val(bits, lambda + ctx.cprime()) / Float::with_val(bits, ctx.q_plus_qinv() + ctx.cprime())
}

#[derive(Clone, Debug)]
pub struct OmegaValue {
    pub value: Float,
    /// `false` when `lambda` lies outside `(0, q + q^-1)`.
    pub in_range: bool,
}

pub fn omega_value(lambda: &Float, p: &Polynomial, ctx: &QContext) -> OmegaValue {
    let in_range = lambda.is_sign_positive() && !lambda.is_zero() && *lambda < ctx.q_plus_qinv();
    OmegaValue { value: p.eval(&omega_argument(lambda, ctx)), in_range }
}

/// `P(x)` computed in the algebra by Horner's rule.
pub fn eval_in_algebra(p: &Polynomial, x: &AlgElement, model: &QModel) -> Result<AlgElement> {
    let bits = model.bits();
    let mut acc = AlgElement::zero(bits);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(x, model)?.add(&AlgElement::scalar(Complex::from_real(c.clone())));
    }
    Ok(acc)
}
