//! The generating functional on the coideal, from the principal-series limit.

use std::fmt;
use std::str::FromStr;

use rug::Float;
use serde::{Deserialize, Serialize};

use super::askey::{omega_value, p_poly};
use crate::error::{Error, Result};
use crate::oqalg::{coideal_membership, AlgElement};
use crate::qcore::{Complex, Polynomial, QContext};
use crate::uqrep::{Convention, QModel, Spin};

/// How the limit `(omega_lambda(b) - eps(b)) / (q + q^-1 - lambda)` is turned
/// into a number for `b = u^n_sph,sph`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitMode {
    /// `-P_n'(1) / (q + q^-1 + c')`, the chain rule through the argument.
    #[default]
    Derivative,
    /// `-P_n'(1)`, without the chain-rule factor.
    Unscaled,
}

impl fmt::Display for LimitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitMode::Derivative => "derivative",
            LimitMode::Unscaled => "unscaled",
        })
    }
}

impl FromStr for LimitMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derivative" => Ok(LimitMode::Derivative),
            "unscaled" => Ok(LimitMode::Unscaled),
            other => Err(Error::Parse(format!("unknown limit mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DegreeData {
    pub n: u32,
    pub p: Polynomial,
    pub raw_derivative: Float,
    pub raw_unscaled: Float,
    /// Richardson-extrapolated one-sided difference quotient of `omega`.
    pub fd_oracle: Float,
    pub lambda: Float,
}

#[derive(Clone, Debug)]
pub struct GenFunctional {
    pub mode: LimitMode,
    pub convention: Convention,
    pub kappa: Float,
    pub degrees: Vec<DegreeData>,
}

/// `lim_{h -> 0} (omega(q + q^-1 - h) - 1) / h` by Richardson extrapolation
/// over `h = 2^-j`, `j = first..first + levels`.
pub fn fd_limit(p: &Polynomial, ctx: &QContext, first: u32, levels: usize) -> Float {
    let bits = ctx.bits();
    let top = ctx.q_plus_qinv();
    let quotient = |j: u32| {
        let h = Float::with_val(bits, Float::with_val(bits, 1) >> j);
        let w = omega_value(&Float::with_val(bits, &top - &h), p, ctx).value;
        Float::with_val(bits, w - 1u32) / h
    };
    let mut table: Vec<Float> = (0..levels).map(|j| quotient(first + j as u32)).collect();
    // each column removes one more power of h
    for k in 1..levels {
        let factor = Float::with_val(bits, Float::with_val(bits, 1) << k as u32);
        for j in (k..levels).rev() {
            let num = Float::with_val(bits, &factor * &table[j]) - &table[j - 1];
            table[j] = num / Float::with_val(bits, &factor - 1u32);
        }
    }
    table.pop().unwrap_or_else(|| Float::new(bits))
}

pub fn build_functional(ctx: &QContext, n_max: u32, mode: LimitMode, convention: Convention) -> Result<GenFunctional> {
    let bits = ctx.bits();
    let one = Float::with_val(bits, 1);
    let slope = Float::with_val(bits, ctx.q_plus_qinv() + ctx.cprime());
    let kappa = ctx.kappa().clone();
    let mut degrees = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let p = p_poly(n, ctx)?;
        let raw_unscaled = -p.derivative().eval(&one);
        let raw_derivative = Float::with_val(bits, &raw_unscaled / &slope);
        let fd_oracle = fd_limit(&p, ctx, 8, n as usize + 3);
        let dev = Float::with_val(bits, &fd_oracle - &raw_derivative).abs();
        let scale = Float::with_val(bits, raw_derivative.abs_ref()).max(&one);
        if dev > Float::with_val(bits, ctx.prec().tol_rank() * &scale) {
            return Err(Error::Structural(format!(
                "finite-difference limit for n = {n} is off from the derivative value by {}",
                dev.to_f64()
            )));
        }
        let raw = match mode {
            LimitMode::Derivative => &raw_derivative,
            LimitMode::Unscaled => &raw_unscaled,
        };
        let lambda = if n == 0 { Float::new(bits) } else { Float::with_val(bits, &kappa * raw) };
        degrees.push(DegreeData { n, p, raw_derivative, raw_unscaled, fd_oracle, lambda });
    }
    Ok(GenFunctional { mode, convention, kappa, degrees })
}

impl GenFunctional {
    pub fn n_max(&self) -> u32 {
        self.degrees.len() as u32 - 1
    }

    pub fn lambda(&self, n: u32) -> &Float {
        &self.degrees[n as usize].lambda
    }

    pub fn lambdas(&self) -> Vec<Float> {
        self.degrees.iter().map(|d| d.lambda.clone()).collect()
    }

    /// `sum_n lambda_n d^(n)_{sph,sph}(x)` for `x` in the coideal.
    pub fn apply(&self, x: &AlgElement, model: &QModel) -> Result<Complex> {
        let residual = coideal_membership(x, self.convention, model)?;
        if residual >= *model.ctx().prec().tol_rank() {
            return Err(Error::Domain(format!(
                "element is not in the {} coideal (membership residual {})",
                self.convention,
                residual.to_f64()
            )));
        }
        self.apply_unchecked(x, model)
    }

    /// As `apply`, without the membership test. Blocks of half-integer spin
    /// are ignored.
    pub fn apply_unchecked(&self, x: &AlgElement, model: &QModel) -> Result<Complex> {
        let bits = model.bits();
        let mut out = Complex::zero(bits);
        for (s, f) in x.blocks() {
            let Some(n) = s.as_integer() else { continue };
            if n == 0 {
                continue;
            }
            if n > self.n_max() {
                return Err(Error::Domain(format!("degree {n} exceeds the functional's n_max {}", self.n_max())));
            }
            let coeff = sph_coefficient(f, model.basis(Spin::integer(n), self.convention)?.spherical_vector());
            out += &coeff.scale(self.lambda(n));
        }
        Ok(out)
    }
}

/// `eta^T F conj(eta)`: the coefficient of `u_{eta,eta}` in the block `F`
/// when `eta` belongs to an orthonormal slot basis.
pub fn sph_coefficient(f: &crate::qcore::CMatrix, eta: &[Complex]) -> Complex {
    let d = eta.len();
    let mut out = Complex::zero(f.prec());
    for i in 0..d {
        let mut row = Complex::zero(f.prec());
        for j in 0..d {
            row.mul_add_assign(&f[(i, j)], &eta[j].conj());
        }
        out.mul_add_assign(&eta[i], &row);
    }
    out
}
