//! Multi-precision scalars: the precision configuration, a complex type built
//! on pairs of MPFR floats, and the deformation context `(q, a)`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Working precision plus the two tolerances derived from it.
///
/// `tol_residual` gates identities that should hold to working precision,
/// `tol_rank` gates rank and sign decisions, which accumulate more error.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionContext {
    bits: u32,
    tol_residual: Float,
    tol_rank: Float,
}

impl PrecisionContext {
    pub const MIN_BITS: u32 = 64;
    pub const DEFAULT_BITS: u32 = 256;

    /// Tolerances default to `2^(-bits/2)` and `2^(-bits/4)`.
    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::Precision(bits));
        }
        let tol_residual = pow2(bits, -((bits / 2) as i32));
        let tol_rank = pow2(bits, -((bits / 4) as i32));
        Ok(Self { bits, tol_residual, tol_rank })
    }

    pub fn with_tolerances(bits: u32, tol_residual: Float, tol_rank: Float) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::Precision(bits));
        }
        if !(tol_residual.is_sign_positive() && !tol_residual.is_zero() && tol_rank > tol_residual) {
            return Err(Error::Tolerance);
        }
        Ok(Self {
            bits,
            tol_residual: Float::with_val(bits, tol_residual),
            tol_rank: Float::with_val(bits, tol_rank),
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn tol_residual(&self) -> &Float {
        &self.tol_residual
    }

    pub fn tol_rank(&self) -> &Float {
        &self.tol_rank
    }

    /// Smallest magnitude treated as distinct from zero in truncation rules.
    pub fn epsilon(&self) -> Float {
        pow2(self.bits, -(self.bits as i32))
    }

    pub fn float<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits, v)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.bits)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, Constant::Pi)
    }

    /// Parses a decimal string such as `"0.5"` or `"3/10"` at working precision.
    pub fn parse(&self, s: &str) -> Result<Float> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n = self.parse(num)?;
            let d = self.parse(den)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Float::with_val(self.bits, &n / &d));
        }
        Float::parse(s)
            .map(|p| Float::with_val(self.bits, p))
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    }

    /// Number of significant decimal digits carried by the working precision.
    pub fn decimal_digits(&self) -> usize {
        (self.bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
    }

    /// Full-precision decimal rendering used by every emitted table.
    pub fn to_decimal(&self, x: &Float) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        x.to_string_radix(10, Some(self.decimal_digits()))
    }
}

fn pow2(bits: u32, exp: i32) -> Float {
    let mut x = Float::with_val(bits, 1);
    x <<= exp;
    x
}

/// Complex number stored as a pair of MPFR floats of equal precision.
#[derive(Clone, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.20} + {:.20}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Self {
        let p = re.prec().max(im.prec());
        Self { re: Float::with_val(p, re), im: Float::with_val(p, im) }
    }

    pub fn zero(prec: u32) -> Self {
        Self { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Self { re: Float::with_val(prec, 1), im: Float::new(prec) }
    }

    pub fn i(prec: u32) -> Self {
        Self { re: Float::new(prec), im: Float::with_val(prec, 1) }
    }

    pub fn from_real(re: Float) -> Self {
        let p = re.prec();
        Self { re, im: Float::new(p) }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    /// `e^{i theta}`.
    pub fn cis(theta: &Float) -> Self {
        let p = theta.prec();
        let (s, c) = theta.clone().sin_cos(Float::new(p));
        Self { re: c, im: s }
    }

    /// `(sqrt(-1))^n` for an integer `n`.
    pub fn i_pow(n: i64, prec: u32) -> Self {
        match n.rem_euclid(4) {
            0 => Self::one(prec),
            1 => Self::i(prec),
            2 => -Self::one(prec),
            _ => -Self::i(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Float {
        Float::with_val(self.prec(), &self.re * &self.re + &self.im * &self.im)
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, r: &Float) -> Self {
        let p = self.prec();
        Self { re: Float::with_val(p, &self.re * r), im: Float::with_val(p, &self.im * r) }
    }

    pub fn mul_i(&self) -> Self {
        Self { re: -self.im.clone(), im: self.re.clone() }
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        let p = self.prec();
        Self { re: Float::with_val(p, &self.re / &n), im: -Float::with_val(p, &self.im / &n) }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.im.is_zero() {
            return if self.re.is_sign_negative() {
                Self { re: Float::new(p), im: Float::with_val(p, (-self.re.clone()).sqrt()) }
            } else {
                Self { re: self.re.clone().sqrt(), im: Float::new(p) }
            };
        }
        let r = self.abs();
        let re = (Float::with_val(p, &r + &self.re) / 2u32).sqrt();
        let mut im = (Float::with_val(p, &r - &self.re) / 2u32).sqrt();
        if self.im.is_sign_negative() {
            im = -im;
        }
        Self { re, im }
    }

    /// Unit complex number with the phase of `self` (1 for zero input).
    pub fn phase(&self) -> Self {
        if self.is_zero() {
            return Self::one(self.prec());
        }
        let a = self.abs();
        Self { re: Float::with_val(self.prec(), &self.re / &a), im: Float::with_val(self.prec(), &self.im / &a) }
    }

    /// `self += a * b`.
    pub fn mul_add_assign(&mut self, a: &Complex, b: &Complex) {
        self.re += &a.re * &b.re;
        self.re -= &a.im * &b.im;
        self.im += &a.re * &b.im;
        self.im += &a.im * &b.re;
    }

    /// `self += conj(a) * b`.
    pub fn conj_mul_add_assign(&mut self, a: &Complex, b: &Complex) {
        self.re += &a.re * &b.re;
        self.re += &a.im * &b.im;
        self.im += &a.re * &b.im;
        self.im -= &a.im * &b.re;
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex { re: -self.re, im: -self.im }
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        let p = self.prec();
        Complex { re: Float::with_val(p, &self.re + &rhs.re), im: Float::with_val(p, &self.im + &rhs.im) }
    }
}

impl Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        let p = self.prec();
        Complex { re: Float::with_val(p, &self.re - &rhs.re), im: Float::with_val(p, &self.im - &rhs.im) }
    }
}

impl Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        let p = self.prec();
        Complex {
            re: Float::with_val(p, &self.re * &rhs.re - &self.im * &rhs.im),
            im: Float::with_val(p, &self.re * &rhs.im + &self.im * &rhs.re),
        }
    }
}

impl Div<&Complex> for &Complex {
    type Output = Complex;
    fn div(self, rhs: &Complex) -> Complex {
        self * &rhs.recip()
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, rhs: Complex) -> Complex {
        &self + &rhs
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, rhs: Complex) -> Complex {
        &self - &rhs
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, rhs: Complex) -> Complex {
        &self * &rhs
    }
}

impl AddAssign<&Complex> for Complex {
    fn add_assign(&mut self, rhs: &Complex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Complex> for Complex {
    fn sub_assign(&mut self, rhs: &Complex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Complex> for Complex {
    fn mul_assign(&mut self, rhs: &Complex) {
        *self = &*self * rhs;
    }
}

/// Deformation data `(q, a)` with the scalars every module derives from it.
#[derive(Clone, Debug)]
pub struct QContext {
    prec: PrecisionContext,
    q: Float,
    a: Float,
    sqrt_q: Float,
    ln_q: Float,
    t: Float,
    bracket_a: Float,
    cprime: Float,
    kappa: Float,
}

impl QContext {
    pub fn new(q: Float, a: Float, prec: PrecisionContext) -> Result<Self> {
        let bits = prec.bits();
        let q = Float::with_val(bits, q);
        let a = Float::with_val(bits, a);
        if !(q > 0 && q < 1) {
            return Err(Error::QOutOfRange(q.to_string_radix(10, Some(12))));
        }
        let ln_q = Float::with_val(bits, q.ln_ref());
        let sqrt_q = Float::with_val(bits, q.sqrt_ref());
        let mut ctx = Self {
            prec,
            q,
            a,
            sqrt_q,
            ln_q,
            t: Float::new(bits),
            bracket_a: Float::new(bits),
            cprime: Float::new(bits),
            kappa: Float::new(bits),
        };
        ctx.t = ctx.double_bracket(&ctx.a);
        ctx.bracket_a = ctx.square_bracket(&ctx.a);
        let two = ctx.prec.float(2);
        let q_sum = ctx.curly_bracket(&ctx.prec.float(1));
        ctx.cprime = Float::with_val(bits, ctx.t.square_ref()) / &q_sum;
        // {a+2}{a}^{-1}({2a+1} + q + q^{-1})^{-1}
        let a2 = Float::with_val(bits, &ctx.a + &two);
        let two_a1 = Float::with_val(bits, &ctx.a * &two) + 1u32;
        let num = ctx.curly_bracket(&a2);
        let den = Float::with_val(bits, ctx.curly_bracket(&ctx.a) * (ctx.curly_bracket(&two_a1) + &q_sum));
        ctx.kappa = Float::with_val(bits, &num / &den);
        Ok(ctx)
    }

    /// Convenience constructor from decimal strings.
    pub fn parse(q: &str, a: &str, bits: u32) -> Result<Self> {
        let prec = PrecisionContext::new(bits)?;
        let qv = prec.parse(q)?;
        let av = prec.parse(a)?;
        Self::new(qv, av, prec)
    }

    pub fn prec(&self) -> &PrecisionContext {
        &self.prec
    }

    pub fn bits(&self) -> u32 {
        self.prec.bits()
    }

    pub fn q(&self) -> &Float {
        &self.q
    }

    pub fn a(&self) -> &Float {
        &self.a
    }

    pub fn sqrt_q(&self) -> &Float {
        &self.sqrt_q
    }

    /// `t = q^a - q^{-a}`.
    pub fn t(&self) -> &Float {
        &self.t
    }

    /// `[a]`.
    pub fn bracket_a(&self) -> &Float {
        &self.bracket_a
    }

    /// `c' = (q + q^{-1})^{-1} t^2`.
    pub fn cprime(&self) -> &Float {
        &self.cprime
    }

    /// Normalization constant of the generating functional.
    pub fn kappa(&self) -> &Float {
        &self.kappa
    }

    /// `q^x` for real `x`.
    pub fn qpow(&self, x: &Float) -> Float {
        Float::with_val(self.bits(), x * &self.ln_q).exp()
    }

    /// `q^n` for integer `n`.
    pub fn qpow_int(&self, n: i64) -> Float {
        Float::with_val(self.bits(), (&self.q).pow(n as i32))
    }

    /// `q^{k/2}` for integer `k`; half-integer weights are passed doubled.
    pub fn qpow_half(&self, k: i64) -> Float {
        Float::with_val(self.bits(), (&self.sqrt_q).pow(k as i32))
    }

    /// `q - q^{-1}`.
    pub fn q_minus_qinv(&self) -> Float {
        Float::with_val(self.bits(), &self.q - self.q.clone().recip())
    }

    /// `q + q^{-1}`.
    pub fn q_plus_qinv(&self) -> Float {
        Float::with_val(self.bits(), &self.q + self.q.clone().recip())
    }

    pub fn square_bracket(&self, x: &Float) -> Float {
        Float::with_val(self.bits(), self.double_bracket(x) / self.q_minus_qinv())
    }

    pub fn double_bracket(&self, x: &Float) -> Float {
        let p = self.qpow(x);
        Float::with_val(self.bits(), &p - p.clone().recip())
    }

    pub fn curly_bracket(&self, x: &Float) -> Float {
        let p = self.qpow(x);
        Float::with_val(self.bits(), &p + p.clone().recip())
    }

    /// `[k/2]` for a doubled integer argument, computed from integer powers of
    /// `sqrt(q)` so that representation matrices avoid transcendental calls.
    pub fn square_bracket_half(&self, k: i64) -> Float {
        let p = self.qpow_half(k);
        Float::with_val(self.bits(), (&p - p.clone().recip()) / self.q_minus_qinv())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_floor_and_tolerances() {
        assert_eq!(PrecisionContext::new(32), Err(Error::Precision(32)));
        let p = PrecisionContext::new(256).unwrap();
        assert!(p.tol_rank() > p.tol_residual());
        assert_eq!(p.tol_residual().get_exp(), Some(-127));
        let bad = PrecisionContext::with_tolerances(128, p.float(1e-3), p.float(1e-6));
        assert_eq!(bad, Err(Error::Tolerance));
    }

    #[test]
    fn rejects_q_outside_unit_interval() {
        assert!(matches!(QContext::parse("1", "0.3", 128), Err(Error::QOutOfRange(_))));
        assert!(matches!(QContext::parse("-0.5", "0.3", 128), Err(Error::QOutOfRange(_))));
    }

    #[test]
    fn derived_scalars_are_consistent() {
        let ctx = QContext::parse("0.5", "0.3", 256).unwrap();
        let tol = ctx.prec().tol_residual();
        let t = Float::with_val(256, ctx.qpow(ctx.a()) - ctx.qpow(&Float::with_val(256, -ctx.a())));
        assert!(Float::with_val(256, &t - ctx.t()).abs() < *tol);
        let br = Float::with_val(256, &t / ctx.q_minus_qinv());
        assert!(Float::with_val(256, &br - ctx.bracket_a()).abs() < *tol);
        assert!(ctx.kappa().is_sign_positive());
    }

    #[test]
    fn complex_arithmetic() {
        let p = 128;
        let z = Complex::from_f64(p, 3.0, -4.0);
        assert_eq!(z.abs().to_f64(), 5.0);
        let w = &z * &z.recip();
        assert!((w.re.to_f64() - 1.0).abs() < 1e-30 && w.im.to_f64().abs() < 1e-30);
        let r = Complex::from_f64(p, -4.0, 0.0).sqrt();
        assert_eq!(r.to_c64(), (0.0, 2.0));
        assert_eq!(Complex::i_pow(3, p).to_c64(), (0.0, -1.0));
    }

    #[test]
    fn parse_fraction() {
        let p = PrecisionContext::new(128).unwrap();
        let x = p.parse("3/10").unwrap();
        assert!((x.to_f64() - 0.3).abs() < 1e-16);
    }
}
