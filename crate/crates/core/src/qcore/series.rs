//! q-brackets, q-Pochhammer symbols, terminating basic hypergeometric series
//! and Askey-Wilson polynomials.

use rug::ops::Pow;
use rug::Float;

use super::scalar::{Complex, PrecisionContext, QContext};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BracketKind {
    /// `[x] = (q^x - q^-x)/(q - q^-1)`
    Square,
    /// `[[x]] = q^x - q^-x`
    Double,
    /// `{x} = q^x + q^-x`
    Curly,
}

pub fn bracket(kind: BracketKind, x: &Float, ctx: &QContext) -> Float {
    match kind {
        BracketKind::Square => ctx.square_bracket(x),
        BracketKind::Double => ctx.double_bracket(x),
        BracketKind::Curly => ctx.curly_bracket(x),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PochLength {
    Finite(usize),
    Infinite,
}

/// Value of a q-Pochhammer symbol together with the number of factors used.
/// For the infinite product `factors` is the truncation index.
#[derive(Clone, Debug)]
pub struct PochValue {
    pub value: Complex,
    pub factors: usize,
}

/// `(b; base)_n`. The infinite product stops at the first factor with
/// `|b base^i| < 2^-bits`.
pub fn q_pochhammer(b: &Complex, base: &Float, n: PochLength, prec: &PrecisionContext) -> Result<PochValue> {
    let bits = prec.bits();
    let mut value = Complex::one(bits);
    let mut term = Complex::new(Float::with_val(bits, &b.re), Float::with_val(bits, &b.im));
    match n {
        PochLength::Finite(n) => {
            for _ in 0..n {
                value = &value * &(&Complex::one(bits) - &term);
                term = term.scale(base);
            }
            Ok(PochValue { value, factors: n })
        }
        PochLength::Infinite => {
            if !(*base > 0 && *base < 1) {
                return Err(Error::Domain(format!(
                    "infinite q-Pochhammer needs 0 < base < 1, got {}",
                    base.to_f64()
                )));
            }
            let eps = prec.epsilon();
            let mut factors = 0;
            while term.abs() >= eps {
                value = &value * &(&Complex::one(bits) - &term);
                term = term.scale(base);
                factors += 1;
            }
            Ok(PochValue { value, factors })
        }
    }
}

/// Real finite Pochhammer `(b; base)_n`.
pub fn poch_real(b: &Float, base: &Float, n: usize) -> Float {
    let bits = b.prec().max(base.prec());
    let mut value = Float::with_val(bits, 1);
    let mut term = Float::with_val(bits, b);
    for _ in 0..n {
        value *= Float::with_val(bits, 1 - &term);
        term *= base;
    }
    value
}

/// Smallest `m` such that some numerator parameter equals `base^-m`.
fn termination_index(num: &[Complex], base: &Float, prec: &PrecisionContext) -> Option<usize> {
    let bits = prec.bits();
    let ln_base = Float::with_val(bits, base.ln_ref());
    let mut best: Option<usize> = None;
    for p in num {
        let scale = Float::with_val(bits, p.abs().max(&Float::with_val(bits, 1)));
        if Float::with_val(bits, p.im.abs_ref()) > Float::with_val(bits, prec.tol_residual() * &scale) {
            continue;
        }
        if !p.re.is_sign_positive() || p.re.is_zero() {
            continue;
        }
        let m = Float::with_val(bits, p.re.ln_ref()) / &ln_base;
        let m = -m;
        let mr = m.to_f64().round();
        if !(0.0..=1.0e6).contains(&mr) {
            continue;
        }
        let candidate = Float::with_val(bits, base.pow(-(mr as i32)));
        let err = Float::with_val(bits, &candidate - &p.re).abs();
        if err <= Float::with_val(bits, prec.tol_residual() * &scale) {
            let mu = mr as usize;
            best = Some(best.map_or(mu, |b| b.min(mu)));
        }
    }
    best
}

/// Terminating `r phi s` with `r = s + 1`:
/// `sum_i (num; base)_i / ((den; base)_i (base; base)_i) z^i`.
pub fn basic_hypergeometric(
    num: &[Complex],
    den: &[Complex],
    base: &Float,
    z: &Complex,
    prec: &PrecisionContext,
) -> Result<Complex> {
    if num.len() != den.len() + 1 {
        return Err(Error::Domain(format!(
            "expected {} numerator parameters for {} denominator parameters",
            den.len() + 1,
            den.len()
        )));
    }
    let m = termination_index(num, base, prec).ok_or_else(|| {
        Error::NonTerminating("no numerator parameter of the form base^-m".into())
    })?;
    let bits = prec.bits();
    let one = Complex::one(bits);
    let mut sum = Complex::one(bits);
    let mut term = Complex::one(bits);
    let mut bpow = Float::with_val(bits, 1);
    for i in 0..m {
        let mut ratio = z.clone();
        for a in num {
            ratio = &ratio * &(&one - &a.scale(&bpow));
        }
        let mut d = Complex::from_real(Float::with_val(bits, 1 - Float::with_val(bits, &bpow * base)));
        for b in den {
            d = &d * &(&one - &b.scale(&bpow));
        }
        if d.abs() <= *prec.tol_residual() {
            return Err(Error::Domain(format!("denominator Pochhammer vanishes at index {}", i + 1)));
        }
        term = &term * &(&ratio / &d);
        sum += &term;
        bpow *= base;
    }
    Ok(sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AwForm {
    /// The textbook normalization with base `q^2` throughout.
    #[default]
    Standard,
    /// Base `q` for both the series and the prefactor Pochhammers, with top
    /// parameters `q^-n` and `q^{n+3}`.
    BaseQ,
}

/// Askey-Wilson polynomial `p_n(x; a, b, c, d | base)` for real parameters.
/// The `e^{+-i theta}` Pochhammers are expanded as real quadratics in `x`,
/// so any real `x` is accepted.
pub fn askey_wilson_general(n: usize, x: &Float, params: [&Float; 4], base: &Float) -> Float {
    let bits = x.prec();
    let [a, b, c, d] = params;
    let ab = Float::with_val(bits, a * b);
    let ac = Float::with_val(bits, a * c);
    let ad = Float::with_val(bits, a * d);
    let abcd = Float::with_val(bits, &ab * c) * d;
    let top2 = abcd * Float::with_val(bits, base.pow(n as i32 - 1));
    let pre = Float::with_val(bits, a.pow(-(n as i32)))
        * poch_real(&ab, base, n)
        * poch_real(&ac, base, n)
        * poch_real(&ad, base, n);
    let qn = Float::with_val(bits, base.pow(-(n as i32)));
    let series = terminating_aw_sum(n, x, a, &qn, &top2, [&ab, &ac, &ad], base, base);
    pre * series
}

/// `sum_{k<=n} (t1, t2; base)_k prod_j(1 - 2 u base^j x + u^2 base^2j) /
/// ((d1, d2, d3, base; base)_k) z^k`.
#[allow(clippy::too_many_arguments)]
fn terminating_aw_sum(
    n: usize,
    x: &Float,
    u: &Float,
    t1: &Float,
    t2: &Float,
    den: [&Float; 3],
    base: &Float,
    z: &Float,
) -> Float {
    let bits = x.prec();
    let mut sum = Float::with_val(bits, 1);
    let mut term = Float::with_val(bits, 1);
    let mut bpow = Float::with_val(bits, 1);
    for _ in 0..n {
        let ub = Float::with_val(bits, u * &bpow);
        let quad = Float::with_val(bits, 1 - Float::with_val(bits, 2 * &ub) * x) + ub.square();
        let mut r = Float::with_val(bits, 1 - Float::with_val(bits, t1 * &bpow));
        r *= Float::with_val(bits, 1 - Float::with_val(bits, t2 * &bpow));
        r *= quad;
        r *= z;
        let mut dd = Float::with_val(bits, 1 - Float::with_val(bits, &bpow * base));
        for p in den {
            dd *= Float::with_val(bits, 1 - Float::with_val(bits, p * &bpow));
        }
        term *= r / dd;
        sum += &term;
        bpow *= base;
    }
    sum
}

/// The Askey-Wilson polynomial attached to the spherical matrix coefficients:
/// parameters `(-q^{-2a+1}, -q^{2a+1}, q, q)`.
pub fn askey_wilson(n: usize, x: &Float, ctx: &QContext, form: AwForm) -> Float {
    let bits = ctx.bits();
    let a = ctx.a();
    let x = Float::with_val(bits, x);
    let one_minus_2a = Float::with_val(bits, 1 - Float::with_val(bits, 2 * a));
    let u = -ctx.qpow(&one_minus_2a);
    match form {
        AwForm::Standard => {
            let one_plus_2a = Float::with_val(bits, 1 + Float::with_val(bits, 2 * a));
            let b = -ctx.qpow(&one_plus_2a);
            let q = ctx.q().clone();
            let base = ctx.qpow_int(2);
            askey_wilson_general(n, &x, [&u, &b, &q, &q], &base)
        }
        AwForm::BaseQ => {
            let q = ctx.q();
            let ni = n as i32;
            let two_minus_2a = Float::with_val(bits, 2 - Float::with_val(bits, 2 * a));
            let ac = -ctx.qpow(&two_minus_2a);
            let q2 = ctx.qpow_int(2);
            let sign = if n.is_multiple_of(2) { 1 } else { -1 };
            let pre = Float::with_val(bits, sign) * ctx.qpow(&Float::with_val(bits, &one_minus_2a * ni))
                * poch_real(&q2, q, n)
                * poch_real(&ac, q, n).square();
            let t1 = ctx.qpow_int(-(n as i64));
            let t2 = ctx.qpow_int(n as i64 + 3);
            pre * terminating_aw_sum(n, &x, &u, &t1, &t2, [&q2, &ac, &ac], q, q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> QContext {
        QContext::parse("0.5", "0.3", 256).unwrap()
    }

    fn close(a: &Float, b: &Float, tol: &Float) -> bool {
        Float::with_val(a.prec(), a - b).abs() <= *tol
    }

    #[test]
    fn bracket_small_values() {
        let c = ctx();
        let tol = c.prec().tol_residual();
        let f = |x: i32| c.prec().float(x);
        assert!(bracket(BracketKind::Square, &f(0), &c).is_zero());
        assert!(close(&bracket(BracketKind::Square, &f(1), &c), &f(1), tol));
        assert!(close(&bracket(BracketKind::Square, &f(2), &c), &c.q_plus_qinv(), tol));
        let d = bracket(BracketKind::Double, &f(1), &c);
        assert!(close(&d, &c.q_minus_qinv(), tol));
        let cu = bracket(BracketKind::Curly, &f(1), &c);
        assert!(close(&cu, &c.q_plus_qinv(), tol));
    }

    #[test]
    fn pochhammer_basics() {
        let c = ctx();
        let p = c.prec();
        let q = c.q();
        let b = Complex::from_f64(256, 0.3, 0.1);
        let v0 = q_pochhammer(&b, q, PochLength::Finite(0), p).unwrap();
        assert_eq!(v0.value, Complex::one(256));
        let v1 = q_pochhammer(&b, q, PochLength::Finite(1), p).unwrap();
        assert_eq!(v1.value, &Complex::one(256) - &b);
        let z = q_pochhammer(&Complex::zero(256), q, PochLength::Infinite, p).unwrap();
        assert_eq!(z.value, Complex::one(256));
        assert_eq!(z.factors, 0);
        let bad = q_pochhammer(&b, &p.float(1), PochLength::Infinite, p);
        assert!(matches!(bad, Err(Error::Domain(_))));
    }

    #[test]
    fn infinite_pochhammer_reports_truncation() {
        let c = ctx();
        let b = Complex::from_f64(256, 0.5, 0.0);
        let v = q_pochhammer(&b, c.q(), PochLength::Infinite, c.prec()).unwrap();
        // 0.5^{k+1} < 2^-256 first at k = 256
        assert_eq!(v.factors, 256);
    }

    #[test]
    fn pochhammer_ratio_identity() {
        let c = ctx();
        let p = c.prec();
        let q = c.q();
        let b = Complex::from_f64(256, 0.7, -0.2);
        let inf = q_pochhammer(&b, q, PochLength::Infinite, p).unwrap().value;
        for n in 0..=32 {
            let fin = q_pochhammer(&b, q, PochLength::Finite(n), p).unwrap().value;
            let shifted = b.scale(&c.qpow_int(n as i64));
            let tail = q_pochhammer(&shifted, q, PochLength::Infinite, p).unwrap().value;
            assert!((&(&fin * &tail) - &inf).abs() < *p.tol_residual(), "n = {n}");
        }
    }

    #[test]
    fn hypergeometric_unit_parameter_collapses() {
        let c = ctx();
        let p = c.prec();
        let one = Complex::one(256);
        let x = Complex::from_f64(256, 0.25, 0.5);
        let z = Complex::from_f64(256, 3.0, -1.0);
        let v = basic_hypergeometric(&[one.clone(), x.clone(), x.clone()], &[x.clone(), x], c.q(), &z, p).unwrap();
        assert_eq!(v, one);
        let v = basic_hypergeometric(&[one.clone(), one.clone(), one.clone()], &[z.clone(), z.clone()], c.q(), &z, p)
            .unwrap();
        assert_eq!(v, one);
    }

    #[test]
    fn hypergeometric_two_terms_against_direct_sum() {
        let c = ctx();
        let p = c.prec();
        let q = c.q();
        let qinv = Complex::from_real(Float::with_val(256, q.recip_ref()));
        let b = Complex::from_f64(256, 0.2, 0.1);
        let d = Complex::from_f64(256, -0.4, 0.0);
        let z = Complex::from_f64(256, 0.3, 0.7);
        let got = basic_hypergeometric(&[qinv, b.clone()], &[d.clone()], q, &z, p).unwrap();

        let hp = 1024;
        let qh = Float::with_val(hp, 0.5);
        let one = Complex::one(hp);
        let up = |x: &Complex| Complex::new(Float::with_val(hp, &x.re), Float::with_val(hp, &x.im));
        let qinv_h = Complex::from_real(Float::with_val(hp, qh.recip_ref()));
        let num = &(&one - &qinv_h) * &(&one - &up(&b));
        let den = &(&one - &up(&d)) * &Complex::from_real(Float::with_val(hp, 1 - &qh));
        let want = &one + &(&(&num / &den) * &up(&z));
        let diff = &up(&got) - &want;
        assert!(diff.abs() < *p.tol_residual());
    }

    #[test]
    fn hypergeometric_rejections() {
        let c = ctx();
        let p = c.prec();
        let x = Complex::from_f64(256, 0.3, 0.0);
        let r = basic_hypergeometric(&[x.clone(), x.clone()], &[x.clone()], c.q(), &x, p);
        assert!(matches!(r, Err(Error::NonTerminating(_))));
        let r = basic_hypergeometric(&[x.clone()], &[x.clone()], c.q(), &x, p);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn askey_wilson_degree_zero_is_one() {
        let c = ctx();
        for form in [AwForm::Standard, AwForm::BaseQ] {
            let v = askey_wilson(0, &c.prec().float(0.37), &c, form);
            assert_eq!(v, c.prec().float(1));
        }
    }

    #[test]
    fn askey_wilson_degree_one_two_term_expansion() {
        let c = ctx();
        let hp = 1024;
        let q = Float::with_val(hp, 0.5);
        let a = Float::with_val(hp, 3) / 10;
        let qp = |e: Float| Float::with_val(hp, q.ln_ref()) * e;
        let u = -Float::with_val(hp, qp(Float::with_val(hp, 1 - Float::with_val(hp, 2 * &a)))).exp();
        let b = -Float::with_val(hp, qp(Float::with_val(hp, 1 + Float::with_val(hp, 2 * &a)))).exp();
        let base = Float::with_val(hp, q.square_ref());
        let ab = Float::with_val(hp, &u * &b);
        let ac = Float::with_val(hp, &u * &q);
        // p_1(x) = u^-1 (ab)(ac)(ad) [1 + (1-Q^-1)(1-abcd)(1-2ux+u^2) Q / ((1-ab)(1-ac)^2(1-Q))]
        let x = Float::with_val(hp, 1);
        let abcd = Float::with_val(hp, &ab * &q) * &q;
        let num = Float::with_val(hp, 1 - Float::with_val(hp, base.recip_ref()))
            * Float::with_val(hp, 1 - &abcd)
            * (Float::with_val(hp, 1 - Float::with_val(hp, 2 * &u) * &x) + Float::with_val(hp, u.square_ref()))
            * &base;
        let den = Float::with_val(hp, 1 - &ab) * Float::with_val(hp, 1 - &ac).square() * Float::with_val(hp, 1 - &base);
        let pre = Float::with_val(hp, u.recip_ref()) * Float::with_val(hp, 1 - &ab) * Float::with_val(hp, 1 - &ac).square();
        let want = pre * (1 + num / den);
        let got = askey_wilson(1, &c.prec().float(1), &c, AwForm::Standard);
        assert!(Float::with_val(hp, &got - &want).abs() < *c.prec().tol_residual());
    }

    #[test]
    fn askey_wilson_is_degree_n() {
        use crate::qcore::poly::Polynomial;
        let c = ctx();
        for n in 0..=6 {
            let xs: Vec<Float> = (0..=n).map(|k| c.prec().float(-0.9 + 1.8 * k as f64 / (n.max(1)) as f64)).collect();
            let ys: Vec<Float> = xs.iter().map(|x| askey_wilson(n, x, &c, AwForm::Standard)).collect();
            let p = Polynomial::interpolate(&xs, &ys).unwrap();
            for k in 0..7 {
                let x = c.prec().float(-0.77 + 0.25 * k as f64);
                let want = askey_wilson(n, &x, &c, AwForm::Standard);
                let got = p.eval(&x);
                let scale = Float::with_val(256, want.abs_ref()).max(&c.prec().float(1));
                assert!(Float::with_val(256, &got - &want).abs() / scale < *c.prec().tol_residual(), "n = {n}");
            }
        }
    }
}
