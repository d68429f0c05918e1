//! Dense real polynomials in ascending-degree coefficient order.

use rug::Float;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Float>,
    prec: u32,
}

impl Polynomial {
    /// Trailing exact zeros are stripped; the zero polynomial has no coefficients.
    pub fn new(mut coeffs: Vec<Float>, prec: u32) -> Self {
        while coeffs.last().is_some_and(Float::is_zero) {
            coeffs.pop();
        }
        Self { coeffs, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self { coeffs: Vec::new(), prec }
    }

    pub fn constant(c: Float) -> Self {
        let prec = c.prec();
        Self::new(vec![c], prec)
    }

    /// `alpha X + beta`.
    pub fn linear(alpha: &Float, beta: &Float) -> Self {
        let prec = alpha.prec();
        Self::new(vec![Float::with_val(prec, beta), Float::with_val(prec, alpha)], prec)
    }

    pub fn coeffs(&self) -> &[Float] {
        &self.coeffs
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &Float) -> Float {
        let mut acc = Float::new(self.prec);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Float::with_val(self.prec, c * k as u64))
            .collect();
        Self::new(coeffs, self.prec)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let mut c = Float::new(self.prec);
                if let Some(a) = self.coeffs.get(k) {
                    c += a;
                }
                if let Some(b) = other.coeffs.get(k) {
                    c += b;
                }
                c
            })
            .collect();
        Self::new(coeffs, self.prec)
    }

    pub fn scale(&self, r: &Float) -> Self {
        Self::new(self.coeffs.iter().map(|c| Float::with_val(self.prec, c * r)).collect(), self.prec)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.prec);
        }
        let mut coeffs = vec![Float::new(self.prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs, self.prec)
    }

    /// `X -> P(alpha X + beta)` by Horner's scheme over polynomials.
    pub fn affine_compose(&self, alpha: &Float, beta: &Float) -> Self {
        let lin = Self::linear(alpha, beta);
        let mut acc = Self::zero(self.prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// The polynomial `R` with `R(cos t) = c_0 + 2 sum_{i>=1} c_i cos(i t)`,
    /// built from the Chebyshev recursion `T_{i+1} = 2x T_i - T_{i-1}`.
    pub fn fourier_to_chebyshev(even_coeffs: &[Float]) -> Self {
        let prec = even_coeffs.first().map_or(64, Float::prec);
        let two = Float::with_val(prec, 2);
        let two_x = Self::new(vec![Float::new(prec), two.clone()], prec);
        let mut t_prev = Self::constant(Float::with_val(prec, 1));
        let mut t_cur = Self::new(vec![Float::new(prec), Float::with_val(prec, 1)], prec);
        let mut acc = Self::zero(prec);
        for (i, c) in even_coeffs.iter().enumerate() {
            let term = match i {
                0 => t_prev.scale(c),
                1 => t_cur.scale(&Float::with_val(prec, c * &two)),
                _ => {
                    let next = two_x.mul(&t_cur).add(&t_prev.scale(&Float::with_val(prec, -1)));
                    t_prev = std::mem::replace(&mut t_cur, next);
                    t_cur.scale(&Float::with_val(prec, c * &two))
                }
            };
            acc = acc.add(&term);
        }
        acc
    }

    /// Newton-form interpolation through distinct nodes.
    pub fn interpolate(xs: &[Float], ys: &[Float]) -> Result<Self> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::Domain("interpolation needs matching, nonempty node lists".into()));
        }
        let prec = xs[0].prec();
        let n = xs.len();
        let mut dd: Vec<Float> = ys.iter().map(|y| Float::with_val(prec, y)).collect();
        for level in 1..n {
            for i in (level..n).rev() {
                let den = Float::with_val(prec, &xs[i] - &xs[i - level]);
                if den.is_zero() {
                    return Err(Error::Domain("repeated interpolation node".into()));
                }
                dd[i] = Float::with_val(prec, &dd[i] - &dd[i - 1]) / den;
            }
        }
        let mut acc = Self::zero(prec);
        for i in (0..n).rev() {
            let root = Self::linear(&Float::with_val(prec, 1), &Float::with_val(prec, -&xs[i]));
            acc = acc.mul(&root).add(&Self::constant(dd[i].clone()));
        }
        Ok(acc)
    }
}
