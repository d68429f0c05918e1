//! Kernel coefficients, spherical vectors and coideal weight bases.

use rug::Float;
use serde::{Deserialize, Serialize};

use super::rep::{left_weight_operator, op_matrices, BtForm, SpinRep};
use super::spin::Spin;
use crate::error::{Error, Result};
use crate::qcore::linalg::{fix_phase_first, gram_schmidt, normalize, vdot, vnorm, vsub};
use crate::qcore::series::{basic_hypergeometric, poch_real};
use crate::qcore::{eigh, CMatrix, Complex, QContext};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Left,
    #[default]
    Right,
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Convention::Left => "left",
            Convention::Right => "right",
        })
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" => Ok(Convention::Left),
            "right" => Ok(Convention::Right),
            other => Err(Error::Parse(format!("unknown convention {other:?}"))),
        }
    }
}

fn integer_spin(spin: Spin) -> Result<u32> {
    spin.as_integer()
        .ok_or_else(|| Error::Domain(format!("spin {spin} is not an integer; no spherical vector exists")))
}

/// `c_i^{s,-a}` for `i = -s..s` ascending, from the terminating `3 phi 2`
/// closed form.
pub fn kernel_coeffs(spin: Spin, ctx: &QContext) -> Result<Vec<Complex>> {
    let s = integer_spin(spin)? as i64;
    let bits = ctx.bits();
    let q2 = ctx.qpow_int(2);
    let z = Complex::from_real(q2.clone());
    let a = ctx.a();
    let top3 = {
        let e = Float::with_val(bits, 2 * a) - 2 * s;
        -ctx.qpow(&e)
    };
    let den = [Complex::from_real(ctx.qpow_int(-4 * s)), Complex::zero(bits)];
    (-s..=s)
        .map(|i| {
            let num = [
                Complex::from_real(ctx.qpow_int(2 * (i - s))),
                Complex::from_real(ctx.qpow_int(-2 * s)),
                Complex::from_real(top3.clone()),
            ];
            let phi = basic_hypergeometric(&num, &den, &q2, &z, ctx.prec())?;
            // (sqrt -1)^i q^{-(s-a) i} q^{i^2/2} / ((q^2;q2)_{s+i} (q^2;q^2)_{s-i})^{1/2}
            let expo = Float::with_val(bits, a - s) * i + Float::with_val(bits, i * i) / 2;
            let mag = ctx.qpow(&expo);
            let norm = Float::with_val(bits, poch_real(&q2, &q2, (s + i) as usize) * poch_real(&q2, &q2, (s - i) as usize));
            let pre = Complex::i_pow(i, bits).scale(&(mag / norm.sqrt()));
            Ok(&pre * &phi)
        })
        .collect()
}

/// Rotates `v` so its top-weight entry `xi_s` is real positive, falling back
/// to the first significant entry when that component vanishes.
pub fn fix_phase_top(v: &mut [Complex], tol: &Float) {
    match v.last() {
        Some(x) if x.abs() > *tol => {
            let ph = x.phase().conj();
            for y in v.iter_mut() {
                *y = &*y * &ph;
            }
        }
        _ => fix_phase_first(v, tol),
    }
}

/// `normalize(sum_i q^{i/2} c_i xi_i)`: the kernel vector of the adjoint
/// operator, twisted by `k^{1/2}`.
pub fn left_spherical(spin: Spin, ctx: &QContext) -> Result<Vec<Complex>> {
    let c = kernel_coeffs(spin, ctx)?;
    let raw: Vec<Complex> = spin.twice_weights().zip(&c).map(|(m, ci)| ci.scale(&ctx.qpow_half(m / 2))).collect();
    let mut v = normalize(&raw)?;
    fix_phase_top(&mut v, ctx.prec().tol_residual());
    Ok(v)
}

/// Unit vector in `H_s` spanning the spherical line for the given convention.
pub fn spherical_vector(rep: &SpinRep, convention: Convention, form: BtForm, ctx: &QContext) -> Result<Vec<Complex>> {
    match convention {
        Convention::Left => left_spherical(rep.spin, ctx),
        Convention::Right => {
            integer_spin(rep.spin)?;
            let basis = weight_eigenbasis(rep, form, ctx)?;
            Ok(basis.vectors[basis.spherical].clone())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisSource {
    /// Eigenbasis of a Hermitian weight operator; labels are its eigenvalues.
    Eigen,
    /// Orthonormal completion of the spherical vector by the eigenvectors of
    /// the right weight operator; carries no eigenvalue labels.
    OrthonormalExtension,
}

/// Orthonormal basis of `H_n` with a distinguished spherical member.
#[derive(Clone, Debug)]
pub struct WeightBasis {
    pub spin: Spin,
    pub convention: Convention,
    pub form: BtForm,
    pub source: BasisSource,
    /// Eigenvalues in ascending order when `source` is `Eigen`.
    pub values: Option<Vec<Float>>,
    pub vectors: Vec<Vec<Complex>>,
    pub spherical: usize,
}

impl WeightBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn spherical_vector(&self) -> &[Complex] {
        &self.vectors[self.spherical]
    }

    pub fn as_matrix(&self) -> CMatrix {
        let prec = self.vectors[0][0].prec();
        CMatrix::from_columns(&self.vectors, self.dim(), prec)
    }
}

fn labelled_eigenbasis(op: &CMatrix, ctx: &QContext) -> Result<(Vec<Float>, Vec<Vec<Complex>>, usize)> {
    let bits = ctx.bits();
    let e = eigh(op)?;
    let tol = ctx.prec().tol_rank();
    for w in e.values.windows(2) {
        if Float::with_val(bits, &w[1] - &w[0]) < *tol {
            return Err(Error::NeedsPrecision(format!(
                "eigenvalues {} and {} closer than tol_rank",
                w[0].to_f64(),
                w[1].to_f64()
            )));
        }
    }
    let (sph, dist) = e
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| (j, Float::with_val(bits, v - ctx.bracket_a()).abs()))
        .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
        .expect("nonempty spectrum");
    if dist > *tol {
        return Err(Error::Structural(format!(
            "no eigenvalue within tol_rank of [a]; nearest is off by {}",
            dist.to_f64()
        )));
    }
    let vectors = (0..op.rows())
        .map(|j| {
            let mut v = e.vector(j);
            fix_phase_top(&mut v, ctx.prec().tol_residual());
            v
        })
        .collect();
    Ok((e.values, vectors, sph))
}

/// Eigenbasis of the right weight operator `W = i pi(B_t)`.
pub fn weight_eigenbasis(rep: &SpinRep, form: BtForm, ctx: &QContext) -> Result<WeightBasis> {
    integer_spin(rep.spin)?;
    let w = op_matrices(rep, form, ctx).w;
    let (values, vectors, spherical) = labelled_eigenbasis(&w, ctx)?;
    Ok(WeightBasis {
        spin: rep.spin,
        convention: Convention::Right,
        form,
        source: BasisSource::Eigen,
        values: Some(values),
        vectors,
        spherical,
    })
}

/// Left-convention basis. With the canonical form this is the eigenbasis of
/// the left weight operator, whose `[a]` eigenvector is replaced by the pinned
/// left spherical vector (they agree up to phase). With the scalar-term form no
/// compatible operator exists and the basis is an orthonormal extension.
pub fn left_basis(rep: &SpinRep, form: BtForm, ctx: &QContext) -> Result<WeightBasis> {
    let eta = left_spherical(rep.spin, ctx)?;
    match form {
        BtForm::Canonical => {
            let y = left_weight_operator(rep, ctx);
            let (values, mut vectors, spherical) = labelled_eigenbasis(&y, ctx)?;
            let overlap = vdot(&vectors[spherical], &eta).abs();
            let defect = Float::with_val(ctx.bits(), 1 - overlap);
            if defect > *ctx.prec().tol_rank() {
                return Err(Error::Structural(format!(
                    "left spherical vector is not the [a] eigenvector (overlap defect {})",
                    defect.to_f64()
                )));
            }
            vectors[spherical] = eta;
            Ok(WeightBasis {
                spin: rep.spin,
                convention: Convention::Left,
                form,
                source: BasisSource::Eigen,
                values: Some(values),
                vectors,
                spherical,
            })
        }
        BtForm::ScalarTerm => {
            let right = weight_eigenbasis(rep, form, ctx)?;
            let sph = right.spherical;
            let mut seed = vec![eta.clone()];
            seed.extend(right.vectors.iter().enumerate().filter(|(j, _)| *j != sph).map(|(_, v)| v.clone()));
            let mut on = gram_schmidt(&seed, ctx.prec().tol_rank());
            if on.len() != rep.dim() {
                return Err(Error::Structural("orthonormal extension lost rank".into()));
            }
            for v in on.iter_mut().skip(1) {
                fix_phase_top(v, ctx.prec().tol_residual());
            }
            on.remove(0);
            on.insert(sph, eta);
            Ok(WeightBasis {
                spin: rep.spin,
                convention: Convention::Left,
                form,
                source: BasisSource::OrthonormalExtension,
                values: None,
                vectors: on,
                spherical: sph,
            })
        }
    }
}

pub fn coideal_basis(rep: &SpinRep, convention: Convention, form: BtForm, ctx: &QContext) -> Result<WeightBasis> {
    match convention {
        Convention::Left => left_basis(rep, form, ctx),
        Convention::Right => weight_eigenbasis(rep, form, ctx),
    }
}

/// `|X_{-a} v|` for the closed-form kernel vector `v_i = q^{i/2} c_i`.
pub fn kernel_residual(rep: &SpinRep, ctx: &QContext) -> Result<Float> {
    let c = kernel_coeffs(rep.spin, ctx)?;
    let v: Vec<Complex> = rep.spin.twice_weights().zip(&c).map(|(m, ci)| ci.scale(&ctx.qpow_half(m / 2))).collect();
    let x = op_matrices(rep, BtForm::Canonical, ctx).x_minus_a;
    Ok(vnorm(&x.matvec(&v)))
}

/// `max_i |c_i - c_{-i}|`.
pub fn kernel_symmetry_defect(spin: Spin, ctx: &QContext) -> Result<Float> {
    let c = kernel_coeffs(spin, ctx)?;
    let mut worst = Float::new(ctx.bits());
    for (x, y) in c.iter().zip(c.iter().rev()) {
        worst = worst.max(&(x - y).abs());
    }
    Ok(worst)
}

/// Distance between `v` and the unit-phase multiple of `w` closest to it.
pub fn phase_distance(v: &[Complex], w: &[Complex]) -> Float {
    let ph = vdot(w, v).phase();
    let rot: Vec<Complex> = w.iter().map(|x| x * &ph).collect();
    vnorm(&vsub(v, &rot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::singular_values;

    fn ctx() -> QContext {
        QContext::parse("0.5", "0.3", 256).unwrap()
    }

    fn tol100() -> Float {
        Float::with_val(256, Float::with_val(256, 1) >> 100)
    }

    #[test]
    fn top_coefficient_closed_form() {
        let c = ctx();
        for s in 0..=4i64 {
            let coeffs = kernel_coeffs(Spin::integer(s as u32), &c).unwrap();
            let expo = Float::with_val(256, c.a() - s) * s + Float::with_val(256, s * s) / 2;
            let q2 = c.qpow_int(2);
            let mag = c.qpow(&expo) / poch_real(&q2, &q2, 2 * s as usize).sqrt();
            let want = Complex::i_pow(s, 256).scale(&mag);
            assert!((&coeffs[2 * s as usize] - &want).abs() < tol100(), "s = {s}");
        }
        let c0 = kernel_coeffs(Spin::ZERO, &c).unwrap();
        assert_eq!(c0, vec![Complex::one(256)]);
    }

    #[test]
    fn kernel_ranks() {
        let c = ctx();
        for s2 in 0..=12u32 {
            let rep = SpinRep::new(Spin::from_twice(s2), &c);
            let x = op_matrices(&rep, BtForm::Canonical, &c).x_minus_a;
            let sv = singular_values(&x).unwrap();
            let deficiency = sv.iter().filter(|v| **v < *c.prec().tol_rank()).count();
            assert_eq!(deficiency, if s2 % 2 == 0 { 1 } else { 0 }, "2s = {s2}");
            if s2 % 2 == 0 {
                assert!(kernel_residual(&rep, &c).unwrap() < tol100());
                assert!(kernel_symmetry_defect(rep.spin, &c).unwrap() < tol100());
            }
        }
    }

    #[test]
    fn half_integer_has_no_kernel_coefficients() {
        assert!(matches!(kernel_coeffs(Spin::HALF, &ctx()), Err(Error::Domain(_))));
    }

    #[test]
    fn left_spherical_spin_one_closed_form() {
        let c = ctx();
        let bits = 256;
        let v = left_spherical(Spin::integer(1), &c).unwrap();
        let mid = Float::with_val(bits, c.q_plus_qinv().sqrt().recip() * c.t());
        let want = vec![
            Complex::from_real(c.qpow_half(-1)),
            Complex::new(Float::new(bits), mid),
            Complex::from_real(c.qpow_half(1)),
        ];
        let want = normalize(&want).unwrap();
        assert!(phase_distance(&v, &want) < tol100());
        // flipping the sign of the middle component leaves the kernel
        let mut flipped = want.clone();
        flipped[1] = -&flipped[1];
        assert!(phase_distance(&v, &flipped) > Float::with_val(bits, 0.1));
    }

    #[test]
    fn right_spherical_scalar_term_spin_one() {
        let c = ctx();
        let rep = SpinRep::new(Spin::integer(1), &c);
        let v = spherical_vector(&rep, Convention::Right, BtForm::ScalarTerm, &c).unwrap();
        let want = normalize(&[Complex::from_real(c.q().clone()), Complex::zero(256), Complex::one(256)]).unwrap();
        assert!(phase_distance(&v, &want) < tol100());
        assert!(v[1].abs() < tol100());
    }

    #[test]
    fn trivial_spin_spherical_vectors() {
        let c = ctx();
        let rep = SpinRep::new(Spin::ZERO, &c);
        for conv in [Convention::Left, Convention::Right] {
            for form in [BtForm::Canonical, BtForm::ScalarTerm] {
                let v = spherical_vector(&rep, conv, form, &c).unwrap();
                assert_eq!(v, vec![Complex::one(256)]);
            }
        }
    }

    #[test]
    fn scalar_term_spectra_symmetric_about_bracket() {
        let c = ctx();
        for n in 1..=4 {
            let rep = SpinRep::new(Spin::integer(n), &c);
            let b = weight_eigenbasis(&rep, BtForm::ScalarTerm, &c).unwrap();
            let vals = b.values.unwrap();
            let d = vals.len();
            for j in 0..d {
                let sum = Float::with_val(256, &vals[j] + &vals[d - 1 - j]);
                let dev = Float::with_val(256, sum - Float::with_val(256, c.bracket_a() * 2u32)).abs();
                assert!(dev < *c.prec().tol_rank(), "n = {n}");
            }
        }
    }

    #[test]
    fn left_basis_contains_pinned_spherical_vector() {
        let c = ctx();
        for n in 0..=3 {
            let rep = SpinRep::new(Spin::integer(n), &c);
            let eta = left_spherical(rep.spin, &c).unwrap();
            for form in [BtForm::Canonical, BtForm::ScalarTerm] {
                let b = left_basis(&rep, form, &c).unwrap();
                assert_eq!(b.spherical_vector(), &eta[..]);
                let m = b.as_matrix();
                let id = CMatrix::identity(rep.dim(), 256);
                assert!(m.adjoint().matmul(&m).distance(&id) < *c.prec().tol_residual());
            }
        }
    }
}
