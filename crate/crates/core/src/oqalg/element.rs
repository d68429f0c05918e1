//! Elements of `O_q(SU(2))` as finitely supported families of coefficient
//! blocks, one per spin.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::vconj;
use crate::qcore::{CMatrix, Complex, PrecisionContext};
use crate::uqrep::{QModel, Spin};

/// `x = sum_s sum_{ij} (F_s)_{ij} u^s_{ij}` with
/// `u^s_{ij}(h) = <xi_i, pi_s(h) xi_j>`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgElement {
    prec: u32,
    blocks: BTreeMap<Spin, CMatrix>,
}

impl AlgElement {
    pub fn zero(prec: u32) -> Self {
        Self { prec, blocks: BTreeMap::new() }
    }

    pub fn unit(prec: u32) -> Self {
        Self::from_block(Spin::ZERO, CMatrix::identity(1, prec))
    }

    pub fn scalar(c: Complex) -> Self {
        let p = c.prec();
        Self::from_block(Spin::ZERO, CMatrix::from_fn(1, 1, p, |_, _| c.clone()))
    }

    pub fn from_block(spin: Spin, f: CMatrix) -> Self {
        assert_eq!(f.rows(), spin.dim(), "block size must match spin {spin}");
        assert!(f.is_square());
        let prec = f.prec();
        let mut blocks = BTreeMap::new();
        blocks.insert(spin, f);
        Self { prec, blocks }
    }

    /// Builds from blocks, dropping the ones that are exactly zero.
    pub fn from_blocks(prec: u32, blocks: impl IntoIterator<Item = (Spin, CMatrix)>) -> Self {
        let mut out = Self::zero(prec);
        for (s, f) in blocks {
            out.add_block(s, &f);
        }
        out.blocks.retain(|_, f| f.entries().iter().any(|x| !x.is_zero()));
        out
    }

    /// `u^s_{v,w}`, block `conj(v) w^T`.
    pub fn matrix_coeff(spin: Spin, v: &[Complex], w: &[Complex]) -> Self {
        let prec = v[0].prec();
        Self::from_block(spin, CMatrix::outer(&vconj(v), w, prec))
    }

    /// `u^s_{ij}` for basis indices in ascending-weight order.
    pub fn basis_coeff(spin: Spin, i: usize, j: usize, prec: u32) -> Self {
        let mut f = CMatrix::zeros(spin.dim(), spin.dim(), prec);
        f[(i, j)] = Complex::one(prec);
        Self::from_block(spin, f)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn blocks(&self) -> &BTreeMap<Spin, CMatrix> {
        &self.blocks
    }

    pub fn block(&self, spin: Spin) -> Option<&CMatrix> {
        self.blocks.get(&spin)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Largest spin carrying a block.
    pub fn degree(&self) -> Option<Spin> {
        self.blocks.keys().next_back().copied()
    }

    fn add_block(&mut self, spin: Spin, f: &CMatrix) {
        match self.blocks.get_mut(&spin) {
            Some(g) => g.add_assign(f),
            None => {
                self.blocks.insert(spin, f.clone());
            }
        }
    }

    pub fn add(&self, other: &AlgElement) -> AlgElement {
        let mut out = self.clone();
        for (s, f) in &other.blocks {
            out.add_block(*s, f);
        }
        out
    }

    pub fn sub(&self, other: &AlgElement) -> AlgElement {
        self.add(&other.scale(&Complex::from_f64(self.prec, -1.0, 0.0)))
    }

    pub fn scale(&self, c: &Complex) -> AlgElement {
        AlgElement { prec: self.prec, blocks: self.blocks.iter().map(|(s, f)| (*s, f.scale(c))).collect() }
    }

    pub fn scale_real(&self, r: &Float) -> AlgElement {
        AlgElement { prec: self.prec, blocks: self.blocks.iter().map(|(s, f)| (*s, f.scale_real(r))).collect() }
    }

    /// Sum of blockwise Frobenius norms.
    pub fn norm(&self) -> Float {
        let mut n = Float::new(self.prec);
        for f in self.blocks.values() {
            n += f.frobenius_norm();
        }
        n
    }

    pub fn distance(&self, other: &AlgElement) -> Float {
        self.sub(other).norm()
    }

    /// Drops blocks whose Frobenius norm is below `tol`.
    pub fn cleaned(mut self, tol: &Float) -> AlgElement {
        self.blocks.retain(|_, f| f.frobenius_norm() >= *tol);
        self
    }

    /// `epsilon(x) = sum_s trace(F_s)`.
    pub fn counit(&self) -> Complex {
        let mut c = Complex::zero(self.prec);
        for f in self.blocks.values() {
            c += &f.trace();
        }
        c
    }

    /// Haar state: the coefficient of the unit.
    pub fn haar(&self) -> Complex {
        self.block(Spin::ZERO).map_or_else(|| Complex::zero(self.prec), |f| f[(0, 0)].clone())
    }

    /// Torus character: `u^s_{ij} -> delta_{ij} e^{i j theta}`, `j` the weight.
    pub fn eval_torus(&self, theta: &Float) -> Complex {
        let mut out = Complex::zero(self.prec);
        for (s, f) in &self.blocks {
            for (j, m) in s.twice_weights().enumerate() {
                let arg = Float::with_val(self.prec, theta * m) / 2u32;
                out.mul_add_assign(&f[(j, j)], &Complex::cis(&arg));
            }
        }
        out
    }

    /// `x(h) = sum_s sum_{ij} (F_s)_{ij} pi_s(h)_{ij}`.
    pub fn pair(&self, word: &Word, model: &QModel) -> Complex {
        let mut out = Complex::zero(self.prec);
        for (s, f) in &self.blocks {
            let p = word.matrix(*s, model);
            for (x, y) in f.entries().iter().zip(p.entries()) {
                out.mul_add_assign(x, y);
            }
        }
        out
    }

    /// Product through the Clebsch-Gordan isometries:
    /// `H_K = W_K^T (F (x) G) conj(W_K)`.
    pub fn mul(&self, other: &AlgElement, model: &QModel) -> Result<AlgElement> {
        let prec = self.prec;
        let mut out = AlgElement::zero(prec);
        for (n, f) in &self.blocks {
            for (m, g) in &other.blocks {
                let cg = model.cg(*n, *m)?;
                let (dn, dm) = (n.dim(), m.dim());
                let gt = g.transpose();
                for (k, w) in &cg.blocks {
                    let dk = k.dim();
                    // columns of (F (x) G) conj(W_K), via F M G^T on each reshaped column
                    let mut fg = CMatrix::zeros(dn * dm, dk, prec);
                    for c in 0..dk {
                        let mm = CMatrix::from_fn(dn, dm, prec, |a, b| w[(a * dm + b, c)].conj());
                        let r = f.matmul(&mm).matmul(&gt);
                        fg.set_column(c, r.entries());
                    }
                    let h = w.transpose().matmul(&fg);
                    out.add_block(*k, &h);
                }
            }
        }
        Ok(out.cleaned(model.ctx().prec().tol_residual()))
    }

    /// Star through the contragredient intertwiner: `H = G^T conj(F) G^{-T}`.
    pub fn star(&self, model: &QModel) -> Result<AlgElement> {
        let mut out = AlgElement::zero(self.prec);
        for (s, f) in &self.blocks {
            let g = model.star(*s)?;
            let h = g.g.transpose().matmul(&f.conj()).matmul(&g.g_inv.transpose());
            out.blocks.insert(*s, h);
        }
        Ok(out)
    }

    /// `h |> x` (left) or `x <| h` (right) for a word `h`.
    pub fn act(&self, side: Side, word: &Word, model: &QModel) -> AlgElement {
        let blocks = self.blocks.iter().map(|(s, f)| {
            let p = word.matrix(*s, model).transpose();
            let h = match side {
                Side::Left => f.matmul(&p),
                Side::Right => p.matmul(f),
            };
            (*s, h)
        });
        AlgElement { prec: self.prec, blocks: blocks.collect() }
    }

    pub fn to_json(&self, prec: &PrecisionContext) -> serde_json::Value {
        let blocks: Vec<BlockJson> = self
            .blocks
            .iter()
            .map(|(s, f)| {
                let part = |im: bool| {
                    (0..f.rows())
                        .map(|i| {
                            (0..f.cols())
                                .map(|j| prec.to_decimal(if im { &f[(i, j)].im } else { &f[(i, j)].re }))
                                .collect()
                        })
                        .collect()
                };
                BlockJson { degree: *s, real: part(false), imag: part(true) }
            })
            .collect();
        serde_json::to_value(blocks).expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value, prec: &PrecisionContext) -> Result<AlgElement> {
        let blocks: Vec<BlockJson> =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(format!("element: {e}")))?;
        let bits = prec.bits();
        let mut out = AlgElement::zero(bits);
        for b in blocks {
            let d = b.degree.dim();
            if b.real.len() != d || b.imag.len() != d || b.real.iter().chain(&b.imag).any(|r| r.len() != d) {
                return Err(Error::Parse(format!("block of degree {} is not {d}x{d}", b.degree)));
            }
            let mut f = CMatrix::zeros(d, d, bits);
            for i in 0..d {
                for j in 0..d {
                    f[(i, j)] = Complex::new(prec.parse(&b.real[i][j])?, prec.parse(&b.imag[i][j])?);
                }
            }
            out.add_block(b.degree, &f);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct BlockJson {
    degree: Spin,
    real: Vec<Vec<String>>,
    imag: Vec<Vec<String>>,
}

/// Random element with independent uniform entries in `[-1, 1] + i[-1, 1]`
/// in every spin up to `max`.
pub fn random_element<R: Rng>(max: Spin, prec: u32, rng: &mut R) -> AlgElement {
    let blocks = (0..=max.twice()).map(|t| {
        let s = Spin::from_twice(t);
        let f = CMatrix::from_fn(s.dim(), s.dim(), prec, |_, _| {
            Complex::from_f64(prec, rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
        });
        (s, f)
    });
    AlgElement::from_blocks(prec, blocks)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gen {
    K,
    KInv,
    E,
    F,
    Bt,
    BtTilde,
}

impl Gen {
    fn matrix(self, spin: Spin, model: &QModel) -> CMatrix {
        let rep = model.rep(spin);
        match self {
            Gen::K => rep.k.clone(),
            Gen::KInv => rep.kinv.clone(),
            Gen::E => rep.e.clone(),
            Gen::F => rep.f.clone(),
            Gen::Bt => model.ops(spin).bt,
            Gen::BtTilde => model.ops(spin).bt_tilde,
        }
    }

    fn counit(self, model: &QModel) -> Complex {
        let p = model.bits();
        match self {
            Gen::K | Gen::KInv => Complex::one(p),
            Gen::E | Gen::F | Gen::BtTilde => Complex::zero(p),
            Gen::Bt => Complex::new(Float::new(p), -model.ctx().bracket_a().clone()),
        }
    }
}

impl FromStr for Gen {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "k" => Gen::K,
            "kinv" | "k^-1" => Gen::KInv,
            "e" => Gen::E,
            "f" => Gen::F,
            "Bt" | "bt" => Gen::Bt,
            "Bt~" | "bt~" | "btilde" => Gen::BtTilde,
            other => return Err(Error::Parse(format!("unknown generator {other:?}"))),
        })
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gen::K => "k",
            Gen::KInv => "kinv",
            Gen::E => "e",
            Gen::F => "f",
            Gen::Bt => "Bt",
            Gen::BtTilde => "Bt~",
        })
    }
}

/// Product `h_1 h_2 ... h_r` of generators; the empty word is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn single(g: Gen) -> Self {
        Word(vec![g])
    }

    pub fn matrix(&self, spin: Spin, model: &QModel) -> CMatrix {
        let mut m = CMatrix::identity(spin.dim(), model.bits());
        for g in &self.0 {
            m = m.matmul(&g.matrix(spin, model));
        }
        m
    }

    pub fn counit(&self, model: &QModel) -> Complex {
        let mut c = Complex::one(model.bits());
        for g in &self.0 {
            c = &c * &g.counit(model);
        }
        c
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()).map(Gen::from_str).collect::<Result<_>>().map(Word)
    }
}

/// `alpha`, `gamma` and their adjoints, read off from the pairing
/// `([[alpha, -q gamma*], [gamma, alpha*]], h) = pi_{1/2}(h)` in the basis
/// `(xi_{1/2}, xi_{-1/2})`.
#[derive(Clone, Debug)]
pub struct Generators {
    pub alpha: AlgElement,
    pub gamma: AlgElement,
    pub alpha_star: AlgElement,
    pub gamma_star: AlgElement,
}

pub fn generators(model: &QModel) -> Generators {
    let p = model.bits();
    let h = Spin::HALF;
    // ascending order: index 0 is xi_{-1/2}, index 1 is xi_{1/2}
    let neg_qinv = Complex::from_real(-model.ctx().qpow_int(-1));
    Generators {
        alpha: AlgElement::basis_coeff(h, 1, 1, p),
        gamma: AlgElement::basis_coeff(h, 0, 1, p),
        alpha_star: AlgElement::basis_coeff(h, 0, 0, p),
        gamma_star: AlgElement::basis_coeff(h, 1, 0, p).scale(&neg_qinv),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::QContext;
    use crate::uqrep::BtForm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model() -> QModel {
        QModel::new(QContext::parse("0.5", "0.3", 256).unwrap(), BtForm::Canonical)
    }

    fn tol(m: &QModel) -> Float {
        m.ctx().prec().tol_residual().clone()
    }

    fn close(a: &Complex, b: &Complex, m: &QModel) -> bool {
        (a - b).abs() < tol(m)
    }

    #[test]
    fn pairing_matches_generator_matrix() {
        let m = model();
        let g = generators(&m);
        let p = m.bits();
        let q = Complex::from_real(m.ctx().q().clone());
        let qi = Complex::from_real(m.ctx().qpow_int(-1));
        let sq = Complex::from_real(m.ctx().sqrt_q().clone());
        let sqi = Complex::from_real(m.ctx().qpow_half(-1));
        let neg_q = Complex::from_real(-m.ctx().q().clone());
        let mqgs = g.gamma_star.scale(&neg_q);
        let zero = Complex::zero(p);
        let k = Word::single(Gen::K);
        let e = Word::single(Gen::E);
        let f = Word::single(Gen::F);
        let table = [
            (&g.alpha, [&q, &zero, &zero]),
            (&mqgs, [&zero, &sq, &zero]),
            (&g.gamma, [&zero, &zero, &sqi]),
            (&g.alpha_star, [&qi, &zero, &zero]),
        ];
        for (x, want) in table {
            for (w, v) in [&k, &e, &f].iter().zip(want) {
                assert!(close(&x.pair(w, &m), v, &m), "{w:?}");
            }
        }
    }

    #[test]
    fn counit_and_haar_of_generators() {
        let m = model();
        let g = generators(&m);
        let one = Complex::one(256);
        assert!(close(&g.alpha.counit(), &one, &m));
        assert!(g.gamma.counit().is_zero());
        assert!(AlgElement::unit(256).haar() == one);
        assert!(g.alpha.haar().is_zero());
    }

    #[test]
    fn defining_relations() {
        let m = model();
        let g = generators(&m);
        let one = AlgElement::unit(256);
        let q = Complex::from_real(m.ctx().q().clone());
        let q2 = Complex::from_real(m.ctx().qpow_int(2));
        let mul = |x: &AlgElement, y: &AlgElement| x.mul(y, &m).unwrap();
        let r1 = mul(&g.alpha_star, &g.alpha).add(&mul(&g.gamma_star, &g.gamma)).sub(&one);
        let r2 = mul(&g.alpha, &g.alpha_star).add(&mul(&g.gamma, &g.gamma_star).scale(&q2)).sub(&one);
        let r3 = mul(&g.gamma_star, &g.gamma).sub(&mul(&g.gamma, &g.gamma_star));
        let r4 = mul(&g.alpha, &g.gamma).sub(&mul(&g.gamma, &g.alpha).scale(&q));
        let r5 = mul(&g.alpha, &g.gamma_star).sub(&mul(&g.gamma_star, &g.alpha).scale(&q));
        for (i, r) in [r1, r2, r3, r4, r5].iter().enumerate() {
            assert!(r.norm() < tol(&m), "relation {i}");
        }
    }

    #[test]
    fn star_of_generators() {
        let m = model();
        let g = generators(&m);
        assert!(g.alpha.star(&m).unwrap().distance(&g.alpha_star) < tol(&m));
        assert!(g.gamma.star(&m).unwrap().distance(&g.gamma_star) < tol(&m));
        assert!(AlgElement::unit(256).star(&m).unwrap() == AlgElement::unit(256));
    }

    #[test]
    fn unit_is_neutral_and_zero_blocks_vanish() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_element(Spin::from_twice(3), 256, &mut rng);
        assert!(AlgElement::unit(256).mul(&x, &m).unwrap().distance(&x) < tol(&m));
        assert!(x.sub(&x).cleaned(&tol(&m)).is_zero());
    }

    #[test]
    fn star_is_an_involutive_antihomomorphism() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..3 {
            let x = random_element(Spin::from_twice(2), 256, &mut rng);
            let y = random_element(Spin::from_twice(3), 256, &mut rng);
            let xs = x.star(&m).unwrap();
            assert!(xs.star(&m).unwrap().distance(&x) < tol(&m));
            let lhs = x.mul(&y, &m).unwrap().star(&m).unwrap();
            let rhs = y.star(&m).unwrap().mul(&xs, &m).unwrap();
            assert!(lhs.distance(&rhs) < tol(&m));
        }
    }

    #[test]
    fn associativity_and_counit_multiplicative() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = Spin::from_twice(3);
        let (x, y, z) = (random_element(b, 256, &mut rng), random_element(b, 256, &mut rng), random_element(b, 256, &mut rng));
        let l = x.mul(&y, &m).unwrap().mul(&z, &m).unwrap();
        let r = x.mul(&y.mul(&z, &m).unwrap(), &m).unwrap();
        assert!(l.distance(&r) < tol(&m));
        let e = x.mul(&y, &m).unwrap().counit();
        assert!(close(&e, &(&x.counit() * &y.counit()), &m));
    }

    #[test]
    fn product_grading() {
        let m = model();
        let p = 256;
        let x = AlgElement::basis_coeff(Spin::integer(2), 1, 3, p);
        let y = AlgElement::basis_coeff(Spin::from_twice(3), 0, 2, p);
        let xy = x.mul(&y, &m).unwrap();
        assert!(xy.blocks().keys().all(|s| s.twice() >= 1 && s.twice() <= 7 && s.twice() % 2 == 1));
    }

    #[test]
    fn torus_character_is_multiplicative() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_element(Spin::integer(1), 256, &mut rng);
        let y = random_element(Spin::from_twice(3), 256, &mut rng);
        let xy = x.mul(&y, &m).unwrap();
        for j in 0..16 {
            let th = Float::with_val(256, j) * Float::with_val(256, 0.37);
            let want = &x.eval_torus(&th) * &y.eval_torus(&th);
            assert!(close(&xy.eval_torus(&th), &want, &m));
        }
    }

    #[test]
    fn k_acts_multiplicatively() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_element(Spin::integer(1), 256, &mut rng);
        let y = random_element(Spin::HALF, 256, &mut rng);
        let k = Word::single(Gen::K);
        let lhs = x.mul(&y, &m).unwrap().act(Side::Left, &k, &m);
        let rhs = x.act(Side::Left, &k, &m).mul(&y.act(Side::Left, &k, &m), &m).unwrap();
        assert!(lhs.distance(&rhs) < tol(&m));
        let one = AlgElement::unit(256);
        assert_eq!(one.act(Side::Left, &k, &m), one);
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = random_element(Spin::integer(1), 256, &mut rng);
        let v = x.to_json(m.ctx().prec());
        let back = AlgElement::from_json(&v, m.ctx().prec()).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn word_parsing() {
        let w: Word = "k e Bt".parse().unwrap();
        assert_eq!(w, Word(vec![Gen::K, Gen::E, Gen::Bt]));
        assert!("k g".parse::<Word>().is_err());
    }
}
