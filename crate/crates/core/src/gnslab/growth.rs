//! Per-degree cocycle growth `<C_L(u^n_i), C_L(u^n_j)>`.

use rug::Float;

use super::gram::{coideal_elements, gram_matrix};
use crate::error::{Error, Result};
use crate::genfun::GenFunctional;
use crate::qcore::CMatrix;
use crate::uqrep::QModel;

#[derive(Clone, Debug)]
pub struct GrowthDegree {
    pub n: u32,
    pub matrix: CMatrix,
    pub diagonal: Vec<Float>,
    /// Slot-basis labels, when the basis comes from an eigensolve.
    pub labels: Option<Vec<Float>>,
    pub spherical: usize,
    pub off_diagonal_max: Float,
    /// Indices whose diagonal entry is below `tol_rank`.
    pub zero_indices: Vec<usize>,
    /// `min_{i != sph} g^n_i`, absent for `n = 0`.
    pub min_nonspherical: Option<Float>,
}

impl GrowthDegree {
    /// Exactly one vanishing entry, sitting at the spherical index.
    pub fn zero_at_spherical(&self) -> bool {
        self.zero_indices == [self.spherical]
    }
}

#[derive(Clone, Debug)]
pub struct GrowthTable {
    pub degrees: Vec<GrowthDegree>,
    pub properness: Vec<Float>,
    pub properness_nondecreasing: bool,
}

impl GrowthTable {
    pub fn off_diagonal_max(&self) -> Float {
        self.degrees
            .iter()
            .map(|d| d.off_diagonal_max.clone())
            .fold(Float::new(self.prec()), |a, b| a.max(&b))
    }

    fn prec(&self) -> u32 {
        self.degrees.first().map_or(64, |d| d.matrix.prec())
    }
}

pub fn growth_table(n_max: u32, functional: &GenFunctional, model: &QModel) -> Result<GrowthTable> {
    if functional.n_max() < 2 * n_max {
        return Err(Error::Domain(format!(
            "growth up to degree {n_max} needs the functional up to {}",
            2 * n_max
        )));
    }
    let bits = model.bits();
    let tol = model.ctx().prec().tol_rank();
    let all = coideal_elements(n_max, functional.convention, model)?;
    let mut degrees = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let elements: Vec<_> = all.iter().filter(|e| e.index.n == n).cloned().collect();
        let matrix = gram_matrix(&elements, model, functional)?;
        let d = elements.len();
        let diagonal: Vec<Float> = (0..d).map(|i| matrix[(i, i)].re.clone()).collect();
        let mut off_diagonal_max = Float::new(bits);
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    off_diagonal_max.max_mut(&matrix[(i, j)].abs());
                }
            }
        }
        let spherical = elements.iter().position(|e| e.index.is_spherical).unwrap_or(0);
        let zero_indices = (0..d).filter(|&i| diagonal[i].clone().abs() < *tol).collect();
        let min_nonspherical = (0..d)
            .filter(|&i| i != spherical)
            .map(|i| diagonal[i].clone())
            .reduce(|a, b| a.min(&b));
        let labels = elements.iter().map(|e| e.index.label.clone()).collect::<Option<Vec<_>>>();
        degrees.push(GrowthDegree {
            n,
            matrix,
            diagonal,
            labels,
            spherical,
            off_diagonal_max,
            zero_indices,
            min_nonspherical,
        });
    }
    let properness: Vec<Float> = degrees.iter().filter_map(|d| d.min_nonspherical.clone()).collect();
    let properness_nondecreasing = properness.windows(2).all(|w| w[0] <= w[1]);
    Ok(GrowthTable { degrees, properness, properness_nondecreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfun::{build_functional, LimitMode};
    use crate::qcore::QContext;
    use crate::uqrep::{BtForm, Convention};

    #[test]
    fn right_growth_is_diagonal_with_one_zero() {
        let m = QModel::new(QContext::parse("0.5", "0.3", 256).unwrap(), BtForm::Canonical);
        let f = build_functional(m.ctx(), 6, LimitMode::Derivative, Convention::Right).unwrap();
        let t = growth_table(3, &f, &m).unwrap();
        assert!(t.degrees[0].diagonal[0].is_zero());
        assert!(t.off_diagonal_max() < *m.ctx().prec().tol_rank());
        for d in &t.degrees {
            assert!(d.zero_at_spherical(), "n = {}", d.n);
            assert_eq!(d.spherical, d.n as usize);
        }
        let want = [vec![0.0957, 0.0, 0.0664], vec![0.0241, 0.1503, 0.0, 0.1131, 0.0137]];
        for (d, w) in t.degrees[1..].iter().zip(&want) {
            for (g, x) in d.diagonal.iter().zip(w) {
                assert!((g.to_f64() - x).abs() < 1e-4, "n = {}: {}", d.n, g.to_f64());
            }
        }
        assert_eq!(t.properness.len(), 3);
    }

    #[test]
    fn left_growth_has_a_one_dimensional_kernel_per_degree() {
        let m = QModel::new(QContext::parse("0.5", "0.3", 256).unwrap(), BtForm::Canonical);
        let f = build_functional(m.ctx(), 6, LimitMode::Derivative, Convention::Left).unwrap();
        let t = growth_table(3, &f, &m).unwrap();
        let tol = m.ctx().prec().tol_rank();
        for d in &t.degrees[1..] {
            let e = crate::qcore::eigh(&d.matrix).unwrap();
            assert_eq!(e.values.iter().filter(|v| Float::with_val(64, v.abs_ref()) < *tol).count(), 1, "n = {}", d.n);
            assert!(d.diagonal.iter().all(|g| *g > *tol));
        }
    }
}
