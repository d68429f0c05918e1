//! Rank test for the Gaussian part of the cocycle.

use rayon::prelude::*;
use rug::Float;

use super::gram::GnsSpace;
use crate::error::{Error, Result};
use crate::qcore::linalg::{singular_values, vnorm};
use crate::qcore::{CMatrix, Complex};
use crate::uqrep::QModel;

#[derive(Clone, Debug)]
pub struct GaussianReport {
    pub n: u32,
    /// Rank of the whole truncated image.
    pub dim_image: usize,
    /// Rank of the image of degrees `<= N - 1`.
    pub dim_low: usize,
    pub rank_ng: usize,
    pub dim_gaussian_part: usize,
    pub generated: usize,
    pub excluded: usize,
    pub max_discard: Float,
    /// Descending singular values of the normalized defect vectors projected
    /// onto the low image.
    pub singular_values: Vec<Float>,
    /// Smallest singular value counted in the rank, and the largest one not.
    pub gap: (Option<Float>, Option<Float>),
}

impl GaussianReport {
    pub fn rank_gap(&self) -> Option<Float> {
        self.gap.0.clone()
    }
}

/// Spans the defect vectors `C(bc) - eps(b) C(c) - C(b) eps(c)` for basis
/// pairs with `deg b + deg c <= N` and measures how much of the degree
/// `<= N - 1` image they fill.
pub fn gaussian_rank(space: &GnsSpace, model: &QModel) -> Result<GaussianReport> {
    let bits = model.bits();
    let n = space.n;
    if n == 0 {
        return Err(Error::Domain("the Gaussian rank test needs N >= 1".into()));
    }
    let tol = model.ctx().prec().tol_rank().clone();
    let els = &space.elements;
    let pairs: Vec<(usize, usize)> = (0..els.len())
        .flat_map(|i| (0..els.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| els[i].index.n + els[j].index.n <= n)
        .collect();
    let defects: Vec<Result<Vec<Complex>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let b = els[i].element();
            let c = els[j].element();
            let bc = space.coordinates(&b.mul(&c, model)?, model)?;
            let (eb, ec) = (els[i].counit(), els[j].counit());
            let mut v = bc;
            v[j] -= &eb;
            v[i] -= &ec;
            Ok(space.to_orthonormal.matvec(&v))
        })
        .collect();

    let low: Vec<usize> = (0..els.len()).filter(|&i| els[i].index.n < n).collect();
    let (basis, _) = space.subspace_image(&low, model)?;
    let dim_low = basis.cols();

    let half = Float::with_val(bits, 0.5);
    let mut max_discard = Float::new(bits);
    let mut excluded = 0;
    let mut generated = 0;
    let mut cols = Vec::new();
    for y in defects {
        let y = y?;
        let norm = vnorm(&y);
        if norm <= tol {
            continue;
        }
        generated += 1;
        let inv = Float::with_val(bits, norm.recip_ref());
        let y: Vec<Complex> = y.iter().map(|c| c.scale(&inv)).collect();
        let coeffs = basis.adjoint_matvec(&y);
        let kept_mass = Float::with_val(bits, vnorm(&coeffs).square_ref());
        let discard = Float::with_val(bits, 1 - kept_mass);
        max_discard.max_mut(&discard);
        if discard > half {
            excluded += 1;
            continue;
        }
        cols.push(coeffs);
    }
    let singular_values = if cols.is_empty() {
        Vec::new()
    } else {
        singular_values(&CMatrix::from_columns(&cols, dim_low, bits))?
    };
    let rank_ng = singular_values.iter().filter(|s| **s > tol).count();
    let gap = (
        rank_ng.checked_sub(1).map(|i| singular_values[i].clone()),
        singular_values.get(rank_ng).cloned(),
    );
    Ok(GaussianReport {
        n,
        dim_image: space.rank,
        dim_low,
        rank_ng,
        dim_gaussian_part: dim_low.saturating_sub(rank_ng),
        generated,
        excluded,
        max_discard,
        singular_values,
        gap,
    })
}
