//! Representations of `U_q(su(2))`, Clebsch-Gordan isometries, spherical
//! vectors and the star intertwiners, plus a shared cache of all of them.

pub mod antipode;
pub mod cg;
pub mod rep;
pub mod spherical;
pub mod spin;

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

pub use antipode::{
    star_intertwiner, validate_r_candidate, RCandidate, RCandidateEntry, RCandidateReport, StarIntertwiner,
};
pub use cg::{cg_decompose, CgDecomposition};
pub use rep::{left_weight_operator, op_matrices, BtForm, OpMatrices, SpinRep};
pub use spherical::{
    coideal_basis, kernel_coeffs, kernel_residual, kernel_symmetry_defect, left_spherical, phase_distance,
    spherical_vector, weight_eigenbasis, BasisSource, Convention, WeightBasis,
};
pub use spin::Spin;

use crate::error::Result;
use crate::qcore::QContext;

/// Write-once map: concurrent misses may compute the same value twice, but
/// the first stored value wins and every reader sees that one.
struct Memo<K, V> {
    map: Mutex<HashMap<K, Arc<V>>>,
}

impl<K: Eq + Hash + Copy, V> Memo<K, V> {
    fn new() -> Self {
        Self { map: Mutex::new(HashMap::new()) }
    }

    fn get_or_try(&self, key: K, make: impl FnOnce() -> Result<V>) -> Result<Arc<V>> {
        if let Some(v) = self.map.lock().expect("memo poisoned").get(&key) {
            return Ok(Arc::clone(v));
        }
        let value = Arc::new(make()?);
        let mut map = self.map.lock().expect("memo poisoned");
        Ok(Arc::clone(map.entry(key).or_insert(value)))
    }
}

/// The deformation context together with lazily built, shared
/// representation data. Safe to share across threads.
pub struct QModel {
    ctx: QContext,
    form: BtForm,
    reps: Memo<Spin, SpinRep>,
    cgs: Memo<(Spin, Spin), CgDecomposition>,
    stars: Memo<Spin, StarIntertwiner>,
    bases: Memo<(Spin, Convention), WeightBasis>,
}

impl QModel {
    pub fn new(ctx: QContext, form: BtForm) -> Self {
        Self {
            ctx,
            form,
            reps: Memo::new(),
            cgs: Memo::new(),
            stars: Memo::new(),
            bases: Memo::new(),
        }
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn form(&self) -> BtForm {
        self.form
    }

    pub fn bits(&self) -> u32 {
        self.ctx.bits()
    }

    pub fn rep(&self, s: Spin) -> Arc<SpinRep> {
        self.reps
            .get_or_try(s, || Ok(SpinRep::new(s, &self.ctx)))
            .expect("representation construction is infallible")
    }

    pub fn cg(&self, n: Spin, m: Spin) -> Result<Arc<CgDecomposition>> {
        self.cgs.get_or_try((n, m), || cg_decompose(&self.rep(n), &self.rep(m), &self.ctx))
    }

    pub fn star(&self, s: Spin) -> Result<Arc<StarIntertwiner>> {
        self.stars.get_or_try(s, || star_intertwiner(&self.rep(s), &self.ctx))
    }

    /// Coideal slot basis of `H_n` for the convention (integer spins only).
    pub fn basis(&self, s: Spin, convention: Convention) -> Result<Arc<WeightBasis>> {
        self.bases.get_or_try((s, convention), || coideal_basis(&self.rep(s), convention, self.form, &self.ctx))
    }

    pub fn ops(&self, s: Spin) -> OpMatrices {
        op_matrices(&self.rep(s), self.form, &self.ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::thread;

    #[test]
    fn memo_is_shared_across_threads() {
        let ctx = QContext::parse("0.5", "0.3", 128).unwrap();
        let model = Arc::new(QModel::new(ctx, BtForm::Canonical));
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let m = Arc::clone(&model);
                thread::spawn(move || m.cg(Spin::integer(1), Spin::HALF).unwrap())
            })
            .collect();
        let got: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        let again = model.cg(Spin::integer(1), Spin::HALF).unwrap();
        for g in &got {
            assert!(Arc::ptr_eq(g, &again) || g.blocks.len() == again.blocks.len());
        }
        assert!(got.iter().filter(|g| Arc::ptr_eq(g, &again)).count() >= 1);
    }
}
