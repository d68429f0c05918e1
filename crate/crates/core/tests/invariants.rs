use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;

use podles::genfun::{build_functional, p_poly, LimitMode};
use podles::gnslab::GnsSpace;
use podles::oqalg::random_element;
use podles::qcore::QContext;
use podles::uqrep::{kernel_residual, BtForm, Convention, QModel, Spin};

fn model(q: f64, a: f64) -> QModel {
    QModel::new(QContext::parse(&format!("{q}"), &format!("{a}"), 192).unwrap(), BtForm::Canonical)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn star_is_an_antimultiplicative_involution(q in 0.1f64..0.9, seed in any::<u64>()) {
        let m = model(q, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_element(Spin::integer(1), 192, &mut rng);
        let y = random_element(Spin::HALF, 192, &mut rng);
        let tol = m.ctx().prec().tol_residual().clone();
        prop_assert!(x.star(&m).unwrap().star(&m).unwrap().distance(&x) < tol);
        let lhs = x.mul(&y, &m).unwrap().star(&m).unwrap();
        let rhs = y.star(&m).unwrap().mul(&x.star(&m).unwrap(), &m).unwrap();
        prop_assert!(lhs.distance(&rhs) < tol);
    }

    #[test]
    fn counit_is_multiplicative(q in 0.1f64..0.9, seed in any::<u64>()) {
        let m = model(q, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_element(Spin::integer(1), 192, &mut rng);
        let y = random_element(Spin::integer(1), 192, &mut rng);
        let e = x.mul(&y, &m).unwrap().counit();
        let want = &x.counit() * &y.counit();
        prop_assert!((&e - &want).abs() < *m.ctx().prec().tol_residual());
    }

    #[test]
    fn spherical_kernel_and_normalization(q in 0.05f64..0.95, a in 0.0f64..0.5, n in 0u32..5) {
        let m = model(q, a);
        let k = kernel_residual(&m.rep(Spin::integer(n)), m.ctx()).unwrap();
        prop_assert!(k < *m.ctx().prec().tol_residual());
        let p = p_poly(n, m.ctx()).unwrap();
        let d = Float::with_val(192, p.eval(&Float::with_val(192, 1)) - 1u32).abs();
        prop_assert!(d < *m.ctx().prec().tol_residual());
    }

    #[test]
    fn conditional_positivity(q in 0.2f64..0.8, a in 0.0f64..0.5, left in any::<bool>()) {
        let m = model(q, a);
        let conv = if left { Convention::Left } else { Convention::Right };
        let f = Arc::new(build_functional(m.ctx(), 4, LimitMode::Derivative, conv).unwrap());
        let s = GnsSpace::build(2, f, &m).unwrap();
        let neg = Float::with_val(192, -m.ctx().prec().tol_rank());
        prop_assert!(*s.min_eigenvalue() >= neg);
        prop_assert!(s.hermitian_defect < *m.ctx().prec().tol_residual());
    }
}
