use podles::genfun::{eval_in_algebra, p_poly};
use podles::oqalg::{podles_basis, AlgElement};
use podles::qcore::QContext;
use podles::uqrep::{BtForm, Convention, QModel};

fn spherical(n: u32, conv: Convention, m: &QModel) -> AlgElement {
    podles_basis(n, conv, m).unwrap().into_iter().find(|(i, _)| i.is_spherical).unwrap().1
}

#[test]
fn p_n_of_the_degree_one_spherical_element() {
    for (q, a) in [("0.5", "0.3"), ("0.8", "0.05"), ("1/3", "0.5")] {
        let m = QModel::new(QContext::parse(q, a, 256).unwrap(), BtForm::Canonical);
        for conv in [Convention::Left, Convention::Right] {
            let u1 = spherical(1, conv, &m);
            for n in 0..=3 {
                let p = p_poly(n, m.ctx()).unwrap();
                let got = eval_in_algebra(&p, &u1, &m).unwrap();
                let want = spherical(n, conv, &m);
                let d = got.distance(&want);
                assert!(d < *m.ctx().prec().tol_residual(), "q={q} a={a} {conv} n={n}: {}", d.to_f64());
            }
        }
    }
}
