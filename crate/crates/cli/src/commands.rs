//! One function per subcommand. Each returns the tables to emit and the
//! invariants it asserted.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;

use podles::genfun::{build_functional, fd_limit, q_closed_form, q_poly, theta_grid, RouteVerdict};
use podles::gnslab::{gaussian_rank, growth_table, GnsSpace};
use podles::oqalg::random_element;
use podles::qcore::{eigh, AwForm, Complex, QContext};
use podles::uqrep::{
    kernel_coeffs, kernel_residual, kernel_symmetry_defect, validate_r_candidate, Convention, QModel, Spin,
};
use podles::{Error, Result};

use crate::config::RunConfig;
use crate::output::{Check, Report, Table};

pub struct Ctx {
    pub model: QModel,
}

impl Ctx {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let q = QContext::parse(&cfg.q, &cfg.a, cfg.precision_bits)?;
        Ok(Self { model: QModel::new(q, cfg.bt_form) })
    }

    fn q(&self) -> &QContext {
        self.model.ctx()
    }

    fn d(&self, x: &Float) -> String {
        self.q().prec().to_decimal(x)
    }

    fn tol_residual(&self) -> &Float {
        self.q().prec().tol_residual()
    }

    fn tol_rank(&self) -> &Float {
        self.q().prec().tol_rank()
    }

    fn below(&self, name: impl Into<String>, value: &Float, limit: &Float) -> Check {
        Check::new(name, self.d(value), format!("< {}", self.d(limit)), value < limit)
    }
}

fn pow2(bits: u32, e: i32) -> Float {
    Float::with_val(bits, 1) << e
}

fn aw_name(f: AwForm) -> &'static str {
    match f {
        AwForm::Standard => "standard",
        AwForm::BaseQ => "base-q",
    }
}

fn verdict_name(v: RouteVerdict) -> &'static str {
    match v {
        RouteVerdict::Agree => "agree",
        RouteVerdict::NormalizationMismatch => "normalization-mismatch",
        RouteVerdict::ShapeMismatch => "shape-mismatch",
    }
}

pub fn spherical(c: &Ctx, cfg: &RunConfig) -> Result<Report> {
    let mut r = Report::default();
    let mut vectors = Table::new("spherical_vectors", 1, &["convention", "n", "weight", "re", "im"]);
    let mut coeffs = Table::new("kernel_coefficients", 1, &["n", "i", "re", "im"]);
    let mut resid = Table::new("kernel_residuals", 1, &["n", "kernel_residual", "symmetry_defect"]);
    let mut worst = Float::new(c.model.bits());
    for n in 0..=cfg.n_max {
        let spin = Spin::integer(n);
        for conv in [Convention::Left, Convention::Right] {
            let b = c.model.basis(spin, conv)?;
            for (m, v) in spin.twice_weights().zip(b.spherical_vector()) {
                vectors.push(vec![conv.to_string(), n.to_string(), (m / 2).to_string(), c.d(&v.re), c.d(&v.im)]);
            }
        }
        for (i, ci) in (-(n as i64)..=n as i64).zip(kernel_coeffs(spin, c.q())?) {
            coeffs.push(vec![n.to_string(), i.to_string(), c.d(&ci.re), c.d(&ci.im)]);
        }
        let k = kernel_residual(&c.model.rep(spin), c.q())?;
        let s = kernel_symmetry_defect(spin, c.q())?;
        worst.max_mut(&k);
        resid.push(vec![n.to_string(), c.d(&k), c.d(&s)]);
    }
    r.checks.push(c.below("max kernel residual", &worst, c.tol_residual()));
    r.tables = vec![vectors, coeffs, resid];
    Ok(r)
}

pub fn awcheck(c: &Ctx, cfg: &RunConfig) -> Result<Report> {
    let bits = c.model.bits();
    let mut r = Report::default();
    let mut summary = Table::new(
        "awcheck",
        1,
        &["n", "form", "cross_check_residual", "ratio", "proportional_residual", "verdict"],
    );
    let mut grid = Table::new("awcheck_grid", 1, &["n", "j", "theta", "x", "q_fourier", "q_closed_standard"]);
    let thetas = theta_grid(cfg.theta_grid, c.q());
    for n in 0..=cfg.n_max {
        for form in [AwForm::Standard, AwForm::BaseQ] {
            let rep = q_poly(n, c.q(), form, Some(cfg.theta_grid))?;
            summary.push(vec![
                n.to_string(),
                aw_name(form).into(),
                c.d(&rep.cross_check_residual),
                c.d(&rep.ratio),
                c.d(&rep.proportional_residual),
                verdict_name(rep.verdict).into(),
            ]);
            if form == AwForm::Standard {
                r.checks.push(c.below(format!("Q_{n} two-route residual"), &rep.cross_check_residual, c.tol_rank()));
                for (j, th) in thetas.iter().enumerate() {
                    let x = Float::with_val(bits, th.cos_ref());
                    let closed = q_closed_form(n, &x, c.q(), form)?;
                    grid.push(vec![
                        n.to_string(),
                        j.to_string(),
                        c.d(th),
                        c.d(&x),
                        c.d(&rep.q.eval(&x)),
                        c.d(&closed),
                    ]);
                }
            }
        }
    }
    r.tables = vec![summary, grid];
    Ok(r)
}

pub fn genfun(c: &Ctx, cfg: &RunConfig) -> Result<Report> {
    let bits = c.model.bits();
    let mut r = Report::default();
    let f = build_functional(c.q(), cfg.n_max, cfg.limit_mode, cfg.convention)?;
    let mut t = Table::new(
        "genfun",
        1,
        &["n", "p_at_one", "raw_derivative", "raw_unscaled", "fd_oracle", "fd_lambda_steps", "lambda"],
    );
    let one = Float::with_val(bits, 1);
    let fd_tol = pow2(bits, -40);
    for d in &f.degrees {
        let p1 = d.p.eval(&one);
        let fd = fd_limit(&d.p, c.q(), 8, cfg.lambda_steps);
        t.push(vec![
            d.n.to_string(),
            c.d(&p1),
            c.d(&d.raw_derivative),
            c.d(&d.raw_unscaled),
            c.d(&d.fd_oracle),
            c.d(&fd),
            c.d(&d.lambda),
        ]);
        let dev = Float::with_val(bits, &p1 - 1u32).abs();
        r.checks.push(c.below(format!("|P_{}(1) - 1|", d.n), &dev, c.tol_residual()));
        if d.n > 0 {
            let rel = Float::with_val(bits, &d.fd_oracle - &d.raw_derivative).abs() / d.raw_derivative.clone().abs();
            r.checks.push(c.below(format!("FD relative error n={}", d.n), &rel, &fd_tol));
        }
    }
    r.checks.push(Check::new("lambda_0", c.d(f.lambda(0)), "= 0", f.lambda(0).is_zero()));
    r.tables = vec![t];
    Ok(r)
}

fn functional(c: &Ctx, cfg: &RunConfig, n_max: u32) -> Result<Arc<podles::genfun::GenFunctional>> {
    Ok(Arc::new(build_functional(c.q(), n_max, cfg.limit_mode, cfg.convention)?))
}

pub fn gram(c: &Ctx, cfg: &RunConfig) -> Result<Report> {
    let n = cfg.gram_n;
    let mut r = Report::default();
    let f = functional(c, cfg, 2 * n)?;
    let s = match GnsSpace::build(n, f, &c.model) {
        Ok(s) => s,
        Err(Error::Falsification(msg)) => {
            r.checks.push(Check::new("Gram positive semidefinite", msg, ">= -tol_rank", false));
            return Ok(r);
        }
        Err(e) => return Err(e),
    };
    let mut basis = Table::new("gram_basis", 1, &["index", "n", "i", "is_spherical"]);
    for (k, e) in s.elements.iter().enumerate() {
        basis.push(vec![k.to_string(), e.index.n.to_string(), e.index.i.to_string(), e.index.is_spherical.to_string()]);
    }
    let mut matrix = Table::new("gram_matrix", 1, &["row", "col", "re", "im"]);
    for i in 0..s.dim() {
        for j in 0..s.dim() {
            let g = &s.gram[(i, j)];
            matrix.push(vec![i.to_string(), j.to_string(), c.d(&g.re), c.d(&g.im)]);
        }
    }
    let mut spectrum = Table::new("gram_spectrum", 1, &["N", "index", "eigenvalue"]);
    for (k, v) in s.eigenvalues.iter().enumerate() {
        spectrum.push(vec![n.to_string(), k.to_string(), c.d(v)]);
    }
    let mut summary = Table::new("gram_summary", 1, &["N", "dim", "rank", "zero_max", "kept_min", "hermitian_defect"]);
    summary.push(vec![
        n.to_string(),
        s.dim().to_string(),
        s.rank.to_string(),
        c.d(&s.gap.0),
        c.d(&s.gap.1),
        c.d(&s.hermitian_defect),
    ]);
    r.checks.push(c.below("Gram hermitian defect", &s.hermitian_defect, c.tol_residual()));
    let neg = Float::with_val(c.model.bits(), -c.tol_rank());
    r.checks.push(Check::new(
        "Gram min eigenvalue",
        c.d(s.min_eigenvalue()),
        format!(">= {}", c.d(&neg)),
        *s.min_eigenvalue() >= neg,
    ));
    r.tables = vec![basis, matrix, spectrum, summary];
    Ok(r)
}

pub fn growth(c: &Ctx, cfg: &RunConfig) -> Result<Report> {
    let bits = c.model.bits();
    let mut r = Report::default();
    let f = functional(c, cfg, 2 * cfg.n_max)?;
    let g = growth_table(cfg.n_max, &f, &c.model)?;
    let mut t = Table::new("growth", 1, &["n", "i", "eigenvalue_label", "g", "is_spherical"]);
    let mut per = Table::new(
        "growth_degrees",
        1,
        &["n", "off_diagonal_max", "zero_indices", "spherical_index", "kernel_dim", "min_nonspherical"],
    );
    for d in &g.degrees {
        for (i, gi) in d.diagonal.iter().enumerate() {
            let label = d.labels.as_ref().map_or(String::new(), |l| c.d(&l[i]));
            t.push(vec![d.n.to_string(), i.to_string(), label, c.d(gi), (i == d.spherical).to_string()]);
        }
        let e = eigh(&d.matrix)?;
        let kernel = e.values.iter().filter(|v| Float::with_val(bits, v.abs_ref()) < *c.tol_rank()).count();
        let zeros = d.zero_indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        per.push(vec![
            d.n.to_string(),
            c.d(&d.off_diagonal_max),
            zeros,
            d.spherical.to_string(),
            kernel.to_string(),
            d.min_nonspherical.as_ref().map_or(String::new(), |m| c.d(m)),
        ]);
        match cfg.convention {
            Convention::Right => {
                r.checks.push(Check::new(
                    format!("n={} single zero diagonal at spherical index", d.n),
                    format!("{:?}", d.zero_indices),
                    format!("[{}]", d.spherical),
                    d.zero_at_spherical(),
                ));
            }
            // the left cocycle matrix is not diagonal in this basis; its
            // kernel is still one-dimensional
            Convention::Left => {
                r.checks.push(Check::new(format!("n={} kernel dimension", d.n), kernel.to_string(), "= 1", kernel == 1));
            }
        }
    }
    if cfg.convention == Convention::Right {
        r.checks.push(c.below("growth off-diagonal max", &g.off_diagonal_max(), c.tol_rank()));
    }
    let mut prop = Table::new("properness", 1, &["n", "min_nonspherical_g", "nondecreasing"]);
    for (k, v) in g.properness.iter().enumerate() {
        prop.push(vec![(k + 1).to_string(), c.d(v), g.properness_nondecreasing.to_string()]);
    }
    r.tables = vec![t, per, prop];
    Ok(r)
}

pub fn gaussian(c: &Ctx, cfg: &RunConfig) -> Result<Report> {
    let bits = c.model.bits();
    let n = cfg.gram_n;
    let mut r = Report::default();
    let f = functional(c, cfg, 2 * n)?;
    let s = GnsSpace::build(n, f, &c.model)?;
    let g = gaussian_rank(&s, &c.model)?;
    let mut t = Table::new(
        "gaussian",
        1,
        &["N", "dim_image", "dim_low", "rank_NG", "dim_gaussian_part", "generated", "excluded", "max_discard_mass", "rank_gap"],
    );
    let gap = g.rank_gap();
    t.push(vec![
        n.to_string(),
        g.dim_image.to_string(),
        g.dim_low.to_string(),
        g.rank_ng.to_string(),
        g.dim_gaussian_part.to_string(),
        g.generated.to_string(),
        g.excluded.to_string(),
        c.d(&g.max_discard),
        gap.as_ref().map_or(String::new(), |x| c.d(x)),
    ]);
    let mut sv = Table::new("gaussian_singular_values", 1, &["N", "index", "singular_value"]);
    for (k, v) in g.singular_values.iter().enumerate() {
        sv.push(vec![n.to_string(), k.to_string(), c.d(v)]);
    }
    r.checks.push(Check::new(
        "dim_gaussian_part",
        g.dim_gaussian_part.to_string(),
        "= 0",
        g.dim_gaussian_part == 0,
    ));
    let min_gap = pow2(bits, -40);
    // an empty low image has nothing to separate
    let gap_ok = g.dim_low == 0 || gap.as_ref().is_some_and(|x| *x >= min_gap);
    r.checks.push(Check::new(
        "rank gap",
        gap.as_ref().map_or("none".into(), |x| c.d(x)),
        format!(">= {}", c.d(&min_gap)),
        gap_ok,
    ));
    if !gap_ok {
        r.advisory = Some("rank decision is not separated from the noise floor; raise precision_bits".into());
    }
    r.tables = vec![t, sv];
    Ok(r)
}

pub fn validate(c: &Ctx, cfg: &RunConfig) -> Result<Report> {
    let bits = c.model.bits();
    let mut r = Report::default();
    let max_twice = 2 * cfg.n_max;
    let mut rel = Table::new("relations", 1, &["spin", "relation", "residual"]);
    let mut worst = Float::new(bits);
    for t in 0..=max_twice {
        let s = Spin::from_twice(t);
        for (name, res) in c.model.rep(s).relation_residuals(c.q()) {
            worst.max_mut(&res);
            rel.push(vec![s.to_string(), name.into(), c.d(&res)]);
        }
    }
    r.checks.push(c.below("max relation residual", &worst, c.tol_residual()));

    let mut cg = Table::new("clebsch_gordan", 1, &["n", "m", "isometry", "completeness", "intertwining"]);
    let mut worst_cg = Float::new(bits);
    let cap = max_twice.min(4);
    for tn in 0..=cap {
        for tm in 0..=cap {
            let (n, m) = (Spin::from_twice(tn), Spin::from_twice(tm));
            let d = c.model.cg(n, m)?;
            let res = [
                d.isometry_residual(),
                d.completeness_residual(),
                d.intertwining_residual(&c.model.rep(n), &c.model.rep(m), c.q()),
            ];
            for x in &res {
                worst_cg.max_mut(x);
            }
            cg.push(vec![n.to_string(), m.to_string(), c.d(&res[0]), c.d(&res[1]), c.d(&res[2])]);
        }
    }
    r.checks.push(c.below("max Clebsch-Gordan residual", &worst_cg, c.tol_residual()));

    let mut rc = Table::new(
        "r_candidates",
        1,
        &["spin", "form", "candidate", "residual_plus", "residual_minus", "hermitian_defect", "spectrum_deviation"],
    );
    for t in 1..=cap {
        let s = Spin::from_twice(t);
        let report = validate_r_candidate(&c.model.rep(s), c.model.form(), c.q())?;
        for e in &report.entries {
            rc.push(vec![
                s.to_string(),
                report.form.to_string(),
                e.candidate.name().into(),
                c.d(&e.residual_plus),
                c.d(&e.residual_minus),
                c.d(&e.hermitian_defect),
                e.spectrum_deviation.as_ref().map_or(String::new(), |x| c.d(x)),
            ]);
        }
    }

    // torus evaluation is a character: sampled pairs from the seed
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut torus = Table::new("torus_samples", 1, &["sample", "theta", "residual"]);
    let mut worst_t = Float::new(bits);
    for k in 0..8 {
        let x = random_element(Spin::integer(1), bits, &mut rng);
        let y = random_element(Spin::HALF, bits, &mut rng);
        let th = Float::with_val(bits, k as f64 * 0.7 + 0.1);
        let xy = x.mul(&y, &c.model)?.eval_torus(&th);
        let prod: Complex = &x.eval_torus(&th) * &y.eval_torus(&th);
        let res = (&xy - &prod).abs();
        worst_t.max_mut(&res);
        torus.push(vec![k.to_string(), c.d(&th), c.d(&res)]);
    }
    r.checks.push(c.below("torus multiplicativity", &worst_t, c.tol_rank()));
    r.tables = vec![rel, cg, rc, torus];
    Ok(r)
}
