//! Numbered self-check suites behind the `validate` subcommand and the
//! acceptance tests.
//!
//! Each suite pits one advertised contract of the crate against an
//! independent route: closed forms against adaptive quadrature, engine
//! bookkeeping against direct Gram expansions, discrete transforms against
//! rational witnesses. Every case yields a [`CaseRow`] carrying the measured
//! value and the bound it is held to; failing rows are reported as data,
//! never silently dropped.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::afd::{
    afd_run, correlation_objective, escalate_order, mp_run, project_interpolate, rate_harness,
    HardyFunction, KernelCombination, OrthoSystem, RateRow, SearchConfig,
};
use crate::cones::{
    cone_szego_diag, poisson_lp_bound_check, poisson_lp_bound_check_octant,
    poisson_lp_tight_candidate, Cone2D, PolygonalCone,
};
use crate::error::{AfdError, Result};
use crate::hardy::{hardy_split, reconstruct, BoundarySamples, OctantSignature, SpectralRep};
use crate::kernels::{
    ip_phi_phi, phi_eval, phi_norm, phi_norm_sq, DictElement, MultiIndex, TubePoint,
};
use crate::linalg::{cholesky, lower_triangular_inverse, CMatrix};
use crate::numerics::{integrate_nd, Domain, Grid, QuadratureSpec};

/// One measured check: the owning suite, a stable case label, the measured
/// value, the bound it was compared against, and the verdict.
#[derive(Debug, Clone)]
pub struct CaseRow {
    pub suite: &'static str,
    pub case: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CaseRow {
    fn upper(suite: &'static str, case: impl Into<String>, measured: f64, bound: f64) -> CaseRow {
        CaseRow { suite, case: case.into(), measured, bound, pass: measured <= bound }
    }
}

impl fmt::Display for CaseRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{} measured={:.6e} bound={:.6e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.suite,
            self.case,
            self.measured,
            self.bound
        )
    }
}

/// All suite names, in the order [`run_all`] executes them.
pub fn suite_names() -> &'static [&'static str] {
    &[
        "norms",
        "inner-products",
        "interpolation",
        "energy",
        "recovery",
        "rate",
        "decay",
        "split",
        "escalation",
        "cones",
        "pursuit",
    ]
}

/// Run one suite by name.
pub fn run_suite(name: &str) -> Result<Vec<CaseRow>> {
    match name {
        "norms" => suite_norms(),
        "inner-products" => suite_inner_products(),
        "interpolation" => suite_interpolation(),
        "energy" => suite_energy(),
        "recovery" => suite_recovery(),
        "rate" => suite_rate(),
        "decay" => suite_decay(),
        "split" => suite_split(),
        "escalation" => suite_escalation(),
        "cones" => suite_cones(),
        "pursuit" => suite_pursuit(),
        other => Err(AfdError::InvalidParameter(format!(
            "unknown suite {other:?}; expected one of {:?}",
            suite_names()
        ))),
    }
}

/// Run every suite and concatenate the rows.
pub fn run_all() -> Result<Vec<CaseRow>> {
    let mut rows = Vec::new();
    for name in suite_names() {
        rows.extend(run_suite(name)?);
    }
    Ok(rows)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo * (hi / lo).powf(rng.gen_range(0.0..1.0))
}

fn draw_alpha(rng: &mut ChaCha8Rng, n: usize, axis_cap: u32) -> MultiIndex {
    MultiIndex::new((0..n).map(|_| rng.gen_range(0..=axis_cap)).collect())
}

fn draw_point(rng: &mut ChaCha8Rng, n: usize, x: (f64, f64), y: (f64, f64)) -> Result<TubePoint> {
    let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(x.0..x.1)).collect();
    let ys: Vec<f64> = (0..n).map(|_| log_uniform(rng, y.0, y.1)).collect();
    TubePoint::from_xy(&xs, &ys)
}

fn point_distance(a: &TubePoint, b: &TubePoint) -> f64 {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(u, v)| (u - v).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn draw_separated(
    rng: &mut ChaCha8Rng,
    n: usize,
    count: usize,
    x: (f64, f64),
    y: (f64, f64),
    min_sep: f64,
) -> Result<Vec<TubePoint>> {
    let mut pts: Vec<TubePoint> = Vec::with_capacity(count);
    let mut guard = 0usize;
    while pts.len() < count {
        guard += 1;
        if guard > 100_000 {
            return Err(AfdError::InvalidParameter(format!(
                "could not place {count} points separated by {min_sep} in the given box"
            )));
        }
        let p = draw_point(rng, n, x, y)?;
        if pts.iter().all(|q| point_distance(&p, q) >= min_sep) {
            pts.push(p);
        }
    }
    Ok(pts)
}

fn random_kernels(
    rng: &mut ChaCha8Rng,
    points: &[TubePoint],
    mag: (f64, f64),
    normalized: bool,
) -> Result<KernelCombination> {
    let mut terms = Vec::with_capacity(points.len());
    for z in points {
        let alpha = MultiIndex::zeros(z.dim());
        let scale = if normalized { 1.0 / phi_norm(&alpha, &z.y())? } else { 1.0 };
        let c =
            Complex64::from_polar(rng.gen_range(mag.0..mag.1) * scale, rng.gen_range(0.0..TAU));
        terms.push((DictElement::new(alpha, z.clone())?, c));
    }
    KernelCombination::new(terms)
}

/// Closed-form element norms against adaptive quadrature of `|phi|^2` over
/// the distinguished boundary, plus the constant scale separating the two
/// normalization conventions the formula is written in.
fn suite_norms() -> Result<Vec<CaseRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let spec1 = QuadratureSpec::default();
    let spec2 = QuadratureSpec { rel_tol: 1e-8, ..QuadratureSpec::default() };
    let mut rows = Vec::new();
    let mut ratio_dev = [0.0f64; 2];
    for case in 0..50 {
        let n = if case < 30 { 1 } else { 2 };
        let alpha = draw_alpha(&mut rng, n, if n == 1 { 4 } else { 2 });
        let z = draw_point(&mut rng, n, (-2.0, 2.0), (0.4, 2.0))?;
        let e = DictElement::new(alpha.clone(), z.clone())?;
        let closed = phi_norm_sq(&alpha, &z.y())?;
        let (domain, spec) = if n == 1 { (Domain::Line, &spec1) } else { (Domain::Plane, &spec2) };
        let quad = integrate_nd(
            &|x: &[f64]| {
                let w: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                match phi_eval(&e, &w) {
                    Ok(v) => Complex64::new(v.norm_sqr(), 0.0),
                    Err(_) => Complex64::default(),
                }
            },
            &domain,
            spec,
        )?
        .re;
        rows.push(CaseRow::upper(
            "norms",
            format!("closed-form-{n}d-{case:02}"),
            (quad - closed).abs() / closed,
            1e-6,
        ));
        // The same integral against the variant of the closed form that
        // drops the (2 pi)^{-n} prefactor; their ratio must be exactly that
        // prefactor, which is what makes the corrected form the right one.
        let unscaled = closed * TAU.powi(n as i32);
        ratio_dev[n - 1] = ratio_dev[n - 1].max((quad / unscaled * TAU.powi(n as i32) - 1.0).abs());
    }
    rows.push(CaseRow::upper("norms", "scale-ratio-1d", ratio_dev[0], 1e-6));
    rows.push(CaseRow::upper("norms", "scale-ratio-2d", ratio_dev[1], 1e-6));
    Ok(rows)
}

/// Closed-form pair inner products against quadrature of `phi_1 conj(phi_2)`
/// on the boundary. Pairs whose inner product is negligible against the two
/// norms are redrawn, since a relative comparison means nothing there.
fn suite_inner_products() -> Result<Vec<CaseRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let spec1 = QuadratureSpec::default();
    let spec2 = QuadratureSpec { rel_tol: 1e-8, ..QuadratureSpec::default() };
    let mut rows = Vec::new();
    for case in 0..50 {
        let n = if case < 35 { 1 } else { 2 };
        let cap = if n == 1 { 4 } else { 2 };
        let mut drawn = None;
        for _ in 0..500 {
            let a1 = draw_alpha(&mut rng, n, cap);
            let a2 = draw_alpha(&mut rng, n, cap);
            let z1 = draw_point(&mut rng, n, (-1.5, 1.5), (0.4, 2.0))?;
            let z2 = if case % 7 == 3 {
                z1.clone()
            } else {
                draw_point(&mut rng, n, (-1.5, 1.5), (0.4, 2.0))?
            };
            let e1 = DictElement::new(a1.clone(), z1.clone())?;
            let e2 = DictElement::new(a2.clone(), z2.clone())?;
            let ip = ip_phi_phi(&e1, &e2)?;
            let floor = 1e-2 * phi_norm(&a1, &z1.y())? * phi_norm(&a2, &z2.y())?;
            if ip.norm() >= floor {
                drawn = Some((e1, e2, ip));
                break;
            }
        }
        let (e1, e2, ip) = drawn.ok_or_else(|| {
            AfdError::InvalidParameter("could not draw a well-correlated element pair".into())
        })?;
        let (domain, spec) = if n == 1 { (Domain::Line, &spec1) } else { (Domain::Plane, &spec2) };
        let quad = integrate_nd(
            &|x: &[f64]| {
                let w: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                match (phi_eval(&e1, &w), phi_eval(&e2, &w)) {
                    (Ok(v1), Ok(v2)) => v1 * v2.conj(),
                    _ => Complex64::default(),
                }
            },
            &domain,
            spec,
        )?;
        rows.push(CaseRow::upper(
            "inner-products",
            format!("pair-{n}d-{case:02}"),
            (quad - ip).norm() / ip.norm(),
            1e-6,
        ));
    }
    Ok(rows)
}

/// The fixed-node projection reproduces the target exactly at its nodes, and
/// growing the node set never loses captured energy.
fn suite_interpolation() -> Result<Vec<CaseRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let sizes = [3usize, 5, 8, 4, 6];
    let dims = [1usize, 1, 1, 2, 2];
    let mut rows = Vec::new();
    for (&count, &n) in sizes.iter().zip(&dims) {
        let anchors = draw_separated(&mut rng, n, 4, (-1.5, 1.5), (0.5, 1.8), 0.4)?;
        let f = random_kernels(&mut rng, &anchors, (0.3, 1.0), false)?;
        let nodes = draw_separated(&mut rng, n, count, (-2.0, 2.0), (0.4, 2.0), 0.35)?;
        let out = project_interpolate(&f, &nodes)?;
        let mut worst = 0.0f64;
        for node in &nodes {
            let got = out.eval(node.coords())?;
            let want = f.eval(node.coords())?;
            worst = worst.max((got - want).norm());
        }
        rows.push(CaseRow::upper("interpolation", format!("nodes-{n}d-{count}"), worst, 1e-8));
        let drift = out
            .residual_history
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0);
        rows.push(CaseRow::upper(
            "interpolation",
            format!("nested-energy-{n}d-{count}"),
            drift,
            0.0,
        ));
    }
    Ok(rows)
}

/// The running residual bookkeeping of the adaptive loop against the direct
/// expansion `||F - G_m||^2 = ||F||^2 - 2 Re <F, G_m> + ||G_m||^2`, with
/// `G_m` rebuilt from the triangular rows and the exact element Gram matrix.
fn suite_energy() -> Result<Vec<CaseRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut rows = Vec::new();
    for case in 0..5 {
        let pts = draw_separated(&mut rng, 1, 4, (-2.0, 2.0), (0.5, 1.6), 0.5)?;
        let f = random_kernels(&mut rng, &pts, (0.4, 1.0), true)?;
        let mut cfg = SearchConfig::new(vec![(-2.5, 2.5)], vec![(0.4, 2.0)])?;
        cfg.x_count = 21;
        cfg.y_count = 8;
        cfg.nm_iters = 120;
        let out = afd_run(&f, 8, 0.0, &cfg)?;
        let elems = out.system.elements();
        let m_total = out.terms();
        let mut gram = vec![vec![Complex64::default(); m_total]; m_total];
        for i in 0..m_total {
            for j in 0..m_total {
                gram[i][j] = ip_phi_phi(&elems[i], &elems[j])?;
            }
        }
        let fphi: Vec<Complex64> =
            elems.iter().map(|e| f.inner_phi(e)).collect::<Result<_>>()?;
        let nsq = f.norm_sq();
        let hist = &out.residual_history;
        let mut worst = 0.0f64;
        for m in 1..=m_total {
            let mut a = vec![Complex64::default(); m];
            for (k, c) in out.coeffs.iter().take(m).enumerate() {
                for (i, t) in out.system.rows()[k].iter().enumerate() {
                    a[i] += c * t;
                }
            }
            let mut cross = Complex64::default();
            let mut quad = Complex64::default();
            for i in 0..m {
                cross += a[i].conj() * fphi[i];
                for j in 0..m {
                    quad += a[i] * a[j].conj() * gram[i][j];
                }
            }
            let expanded = nsq - 2.0 * cross.re + quad.re;
            let direct = hist[m] * hist[m];
            worst = worst.max((expanded - direct).abs() / nsq);
        }
        rows.push(CaseRow::upper("energy", format!("identity-{case}"), worst, 1e-8));
    }
    Ok(rows)
}

/// A single normalized kernel is recovered in one adaptive term: near-zero
/// residual and an anchor estimate within the stated distance of the truth.
fn suite_recovery() -> Result<Vec<CaseRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut rows = Vec::new();
    for case in 0..10 {
        let n = if case < 7 { 1 } else { 2 };
        let b = draw_point(&mut rng, n, (-2.5, 2.5), (0.5, 2.0))?;
        let alpha = MultiIndex::zeros(n);
        let coeff =
            Complex64::from_polar(1.0 / phi_norm(&alpha, &b.y())?, rng.gen_range(0.0..TAU));
        let f = KernelCombination::new(vec![(DictElement::new(alpha, b.clone())?, coeff)])?;
        let mut cfg = SearchConfig::new(vec![(-3.0, 3.0); n], vec![(0.3, 3.0); n])?;
        if n == 1 {
            cfg.x_count = 33;
            cfg.y_count = 16;
        } else {
            cfg.x_count = 17;
            cfg.y_count = 8;
            cfg.nm_iters = 400;
        }
        let out = afd_run(&f, 1, 0.0, &cfg)?;
        let z_star = &out.system.points()[0];
        rows.push(CaseRow::upper(
            "recovery",
            format!("residual-{n}d-{case:02}"),
            out.final_residual(),
            1e-4,
        ));
        rows.push(CaseRow::upper(
            "recovery",
            format!("anchor-{n}d-{case:02}"),
            point_distance(z_star, &b),
            1e-3,
        ));
    }
    Ok(rows)
}

/// Seeded random targets with unit-kernel expansions of known coefficient
/// mass `M` keep every residual under the `M / sqrt(m)` envelope.
fn suite_rate() -> Result<Vec<CaseRow>> {
    let mut rows = Vec::new();
    for seed in 0..10u64 {
        let n = if seed < 8 { 1 } else { 2 };
        let mut cfg = SearchConfig::new(vec![(-3.0, 3.0); n], vec![(0.4, 2.0); n])?;
        if n == 1 {
            cfg.x_count = 21;
            cfg.y_count = 8;
        } else {
            cfg.x_count = 9;
            cfg.y_count = 4;
        }
        cfg.nm_iters = 80;
        let report = rate_harness(10, 20, &cfg, seed)?;
        let worst = report
            .rows
            .iter()
            .map(|r| r.residual / r.bound)
            .fold(f64::NEG_INFINITY, f64::max);
        rows.push(CaseRow {
            suite: "rate",
            case: format!("envelope-{n}d-seed{seed}"),
            measured: worst,
            bound: 1.0,
            pass: report.rows.iter().all(RateRow::ok),
        });
    }
    Ok(rows)
}

/// Normalized correlations of a fixed band-limited target die off along the
/// three escape paths: anchor height to zero, to infinity, and real part to
/// infinity. A closed-form value of the spectral sum pins the target down.
fn suite_decay() -> Result<Vec<CaseRow>> {
    let tgrid = Grid::centered(&[512], &[1.6])?;
    let mut density = vec![Complex64::default(); tgrid.len()];
    for (k, d) in density.iter_mut().enumerate() {
        let t = tgrid.coord(0, k);
        if t > 0.0 {
            *d = Complex64::new(t * t * (-20.0 * t).exp(), 0.0);
        }
    }
    let rep = SpectralRep::new(OctantSignature::all_plus(1), tgrid, density)?;
    let cfg = SearchConfig::new(vec![(-10.0, 10.0)], vec![(1e-4, 5000.0)])?;
    let sys = OrthoSystem::new(1);
    let objective = |x: f64, y: f64| -> Result<f64> {
        correlation_objective(&rep, &sys, &[], &TubePoint::from_xy(&[x], &[y])?, &cfg)
    };

    let mut rows = Vec::new();
    let paths: [(&str, fn(i32) -> (f64, f64)); 3] = [
        ("to-boundary", |k| (0.0, 2f64.powi(-k))),
        ("to-infinite-height", |k| (0.0, 2f64.powi(k))),
        ("to-infinite-offset", |k| (2f64.powi(k), 1.0)),
    ];
    for (name, path) in paths {
        let (x0, y0) = path(0);
        let first = objective(x0, y0)?;
        let (xk, yk) = path(12);
        let last = objective(xk, yk)?;
        rows.push(CaseRow::upper("decay", name, last / first, 0.05));
    }
    let got = rep.eval_f(&[Complex64::new(0.0, 1.0)])?;
    let want = 2.0 / (20.0 + TAU).powi(3);
    rows.push(CaseRow::upper(
        "decay",
        "spectral-sum-closed-form",
        (got - Complex64::new(want, 0.0)).norm() / want,
        1e-5,
    ));
    Ok(rows)
}

fn roundtrip_row(case: &'static str, grid: Grid, values: Vec<Complex64>) -> Result<CaseRow> {
    let s = BoundarySamples::new(grid.clone(), values, false)?;
    let comps = hardy_split(&s)?;
    let rec = reconstruct(&comps)?;
    let diff: Vec<Complex64> = rec.values.iter().zip(&s.values).map(|(a, b)| a - b).collect();
    let err = BoundarySamples::new(grid, diff, false)?.norm() / s.norm();
    Ok(CaseRow::upper("split", case, err, 1e-8))
}

/// Octant split and reconstruction: random samples roundtrip to rounding in
/// one and two dimensions, and a rational function with a known upper-half
/// part is compared against that part on the boundary.
fn suite_split() -> Result<Vec<CaseRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut rows = Vec::new();

    let grid1 = Grid::centered(&[256], &[16.0])?;
    let values1: Vec<Complex64> = (0..grid1.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    rows.push(roundtrip_row("roundtrip-1d", grid1, values1)?);

    let grid2 = Grid::centered(&[16, 32], &[4.0, 8.0])?;
    let values2: Vec<Complex64> = (0..grid2.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    rows.push(roundtrip_row("roundtrip-2d", grid2, values2)?);

    // 2/(1+x^2) splits into i/(x+i) plus its mirror. The function's 1/x^2
    // tail wraps around the periodic sampling window, so the achievable
    // boundary accuracy at this extent is O(1/L) ~ 1.6e-2 regardless of the
    // sample count; the row holds the measurement against the 1e-4 target
    // anyway and reports the miss rather than hiding it.
    let grid3 = Grid::centered(&[4096], &[64.0])?;
    let values3: Vec<Complex64> = (0..grid3.len())
        .map(|k| {
            let x = grid3.coord(0, k);
            Complex64::new(2.0 / (1.0 + x * x), 0.0)
        })
        .collect();
    let samples = BoundarySamples::new(grid3, values3, true)?;
    let comps = hardy_split(&samples)?;
    let plus = comps
        .iter()
        .find(|c| c.sigma().is_all_plus())
        .ok_or_else(|| AfdError::InvalidParameter("split produced no upper component".into()))?;
    let bv = plus.boundary_values()?;
    let mut worst = 0.0f64;
    for (k, v) in bv.values.iter().enumerate() {
        let x = bv.grid.coord(0, k);
        let want = Complex64::new(1.0, x) / (1.0 + x * x);
        worst = worst.max((v - want).norm());
    }
    rows.push(CaseRow::upper("split", "rational-witness", worst, 1e-4));
    Ok(rows)
}

/// Repeated selection of one anchor walks the graded derivative sequence and
/// reproduces the brute-force Gram-Schmidt triangle; the revisit radius and
/// the two-dimensional grade thresholds behave exactly.
fn suite_escalation() -> Result<Vec<CaseRow>> {
    let mut rows = Vec::new();

    let z = TubePoint::from_xy(&[0.3], &[0.9])?;
    let mut sys = OrthoSystem::new(1);
    for order in 0..4u32 {
        let e = DictElement::new(MultiIndex::new(vec![order]), z.clone())?;
        sys.try_add(&e, 1e-12)?;
    }
    let elems = sys.elements();
    let m = elems.len();
    let mut ips = vec![vec![Complex64::default(); m]; m];
    for i in 0..m {
        for j in 0..m {
            ips[i][j] = ip_phi_phi(&elems[i], &elems[j])?;
        }
    }
    let gram = CMatrix::from_fn(m, |i, j| ips[i][j]);
    let linv = lower_triangular_inverse(&cholesky(&gram)?)?;
    let mut worst = 0.0f64;
    for (k, row) in sys.rows().iter().enumerate() {
        for i in 0..=k {
            worst = worst.max((row[i] - linv.get(k, i)).norm());
        }
    }
    rows.push(CaseRow::upper("escalation", "repeated-anchor-gram", worst, 1e-8));

    let z1 = TubePoint::from_xy(&[-0.4], &[1.1])?;
    let mut hist1: Vec<TubePoint> = Vec::new();
    let mut mismatches1 = 0usize;
    for want in 0..5u32 {
        let alpha = escalate_order(&hist1, &z1, 1e-6, 8)?;
        if alpha.entries() != [want].as_slice() {
            mismatches1 += 1;
        }
        hist1.push(z1.clone());
    }
    rows.push(CaseRow::upper("escalation", "graded-walk-1d", mismatches1 as f64, 0.0));

    let z2 = TubePoint::from_xy(&[0.1, -0.2], &[0.7, 1.1])?;
    let want2: [(&[u32], u32); 4] = [(&[0, 0], 0), (&[1, 0], 1), (&[0, 1], 1), (&[2, 0], 2)];
    let mut hist2: Vec<TubePoint> = Vec::new();
    let mut mismatches2 = 0usize;
    for (want_alpha, want_grade) in want2 {
        let alpha = escalate_order(&hist2, &z2, 1e-6, 8)?;
        if alpha.entries() != want_alpha || alpha.order() != want_grade {
            mismatches2 += 1;
        }
        hist2.push(z2.clone());
    }
    rows.push(CaseRow::upper("escalation", "graded-walk-2d", mismatches2 as f64, 0.0));

    let base = TubePoint::from_xy(&[0.5], &[1.0])?;
    let near = TubePoint::from_xy(&[0.5 + 1e-9], &[1.0])?;
    let merged = escalate_order(std::slice::from_ref(&base), &near, 1e-6, 8)?;
    let fresh = escalate_order(std::slice::from_ref(&base), &near, 1e-12, 8)?;
    let ok = merged.entries() == [1].as_slice() && fresh.entries() == [0].as_slice();
    rows.push(CaseRow {
        suite: "escalation",
        case: "merge-radius".into(),
        measured: if ok { 0.0 } else { 1.0 },
        bound: 0.0,
        pass: ok,
    });

    Ok(rows)
}

/// Wedge-cone kernel diagonals against quadrature over the dual cone, the
/// dual-slope involution, and the Poisson upper bound across cones and
/// exponents, including the sharper constant that fails.
fn suite_cones() -> Result<Vec<CaseRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut rows = Vec::new();

    let diag_spec = QuadratureSpec { rel_tol: 1e-7, ..QuadratureSpec::default() };
    let mut involution_dev = 0.0f64;
    for case in 0..20 {
        let kappa = log_uniform(&mut rng, 0.3, 3.0);
        let cone = Cone2D::new(kappa)?;
        let y2 = rng.gen_range(0.4..2.0);
        let y = [rng.gen_range(-0.8..0.8) * kappa * y2, y2];
        let closed = cone_szego_diag(&cone, &y)?;
        let (u, v) = cone.dual_generators();
        let quad = integrate_nd(
            &|t: &[f64]| {
                Complex64::new((-2.0 * TAU * (y[0] * t[0] + y[1] * t[1])).exp(), 0.0)
            },
            &Domain::Cone2 { u, v },
            &diag_spec,
        )?
        .re;
        rows.push(CaseRow::upper(
            "cones",
            format!("wedge-diagonal-{case:02}"),
            (quad - closed).abs() / closed,
            1e-5,
        ));
        let twice = cone.dual().dual().kappa();
        involution_dev = involution_dev.max((twice - kappa).abs() / kappa);
    }
    rows.push(CaseRow::upper("cones", "dual-involution-random", involution_dev, 1e-15));
    let dyadic_misses = [0.25f64, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .filter(|&&kappa| {
            Cone2D::new(kappa).map(|c| c.dual().dual().kappa() != kappa).unwrap_or(true)
        })
        .count();
    rows.push(CaseRow::upper("cones", "dual-involution-dyadic", dyadic_misses as f64, 0.0));

    let poisson_spec = QuadratureSpec { rel_tol: 1e-6, abs_tol: 1e-12, ..QuadratureSpec::default() };
    let exponents = [1.25, 1.5, 2.0, 3.0, 8.0, f64::INFINITY];
    for case in 0..20 {
        let p = exponents[case % exponents.len()];
        let (kind, lhs, rhs, ok) = match case % 3 {
            0 => {
                let x = [rng.gen_range(-2.0..2.0)];
                let y = [log_uniform(&mut rng, 0.3, 2.0)];
                let (lhs, rhs, ok) = poisson_lp_bound_check_octant(&x, &y, p, &poisson_spec)?;
                ("octant-1d", lhs, rhs, ok)
            }
            1 => {
                let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                let y = [log_uniform(&mut rng, 0.3, 2.0), log_uniform(&mut rng, 0.3, 2.0)];
                let (lhs, rhs, ok) = poisson_lp_bound_check_octant(&x, &y, p, &poisson_spec)?;
                ("octant-2d", lhs, rhs, ok)
            }
            _ => {
                let kappa = log_uniform(&mut rng, 0.4, 2.5);
                let cone = PolygonalCone::from_cone2(&Cone2D::new(kappa)?);
                let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                let y2 = log_uniform(&mut rng, 0.4, 2.0);
                let y = [rng.gen_range(-0.7..0.7) * kappa * y2, y2];
                let (lhs, rhs, ok) = poisson_lp_bound_check(&cone, &x, &y, p, &poisson_spec)?;
                ("wedge", lhs, rhs, ok)
            }
        };
        rows.push(CaseRow {
            suite: "cones",
            case: format!("poisson-{kind}-{case:02}"),
            measured: lhs / rhs,
            bound: 1.0,
            pass: ok,
        });
    }

    // The seemingly sharper constant 2^{-n/p} K^{1-1/p} is genuinely wrong:
    // the measured norm exceeds it by a factor ~2, which is why the bound
    // above carries the 4^n factor instead.
    let (lhs, _, _) =
        poisson_lp_bound_check_octant(&[0.0], &[1.0], 2.0, &QuadratureSpec::default())?;
    let candidate = poisson_lp_tight_candidate(1.0 / (4.0 * std::f64::consts::PI), 1, 2.0);
    rows.push(CaseRow {
        suite: "cones",
        case: "tighter-constant-fails".into(),
        measured: lhs / candidate,
        bound: 1.0,
        pass: lhs > candidate * (1.0 + 1e-6),
    });

    Ok(rows)
}

/// Matching pursuit bookkeeping against the direct residual expansion, and
/// the adaptive loop never trailing plain pursuit on shared benign inputs.
fn suite_pursuit() -> Result<Vec<CaseRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let mut rows = Vec::new();

    for case in 0..2 {
        let pts = draw_separated(&mut rng, 1, 3, (-1.5, 1.5), (0.5, 1.8), 0.5)?;
        let f = random_kernels(&mut rng, &pts, (0.4, 1.0), true)?;
        let mut cfg = SearchConfig::new(vec![(-2.0, 2.0)], vec![(0.5, 2.0)])?;
        cfg.x_count = 9;
        cfg.y_count = 4;
        cfg.alpha_cap = 2;
        let model = mp_run(&f, 10, &cfg)?;
        let hist = model.residual_history();
        let steps = model.terms();
        let mut elems = Vec::with_capacity(steps);
        let mut norms = Vec::with_capacity(steps);
        let mut coeffs = Vec::with_capacity(steps);
        for atom in model.atoms() {
            let alpha = MultiIndex::new(atom.alpha.clone());
            let zp = TubePoint::new(atom.z.clone())?;
            norms.push(phi_norm(&alpha, &zp.y())?);
            elems.push(DictElement::new(alpha, zp)?);
            coeffs.push(atom.coeff);
        }
        let nsq = f.norm_sq();
        let mut worst = 0.0f64;
        for m in 1..=steps {
            let mut cross = Complex64::default();
            let mut quad = Complex64::default();
            for l in 0..m {
                cross += coeffs[l].conj() * f.inner_phi(&elems[l])? / norms[l];
                for j in 0..m {
                    quad += coeffs[l] * coeffs[j].conj() * ip_phi_phi(&elems[l], &elems[j])?
                        / (norms[l] * norms[j]);
                }
            }
            let expanded = nsq - 2.0 * cross.re + quad.re;
            worst = worst.max((expanded - hist[m] * hist[m]).abs() / nsq);
        }
        rows.push(CaseRow::upper("pursuit", format!("bookkeeping-{case}"), worst, 1e-8));
    }

    // Shared inputs whose atoms sit exactly on the pursuit lattice; the
    // adaptive loop must match or beat the plain pursuit residual at every
    // term count.
    let cfg = {
        let mut cfg = SearchConfig::new(vec![(-2.0, 2.0)], vec![(0.5, 2.0)])?;
        cfg.x_count = 17;
        cfg.y_count = 16;
        cfg.alpha_cap = 0;
        cfg
    };
    let xs = cfg.x_values(0);
    let ys = cfg.y_values(0);
    let combos: [[(usize, usize); 3]; 3] =
        [[(1, 2), (8, 4), (15, 1)], [(2, 5), (9, 0), (15, 3)], [(1, 6), (8, 3), (14, 0)]];
    let mags = [1.0, 0.45, 0.2];
    let phases = [[0.0, 0.0, 0.0], [0.9, -0.6, 0.3], [0.2, 2.0, -1.2]];
    for (case, combo) in combos.iter().enumerate() {
        let mut terms = Vec::new();
        let mut seeds = Vec::new();
        for (j, &(xi, yi)) in combo.iter().enumerate() {
            let z = TubePoint::from_xy(&[xs[xi]], &[ys[yi]])?;
            let alpha = MultiIndex::zeros(1);
            let c =
                Complex64::from_polar(mags[j] / phi_norm(&alpha, &z.y())?, phases[case][j]);
            terms.push((DictElement::new(alpha, z.clone())?, c));
            seeds.push(z);
        }
        let f = KernelCombination::new(terms)?;
        let mut cfg_adaptive = cfg.clone();
        cfg_adaptive.seed_points = seeds;
        cfg_adaptive.alpha_cap = 8;
        let adaptive = afd_run(&f, 6, 0.0, &cfg_adaptive)?;
        let pursuit = mp_run(&f, 6, &cfg)?;
        let ra = &adaptive.residual_history;
        let rb = pursuit.residual_history();
        let mut worst = f64::NEG_INFINITY;
        for m in 1..=6usize {
            let a = ra[m.min(ra.len() - 1)];
            let b = rb[m.min(rb.len() - 1)];
            worst = worst.max(a - b);
        }
        rows.push(CaseRow::upper("pursuit", format!("domination-{case}"), worst.max(0.0), 1e-10));
    }

    Ok(rows)
}
