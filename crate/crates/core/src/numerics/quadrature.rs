use num_complex::Complex64;

use crate::error::{AfdError, Result};

/// Tolerances and truncation controls for the adaptive integrator.
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Finite radius beyond which infinite tails are mapped by `t = R/v`.
    pub tail_radius: f64,
    /// Maximum number of interval bisections across the whole domain.
    pub max_depth: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-9, abs_tol: 1e-14, tail_radius: 32.0, max_depth: 2400 }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(AfdError::InvalidParameter("quadrature tolerances must be positive".into()));
        }
        if !(self.tail_radius > 0.0) {
            return Err(AfdError::InvalidParameter("tail radius must be positive".into()));
        }
        Ok(())
    }

    fn inner(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: self.rel_tol / 8.0,
            abs_tol: self.abs_tol / 8.0,
            tail_radius: self.tail_radius,
            max_depth: self.max_depth,
        }
    }
}

/// Integration domains. `Cone2 { u, v }` is the planar cone
/// `{ s*u + r*v : s, r >= 0 }`, integrated through the generator map with
/// its Jacobian `|det [u v]|`.
#[derive(Debug, Clone)]
pub enum Domain {
    Line,
    HalfLine,
    Interval(f64, f64),
    Plane,
    Quadrant,
    Cone2 { u: [f64; 2], v: [f64; 2] },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Line | Domain::HalfLine | Domain::Interval(..) => 1,
            _ => 2,
        }
    }
}

// 15-point Kronrod extension of 7-point Gauss: nonnegative nodes, descending.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut res_abs = fc.norm() * WGK[7];
    let mut vals = [[Complex64::default(); 2]; 7];
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        vals[j] = [f1, f2];
        resk += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            resg += WG[(j - 1) / 2] * (f1 + f2);
        }
    }
    let reskh = resk * 0.5;
    let mut res_asc = WGK[7] * (fc - reskh).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((vals[j][0] - reskh).norm() + (vals[j][1] - reskh).norm());
    }
    let err = rescale_error(((resk - resg) * h).norm(), res_abs * h.abs(), res_asc * h.abs());
    (resk * h, err)
}

struct Segment {
    piece: usize,
    a: f64,
    b: f64,
    val: Complex64,
    err: f64,
}

/// Globally adaptive pass over a list of integrand pieces, each on its own
/// finite interval; bisects the worst segment until the summed error bound
/// meets the tolerance.
fn adaptive(pieces: &[&dyn Fn(f64) -> Complex64], init: &[(usize, f64, f64)], spec: &QuadratureSpec) -> Result<(Complex64, f64)> {
    let mut segs: Vec<Segment> = init
        .iter()
        .map(|&(piece, a, b)| {
            let (val, err) = gk15(pieces[piece], a, b);
            Segment { piece, a, b, val, err }
        })
        .collect();
    let mut splits = 0usize;
    loop {
        let total: Complex64 = segs.iter().map(|s| s.val).sum();
        let err: f64 = segs.iter().map(|s| s.err).sum();
        if err <= spec.abs_tol.max(spec.rel_tol * total.norm()) {
            return Ok((total, err));
        }
        if splits >= spec.max_depth {
            return Err(AfdError::ToleranceNotReached { est_re: total.re, est_im: total.im, bound: err });
        }
        let mut worst = 0;
        for (i, s) in segs.iter().enumerate() {
            if s.err > segs[worst].err {
                worst = i;
            }
        }
        let (piece, a, b) = (segs[worst].piece, segs[worst].a, segs[worst].b);
        let mid = 0.5 * (a + b);
        let (v1, e1) = gk15(pieces[piece], a, mid);
        let (v2, e2) = gk15(pieces[piece], mid, b);
        segs[worst] = Segment { piece, a, b: mid, val: v1, err: e1 };
        segs.push(Segment { piece, a: mid, b, val: v2, err: e2 });
        splits += 1;
    }
}

enum Axis {
    Interval(f64, f64),
    HalfLine,
    Line,
}

/// One-dimensional integral over the axis domain, infinite tails mapped by
/// `t = R/v` (valid for integrands with algebraic decay of order >= 2).
fn integrate_axis(f: &dyn Fn(f64) -> Complex64, axis: &Axis, spec: &QuadratureSpec) -> Result<(Complex64, f64)> {
    let r = spec.tail_radius;
    match axis {
        Axis::Interval(a, b) => adaptive(&[&f], &[(0, *a, *b)], spec),
        Axis::HalfLine => {
            let tail = move |v: f64| f(r / v) * (r / (v * v));
            adaptive(&[&f, &tail], &[(0, 0.0, r), (1, 0.0, 1.0)], spec)
        }
        Axis::Line => {
            let tail_r = move |v: f64| f(r / v) * (r / (v * v));
            let tail_l = move |v: f64| f(-r / v) * (r / (v * v));
            adaptive(&[&f, &tail_r, &tail_l], &[(0, -r, r), (1, 0.0, 1.0), (2, 0.0, 1.0)], spec)
        }
    }
}

/// Adaptive integral of a complex-valued integrand over a 1-D or 2-D domain.
///
/// Two-dimensional domains are integrated as iterated one-dimensional
/// integrals (inner tolerance tightened by 8x); an inner failure aborts the
/// whole integral. Deterministic for a fixed spec. Fails with the best
/// estimate and its error bound when the bisection budget is exhausted.
pub fn integrate_nd(f: &dyn Fn(&[f64]) -> Complex64, domain: &Domain, spec: &QuadratureSpec) -> Result<Complex64> {
    spec.validate()?;
    match domain {
        Domain::Line => integrate_axis(&|t| f(&[t]), &Axis::Line, spec).map(|r| r.0),
        Domain::HalfLine => integrate_axis(&|t| f(&[t]), &Axis::HalfLine, spec).map(|r| r.0),
        Domain::Interval(a, b) => integrate_axis(&|t| f(&[t]), &Axis::Interval(*a, *b), spec).map(|r| r.0),
        Domain::Plane => iterated(f, &Axis::Line, &Axis::Line, 1.0, spec),
        Domain::Quadrant => iterated(f, &Axis::HalfLine, &Axis::HalfLine, 1.0, spec),
        Domain::Cone2 { u, v } => {
            let jac = (u[0] * v[1] - u[1] * v[0]).abs();
            if jac == 0.0 {
                return Err(AfdError::InvalidParameter("cone generators are collinear".into()));
            }
            let g = move |s: &[f64]| f(&[s[0] * u[0] + s[1] * v[0], s[0] * u[1] + s[1] * v[1]]);
            iterated(&g, &Axis::HalfLine, &Axis::HalfLine, jac, spec)
        }
    }
}

fn iterated(
    f: &dyn Fn(&[f64]) -> Complex64,
    outer: &Axis,
    inner: &Axis,
    jacobian: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let inner_spec = spec.inner();
    let failure: std::cell::Cell<Option<(f64, f64, f64)>> = std::cell::Cell::new(None);
    let outer_f = |s: f64| -> Complex64 {
        match integrate_axis(&|t| f(&[s, t]), inner, &inner_spec) {
            Ok((val, _)) => val,
            Err(AfdError::ToleranceNotReached { est_re, est_im, bound }) => {
                failure.set(Some((est_re, est_im, bound)));
                Complex64::new(est_re, est_im)
            }
            Err(_) => {
                failure.set(Some((f64::NAN, f64::NAN, f64::INFINITY)));
                Complex64::new(f64::NAN, f64::NAN)
            }
        }
    };
    let out = integrate_axis(&outer_f, outer, spec);
    if let Some((_, _, bound)) = failure.get() {
        let (est, err) = out.unwrap_or((Complex64::new(f64::NAN, f64::NAN), f64::INFINITY));
        return Err(AfdError::ToleranceNotReached {
            est_re: est.re * jacobian,
            est_im: est.im * jacobian,
            bound: (err + bound) * jacobian,
        });
    }
    match out {
        Ok((val, _)) => Ok(val * jacobian),
        Err(AfdError::ToleranceNotReached { est_re, est_im, bound }) => Err(AfdError::ToleranceNotReached {
            est_re: est_re * jacobian,
            est_im: est_im * jacobian,
            bound: bound * jacobian,
        }),
        Err(e) => Err(e),
    }
}

/// Convenience wrapper for real-valued integrands; returns the real part.
pub fn integrate_nd_real(f: &dyn Fn(&[f64]) -> f64, domain: &Domain, spec: &QuadratureSpec) -> Result<f64> {
    integrate_nd(&|x| Complex64::new(f(x), 0.0), domain, spec).map(|v| v.re)
}
