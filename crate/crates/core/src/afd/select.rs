//! Maximal-selection search: coarse lattice scan plus local simplex
//! refinement.
//!
//! The scan is embarrassingly parallel and runs under rayon, but the argmax
//! is taken sequentially over the collected values with first-index
//! tie-breaking, so results do not depend on thread count or scheduling.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::afd::dictionary::escalate_order;
use crate::afd::ortho::{preorthogonalize, OrthoSystem};
use crate::afd::HardyFunction;
use crate::error::{AfdError, Result};
use crate::kernels::{DictElement, TubePoint};

/// Search-space description for one selection step.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Per-axis real-part range, inclusive.
    pub x_range: Vec<(f64, f64)>,
    /// Lattice points per axis in x.
    pub x_count: usize,
    /// Per-axis imaginary-part range, 0 < lo <= hi.
    pub y_range: Vec<(f64, f64)>,
    /// Log-spaced lattice points per axis in y.
    pub y_count: usize,
    /// Simplex refinement iterations.
    pub nm_iters: usize,
    /// Simplex convergence tolerance in parameter space.
    pub nm_tol: f64,
    /// Degeneracy threshold on the Gram-Schmidt defect.
    pub delta_deg: f64,
    /// Cap on the total derivative order the dictionary will escalate to.
    pub alpha_cap: u32,
    /// Points closer than this are treated as revisits of the same anchor.
    pub merge_radius: f64,
    /// Extra candidates appended to every lattice scan.
    pub seed_points: Vec<TubePoint>,
}

impl SearchConfig {
    /// Defaults for a search box: 32 lattice points per x-axis, 16
    /// log-spaced points per y-axis, merge radius 1e-6 of the x spacing.
    pub fn new(x_range: Vec<(f64, f64)>, y_range: Vec<(f64, f64)>) -> Result<Self> {
        let mut cfg = SearchConfig {
            x_range,
            x_count: 32,
            y_range,
            y_count: 16,
            nm_iters: 200,
            nm_tol: 1e-6,
            delta_deg: 1e-10,
            alpha_cap: 8,
            merge_radius: 0.0,
            seed_points: Vec::new(),
        };
        cfg.validate()?;
        cfg.merge_radius = 1e-6 * cfg.min_x_spacing();
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.x_range.len();
        if n == 0 || n > 2 || self.y_range.len() != n {
            return Err(AfdError::InvalidParameter(
                "search box needs matching x and y ranges in 1 or 2 axes".into(),
            ));
        }
        for &(lo, hi) in &self.x_range {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(AfdError::InvalidParameter(format!("bad x range ({lo}, {hi})")));
            }
        }
        for &(lo, hi) in &self.y_range {
            if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo <= hi) {
                return Err(AfdError::InvalidParameter(format!("bad y range ({lo}, {hi})")));
            }
        }
        if self.x_count < 2 || self.y_count < 1 {
            return Err(AfdError::InvalidParameter("lattice needs at least 2 x 1 points".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.x_range.len()
    }

    fn min_x_spacing(&self) -> f64 {
        self.x_range
            .iter()
            .map(|&(lo, hi)| (hi - lo) / (self.x_count as f64 - 1.0))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn x_values(&self, axis: usize) -> Vec<f64> {
        let (lo, hi) = self.x_range[axis];
        let step = (hi - lo) / (self.x_count as f64 - 1.0);
        (0..self.x_count).map(|i| lo + step * i as f64).collect()
    }

    /// Log-spaced y lattice for one axis; a single-point count or a
    /// collapsed range degenerates to the lower endpoint.
    pub fn y_values(&self, axis: usize) -> Vec<f64> {
        let (lo, hi) = self.y_range[axis];
        if self.y_count == 1 || hi == lo {
            return vec![lo; self.y_count.max(1)];
        }
        let ratio = hi / lo;
        (0..self.y_count)
            .map(|i| lo * ratio.powf(i as f64 / (self.y_count as f64 - 1.0)))
            .collect()
    }

    /// Full candidate lattice (cartesian product over axes), in a fixed
    /// deterministic order, with the seed points appended.
    pub fn lattice(&self) -> Result<Vec<TubePoint>> {
        let n = self.dim();
        let xs: Vec<Vec<f64>> = (0..n).map(|a| self.x_values(a)).collect();
        let ys: Vec<Vec<f64>> = (0..n).map(|a| self.y_values(a)).collect();
        let mut out = Vec::new();
        match n {
            1 => {
                for &x in &xs[0] {
                    for &y in &ys[0] {
                        out.push(TubePoint::from_xy(&[x], &[y])?);
                    }
                }
            }
            2 => {
                for &x0 in &xs[0] {
                    for &x1 in &xs[1] {
                        for &y0 in &ys[0] {
                            for &y1 in &ys[1] {
                                out.push(TubePoint::from_xy(&[x0, x1], &[y0, y1])?);
                            }
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        for s in &self.seed_points {
            if s.dim() != n {
                return Err(AfdError::DimensionMismatch { expected: n, got: s.dim() });
            }
            out.push(s.clone());
        }
        Ok(out)
    }

    fn nm_steps(&self) -> Vec<f64> {
        let n = self.dim();
        let mut steps = Vec::with_capacity(2 * n);
        for a in 0..n {
            let (lo, hi) = self.x_range[a];
            steps.push(0.5 * (hi - lo) / (self.x_count as f64 - 1.0));
        }
        for a in 0..n {
            let (lo, hi) = self.y_range[a];
            let log_step = if self.y_count > 1 && hi > lo {
                (hi / lo).ln() / (self.y_count as f64 - 1.0)
            } else {
                0.1
            };
            steps.push(0.5 * log_step.max(1e-3));
        }
        steps
    }
}

/// Objective value of anchoring the next basis vector at `z`: the magnitude
/// of the residual's inner product with the normalized orthogonal remainder
/// of the escalated element there. Degenerate or exhausted anchors score
/// zero so the scan skips them.
pub fn correlation_objective<H: HardyFunction + ?Sized>(
    f: &H,
    sys: &OrthoSystem,
    coeffs: &[Complex64],
    z: &TubePoint,
    cfg: &SearchConfig,
) -> Result<f64> {
    let alpha = match escalate_order(sys.points(), z, cfg.merge_radius, cfg.alpha_cap) {
        Ok(a) => a,
        Err(AfdError::DictionaryExhausted { .. }) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let e = DictElement::new(alpha, z.clone())?;
    let cand = match preorthogonalize(sys, &e, cfg.delta_deg) {
        Ok(c) => c,
        Err(AfdError::Degenerate { .. }) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let mut num = f.inner_phi(&e)?;
    for (p, c) in cand.projections.iter().zip(coeffs) {
        num -= p.conj() * c;
    }
    Ok(num.norm() / cand.beta_norm)
}

fn point_from_params(theta: &[f64], n: usize) -> Result<TubePoint> {
    let x = &theta[..n];
    let y: Vec<f64> = theta[n..].iter().map(|t| t.exp()).collect();
    TubePoint::from_xy(x, &y)
}

/// Pick the anchor point for the next term: scan the lattice (plus seeds)
/// in parallel, then refine the best cell with a Nelder-Mead simplex over
/// (x, log y). Returns the refined point only if it scores at least as well
/// as every lattice candidate. Fails with [`AfdError::ResidualZero`] when
/// the whole scan is numerically zero.
pub fn msp_select<H: HardyFunction + ?Sized>(
    f: &H,
    sys: &OrthoSystem,
    coeffs: &[Complex64],
    cfg: &SearchConfig,
) -> Result<TubePoint> {
    cfg.validate()?;
    if cfg.dim() != f.dim() {
        return Err(AfdError::DimensionMismatch { expected: f.dim(), got: cfg.dim() });
    }
    let cands = cfg.lattice()?;
    let values: Vec<Result<f64>> = cands
        .par_iter()
        .map(|z| correlation_objective(f, sys, coeffs, z, cfg))
        .collect();
    let mut best_idx = 0usize;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        let v = v?;
        if v > best_val {
            best_val = v;
            best_idx = i;
        }
    }
    if best_val < 1e-14 {
        return Err(AfdError::ResidualZero);
    }

    let n = cfg.dim();
    let start: Vec<f64> = {
        let z = &cands[best_idx];
        let mut t: Vec<f64> = z.x().to_vec();
        t.extend(z.y().iter().map(|y| y.ln()));
        t
    };
    let objective = |theta: &[f64]| -> f64 {
        match point_from_params(theta, n) {
            Ok(z) => correlation_objective(f, sys, coeffs, &z, cfg).unwrap_or(0.0),
            Err(_) => 0.0,
        }
    };
    let (theta, refined_val) = nelder_mead_max(&objective, &start, &cfg.nm_steps(), cfg.nm_iters, cfg.nm_tol);
    if refined_val >= best_val {
        point_from_params(&theta, n)
    } else {
        Ok(cands[best_idx].clone())
    }
}

/// Derivative-free maximization; returns the best vertex ever held by the
/// simplex, so the result never scores below the starting point.
fn nelder_mead_max(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    steps: &[f64],
    max_iters: usize,
    tol: f64,
) -> (Vec<f64>, f64) {
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;

    let d = start.len();
    let mut verts: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    verts.push(start.to_vec());
    for i in 0..d {
        let mut v = start.to_vec();
        v[i] += steps[i];
        verts.push(v);
    }
    // Minimize the negated objective.
    let mut vals: Vec<f64> = verts.iter().map(|v| -f(v)).collect();

    for _ in 0..max_iters {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal));
        let reorder_v: Vec<Vec<f64>> = order.iter().map(|&i| verts[i].clone()).collect();
        let reorder_f: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
        verts = reorder_v;
        vals = reorder_f;

        let spread = (0..d)
            .map(|i| (verts[d][i] - verts[0][i]).abs())
            .fold(0.0f64, f64::max);
        if spread < tol {
            break;
        }

        let mut centroid = vec![0.0; d];
        for v in verts.iter().take(d) {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / d as f64;
            }
        }
        let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
        };

        let reflected = lerp(&centroid, &verts[d], -ALPHA);
        let fr = -f(&reflected);
        if fr < vals[0] {
            let expanded = lerp(&centroid, &verts[d], -ALPHA * GAMMA);
            let fe = -f(&expanded);
            if fe < fr {
                verts[d] = expanded;
                vals[d] = fe;
            } else {
                verts[d] = reflected;
                vals[d] = fr;
            }
        } else if fr < vals[d - 1] {
            verts[d] = reflected;
            vals[d] = fr;
        } else {
            let contracted = lerp(&centroid, &verts[d], RHO);
            let fc = -f(&contracted);
            if fc < vals[d] {
                verts[d] = contracted;
                vals[d] = fc;
            } else {
                for i in 1..=d {
                    verts[i] = lerp(&verts[0], &verts[i], SIGMA);
                    vals[i] = -f(&verts[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=d {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    (verts[best].clone(), -vals[best])
}
