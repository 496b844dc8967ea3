//! The adaptive decomposition loop and fixed-node projection.

use num_complex::Complex64;

use crate::afd::dictionary::escalate_order_extra;
use crate::afd::model::Approximant;
use crate::afd::ortho::{preorthogonalize, OrthoSystem};
use crate::afd::select::{msp_select, SearchConfig};
use crate::afd::HardyFunction;
use crate::error::{AfdError, Result};
use crate::hardy::SpectralRep;
use crate::kernels::{phi_eval, DictElement, TubePoint};

/// Everything a finished run produces: the orthonormal system, the
/// coefficients `c_k = <F, B_k>`, and the residual norm after each term
/// (`history[0]` is the input norm, so the list has one more entry than the
/// system has terms).
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub system: OrthoSystem,
    pub coeffs: Vec<Complex64>,
    pub residual_history: Vec<f64>,
}

impl RunOutcome {
    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("history is never empty")
    }

    pub fn energy_captured(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Evaluate the reconstruction `sum_k c_k B_k` at a point of the tube.
    pub fn eval(&self, w: &[Complex64]) -> Result<Complex64> {
        let mut weights = vec![Complex64::default(); self.system.len()];
        for (c, row) in self.coeffs.iter().zip(self.system.rows()) {
            for (wi, ti) in weights.iter_mut().zip(row) {
                *wi += c * ti;
            }
        }
        let mut acc = Complex64::default();
        for (a, e) in weights.iter().zip(self.system.elements()) {
            acc += a * phi_eval(e, w)?;
        }
        Ok(acc)
    }
}

fn add_escalating<H: HardyFunction + ?Sized>(
    f: &H,
    sys: &mut OrthoSystem,
    coeffs: &mut Vec<Complex64>,
    fphi: &mut Vec<Complex64>,
    z: &TubePoint,
    cfg: &SearchConfig,
) -> Result<Complex64> {
    let mut extra = 0usize;
    loop {
        let alpha = escalate_order_extra(sys.points(), z, cfg.merge_radius, cfg.alpha_cap, extra)?;
        let e = DictElement::new(alpha, z.clone())?;
        match preorthogonalize(sys, &e, cfg.delta_deg) {
            Ok(cand) => {
                fphi.push(f.inner_phi(&e)?);
                let mut c = Complex64::default();
                for (t, fp) in cand.row.iter().zip(fphi.iter()) {
                    c += t.conj() * fp;
                }
                sys.commit(cand);
                coeffs.push(c);
                return Ok(c);
            }
            Err(AfdError::Degenerate { .. }) => extra += 1,
            Err(e) => return Err(e),
        }
    }
}

/// Run the greedy decomposition until `m_max` terms are placed, the residual
/// norm drops to `stop_tol`, or the search reports a numerically zero
/// residual.
pub fn afd_run<H: HardyFunction + ?Sized>(
    f: &H,
    m_max: usize,
    stop_tol: f64,
    cfg: &SearchConfig,
) -> Result<RunOutcome> {
    cfg.validate()?;
    if cfg.dim() != f.dim() {
        return Err(AfdError::DimensionMismatch { expected: f.dim(), got: cfg.dim() });
    }
    let norm_sq = f.norm_sq();
    let mut sys = OrthoSystem::new(f.dim());
    let mut coeffs = Vec::new();
    let mut fphi = Vec::new();
    let mut resid_sq = norm_sq;
    let mut history = vec![norm_sq.sqrt()];

    for _ in 0..m_max {
        if *history.last().unwrap() <= stop_tol {
            break;
        }
        let z = match msp_select(f, &sys, &coeffs, cfg) {
            Ok(z) => z,
            Err(AfdError::ResidualZero) => break,
            Err(e) => return Err(e),
        };
        let c = add_escalating(f, &mut sys, &mut coeffs, &mut fphi, &z, cfg)?;
        resid_sq = (resid_sq - c.norm_sqr()).max(0.0);
        history.push(resid_sq.sqrt());
    }

    Ok(RunOutcome { system: sys, coeffs, residual_history: history })
}

/// Approximate one spectral component: flip it onto the first octant, run
/// the greedy loop there, and package the result in the component's own
/// octant coordinates.
pub fn approximate_component(
    rep: &SpectralRep,
    m_max: usize,
    stop_tol: f64,
    cfg: &SearchConfig,
) -> Result<Approximant> {
    let sigma = rep.sigma().clone();
    let flipped = rep.flip_to_first_octant()?;
    if m_max == 0 {
        return Ok(Approximant::empty(&sigma, flipped.norm()));
    }
    let outcome = afd_run(&flipped, m_max, stop_tol, cfg)?;
    Approximant::from_outcome(&sigma, &outcome)
}

/// Orthogonal projection onto the span of kernels anchored at the given
/// points, taken in order. Exact duplicates escalate to derivative kernels;
/// near-duplicates that leave less than 1e-12 of an element's energy make
/// the Gram matrix numerically singular and fail with
/// [`AfdError::IllConditioned`], naming the offending pair.
pub fn project_interpolate<H: HardyFunction + ?Sized>(
    f: &H,
    points: &[TubePoint],
) -> Result<RunOutcome> {
    const DELTA: f64 = 1e-12;
    if points.is_empty() {
        return Err(AfdError::InvalidParameter("projection needs at least one node".into()));
    }
    let dim = f.dim();
    let norm_sq = f.norm_sq();
    let mut sys = OrthoSystem::new(dim);
    let mut coeffs = Vec::new();
    let mut fphi = Vec::new();
    let mut resid_sq = norm_sq;
    let mut history = vec![norm_sq.sqrt()];

    for z in points {
        if z.dim() != dim {
            return Err(AfdError::DimensionMismatch { expected: dim, got: z.dim() });
        }
        let alpha = escalate_order_extra(sys.points(), z, 0.0, u32::MAX, 0)?;
        let e = DictElement::new(alpha, z.clone())?;
        let cand = match preorthogonalize(&sys, &e, DELTA) {
            Ok(c) => c,
            Err(AfdError::Degenerate { defect }) => {
                let near = nearest_prior(sys.points(), z);
                return Err(AfdError::IllConditioned {
                    cond: if defect > 0.0 { 1.0 / defect } else { f64::INFINITY },
                    points: near,
                });
            }
            Err(e) => return Err(e),
        };
        fphi.push(f.inner_phi(&e)?);
        let mut c = Complex64::default();
        for (t, fp) in cand.row.iter().zip(fphi.iter()) {
            c += t.conj() * fp;
        }
        sys.commit(cand);
        coeffs.push(c);
        resid_sq = (resid_sq - c.norm_sqr()).max(0.0);
        history.push(resid_sq.sqrt());
    }

    Ok(RunOutcome { system: sys, coeffs, residual_history: history })
}

fn nearest_prior(history: &[TubePoint], z: &TubePoint) -> String {
    let mut best = f64::INFINITY;
    let mut who = String::from("(none)");
    for h in history {
        let d2: f64 = h
            .coords()
            .iter()
            .zip(z.coords())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        if d2 < best {
            best = d2;
            who = format!("{:?}", h.coords());
        }
    }
    format!("{:?} and {} (distance {:.3e})", z.coords(), who, best.sqrt())
}
