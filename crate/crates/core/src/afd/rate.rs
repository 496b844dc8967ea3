//! Reproducible convergence-rate experiments.
//!
//! The harness draws a finite combination of unit-normalized kernels with
//! prescribed coefficient mass `M = sum |c_j|`, seeds the selection lattice
//! with the atom anchors, and tabulates the residual after each adaptive
//! term next to the `M / sqrt(m)` envelope. With the anchors among the scan
//! candidates, every selected objective dominates the correlation at each
//! remaining atom, which is exactly the inequality the envelope rests on.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::afd::run::afd_run;
use crate::afd::select::SearchConfig;
use crate::afd::KernelCombination;
use crate::error::{AfdError, Result};
use crate::kernels::{phi_norm, DictElement, MultiIndex, TubePoint};

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub m: usize,
    pub residual: f64,
    pub bound: f64,
}

impl RateRow {
    pub fn ok(&self) -> bool {
        self.residual <= self.bound * (1.0 + 1e-12)
    }
}

#[derive(Debug, Clone)]
pub struct RateReport {
    pub rows: Vec<RateRow>,
    /// Coefficient mass `M`.
    pub mass: f64,
    pub anchors: Vec<TubePoint>,
}

fn draw_separated_points(
    rng: &mut ChaCha8Rng,
    count: usize,
    cfg: &SearchConfig,
) -> Result<Vec<TubePoint>> {
    let n = cfg.dim();
    let span: f64 = cfg.x_range.iter().map(|&(lo, hi)| hi - lo).sum();
    let min_sep = 0.4 * span / (count as f64 * n as f64);
    let mut pts: Vec<TubePoint> = Vec::with_capacity(count);
    let mut tries = 0usize;
    while pts.len() < count {
        tries += 1;
        if tries > 100_000 {
            return Err(AfdError::InvalidParameter(format!(
                "could not place {count} anchors with separation {min_sep:.3}"
            )));
        }
        let x: Vec<f64> = cfg
            .x_range
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo + 0.05 * (hi - lo)..hi - 0.05 * (hi - lo)))
            .collect();
        let y: Vec<f64> = cfg
            .y_range
            .iter()
            .map(|&(lo, hi)| {
                if hi > lo {
                    lo * (hi / lo).powf(rng.gen_range(0.0..1.0))
                } else {
                    lo
                }
            })
            .collect();
        let cand = TubePoint::from_xy(&x, &y)?;
        let far_enough = pts.iter().all(|p| {
            let d2: f64 = p
                .coords()
                .iter()
                .zip(cand.coords())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            d2.sqrt() >= min_sep
        });
        if far_enough {
            pts.push(cand);
        }
    }
    Ok(pts)
}

/// Build one random instance and run the adaptive loop for `m_max` terms.
/// Coefficients have magnitudes in [0.2, 1] and uniform phases; the same
/// seed always reproduces the same table. When the run stops early because
/// the residual is numerically zero, the final model's residual is carried
/// forward into the remaining rows.
pub fn rate_harness(
    atom_count: usize,
    m_max: usize,
    base_cfg: &SearchConfig,
    seed: u64,
) -> Result<RateReport> {
    if atom_count == 0 || m_max == 0 {
        return Err(AfdError::InvalidParameter("need at least one atom and one term".into()));
    }
    base_cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let anchors = draw_separated_points(&mut rng, atom_count, base_cfg)?;

    let n = base_cfg.dim();
    let mut terms = Vec::with_capacity(atom_count);
    let mut mass = 0.0f64;
    for z in &anchors {
        let mag = rng.gen_range(0.2..1.0);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        let c = Complex64::from_polar(mag, phase);
        mass += mag;
        let alpha = MultiIndex::zeros(n);
        let norm = phi_norm(&alpha, &z.y())?;
        terms.push((DictElement::new(alpha, z.clone())?, c / norm));
    }
    let f = KernelCombination::new(terms)?;

    let mut cfg = base_cfg.clone();
    cfg.seed_points = anchors.clone();
    let outcome = afd_run(&f, m_max, 0.0, &cfg)?;

    let hist = &outcome.residual_history;
    let rows = (1..=m_max)
        .map(|m| RateRow {
            m,
            residual: hist[m.min(hist.len() - 1)],
            bound: mass / (m as f64).sqrt(),
        })
        .collect();
    Ok(RateReport { rows, mass, anchors })
}
