//! Plain matching pursuit over a fixed dictionary of normalized kernels.
//!
//! Unlike the adaptive loop, atoms here are anchored to the lattice, the
//! dictionary carries every derivative order up to the cap at every lattice
//! point, and successive atoms are not orthogonalized: each step subtracts
//! the residual's projection onto the newly chosen unit atom only. This is
//! the natural baseline the adaptive method is compared against.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::afd::dictionary::multi_indices_up_to;
use crate::afd::model::{Approximant, Atom};
use crate::afd::select::SearchConfig;
use crate::afd::HardyFunction;
use crate::error::{AfdError, Result};
use crate::hardy::OctantSignature;
use crate::kernels::{ip_phi_phi, phi_norm, DictElement, AXIS_CONST};

/// `< R_m, psi_e >` where `R_m = F - sum_l a_l psi_l` and every psi is a
/// unit-normalized kernel.
fn residual_corr<H: HardyFunction + ?Sized>(
    f: &H,
    selected: &[(DictElement, Complex64, f64)],
    e: &DictElement,
    norm_e: f64,
) -> Result<Complex64> {
    let mut num = f.inner_phi(e)?;
    for (el, al, nl) in selected {
        num -= al / nl * ip_phi_phi(el, e)?;
    }
    Ok(num / norm_e)
}

/// Run matching pursuit for `m_max` steps over the dictionary spanned by
/// the lattice of `cfg` and all derivative orders up to `cfg.alpha_cap`.
/// Stops early once every correlation is numerically zero.
pub fn mp_run<H: HardyFunction + ?Sized>(
    f: &H,
    m_max: usize,
    cfg: &SearchConfig,
) -> Result<Approximant> {
    cfg.validate()?;
    let n = f.dim();
    if cfg.dim() != n {
        return Err(AfdError::DimensionMismatch { expected: n, got: cfg.dim() });
    }

    let mut dict = Vec::new();
    for z in cfg.lattice()? {
        for alpha in multi_indices_up_to(cfg.alpha_cap, n) {
            let norm = phi_norm(&alpha, &z.y())?;
            dict.push((DictElement::new(alpha, z.clone())?, norm));
        }
    }

    let mut selected: Vec<(DictElement, Complex64, f64)> = Vec::new();
    let mut resid_sq = f.norm_sq();
    let mut history = vec![resid_sq.sqrt()];

    for _ in 0..m_max {
        let corrs: Vec<Result<Complex64>> = dict
            .par_iter()
            .map(|(e, norm)| residual_corr(f, &selected, e, *norm))
            .collect();
        let mut best_idx = 0usize;
        let mut best_mag = f64::NEG_INFINITY;
        let mut best_val = Complex64::default();
        for (i, c) in corrs.into_iter().enumerate() {
            let c = c?;
            let mag = c.norm();
            if mag > best_mag {
                best_mag = mag;
                best_idx = i;
                best_val = c;
            }
        }
        if best_mag < 1e-14 {
            break;
        }
        let (e, norm) = dict[best_idx].clone();
        selected.push((e, best_val, norm));
        resid_sq = (resid_sq - best_val.norm_sqr()).max(0.0);
        history.push(resid_sq.sqrt());
    }

    let m = selected.len();
    let const_n = AXIS_CONST.powu(n as u32);
    let mut atoms = Vec::with_capacity(m);
    let mut bmatrix = vec![Complex64::default(); m * m];
    for (k, (e, a, norm)) in selected.iter().enumerate() {
        atoms.push(Atom {
            alpha: e.alpha().entries().to_vec(),
            z: e.point().coords().to_vec(),
            coeff: *a,
        });
        bmatrix[k * m + k] = const_n / norm;
    }
    Approximant::from_parts(OctantSignature::all_plus(n), atoms, bmatrix, history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afd::KernelCombination;
    use crate::kernels::{MultiIndex, TubePoint};

    #[test]
    fn single_dictionary_atom_is_recovered_in_one_step() {
        let mut cfg = SearchConfig::new(vec![(-2.0, 2.0)], vec![(0.5, 2.0)]).unwrap();
        cfg.x_count = 5;
        cfg.y_count = 4;
        cfg.alpha_cap = 2;
        let z = TubePoint::from_xy(&[cfg.x_values(0)[3]], &[cfg.y_values(0)[1]]).unwrap();
        let e = DictElement::new(MultiIndex::new(vec![0]), z).unwrap();
        let scale = 0.7 / phi_norm(e.alpha(), &e.point().y()).unwrap();
        let f = KernelCombination::new(vec![(e, Complex64::new(scale, 0.0))]).unwrap();

        let model = mp_run(&f, 4, &cfg).unwrap();
        assert_eq!(model.terms(), 1);
        assert!(model.final_residual() < 1e-12, "{}", model.final_residual());
        let w = [Complex64::new(0.3, 0.9)];
        let err = (model.eval(&w).unwrap() - f.eval(&w).unwrap()).norm();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn residual_norms_are_non_increasing() {
        let e1 = DictElement::new(
            MultiIndex::new(vec![0]),
            TubePoint::from_xy(&[0.1], &[0.8]).unwrap(),
        )
        .unwrap();
        let e2 = DictElement::new(
            MultiIndex::new(vec![1]),
            TubePoint::from_xy(&[-0.9], &[1.4]).unwrap(),
        )
        .unwrap();
        let f = KernelCombination::new(vec![
            (e1, Complex64::new(1.0, 0.2)),
            (e2, Complex64::new(-0.4, 0.7)),
        ])
        .unwrap();
        let mut cfg = SearchConfig::new(vec![(-2.0, 2.0)], vec![(0.5, 2.0)]).unwrap();
        cfg.x_count = 9;
        cfg.y_count = 6;
        cfg.alpha_cap = 1;
        let model = mp_run(&f, 6, &cfg).unwrap();
        let h = model.residual_history();
        assert!(h.len() >= 2);
        for w in h.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "{:?}", h);
        }
    }
}
