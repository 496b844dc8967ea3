//! Running Gram-Schmidt over dictionary elements with closed-form inner
//! products.
//!
//! The system keeps the selected elements and a lower-triangular coefficient
//! matrix T with `B_k = sum_i T[k][i] phi_i`, so every orthonormal basis
//! vector stays an explicit finite combination of dictionary kernels. All
//! inner products come from [`crate::kernels::ip_phi_phi`]; nothing here is
//! discretized.

use num_complex::Complex64;

use crate::error::{AfdError, Result};
use crate::kernels::{ip_phi_phi, phi_norm_sq, DictElement, TubePoint};

#[derive(Debug, Clone)]
pub struct OrthoSystem {
    dim: usize,
    elems: Vec<DictElement>,
    points: Vec<TubePoint>,
    tmat: Vec<Vec<Complex64>>,
}

/// A dictionary element orthogonalized against the current system but not
/// yet committed to it.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub element: DictElement,
    /// `< phi_e, B_k >` for each basis vector already in the system.
    pub projections: Vec<Complex64>,
    /// Remaining fraction of `|phi_e|^2` after projection, in [0, 1].
    pub defect: f64,
    pub phi_norm_sq: f64,
    /// `|beta|`, the norm of the orthogonal remainder.
    pub beta_norm: f64,
    /// Coefficients of the normalized remainder over `phi_1..phi_e`.
    pub row: Vec<Complex64>,
}

/// Orthogonalize `phi_e` against the system. Fails with
/// [`AfdError::Degenerate`] when the remainder carries less than `delta_deg`
/// of the element's energy.
pub fn preorthogonalize(
    sys: &OrthoSystem,
    e: &DictElement,
    delta_deg: f64,
) -> Result<Candidate> {
    if e.dim() != sys.dim {
        return Err(AfdError::DimensionMismatch { expected: sys.dim, got: e.dim() });
    }
    let m = sys.elems.len();
    let mut ips = Vec::with_capacity(m);
    for prev in &sys.elems {
        ips.push(ip_phi_phi(e, prev)?);
    }
    let nsq = phi_norm_sq(e.alpha(), &e.point().y())?;

    let mut projections = Vec::with_capacity(m);
    let mut captured = 0.0;
    for row in &sys.tmat {
        let mut p = Complex64::default();
        for (t, ip) in row.iter().zip(&ips) {
            p += t.conj() * ip;
        }
        captured += p.norm_sqr();
        projections.push(p);
    }

    let defect = (1.0 - captured / nsq).max(0.0);
    if defect < delta_deg {
        return Err(AfdError::Degenerate { defect });
    }
    let beta_norm = nsq.sqrt() * defect.sqrt();

    let mut row = vec![Complex64::default(); m + 1];
    for (p, trow) in projections.iter().zip(&sys.tmat) {
        for (ri, ti) in row.iter_mut().zip(trow) {
            *ri -= p * ti;
        }
    }
    row[m] = Complex64::new(1.0, 0.0);
    for ri in &mut row {
        *ri /= beta_norm;
    }

    Ok(Candidate { element: e.clone(), projections, defect, phi_norm_sq: nsq, beta_norm, row })
}

impl OrthoSystem {
    pub fn new(dim: usize) -> Self {
        OrthoSystem { dim, elems: Vec::new(), points: Vec::new(), tmat: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[DictElement] {
        &self.elems
    }

    /// Anchor points of the selected elements, in selection order.
    pub fn points(&self) -> &[TubePoint] {
        &self.points
    }

    /// Lower-triangular rows expressing each basis vector over the elements.
    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.tmat
    }

    pub fn commit(&mut self, cand: Candidate) {
        self.points.push(cand.element.point().clone());
        self.elems.push(cand.element);
        self.tmat.push(cand.row);
    }

    /// Convenience: orthogonalize and commit in one step.
    pub fn try_add(&mut self, e: &DictElement, delta_deg: f64) -> Result<Candidate> {
        let cand = preorthogonalize(self, e, delta_deg)?;
        self.commit(cand.clone());
        Ok(cand)
    }

    /// `< phi_e, B_k >` for every k, without mutating the system.
    pub fn projections(&self, e: &DictElement) -> Result<Vec<Complex64>> {
        let mut ips = Vec::with_capacity(self.elems.len());
        for prev in &self.elems {
            ips.push(ip_phi_phi(e, prev)?);
        }
        let mut out = Vec::with_capacity(self.tmat.len());
        for row in &self.tmat {
            let mut p = Complex64::default();
            for (t, ip) in row.iter().zip(&ips) {
                p += t.conj() * ip;
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Gram matrix of the basis vectors, for diagnostics and tests. Exact
    /// orthonormality means this is the identity.
    pub fn basis_gram(&self) -> Result<Vec<Vec<Complex64>>> {
        let m = self.elems.len();
        let mut phi_gram = vec![vec![Complex64::default(); m]; m];
        for i in 0..m {
            for j in 0..m {
                phi_gram[i][j] = ip_phi_phi(&self.elems[i], &self.elems[j])?;
            }
        }
        let mut out = vec![vec![Complex64::default(); m]; m];
        for j in 0..m {
            for k in 0..m {
                let mut acc = Complex64::default();
                for (i, ti) in self.tmat[j].iter().enumerate() {
                    for (l, tl) in self.tmat[k].iter().enumerate() {
                        acc += ti * tl.conj() * phi_gram[i][l];
                    }
                }
                out[j][k] = acc;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::MultiIndex;

    fn elem(x: f64, y: f64, a: u32) -> DictElement {
        DictElement::new(
            MultiIndex::new(vec![a]),
            TubePoint::from_xy(&[x], &[y]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn committed_rows_are_orthonormal() {
        let mut sys = OrthoSystem::new(1);
        for e in [elem(0.0, 1.0, 0), elem(1.0, 0.7, 0), elem(-0.5, 1.3, 1), elem(0.2, 0.4, 0)] {
            sys.try_add(&e, 1e-10).unwrap();
        }
        let g = sys.basis_gram().unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!(
                    (g[j][k] - want).norm() < 1e-10,
                    "gram[{j}][{k}] = {:?}",
                    g[j][k]
                );
            }
        }
    }

    #[test]
    fn duplicate_kernel_is_degenerate() {
        let mut sys = OrthoSystem::new(1);
        sys.try_add(&elem(0.3, 0.9, 0), 1e-10).unwrap();
        let err = sys.try_add(&elem(0.3, 0.9, 0), 1e-10).unwrap_err();
        assert!(matches!(err, AfdError::Degenerate { .. }));
    }

    #[test]
    fn derivative_at_same_point_is_independent() {
        let mut sys = OrthoSystem::new(1);
        sys.try_add(&elem(0.3, 0.9, 0), 1e-10).unwrap();
        let cand = sys.try_add(&elem(0.3, 0.9, 1), 1e-10).unwrap();
        assert!(cand.defect > 0.1, "defect {}", cand.defect);
    }

    #[test]
    fn candidate_energy_split_matches_norm() {
        let mut sys = OrthoSystem::new(1);
        sys.try_add(&elem(0.0, 1.0, 0), 1e-10).unwrap();
        sys.try_add(&elem(0.8, 1.1, 0), 1e-10).unwrap();
        let e = elem(0.4, 0.9, 0);
        let cand = preorthogonalize(&sys, &e, 1e-10).unwrap();
        let captured: f64 = cand.projections.iter().map(|p| p.norm_sqr()).sum();
        let total = captured + cand.beta_norm * cand.beta_norm;
        assert!((total - cand.phi_norm_sq).abs() < 1e-12 * cand.phi_norm_sq);
    }
}
