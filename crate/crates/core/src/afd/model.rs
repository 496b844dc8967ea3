//! Portable form of a finished approximation.
//!
//! An [`Approximant`] stores atoms in the coordinates of the octant it was
//! built for, with every normalization constant and octant sign folded into
//! the basis matrix. Evaluation then reduces to the documented rational
//! form: `F(w) = sum_i a_i prod_j alpha_ij! / (w_j - conj(z_ij))^(alpha_ij+1)`
//! with `a_i = sum_k c_k B[k][i]`.

use num_complex::Complex64;

use crate::error::{AfdError, Result};
use crate::hardy::OctantSignature;
use crate::kernels::{axis_power_term, AXIS_CONST};

use super::run::RunOutcome;

/// One selected dictionary element plus its orthonormal-expansion
/// coefficient `c_k = <F, B_k>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub alpha: Vec<u32>,
    /// Anchor point, in the owning octant's coordinates.
    pub z: Vec<Complex64>,
    pub coeff: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Approximant {
    dim: usize,
    sigma: OctantSignature,
    atoms: Vec<Atom>,
    /// Row-major m x m lower-triangular matrix taking atoms to the
    /// orthonormal basis, constants included.
    bmatrix: Vec<Complex64>,
    /// Residual norm after each term; entry 0 is the input norm.
    residual_history: Vec<f64>,
}

impl Approximant {
    /// Package a run that was carried out over the first octant as the
    /// component for `sigma`. Atom anchors are mapped back into the sigma
    /// octant and the per-atom sign factors are folded into the matrix.
    pub fn from_outcome(sigma: &OctantSignature, outcome: &RunOutcome) -> Result<Self> {
        let n = sigma.dim();
        if outcome.system.dim() != n {
            return Err(AfdError::DimensionMismatch { expected: n, got: outcome.system.dim() });
        }
        let m = outcome.system.len();
        let elems = outcome.system.elements();
        let const_n = AXIS_CONST.powu(n as u32);

        let mut atoms = Vec::with_capacity(m);
        let mut fold = Vec::with_capacity(m);
        for (e, c) in elems.iter().zip(&outcome.coeffs) {
            let mut sgn = 1.0f64;
            let z: Vec<Complex64> = e
                .point()
                .coords()
                .iter()
                .zip(sigma.signs())
                .zip(e.alpha().entries())
                .map(|((zj, &s), &aj)| {
                    if s < 0 && (aj + 1) % 2 == 1 {
                        sgn = -sgn;
                    }
                    Complex64::new(s as f64 * zj.re, s as f64 * zj.im)
                })
                .collect();
            fold.push(const_n * sgn);
            atoms.push(Atom { alpha: e.alpha().entries().to_vec(), z, coeff: *c });
        }

        let mut bmatrix = vec![Complex64::default(); m * m];
        for (k, row) in outcome.system.rows().iter().enumerate() {
            for (i, t) in row.iter().enumerate() {
                bmatrix[k * m + i] = t * fold[i];
            }
        }

        Ok(Approximant {
            dim: n,
            sigma: sigma.clone(),
            atoms,
            bmatrix,
            residual_history: outcome.residual_history.clone(),
        })
    }

    /// A model with no terms; its residual is the input norm.
    pub fn empty(sigma: &OctantSignature, input_norm: f64) -> Self {
        Approximant {
            dim: sigma.dim(),
            sigma: sigma.clone(),
            atoms: Vec::new(),
            bmatrix: Vec::new(),
            residual_history: vec![input_norm],
        }
    }

    /// Raw constructor for deserialization; validates shape consistency.
    pub fn from_parts(
        sigma: OctantSignature,
        atoms: Vec<Atom>,
        bmatrix: Vec<Complex64>,
        residual_history: Vec<f64>,
    ) -> Result<Self> {
        let n = sigma.dim();
        let m = atoms.len();
        for a in &atoms {
            if a.alpha.len() != n || a.z.len() != n {
                return Err(AfdError::DimensionMismatch { expected: n, got: a.alpha.len().max(a.z.len()) });
            }
            for (zj, &s) in a.z.iter().zip(sigma.signs()) {
                if !(zj.re.is_finite() && zj.im.is_finite() && s as f64 * zj.im > 0.0) {
                    return Err(AfdError::OutsideCone(format!(
                        "atom anchor {zj} is not interior to its octant"
                    )));
                }
            }
        }
        if bmatrix.len() != m * m {
            return Err(AfdError::InvalidParameter(format!(
                "basis matrix has {} entries, expected {}",
                bmatrix.len(),
                m * m
            )));
        }
        if residual_history.len() != m + 1 {
            return Err(AfdError::InvalidParameter(format!(
                "residual history has {} entries, expected {}",
                residual_history.len(),
                m + 1
            )));
        }
        Ok(Approximant { dim: n, sigma, atoms, bmatrix, residual_history })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma(&self) -> &OctantSignature {
        &self.sigma
    }

    pub fn terms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bmatrix(&self) -> &[Complex64] {
        &self.bmatrix
    }

    pub fn residual_history(&self) -> &[f64] {
        &self.residual_history
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("history is never empty")
    }

    /// Collapsed per-atom weights `a_i = sum_k c_k B[k][i]`.
    fn weights(&self) -> Vec<Complex64> {
        let m = self.atoms.len();
        let mut w = vec![Complex64::default(); m];
        for (k, atom) in self.atoms.iter().enumerate() {
            for i in 0..m {
                w[i] += atom.coeff * self.bmatrix[k * m + i];
            }
        }
        w
    }

    /// Evaluate at a point of the closed tube for this octant (boundary
    /// points have zero imaginary part).
    pub fn eval(&self, w: &[Complex64]) -> Result<Complex64> {
        if w.len() != self.dim {
            return Err(AfdError::DimensionMismatch { expected: self.dim, got: w.len() });
        }
        for (wj, &s) in w.iter().zip(self.sigma.signs()) {
            if !(wj.re.is_finite() && wj.im.is_finite()) || s as f64 * wj.im < 0.0 {
                return Err(AfdError::OutsideCone(format!(
                    "evaluation point {wj} lies outside the closed tube"
                )));
            }
        }
        let weights = self.weights();
        let mut acc = Complex64::default();
        for (atom, a) in self.atoms.iter().zip(&weights) {
            let mut term = Complex64::new(1.0, 0.0);
            for ((zj, wj), &aj) in atom.z.iter().zip(w).zip(&atom.alpha) {
                let d = wj - zj.conj();
                term *= axis_power_term(d, aj + 1, aj);
            }
            acc += a * term;
        }
        Ok(acc)
    }

    /// Evaluate on a list of real boundary points, one value per row.
    pub fn eval_boundary(&self, xs: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(xs.len());
        let mut w = vec![Complex64::default(); self.dim];
        for x in xs {
            if x.len() != self.dim {
                return Err(AfdError::DimensionMismatch { expected: self.dim, got: x.len() });
            }
            for (wj, &xj) in w.iter_mut().zip(x) {
                *wj = Complex64::new(xj, 0.0);
            }
            out.push(self.eval(&w)?);
        }
        Ok(out)
    }

    /// The mirrored-octant model whose boundary values are the complex
    /// conjugate of this one's. For a model built from real samples, adding
    /// the pair of evaluations recovers twice the real part.
    pub fn conjugate(&self) -> Approximant {
        Approximant {
            dim: self.dim,
            sigma: self.sigma.mirrored(),
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    alpha: a.alpha.clone(),
                    z: a.z.iter().map(|z| z.conj()).collect(),
                    coeff: a.coeff.conj(),
                })
                .collect(),
            bmatrix: self.bmatrix.iter().map(|b| b.conj()).collect(),
            residual_history: self.residual_history.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afd::run::afd_run;
    use crate::afd::select::SearchConfig;
    use crate::afd::KernelCombination;
    use crate::kernels::{DictElement, MultiIndex, TubePoint};

    fn one_kernel_model() -> (KernelCombination, Approximant) {
        let e = DictElement::new(
            MultiIndex::new(vec![0]),
            TubePoint::from_xy(&[0.4], &[0.9]).unwrap(),
        )
        .unwrap();
        let f = KernelCombination::new(vec![(e, Complex64::new(1.0, -0.3))]).unwrap();
        let cfg = SearchConfig::new(vec![(-2.0, 2.0)], vec![(0.3, 2.0)]).unwrap();
        let out = afd_run(&f, 1, 0.0, &cfg).unwrap();
        let model = Approximant::from_outcome(&OctantSignature::all_plus(1), &out).unwrap();
        (f, model)
    }

    #[test]
    fn model_eval_matches_run_eval() {
        let (f, model) = one_kernel_model();
        let w = [Complex64::new(0.25, 0.6)];
        let direct = f.eval(&w).unwrap();
        let modeled = model.eval(&w).unwrap();
        assert!((direct - modeled).norm() < 1e-6, "{direct} vs {modeled}");
    }

    #[test]
    fn conjugate_flips_boundary_values() {
        let (_, model) = one_kernel_model();
        let conj = model.conjugate();
        assert_eq!(conj.sigma().signs(), &[-1]);
        let w = [Complex64::new(0.7, 0.0)];
        let a = model.eval(&w).unwrap();
        let b = conj.eval(&w).unwrap();
        assert!((a.conj() - b).norm() < 1e-12);
    }

    #[test]
    fn minus_octant_model_evaluates_through_the_flip() {
        let e = DictElement::new(
            MultiIndex::new(vec![1]),
            TubePoint::from_xy(&[-0.2], &[1.1]).unwrap(),
        )
        .unwrap();
        let f = KernelCombination::new(vec![(e, Complex64::new(0.8, 0.1))]).unwrap();
        let cfg = SearchConfig::new(vec![(-2.0, 2.0)], vec![(0.4, 2.0)]).unwrap();
        let out = afd_run(&f, 3, 1e-9, &cfg).unwrap();
        let minus = OctantSignature::new(vec![-1]).unwrap();
        let model = Approximant::from_outcome(&minus, &out).unwrap();
        // G(z) = F(sigma o z): the flipped model at -conj(w)... the defining
        // relation is checked directly: eval at sigma o w equals the run's
        // reconstruction at w.
        let w = [Complex64::new(0.3, 0.8)];
        let flipped = [Complex64::new(-0.3, -0.8)];
        let run_val = out.eval(&w).unwrap();
        let model_val = model.eval(&flipped).unwrap();
        assert!((run_val - model_val).norm() < 1e-10, "{run_val} vs {model_val}");
    }

    #[test]
    fn empty_model_reports_input_norm() {
        let m = Approximant::empty(&OctantSignature::all_plus(1), 2.5);
        assert_eq!(m.terms(), 0);
        assert_eq!(m.final_residual(), 2.5);
        let v = m.eval(&[Complex64::new(0.0, 1.0)]).unwrap();
        assert_eq!(v, Complex64::default());
    }

    #[test]
    fn from_parts_validates_shapes() {
        let sig = OctantSignature::all_plus(1);
        let atom = Atom {
            alpha: vec![0],
            z: vec![Complex64::new(0.0, 1.0)],
            coeff: Complex64::new(1.0, 0.0),
        };
        assert!(Approximant::from_parts(sig.clone(), vec![atom.clone()], vec![], vec![1.0, 0.0])
            .is_err());
        let bad = Atom { z: vec![Complex64::new(0.0, -1.0)], ..atom.clone() };
        assert!(Approximant::from_parts(
            sig,
            vec![bad],
            vec![Complex64::default()],
            vec![1.0, 0.0]
        )
        .is_err());
    }
}
