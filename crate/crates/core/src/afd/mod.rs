//! Greedy rational approximation: dictionary escalation, pre-orthogonal
//! selection, the main adaptive loop, a matching-pursuit variant, and the
//! convergence-rate harness.

pub mod dictionary;
pub mod model;
pub mod mp;
pub mod ortho;
pub mod rate;
pub mod run;
pub mod select;

pub use dictionary::escalate_order;
pub use model::{Approximant, Atom};
pub use mp::mp_run;
pub use ortho::{preorthogonalize, Candidate, OrthoSystem};
pub use rate::{rate_harness, RateReport, RateRow};
pub use run::{afd_run, approximate_component, project_interpolate, RunOutcome};
pub use select::{correlation_objective, msp_select, SearchConfig};

use num_complex::Complex64;

use crate::error::{AfdError, Result};
use crate::hardy::SpectralRep;
use crate::kernels::{ip_phi_phi, phi_eval, DictElement};

/// A function in the Hardy space over the first octant, seen through the
/// two quantities the approximation loop needs: inner products against
/// dictionary elements and the squared norm.
pub trait HardyFunction: Sync {
    fn dim(&self) -> usize;

    /// `< F, phi_e >`, which by the reproducing property equals the
    /// order-alpha x-derivative of F at the element's anchor point.
    fn inner_phi(&self, e: &DictElement) -> Result<Complex64>;

    fn norm_sq(&self) -> f64;
}

impl HardyFunction for SpectralRep {
    fn dim(&self) -> usize {
        SpectralRep::dim(self)
    }

    fn inner_phi(&self, e: &DictElement) -> Result<Complex64> {
        if !self.sigma().is_all_plus() {
            return Err(AfdError::InvalidParameter(
                "selection runs over the first octant; flip the component first".into(),
            ));
        }
        self.eval_df(e.alpha(), e.point().coords())
    }

    fn norm_sq(&self) -> f64 {
        let n = self.norm();
        n * n
    }
}

/// Exact finite combination `sum_i c_i phi_{e_i}`, with the norm computed
/// through the closed-form Gram matrix. Useful wherever discretization
/// error would cloud a property under test.
#[derive(Debug, Clone)]
pub struct KernelCombination {
    dim: usize,
    terms: Vec<(DictElement, Complex64)>,
    norm_sq: f64,
}

impl KernelCombination {
    pub fn new(terms: Vec<(DictElement, Complex64)>) -> Result<Self> {
        let dim = terms
            .first()
            .map(|(e, _)| e.dim())
            .ok_or_else(|| AfdError::InvalidParameter("combination needs at least one term".into()))?;
        let mut norm_sq = 0.0;
        for (ei, ci) in &terms {
            if ei.dim() != dim {
                return Err(AfdError::DimensionMismatch { expected: dim, got: ei.dim() });
            }
            for (ej, cj) in &terms {
                norm_sq += (ci * cj.conj() * ip_phi_phi(ei, ej)?).re;
            }
        }
        Ok(KernelCombination { dim, terms, norm_sq: norm_sq.max(0.0) })
    }

    pub fn terms(&self) -> &[(DictElement, Complex64)] {
        &self.terms
    }

    pub fn eval(&self, w: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::default();
        for (e, c) in &self.terms {
            acc += c * phi_eval(e, w)?;
        }
        Ok(acc)
    }
}

impl HardyFunction for KernelCombination {
    fn dim(&self) -> usize {
        self.dim
    }

    fn inner_phi(&self, e: &DictElement) -> Result<Complex64> {
        let mut acc = Complex64::default();
        for (ei, ci) in &self.terms {
            acc += ci * ip_phi_phi(ei, e)?;
        }
        Ok(acc)
    }

    fn norm_sq(&self) -> f64 {
        self.norm_sq
    }
}
