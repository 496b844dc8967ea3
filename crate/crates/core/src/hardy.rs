//! Octant Hardy decomposition of sampled boundary data.
//!
//! A sampled signal on R^n is split into 2^n analytic components by masking
//! its discrete Fourier transform to the closed octant matching each sign
//! pattern. Each component is kept spectrally and can be evaluated, together
//! with its x-derivatives, anywhere in the corresponding tube.
//!
//! Frequencies exactly on a coordinate hyperplane (the zero bin and the
//! shared Nyquist bin) carry weight 1/2 toward each adjacent octant, so the
//! masks sum to one and reconstruction is exact. When a component is
//! evaluated off the boundary, the Nyquist bin is read at the frequency on
//! the component's own side, which keeps the exponential damped.

use num_complex::Complex64;

use crate::error::{AfdError, Result};
use crate::kernels::MultiIndex;
use crate::numerics::fft::{dft_forward, dft_inverse};
use crate::numerics::grid::Grid;

const TAU: f64 = std::f64::consts::TAU;

/// Sign pattern picking one of the 2^n octant tubes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OctantSignature {
    signs: Vec<i8>,
}

impl OctantSignature {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() || signs.len() > 2 {
            return Err(AfdError::InvalidParameter("signature dimension must be 1 or 2".into()));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(AfdError::InvalidParameter("signature entries must be +1 or -1".into()));
        }
        Ok(OctantSignature { signs })
    }

    pub fn all_plus(n: usize) -> Self {
        OctantSignature { signs: vec![1; n] }
    }

    /// All 2^n signatures; index bit a flips axis a, so index 0 is all-plus.
    pub fn enumerate(n: usize) -> Vec<Self> {
        (0..1usize << n)
            .map(|idx| OctantSignature {
                signs: (0..n).map(|a| if idx >> a & 1 == 0 { 1 } else { -1 }).collect(),
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn minus_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    pub fn is_all_plus(&self) -> bool {
        self.signs.iter().all(|&s| s > 0)
    }

    /// Signature with every sign flipped.
    pub fn mirrored(&self) -> Self {
        OctantSignature { signs: self.signs.iter().map(|&s| -s).collect() }
    }

    /// Compact text form such as "+", "-", "+-"; used in file names.
    pub fn label(&self) -> String {
        self.signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
    }
}

/// Sampled boundary data on a centered grid.
#[derive(Debug, Clone)]
pub struct BoundarySamples {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub declared_real: bool,
}

impl BoundarySamples {
    pub fn new(grid: Grid, values: Vec<Complex64>, declared_real: bool) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(AfdError::GridMismatch(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(AfdError::InvalidParameter("samples contain non-finite values".into()));
        }
        if declared_real && values.iter().any(|v| v.im != 0.0) {
            return Err(AfdError::InvalidParameter(
                "samples declared real but have nonzero imaginary parts".into(),
            ));
        }
        Ok(BoundarySamples { grid, values, declared_real })
    }

    pub fn norm(&self) -> f64 {
        let cell: f64 = self.grid.spacings().iter().product();
        (cell * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }
}

/// One octant component of a signal, stored as its spectral density on the
/// frequency grid. The density is zero outside the closed octant of the
/// signature; hyperplane bins carry their 1/2 mask weight already applied.
#[derive(Debug, Clone)]
pub struct SpectralRep {
    sigma: OctantSignature,
    tgrid: Grid,
    density: Vec<Complex64>,
    support_idx: Vec<u32>,
    support_t: Vec<[f64; 2]>,
}

fn axis_weight(j: usize, n: usize, sign: i8) -> f64 {
    if j == 0 || j == n / 2 {
        0.5
    } else if (j > n / 2) == (sign > 0) {
        1.0
    } else {
        0.0
    }
}

fn axis_eval_freq(j: usize, n: usize, sign: i8, t0: f64, dt: f64) -> f64 {
    if j == 0 {
        sign as f64 * (n as f64 / 2.0) * dt
    } else {
        t0 + j as f64 * dt
    }
}

impl SpectralRep {
    /// Wraps a masked density, checking the support invariant and caching
    /// the supported bins with their evaluation frequencies.
    pub fn new(sigma: OctantSignature, tgrid: Grid, density: Vec<Complex64>) -> Result<Self> {
        if sigma.dim() != tgrid.dim() {
            return Err(AfdError::DimensionMismatch { expected: tgrid.dim(), got: sigma.dim() });
        }
        if density.len() != tgrid.len() {
            return Err(AfdError::GridMismatch(format!(
                "density length {} does not match grid size {}",
                density.len(),
                tgrid.len()
            )));
        }
        if !tgrid.is_power_of_two() {
            return Err(AfdError::GridMismatch("grid counts must be powers of two".into()));
        }
        let mut support_idx = Vec::new();
        let mut support_t = Vec::new();
        for (flat, d) in density.iter().enumerate() {
            if !d.is_finite() {
                return Err(AfdError::InvalidParameter("density contains non-finite values".into()));
            }
            if d.norm_sqr() == 0.0 {
                continue;
            }
            let idx = tgrid.unflat(flat);
            let mut t = [0.0f64; 2];
            for a in 0..tgrid.dim() {
                let n = tgrid.counts()[a];
                if axis_weight(idx[a], n, sigma.signs()[a]) == 0.0 {
                    return Err(AfdError::GridMismatch(format!(
                        "density has mass at frequency bin {:?}, outside the {} octant",
                        idx,
                        sigma.label()
                    )));
                }
                t[a] = axis_eval_freq(idx[a], n, sigma.signs()[a], tgrid.origins()[a], tgrid.spacings()[a]);
            }
            support_idx.push(flat as u32);
            support_t.push(t);
        }
        Ok(SpectralRep { sigma, tgrid, density, support_idx, support_t })
    }

    pub fn sigma(&self) -> &OctantSignature {
        &self.sigma
    }

    pub fn grid(&self) -> &Grid {
        &self.tgrid
    }

    pub fn density(&self) -> &[Complex64] {
        &self.density
    }

    pub fn dim(&self) -> usize {
        self.tgrid.dim()
    }

    pub fn scaled(&self, c: Complex64) -> SpectralRep {
        let mut out = self.clone();
        for v in &mut out.density {
            *v *= c;
        }
        if c.norm_sqr() == 0.0 {
            out.support_idx.clear();
            out.support_t.clear();
        }
        out
    }

    /// L^2 norm of the component: sqrt of the cell-weighted density energy.
    /// Equals the L^2 norm of the component's boundary samples (Parseval).
    pub fn norm(&self) -> f64 {
        let cell: f64 = self.tgrid.spacings().iter().product();
        (cell * self.density.iter().map(|d| d.norm_sqr()).sum::<f64>()).sqrt()
    }

    fn check_point(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(AfdError::DimensionMismatch { expected: self.dim(), got: z.len() });
        }
        for (za, &sa) in z.iter().zip(self.sigma.signs()) {
            if !(za.im * sa as f64 > 0.0) {
                return Err(AfdError::OutsideCone(format!(
                    "imaginary part {} lies outside the {} octant",
                    za.im,
                    self.sigma.label()
                )));
            }
        }
        Ok(())
    }

    /// Evaluates the component at an interior point of its tube via the
    /// damped Fourier sum `sum dt^n f(t) e^{2 pi i z.t}`.
    pub fn eval_f(&self, z: &[Complex64]) -> Result<Complex64> {
        self.check_point(z)?;
        Ok(self.eval_sum(None, z))
    }

    /// Derivative `d^alpha/dx^alpha` of the component at an interior point:
    /// inserts `(2 pi i t)^alpha` into the Fourier sum. `alpha = 0` reduces
    /// exactly to [`SpectralRep::eval_f`].
    pub fn eval_df(&self, alpha: &MultiIndex, z: &[Complex64]) -> Result<Complex64> {
        self.check_point(z)?;
        if alpha.dim() != self.dim() {
            return Err(AfdError::DimensionMismatch { expected: self.dim(), got: alpha.dim() });
        }
        Ok(self.eval_sum(Some(alpha), z))
    }

    fn eval_sum(&self, alpha: Option<&MultiIndex>, z: &[Complex64]) -> Complex64 {
        let cell: f64 = self.tgrid.spacings().iter().product();
        let order: u32 = alpha.map_or(0, MultiIndex::order);
        let i_pow = match order % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let mut acc = Complex64::default();
        for (flat, t) in self.support_idx.iter().zip(&self.support_t) {
            let mut re = 0.0;
            let mut im = 0.0;
            for (a, za) in z.iter().enumerate() {
                re += za.re * t[a];
                im += za.im * t[a];
            }
            let mut term = self.density[*flat as usize] * Complex64::from_polar((-TAU * im).exp(), TAU * re);
            if let Some(alpha) = alpha {
                let mut poly = 1.0;
                for (a, &aa) in alpha.entries().iter().enumerate() {
                    poly *= (TAU * t[a]).powi(aa as i32);
                }
                term *= poly;
            }
            acc += term;
        }
        if order > 0 {
            acc *= i_pow;
        }
        acc * cell
    }

    /// Boundary samples of this component alone (inverse transform of the
    /// masked spectrum).
    pub fn boundary_values(&self) -> Result<BoundarySamples> {
        let (xgrid, values) = dft_inverse(&self.tgrid, &self.density)?;
        BoundarySamples::new(xgrid, values, false)
    }

    /// The component re-expressed over the first octant: minus axes are
    /// reflected in frequency, turning the component into a function on the
    /// tube over the all-plus octant. Selection machinery runs there and the
    /// resulting atoms are mapped back through the stored signature.
    pub fn flip_to_first_octant(&self) -> Result<SpectralRep> {
        if self.sigma.is_all_plus() {
            return Ok(self.clone());
        }
        let mut flipped = vec![Complex64::default(); self.density.len()];
        for (flat, d) in self.density.iter().enumerate() {
            if d.norm_sqr() == 0.0 {
                continue;
            }
            let idx = self.tgrid.unflat(flat);
            let mut target = Vec::with_capacity(idx.len());
            for (a, &j) in idx.iter().enumerate() {
                let n = self.tgrid.counts()[a];
                target.push(if self.sigma.signs()[a] > 0 { j } else { (n - j) % n });
            }
            flipped[self.tgrid.flat(&target)] = *d;
        }
        SpectralRep::new(OctantSignature::all_plus(self.dim()), self.tgrid.clone(), flipped)
    }
}

/// Projects boundary samples onto the octant of `sigma`: forward transform,
/// octant mask with half-weight hyperplane bins, spectral wrap.
pub fn hardy_project(s: &BoundarySamples, sigma: &OctantSignature) -> Result<SpectralRep> {
    if sigma.dim() != s.grid.dim() {
        return Err(AfdError::DimensionMismatch { expected: s.grid.dim(), got: sigma.dim() });
    }
    let (tgrid, mut density) = dft_forward(&s.grid, &s.values)?;
    for (flat, d) in density.iter_mut().enumerate() {
        let idx = tgrid.unflat(flat);
        let mut w = 1.0;
        for (a, &j) in idx.iter().enumerate() {
            w *= axis_weight(j, tgrid.counts()[a], sigma.signs()[a]);
        }
        *d *= w;
    }
    SpectralRep::new(sigma.clone(), tgrid, density)
}

/// All 2^n octant components of the samples, in [`OctantSignature::enumerate`] order.
pub fn hardy_split(s: &BoundarySamples) -> Result<Vec<SpectralRep>> {
    OctantSignature::enumerate(s.grid.dim())
        .into_iter()
        .map(|sigma| hardy_project(s, &sigma))
        .collect()
}

/// Sums a complete set of octant components back into boundary samples.
/// Exact up to rounding because the octant masks partition every frequency.
pub fn reconstruct(components: &[SpectralRep]) -> Result<BoundarySamples> {
    let first = components
        .first()
        .ok_or_else(|| AfdError::InvalidParameter("no components given".into()))?;
    let n = first.dim();
    let expected = OctantSignature::enumerate(n);
    if components.len() != expected.len() {
        return Err(AfdError::InvalidParameter(format!(
            "expected {} components for dimension {}, got {}",
            expected.len(),
            n,
            components.len()
        )));
    }
    let mut seen = vec![false; expected.len()];
    let mut total = vec![Complex64::default(); first.grid().len()];
    for c in components {
        if !c.grid().compatible(first.grid()) {
            return Err(AfdError::GridMismatch("components use different frequency grids".into()));
        }
        let pos = expected
            .iter()
            .position(|s| s == c.sigma())
            .ok_or_else(|| AfdError::InvalidParameter("component signature has wrong dimension".into()))?;
        if seen[pos] {
            return Err(AfdError::InvalidParameter(format!(
                "duplicate component for octant {}",
                c.sigma().label()
            )));
        }
        seen[pos] = true;
        for (t, d) in total.iter_mut().zip(c.density()) {
            *t += d;
        }
    }
    let (xgrid, values) = dft_inverse(first.grid(), &total)?;
    BoundarySamples::new(xgrid, values, false)
}
