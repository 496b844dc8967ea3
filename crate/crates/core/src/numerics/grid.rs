use crate::error::{AfdError, Result};

/// Uniform sampling grid on up to two axes.
///
/// Axis `a` carries points `x_k = x0[a] + k * dx[a]`, `k = 0..n[a]`.
/// A centered grid over `[-L, L]` uses `x0 = -L`, `dx = 2L/n` (the right
/// endpoint is excluded, as required for an exact transform pairing).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: Vec<usize>,
    x0: Vec<f64>,
    dx: Vec<f64>,
}

impl Grid {
    pub fn new(n: Vec<usize>, x0: Vec<f64>, dx: Vec<f64>) -> Result<Self> {
        let dim = n.len();
        if dim == 0 || dim > 2 {
            return Err(AfdError::InvalidParameter(format!(
                "grid dimension must be 1 or 2, got {dim}"
            )));
        }
        if x0.len() != dim || dx.len() != dim {
            return Err(AfdError::DimensionMismatch { expected: dim, got: x0.len().max(dx.len()) });
        }
        for a in 0..dim {
            if n[a] < 8 {
                return Err(AfdError::GridMismatch(format!("axis {a}: need at least 8 points, got {}", n[a])));
            }
            if !(dx[a] > 0.0 && dx[a].is_finite()) {
                return Err(AfdError::GridMismatch(format!("axis {a}: spacing must be positive, got {}", dx[a])));
            }
        }
        Ok(Grid { n, x0, dx })
    }

    /// Centered transform grid over `[-L, L]` per axis; counts must be powers of two.
    pub fn centered(n: &[usize], extent: &[f64]) -> Result<Self> {
        if n.len() != extent.len() {
            return Err(AfdError::DimensionMismatch { expected: n.len(), got: extent.len() });
        }
        for (a, &na) in n.iter().enumerate() {
            if !na.is_power_of_two() {
                return Err(AfdError::GridMismatch(format!("axis {a}: transform grids need a power-of-two count, got {na}")));
            }
        }
        let x0: Vec<f64> = extent.iter().map(|&l| -l).collect();
        let dx: Vec<f64> = n.iter().zip(extent).map(|(&na, &l)| 2.0 * l / na as f64).collect();
        Grid::new(n.to_vec(), x0, dx)
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.n
    }

    pub fn origins(&self) -> &[f64] {
        &self.x0
    }

    pub fn spacings(&self) -> &[f64] {
        &self.dx
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_power_of_two(&self) -> bool {
        self.n.iter().all(|na| na.is_power_of_two())
    }

    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        self.x0[axis] + k as f64 * self.dx[axis]
    }

    /// Half-width `n*dx/2` of the axis, the extent `L` for centered grids.
    pub fn half_width(&self, axis: usize) -> f64 {
        self.n[axis] as f64 * self.dx[axis] / 2.0
    }

    /// Row-major flat index, last axis fastest.
    pub fn flat(&self, idx: &[usize]) -> usize {
        match self.dim() {
            1 => idx[0],
            _ => idx[0] * self.n[1] + idx[1],
        }
    }

    pub fn unflat(&self, flat: usize) -> Vec<usize> {
        match self.dim() {
            1 => vec![flat],
            _ => vec![flat / self.n[1], flat % self.n[1]],
        }
    }

    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().enumerate().map(|(a, &k)| self.coord(a, k)).collect()
    }

    /// Frequency-side grid of the transform pairing: `dt = 1/(n*dx)`,
    /// centered so the zero frequency is the bin `n/2`.
    pub fn dual(&self) -> Grid {
        let dt: Vec<f64> = self
            .n
            .iter()
            .zip(&self.dx)
            .map(|(&na, &dxa)| 1.0 / (na as f64 * dxa))
            .collect();
        let t0: Vec<f64> = self
            .n
            .iter()
            .zip(&dt)
            .map(|(&na, &dta)| -((na / 2) as f64) * dta)
            .collect();
        Grid { n: self.n.clone(), x0: t0, dx: dt }
    }

    /// Loose structural equality for grid-compatibility checks.
    pub fn compatible(&self, other: &Grid) -> bool {
        if self.n != other.n {
            return false;
        }
        let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= 1e-12 * scale.max(1.0);
        (0..self.dim()).all(|a| {
            close(self.x0[a], other.x0[a], self.x0[a].abs()) && close(self.dx[a], other.dx[a], self.dx[a])
        })
    }
}
