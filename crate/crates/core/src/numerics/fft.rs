use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{AfdError, Result};
use crate::numerics::grid::Grid;

const TAU: f64 = std::f64::consts::TAU;

/// Discrete approximation of `S(t) = integral s(x) e^{-2 pi i x . t} dx` on
/// the dual grid: `S_j = prod(dx) * sum_k s_k e^{-2 pi i x_k . t_j}`.
///
/// Grid counts must be powers of two. The pairing with [`dft_inverse`] is
/// algebraically exact (the phase factors cancel and `dx * dt * n = 1` per
/// axis), so a roundtrip reproduces the samples to rounding error.
pub fn dft_forward(grid: &Grid, samples: &[Complex64]) -> Result<(Grid, Vec<Complex64>)> {
    check(grid, samples.len())?;
    let dual = grid.dual();
    let mut data = samples.to_vec();
    let mut planner = FftPlanner::new();
    for axis in 0..grid.dim() {
        let n = grid.counts()[axis];
        let dx = grid.spacings()[axis];
        let x0 = grid.origins()[axis];
        let dt = dual.spacings()[axis];
        let t0 = dual.origins()[axis];
        let pre: Vec<Complex64> =
            (0..n).map(|k| Complex64::from_polar(1.0, -TAU * (k as f64) * dx * t0)).collect();
        let post: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(dx, -TAU * x0 * (t0 + (j as f64) * dt)))
            .collect();
        let fft = planner.plan_fft_forward(n);
        axis_pass(&mut data, grid.counts(), axis, &pre, &post, fft.as_ref());
    }
    Ok((dual, data))
}

/// Inverse of [`dft_forward`]: takes the spectrum on the frequency grid and
/// returns samples on its dual grid, `s_k = prod(dt) * sum_j S_j e^{+2 pi i x_k . t_j}`.
pub fn dft_inverse(tgrid: &Grid, spectrum: &[Complex64]) -> Result<(Grid, Vec<Complex64>)> {
    check(tgrid, spectrum.len())?;
    let xgrid = tgrid.dual();
    let mut data = spectrum.to_vec();
    let mut planner = FftPlanner::new();
    for axis in 0..tgrid.dim() {
        let n = tgrid.counts()[axis];
        let dt = tgrid.spacings()[axis];
        let t0 = tgrid.origins()[axis];
        let dx = xgrid.spacings()[axis];
        let x0 = xgrid.origins()[axis];
        let pre: Vec<Complex64> =
            (0..n).map(|j| Complex64::from_polar(1.0, TAU * x0 * (j as f64) * dt)).collect();
        let post: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(dt, TAU * (x0 + (k as f64) * dx) * t0))
            .collect();
        let fft = planner.plan_fft_inverse(n);
        axis_pass(&mut data, tgrid.counts(), axis, &pre, &post, fft.as_ref());
    }
    Ok((xgrid, data))
}

fn check(grid: &Grid, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(AfdError::GridMismatch(format!(
            "sample count {} does not match grid size {}",
            len,
            grid.len()
        )));
    }
    if !grid.is_power_of_two() {
        return Err(AfdError::GridMismatch("grid counts must be powers of two".into()));
    }
    Ok(())
}

/// Applies `lane <- post .* FFT(pre .* lane)` along every 1-D lane of `axis`.
/// Data is row-major with the last axis contiguous.
fn axis_pass(
    data: &mut [Complex64],
    counts: &[usize],
    axis: usize,
    pre: &[Complex64],
    post: &[Complex64],
    fft: &dyn rustfft::Fft<f64>,
) {
    let n = counts[axis];
    if axis + 1 == counts.len() {
        for lane in data.chunks_exact_mut(n) {
            for (v, p) in lane.iter_mut().zip(pre) {
                *v *= p;
            }
            fft.process(lane);
            for (v, q) in lane.iter_mut().zip(post) {
                *v *= q;
            }
        }
    } else {
        debug_assert_eq!(counts.len(), 2);
        let stride = counts[1];
        let mut lane = vec![Complex64::default(); n];
        for col in 0..stride {
            for (j, v) in lane.iter_mut().enumerate() {
                *v = data[col + j * stride] * pre[j];
            }
            fft.process(&mut lane);
            for (j, v) in lane.iter().enumerate() {
                data[col + j * stride] = *v * post[j];
            }
        }
    }
}
