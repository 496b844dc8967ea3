//! Pipeline tests for the sampled-signal path: octant projection, spectral
//! evaluation inside the tube, derivative sums, boundary recovery, and the
//! conjugate symmetry of real inputs.

use std::f64::consts::TAU;

use num_complex::Complex64;

use afd_tube::hardy::{
    hardy_project, hardy_split, reconstruct, BoundarySamples, OctantSignature, SpectralRep,
};
use afd_tube::kernels::{ip_phi_phi, DictElement, MultiIndex, TubePoint};
use afd_tube::numerics::grid::Grid;

fn l2(grid: &Grid, values: &[Complex64]) -> f64 {
    let cell: f64 = grid.spacings().iter().product();
    (cell * values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
}

fn diff_l2(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> f64 {
    let cell: f64 = grid.spacings().iter().product();
    (cell * a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>()).sqrt()
}

/// An exactly representable analytic signal: a few positive on-lattice
/// frequencies away from the zero and Nyquist bins.
fn mode_signal(grid: &Grid, modes: &[(usize, Complex64)]) -> (BoundarySamples, Vec<(f64, Complex64)>) {
    let dt = grid.dual().spacings()[0];
    let freqs: Vec<(f64, Complex64)> =
        modes.iter().map(|&(j, a)| (j as f64 * dt, a)).collect();
    let values: Vec<Complex64> = (0..grid.counts()[0])
        .map(|k| {
            let x = grid.coord(0, k);
            freqs
                .iter()
                .map(|&(t, a)| a * Complex64::from_polar(1.0, TAU * t * x))
                .sum()
        })
        .collect();
    (BoundarySamples::new(grid.clone(), values, false).unwrap(), freqs)
}

#[test]
fn analytic_modes_project_losslessly_and_evaluate_exactly() {
    let grid = Grid::centered(&[256], &[16.0]).unwrap();
    let (samples, freqs) = mode_signal(
        &grid,
        &[
            (5, Complex64::new(1.0, 0.0)),
            (12, Complex64::new(-0.3, 0.8)),
            (40, Complex64::new(0.15, -0.45)),
        ],
    );

    let plus = hardy_project(&samples, &OctantSignature::all_plus(1)).unwrap();
    let minus = hardy_project(&samples, &OctantSignature::new(vec![-1]).unwrap()).unwrap();
    assert!(minus.norm() <= 1e-12 * plus.norm(), "leak into the lower octant: {}", minus.norm());
    assert!((plus.norm() - samples.norm()).abs() <= 1e-12 * samples.norm());

    let z = [Complex64::new(0.3, 0.9)];
    let want: Complex64 = freqs
        .iter()
        .map(|&(t, a)| a * (Complex64::new(0.0, TAU * t) * z[0]).exp())
        .sum();
    let got = plus.eval_f(&z).unwrap();
    assert!((got - want).norm() <= 1e-12 * want.norm(), "{got} vs {want}");

    let alpha = MultiIndex::new(vec![2]);
    let want_d: Complex64 = freqs
        .iter()
        .map(|&(t, a)| {
            let iw = Complex64::new(0.0, TAU * t);
            a * iw * iw * (iw * z[0]).exp()
        })
        .sum();
    let got_d = plus.eval_df(&alpha, &z).unwrap();
    assert!((got_d - want_d).norm() <= 1e-12 * want_d.norm(), "{got_d} vs {want_d}");
}

#[test]
fn reprojecting_a_component_changes_nothing() {
    let grid = Grid::centered(&[128], &[8.0]).unwrap();
    let (samples, _) = mode_signal(
        &grid,
        &[(3, Complex64::new(0.9, 0.1)), (25, Complex64::new(0.2, 0.7))],
    );
    let sigma = OctantSignature::all_plus(1);
    let first = hardy_project(&samples, &sigma).unwrap();
    let second = hardy_project(&first.boundary_values().unwrap(), &sigma).unwrap();
    assert_eq!(first.grid().counts(), second.grid().counts());
    let scale = first.density().iter().map(Complex64::norm).fold(0.0f64, f64::max);
    let drift = first
        .density()
        .iter()
        .zip(second.density())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    assert!(drift <= 1e-13 * scale, "density drifted by {drift} at scale {scale}");
}

#[test]
fn tensor_modes_land_in_the_matching_octants() {
    let grid = Grid::centered(&[32, 32], &[4.0, 4.0]).unwrap();
    let dt = grid.dual().spacings()[0];
    // One mode per axis: +t1 on the first, -t2 on the second, so all the
    // energy belongs to the (+,-) octant.
    let (t1, t2) = (3.0 * dt, 7.0 * dt);
    let values: Vec<Complex64> = (0..grid.len())
        .map(|flat| {
            let idx = grid.unflat(flat);
            let x = grid.point(&idx);
            Complex64::from_polar(1.0, TAU * (t1 * x[0] - t2 * x[1]))
        })
        .collect();
    let samples = BoundarySamples::new(grid.clone(), values, false).unwrap();

    let comps = hardy_split(&samples).unwrap();
    for c in &comps {
        let expected = if c.sigma().signs() == [1, -1] { samples.norm() } else { 0.0 };
        assert!(
            (c.norm() - expected).abs() <= 1e-10,
            "octant {}: norm {} vs {expected}",
            c.sigma().label(),
            c.norm()
        );
        if c.sigma().signs() == [1, -1] {
            let z = [Complex64::new(0.2, 0.5), Complex64::new(-0.4, -0.8)];
            let want = (Complex64::new(0.0, TAU) * (t1 * z[0] - t2 * z[1])).exp();
            let got = c.eval_f(&z).unwrap();
            assert!((got - want).norm() <= 1e-11, "{got} vs {want}");
        }
    }
    let back = reconstruct(&comps).unwrap();
    assert!(diff_l2(&grid, &back.values, &samples.values) <= 1e-12 * samples.norm());
}

/// Trapezoid-weighted kernel density on the dual lattice: the half-open
/// integral representation of the kernel, with the zero bin at half weight.
fn kernel_density(n: usize, dt: f64, z0: Complex64) -> SpectralRep {
    let tgrid = Grid::centered(&[n], &[n as f64 / 2.0 * dt]).unwrap();
    let mut density = vec![Complex64::default(); n];
    for (j, d) in density.iter_mut().enumerate() {
        let t = tgrid.coord(0, j);
        if t > 0.0 && j != 0 {
            *d = (Complex64::new(0.0, -TAU) * z0.conj() * t).exp();
        }
    }
    density[n / 2] = Complex64::new(0.5, 0.0);
    SpectralRep::new(OctantSignature::all_plus(1), tgrid, density).unwrap()
}

#[test]
fn kernel_spectrum_converges_to_the_closed_form_kernel() {
    use afd_tube::kernels::szego;
    let z0 = Complex64::new(0.4, 1.0);
    let z = [Complex64::new(-0.2, 1.1)];
    let zp = TubePoint::new(vec![z0]).unwrap();
    let want = szego(&z, &zp).unwrap();

    let coarse = kernel_density(4096, 8.0 / 2048.0, z0);
    let fine = kernel_density(8192, 8.0 / 4096.0, z0);
    let e_coarse = (coarse.eval_f(&z).unwrap() - want).norm() / want.norm();
    let e_fine = (fine.eval_f(&z).unwrap() - want).norm() / want.norm();
    assert!(e_coarse <= 2e-4, "coarse grid error {e_coarse}");
    // Trapezoid error scales with the square of the bin width.
    let ratio = e_coarse / e_fine;
    assert!((2.5..6.0).contains(&ratio), "error ratio {ratio} is not quadratic");

    // The same sum realizes <F, phi_(alpha,z)> for F the kernel at z0.
    let e_a = DictElement::new(MultiIndex::zeros(1), zp).unwrap();
    for a in [1u32, 2] {
        let alpha = MultiIndex::new(vec![a]);
        let e_b = DictElement::new(alpha.clone(), TubePoint::new(vec![z[0]]).unwrap()).unwrap();
        let want_ip = ip_phi_phi(&e_a, &e_b).unwrap();
        let got = fine.eval_df(&alpha, &z).unwrap();
        assert!(
            (got - want_ip).norm() <= 1e-3 * want_ip.norm(),
            "order {a}: {got} vs {want_ip}"
        );
    }
}

#[test]
fn derivatives_match_central_differences() {
    let grid = Grid::centered(&[128], &[32.0]).unwrap();
    // Smooth density inside t in (0, 2): safely below the step-size limit
    // of the difference quotient.
    let (samples, _) = mode_signal(
        &grid,
        &[
            (9, Complex64::new(0.8, -0.2)),
            (31, Complex64::new(-0.1, 0.6)),
            (58, Complex64::new(0.35, 0.15)),
        ],
    );
    let rep = hardy_project(&samples, &OctantSignature::all_plus(1)).unwrap();
    let z = Complex64::new(0.25, 0.7);
    let h = 1e-4;
    let f = |w: Complex64| rep.eval_f(&[w]).unwrap();

    let d1 = rep.eval_df(&MultiIndex::new(vec![1]), &[z]).unwrap();
    let fd1 = (f(z + h) - f(z - h)) / (2.0 * h);
    assert!((d1 - fd1).norm() <= 1e-5, "first derivative: {d1} vs {fd1}");

    let d2 = rep.eval_df(&MultiIndex::new(vec![2]), &[z]).unwrap();
    let fd2 = (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
    assert!((d2 - fd2).norm() <= 1e-4, "second derivative: {d2} vs {fd2}");
}

#[test]
fn evaluation_approaches_the_boundary_samples_near_the_edge() {
    // 1/(x+i)^2 is analytic across the upper tube and decays fast enough
    // for the grid to carry almost all of it.
    let grid = Grid::centered(&[512], &[32.0]).unwrap();
    let values: Vec<Complex64> = (0..512)
        .map(|k| {
            let d = Complex64::new(grid.coord(0, k), 1.0);
            1.0 / (d * d)
        })
        .collect();
    let samples = BoundarySamples::new(grid.clone(), values, false).unwrap();
    let rep = hardy_project(&samples, &OctantSignature::all_plus(1)).unwrap();

    let floor = diff_l2(&grid, &rep.boundary_values().unwrap().values, &samples.values)
        / l2(&grid, &samples.values);
    let dx = grid.spacings()[0];
    let mut last = f64::INFINITY;
    let mut discrepancies = Vec::new();
    for k in 0..=8 {
        let h = dx * 2.0f64.powi(-k);
        let evals: Vec<Complex64> = (0..512)
            .map(|j| rep.eval_f(&[Complex64::new(grid.coord(0, j), h)]).unwrap())
            .collect();
        let disc = diff_l2(&grid, &evals, &samples.values) / l2(&grid, &samples.values);
        assert!(disc <= last + 1e-15, "discrepancy rose at h = {h}: {disc} > {last}");
        last = disc;
        discrepancies.push(disc);
    }
    println!("floor {floor:.3e}, path {discrepancies:?}");
    assert!(
        *discrepancies.last().unwrap() <= 10.0 * floor,
        "final discrepancy {} vs floor {floor}",
        discrepancies.last().unwrap()
    );
}

#[test]
fn real_input_splits_into_conjugate_components() {
    let grid = Grid::centered(&[256], &[16.0]).unwrap();
    let values: Vec<Complex64> = (0..256)
        .map(|k| {
            let x = grid.coord(0, k);
            Complex64::new(2.0 / (1.0 + x * x), 0.0)
        })
        .collect();
    let samples = BoundarySamples::new(grid.clone(), values, true).unwrap();

    let comps = hardy_split(&samples).unwrap();
    let plus = comps.iter().find(|c| c.sigma().is_all_plus()).unwrap();
    let minus = comps.iter().find(|c| !c.sigma().is_all_plus()).unwrap();

    let pb = plus.boundary_values().unwrap();
    let mb = minus.boundary_values().unwrap();
    for (a, b) in pb.values.iter().zip(&mb.values) {
        assert!((a.conj() - b).norm() <= 1e-12, "{a} vs {b}");
    }

    // Mirrored interior points carry the same symmetry.
    let up = plus.eval_f(&[Complex64::new(0.6, 0.8)]).unwrap();
    let down = minus.eval_f(&[Complex64::new(0.6, -0.8)]).unwrap();
    assert!((up.conj() - down).norm() <= 1e-10, "{up} vs {down}");

    let back = reconstruct(&comps).unwrap();
    let imag = back.values.iter().map(|v| v.im.abs()).fold(0.0f64, f64::max);
    assert!(imag <= 1e-12, "reconstruction picked up an imaginary part: {imag}");
    assert!(diff_l2(&grid, &back.values, &samples.values) <= 1e-10 * samples.norm());
}
