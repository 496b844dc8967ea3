//! Closed-form integrals and transform identities that the adaptive
//! quadrature and the DFT pair must reproduce before anything built on top
//! of them can be trusted.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use afd_tube::numerics::fft::{dft_forward, dft_inverse};
use afd_tube::numerics::grid::Grid;
use afd_tube::numerics::quadrature::{integrate_nd, Domain, QuadratureSpec};

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

#[test]
fn lorentzian_integrates_to_pi() {
    let v = integrate_nd(
        &|x: &[f64]| Complex64::new(1.0 / (x[0] * x[0] + 1.0), 0.0),
        &Domain::Line,
        &spec(),
    )
    .unwrap();
    assert!((v.re - PI).abs() < 1e-9 * PI, "{} vs {PI}", v.re);
    assert!(v.im.abs() < 1e-12);
}

#[test]
fn squared_lorentzian_integrates_to_half_pi() {
    let v = integrate_nd(
        &|x: &[f64]| {
            let d = x[0] * x[0] + 1.0;
            Complex64::new(1.0 / (d * d), 0.0)
        },
        &Domain::Line,
        &spec(),
    )
    .unwrap();
    assert!((v.re - PI / 2.0).abs() < 1e-9 * PI, "{} vs {}", v.re, PI / 2.0);
}

#[test]
fn exponential_tail_on_the_half_line() {
    let v = integrate_nd(
        &|t: &[f64]| Complex64::new((-4.0 * PI * t[0]).exp(), 0.0),
        &Domain::HalfLine,
        &spec(),
    )
    .unwrap();
    let want = 1.0 / (4.0 * PI);
    assert!((v.re - want).abs() < 1e-9 * want, "{} vs {want}", v.re);
}

#[test]
fn octant_product_integrand_factors() {
    let v = integrate_nd(
        &|t: &[f64]| Complex64::new((-4.0 * PI * (t[0] + t[1])).exp(), 0.0),
        &Domain::Quadrant,
        &spec(),
    )
    .unwrap();
    let want = 1.0 / (16.0 * PI * PI);
    assert!((v.re - want).abs() < 1e-8 * want, "{} vs {want}", v.re);
}

#[test]
fn oscillatory_integrand_with_odd_symmetry_cancels() {
    let v = integrate_nd(
        &|x: &[f64]| {
            let g = (-x[0] * x[0]).exp();
            Complex64::new(g, g * x[0])
        },
        &Domain::Line,
        &spec(),
    )
    .unwrap();
    assert!((v.re - PI.sqrt()).abs() < 1e-9);
    assert!(v.im.abs() < 1e-9);
}

#[test]
fn hopeless_tolerance_is_reported_with_an_estimate() {
    let tight = QuadratureSpec { rel_tol: 1e-300, abs_tol: 1e-300, ..spec() };
    let err = integrate_nd(
        &|x: &[f64]| Complex64::new(1.0 / (x[0] * x[0] + 1.0), 0.0),
        &Domain::Line,
        &tight,
    )
    .unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("tolerance not reached"), "unexpected error: {msg}");
}

#[test]
fn constant_signal_concentrates_all_mass_at_zero_frequency() {
    let grid = Grid::centered(&[64], &[8.0]).unwrap();
    let samples = vec![Complex64::new(1.0, 0.0); 64];
    let (tgrid, spec) = dft_forward(&grid, &samples).unwrap();
    let zero_bin = tgrid.counts()[0] / 2;
    let extent = 2.0 * grid.half_width(0);
    assert!((spec[zero_bin].re - extent).abs() < 1e-9);
    for (k, v) in spec.iter().enumerate() {
        if k != zero_bin {
            assert!(v.norm() < 1e-9, "leak at bin {k}: {v}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dft_roundtrip_is_the_identity_1d(
        log_n in 3usize..8,
        extent in 0.5f64..50.0,
        seed in any::<u64>(),
    ) {
        let n = 1usize << log_n;
        let grid = Grid::centered(&[n], &[extent]).unwrap();
        let mut state = seed | 1;
        let mut next = move || {
            // xorshift; fine for stuffing a test vector.
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        let samples: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(next(), next())).collect();
        let (tgrid, spec) = dft_forward(&grid, &samples).unwrap();
        let (back_grid, back) = dft_inverse(&tgrid, &spec).unwrap();
        prop_assert_eq!(back_grid.counts(), grid.counts());
        let num: f64 = back
            .iter()
            .zip(&samples)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = samples.iter().map(|v| v.norm_sqr()).sum();
        prop_assert!(num.sqrt() <= 1e-12 * den.sqrt().max(1e-300));
    }

    #[test]
    fn dual_grid_is_involutive(log_n in 3usize..10, extent in 0.25f64..100.0) {
        let n = 1usize << log_n;
        let grid = Grid::centered(&[n], &[extent]).unwrap();
        let dd = grid.dual().dual();
        prop_assert_eq!(dd.counts(), grid.counts());
        prop_assert!((dd.spacings()[0] - grid.spacings()[0]).abs() <= 1e-15 * grid.spacings()[0]);
        prop_assert!((dd.origins()[0] - grid.origins()[0]).abs() <= 1e-12 * extent);
    }
}

#[test]
fn gaussian_spectrum_matches_quadrature_oracle() {
    // The transform of exp(-pi x^2) is exp(-pi t^2); the same value must
    // come out of the adaptive oracle applied to the defining integral.
    let grid = Grid::centered(&[256], &[16.0]).unwrap();
    let samples: Vec<Complex64> = (0..256)
        .map(|k| {
            let x = grid.coord(0, k);
            Complex64::new((-PI * x * x).exp(), 0.0)
        })
        .collect();
    let (tgrid, spectrum) = dft_forward(&grid, &samples).unwrap();
    for probe in [0usize, 3, 17] {
        let bin = tgrid.counts()[0] / 2 + probe;
        let t = tgrid.coord(0, bin);
        let direct = integrate_nd(
            &|x: &[f64]| {
                let phase = -2.0 * PI * x[0] * t;
                Complex64::new((-PI * x[0] * x[0]).exp(), 0.0)
                    * Complex64::new(phase.cos(), phase.sin())
            },
            &Domain::Line,
            &spec(),
        )
        .unwrap();
        assert!(
            (spectrum[bin] - direct).norm() < 1e-9,
            "bin {bin}: {} vs {direct}",
            spectrum[bin]
        );
    }
}
