//! Cauchy kernel products on the tube over the first octant, the derivative
//! dictionary built from them, and closed-form norms and inner products.
//!
//! Everything here is a pure function of value types. Per-axis factors are
//! accumulated in log-polar form once factorial orders exceed 20, so high
//! derivative orders neither overflow nor lose their phase.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{AfdError, Result};

/// The per-axis kernel constant -1/(2 pi i) = i/(2 pi).
pub const AXIS_CONST: Complex64 = Complex64::new(0.0, 1.0 / std::f64::consts::TAU);

const LN_2PI: f64 = 1.837877066409345483560659472811;

/// Point z = x + iy with every y_j strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct TubePoint {
    z: Vec<Complex64>,
}

impl TubePoint {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        if z.is_empty() {
            return Err(AfdError::InvalidParameter("point needs at least one coordinate".into()));
        }
        for c in &z {
            if !c.is_finite() || !(c.im > 0.0) {
                return Err(AfdError::OutsideCone(format!(
                    "imaginary part {} is not strictly positive",
                    c.im
                )));
            }
        }
        Ok(TubePoint { z })
    }

    pub fn from_xy(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(AfdError::DimensionMismatch { expected: x.len(), got: y.len() });
        }
        TubePoint::new(x.iter().zip(y).map(|(&a, &b)| Complex64::new(a, b)).collect())
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.z
    }

    pub fn x(&self) -> Vec<f64> {
        self.z.iter().map(|c| c.re).collect()
    }

    pub fn y(&self) -> Vec<f64> {
        self.z.iter().map(|c| c.im).collect()
    }
}

/// Derivative multi-index; `order` is the sum of the entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(alpha: Vec<u32>) -> Self {
        MultiIndex(alpha)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// A dictionary element: the order-alpha derivative of the kernel anchored
/// at an interior point z.
#[derive(Debug, Clone, PartialEq)]
pub struct DictElement {
    alpha: MultiIndex,
    z: TubePoint,
}

impl DictElement {
    pub fn new(alpha: MultiIndex, z: TubePoint) -> Result<Self> {
        if alpha.dim() != z.dim() {
            return Err(AfdError::DimensionMismatch { expected: z.dim(), got: alpha.dim() });
        }
        Ok(DictElement { alpha, z })
    }

    pub fn kernel_at(z: TubePoint) -> Self {
        let n = z.dim();
        DictElement { alpha: MultiIndex::zeros(n), z }
    }

    pub fn dim(&self) -> usize {
        self.z.dim()
    }

    pub fn alpha(&self) -> &MultiIndex {
        &self.alpha
    }

    pub fn point(&self) -> &TubePoint {
        &self.z
    }
}

/// Factorial as a float, exact products up to 20!, log-gamma above.
pub(crate) fn factorial(k: u32) -> f64 {
    if k <= 20 {
        let mut acc = 1.0f64;
        for i in 2..=k as u64 {
            acc *= i as f64;
        }
        acc
    } else {
        ln_factorial(k).exp()
    }
}

pub(crate) fn ln_factorial(k: u32) -> f64 {
    if k <= 20 {
        factorial(k).ln()
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

fn check_eval_point(w: &[Complex64], z: &TubePoint) -> Result<()> {
    if w.len() != z.dim() {
        return Err(AfdError::DimensionMismatch { expected: z.dim(), got: w.len() });
    }
    for c in w {
        if !c.is_finite() || c.im < 0.0 {
            return Err(AfdError::OutsideCone(format!(
                "evaluation point has imaginary part {}, below the closed tube",
                c.im
            )));
        }
    }
    Ok(())
}

/// Kernel K(w, conj(z)) = prod_k -1/(2 pi i (w_k - conj(z_k))).
///
/// `w` may sit on the real boundary; `z` must be interior.
pub fn szego(w: &[Complex64], z: &TubePoint) -> Result<Complex64> {
    check_eval_point(w, z)?;
    let mut k = Complex64::new(1.0, 0.0);
    for (wj, zj) in w.iter().zip(z.coords()) {
        k *= AXIS_CONST / (wj - zj.conj());
    }
    Ok(k)
}

/// Diagonal value K(z, conj(z)) = prod_j 1/(4 pi y_j).
pub fn szego_diag(z: &TubePoint) -> f64 {
    z.y().iter().map(|yj| 1.0 / (4.0 * std::f64::consts::PI * yj)).product()
}

/// Product Poisson kernel prod_k y_k / (pi (x_k^2 + y_k^2)); integrates to 1.
pub fn poisson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(AfdError::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let mut p = 1.0;
    for (&xk, &yk) in x.iter().zip(y) {
        if !(yk > 0.0) {
            return Err(AfdError::OutsideCone(format!("height {yk} is not positive")));
        }
        p *= yk / (std::f64::consts::PI * (xk * xk + yk * yk));
    }
    Ok(p)
}

pub(crate) fn axis_power_term(d: Complex64, order: u32, numer: u32) -> Complex64 {
    if numer <= 20 && order <= 24 {
        factorial(numer) * d.powu(order).inv()
    } else {
        let lm = ln_factorial(numer) - order as f64 * d.norm().ln();
        Complex64::from_polar(lm.exp(), -(order as f64) * d.arg())
    }
}

/// Evaluates phi_{alpha,z}(w) = (-1/2 pi i)^n prod_j alpha_j!/(w_j - conj(z_j))^{alpha_j+1}.
///
/// With alpha = 0 this is exactly [`szego`].
pub fn phi_eval(e: &DictElement, w: &[Complex64]) -> Result<Complex64> {
    check_eval_point(w, e.point())?;
    let mut v = Complex64::new(1.0, 0.0);
    for ((wj, zj), &aj) in w.iter().zip(e.point().coords()).zip(e.alpha().entries()) {
        let d = wj - zj.conj();
        v *= AXIS_CONST * axis_power_term(d, aj + 1, aj);
    }
    Ok(v)
}

/// L^p integral (not its p-th root) over the distinguished boundary of the
/// unnormalized product prod_j |xi_j - conj(z_j)|^{-(alpha_j+1)}:
///
/// pi^{n/2} prod_j Gamma((p(alpha_j+1)-1)/2) / Gamma(p(alpha_j+1)/2) * y_j^{1-p(alpha_j+1)}.
pub fn phi_lp_norm(alpha: &MultiIndex, y: &[f64], p: f64) -> Result<f64> {
    if alpha.dim() != y.len() {
        return Err(AfdError::DimensionMismatch { expected: alpha.dim(), got: y.len() });
    }
    if !p.is_finite() || p <= 1.0 {
        return Err(AfdError::InvalidParameter(format!("exponent p = {p} must lie in (1, inf)")));
    }
    let mut ln_val = 0.5 * (y.len() as f64) * std::f64::consts::PI.ln();
    for (&aj, &yj) in alpha.entries().iter().zip(y) {
        if !(yj > 0.0) {
            return Err(AfdError::OutsideCone(format!("height {yj} is not positive")));
        }
        let q = p * (aj as f64 + 1.0);
        if q <= 1.0 {
            return Err(AfdError::InvalidParameter(format!(
                "p (alpha_j + 1) = {q} must exceed 1 for integrability"
            )));
        }
        ln_val += ln_gamma((q - 1.0) / 2.0) - ln_gamma(q / 2.0) + (1.0 - q) * yj.ln();
    }
    Ok(ln_val.exp())
}

/// Squared norm of phi_{alpha,z}: prod_j (2 alpha_j)! / (2 pi (2 y_j)^{2 alpha_j + 1}).
pub fn phi_norm_sq(alpha: &MultiIndex, y: &[f64]) -> Result<f64> {
    if alpha.dim() != y.len() {
        return Err(AfdError::DimensionMismatch { expected: alpha.dim(), got: y.len() });
    }
    let mut ln_val = 0.0;
    for (&aj, &yj) in alpha.entries().iter().zip(y) {
        if !(yj > 0.0) {
            return Err(AfdError::OutsideCone(format!("height {yj} is not positive")));
        }
        ln_val += ln_factorial(2 * aj) - LN_2PI - (2.0 * aj as f64 + 1.0) * (2.0 * yj).ln();
    }
    Ok(ln_val.exp())
}

/// Norm of phi_{alpha,z}; square root of [`phi_norm_sq`].
pub fn phi_norm(alpha: &MultiIndex, y: &[f64]) -> Result<f64> {
    phi_norm_sq(alpha, y).map(f64::sqrt)
}

/// Closed-form inner product of two dictionary elements,
/// < phi_{e1}, phi_{e2} > with the second slot conjugated.
///
/// Per axis, with a from `e1`, (b, w) from `e2`, and z the anchor of `e1`:
/// (-1/2 pi i) (-1)^b (a+b)! / (w - conj(z))^{a+b+1}.
pub fn ip_phi_phi(e1: &DictElement, e2: &DictElement) -> Result<Complex64> {
    if e1.dim() != e2.dim() {
        return Err(AfdError::DimensionMismatch { expected: e1.dim(), got: e2.dim() });
    }
    let mut v = Complex64::new(1.0, 0.0);
    for j in 0..e1.dim() {
        let a = e1.alpha().entries()[j];
        let b = e2.alpha().entries()[j];
        let d = e2.point().coords()[j] - e1.point().coords()[j].conj();
        let sign = if b % 2 == 0 { 1.0 } else { -1.0 };
        v *= AXIS_CONST * sign * axis_power_term(d, a + b + 1, a + b);
    }
    Ok(v)
}

/// Normalized correlation |< K(., conj(w)), phi_e >| / ||phi_e||:
///
/// (2 pi)^{-n/2} prod_j (2 y_j)^{alpha_j + 1/2} alpha_j!
///   / ( |z_j - conj(w_j)|^{alpha_j+1} sqrt((2 alpha_j)!) )
///
/// with z, y taken from the element and w the kernel anchor. Tends to 0 as
/// the element's anchor approaches the boundary or infinity, or as the
/// derivative order grows.
pub fn ip_kernel_phi_normalized(w: &TubePoint, e: &DictElement) -> Result<f64> {
    if w.dim() != e.dim() {
        return Err(AfdError::DimensionMismatch { expected: e.dim(), got: w.dim() });
    }
    let mut ln_val = 0.0;
    for j in 0..e.dim() {
        let a = e.alpha().entries()[j] as f64;
        let yj = e.point().coords()[j].im;
        let dist = (e.point().coords()[j] - w.coords()[j].conj()).norm();
        ln_val += -0.5 * LN_2PI + (a + 0.5) * (2.0 * yj).ln() + ln_factorial(a as u32)
            - (a + 1.0) * dist.ln()
            - 0.5 * ln_factorial(2 * a as u32);
    }
    Ok(ln_val.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn pt(coords: &[(f64, f64)]) -> TubePoint {
        TubePoint::new(coords.iter().map(|&(x, y)| Complex64::new(x, y)).collect()).unwrap()
    }

    fn elem(alpha: &[u32], coords: &[(f64, f64)]) -> DictElement {
        DictElement::new(MultiIndex::new(alpha.to_vec()), pt(coords)).unwrap()
    }

    #[test]
    fn kernel_diagonal_values() {
        let z = pt(&[(0.0, 1.0)]);
        let k = szego(z.coords(), &z).unwrap();
        assert_relative_eq!(k.re, 1.0 / (4.0 * PI), max_relative = 1e-14);
        assert_abs_diff_eq!(k.im, 0.0, epsilon = 1e-18);

        let z2 = pt(&[(0.0, 1.0), (0.0, 1.0)]);
        let k2 = szego(z2.coords(), &z2).unwrap();
        assert_relative_eq!(k2.re, 1.0 / (16.0 * PI * PI), max_relative = 1e-14);
        assert_relative_eq!(szego_diag(&z2), 1.0 / (16.0 * PI * PI), max_relative = 1e-14);
    }

    #[test]
    fn kernel_rejects_bad_points() {
        assert!(TubePoint::new(vec![Complex64::new(0.0, -1.0)]).is_err());
        assert!(TubePoint::new(vec![Complex64::new(0.0, 0.0)]).is_err());
        let z = pt(&[(0.0, 1.0)]);
        assert!(szego(&[Complex64::new(0.0, -0.1)], &z).is_err());
        let z2 = pt(&[(0.0, 1.0), (0.0, 1.0)]);
        assert!(szego(z.coords(), &z2).is_err());
    }

    #[test]
    fn poisson_values() {
        assert_relative_eq!(poisson(&[0.0], &[1.0]).unwrap(), 1.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(
            poisson(&[0.0, 0.0], &[1.0, 2.0]).unwrap(),
            1.0 / (2.0 * PI * PI),
            max_relative = 1e-14
        );
        assert!(poisson(&[0.0], &[0.0]).is_err());
    }

    #[test]
    fn phi_order_zero_is_the_kernel() {
        let cases = [
            (&[(0.3, 1.7)][..], &[(-0.2, 0.9)][..]),
            (&[(1.0, 0.5), (-2.0, 2.5)][..], &[(0.0, 1.0), (0.7, 0.3)][..]),
        ];
        for (wc, zc) in cases {
            let z = pt(zc);
            let w: Vec<Complex64> = wc.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
            let e = DictElement::kernel_at(z.clone());
            let a = phi_eval(&e, &w).unwrap();
            let b = szego(&w, &z).unwrap();
            assert_relative_eq!(a.re, b.re, max_relative = 1e-14);
            assert_relative_eq!(a.im, b.im, max_relative = 1e-14);
        }
    }

    #[test]
    fn phi_first_derivative_value_and_finite_difference() {
        let e = elem(&[1], &[(0.0, 1.0)]);
        let v = phi_eval(&e, &[Complex64::new(0.0, 1.0)]).unwrap();
        assert_relative_eq!(v.im, -1.0 / (8.0 * PI), max_relative = 1e-14);
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-18);

        // The derivative is taken along the anchor's real part, so the
        // finite difference moves the anchor, not the evaluation point.
        let w = Complex64::new(-0.7, 0.6);
        let h = 1e-4;
        let fp = szego(&[w], &pt(&[(0.4 + h, 1.3)])).unwrap();
        let fm = szego(&[w], &pt(&[(0.4 - h, 1.3)])).unwrap();
        let fd = (fp - fm) / (2.0 * h);
        let ex = phi_eval(&elem(&[1], &[(0.4, 1.3)]), &[w]).unwrap();
        assert!((fd - ex).norm() < 1e-6, "fd {fd} vs closed form {ex}");
    }

    #[test]
    fn lp_integral_closed_forms() {
        let y = [1.0];
        assert_relative_eq!(phi_lp_norm(&MultiIndex::new(vec![0]), &y, 2.0).unwrap(), PI, max_relative = 1e-13);
        assert_relative_eq!(
            phi_lp_norm(&MultiIndex::new(vec![1]), &y, 2.0).unwrap(),
            PI / 2.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            phi_lp_norm(&MultiIndex::new(vec![0]), &[2.0], 2.0).unwrap(),
            PI / 2.0,
            max_relative = 1e-13
        );
        assert!(phi_lp_norm(&MultiIndex::new(vec![0]), &y, 1.0).is_err());
        assert!(phi_lp_norm(&MultiIndex::new(vec![0]), &y, f64::INFINITY).is_err());
    }

    #[test]
    fn norm_squared_closed_forms() {
        assert_relative_eq!(
            phi_norm_sq(&MultiIndex::new(vec![0]), &[1.0]).unwrap(),
            1.0 / (4.0 * PI),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            phi_norm_sq(&MultiIndex::new(vec![1]), &[1.0]).unwrap(),
            1.0 / (8.0 * PI),
            max_relative = 1e-13
        );
        for alpha in [vec![0u32], vec![3], vec![2, 5]] {
            let n = alpha.len();
            let mi = MultiIndex::new(alpha.clone());
            let base = phi_norm_sq(&mi, &vec![1.0; n]).unwrap();
            let doubled = phi_norm_sq(&mi, &vec![2.0; n]).unwrap();
            let expo: f64 = alpha.iter().map(|&a| 2.0 * a as f64 + 1.0).sum();
            assert_relative_eq!(doubled / base, 0.5f64.powf(expo), max_relative = 1e-12);
        }
    }

    #[test]
    fn inner_products_match_closed_forms() {
        let e00 = elem(&[0], &[(0.0, 1.0)]);
        let ip = ip_phi_phi(&e00, &e00).unwrap();
        assert_relative_eq!(ip.re, 1.0 / (4.0 * PI), max_relative = 1e-14);
        assert_abs_diff_eq!(ip.im, 0.0, epsilon = 1e-18);

        let e1 = elem(&[1], &[(0.0, 1.0)]);
        let v = ip_phi_phi(&e1, &e00).unwrap();
        assert_relative_eq!(v.im, -1.0 / (8.0 * PI), max_relative = 1e-14);

        let far = elem(&[0], &[(0.0, 2.0)]);
        let v2 = ip_phi_phi(&e00, &far).unwrap();
        assert_relative_eq!(v2.re, 1.0 / (6.0 * PI), max_relative = 1e-14);
        assert_abs_diff_eq!(v2.im, 0.0, epsilon = 1e-18);
    }

    #[test]
    fn inner_product_is_hermitian_and_diagonal_matches_norm() {
        let elems = [
            elem(&[0], &[(0.0, 1.0)]),
            elem(&[2], &[(1.5, 0.25)]),
            elem(&[5], &[(-3.0, 4.0)]),
        ];
        for a in &elems {
            for b in &elems {
                let ab = ip_phi_phi(a, b).unwrap();
                let ba = ip_phi_phi(b, a).unwrap();
                assert_relative_eq!(ab.re, ba.re, max_relative = 1e-12);
                assert_relative_eq!(ab.im, -ba.im, max_relative = 1e-12, epsilon = 1e-18);
            }
            let diag = ip_phi_phi(a, a).unwrap();
            let nsq = phi_norm_sq(a.alpha(), &a.point().y()).unwrap();
            assert_relative_eq!(diag.re, nsq, max_relative = 1e-12);
            assert_abs_diff_eq!(diag.im / nsq, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn reproducing_identity_for_kernel_combinations() {
        let anchors = [pt(&[(0.0, 1.0)]), pt(&[(2.0, 0.5)]), pt(&[(-1.0, 3.0)])];
        let coeffs = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-0.3, 0.8),
            Complex64::new(0.05, -0.4),
        ];
        let w = pt(&[(0.7, 1.9)]);
        let ew = DictElement::kernel_at(w.clone());
        let mut via_ip = Complex64::default();
        let mut via_eval = Complex64::default();
        for (zj, cj) in anchors.iter().zip(&coeffs) {
            via_ip += cj * ip_phi_phi(&DictElement::kernel_at(zj.clone()), &ew).unwrap();
            via_eval += cj * szego(w.coords(), zj).unwrap();
        }
        assert!((via_ip - via_eval).norm() <= 1e-10 * via_eval.norm());
    }

    #[test]
    fn normalized_correlation_values_and_decay() {
        let w = pt(&[(0.0, 1.0)]);
        let e = elem(&[0], &[(0.0, 1.0)]);
        assert_relative_eq!(
            ip_kernel_phi_normalized(&w, &e).unwrap(),
            1.0 / (2.0 * PI.sqrt()),
            max_relative = 1e-13
        );

        let self_norm = ip_kernel_phi_normalized(&pt(&[(0.3, 0.7)]), &elem(&[0], &[(0.3, 0.7)])).unwrap();
        assert_relative_eq!(self_norm, 1.0 / (4.0 * PI * 0.7).sqrt(), max_relative = 1e-13);

        let mut prev = f64::INFINITY;
        for k in 0..=16 {
            let y = 2.0f64.powi(-k);
            let v = ip_kernel_phi_normalized(&w, &elem(&[0], &[(0.0, y)])).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn normalized_correlation_decays_in_derivative_order() {
        let w = pt(&[(0.0, 1.0)]);
        let mut prev = f64::INFINITY;
        let mut below_threshold_at = None;
        for a in 0..=40u32 {
            let v = ip_kernel_phi_normalized(&w, &elem(&[a], &[(0.0, 1.0)])).unwrap();
            assert!(v < prev, "correlation not strictly decreasing at order {a}");
            if below_threshold_at.is_none() && v < 0.1 {
                below_threshold_at = Some(a);
            }
            prev = v;
        }
        let hit = below_threshold_at.expect("correlation never fell below 0.1");
        assert!(hit <= 40);
    }

    #[test]
    fn large_order_values_stay_finite() {
        let e = elem(&[120], &[(0.0, 20.0)]);
        let v = phi_eval(&e, &[Complex64::new(2.0, 0.0)]).unwrap();
        assert!(v.is_finite());
        let n = phi_norm(e.alpha(), &[20.0]).unwrap();
        assert!(n.is_finite() && n > 0.0);
        let ip = ip_phi_phi(&e, &e).unwrap();
        assert_relative_eq!(ip.re, n * n, max_relative = 1e-10);
    }
}
