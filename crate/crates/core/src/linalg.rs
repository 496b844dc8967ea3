//! Minimal dense complex linear algebra: Hermitian Cholesky factorization
//! (plain and diagonally pivoted) and the solves built on it. Sized for the
//! small Gram systems this crate produces, not for general use.

use num_complex::Complex64;

use crate::error::{AfdError, Result};

/// Square complex matrix, row-major.
#[derive(Debug, Clone)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex64::default(); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }
}

/// Lower-triangular L with L L^H = A, for Hermitian positive definite A.
pub fn cholesky(a: &CMatrix) -> Result<CMatrix> {
    let n = a.n();
    let mut l = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k).conj();
            }
            if i == j {
                if !(s.re > 0.0) || s.re.is_nan() {
                    return Err(AfdError::IllConditioned {
                        cond: f64::INFINITY,
                        points: format!("leading minor of order {} is not positive", i + 1),
                    });
                }
                l.set(i, i, Complex64::new(s.re.sqrt(), 0.0));
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix with nonzero diagonal.
pub fn lower_triangular_inverse(l: &CMatrix) -> Result<CMatrix> {
    let n = l.n();
    let mut inv = CMatrix::zeros(n);
    for j in 0..n {
        if l.get(j, j).norm() == 0.0 {
            return Err(AfdError::IllConditioned {
                cond: f64::INFINITY,
                points: format!("zero diagonal at {j}"),
            });
        }
        inv.set(j, j, l.get(j, j).inv());
        for i in j + 1..n {
            let mut s = Complex64::default();
            for k in j..i {
                s += l.get(i, k) * inv.get(k, j);
            }
            inv.set(i, j, -s / l.get(i, i));
        }
    }
    Ok(inv)
}

/// Solves A x = b for Hermitian positive definite A via Cholesky.
pub fn solve_hermitian(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.n();
    if b.len() != n {
        return Err(AfdError::DimensionMismatch { expected: n, got: b.len() });
    }
    let l = cholesky(a)?;
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let t = l.get(i, k) * y[k];
            y[i] -= t;
        }
        y[i] /= l.get(i, i);
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let t = l.get(k, i).conj() * y[k];
            y[i] -= t;
        }
        y[i] /= l.get(i, i);
    }
    Ok(y)
}

/// Diagonal pivots of the pivoted Cholesky factorization, largest first.
/// The matrix is positive definite exactly when all pivots stay positive;
/// the last pivot over the first estimates the conditioning headroom.
pub fn pivoted_cholesky_pivots(a: &CMatrix) -> Vec<f64> {
    let n = a.n();
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let mut best = k;
        for j in k + 1..n {
            if w.get(perm[j], perm[j]).re > w.get(perm[best], perm[best]).re {
                best = j;
            }
        }
        perm.swap(k, best);
        let d = w.get(perm[k], perm[k]).re;
        pivots.push(d);
        if !(d > 0.0) {
            for _ in k + 1..n {
                pivots.push(d.min(0.0));
            }
            break;
        }
        for i in k + 1..n {
            for j in k + 1..=i {
                let (pi, pj, pk) = (perm[i], perm[j], perm[k]);
                let update = w.get(pi, pk) * w.get(pj, pk).conj() / d;
                let v = w.get(pi, pj) - update;
                w.set(pi, pj, v);
                w.set(pj, pi, v.conj());
            }
        }
    }
    pivots
}

/// Positive definiteness test via pivoted Cholesky with a relative floor.
pub fn is_positive_definite(a: &CMatrix, rel_floor: f64) -> bool {
    let pivots = pivoted_cholesky_pivots(a);
    match pivots.first() {
        None => true,
        Some(&p0) if p0 > 0.0 => pivots.iter().all(|&p| p > rel_floor * p0),
        _ => false,
    }
}
