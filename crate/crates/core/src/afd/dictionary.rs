//! Derivative-order escalation for repeated anchor points.
//!
//! When the selector lands within the merge radius of points it already
//! holds, the plain kernel there is (numerically) spent. The dictionary
//! responds by handing out the next unused multi-index in graded
//! lexicographic order, so one point can carry kernels, first derivatives,
//! and so on, up to a configured total-order cap.

use crate::error::{AfdError, Result};
use crate::kernels::{MultiIndex, TubePoint};

fn binom(a: u64, b: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc = 1u64;
    for i in 0..b {
        acc = acc * (a - i) / (i + 1);
    }
    acc
}

/// Number of n-variate multi-indices of total order at most h.
fn count_up_to(h: u32, n: usize) -> u64 {
    binom(h as u64 + n as u64, n as u64)
}

/// The idx-th (1-based) multi-index of total order h, in graded-lex order:
/// higher leading components come first, so for n = 2 the order-h row reads
/// (h,0), (h-1,1), ..., (0,h).
fn grade_member(h: u32, idx: u64, n: usize) -> MultiIndex {
    match n {
        1 => MultiIndex::new(vec![h]),
        2 => {
            let second = (idx - 1) as u32;
            MultiIndex::new(vec![h - second, second])
        }
        _ => unreachable!("dimensions above 2 are rejected at construction"),
    }
}

/// All multi-indices of total order at most `cap`, in graded-lex order.
pub(crate) fn multi_indices_up_to(cap: u32, n: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for h in 0..=cap {
        let size = if n == 1 { 1 } else { h as u64 + 1 };
        for idx in 1..=size {
            out.push(grade_member(h, idx, n));
        }
    }
    out
}

fn order_for_multiplicity(l: u64, n: usize, cap: u32, z: &TubePoint) -> Result<MultiIndex> {
    let mut h = 0u32;
    while count_up_to(h, n) < l {
        h += 1;
        if h > cap {
            return Err(AfdError::DictionaryExhausted {
                point: format!("{:?}", z.coords()),
                needed: h,
                cap,
            });
        }
    }
    let prev = if h == 0 { 0 } else { count_up_to(h - 1, n) };
    Ok(grade_member(h, l - prev, n))
}

/// Multi-index to use for a fresh selection at `z`, given the anchor points
/// already selected. Each prior point within `merge_radius` of `z` bumps the
/// multiplicity by one; the l-th visit to a point receives the l-th
/// multi-index in graded-lex order.
pub fn escalate_order(
    history: &[TubePoint],
    z: &TubePoint,
    merge_radius: f64,
    alpha_cap: u32,
) -> Result<MultiIndex> {
    escalate_order_extra(history, z, merge_radius, alpha_cap, 0)
}

/// Same as [`escalate_order`], with `extra` additional phantom visits. The
/// run loop uses this to retry after a numerically degenerate add.
pub(crate) fn escalate_order_extra(
    history: &[TubePoint],
    z: &TubePoint,
    merge_radius: f64,
    alpha_cap: u32,
    extra: usize,
) -> Result<MultiIndex> {
    let n = z.dim();
    let mut l = 1 + extra as u64;
    for h in history {
        if h.dim() != n {
            return Err(AfdError::DimensionMismatch { expected: n, got: h.dim() });
        }
        let d2: f64 = h
            .coords()
            .iter()
            .zip(z.coords())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        if d2.sqrt() <= merge_radius {
            l += 1;
        }
    }
    order_for_multiplicity(l, n, alpha_cap, z)
}
