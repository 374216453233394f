//! Integer-order Bessel functions of the first kind.
//!
//! Miller's downward recurrence normalized with `J_0 + 2 sum J_2k = 1`.

use crate::num::{lit, Real};

/// `J_0(x) .. J_nmax(x)` in one pass.
pub fn bessel_j_all<T: Real>(nmax: usize, x: T) -> Vec<T> {
    let mut out = vec![T::zero(); nmax + 1];
    if x == T::zero() {
        out[0] = T::one();
        return out;
    }
    let ax = x.abs();
    let axf = ax.to_f64().unwrap_or(0.0);
    let top = nmax.max(axf.ceil() as usize);
    // Start well above both the order and the argument.
    let mut start = top + 30 + (40.0 * top as f64).sqrt() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let big = T::max_value().sqrt();
    let tiny = T::one() / big;
    let two_over_x = lit::<T>(2.0) / ax;
    let mut jp1 = T::zero();
    let mut j = tiny;
    let mut norm = T::zero();
    for k in (1..=start).rev() {
        // j holds J_k; produce J_{k-1}.
        let jm1 = lit::<T>(k as f64) * two_over_x * j - jp1;
        jp1 = j;
        j = jm1;
        let order = k - 1;
        if order <= nmax {
            out[order] = j;
        }
        if order % 2 == 0 && order > 0 {
            norm += j;
        }
        if j.abs() > big {
            j = j * tiny;
            jp1 = jp1 * tiny;
            norm = norm * tiny;
            for v in out.iter_mut() {
                *v = *v * tiny;
            }
        }
    }
    norm = lit::<T>(2.0) * norm + j;
    for v in out.iter_mut() {
        *v = *v / norm;
    }
    if x < T::zero() {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// `J_n(x)` for `n >= 0`.
pub fn bessel_j<T: Real>(order: usize, x: T) -> T {
    bessel_j_all(order, x)[order]
}

/// `J_n(x)` for any integer order, via `J_{-n} = (-1)^n J_n`.
pub fn bessel_j_int<T: Real>(order: i64, x: T) -> T {
    let v = bessel_j(order.unsigned_abs() as usize, x);
    if order < 0 && order % 2 != 0 { -v } else { v }
}

/// `J_k(x)` for `k = -kmax .. kmax`, indexed by `k + kmax`.
pub fn bessel_j_symmetric<T: Real>(kmax: usize, x: T) -> Vec<T> {
    let pos = bessel_j_all(kmax, x);
    let mut out = Vec::with_capacity(2 * kmax + 1);
    for k in (1..=kmax).rev() {
        out.push(if k % 2 == 1 { -pos[k] } else { pos[k] });
    }
    out.extend_from_slice(&pos);
    out
}
