//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::num::{lit, Real};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub value: T,
    pub abs_error: T,
    pub evaluations: usize,
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    err: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

fn kronrod<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = lit::<T>(0.5);
    let c = half * (a + b);
    let h = half * (b - a);
    let fc = f(c);
    let mut rk = fc * lit(WGK[7]);
    let mut rg = fc * lit(WG[3]);
    for j in 0..7 {
        let x = h * lit(XGK[j]);
        let s = f(c - x) + f(c + x);
        rk += s * lit(WGK[j]);
        if j % 2 == 1 {
            rg += s * lit(WG[j / 2]);
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Integrates `f` over `[a, b]` until the estimated error is below `rel_tol * |I|`
/// (or `abs_floor`, whichever is larger).
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    rel_tol: T,
    abs_floor: T,
) -> Result<Quadrature<T>> {
    if !(rel_tol > T::zero()) {
        return Err(Error::Argument("quadrature tolerance must be positive".into()));
    }
    if a == b {
        return Ok(Quadrature { value: T::zero(), abs_error: T::zero(), evaluations: 0 });
    }
    const MAX_PANELS: usize = 2000;
    let (v, e) = kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, err: e });
    let mut total = v;
    let mut err = e;
    let mut evals = 15;
    let roundoff = lit::<T>(50.0) * T::EPS;
    while err > (rel_tol * total.abs()).max(abs_floor) {
        if heap.len() >= MAX_PANELS {
            return Err(Error::Numeric(format!(
                "quadrature did not converge: error {err:e} on {total:e}"
            )));
        }
        let p = heap.pop().expect("nonempty heap");
        let mid = lit::<T>(0.5) * (p.a + p.b);
        let (v1, e1) = kronrod(&f, p.a, mid);
        let (v2, e2) = kronrod(&f, mid, p.b);
        evals += 30;
        total = total - p.value + v1 + v2;
        err = err - p.err + e1 + e2;
        heap.push(Panel { a: p.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: p.b, value: v2, err: e2 });
        // Panel errors at rounding level cannot shrink further.
        if err <= roundoff * total.abs() {
            break;
        }
    }
    // Resum to shed accumulated cancellation in the running totals.
    let mut sum = T::zero();
    let mut esum = T::zero();
    let mut panels: Vec<_> = heap.into_vec();
    panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    for p in &panels {
        sum += p.value;
        esum += p.err;
    }
    Ok(Quadrature { value: sum, abs_error: esum, evaluations: evals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x: f64| x.powi(5) - 3.0 * x, 0.0, 2.0, 1e-14, 0.0).unwrap();
        assert!((q.value - (64.0 / 6.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn peaked_integrand_refines() {
        let q = integrate(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 0.0).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!(((q.value - exact) / exact).abs() < 1e-11);
        assert!(q.evaluations > 15);
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(integrate(|x: f64| x, 0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn single_precision() {
        let q = integrate(|x: f32| x.sin(), 0.0, std::f32::consts::PI, 1e-5, 0.0).unwrap();
        assert!((q.value - 2.0).abs() < 1e-5);
    }
}
