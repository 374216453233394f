//! Complete elliptic integrals by the arithmetic-geometric mean.
//!
//! Parameter convention: `m = k^2`. Negative `m` is accepted directly, since
//! `sqrt(1 - m)` is then simply larger than one.

use crate::error::{Error, Result};
use crate::num::{lit, Real};

struct Agm<T> {
    a: T,
    /// `sum_n 2^(n-1) c_n^2`, with `c_0^2 = m`.
    csum: T,
}

fn agm<T: Real>(m: T) -> Agm<T> {
    let mut a = T::one();
    let mut b = (T::one() - m).sqrt();
    let mut csum = lit::<T>(0.5) * m;
    let mut pow = lit::<T>(0.5);
    for _ in 0..64 {
        let c = lit::<T>(0.5) * (a - b);
        pow = pow + pow;
        csum += pow * c * c;
        let an = lit::<T>(0.5) * (a + b);
        b = (a * b).sqrt();
        a = an;
        if c.abs() <= T::EPS * a {
            break;
        }
    }
    Agm { a, csum }
}

/// K(m) for `m < 1`.
pub fn elliptic_k<T: Real>(m: T) -> Result<T> {
    if !(m < T::one()) {
        return Err(Error::Domain(format!("elliptic K requires m < 1, got {m}")));
    }
    Ok(T::FRAC_PI_2() / agm(m).a)
}

/// E(m) for `m <= 1`.
pub fn elliptic_e<T: Real>(m: T) -> Result<T> {
    if m == T::one() {
        return Ok(T::one());
    }
    if !(m < T::one()) {
        return Err(Error::Domain(format!("elliptic E requires m <= 1, got {m}")));
    }
    let g = agm(m);
    Ok(T::FRAC_PI_2() / g.a * (T::one() - g.csum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_parameter() {
        assert!((elliptic_k(0.0f64).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((elliptic_e(0.0f64).unwrap() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn e_at_one() {
        assert_eq!(elliptic_e(1.0f64).unwrap(), 1.0);
    }

    #[test]
    fn domain_errors() {
        assert!(elliptic_k(1.0f64).is_err());
        assert!(elliptic_k(f64::NAN).is_err());
        assert!(elliptic_e(1.5f64).is_err());
    }

    #[test]
    fn legendre_relation() {
        // E K' + E' K - K K' = pi / 2 with primes at 1 - m.
        for &m in &[0.1f64, 0.3, 0.5, 0.8] {
            let (k, e) = (elliptic_k(m).unwrap(), elliptic_e(m).unwrap());
            let (kp, ep) = (elliptic_k(1.0 - m).unwrap(), elliptic_e(1.0 - m).unwrap());
            assert!((e * kp + ep * k - k * kp - FRAC_PI_2).abs() < 1e-13);
        }
    }

    #[test]
    fn near_one_logarithmic() {
        // K(m) ~ ln(4 / sqrt(1 - m)) as m -> 1.
        let m = 1.0 - 1e-12f64;
        let k = elliptic_k(m).unwrap();
        assert!((k - (4.0 / (1.0 - m).sqrt()).ln()).abs() < 1e-9);
    }
}
