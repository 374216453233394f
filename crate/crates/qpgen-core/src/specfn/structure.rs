//! Pair-breaking structure factors of a BCS junction.
//!
//! With `z = hf / Delta`,
//! `S±(z) = ∫_1^{z-1} (x(z-x) ± 1) / (sqrt(x^2-1) sqrt((z-x)^2-1)) dx`, zero for `z <= 2`.
//! The closed form used here was fitted against that integral:
//! `S+ = (z+2) E(m) - 4z/(z+2) K(m)`, `S- = (z+2) E(m) - 4 K(m)`, `m = ((z-2)/(z+2))^2`.

use crate::error::{Error, Result};
use crate::num::{lit, Real};

use super::elliptic::{elliptic_e, elliptic_k};
use super::quad::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureFactorKind {
    /// Pairs with the cos-type matrix element.
    Plus,
    /// Pairs with the sin-type matrix element.
    Minus,
}

impl StructureFactorKind {
    fn sign<T: Real>(self) -> T {
        match self {
            StructureFactorKind::Plus => T::one(),
            StructureFactorKind::Minus => -T::one(),
        }
    }
}

/// Superconducting gap as a frequency, `Delta / h` in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap<T> {
    delta: T,
}

impl<T: Real> Gap<T> {
    pub fn new(delta_ghz: T) -> Result<Self> {
        if !(delta_ghz > T::zero()) || !delta_ghz.is_finite() {
            return Err(Error::Argument(format!("gap must be positive, got {delta_ghz}")));
        }
        Ok(Gap { delta: delta_ghz })
    }

    /// Bulk aluminium, `2 Delta / h = 90 GHz`.
    pub fn aluminium() -> Self {
        Gap { delta: lit(45.0) }
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// Pair-breaking threshold `2 Delta / h` in GHz.
    pub fn threshold(&self) -> T {
        self.delta + self.delta
    }

    pub fn reduced(&self, freq_ghz: T) -> T {
        freq_ghz / self.delta
    }
}

impl<T: Real> Default for Gap<T> {
    fn default() -> Self {
        Self::aluminium()
    }
}

/// Closed-form structure factor at frequency `freq_ghz` (= omega / 2 pi).
pub fn s_ph_analytic<T: Real>(kind: StructureFactorKind, freq_ghz: T, gap: Gap<T>) -> T {
    s_ph_reduced(kind, gap.reduced(freq_ghz))
}

/// Closed-form structure factor at reduced frequency `z = hf / Delta`.
pub fn s_ph_reduced<T: Real>(kind: StructureFactorKind, z: T) -> T {
    let two = lit::<T>(2.0);
    if !(z > two) {
        return T::zero();
    }
    let r = (z - two) / (z + two);
    let m = r * r;
    let e = elliptic_e(m).expect("m in [0, 1)");
    let k = elliptic_k(m).expect("m in [0, 1)");
    let four = lit::<T>(4.0);
    let v = match kind {
        StructureFactorKind::Plus => (z + two) * e - four * z / (z + two) * k,
        StructureFactorKind::Minus => (z + two) * e - four * k,
    };
    v.max(T::zero())
}

/// Structure factor by direct quadrature of the defining integral.
///
/// The integrand is symmetric about `x = z/2`; the half interval `[1, z/2]` is mapped
/// with `x = 1 + u^2`, which removes the inverse square root at `x = 1`.
pub fn s_ph_quadrature<T: Real>(
    kind: StructureFactorKind,
    freq_ghz: T,
    gap: Gap<T>,
    tol: T,
) -> Result<T> {
    if !(tol > T::zero()) {
        return Err(Error::Argument("tolerance must be positive".into()));
    }
    let z = gap.reduced(freq_ghz);
    let two = lit::<T>(2.0);
    if !(z > two) {
        return Ok(T::zero());
    }
    let s = kind.sign::<T>();
    let umax = (z / two - T::one()).sqrt();
    let f = |u: T| {
        let x = T::one() + u * u;
        let y = z - x;
        let num = x * y + s;
        two * num / ((u * u + two).sqrt() * (y * y - T::one()).sqrt())
    };
    let q = integrate(f, T::zero(), umax, tol * lit(0.1), T::min_positive_value())?;
    Ok(two * q.value)
}
