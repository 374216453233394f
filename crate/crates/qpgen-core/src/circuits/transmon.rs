use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::floquet::FourierSeries;
use crate::num::{lit, Real};

use super::basis::{build_charge_operators, ChargeBasis, ChargeBasisOperators};
use super::drive::{add_shifted_cos, add_shifted_sin};

/// Single-junction transmon, energies in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonParams<T> {
    pub ej: T,
    pub ec: T,
    pub ng: T,
}

impl<T: Real> TransmonParams<T> {
    pub fn new(ej: T, ec: T, ng: T) -> Result<Self> {
        if !(ej > T::zero()) || !(ec > T::zero()) {
            return Err(Error::Invariant(format!("E_J and E_C must be positive (E_J={ej}, E_C={ec})")));
        }
        if !(ng >= T::zero() && ng < T::one()) {
            return Err(Error::Invariant(format!("n_g must lie in [0, 1), got {ng}")));
        }
        Ok(TransmonParams { ej, ec, ng })
    }
}

/// `4 E_C (n - n_g)^2` on the basis.
pub fn charging_term<T: Real>(ec: T, ng: T, basis: ChargeBasis) -> Array2<Complex<T>> {
    let q = basis.charges::<T>();
    let d = q.len();
    let mut h = super::basis::czeros(d, d);
    let four = lit::<T>(4.0);
    for (i, &k) in q.iter().enumerate() {
        let x = k - ng;
        h[[i, i]] = Complex::new(four * ec * x * x, T::zero());
    }
    h
}

/// Static `4 E_C (n - n_g)^2 - E_J cos(phi)`.
pub fn transmon_hamiltonian<T: Real>(p: &TransmonParams<T>, basis: ChargeBasis) -> Array2<Complex<T>> {
    let ops = build_charge_operators::<T>(basis);
    let mut h = charging_term(p.ec, p.ng, basis);
    h.zip_mut_with(&ops.cos_phi, |a, &b| *a = *a - b * p.ej);
    h
}

/// Charge-displaced frame: `4 E_C (n - n_g)^2 - E_J cos(phi + phi_d sin theta)`.
pub fn transmon_drive_fourier<T: Real>(
    p: &TransmonParams<T>,
    ops: &ChargeBasisOperators<T>,
    phi_d: T,
    kmax: usize,
) -> FourierSeries<T> {
    let d = ops.basis.dim();
    let mut s = FourierSeries::zeros(kmax, d, d);
    let ct = charging_term(p.ec, p.ng, ops.basis);
    s.add_term(0, Complex::new(T::one(), T::zero()), ct.view());
    add_shifted_cos(&mut s, -p.ej, ops.cos_phi.view(), ops.sin_phi.view(), T::zero(), phi_d);
    s
}

/// Lab-frame charge drive: `H_q + Omega n cos theta`, `Omega` in GHz.
pub fn rabi_drive_fourier<T: Real>(
    p: &TransmonParams<T>,
    ops: &ChargeBasisOperators<T>,
    omega: T,
) -> FourierSeries<T> {
    let d = ops.basis.dim();
    let mut s = FourierSeries::zeros(1, d, d);
    let h0 = transmon_hamiltonian(p, ops.basis);
    let one = Complex::new(T::one(), T::zero());
    s.add_term(0, one, h0.view());
    let half = Complex::new(omega * lit(0.5), T::zero());
    s.add_term(1, half, ops.n_op.view());
    s.add_term(-1, half, ops.n_op.view());
    s
}

/// Even -> Odd series of `cos((phi + a + b sin theta) / 2)` and `sin(...)`.
pub fn half_angle_series<T: Real>(
    ops: &ChargeBasisOperators<T>,
    a: T,
    b: T,
    kmax: usize,
) -> (FourierSeries<T>, FourierSeries<T>) {
    let d = ops.basis.dim();
    let half = lit::<T>(0.5);
    let mut c = FourierSeries::zeros(kmax, d, d);
    let mut s = FourierSeries::zeros(kmax, d, d);
    add_shifted_cos(&mut c, T::one(), ops.cos_half_phi.view(), ops.sin_half_phi.view(), a * half, b * half);
    add_shifted_sin(&mut s, T::one(), ops.cos_half_phi.view(), ops.sin_half_phi.view(), a * half, b * half);
    (c, s)
}

/// Transmon transition operators `cos((phi + phi_d sin theta)/2)`, `sin(...)`.
pub fn transmon_transition_series<T: Real>(
    ops: &ChargeBasisOperators<T>,
    phi_d: T,
    kmax: usize,
) -> (FourierSeries<T>, FourierSeries<T>) {
    half_angle_series(ops, T::zero(), phi_d, kmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::basis::Sector;

    #[test]
    fn validation() {
        assert!(TransmonParams::new(1.0f64, 0.1, 0.0).is_ok());
        assert!(TransmonParams::new(0.0f64, 0.1, 0.0).is_err());
        assert!(TransmonParams::new(1.0f64, 0.1, 1.0).is_err());
    }

    #[test]
    fn undriven_series_is_static() {
        let p = TransmonParams::new(3.0f64, 0.05, 0.2).unwrap();
        let b = ChargeBasis::new(Sector::Even, 5).unwrap();
        let ops = build_charge_operators(b);
        let s = transmon_drive_fourier(&p, &ops, 0.0, 4);
        assert_eq!(s.drive_magnitude(), 0.0);
        let h = transmon_hamiltonian(&p, b);
        assert!(s.component(0).unwrap().iter().zip(h.iter()).all(|(a, b)| (*a - *b).norm() < 1e-15));
    }

    #[test]
    fn rabi_series_shape() {
        let p = TransmonParams::new(3.0f64, 0.05, 0.0).unwrap();
        let ops = build_charge_operators(ChargeBasis::new(Sector::Even, 2).unwrap());
        let s = rabi_drive_fourier(&p, &ops, 0.4);
        assert_eq!(s.kmax(), 1);
        assert!((s.component(1).unwrap()[[4, 4]].re - 0.4).abs() < 1e-15);
    }
}
