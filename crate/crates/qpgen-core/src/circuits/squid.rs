use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::floquet::FourierSeries;
use crate::num::{lit, Real};
use crate::specfn::bessel_j_all;

use super::basis::ChargeBasisOperators;
use super::drive::add_shifted_cos;
use super::transmon::{charging_term, half_angle_series};

/// Two-junction SQUID with flux split `c1 + c2 = 1`; energies in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquidParams<T> {
    pub ej1: T,
    pub ej2: T,
    pub ec: T,
    pub ng: T,
    pub c1: T,
    pub c2: T,
}

impl<T: Real> SquidParams<T> {
    pub fn new(ej1: T, ej2: T, ec: T, ng: T, c1: T, c2: T) -> Result<Self> {
        if !(ej1 > T::zero()) || !(ej2 > T::zero()) || !(ec > T::zero()) {
            return Err(Error::Invariant("E_J1, E_J2 and E_C must be positive".into()));
        }
        if !(ng >= T::zero() && ng < T::one()) {
            return Err(Error::Invariant(format!("n_g must lie in [0, 1), got {ng}")));
        }
        if !((c1 + c2 - T::one()).abs() <= lit(1e-12)) {
            return Err(Error::Invariant(format!(
                "flux allocation must satisfy c1 + c2 = 1 (got c1 = {c1}, c2 = {c2})"
            )));
        }
        Ok(SquidParams { ej1, ej2, ec, ng, c1, c2 })
    }

    /// Identical junctions with equal and opposite flux coupling.
    pub fn symmetric(ej: T, ec: T, ng: T) -> Result<Self> {
        let h = lit::<T>(0.5);
        Self::new(ej, ej, ec, ng, h, h)
    }

    pub fn is_symmetric(&self) -> bool {
        self.ej1 == self.ej2 && self.c1 == self.c2
    }
}

/// Transition operators of one junction together with its Josephson energy.
#[derive(Debug, Clone)]
pub struct JunctionSeries<T: Real> {
    pub ej: T,
    pub cos: FourierSeries<T>,
    pub sin: FourierSeries<T>,
}

#[derive(Debug, Clone)]
pub struct SquidSeries<T: Real> {
    pub hamiltonian: FourierSeries<T>,
    pub junctions: [JunctionSeries<T>; 2],
}

/// Fourier expansion of
/// `4 E_C (n - n_g)^2 - E_J1 cos(phi + c1 phi_e) - E_J2 cos(phi - c2 phi_e)`
/// with `phi_e = phi_dc + phi_ac sin theta`, plus the half-angle operators of each
/// junction phase.
pub fn squid_drive_fourier<T: Real>(
    p: &SquidParams<T>,
    ops: &ChargeBasisOperators<T>,
    phi_dc: T,
    phi_ac: T,
    kmax: usize,
) -> Result<SquidSeries<T>> {
    if !((p.c1 + p.c2 - T::one()).abs() <= lit(1e-12)) {
        return Err(Error::Invariant("flux allocation must satisfy c1 + c2 = 1".into()));
    }
    let d = ops.basis.dim();
    let mut h = FourierSeries::zeros(kmax, d, d);
    let ct = charging_term(p.ec, p.ng, ops.basis);
    h.add_term(0, Complex::new(T::one(), T::zero()), ct.view());
    let shifts = [(p.ej1, p.c1 * phi_dc, p.c1 * phi_ac), (p.ej2, -p.c2 * phi_dc, -p.c2 * phi_ac)];
    for &(ej, a, b) in &shifts {
        add_shifted_cos(&mut h, -ej, ops.cos_phi.view(), ops.sin_phi.view(), a, b);
    }
    let mk = |(ej, a, b): (T, T, T)| {
        let (cos, sin) = half_angle_series(ops, a, b, kmax);
        JunctionSeries { ej, cos, sin }
    };
    Ok(SquidSeries { hamiltonian: h, junctions: [mk(shifts[0]), mk(shifts[1])] })
}

/// Coefficients of the high-frequency effective potential,
/// `U = -E_1 cos(phi) - E_2 cos(2 phi)`, returned as `(E_1, E_2)`.
///
/// `E_1 = 2 E_J J_0(phi_ac / 2)`,
/// `E_2 = (4 E_C E_J^2 / f_d^2) sum_n [J_2n(phi_ac / 2) / n]^2`.
pub fn kapitza_coefficients<T: Real>(p: &SquidParams<T>, phi_ac: T, omega_d: T, n_terms: usize) -> Result<(T, T)> {
    if p.ej1 != p.ej2 {
        return Err(Error::Argument("effective Hamiltonian requires identical junctions".into()));
    }
    let ej = p.ej1;
    let x = phi_ac * lit(0.5);
    let j = bessel_j_all(2 * n_terms.max(1), x);
    let two = lit::<T>(2.0);
    let e1 = two * ej * j[0];
    let pref = lit::<T>(4.0) * p.ec * ej * ej / (omega_d * omega_d);
    let mut sum = T::zero();
    for n in 1..=n_terms.max(1) {
        let t = j[2 * n] / lit(n as f64);
        let term = t * t;
        sum += term;
        if term <= lit::<T>(1e-14) * sum {
            break;
        }
    }
    Ok((e1, pref * sum))
}

/// `4 E_C (n - n_g)^2 - E_1 cos(phi) - E_2 cos(2 phi)`.
pub fn effective_hamiltonian_kapitza<T: Real>(
    p: &SquidParams<T>,
    ops: &ChargeBasisOperators<T>,
    phi_ac: T,
    omega_d: T,
    n_terms: usize,
) -> Result<Array2<Complex<T>>> {
    let (e1, e2) = kapitza_coefficients(p, phi_ac, omega_d, n_terms)?;
    let mut h = charging_term(p.ec, p.ng, ops.basis);
    h.zip_mut_with(&ops.cos_phi, |a, &b| *a = *a - b * e1);
    h.zip_mut_with(&ops.cos_2phi, |a, &b| *a = *a - b * e2);
    Ok(h)
}

/// Effective potential `-E_1 cos(phi) - E_2 cos(2 phi)` on a phase grid.
pub fn effective_potential<T: Real>(e1: T, e2: T, phis: &[T]) -> Vec<T> {
    let two = lit::<T>(2.0);
    phis.iter().map(|&f| -e1 * f.cos() - e2 * (two * f).cos()).collect()
}
