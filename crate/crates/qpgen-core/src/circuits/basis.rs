use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::{lit, Real};

/// Charge-parity sector: integer (`Even`) or half-integer (`Odd`) island charge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Even,
    Odd,
}

/// Truncated charge basis `k = -N_c ..= N_c`; `Odd` shifts every charge by 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChargeBasis {
    pub sector: Sector,
    pub cutoff: usize,
}

impl ChargeBasis {
    pub fn new(sector: Sector, cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::Argument("charge cutoff must be at least 1".into()));
        }
        Ok(ChargeBasis { sector, cutoff })
    }

    pub fn dim(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn charges<T: Real>(&self) -> Vec<T> {
        let off = match self.sector {
            Sector::Even => 0.0,
            Sector::Odd => 0.5,
        };
        (0..self.dim()).map(|i| lit(i as f64 - self.cutoff as f64 + off)).collect()
    }

    pub fn partner(&self) -> ChargeBasis {
        let sector = match self.sector {
            Sector::Even => Sector::Odd,
            Sector::Odd => Sector::Even,
        };
        ChargeBasis { sector, cutoff: self.cutoff }
    }
}

pub(crate) fn czeros<T: Real>(r: usize, c: usize) -> Array2<Complex<T>> {
    Array2::from_elem((r, c), Complex::new(T::zero(), T::zero()))
}

/// Charge-basis operators of one sector plus the Even -> Odd half-angle operators.
///
/// `e^{i phi}` raises the charge by one (unit subdiagonal), so `[n, e^{i phi}] = e^{i phi}`.
/// The half-angle operators are rectangular with rows in the Odd basis and columns in
/// the Even basis: `e^{i phi/2} |k> = |k + 1/2>` and `e^{-i phi/2} |k> = |k - 1/2>`.
#[derive(Debug, Clone)]
pub struct ChargeBasisOperators<T: Real> {
    pub basis: ChargeBasis,
    pub n_op: Array2<Complex<T>>,
    pub cos_phi: Array2<Complex<T>>,
    pub sin_phi: Array2<Complex<T>>,
    pub cos_2phi: Array2<Complex<T>>,
    pub cos_half_phi: Array2<Complex<T>>,
    pub sin_half_phi: Array2<Complex<T>>,
    pub identity: Array2<Complex<T>>,
}

pub fn build_charge_operators<T: Real>(basis: ChargeBasis) -> ChargeBasisOperators<T> {
    let d = basis.dim();
    let one = Complex::new(T::one(), T::zero());
    let half = lit::<T>(0.5);
    let mut n_op = czeros(d, d);
    for (i, q) in basis.charges::<T>().into_iter().enumerate() {
        n_op[[i, i]] = Complex::new(q, T::zero());
    }
    let mut raise = czeros::<T>(d, d);
    for i in 1..d {
        raise[[i, i - 1]] = one;
    }
    let lower = raise.t().to_owned();
    let cos_phi = (&raise + &lower).mapv(|z| z * half);
    // (E - E^H) / 2i
    let sin_phi = (&raise - &lower).mapv(|z| z * Complex::new(T::zero(), -half));
    let raise2 = T::cdot(raise.view(), raise.view());
    let cos_2phi = (&raise2 + &raise2.t()).mapv(|z| z * half);

    // Even column i carries charge i - N_c; Odd row i carries i - N_c + 1/2.
    let mut up = czeros::<T>(d, d);
    let mut down = czeros::<T>(d, d);
    for i in 0..d {
        up[[i, i]] = one;
        if i >= 1 {
            down[[i - 1, i]] = one;
        }
    }
    let cos_half_phi = (&up + &down).mapv(|z| z * half);
    let sin_half_phi = (&up - &down).mapv(|z| z * Complex::new(T::zero(), -half));
    let mut identity = czeros(d, d);
    for i in 0..d {
        identity[[i, i]] = one;
    }
    ChargeBasisOperators { basis, n_op, cos_phi, sin_phi, cos_2phi, cos_half_phi, sin_half_phi, identity }
}
