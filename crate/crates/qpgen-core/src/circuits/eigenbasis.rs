use ndarray::{s, Array1, Array2, ArrayView2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::floquet::FourierSeries;
use crate::num::Real;
use crate::specfn::hermitian_eig;

use super::basis::ChargeBasisOperators;

/// Operators rotated into the static eigenbases of both parity sectors and truncated
/// to the lowest `d` states.
#[derive(Debug, Clone)]
pub struct EigenbasisOperators<T: Real> {
    pub d: usize,
    pub energies_even: Array1<T>,
    pub energies_odd: Array1<T>,
    /// Charge-basis columns of the kept Even eigenstates.
    pub v_even: Array2<Complex<T>>,
    pub v_odd: Array2<Complex<T>>,
    pub n_op: Array2<Complex<T>>,
    pub cos_phi: Array2<Complex<T>>,
    pub sin_phi: Array2<Complex<T>>,
    /// Rows: Odd eigenstates; columns: Even eigenstates.
    pub cos_half_phi: Array2<Complex<T>>,
    pub sin_half_phi: Array2<Complex<T>>,
}

fn sandwich<T: Real>(l: ArrayView2<Complex<T>>, o: ArrayView2<Complex<T>>, r: ArrayView2<Complex<T>>) -> Array2<Complex<T>> {
    let lh = l.t().mapv(|z| z.conj());
    let or = T::cdot(o, r);
    T::cdot(lh.view(), or.view())
}

/// Diagonalizes both sectors and rotates `ops` into the truncated eigenbases.
pub fn to_eigenbasis<T: Real>(
    h_even: ArrayView2<Complex<T>>,
    ops: &ChargeBasisOperators<T>,
    h_odd: ArrayView2<Complex<T>>,
    d: usize,
) -> Result<EigenbasisOperators<T>> {
    let n = h_even.nrows();
    if d == 0 {
        return Err(Error::Argument("truncation d must be positive".into()));
    }
    if d > n || d > h_odd.nrows() {
        return Err(Error::Argument(format!("truncation d = {d} exceeds basis dimension {n}")));
    }
    let ee = hermitian_eig(h_even)?;
    let eo = hermitian_eig(h_odd)?;
    let ve = ee.vectors.slice(s![.., ..d]).to_owned();
    let vo = eo.vectors.slice(s![.., ..d]).to_owned();
    Ok(EigenbasisOperators {
        d,
        energies_even: ee.values.slice(s![..d]).to_owned(),
        energies_odd: eo.values.slice(s![..d]).to_owned(),
        n_op: sandwich(ve.view(), ops.n_op.view(), ve.view()),
        cos_phi: sandwich(ve.view(), ops.cos_phi.view(), ve.view()),
        sin_phi: sandwich(ve.view(), ops.sin_phi.view(), ve.view()),
        cos_half_phi: sandwich(vo.view(), ops.cos_half_phi.view(), ve.view()),
        sin_half_phi: sandwich(vo.view(), ops.sin_half_phi.view(), ve.view()),
        v_even: ve,
        v_odd: vo,
    })
}

impl<T: Real> EigenbasisOperators<T> {
    pub fn rotate_even(&self, s: &FourierSeries<T>) -> FourierSeries<T> {
        s.rotate(self.v_even.view(), self.v_even.view())
    }

    pub fn rotate_odd(&self, s: &FourierSeries<T>) -> FourierSeries<T> {
        s.rotate(self.v_odd.view(), self.v_odd.view())
    }

    /// Even -> Odd operator series.
    pub fn rotate_cross(&self, s: &FourierSeries<T>) -> FourierSeries<T> {
        s.rotate(self.v_odd.view(), self.v_even.view())
    }
}
