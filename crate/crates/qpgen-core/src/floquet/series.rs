use ndarray::{Array2, ArrayView2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::Real;

/// Fourier components `H^(k)`, `k = -kmax ..= kmax`, of a `2 pi`-periodic operator
/// `H(theta) = sum_k H^(k) e^{i k theta}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries<T: Real> {
    kmax: usize,
    comps: Vec<Array2<Complex<T>>>,
}

impl<T: Real> FourierSeries<T> {
    pub fn zeros(kmax: usize, rows: usize, cols: usize) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        FourierSeries { kmax, comps: vec![Array2::from_elem((rows, cols), z); 2 * kmax + 1] }
    }

    /// Static operator, only `H^(0)` set.
    pub fn constant(h: Array2<Complex<T>>) -> Self {
        FourierSeries { kmax: 0, comps: vec![h] }
    }

    pub fn from_components(kmax: usize, comps: Vec<Array2<Complex<T>>>) -> Result<Self> {
        if comps.len() != 2 * kmax + 1 {
            return Err(Error::Argument(format!(
                "expected {} components, got {}",
                2 * kmax + 1,
                comps.len()
            )));
        }
        let shape = comps[0].dim();
        if comps.iter().any(|c| c.dim() != shape) {
            return Err(Error::Argument("Fourier components differ in shape".into()));
        }
        Ok(FourierSeries { kmax, comps })
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn rows(&self) -> usize {
        self.comps[0].nrows()
    }

    pub fn cols(&self) -> usize {
        self.comps[0].ncols()
    }

    pub fn component(&self, k: i64) -> Option<ArrayView2<'_, Complex<T>>> {
        let i = k + self.kmax as i64;
        if i < 0 || i as usize >= self.comps.len() {
            None
        } else {
            Some(self.comps[i as usize].view())
        }
    }

    pub fn component_mut(&mut self, k: i64) -> &mut Array2<Complex<T>> {
        let i = (k + self.kmax as i64) as usize;
        &mut self.comps[i]
    }

    /// `(k, H^(k))` pairs in ascending `k`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Array2<Complex<T>>)> {
        let kmax = self.kmax as i64;
        self.comps.iter().enumerate().map(move |(i, c)| (i as i64 - kmax, c))
    }

    /// Adds `coeff * op` to `H^(k)`.
    pub fn add_term(&mut self, k: i64, coeff: Complex<T>, op: ArrayView2<Complex<T>>) {
        let c = self.component_mut(k);
        c.zip_mut_with(&op, |a, &b| *a = *a + coeff * b);
    }

    /// `H(theta)`.
    pub fn evaluate(&self, theta: T) -> Array2<Complex<T>> {
        let mut out = Array2::from_elem((self.rows(), self.cols()), Complex::new(T::zero(), T::zero()));
        for (k, c) in self.iter() {
            let ph = Complex::from_polar(T::one(), T::from_i64(k).unwrap() * theta);
            out.zip_mut_with(c, |a, &b| *a = *a + ph * b);
        }
        out
    }

    /// `max |H^(-k) - (H^(k))^H|`; zero for a Hermitian time-dependent operator.
    pub fn closure_defect(&self) -> T {
        let mut d = T::zero();
        let kmax = self.kmax as i64;
        for k in 0..=kmax {
            let a = self.component(-k).unwrap();
            let b = self.component(k).unwrap();
            for ((i, j), &x) in a.indexed_iter() {
                d = d.max((x - b[[j, i]].conj()).norm());
            }
        }
        d
    }

    /// `L^H H^(k) R` for every component.
    pub fn rotate(&self, left: ArrayView2<Complex<T>>, right: ArrayView2<Complex<T>>) -> Self {
        let lh = left.t().mapv(|z| z.conj());
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let cr = T::cdot(c.view(), right);
                T::cdot(lh.view(), cr.view())
            })
            .collect();
        FourierSeries { kmax: self.kmax, comps }
    }

    /// Largest `|k|` with a component above `tol` (entrywise).
    pub fn bandwidth(&self, tol: T) -> usize {
        let mut b = 0;
        for (k, c) in self.iter() {
            if c.iter().any(|z| z.norm() > tol) {
                b = b.max(k.unsigned_abs() as usize);
            }
        }
        b
    }

    /// Largest entry over all `k != 0` components.
    pub fn drive_magnitude(&self) -> T {
        self.iter()
            .filter(|(k, _)| *k != 0)
            .flat_map(|(_, c)| c.iter())
            .fold(T::zero(), |m, z| m.max(z.norm()))
    }
}
