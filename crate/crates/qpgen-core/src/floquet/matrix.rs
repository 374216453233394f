use ndarray::{s, Array1, Array2, ArrayView1};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::{lit, Real};
use crate::specfn::hermitian_eig;

use super::series::FourierSeries;

/// Default cap on the extended dimension `d (2 M_max + 1)`.
pub const DEFAULT_MAX_DIM: usize = 12_000;

#[derive(Debug, Clone)]
pub struct FloquetProblem<T: Real> {
    pub series: FourierSeries<T>,
    /// Drive frequency `omega_d / 2 pi` in GHz.
    pub omega_d: T,
    pub m_max: usize,
    pub max_dim: usize,
}

impl<T: Real> FloquetProblem<T> {
    pub fn new(series: FourierSeries<T>, omega_d: T, m_max: usize) -> Result<Self> {
        if series.rows() != series.cols() {
            return Err(Error::Argument("Floquet series must be square".into()));
        }
        if !(omega_d > T::zero()) {
            return Err(Error::Argument(format!("drive frequency must be positive, got {omega_d}")));
        }
        if m_max == 0 {
            return Err(Error::Argument("M_max must be positive".into()));
        }
        Ok(FloquetProblem { series, omega_d, m_max, max_dim: DEFAULT_MAX_DIM })
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Self {
        self.max_dim = max_dim;
        self
    }

    pub fn d(&self) -> usize {
        self.series.rows()
    }

    pub fn blocks(&self) -> usize {
        2 * self.m_max + 1
    }

    pub fn dim(&self) -> usize {
        self.d() * self.blocks()
    }
}

/// Block matrix with `(m', m)` block `H^(m'-m) + delta_{m'm} m omega_d`, `m in [-M, M]`.
/// Row index is `(m + M) d + alpha`.
pub fn build_floquet<T: Real>(p: &FloquetProblem<T>) -> Result<Array2<Complex<T>>> {
    let d = p.d();
    let nb = p.blocks();
    let n = p.dim();
    if n > p.max_dim {
        return Err(Error::Resource(format!("extended dimension {n} exceeds limit {}", p.max_dim)));
    }
    let mut h = Array2::from_elem((n, n), Complex::new(T::zero(), T::zero()));
    let kmax = p.series.kmax() as i64;
    for bi in 0..nb {
        for bj in 0..nb {
            let k = bi as i64 - bj as i64;
            if k.abs() > kmax {
                continue;
            }
            let c = p.series.component(k).expect("k within range");
            h.slice_mut(s![bi * d..(bi + 1) * d, bj * d..(bj + 1) * d]).assign(&c);
        }
        let shift = lit::<T>(bi as f64 - p.m_max as f64) * p.omega_d;
        for a in 0..d {
            let i = bi * d + a;
            h[[i, i]].re += shift;
        }
    }
    Ok(h)
}

/// Eigenpairs of a Floquet matrix together with its block layout.
#[derive(Debug, Clone)]
pub struct FloquetSpectrum<T: Real> {
    pub energies: Array1<T>,
    pub vectors: Array2<Complex<T>>,
    pub d: usize,
    pub m_max: usize,
    pub omega_d: T,
}

pub fn diagonalize<T: Real>(p: &FloquetProblem<T>) -> Result<FloquetSpectrum<T>> {
    let h = build_floquet(p)?;
    let e = hermitian_eig(h.view())?;
    drop(h);
    Ok(FloquetSpectrum { energies: e.values, vectors: e.vectors, d: p.d(), m_max: p.m_max, omega_d: p.omega_d })
}

impl<T: Real> FloquetSpectrum<T> {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn blocks(&self) -> usize {
        2 * self.m_max + 1
    }

    pub fn vector(&self, j: usize) -> ArrayView1<'_, Complex<T>> {
        self.vectors.column(j)
    }

    /// Weight of eigenvector `j` in each photon block, `m = -M ..= M`.
    pub fn photon_weights(&self, j: usize) -> Vec<T> {
        photon_weights(self.vector(j), self.d)
    }

    /// `sum_m m |lambda_m|^2`.
    pub fn centroid(&self, j: usize) -> T {
        centroid(self.vector(j), self.d, self.m_max)
    }

    /// Quasienergy folded into `[-omega_d/2, omega_d/2)`.
    pub fn quasienergy(&self, j: usize) -> T {
        fold(self.energies[j], self.omega_d)
    }

    /// Index of the replica of state `j0` shifted by `shift` photons, and its overlap with
    /// the block-shifted copy of `j0`.
    ///
    /// Candidates are taken from an energy window around `E_j0 + shift omega_d`; if none
    /// overlaps by at least 1/2, every eigenvector is scanned.
    pub fn replica(&self, j0: usize, shift: i64) -> (usize, T) {
        let target = self.energies[j0] + lit::<T>(shift as f64) * self.omega_d;
        let probe = shift_vector(self.vector(j0), self.d, shift);
        let win = self.omega_d * lit(1e-3);
        let lo = self.energies.iter().position(|&e| e >= target - win).unwrap_or(self.dim());
        let mut best = (usize::MAX, T::zero());
        for j in lo..self.dim() {
            if self.energies[j] > target + win {
                break;
            }
            let o = overlap(probe.view(), self.vector(j));
            if o > best.1 {
                best = (j, o);
            }
        }
        if best.0 != usize::MAX && best.1 >= lit(0.5) {
            return best;
        }
        for j in 0..self.dim() {
            let o = overlap(probe.view(), self.vector(j));
            if o > best.1 {
                best = (j, o);
            }
        }
        best
    }
}

pub fn fold<T: Real>(e: T, omega: T) -> T {
    let h = omega * lit(0.5);
    let x = (e + h) % omega;
    let x = if x < T::zero() { x + omega } else { x };
    x - h
}

/// `|<a|b>|`.
pub fn overlap<T: Real>(a: ArrayView1<Complex<T>>, b: ArrayView1<Complex<T>>) -> T {
    inner(a, b).norm()
}

/// `<a|b>`.
pub fn inner<T: Real>(a: ArrayView1<Complex<T>>, b: ArrayView1<Complex<T>>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (x, y) in a.iter().zip(b.iter()) {
        acc = acc + x.conj() * *y;
    }
    acc
}

pub fn photon_weights<T: Real>(v: ArrayView1<Complex<T>>, d: usize) -> Vec<T> {
    v.as_slice()
        .map(|s| s.to_vec())
        .unwrap_or_else(|| v.to_vec())
        .chunks(d)
        .map(|c| c.iter().fold(T::zero(), |a, z| a + z.norm_sqr()))
        .collect()
}

pub fn centroid<T: Real>(v: ArrayView1<Complex<T>>, d: usize, m_max: usize) -> T {
    photon_weights(v, d)
        .into_iter()
        .enumerate()
        .fold(T::zero(), |a, (b, w)| a + w * lit(b as f64 - m_max as f64))
}

/// Moves every photon block by `shift`; blocks pushed past the edge are dropped.
pub fn shift_vector<T: Real>(v: ArrayView1<Complex<T>>, d: usize, shift: i64) -> Array1<Complex<T>> {
    let n = v.len();
    let nb = (n / d) as i64;
    let mut out = Array1::from_elem(n, Complex::new(T::zero(), T::zero()));
    for b in 0..nb {
        let t = b + shift;
        if t < 0 || t >= nb {
            continue;
        }
        let (b, t) = (b as usize, t as usize);
        out.slice_mut(s![t * d..(t + 1) * d]).assign(&v.slice(s![b * d..(b + 1) * d]));
    }
    out
}

/// `sum_m e^{i m theta} lambda_m`: the Floquet mode at drive phase `theta`.
pub fn project_mode<T: Real>(v: ArrayView1<Complex<T>>, d: usize, m_max: usize, theta: T) -> Array1<Complex<T>> {
    let nb = v.len() / d;
    let mut out = Array1::from_elem(d, Complex::new(T::zero(), T::zero()));
    for b in 0..nb {
        let m = lit::<T>(b as f64 - m_max as f64);
        let ph = Complex::from_polar(T::one(), m * theta);
        for a in 0..d {
            out[a] = out[a] + ph * v[b * d + a];
        }
    }
    out
}

/// Extended-space action of a Fourier-series operator: `w_m' = sum_k O^(k) v_{m'-k}`.
/// `v` lives on `cols` x blocks and the result on `rows` x blocks.
pub fn apply_series<T: Real>(o: &FourierSeries<T>, v: ArrayView1<Complex<T>>) -> Array1<Complex<T>> {
    let (r, c) = (o.rows(), o.cols());
    let nb = v.len() / c;
    let mut w = Array1::from_elem(r * nb, Complex::new(T::zero(), T::zero()));
    for (k, ok) in o.iter() {
        if ok.iter().all(|z| z.re == T::zero() && z.im == T::zero()) {
            continue;
        }
        for bo in 0..nb as i64 {
            let bi = bo - k;
            if bi < 0 || bi >= nb as i64 {
                continue;
            }
            let (bo, bi) = (bo as usize, bi as usize);
            let vin = v.slice(s![bi * c..(bi + 1) * c]);
            let mut wout = w.slice_mut(s![bo * r..(bo + 1) * r]);
            for i in 0..r {
                let mut acc = Complex::new(T::zero(), T::zero());
                for j in 0..c {
                    acc = acc + ok[[i, j]] * vin[j];
                }
                wout[i] = wout[i] + acc;
            }
        }
    }
    w
}
