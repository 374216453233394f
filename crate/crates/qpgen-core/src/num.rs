//! Scalar abstraction shared by the numerical core.

use std::fmt::{Debug, Display, LowerExp};
use std::os::raw::c_char;

use ndarray::{Array2, ArrayView2, LinalgScalar, ScalarOperand};
use num_complex::Complex;
use num_traits as nt;

/// Floating point type the solver runs on. Implemented for `f32` and `f64`.
pub trait Real:
    nt::Float
    + nt::FloatConst
    + nt::FromPrimitive
    + nt::NumAssign
    + LinalgScalar
    + ScalarOperand
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Machine epsilon as an associated constant for convenience in tolerances.
    const EPS: Self;

    /// Real symmetric eigensolver on a column-major `n x n` buffer (lower triangle read).
    /// On success `a` holds the eigenvectors and `w` the ascending eigenvalues.
    fn syevd(n: usize, a: &mut [Self], w: &mut [Self]) -> Result<(), i32>;

    /// Complex Hermitian counterpart of [`Real::syevd`].
    fn heevd(n: usize, a: &mut [Complex<Self>], w: &mut [Self]) -> Result<(), i32>;

    /// Complex matrix product.
    fn cdot(a: ArrayView2<Complex<Self>>, b: ArrayView2<Complex<Self>>) -> Array2<Complex<Self>>;
}

/// Lossless-enough conversion of an `f64` literal into the working precision.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable")
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

const JOBZ: c_char = b'V' as c_char;
const UPLO: c_char = b'L' as c_char;

macro_rules! impl_real {
    ($t:ty, $syevd:ident, $heevd:ident) => {
        impl Real for $t {
            const EPS: Self = <$t>::EPSILON;

            fn syevd(n: usize, a: &mut [Self], w: &mut [Self]) -> Result<(), i32> {
                assert_eq!(a.len(), n * n);
                assert_eq!(w.len(), n);
                if n == 0 {
                    return Ok(());
                }
                let ni = n as i32;
                let mut info = 0;
                let mut wq = [0.0 as $t];
                let mut iq = [0i32];
                unsafe {
                    lapack_sys::$syevd(
                        &JOBZ, &UPLO, &ni, a.as_mut_ptr(), &ni, w.as_mut_ptr(),
                        wq.as_mut_ptr(), &-1, iq.as_mut_ptr(), &-1, &mut info,
                    );
                }
                if info != 0 {
                    return Err(info);
                }
                let lwork = wq[0] as i32;
                let liwork = iq[0];
                let mut work = vec![0.0 as $t; lwork.max(1) as usize];
                let mut iwork = vec![0i32; liwork.max(1) as usize];
                unsafe {
                    lapack_sys::$syevd(
                        &JOBZ, &UPLO, &ni, a.as_mut_ptr(), &ni, w.as_mut_ptr(),
                        work.as_mut_ptr(), &lwork, iwork.as_mut_ptr(), &liwork, &mut info,
                    );
                }
                if info != 0 { Err(info) } else { Ok(()) }
            }

            fn heevd(n: usize, a: &mut [Complex<Self>], w: &mut [Self]) -> Result<(), i32> {
                assert_eq!(a.len(), n * n);
                assert_eq!(w.len(), n);
                if n == 0 {
                    return Ok(());
                }
                let ni = n as i32;
                let mut info = 0;
                let mut wq = [Complex::<$t>::new(0.0, 0.0)];
                let mut rq = [0.0 as $t];
                let mut iq = [0i32];
                unsafe {
                    lapack_sys::$heevd(
                        &JOBZ, &UPLO, &ni, a.as_mut_ptr() as *mut _, &ni, w.as_mut_ptr(),
                        wq.as_mut_ptr() as *mut _, &-1, rq.as_mut_ptr(), &-1,
                        iq.as_mut_ptr(), &-1, &mut info,
                    );
                }
                if info != 0 {
                    return Err(info);
                }
                let lwork = wq[0].re as i32;
                let lrwork = rq[0] as i32;
                let liwork = iq[0];
                let mut work = vec![Complex::<$t>::new(0.0, 0.0); lwork.max(1) as usize];
                let mut rwork = vec![0.0 as $t; lrwork.max(1) as usize];
                let mut iwork = vec![0i32; liwork.max(1) as usize];
                unsafe {
                    lapack_sys::$heevd(
                        &JOBZ, &UPLO, &ni, a.as_mut_ptr() as *mut _, &ni, w.as_mut_ptr(),
                        work.as_mut_ptr() as *mut _, &lwork, rwork.as_mut_ptr(), &lrwork,
                        iwork.as_mut_ptr(), &liwork, &mut info,
                    );
                }
                if info != 0 { Err(info) } else { Ok(()) }
            }

            fn cdot(
                a: ArrayView2<Complex<Self>>,
                b: ArrayView2<Complex<Self>>,
            ) -> Array2<Complex<Self>> {
                a.dot(&b)
            }
        }
    };
}

impl_real!(f32, ssyevd_, cheevd_);
impl_real!(f64, dsyevd_, zheevd_);

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn lit_round_trips() {
        assert_eq!(lit::<f64>(0.25), 0.25);
        assert_eq!(lit::<f32>(0.25), 0.25f32);
    }

    #[test]
    fn syevd_two_by_two() {
        let mut a = vec![2.0f64, 1.0, 1.0, 2.0];
        let mut w = vec![0.0; 2];
        f64::syevd(2, &mut a, &mut w).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn heevd_pauli_y() {
        let i = Complex::new(0.0f32, 1.0);
        let z = Complex::new(0.0f32, 0.0);
        // column-major [[0, -i], [i, 0]]
        let mut a = vec![z, i, -i, z];
        let mut w = vec![0.0f32; 2];
        f32::heevd(2, &mut a, &mut w).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-6 && (w[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn cdot_matches_manual() {
        let a = array![[Complex::new(1.0, 1.0), Complex::new(0.0, 2.0)]];
        let b = array![[Complex::new(1.0, 0.0)], [Complex::new(0.0, -1.0)]];
        let c = f64::cdot(a.view(), b.view());
        assert_eq!(c[[0, 0]], Complex::new(3.0, 1.0));
    }
}
