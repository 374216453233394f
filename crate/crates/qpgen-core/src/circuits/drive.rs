use ndarray::ArrayView2;
use num_complex::Complex;

use crate::floquet::FourierSeries;
use crate::num::{lit, Real};
use crate::specfn::bessel_j_symmetric;

/// Fourier coefficients of `cos(a + b sin theta)` and `sin(a + b sin theta)`,
/// indexed by `k + kmax`.
///
/// With Jacobi–Anger, `c_k = J_k(b) (e^{ia} + (-1)^k e^{-ia}) / 2` and
/// `s_k = J_k(b) (e^{ia} - (-1)^k e^{-ia}) / 2i`.
pub fn cos_sin_coefficients<T: Real>(a: T, b: T, kmax: usize) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let j = bessel_j_symmetric(kmax, b);
    let ep = Complex::from_polar(T::one(), a);
    let em = ep.conj();
    let half = lit::<T>(0.5);
    let mut c = Vec::with_capacity(j.len());
    let mut s = Vec::with_capacity(j.len());
    for (i, &jk) in j.iter().enumerate() {
        let k = i as i64 - kmax as i64;
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        let plus = ep + em * sign;
        let minus = ep - em * sign;
        c.push(plus * (jk * half));
        // minus / 2i = -i minus / 2
        s.push(Complex::new(minus.im, -minus.re) * (jk * half));
    }
    (c, s)
}

/// Series of `coef * [cos(X + a + b sin) ]` expanded on operator pair (`cos X`, `sin X`):
/// `cos(X + f) = cos X cos f - sin X sin f`.
pub(crate) fn add_shifted_cos<T: Real>(
    series: &mut FourierSeries<T>,
    coef: T,
    cos_x: ArrayView2<Complex<T>>,
    sin_x: ArrayView2<Complex<T>>,
    a: T,
    b: T,
) {
    let kmax = series.kmax();
    let (c, s) = cos_sin_coefficients(a, b, kmax);
    for i in 0..c.len() {
        let k = i as i64 - kmax as i64;
        series.add_term(k, c[i] * coef, cos_x);
        series.add_term(k, -s[i] * coef, sin_x);
    }
}

/// `sin(X + f) = sin X cos f + cos X sin f`.
pub(crate) fn add_shifted_sin<T: Real>(
    series: &mut FourierSeries<T>,
    coef: T,
    cos_x: ArrayView2<Complex<T>>,
    sin_x: ArrayView2<Complex<T>>,
    a: T,
    b: T,
) {
    let kmax = series.kmax();
    let (c, s) = cos_sin_coefficients(a, b, kmax);
    for i in 0..c.len() {
        let k = i as i64 - kmax as i64;
        series.add_term(k, c[i] * coef, sin_x);
        series.add_term(k, s[i] * coef, cos_x);
    }
}
