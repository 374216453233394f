//! Dense Hermitian eigendecomposition with a deterministic output convention.
//!
//! Backed by LAPACK divide-and-conquer. Real-valued input goes through the real
//! symmetric driver, and block-diagonal structure (connected components of the
//! nonzero pattern) is solved block by block.

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::{lit, Real};

#[derive(Debug, Clone)]
pub struct Eigh<T: Real> {
    /// Ascending eigenvalues.
    pub values: Array1<T>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: Array2<Complex<T>>,
}

/// Maximum entrywise deviation from Hermiticity, relative to the largest entry.
pub fn hermiticity_defect<T: Real>(h: ArrayView2<Complex<T>>) -> T {
    let n = h.nrows();
    let mut scale = T::zero();
    let mut defect = T::zero();
    for i in 0..n {
        for j in 0..=i {
            let a = h[[i, j]];
            let b = h[[j, i]].conj();
            scale = scale.max(a.norm()).max(b.norm());
            defect = defect.max((a - b).norm());
        }
    }
    if scale == T::zero() { T::zero() } else { defect / scale }
}

fn components<T: Real>(h: ArrayView2<Complex<T>>) -> Vec<Vec<usize>> {
    let n = h.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in 0..i {
            let v = h[[i, j]];
            if v.re != T::zero() || v.im != T::zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues ascend; ties keep block order, then LAPACK order. Each eigenvector is
/// scaled so that its first component exceeding `1e-8` of its largest magnitude is real
/// and positive.
pub fn hermitian_eig<T: Real>(h: ArrayView2<Complex<T>>) -> Result<Eigh<T>> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::Argument(format!("matrix is {}x{}, not square", n, h.ncols())));
    }
    let defect = hermiticity_defect(h);
    if !(defect <= lit(1e-10)) {
        return Err(Error::Contract(format!("matrix is not Hermitian (relative defect {defect:e})")));
    }
    let is_real = h.iter().all(|z| z.im == T::zero());
    let groups = components(h);

    let mut values: Vec<(T, usize, usize)> = Vec::with_capacity(n);
    let mut blocks: Vec<(Vec<usize>, Vec<Complex<T>>)> = Vec::with_capacity(groups.len());
    for (g, idx) in groups.into_iter().enumerate() {
        let s = idx.len();
        let mut w = vec![T::zero(); s];
        let vecs: Vec<Complex<T>> = if is_real {
            let mut a = vec![T::zero(); s * s];
            for (c, &jc) in idx.iter().enumerate() {
                for (r, &ir) in idx.iter().enumerate() {
                    a[r + c * s] = h[[ir, jc]].re;
                }
            }
            T::syevd(s, &mut a, &mut w)
                .map_err(|i| Error::Numeric(format!("syevd failed with info {i}")))?;
            a.into_iter().map(|x| Complex::new(x, T::zero())).collect()
        } else {
            let mut a = vec![Complex::new(T::zero(), T::zero()); s * s];
            for (c, &jc) in idx.iter().enumerate() {
                for (r, &ir) in idx.iter().enumerate() {
                    a[r + c * s] = h[[ir, jc]];
                }
            }
            T::heevd(s, &mut a, &mut w)
                .map_err(|i| Error::Numeric(format!("heevd failed with info {i}")))?;
            a
        };
        for (k, &x) in w.iter().enumerate() {
            values.push((x, g, k));
        }
        blocks.push((idx, vecs));
    }
    values.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut vals = Array1::zeros(n);
    let mut vectors = Array2::from_elem((n, n), Complex::new(T::zero(), T::zero()));
    let gauge_floor = lit::<T>(1e-8);
    for (col, &(x, g, k)) in values.iter().enumerate() {
        vals[col] = x;
        let (idx, vecs) = &blocks[g];
        let s = idx.len();
        let v = &vecs[k * s..(k + 1) * s];
        let vmax = v.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        let pivot = v.iter().find(|z| z.norm() > gauge_floor * vmax).copied();
        let phase = match pivot {
            Some(p) if p.norm() > T::zero() => p.conj() / p.norm(),
            _ => Complex::new(T::one(), T::zero()),
        };
        for (r, &ir) in idx.iter().enumerate() {
            vectors[[ir, col]] = v[r] * phase;
        }
    }
    let e = Eigh { values: vals, vectors };
    spot_check(h, &e)?;
    Ok(e)
}

/// Residual of three columns against the input; catches a misbehaving BLAS/LAPACK build.
fn spot_check<T: Real>(h: ArrayView2<Complex<T>>, e: &Eigh<T>) -> Result<()> {
    let n = h.nrows();
    if n == 0 {
        return Ok(());
    }
    let scale = h.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    let tol = lit::<T>(1e3) * T::EPS * lit::<T>(n as f64).sqrt() * scale.max(T::min_positive_value());
    for j in [0, n / 2, n - 1] {
        let v = e.vectors.column(j);
        let mut worst = T::zero();
        for i in 0..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..n {
                acc = acc + h[[i, k]] * v[k];
            }
            worst = worst.max((acc - v[i] * e.values[j]).norm());
        }
        if !(worst <= tol) {
            return Err(Error::Numeric(format!(
                "eigensolver residual {worst:e} exceeds {tol:e} (column {j} of {n}); check the LAPACK/BLAS build"
            )));
        }
    }
    Ok(())
}

/// Largest entry of `H V - V diag(lambda)`.
pub fn residual<T: Real>(h: ArrayView2<Complex<T>>, e: &Eigh<T>) -> T {
    let hv = T::cdot(h, e.vectors.view());
    let mut r = T::zero();
    for ((i, j), z) in hv.indexed_iter() {
        r = r.max((*z - e.vectors[[i, j]] * e.values[j]).norm());
    }
    r
}

/// Largest entry of `V^H V - I`.
pub fn orthonormality_defect<T: Real>(e: &Eigh<T>) -> T {
    let vh = e.vectors.t().mapv(|z| z.conj());
    let g = T::cdot(vh.view(), e.vectors.view());
    let mut r = T::zero();
    for ((i, j), z) in g.indexed_iter() {
        let id = if i == j { T::one() } else { T::zero() };
        r = r.max((*z - Complex::new(id, T::zero())).norm());
    }
    r
}
