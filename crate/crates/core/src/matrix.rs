//! Small dense-matrix helpers shared by every module.

use crate::{CMat, CVec, Scalar};
use nalgebra::ComplexField;
use num_complex::Complex;

/// Shorthand for a complex scalar from real and imaginary parts.
pub fn c<T: Scalar>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Complex zero.
pub fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Complex one.
pub fn cone<T: Scalar>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// Largest entry magnitude.
pub fn max_abs<T: Scalar>(m: &CMat<T>) -> T {
    m.iter()
        .map(|z| z.modulus())
        .fold(T::zero(), |acc, x| if x > acc { x } else { acc })
}

/// Entrywise conjugate (no transpose).
pub fn conj<T: Scalar>(m: &CMat<T>) -> CMat<T> {
    m.map(|z| z.conj())
}

/// `[a, b] = ab - ba`.
pub fn comm<T: Scalar>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a * b - b * a
}

/// `{a, b} = ab + ba`.
pub fn anticomm<T: Scalar>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a * b + b * a
}

/// Deviation from Hermiticity, `max |(m - m†)_kl|`.
pub fn herm_residual<T: Scalar>(m: &CMat<T>) -> T {
    max_abs(&(m - m.adjoint()))
}

/// Deviation from anti-Hermiticity.
pub fn antiherm_residual<T: Scalar>(m: &CMat<T>) -> T {
    max_abs(&(m + m.adjoint()))
}

/// Deviation from unitarity, `max |(m m† - 1)_kl|`.
pub fn unitary_residual<T: Scalar>(m: &CMat<T>) -> T {
    let n = m.nrows();
    max_abs(&(m * m.adjoint() - CMat::<T>::identity(n, n)))
}

/// Conjugation of a linear operator by the antilinear map `J = U ∘ conj`:
/// `J M J* = U conj(M) U†`.
pub fn j_conj<T: Scalar>(u: &CMat<T>, m: &CMat<T>) -> CMat<T> {
    u * conj(m) * u.adjoint()
}

/// Apply `J = U ∘ conj` to a vector.
pub fn j_apply<T: Scalar>(u: &CMat<T>, v: &CVec<T>) -> CVec<T> {
    u * v.map(|z| z.conj())
}

/// Real inner product `Re Tr(x† y)` on matrices.
pub fn re_trace_inner<T: Scalar>(x: &CMat<T>, y: &CMat<T>) -> T {
    let mut acc = T::zero();
    for (a, b) in x.iter().zip(y.iter()) {
        acc += a.re * b.re + a.im * b.im;
    }
    acc
}

/// Real trace of a matrix (imaginary part discarded; callers assert it is
/// negligible where it matters).
pub fn trace_re<T: Scalar>(m: &CMat<T>) -> T {
    let mut acc = T::zero();
    for k in 0..m.nrows().min(m.ncols()) {
        acc += m[(k, k)].re;
    }
    acc
}

/// Isometric real coordinates of a Hermitian `n x n` matrix: the diagonal
/// followed by `sqrt(2) * (Re, Im)` of the strict upper triangle. Euclidean
/// inner product of coordinates equals `Re Tr(x† y)`.
pub fn herm_to_coords<T: Scalar>(m: &CMat<T>) -> Vec<T> {
    let n = m.nrows();
    let s2 = T::c(2.0).sqrt();
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        out.push(m[(k, k)].re);
    }
    for k in 0..n {
        for l in (k + 1)..n {
            out.push(s2 * m[(k, l)].re);
            out.push(s2 * m[(k, l)].im);
        }
    }
    out
}

/// Inverse of [`herm_to_coords`].
pub fn coords_to_herm<T: Scalar>(coords: &[T], n: usize) -> CMat<T> {
    let s2 = T::c(2.0).sqrt();
    let mut m = CMat::<T>::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = c(coords[k], T::zero());
    }
    let mut idx = n;
    for k in 0..n {
        for l in (k + 1)..n {
            let re = coords[idx] / s2;
            let im = coords[idx + 1] / s2;
            idx += 2;
            m[(k, l)] = c(re, im);
            m[(l, k)] = c(re, -im);
        }
    }
    m
}

/// Flatten a general complex matrix to real coordinates (Re then Im,
/// column-major), used for stacking real-linear constraint rows.
pub fn to_real_coords<T: Scalar>(m: &CMat<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(2 * m.len());
    for z in m.iter() {
        out.push(z.re);
    }
    for z in m.iter() {
        out.push(z.im);
    }
    out
}

/// Inverse of [`to_real_coords`].
pub fn from_real_coords<T: Scalar>(coords: &[T], nrows: usize, ncols: usize) -> CMat<T> {
    let n = nrows * ncols;
    let mut m = CMat::<T>::zeros(nrows, ncols);
    for (k, z) in m.iter_mut().enumerate() {
        *z = c(coords[k], coords[n + k]);
    }
    m
}

/// Sorted (ascending) eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues<T: Scalar>(m: &CMat<T>) -> Vec<T> {
    let eig = m.clone().symmetric_eigen();
    let mut vals: Vec<T> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN eigenvalue"));
    vals
}
