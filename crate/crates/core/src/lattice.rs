//! Periodic rectangular lattices and finite-difference calculus.
//!
//! Sites are ordered lexicographically over their coordinates with the
//! first axis slowest (row-major). All derivatives are central differences
//! with periodic wraparound; the Laplacian carries the geometric sign
//! convention `lap = -sum_mu d^2/dx_mu^2`, so it is positive on plane
//! waves.

use crate::{CMat, Scalar};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice needs at least one axis")]
    EmptyShape,
    #[error("axis {axis} has {len} sites, need at least 2")]
    AxisTooSmall { axis: usize, len: usize },
    #[error("lattice spacing must be positive and finite")]
    BadSpacing,
    #[error("axis {axis} has {len} sites; derivatives need at least 3")]
    AxisTooSmallForDerivatives { axis: usize, len: usize },
}

/// A periodic lattice with uniform spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice<T: Scalar> {
    shape: Vec<usize>,
    spacing: T,
}

impl<T: Scalar> Lattice<T> {
    pub fn new(shape: Vec<usize>, spacing: T) -> Result<Self, LatticeError> {
        if shape.is_empty() {
            return Err(LatticeError::EmptyShape);
        }
        for (axis, &len) in shape.iter().enumerate() {
            if len < 2 {
                return Err(LatticeError::AxisTooSmall { axis, len });
            }
        }
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(LatticeError::BadSpacing);
        }
        Ok(Lattice { shape, spacing })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }
    pub fn spacing(&self) -> T {
        self.spacing
    }
    pub fn dim(&self) -> usize {
        self.shape.len()
    }
    pub fn n_sites(&self) -> usize {
        self.shape.iter().product()
    }

    /// `spacing^dim`, the volume element of one site.
    pub fn volume_element(&self) -> T {
        let mut v = T::one();
        for _ in 0..self.dim() {
            v *= self.spacing;
        }
        v
    }

    /// Derivatives need three points per axis; validate before using them.
    pub fn check_derivative_ready(&self) -> Result<(), LatticeError> {
        for (axis, &len) in self.shape.iter().enumerate() {
            if len < 3 {
                return Err(LatticeError::AxisTooSmallForDerivatives { axis, len });
            }
        }
        Ok(())
    }

    /// Coordinates of a site index (row-major, first axis slowest).
    pub fn coords(&self, mut site: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            out[axis] = site % self.shape[axis];
            site /= self.shape[axis];
        }
        out
    }

    /// Site index of a coordinate vector.
    pub fn site(&self, coords: &[usize]) -> usize {
        let mut s = 0;
        for (axis, &c) in coords.iter().enumerate() {
            s = s * self.shape[axis] + c % self.shape[axis];
        }
        s
    }

    /// Neighbor of `site` along `axis`, `step` sites away with periodic
    /// wraparound.
    pub fn shift(&self, site: usize, axis: usize, step: isize) -> usize {
        let mut c = self.coords(site);
        let len = self.shape[axis] as isize;
        let pos = (c[axis] as isize + step).rem_euclid(len);
        c[axis] = pos as usize;
        self.site(&c)
    }

    /// Central first difference along `axis` of a matrix field.
    pub fn central_diff_mat(&self, f: &[CMat<T>], axis: usize) -> Vec<CMat<T>> {
        let half = num_complex::Complex::new(T::c(0.5) / self.spacing, T::zero());
        (0..self.n_sites())
            .map(|s| {
                (&f[self.shift(s, axis, 1)] - &f[self.shift(s, axis, -1)]) * half
            })
            .collect()
    }

    /// Central second difference along `axis` of a matrix field.
    pub fn second_diff_mat(&self, f: &[CMat<T>], axis: usize) -> Vec<CMat<T>> {
        let inv = num_complex::Complex::new(T::one() / (self.spacing * self.spacing), T::zero());
        let two = num_complex::Complex::new(T::c(2.0), T::zero());
        (0..self.n_sites())
            .map(|s| {
                (&f[self.shift(s, axis, 1)] + &f[self.shift(s, axis, -1)] - &f[s] * two) * inv
            })
            .collect()
    }

    /// `lap f = -sum_mu d^2 f / dx_mu^2`.
    pub fn laplacian_mat(&self, f: &[CMat<T>]) -> Vec<CMat<T>> {
        let mut out: Vec<CMat<T>> = f
            .iter()
            .map(|m| CMat::<T>::zeros(m.nrows(), m.ncols()))
            .collect();
        for axis in 0..self.dim() {
            for (o, d) in out.iter_mut().zip(self.second_diff_mat(f, axis)) {
                *o -= d;
            }
        }
        out
    }

    /// Central first difference along `axis` of a scalar field.
    pub fn central_diff_scalar(&self, f: &[T], axis: usize) -> Vec<T> {
        let half = T::c(0.5) / self.spacing;
        (0..self.n_sites())
            .map(|s| (f[self.shift(s, axis, 1)] - f[self.shift(s, axis, -1)]) * half)
            .collect()
    }

    /// Central second difference along `axis` of a scalar field.
    pub fn second_diff_scalar(&self, f: &[T], axis: usize) -> Vec<T> {
        let inv = T::one() / (self.spacing * self.spacing);
        (0..self.n_sites())
            .map(|s| {
                (f[self.shift(s, axis, 1)] + f[self.shift(s, axis, -1)]
                    - T::c(2.0) * f[s])
                    * inv
            })
            .collect()
    }

    /// `lap f = -sum_mu d^2 f / dx_mu^2` for scalar fields.
    pub fn laplacian_scalar(&self, f: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); f.len()];
        for axis in 0..self.dim() {
            for (o, d) in out.iter_mut().zip(self.second_diff_scalar(f, axis)) {
                *o -= d;
            }
        }
        out
    }
}

/// Compensated (Kahan) summation, order-sensitive by design: callers feed
/// values in site-lexicographic order so totals are reproducible.
pub fn kahan_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip_and_order() {
        let lat = Lattice::<f64>::new(vec![3, 4, 5], 0.5).unwrap();
        assert_eq!(lat.n_sites(), 60);
        for s in 0..lat.n_sites() {
            assert_eq!(lat.site(&lat.coords(s)), s);
        }
        // Row-major: last axis fastest.
        assert_eq!(lat.coords(0), vec![0, 0, 0]);
        assert_eq!(lat.coords(1), vec![0, 0, 1]);
        assert_eq!(lat.coords(5), vec![0, 1, 0]);
    }

    #[test]
    fn shift_wraps() {
        let lat = Lattice::<f64>::new(vec![4], 1.0).unwrap();
        assert_eq!(lat.shift(0, 0, -1), 3);
        assert_eq!(lat.shift(3, 0, 1), 0);
        assert_eq!(lat.shift(1, 0, 6), 3);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert_eq!(Lattice::<f64>::new(vec![], 1.0), Err(LatticeError::EmptyShape));
        assert!(matches!(
            Lattice::<f64>::new(vec![4, 1], 1.0),
            Err(LatticeError::AxisTooSmall { axis: 1, len: 1 })
        ));
        assert_eq!(
            Lattice::<f64>::new(vec![4], 0.0),
            Err(LatticeError::BadSpacing)
        );
        let two = Lattice::<f64>::new(vec![2, 2], 1.0).unwrap();
        assert!(two.check_derivative_ready().is_err());
    }

    #[test]
    fn central_diff_of_plane_wave_is_exact() {
        // For f_j = sin(theta j), the central difference equals
        // cos(theta j) sin(theta) / a exactly.
        let n = 8;
        let a = 0.3;
        let lat = Lattice::<f64>::new(vec![n], a).unwrap();
        let theta = 2.0 * std::f64::consts::PI / n as f64;
        let f: Vec<f64> = (0..n).map(|j| (theta * j as f64).sin()).collect();
        let df = lat.central_diff_scalar(&f, 0);
        for j in 0..n {
            let want = (theta * j as f64).cos() * theta.sin() / a;
            assert!((df[j] - want).abs() < 1e-13);
        }
    }

    #[test]
    fn laplacian_eigenvalue_on_plane_wave() {
        let n = 6;
        let a = 0.7;
        let lat = Lattice::<f64>::new(vec![n], a).unwrap();
        let theta = 2.0 * std::f64::consts::PI / n as f64;
        let f: Vec<f64> = (0..n).map(|j| (theta * j as f64).cos()).collect();
        let lap = lat.laplacian_scalar(&f);
        // Positive eigenvalue (2 - 2 cos theta) / a^2.
        let lam = (2.0 - 2.0 * theta.cos()) / (a * a);
        for j in 0..n {
            assert!((lap[j] - lam * f[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_and_scalar_diffs_agree() {
        use crate::matrix::c;
        let lat = Lattice::<f64>::new(vec![5], 0.4).unwrap();
        let f: Vec<f64> = (0..5).map(|j| (j as f64).sin()).collect();
        let fm: Vec<crate::CMat64> = f
            .iter()
            .map(|&x| crate::CMat64::from_element(1, 1, c(x, 0.0)))
            .collect();
        let ds = lat.central_diff_scalar(&f, 0);
        let dm = lat.central_diff_mat(&fm, 0);
        for j in 0..5 {
            assert!((dm[j][(0, 0)].re - ds[j]).abs() < 1e-14);
        }
        let ls = lat.laplacian_scalar(&f);
        let lm = lat.laplacian_mat(&fm);
        for j in 0..5 {
            assert!((lm[j][(0, 0)].re - ls[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn kahan_beats_naive() {
        let vals: Vec<f64> = (0..100_000).map(|_| 0.1).collect();
        let k = kahan_sum(vals.iter().copied());
        assert!((k - 10_000.0).abs() < 1e-9);
    }
}
