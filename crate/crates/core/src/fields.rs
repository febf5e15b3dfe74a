//! Lattice-sampled field configurations: a gauge field `B_mu(x)` valued in
//! the image of `tau`, a scalar endomorphism field `Phi(x)`, and
//! user-supplied gravity scalars, plus the cutoff-function moments.

use crate::lattice::Lattice;
use crate::matrix::{
    antiherm_residual, from_real_coords, herm_residual, max_abs, re_trace_inner, to_real_coords,
};
use crate::report::Report;
use crate::triple::FiniteTriple;
use crate::{CMat, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex;
use thiserror::Error;

/// Moments of the cutoff function: `f0 = f(0)`, `f2`, `f4`, and the
/// cutoff scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T: Scalar> {
    pub f0: T,
    pub f2: T,
    pub f4: T,
    pub lambda: T,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("moments must be finite with Lambda > 0")]
    BadMoments,
    #[error("field array has {got} entries for {want} sites")]
    SiteCount { got: usize, want: usize },
    #[error("gauge field at site {site} has {got} axis entries for {want} axes")]
    AxisCount { site: usize, got: usize, want: usize },
    #[error("matrix at site {site} is {got}x{got}, fibre has dimension {want}")]
    FibreDim { site: usize, got: usize, want: usize },
}

impl<T: Scalar> Moments<T> {
    pub fn new(f0: T, f2: T, f4: T, lambda: T) -> Result<Self, FieldError> {
        let all_finite =
            f0.is_finite() && f2.is_finite() && f4.is_finite() && lambda.is_finite();
        if !all_finite || !(lambda > T::zero()) {
            return Err(FieldError::BadMoments);
        }
        Ok(Moments { f0, f2, f4, lambda })
    }
}

/// A full field configuration on a lattice with fibre dimension `dim_h`.
#[derive(Debug, Clone)]
pub struct FieldConfig<T: Scalar> {
    pub lattice: Lattice<T>,
    /// `b[site][axis]`, anti-Hermitian, in the image of `tau`.
    pub b: Vec<Vec<CMat<T>>>,
    /// `phi[site]`, Hermitian, odd for the grading in the even case.
    pub phi: Vec<CMat<T>>,
    /// Scalar curvature samples.
    pub s: Vec<T>,
    /// Weyl tensor square samples.
    pub weyl_sq: Vec<T>,
    /// Euler density samples.
    pub euler: Vec<T>,
    pub dim_h: usize,
}

impl<T: Scalar> FieldConfig<T> {
    /// All-zero configuration.
    pub fn zero(lattice: Lattice<T>, dim_h: usize) -> Self {
        let n = lattice.n_sites();
        let d = lattice.dim();
        FieldConfig {
            lattice,
            b: vec![vec![CMat::<T>::zeros(dim_h, dim_h); d]; n],
            phi: vec![CMat::<T>::zeros(dim_h, dim_h); n],
            s: vec![T::zero(); n],
            weyl_sq: vec![T::zero(); n],
            euler: vec![T::zero(); n],
            dim_h,
        }
    }

    /// Constant fields everywhere.
    pub fn constant(
        lattice: Lattice<T>,
        b: Vec<CMat<T>>,
        phi: CMat<T>,
        s: T,
    ) -> Self {
        let n = lattice.n_sites();
        let dim_h = phi.nrows();
        FieldConfig {
            lattice,
            b: vec![b; n],
            phi: vec![phi; n],
            s: vec![s; n],
            weyl_sq: vec![T::zero(); n],
            euler: vec![T::zero(); n],
            dim_h,
        }
    }

    /// Structural shape validation (site counts, axis counts, fibre dims).
    pub fn check_shapes(&self) -> Result<(), FieldError> {
        let n = self.lattice.n_sites();
        let d = self.lattice.dim();
        for got in [
            self.b.len(),
            self.phi.len(),
            self.s.len(),
            self.weyl_sq.len(),
            self.euler.len(),
        ] {
            if got != n {
                return Err(FieldError::SiteCount { got, want: n });
            }
        }
        for (site, bx) in self.b.iter().enumerate() {
            if bx.len() != d {
                return Err(FieldError::AxisCount {
                    site,
                    got: bx.len(),
                    want: d,
                });
            }
            for m in bx {
                if m.nrows() != self.dim_h || m.ncols() != self.dim_h {
                    return Err(FieldError::FibreDim {
                        site,
                        got: m.nrows(),
                        want: self.dim_h,
                    });
                }
            }
        }
        for (site, m) in self.phi.iter().enumerate() {
            if m.nrows() != self.dim_h || m.ncols() != self.dim_h {
                return Err(FieldError::FibreDim {
                    site,
                    got: m.nrows(),
                    want: self.dim_h,
                });
            }
        }
        Ok(())
    }

    /// Validate the algebraic invariants against a triple: `B` anti-Hermitian
    /// and inside the image of `tau`, `Phi` Hermitian and grading-odd.
    pub fn validate(&self, t: &FiniteTriple<T>) -> Report {
        let tol = t.tolerance().to_f64().unwrap();
        let mut rep = Report::new(tol);
        if let Err(e) = self.check_shapes() {
            rep.push(format!("shapes ({e})"), f64::INFINITY);
            return rep;
        }
        rep.push("shapes", 0.0);

        let image = tau_image_basis(t);
        let mut worst_ah = T::zero();
        let mut worst_im = T::zero();
        for bx in &self.b {
            for m in bx {
                let r = antiherm_residual(m);
                if r > worst_ah {
                    worst_ah = r;
                }
                let r = project_residual(&image, m);
                if r > worst_im {
                    worst_im = r;
                }
            }
        }
        rep.push("b_antihermitian", worst_ah.to_f64().unwrap());
        rep.push("b_in_image_of_tau", worst_im.to_f64().unwrap());

        let mut worst_h = T::zero();
        let mut worst_odd = T::zero();
        for m in &self.phi {
            let r = herm_residual(m);
            if r > worst_h {
                worst_h = r;
            }
            if let Some(g) = t.gamma() {
                let r = max_abs(&(m * g + g * m));
                if r > worst_odd {
                    worst_odd = r;
                }
            }
        }
        rep.push("phi_hermitian", worst_h.to_f64().unwrap());
        if t.gamma().is_some() {
            rep.push("phi_grading_odd", worst_odd.to_f64().unwrap());
        }
        rep
    }
}

/// Orthonormal basis (for `Re Tr(x† y)`) of the image of `tau` on the
/// anti-Hermitian part of the algebra.
pub fn tau_image_basis<T: Scalar>(t: &FiniteTriple<T>) -> Vec<CMat<T>> {
    let basis = t.antihermitian_basis();
    let n = t.dim_h();
    if basis.is_empty() {
        return Vec::new();
    }
    let mut m = DMatrix::<T>::zeros(2 * n * n, basis.len());
    for (j, x) in basis.iter().enumerate() {
        let img = t.tau(x).expect("basis is anti-Hermitian");
        for (i, v) in to_real_coords(&img).into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    let svd = m.svd(true, false);
    let sv = &svd.singular_values;
    let smax = sv.iter().copied().fold(T::zero(), |a, b| if b > a { b } else { a });
    if smax == T::zero() {
        return Vec::new();
    }
    let cutoff = T::c(1e-8) * smax;
    let u = svd.u.expect("requested U");
    let mut out = Vec::new();
    for k in 0..sv.len() {
        if sv[k] > cutoff {
            let col: Vec<T> = (0..u.nrows()).map(|i| u[(i, k)]).collect();
            out.push(from_real_coords(&col, n, n));
        }
    }
    out
}

/// Largest entry of the part of `m` orthogonal to the span of `basis`.
pub fn project_residual<T: Scalar>(basis: &[CMat<T>], m: &CMat<T>) -> T {
    let mut rest = m.clone();
    for b in basis {
        let coef = Complex::new(re_trace_inner(b, m), T::zero());
        rest -= b * coef;
    }
    max_abs(&rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krajewski::{electrodynamics, yang_mills};
    use crate::matrix::c;
    use crate::triple::build_triple;
    use crate::CMat64;

    #[test]
    fn moments_validation() {
        assert!(Moments::new(1.0, 1.0, 1.0, 1.0).is_ok());
        assert_eq!(
            Moments::new(1.0, 1.0, 1.0, 0.0),
            Err(FieldError::BadMoments)
        );
        assert_eq!(
            Moments::new(f64::NAN, 1.0, 1.0, 1.0),
            Err(FieldError::BadMoments)
        );
    }

    #[test]
    fn ed_tau_image_is_one_dimensional() {
        let t = build_triple::<f64>(electrodynamics(), None).unwrap();
        let basis = tau_image_basis(&t);
        assert_eq!(basis.len(), 1);
        // The image direction is diag(i, i, -i, -i) normalized.
        let mut dir = CMat64::zeros(4, 4);
        for (k, sg) in [1.0, 1.0, -1.0, -1.0].iter().enumerate() {
            dir[(k, k)] = c(0.0, sg * 0.5);
        }
        assert!(project_residual(&basis, &dir) < 1e-12);
    }

    #[test]
    fn ym_tau_image_matches_gauge_dim() {
        let t = build_triple::<f64>(yang_mills(2), None).unwrap();
        assert_eq!(tau_image_basis(&t).len(), 3);
    }

    #[test]
    fn validate_flags_bad_b() {
        let t = build_triple::<f64>(electrodynamics(), None).unwrap();
        let lat = Lattice::new(vec![3], 1.0).unwrap();
        let mut cfg = FieldConfig::zero(lat, 4);
        // Anti-Hermitian but outside the image of tau.
        let mut m = CMat64::zeros(4, 4);
        m[(0, 0)] = c(0.0, 1.0);
        cfg.b[0][0] = m;
        let rep = cfg.validate(&t);
        assert!(rep.get("b_antihermitian").unwrap().pass);
        assert!(!rep.get("b_in_image_of_tau").unwrap().pass);
    }

    #[test]
    fn validate_accepts_tau_valued_b_and_odd_phi() {
        let t = build_triple::<f64>(electrodynamics(), None).unwrap();
        let lat = Lattice::new(vec![3], 1.0).unwrap();
        let mut cfg = FieldConfig::zero(lat, 4);
        let mut dir = CMat64::zeros(4, 4);
        for (k, sg) in [1.0, 1.0, -1.0, -1.0].iter().enumerate() {
            dir[(k, k)] = c(0.0, sg * 0.7);
        }
        for site in 0..3 {
            cfg.b[site][0] = dir.clone();
        }
        let z = c(0.0, 0.0);
        let d = c(0.0, -0.5);
        let phi = CMat64::from_row_slice(
            4,
            4,
            &[
                z, d, z, z, //
                d.conj(), z, z, z, //
                z, z, z, d.conj(), //
                z, z, d, z,
            ],
        );
        for site in 0..3 {
            cfg.phi[site] = phi.clone();
        }
        let rep = cfg.validate(&t);
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn shape_errors_detected() {
        let lat = Lattice::new(vec![3], 1.0).unwrap();
        let mut cfg = FieldConfig::<f64>::zero(lat, 2);
        cfg.phi.pop();
        assert!(matches!(cfg.check_shapes(), Err(FieldError::SiteCount { .. })));
    }
}
