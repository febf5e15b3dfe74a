//! The product Dirac operator of an almost-commutative manifold on a
//! periodic lattice:
//!
//! `D = -i sum_mu gamma^mu (x) (d_mu + B_mu(x)) + gamma5 (x) Phi(x)`
//!
//! on the Hilbert space `sites (x) spinors (x) fibre`, together with its
//! real structure `J = (1 (x) C (x) U_F) ∘ conj`, grading
//! `1 (x) gamma5 (x) gamma_F`, KO-sign verification, spectrum, the
//! spectral-action trace, and the fermionic bilinear form.
//!
//! Basis index: `(site * spinor_dim + spinor) * dim_h + fibre`, with the
//! site index in lattice lexicographic order. Naive central-difference
//! fermions; the doubling artifact is accepted and documented.

use crate::clifford::CliffordData;
use crate::fields::FieldConfig;
use crate::ko::{KOError, KOSignature};
use crate::lattice::Lattice;
use crate::matrix::{
    c, conj, herm_residual, hermitian_eigenvalues, j_conj, max_abs, unitary_residual,
};
use crate::report::Report;
use crate::triple::FiniteTriple;
use crate::{CMat, CVec, Scalar};
use num_complex::Complex;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProductError {
    #[error("field config has fibre dimension {got}, triple has {want}")]
    FibreMismatch { got: usize, want: usize },
    #[error("field config lattice does not match the supplied lattice")]
    LatticeMismatch,
    #[error("clifford dimension {clifford} does not match lattice dimension {lattice}")]
    DimensionMismatch { clifford: usize, lattice: usize },
    #[error("the finite triple must be even (graded) to form a product")]
    OddTriple,
    #[error("KO verification needs spacetime dimension 4, got {0}")]
    NotFourDimensional(usize),
    #[error("vector has length {got}, operator dimension is {want}")]
    VectorLength { got: usize, want: usize },
    #[error("vector is not even (gamma v != v), residual {0}")]
    NotEven(f64),
    #[error(transparent)]
    KO(#[from] KOError),
}

/// Assembled product operator.
#[derive(Debug, Clone)]
pub struct ProductOperator<T: Scalar> {
    pub total_dim: usize,
    pub spinor_dim: usize,
    pub dim_h: usize,
    pub n_sites: usize,
    pub dimension: usize,
    pub d_total: CMat<T>,
    /// Unitary part of `J_total = U ∘ conj`.
    pub j_matrix: CMat<T>,
    /// Present when the spacetime dimension is even.
    pub gamma_total: Option<CMat<T>>,
    pub finite_ko: KOSignature,
}

/// Assemble the product operator from a lattice, a Clifford basis, a field
/// configuration and an even finite triple.
pub fn build_product<T: Scalar>(
    lattice: &Lattice<T>,
    clifford: &CliffordData<T>,
    cfg: &FieldConfig<T>,
    t: &FiniteTriple<T>,
) -> Result<ProductOperator<T>, ProductError> {
    if cfg.dim_h != t.dim_h() {
        return Err(ProductError::FibreMismatch {
            got: cfg.dim_h,
            want: t.dim_h(),
        });
    }
    if cfg.lattice != *lattice {
        return Err(ProductError::LatticeMismatch);
    }
    if clifford.dimension != lattice.dim() {
        return Err(ProductError::DimensionMismatch {
            clifford: clifford.dimension,
            lattice: lattice.dim(),
        });
    }
    let gamma_f = t.gamma().ok_or(ProductError::OddTriple)?;
    let g5 = clifford
        .chirality
        .clone()
        .unwrap_or_else(|| CMat::<T>::identity(clifford.spinor_dim, clifford.spinor_dim));

    let n_sites = lattice.n_sites();
    let sp = clifford.spinor_dim;
    let nh = t.dim_h();
    let total = n_sites * sp * nh;
    let idx = |site: usize, spinor: usize, fibre: usize| (site * sp + spinor) * nh + fibre;

    let mut d = CMat::<T>::zeros(total, total);
    let half = T::c(0.5) / lattice.spacing();
    let minus_i = c(T::zero(), -T::one());
    for site in 0..n_sites {
        for mu in 0..lattice.dim() {
            let fwd = lattice.shift(site, mu, 1);
            let bwd = lattice.shift(site, mu, -1);
            let g = &clifford.gammas[mu];
            // -i gamma^mu (x) d_mu: hopping terms.
            for a in 0..sp {
                for b in 0..sp {
                    let gab = g[(a, b)];
                    if gab == c(T::zero(), T::zero()) {
                        continue;
                    }
                    let hop = minus_i * gab * c(half, T::zero());
                    for f in 0..nh {
                        d[(idx(site, a, f), idx(fwd, b, f))] += hop;
                        d[(idx(site, a, f), idx(bwd, b, f))] -= hop;
                    }
                }
            }
            // -i gamma^mu (x) B_mu(x): on-site.
            let b_mu = &cfg.b[site][mu];
            for a in 0..sp {
                for bsp in 0..sp {
                    let gab = g[(a, bsp)];
                    if gab == c(T::zero(), T::zero()) {
                        continue;
                    }
                    let w = minus_i * gab;
                    for f1 in 0..nh {
                        for f2 in 0..nh {
                            let z = b_mu[(f1, f2)];
                            if z != c(T::zero(), T::zero()) {
                                d[(idx(site, a, f1), idx(site, bsp, f2))] += w * z;
                            }
                        }
                    }
                }
            }
        }
        // gamma5 (x) Phi(x): on-site.
        let phi = &cfg.phi[site];
        for a in 0..sp {
            for b in 0..sp {
                let g5ab = g5[(a, b)];
                if g5ab == c(T::zero(), T::zero()) {
                    continue;
                }
                for f1 in 0..nh {
                    for f2 in 0..nh {
                        let z = phi[(f1, f2)];
                        if z != c(T::zero(), T::zero()) {
                            d[(idx(site, a, f1), idx(site, b, f2))] += g5ab * z;
                        }
                    }
                }
            }
        }
    }

    // J = (1 (x) C (x) U_F) ∘ conj and, for even spacetime dimension,
    // gamma = 1 (x) gamma5 (x) gamma_F.
    let u_f = t.j_matrix();
    let mut j = CMat::<T>::zeros(total, total);
    let mut gamma = clifford
        .chirality
        .as_ref()
        .map(|_| CMat::<T>::zeros(total, total));
    for site in 0..n_sites {
        for a in 0..sp {
            for b in 0..sp {
                let cab = clifford.c_matrix[(a, b)];
                if cab != c(T::zero(), T::zero()) {
                    for f1 in 0..nh {
                        for f2 in 0..nh {
                            let z = u_f[(f1, f2)];
                            if z != c(T::zero(), T::zero()) {
                                j[(idx(site, a, f1), idx(site, b, f2))] = cab * z;
                            }
                        }
                    }
                }
                if let Some(gm) = gamma.as_mut() {
                    let g5ab = g5[(a, b)];
                    if g5ab != c(T::zero(), T::zero()) {
                        for f1 in 0..nh {
                            for f2 in 0..nh {
                                let z = gamma_f[(f1, f2)];
                                if z != c(T::zero(), T::zero()) {
                                    gm[(idx(site, a, f1), idx(site, b, f2))] = g5ab * z;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(ProductOperator {
        total_dim: total,
        spinor_dim: sp,
        dim_h: nh,
        n_sites,
        dimension: lattice.dim(),
        d_total: d,
        j_matrix: j,
        gamma_total: gamma,
        finite_ko: t.data().ko,
    })
}

impl<T: Scalar> ProductOperator<T> {
    /// Structural checks: Hermiticity, grading square, anticommutation.
    pub fn verify_structure(&self) -> Report {
        let mut rep = Report::new(1e-12);
        let res = |x: T| x.to_f64().unwrap();
        rep.push("d_hermitian", res(herm_residual(&self.d_total)));
        if let Some(g) = &self.gamma_total {
            let id = CMat::<T>::identity(self.total_dim, self.total_dim);
            rep.push("gamma_squared", res(max_abs(&(g * g - id))));
            rep.push(
                "gamma_anticommutes_d",
                res(max_abs(&(&self.d_total * g + g * &self.d_total))),
            );
        }
        rep.push("j_unitary", res(unitary_residual(&self.j_matrix)));
        rep
    }

    /// Sorted eigenvalues of `D_total`.
    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.d_total)
    }

    /// `sum_k f(lambda_k / Lambda)` over the spectrum.
    pub fn spectral_action_trace(&self, f: impl Fn(T) -> T, lambda: T) -> T {
        crate::lattice::kahan_sum(self.eigenvalues().into_iter().map(|ev| f(ev / lambda)))
    }

    /// Verify the product KO row for d = 4: `J^2 = -eps_finite`,
    /// `J D = D J`, `J gamma = eps''_finite gamma J`; returns the matched
    /// signature `(4 + k) mod 8` alongside the residual report.
    pub fn verify_ko(&self) -> Result<(Report, KOSignature), ProductError> {
        if self.dimension != 4 {
            return Err(ProductError::NotFourDimensional(self.dimension));
        }
        let expected = self.finite_ko.product_with_4d()?;
        let mut rep = Report::new(1e-12);
        let res = |x: T| x.to_f64().unwrap();
        let id = CMat::<T>::identity(self.total_dim, self.total_dim);
        let u = &self.j_matrix;
        rep.push(
            "j_squared_sign",
            res(max_abs(
                &(u * conj(u) - id * c(T::from_i8(expected.eps).unwrap(), T::zero())),
            )),
        );
        rep.push(
            "j_commutes_d",
            res(max_abs(&(j_conj(u, &self.d_total) - &self.d_total))),
        );
        let epp = T::from_i8(expected.eps_double_prime.expect("even product")).unwrap();
        let g = self.gamma_total.as_ref().expect("d = 4 has a grading");
        rep.push(
            "j_gamma_sign",
            res(max_abs(&(u * conj(g) - g * u * c(epp, T::zero())))),
        );
        Ok((rep, expected))
    }

    /// Fermionic bilinear form `<J xi, D xi'>`, conjugate-linear in the
    /// first slot. Both vectors must be even (`gamma v = v`).
    pub fn fermionic_form(
        &self,
        xi: &CVec<T>,
        xi_prime: &CVec<T>,
    ) -> Result<Complex<T>, ProductError> {
        for v in [xi, xi_prime] {
            if v.len() != self.total_dim {
                return Err(ProductError::VectorLength {
                    got: v.len(),
                    want: self.total_dim,
                });
            }
            if let Some(g) = &self.gamma_total {
                let r = max_abs_vec(&(g * v - v));
                if r > T::c(1e-10) {
                    return Err(ProductError::NotEven(r.to_f64().unwrap()));
                }
            }
        }
        let j_xi = &self.j_matrix * xi.map(|z| z.conj());
        let d_xi = &self.d_total * xi_prime;
        Ok(j_xi.dotc(&d_xi))
    }

    /// Projection onto the even subspace, for building test vectors; the
    /// identity when there is no grading.
    pub fn project_even(&self, v: &CVec<T>) -> CVec<T> {
        match &self.gamma_total {
            Some(g) => (g * v + v) * c(T::c(0.5), T::zero()),
            None => v.clone(),
        }
    }
}

fn max_abs_vec<T: Scalar>(v: &CVec<T>) -> T {
    use nalgebra::ComplexField;
    v.iter()
        .map(|z| z.modulus())
        .fold(T::zero(), |a, b| if b > a { b } else { a })
}

/// Spectrum oracle for translation-invariant configurations: the union
/// over lattice momenta `k` of the eigenvalues of
/// `sum_mu gamma^mu (x) (s_mu - i B_mu) + gamma5 (x) Phi` with
/// `s_mu = sin(2 pi k_mu / n_mu) / a`.
pub fn fourier_block_spectrum<T: Scalar>(
    lattice: &Lattice<T>,
    clifford: &CliffordData<T>,
    b: &[CMat<T>],
    phi: &CMat<T>,
) -> Vec<T> {
    let sp = clifford.spinor_dim;
    let nh = phi.nrows();
    let g5 = clifford
        .chirality
        .clone()
        .unwrap_or_else(|| CMat::<T>::identity(sp, sp));
    let mut out = Vec::with_capacity(lattice.n_sites() * sp * nh);
    let two_pi = T::c(2.0 * std::f64::consts::PI);
    for site in 0..lattice.n_sites() {
        let k = lattice.coords(site);
        let mut block = CMat::<T>::zeros(sp * nh, sp * nh);
        for mu in 0..lattice.dim() {
            let s_mu = (two_pi * T::from_usize(k[mu]).unwrap()
                / T::from_usize(lattice.shape()[mu]).unwrap())
            .sin()
                / lattice.spacing();
            let inner = CMat::<T>::identity(nh, nh) * c(s_mu, T::zero())
                + &b[mu] * c(T::zero(), -T::one());
            kron_add(&mut block, &clifford.gammas[mu], &inner);
        }
        kron_add(&mut block, &g5, phi);
        out.extend(hermitian_eigenvalues(&block));
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN eigenvalue"));
    out
}

fn kron_add<T: Scalar>(target: &mut CMat<T>, a: &CMat<T>, b: &CMat<T>) {
    let (n, m) = (a.nrows(), b.nrows());
    for i in 0..n {
        for j in 0..n {
            let aij = a[(i, j)];
            if aij == c(T::zero(), T::zero()) {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    target[(i * m + k, j * m + l)] += aij * b[(k, l)];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::standard;
    use crate::krajewski::{electrodynamics, yang_mills};
    use crate::triple::build_triple;
    use crate::CMat64;

    fn cf(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn ed_phi(mass: f64) -> CMat64 {
        let z = cf(0.0, 0.0);
        let d = cf(0.0, -mass);
        CMat64::from_row_slice(
            4,
            4,
            &[
                z, d, z, z, //
                d.conj(), z, z, z, //
                z, z, z, d.conj(), //
                z, z, d, z,
            ],
        )
    }

    fn trivial_even_triple() -> crate::FiniteTriple<f64> {
        build_triple(
            crate::KrajewskiData {
                dims: vec![1],
                pairs: vec![(0, 0)],
                ko: KOSignature::from_dimension(0).unwrap(),
                grading: vec![1],
            },
            None,
        )
        .unwrap()
    }

    #[test]
    fn free_1d_spectrum_matches_fourier() {
        let n = 8;
        let a = 0.5;
        let lat = Lattice::new(vec![n], a).unwrap();
        let cl = standard::<f64>(1).unwrap();
        let t = trivial_even_triple();
        let cfg = FieldConfig::zero(lat.clone(), 1);
        let p = build_product(&lat, &cl, &cfg, &t).unwrap();
        assert!(p.verify_structure().passed());
        let got = p.eigenvalues();
        let mut want: Vec<f64> = (0..n)
            .map(|k| (2.0 * std::f64::consts::PI * k as f64 / n as f64).sin() / a)
            .collect();
        want.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10, "{g} vs {w}");
        }
    }

    #[test]
    fn ed_massive_spectrum_matches_fourier_blocks() {
        let lat = Lattice::new(vec![3, 3], 0.7).unwrap();
        let cl = standard::<f64>(2).unwrap();
        let t = build_triple(electrodynamics(), Some(ed_phi(0.5))).unwrap();
        let mass = 0.5;
        let cfg = FieldConfig::constant(
            lat.clone(),
            vec![CMat64::zeros(4, 4); 2],
            ed_phi(mass),
            0.0,
        );
        let p = build_product(&lat, &cl, &cfg, &t).unwrap();
        assert!(p.verify_structure().passed());
        let got = p.eigenvalues();
        let want = fourier_block_spectrum(&lat, &cl, &cfg.b[0], &cfg.phi[0]);
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-9, "{g} vs {w}");
        }
        // +/- sqrt(s^2 + m^2) structure: minimum |eigenvalue| is m.
        let min_abs = got.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        assert!((min_abs - mass).abs() < 1e-9);
    }

    #[test]
    fn eigenvalues_pair_up_under_grading() {
        let lat = Lattice::new(vec![3], 0.5).unwrap();
        let cl = standard::<f64>(1).unwrap();
        let t = build_triple(electrodynamics(), Some(ed_phi(0.3))).unwrap();
        let cfg = FieldConfig::constant(lat.clone(), vec![CMat64::zeros(4, 4)], ed_phi(0.3), 0.0);
        let p = build_product(&lat, &cl, &cfg, &t).unwrap();
        let ev = p.eigenvalues();
        let n = ev.len();
        for k in 0..n / 2 {
            assert!((ev[k] + ev[n - 1 - k]).abs() < 1e-9);
        }
    }

    #[test]
    fn product_ko_rows() {
        let lat = Lattice::new(vec![2, 2, 2, 2], 1.0).unwrap();
        let cl = standard::<f64>(4).unwrap();
        for (data, want_n) in [
            (yang_mills(2), 4u8),
            (electrodynamics(), 2u8),
        ] {
            let nh = data.dim_h();
            let t = build_triple::<f64>(data, None).unwrap();
            let cfg = FieldConfig::zero(lat.clone(), nh);
            let p = build_product(&lat, &cl, &cfg, &t).unwrap();
            let (rep, ko) = p.verify_ko().unwrap();
            assert!(rep.passed(), "{rep:?}");
            assert_eq!(ko.n, want_n);
        }
    }

    #[test]
    fn spectral_action_trace_basics() {
        let lat = Lattice::new(vec![3], 1.0).unwrap();
        let cl = standard::<f64>(1).unwrap();
        let t = trivial_even_triple();
        let cfg = FieldConfig::zero(lat.clone(), 1);
        let p = build_product(&lat, &cl, &cfg, &t).unwrap();
        // Gaussian f on the free operator matches the closed form.
        let lam = 2.0;
        let f = |x: f64| (-x * x).exp();
        let got = p.spectral_action_trace(f, lam);
        let want: f64 = (0..3)
            .map(|k| {
                let ev = (2.0 * std::f64::consts::PI * k as f64 / 3.0).sin();
                f(ev / lam)
            })
            .sum();
        assert!((got - want).abs() < 1e-12);
        // D = 0 gives dim * f(0).
        let mut p0 = p.clone();
        p0.d_total = CMat64::zeros(p.total_dim, p.total_dim);
        assert!((p0.spectral_action_trace(f, lam) - p.total_dim as f64).abs() < 1e-12);
    }

    #[test]
    fn fermionic_form_antisymmetric_in_ko_2() {
        let lat = Lattice::new(vec![2, 2, 2, 2], 0.8).unwrap();
        let cl = standard::<f64>(4).unwrap();
        let t = build_triple(electrodynamics(), Some(ed_phi(0.4))).unwrap();
        let cfg = FieldConfig::constant(
            lat.clone(),
            vec![CMat64::zeros(4, 4); 4],
            ed_phi(0.4),
            0.0,
        );
        let p = build_product(&lat, &cl, &cfg, &t).unwrap();
        let n = p.total_dim;
        // Deterministic pseudo-random even vectors.
        let mk = |seed: u64| {
            let mut state = seed;
            let mut next = move || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
            };
            let v = CVec::<f64>::from_iterator(n, (0..n).map(|_| cf(next(), next())));
            p.project_even(&v)
        };
        let xi = mk(7);
        let xi2 = mk(99);
        let b12 = p.fermionic_form(&xi, &xi2).unwrap();
        let b21 = p.fermionic_form(&xi2, &xi).unwrap();
        assert!((b12 + b21).norm() < 1e-10, "{b12} vs {b21}");
        let diag = p.fermionic_form(&xi, &xi).unwrap();
        assert!(diag.norm() < 1e-10);
    }

    #[test]
    fn odd_vector_rejected() {
        let lat = Lattice::new(vec![2, 2, 2, 2], 1.0).unwrap();
        let cl = standard::<f64>(4).unwrap();
        let t = build_triple::<f64>(electrodynamics(), None).unwrap();
        let cfg = FieldConfig::zero(lat.clone(), 4);
        let p = build_product(&lat, &cl, &cfg, &t).unwrap();
        let odd = odd_vector(&p);
        assert!(matches!(
            p.fermionic_form(&odd, &odd),
            Err(ProductError::NotEven(_))
        ));
    }

    fn odd_vector(p: &ProductOperator<f64>) -> CVec<f64> {
        // gamma has +1 and -1 eigenvectors among the basis vectors; pick a
        // -1 direction.
        let g = p.gamma_total.as_ref().unwrap();
        for k in 0..p.total_dim {
            if (g[(k, k)].re + 1.0).abs() < 1e-12 {
                let mut v = CVec::<f64>::zeros(p.total_dim);
                v[k] = cf(1.0, 0.0);
                return v;
            }
        }
        panic!("no odd basis direction");
    }

    #[test]
    fn dimension_mismatches_rejected() {
        let lat = Lattice::new(vec![4], 1.0).unwrap();
        let cl = standard::<f64>(2).unwrap();
        let t = trivial_even_triple();
        let cfg = FieldConfig::zero(lat.clone(), 1);
        assert!(matches!(
            build_product(&lat, &cl, &cfg, &t),
            Err(ProductError::DimensionMismatch { .. })
        ));
    }
}
