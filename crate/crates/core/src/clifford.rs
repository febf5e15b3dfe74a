//! Euclidean gamma-matrix data for d = 1, 2, 4.
//!
//! The bases are pinned once so spectra and sign checks are reproducible:
//!
//! - d = 1: `gamma = (1)`, `C = (1)`, `J_M = conj`;
//! - d = 2: `gamma^1 = sigma_1`, `gamma^2 = sigma_2`, chirality
//!   `sigma_3`, `C = -i sigma_2`;
//! - d = 4 (chiral basis): `gamma^0 = [[0, 1], [1, 0]]` in 2x2 blocks,
//!   `gamma^k = [[0, i sigma_k], [-i sigma_k, 0]]`, chirality
//!   `gamma5 = diag(1, 1, -1, -1)`, `C = gamma^0 gamma^2 =
//!   diag(-i sigma_2, i sigma_2)` (real, `C^2 = -1`).

use crate::matrix::{anticomm, c, conj, czero, herm_residual, max_abs, unitary_residual};
use crate::report::Report;
use crate::{CMat, Scalar};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliffordError {
    #[error("supported dimensions are 1, 2, 4; got {0}")]
    UnsupportedDimension(usize),
}

/// Gamma matrices, chirality and charge conjugation for one Euclidean
/// dimension.
#[derive(Debug, Clone)]
pub struct CliffordData<T: Scalar> {
    pub dimension: usize,
    pub spinor_dim: usize,
    pub gammas: Vec<CMat<T>>,
    /// Present for even `dimension`.
    pub chirality: Option<CMat<T>>,
    /// `J_M = C ∘ conj`.
    pub c_matrix: CMat<T>,
}

fn pauli<T: Scalar>(k: usize) -> CMat<T> {
    let o = T::one();
    let z = T::zero();
    match k {
        1 => CMat::<T>::from_row_slice(2, 2, &[czero(), c(o, z), c(o, z), czero()]),
        2 => CMat::<T>::from_row_slice(2, 2, &[czero(), c(z, -o), c(z, o), czero()]),
        3 => CMat::<T>::from_row_slice(2, 2, &[c(o, z), czero(), czero(), c(-o, z)]),
        _ => unreachable!(),
    }
}

/// The pinned standard basis for dimension `d`.
pub fn standard<T: Scalar>(d: usize) -> Result<CliffordData<T>, CliffordError> {
    let o = T::one();
    let z = T::zero();
    match d {
        1 => Ok(CliffordData {
            dimension: 1,
            spinor_dim: 1,
            gammas: vec![CMat::<T>::from_element(1, 1, c(o, z))],
            chirality: None,
            c_matrix: CMat::<T>::from_element(1, 1, c(o, z)),
        }),
        2 => Ok(CliffordData {
            dimension: 2,
            spinor_dim: 2,
            gammas: vec![pauli(1), pauli(2)],
            chirality: Some(pauli(3)),
            // -i sigma_2, real with square -1.
            c_matrix: CMat::<T>::from_row_slice(
                2,
                2,
                &[czero(), c(-o, z), c(o, z), czero()],
            ),
        }),
        4 => {
            let mut gammas = Vec::with_capacity(4);
            let mut g0 = CMat::<T>::zeros(4, 4);
            for k in 0..2 {
                g0[(k, k + 2)] = c(o, z);
                g0[(k + 2, k)] = c(o, z);
            }
            gammas.push(g0.clone());
            for k in 1..=3 {
                let s = pauli::<T>(k);
                let mut g = CMat::<T>::zeros(4, 4);
                for r in 0..2 {
                    for cc in 0..2 {
                        let i_s = c(z, o) * s[(r, cc)];
                        g[(r, cc + 2)] = i_s;
                        g[(r + 2, cc)] = -i_s;
                    }
                }
                gammas.push(g);
            }
            let mut g5 = CMat::<T>::zeros(4, 4);
            for (k, sg) in [o, o, -o, -o].into_iter().enumerate() {
                g5[(k, k)] = c(sg, z);
            }
            let c_matrix = &gammas[0] * &gammas[2];
            Ok(CliffordData {
                dimension: 4,
                spinor_dim: 4,
                gammas,
                chirality: Some(g5),
                c_matrix,
            })
        }
        _ => Err(CliffordError::UnsupportedDimension(d)),
    }
}

impl<T: Scalar> CliffordData<T> {
    /// Check the algebraic invariants of the data.
    pub fn verify(&self) -> Report {
        let mut rep = Report::new(1e-14);
        let n = self.spinor_dim;
        let id = CMat::<T>::identity(n, n);
        let res = |x: T| x.to_f64().unwrap();

        let mut worst_anti = T::zero();
        for (mu, g_mu) in self.gammas.iter().enumerate() {
            let r = res(herm_residual(g_mu));
            rep.push(format!("gamma{mu}_hermitian"), r);
            rep.push(format!("gamma{mu}_unitary"), res(unitary_residual(g_mu)));
            for (nu, g_nu) in self.gammas.iter().enumerate() {
                let target = if mu == nu {
                    &id * c(T::c(2.0), T::zero())
                } else {
                    CMat::<T>::zeros(n, n)
                };
                let r = max_abs(&(anticomm(g_mu, g_nu) - target));
                if r > worst_anti {
                    worst_anti = r;
                }
            }
        }
        rep.push("anticommutation", res(worst_anti));

        if let Some(g5) = &self.chirality {
            rep.push("chirality_hermitian", res(herm_residual(g5)));
            rep.push("chirality_squared", res(max_abs(&(g5 * g5 - &id))));
            let mut worst = T::zero();
            for g in &self.gammas {
                let r = max_abs(&anticomm(g5, g));
                if r > worst {
                    worst = r;
                }
            }
            rep.push("chirality_anticommutes", res(worst));
            // Product of all gammas reproduces the chirality up to the
            // pinned phase: d=2 has g5 = -i g1 g2, d=4 has g5 = g0 g1 g2 g3.
            let mut prod = id.clone();
            for g in &self.gammas {
                prod = &prod * g;
            }
            let phase = match self.dimension {
                2 => c(T::zero(), -T::one()),
                _ => c(T::one(), T::zero()),
            };
            rep.push(
                "chirality_is_gamma_product",
                res(max_abs(&(prod * phase - g5))),
            );
        }

        rep.push("c_unitary", res(unitary_residual(&self.c_matrix)));
        // (C ∘ conj)^2 = C conj(C): +1 for d=1, -1 for d=2,4.
        let sq = &self.c_matrix * conj(&self.c_matrix);
        let eps = if self.dimension == 1 { T::one() } else { -T::one() };
        rep.push(
            "j_m_squared",
            res(max_abs(&(sq - &id * c(eps, T::zero())))),
        );
        if let Some(g5) = &self.chirality {
            // J_M gamma5 = eps'' gamma5 J_M: +1 for d=4, -1 for d=2.
            let epp = if self.dimension == 4 { T::one() } else { -T::one() };
            rep.push(
                "j_m_chirality",
                res(max_abs(
                    &(&self.c_matrix * conj(g5) - g5 * &self.c_matrix * c(epp, T::zero())),
                )),
            );
        }
        rep
    }
}
