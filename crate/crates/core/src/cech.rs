//! Cech-level principal-bundle data on sampled overlaps: cocycle
//! verification, atlas equivalence, quotient cocycles under the
//! gauge-group projection, lift verification and connection-form
//! compatibility.
//!
//! Overlaps are finite sets of sample points; each sample refers to a
//! global point index so per-patch fields (twists, connection forms) can
//! be evaluated consistently across overlaps. Derivatives are supplied
//! data, produced upstream analytically or by finite differences.

use crate::matrix::{max_abs, unitary_residual};
use crate::report::Report;
use crate::triple::{AlgebraElement, FiniteTriple, TripleError};
use crate::{CMat, Scalar};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CechError {
    #[error("triple overlap ({i}, {j}, {k}) has no samples")]
    MissingSamples { i: usize, j: usize, k: usize },
    #[error("atlases have different nerves or sample layouts")]
    NerveMismatch,
    #[error("overlap ({i}, {j}) sample {sample} lacks derivatives or connection forms")]
    MissingConnectionData { i: usize, j: usize, sample: usize },
    #[error("twist data does not cover patch {patch} point {point}")]
    TwistShape { patch: usize, point: usize },
    #[error(transparent)]
    Triple(#[from] TripleError),
}

/// One sampled point of an overlap.
#[derive(Debug, Clone)]
pub struct CechSample<T: Scalar> {
    /// Global sample-point index.
    pub point: usize,
    /// Transition element `g_ij` at the point.
    pub g: CMat<T>,
    /// Optional derivatives `dg_ij`, one matrix per coordinate direction.
    pub dg: Option<Vec<CMat<T>>>,
    /// Optional connection form `omega_i` of the left patch, per direction.
    pub omega_i: Option<Vec<CMat<T>>>,
    /// Optional connection form `omega_j` of the right patch, per direction.
    pub omega_j: Option<Vec<CMat<T>>>,
}

impl<T: Scalar> CechSample<T> {
    pub fn plain(point: usize, g: CMat<T>) -> Self {
        CechSample {
            point,
            g,
            dg: None,
            omega_i: None,
            omega_j: None,
        }
    }
}

/// Samples of one pairwise overlap `(i, j)`.
#[derive(Debug, Clone)]
pub struct Overlap<T: Scalar> {
    pub i: usize,
    pub j: usize,
    pub samples: Vec<CechSample<T>>,
}

/// Samples of one triple overlap `(i, j, k)`: each point carries the three
/// elements `(g_ij, g_jk, g_ki)`.
#[derive(Debug, Clone)]
pub struct TripleOverlap<T: Scalar> {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub samples: Vec<(usize, CMat<T>, CMat<T>, CMat<T>)>,
}

/// A sampled atlas with matrix-valued transition elements.
#[derive(Debug, Clone)]
pub struct CechAtlas<T: Scalar> {
    pub n_patches: usize,
    pub overlaps: Vec<Overlap<T>>,
    pub triples: Vec<TripleOverlap<T>>,
}

impl<T: Scalar> CechAtlas<T> {
    /// Structural validation: unitarity of every sample and the inversion
    /// symmetry `g_ji = g_ij^{-1}` wherever both orientations are stored.
    pub fn validate(&self, tol: f64) -> Report {
        let mut rep = Report::new(tol);
        let mut worst_u = 0.0f64;
        for ov in &self.overlaps {
            for s in &ov.samples {
                let r = unitary_residual(&s.g).to_f64().unwrap();
                if r > worst_u {
                    worst_u = r;
                }
            }
        }
        rep.push("samples_unitary", worst_u);

        let mut worst_inv = 0.0f64;
        for ov in &self.overlaps {
            if let Some(rev) = self
                .overlaps
                .iter()
                .find(|o| o.i == ov.j && o.j == ov.i)
            {
                for s in &ov.samples {
                    if let Some(sr) = rev.samples.iter().find(|x| x.point == s.point) {
                        let r = max_abs(&(&s.g * &sr.g
                            - CMat::<T>::identity(s.g.nrows(), s.g.nrows())))
                        .to_f64()
                        .unwrap();
                        if r > worst_inv {
                            worst_inv = r;
                        }
                    }
                }
            }
        }
        rep.push("inversion_symmetry", worst_inv);
        rep
    }

    /// Max residual of `g_ij g_jk g_ki = 1` over all triple-overlap
    /// samples.
    pub fn verify_cocycle(&self, tol: f64) -> Result<Report, CechError> {
        let mut rep = Report::new(tol);
        for t in &self.triples {
            if t.samples.is_empty() {
                return Err(CechError::MissingSamples {
                    i: t.i,
                    j: t.j,
                    k: t.k,
                });
            }
            let mut worst = 0.0f64;
            for (_, gij, gjk, gki) in &t.samples {
                let n = gij.nrows();
                let r = max_abs(&(gij * gjk * gki - CMat::<T>::identity(n, n)))
                    .to_f64()
                    .unwrap();
                if r > worst {
                    worst = r;
                }
            }
            rep.push(format!("cocycle_{}_{}_{}", t.i, t.j, t.k), worst);
        }
        Ok(rep)
    }

    /// Apply a per-patch twist `g_ij ↦ g_i^{-1} g_ij g_j`.
    /// `twist[patch][point]` must cover every sampled point. Derivative
    /// and connection data are dropped (they transform nontrivially).
    pub fn twist(&self, twist: &[Vec<CMat<T>>]) -> Result<CechAtlas<T>, CechError> {
        let get = |patch: usize, point: usize| -> Result<&CMat<T>, CechError> {
            twist
                .get(patch)
                .and_then(|v| v.get(point))
                .ok_or(CechError::TwistShape { patch, point })
        };
        let mut overlaps = Vec::with_capacity(self.overlaps.len());
        for ov in &self.overlaps {
            let mut samples = Vec::with_capacity(ov.samples.len());
            for s in &ov.samples {
                let gi = get(ov.i, s.point)?;
                let gj = get(ov.j, s.point)?;
                samples.push(CechSample::plain(s.point, gi.adjoint() * &s.g * gj));
            }
            overlaps.push(Overlap {
                i: ov.i,
                j: ov.j,
                samples,
            });
        }
        let mut triples = Vec::with_capacity(self.triples.len());
        for t in &self.triples {
            let mut samples = Vec::with_capacity(t.samples.len());
            for (pt, gij, gjk, gki) in &t.samples {
                let gi = get(t.i, *pt)?;
                let gj = get(t.j, *pt)?;
                let gk = get(t.k, *pt)?;
                samples.push((
                    *pt,
                    gi.adjoint() * gij * gj,
                    gj.adjoint() * gjk * gk,
                    gk.adjoint() * gki * gi,
                ));
            }
            triples.push(TripleOverlap {
                i: t.i,
                j: t.j,
                k: t.k,
                samples,
            });
        }
        Ok(CechAtlas {
            n_patches: self.n_patches,
            overlaps,
            triples,
        })
    }

    /// Residual of the connection transformation law
    /// `omega_j = g^{-1} dg + g^{-1} omega_i g` over every sample with the
    /// required data.
    pub fn verify_connection_compat(&self, tol: f64) -> Result<Report, CechError> {
        let mut rep = Report::new(tol);
        for ov in &self.overlaps {
            let mut worst = 0.0f64;
            for (k, s) in ov.samples.iter().enumerate() {
                let (dg, wi, wj) = match (&s.dg, &s.omega_i, &s.omega_j) {
                    (Some(a), Some(b), Some(c)) => (a, b, c),
                    _ => {
                        return Err(CechError::MissingConnectionData {
                            i: ov.i,
                            j: ov.j,
                            sample: k,
                        })
                    }
                };
                let g_inv = s.g.adjoint();
                for dir in 0..dg.len() {
                    let want = &g_inv * &dg[dir] + &g_inv * &wi[dir] * &s.g;
                    let r = max_abs(&(&wj[dir] - want)).to_f64().unwrap();
                    if r > worst {
                        worst = r;
                    }
                }
            }
            rep.push(format!("connection_{}_{}", ov.i, ov.j), worst);
        }
        Ok(rep)
    }
}

/// Samplewise equality of nerves plus the relation
/// `g2_ij = g_i^{-1} g1_ij g_j` with `twist[patch][point]`.
pub fn atlases_equivalent<T: Scalar>(
    a1: &CechAtlas<T>,
    a2: &CechAtlas<T>,
    twist: &[Vec<CMat<T>>],
    tol: f64,
) -> Result<Report, CechError> {
    if a1.n_patches != a2.n_patches || a1.overlaps.len() != a2.overlaps.len() {
        return Err(CechError::NerveMismatch);
    }
    let twisted = a1.twist(twist)?;
    let mut rep = Report::new(tol);
    for (o1, o2) in twisted.overlaps.iter().zip(&a2.overlaps) {
        if o1.i != o2.i || o1.j != o2.j || o1.samples.len() != o2.samples.len() {
            return Err(CechError::NerveMismatch);
        }
        let mut worst = 0.0f64;
        for (s1, s2) in o1.samples.iter().zip(&o2.samples) {
            if s1.point != s2.point {
                return Err(CechError::NerveMismatch);
            }
            let r = max_abs(&(&s1.g - &s2.g)).to_f64().unwrap();
            if r > worst {
                worst = r;
            }
        }
        rep.push(format!("equivalence_{}_{}", o1.i, o1.j), worst);
    }
    Ok(rep)
}

/// An atlas whose transition elements are unitary algebra elements.
#[derive(Debug, Clone)]
pub struct AlgebraOverlap<T: Scalar> {
    pub i: usize,
    pub j: usize,
    pub samples: Vec<(usize, AlgebraElement<T>)>,
}

#[derive(Debug, Clone)]
pub struct AlgebraTripleOverlap<T: Scalar> {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub samples: Vec<(usize, AlgebraElement<T>, AlgebraElement<T>, AlgebraElement<T>)>,
}

#[derive(Debug, Clone)]
pub struct AlgebraAtlas<T: Scalar> {
    pub n_patches: usize,
    pub overlaps: Vec<AlgebraOverlap<T>>,
    pub triples: Vec<AlgebraTripleOverlap<T>>,
}

impl<T: Scalar> AlgebraAtlas<T> {
    /// Cocycle residual evaluated blockwise in the algebra.
    pub fn verify_cocycle(&self, tol: f64) -> Result<Report, CechError> {
        let mut rep = Report::new(tol);
        for t in &self.triples {
            if t.samples.is_empty() {
                return Err(CechError::MissingSamples {
                    i: t.i,
                    j: t.j,
                    k: t.k,
                });
            }
            let mut worst = 0.0f64;
            for (_, uij, ujk, uki) in &t.samples {
                let prod = uij.mul(ujk).mul(uki);
                for b in &prod.blocks {
                    let n = b.nrows();
                    let r = max_abs(&(b - CMat::<T>::identity(n, n))).to_f64().unwrap();
                    if r > worst {
                        worst = r;
                    }
                }
            }
            rep.push(format!("cocycle_{}_{}_{}", t.i, t.j, t.k), worst);
        }
        Ok(rep)
    }
}

/// Project an algebra-valued cocycle to the gauge group by applying
/// `u ↦ pi(u) J pi(u) J*` samplewise.
pub fn quotient_cocycle<T: Scalar>(
    atlas: &AlgebraAtlas<T>,
    t: &FiniteTriple<T>,
) -> Result<CechAtlas<T>, CechError> {
    let overlaps = atlas
        .overlaps
        .iter()
        .map(|ov| {
            let samples = ov
                .samples
                .iter()
                .map(|(pt, u)| Ok(CechSample::plain(*pt, t.gauge_element(u)?)))
                .collect::<Result<Vec<_>, CechError>>()?;
            Ok(Overlap {
                i: ov.i,
                j: ov.j,
                samples,
            })
        })
        .collect::<Result<Vec<_>, CechError>>()?;
    let triples = atlas
        .triples
        .iter()
        .map(|tr| {
            let samples = tr
                .samples
                .iter()
                .map(|(pt, a, b, c)| {
                    Ok((
                        *pt,
                        t.gauge_element(a)?,
                        t.gauge_element(b)?,
                        t.gauge_element(c)?,
                    ))
                })
                .collect::<Result<Vec<_>, CechError>>()?;
            Ok(TripleOverlap {
                i: tr.i,
                j: tr.j,
                k: tr.k,
                samples,
            })
        })
        .collect::<Result<Vec<_>, CechError>>()?;
    Ok(CechAtlas {
        n_patches: atlas.n_patches,
        overlaps,
        triples,
    })
}

/// Verify that `candidate` is a cocycle in the unitary group of the
/// algebra and that its quotient matches `target` samplewise.
pub fn verify_lift<T: Scalar>(
    candidate: &AlgebraAtlas<T>,
    target: &CechAtlas<T>,
    t: &FiniteTriple<T>,
    tol: f64,
) -> Result<Report, CechError> {
    let mut rep = candidate.verify_cocycle(tol)?;
    let projected = quotient_cocycle(candidate, t)?;
    if projected.overlaps.len() != target.overlaps.len() {
        return Err(CechError::NerveMismatch);
    }
    for (po, to) in projected.overlaps.iter().zip(&target.overlaps) {
        if po.i != to.i || po.j != to.j || po.samples.len() != to.samples.len() {
            return Err(CechError::NerveMismatch);
        }
        let mut worst = 0.0f64;
        for (ps, ts) in po.samples.iter().zip(&to.samples) {
            if ps.point != ts.point {
                return Err(CechError::NerveMismatch);
            }
            let r = max_abs(&(&ps.g - &ts.g)).to_f64().unwrap();
            if r > worst {
                worst = r;
            }
        }
        rep.push(format!("lift_matches_{}_{}", po.i, po.j), worst);
    }
    Ok(rep)
}
