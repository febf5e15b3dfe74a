//! The moduli space of admissible Dirac operators for a fixed triple
//! structure: Hermitian matrices compatible with the real structure, the
//! grading (even case), and the first-order condition.
//!
//! All three constraints are real-linear on the real vector space of
//! Hermitian matrices, so the moduli space is an intersection of
//! nullspaces. It is computed incrementally: the current candidate basis is
//! restricted by one constraint operator at a time through a
//! rank-revealing SVD, which keeps every factorization small.

use crate::matrix::{
    anticomm, comm, coords_to_herm, herm_residual, herm_to_coords, max_abs, re_trace_inner,
    to_real_coords,
};
use crate::triple::FiniteTriple;
use crate::{CMat, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex;

/// Relative singular-value cutoff separating null directions from range
/// directions.
pub const RANK_CUTOFF: f64 = 1e-8;

/// Absolute floor below which a whole constraint operator counts as zero
/// on the current subspace. Inputs are orthonormal, so the scale is O(1).
pub const ZERO_OPERATOR_FLOOR: f64 = 1e-12;

/// Solved moduli space of Dirac operators.
#[derive(Debug, Clone)]
pub struct ModuliSpace<T: Scalar> {
    /// Real dimension of the space.
    pub real_dim: usize,
    /// Orthonormal Hermitian basis with respect to `Re Tr(x† y)`.
    pub basis: Vec<CMat<T>>,
    /// Smallest ratio between the smallest kept and largest dropped
    /// singular value across all constraint reductions; `inf` when no
    /// reduction was ambiguous.
    pub min_gap_ratio: f64,
    /// Number of constraint operators applied.
    pub constraints: usize,
}

/// Compute the space of admissible Dirac matrices for the triple's
/// structure (its current Dirac matrix is ignored).
pub fn solve_moduli<T: Scalar>(t: &FiniteTriple<T>) -> ModuliSpace<T> {
    let n = t.dim_h();
    let dim_herm = n * n;

    let gens = t.generators();
    let reps: Vec<CMat<T>> = gens.iter().map(|g| t.represent(g)).collect();
    let right: Vec<CMat<T>> = reps.iter().map(|m| t.j_conjugate(m)).collect();

    let eps_prime = Complex::new(t.eps_prime(), T::zero());
    let mut ops: Vec<Box<dyn Fn(&CMat<T>) -> CMat<T>>> = Vec::new();
    {
        let u = t.j_matrix().clone();
        ops.push(Box::new(move |d: &CMat<T>| {
            crate::matrix::j_conj(&u, d) - d * eps_prime
        }));
    }
    if let Some(g) = t.gamma() {
        let g = g.clone();
        ops.push(Box::new(move |d: &CMat<T>| anticomm(d, &g)));
    }
    for a in reps.iter() {
        for b in right.iter() {
            let a = a.clone();
            let b = b.clone();
            ops.push(Box::new(move |d: &CMat<T>| comm(&comm(d, &a), &b)));
        }
    }

    // Candidate basis in Hermitian coordinates, kept orthonormal.
    let mut basis: Vec<Vec<T>> = (0..dim_herm)
        .map(|k| {
            let mut v = vec![T::zero(); dim_herm];
            v[k] = T::one();
            v
        })
        .collect();
    let mut min_gap = f64::INFINITY;
    let n_ops = ops.len();

    for op in ops {
        if basis.is_empty() {
            break;
        }
        let d = basis.len();
        let mut m = DMatrix::<T>::zeros(2 * n * n, d);
        for (j, coords) in basis.iter().enumerate() {
            let h = coords_to_herm(coords, n);
            for (i, v) in to_real_coords(&op(&h)).into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        let svd = m.svd(false, true);
        let sv = &svd.singular_values;
        let smax = sv.iter().copied().fold(T::zero(), |a, b| if b > a { b } else { a });
        if smax <= T::c(ZERO_OPERATOR_FLOOR) {
            continue;
        }
        let cutoff = T::c(RANK_CUTOFF) * smax;
        let v_t = svd.v_t.expect("requested V^T");
        let mut next: Vec<Vec<T>> = Vec::new();
        let mut smallest_kept = f64::INFINITY;
        let mut largest_dropped = 0.0f64;
        for i in 0..sv.len() {
            let s = sv[i].to_f64().unwrap();
            if sv[i] <= cutoff {
                if s > largest_dropped {
                    largest_dropped = s;
                }
                let mut coords = vec![T::zero(); dim_herm];
                for (j, b) in basis.iter().enumerate() {
                    let w = v_t[(i, j)];
                    for (ck, bk) in coords.iter_mut().zip(b) {
                        *ck += w * *bk;
                    }
                }
                next.push(coords);
            } else if s < smallest_kept {
                smallest_kept = s;
            }
        }
        if largest_dropped > 0.0 && smallest_kept.is_finite() {
            let gap = smallest_kept / largest_dropped;
            if gap < min_gap {
                min_gap = gap;
            }
        }
        basis = next;
    }

    ModuliSpace {
        real_dim: basis.len(),
        basis: basis.iter().map(|cds| coords_to_herm(cds, n)).collect(),
        min_gap_ratio: min_gap,
        constraints: n_ops,
    }
}

/// Orthogonal projection of a Hermitian matrix onto the moduli space and
/// the largest entry of the rejected part.
pub fn project_onto_moduli<T: Scalar>(
    space: &ModuliSpace<T>,
    d: &CMat<T>,
) -> (CMat<T>, T) {
    let n = d.nrows();
    let mut proj = CMat::<T>::zeros(n, n);
    for b in &space.basis {
        let coef = Complex::new(re_trace_inner(b, d), T::zero());
        proj += b * coef;
    }
    let resid = max_abs(&(d - &proj));
    (proj, resid)
}

/// Independent residual oracle: evaluates every defining constraint
/// directly on `d` and returns the worst entry residual. Shares no code
/// with the nullspace solver beyond the triple's structure matrices.
pub fn constraint_residual<T: Scalar>(t: &FiniteTriple<T>, d: &CMat<T>) -> T {
    let mut worst = herm_residual(d);
    let jd = t.j_conjugate(d);
    let r = max_abs(&(jd - d * Complex::new(t.eps_prime(), T::zero())));
    if r > worst {
        worst = r;
    }
    if let Some(g) = t.gamma() {
        let r = max_abs(&(d * g + g * d));
        if r > worst {
            worst = r;
        }
    }
    let gens = t.generators();
    for a in &gens {
        let da = comm(d, &t.represent(a));
        for b in &gens {
            let r = max_abs(&comm(&da, &t.right_action(b)));
            if r > worst {
                worst = r;
            }
        }
    }
    worst
}

/// Coordinates of a Hermitian matrix in the moduli basis.
pub fn moduli_coordinates<T: Scalar>(space: &ModuliSpace<T>, d: &CMat<T>) -> Vec<T> {
    space.basis.iter().map(|b| re_trace_inner(b, d)).collect()
}

/// Rebuild a Hermitian matrix from moduli coordinates.
pub fn from_moduli_coordinates<T: Scalar>(space: &ModuliSpace<T>, coords: &[T]) -> CMat<T> {
    let n = space.basis.first().map_or(0, |b| b.nrows());
    let mut d = CMat::<T>::zeros(n, n);
    for (b, &x) in space.basis.iter().zip(coords) {
        d += b * Complex::new(x, T::zero());
    }
    d
}

/// Convenience wrapper for the coordinate chart on Hermitian matrices used
/// by the solver; exposed for tests.
pub fn hermitian_chart_roundtrip<T: Scalar>(d: &CMat<T>) -> CMat<T> {
    coords_to_herm(&herm_to_coords(d), d.nrows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krajewski::{electrodynamics, yang_mills};
    use crate::matrix::c;
    use crate::triple::build_triple;
    use crate::{CMat64, KrajewskiData};
    use crate::ko::KOSignature;

    fn cf(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn ed_dirac(d: Complex<f64>) -> CMat64 {
        let z = cf(0.0, 0.0);
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

    #[test]
    fn ed_moduli_dimension_two() {
        let t = build_triple::<f64>(electrodynamics(), None).unwrap();
        let space = solve_moduli(&t);
        assert_eq!(space.real_dim, 2);
        assert!(space.min_gap_ratio >= 1e4, "gap {}", space.min_gap_ratio);
        for b in &space.basis {
            assert!(constraint_residual(&t, b) < 1e-12);
        }
        // The two-parameter family d in C projects onto itself.
        let d = ed_dirac(cf(0.3, -0.7));
        let (_, resid) = project_onto_moduli(&space, &d);
        assert!(resid < 1e-12, "resid {resid}");
        // A generic Hermitian matrix does not.
        let mut m = CMat64::zeros(4, 4);
        m[(0, 0)] = cf(1.0, 0.0);
        m[(2, 3)] = cf(0.2, 0.1);
        m[(3, 2)] = cf(0.2, -0.1);
        let (_, resid) = project_onto_moduli(&space, &m);
        assert!(resid > 0.5);
    }

    #[test]
    fn ym_moduli_trivial() {
        for n in 2..=3 {
            let t = build_triple::<f64>(yang_mills(n), None).unwrap();
            let space = solve_moduli(&t);
            assert_eq!(space.real_dim, 0, "N = {n}");
        }
    }

    #[test]
    fn odd_one_dim_triple_has_line_of_diracs() {
        // One 1x1 summand, odd KO: only Hermiticity and J-compatibility
        // bind, both trivial in dimension one.
        let data = KrajewskiData {
            dims: vec![1],
            pairs: vec![(0, 0)],
            ko: KOSignature::from_dimension(7).unwrap(),
            grading: vec![],
        };
        let t = build_triple::<f64>(data, None).unwrap();
        let space = solve_moduli(&t);
        assert_eq!(space.real_dim, 1);
        assert!((re_trace_inner(&space.basis[0], &space.basis[0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_is_orthonormal() {
        let t = build_triple::<f64>(electrodynamics(), None).unwrap();
        let space = solve_moduli(&t);
        for (i, a) in space.basis.iter().enumerate() {
            for (j, b) in space.basis.iter().enumerate() {
                let ip = re_trace_inner(a, b);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coordinates_roundtrip() {
        let t = build_triple::<f64>(electrodynamics(), None).unwrap();
        let space = solve_moduli(&t);
        let d = ed_dirac(cf(-1.2, 0.4));
        let coords = moduli_coordinates(&space, &d);
        let back = from_moduli_coordinates(&space, &coords);
        assert!(max_abs(&(back - d)) < 1e-12);
    }

    #[test]
    fn chart_roundtrip() {
        let m = CMat64::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.3, 1.1), c(0.3, -1.1), c(-0.7, 0.0)],
        );
        assert!(max_abs(&(hermitian_chart_roundtrip(&m) - m)) < 1e-14);
    }
}
