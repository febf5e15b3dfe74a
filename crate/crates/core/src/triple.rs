//! Explicit matrix realizations of finite real spectral triples.
//!
//! The Hilbert space is the direct sum over slots `(i, j)` of `K` of the
//! matrix spaces `M_{N_i x N_j}`, with basis ordered lexicographically over
//! (slot, row, column). The algebra acts on slot `(i, j)` by left
//! multiplication with the `i`-th block; the real structure swaps a slot
//! with its partner and transposes, with signs fixed by the KO table.

use crate::krajewski::{DataError, KrajewskiData, Slot};
use crate::matrix::{
    antiherm_residual, c, comm, conj, czero, herm_residual, j_conj, max_abs, to_real_coords,
    unitary_residual,
};
use crate::report::Report;
use crate::{CMat, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex;
use thiserror::Error;

/// An element of the algebra `⊕_i M_{N_i}(C)`: one block per summand.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<T: Scalar> {
    pub blocks: Vec<CMat<T>>,
}

impl<T: Scalar> AlgebraElement<T> {
    pub fn zeros(dims: &[usize]) -> Self {
        AlgebraElement {
            blocks: dims.iter().map(|&n| CMat::<T>::zeros(n, n)).collect(),
        }
    }

    pub fn identity(dims: &[usize]) -> Self {
        AlgebraElement {
            blocks: dims.iter().map(|&n| CMat::<T>::identity(n, n)).collect(),
        }
    }

    /// Matrix unit `e_kl` in summand `s`, zero elsewhere.
    pub fn matrix_unit(dims: &[usize], s: usize, k: usize, l: usize) -> Self {
        let mut a = Self::zeros(dims);
        a.blocks[s][(k, l)] = Complex::new(T::one(), T::zero());
        a
    }

    /// Constant `lambda_i * id` per summand.
    pub fn from_scalars(dims: &[usize], scalars: &[Complex<T>]) -> Self {
        AlgebraElement {
            blocks: dims
                .iter()
                .zip(scalars)
                .map(|(&n, &z)| CMat::<T>::identity(n, n) * z)
                .collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        AlgebraElement {
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        AlgebraElement {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn unitary_residual(&self) -> T {
        self.blocks
            .iter()
            .map(unitary_residual)
            .fold(T::zero(), |acc, x| if x > acc { x } else { acc })
    }

    pub fn antiherm_residual(&self) -> T {
        self.blocks
            .iter()
            .map(antiherm_residual)
            .fold(T::zero(), |acc, x| if x > acc { x } else { acc })
    }

    fn dims_match(&self, dims: &[usize]) -> bool {
        self.blocks.len() == dims.len()
            && self
                .blocks
                .iter()
                .zip(dims)
                .all(|(b, &n)| b.nrows() == n && b.ncols() == n)
    }
}

/// Dimensions attached to the gauge group `U(A)/U(A_J)` of a triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeStructure {
    /// Connectedness classes of summand indices.
    pub components: Vec<Vec<usize>>,
    /// `dim u(A) = sum N_i^2`.
    pub dim_u_af: usize,
    /// `dim (A)_J` = number of classes.
    pub dim_aj: usize,
    /// `dim u(A) - dim u(A_J)`, the gauge Lie-algebra dimension.
    pub gauge_lie_dim: usize,
    /// Numerical rank of `tau` on an anti-Hermitian basis (cross-check).
    pub tau_rank: usize,
}

#[derive(Debug, Error)]
pub enum TripleError {
    #[error("invalid Krajewski data: {0}")]
    Data(#[from] DataError),
    #[error("Dirac matrix is {got}x{got}, triple has dim_H = {want}")]
    DiracDimension { got: usize, want: usize },
    #[error("algebra element has wrong block shapes")]
    Shape,
    #[error("element is not anti-Hermitian per summand (residual {0})")]
    NotAntiHermitian(f64),
    #[error("element is not unitary per summand (residual {0})")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian (residual {0})")]
    NotHermitian(f64),
}

/// Matrix realization of a finite real spectral triple.
#[derive(Debug, Clone)]
pub struct FiniteTriple<T: Scalar> {
    data: KrajewskiData,
    slots: Vec<Slot>,
    dim_h: usize,
    /// Unitary part of `J = U ∘ conj`; entries are 0 or ±1.
    j_matrix: CMat<T>,
    /// Diagonal ±1 grading; `None` for odd KO-dimension.
    gamma: Option<CMat<T>>,
    dirac: CMat<T>,
    tol: T,
}

/// Construct a triple from Krajewski data; `dirac` defaults to zero.
pub fn build_triple<T: Scalar>(
    data: KrajewskiData,
    dirac: Option<CMat<T>>,
) -> Result<FiniteTriple<T>, TripleError> {
    data.validate()?;
    let slots = data.slots();
    let dim_h = data.dim_h();
    let dirac = match dirac {
        Some(d) => {
            if d.nrows() != dim_h || d.ncols() != dim_h {
                return Err(TripleError::DiracDimension {
                    got: d.nrows(),
                    want: dim_h,
                });
            }
            d
        }
        None => CMat::<T>::zeros(dim_h, dim_h),
    };

    // J maps basis vector (slot, r, c) to (partner, c, r) with the table sign.
    let partners = data.j_partners();
    let mut u = CMat::<T>::zeros(dim_h, dim_h);
    for (si, slot) in slots.iter().enumerate() {
        let (pi, sign) = partners[si];
        let p = slots[pi];
        for r in 0..slot.rows {
            for col in 0..slot.cols {
                let from = slot.offset + r * slot.cols + col;
                let to = p.offset + col * p.cols + r;
                u[(to, from)] = c(T::from_i8(sign).unwrap(), T::zero());
            }
        }
    }

    let gamma = data.ko.eps_double_prime.map(|_| {
        let mut g = CMat::<T>::zeros(dim_h, dim_h);
        for (si, slot) in slots.iter().enumerate() {
            let sign = T::from_i8(data.grading[si]).unwrap();
            for k in 0..slot.rows * slot.cols {
                g[(slot.offset + k, slot.offset + k)] = c(sign, T::zero());
            }
        }
        g
    });

    Ok(FiniteTriple {
        data,
        slots,
        dim_h,
        j_matrix: u,
        gamma,
        dirac,
        tol: T::c(1e-10),
    })
}

impl<T: Scalar> FiniteTriple<T> {
    pub fn with_tolerance(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn data(&self) -> &KrajewskiData {
        &self.data
    }
    pub fn dims(&self) -> &[usize] {
        &self.data.dims
    }
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }
    pub fn dim_h(&self) -> usize {
        self.dim_h
    }
    pub fn j_matrix(&self) -> &CMat<T> {
        &self.j_matrix
    }
    pub fn gamma(&self) -> Option<&CMat<T>> {
        self.gamma.as_ref()
    }
    pub fn dirac(&self) -> &CMat<T> {
        &self.dirac
    }
    pub fn tolerance(&self) -> T {
        self.tol
    }
    pub fn eps(&self) -> T {
        T::from_i8(self.data.ko.eps).unwrap()
    }
    pub fn eps_prime(&self) -> T {
        T::from_i8(self.data.ko.eps_prime).unwrap()
    }

    /// Replace the Dirac matrix (size-checked).
    pub fn with_dirac(mut self, dirac: CMat<T>) -> Result<Self, TripleError> {
        if dirac.nrows() != self.dim_h || dirac.ncols() != self.dim_h {
            return Err(TripleError::DiracDimension {
                got: dirac.nrows(),
                want: self.dim_h,
            });
        }
        self.dirac = dirac;
        Ok(self)
    }

    /// Left action: block `a_i (x) 1` on each slot `(i, j)`.
    pub fn represent(&self, a: &AlgebraElement<T>) -> CMat<T> {
        assert!(a.dims_match(&self.data.dims), "algebra element shape");
        let mut m = CMat::<T>::zeros(self.dim_h, self.dim_h);
        for slot in &self.slots {
            let block = &a.blocks[slot.left];
            for r in 0..slot.rows {
                for k in 0..slot.rows {
                    let z = block[(r, k)];
                    if z != czero() {
                        for col in 0..slot.cols {
                            m[(slot.offset + r * slot.cols + col, slot.offset + k * slot.cols + col)] = z;
                        }
                    }
                }
            }
        }
        m
    }

    /// `J m J*` for a linear operator `m`.
    pub fn j_conjugate(&self, m: &CMat<T>) -> CMat<T> {
        j_conj(&self.j_matrix, m)
    }

    /// Opposite action `J pi(b) J*`.
    pub fn right_action(&self, b: &AlgebraElement<T>) -> CMat<T> {
        self.j_conjugate(&self.represent(b))
    }

    /// Matrix units `e_kl` of every summand: a spanning generator set.
    pub fn generators(&self) -> Vec<AlgebraElement<T>> {
        let dims = &self.data.dims;
        let mut out = Vec::new();
        for (s, &n) in dims.iter().enumerate() {
            for k in 0..n {
                for l in 0..n {
                    out.push(AlgebraElement::matrix_unit(dims, s, k, l));
                }
            }
        }
        out
    }

    /// Anti-Hermitian basis of `u(A)`: `i e_kk`, `e_kl - e_lk`,
    /// `i (e_kl + e_lk)`.
    pub fn antihermitian_basis(&self) -> Vec<AlgebraElement<T>> {
        let dims = &self.data.dims;
        let i = c(T::zero(), T::one());
        let mut out = Vec::new();
        for (s, &n) in dims.iter().enumerate() {
            for k in 0..n {
                let mut a = AlgebraElement::zeros(dims);
                a.blocks[s][(k, k)] = i;
                out.push(a);
            }
            for k in 0..n {
                for l in (k + 1)..n {
                    let mut a = AlgebraElement::zeros(dims);
                    a.blocks[s][(k, l)] = c(T::one(), T::zero());
                    a.blocks[s][(l, k)] = c(-T::one(), T::zero());
                    out.push(a);
                    let mut b = AlgebraElement::zeros(dims);
                    b.blocks[s][(k, l)] = i;
                    b.blocks[s][(l, k)] = i;
                    out.push(b);
                }
            }
        }
        out
    }

    /// Verify every axiom, reporting the largest entry residual per check.
    pub fn verify_axioms(&self) -> Report {
        let tol = self.tol.to_f64().unwrap();
        let mut rep = Report::new(tol);
        let n = self.dim_h;
        let id = CMat::<T>::identity(n, n);
        let u = &self.j_matrix;
        let res = |x: T| x.to_f64().unwrap();

        rep.push("j_unitary", res(unitary_residual(u)));
        rep.push(
            "j_squared",
            res(max_abs(&(u * conj(u) - &id * c(self.eps(), T::zero())))),
        );
        rep.push("dirac_hermitian", res(herm_residual(&self.dirac)));
        rep.push(
            "dirac_j",
            res(max_abs(
                &(self.j_conjugate(&self.dirac) - &self.dirac * c(self.eps_prime(), T::zero())),
            )),
        );
        if let Some(g) = &self.gamma {
            rep.push("gamma_hermitian", res(herm_residual(g)));
            rep.push("gamma_squared", res(max_abs(&(g * g - &id))));
            rep.push(
                "gamma_dirac_anticommute",
                res(max_abs(&(&self.dirac * g + g * &self.dirac))),
            );
            let epp = T::from_i8(self.data.ko.eps_double_prime.unwrap()).unwrap();
            rep.push(
                "j_gamma",
                res(max_abs(&(u * conj(g) - (g * u) * c(epp, T::zero())))),
            );
        }

        let gens = self.generators();
        let reps: Vec<CMat<T>> = gens.iter().map(|g| self.represent(g)).collect();
        let right: Vec<CMat<T>> = reps.iter().map(|m| self.j_conjugate(m)).collect();

        let mut gamma_comm = T::zero();
        if let Some(g) = &self.gamma {
            for m in &reps {
                let r = max_abs(&comm(g, m));
                if r > gamma_comm {
                    gamma_comm = r;
                }
            }
            rep.push("gamma_commutes_algebra", res(gamma_comm));
        }

        // Faithful unital *-homomorphism on the generator set.
        let one = self.represent(&AlgebraElement::identity(&self.data.dims));
        let mut hom = max_abs(&(one - &id));
        for (ga, ma) in gens.iter().zip(&reps) {
            let star = max_abs(&(self.represent(&ga.adjoint()) - ma.adjoint()));
            if star > hom {
                hom = star;
            }
        }
        for (ga, ma) in gens.iter().zip(&reps) {
            for (gb, mb) in gens.iter().zip(&reps) {
                let r = max_abs(&(self.represent(&ga.mul(gb)) - ma * mb));
                if r > hom {
                    hom = r;
                }
            }
        }
        rep.push("unital_star_homomorphism", res(hom));
        let min_norm = reps
            .iter()
            .map(max_abs)
            .fold(T::c(f64::INFINITY), |acc, x| if x < acc { x } else { acc });
        rep.push(
            "faithful",
            if min_norm > T::c(0.5) { 0.0 } else { 1.0 },
        );

        let mut order_zero = T::zero();
        let mut first_order = T::zero();
        for ma in &reps {
            let da = comm(&self.dirac, ma);
            for rb in &right {
                let r0 = max_abs(&comm(ma, rb));
                if r0 > order_zero {
                    order_zero = r0;
                }
                let r1 = max_abs(&comm(&da, rb));
                if r1 > first_order {
                    first_order = r1;
                }
            }
        }
        rep.push("order_zero", res(order_zero));
        rep.push("first_order", res(first_order));
        rep
    }

    /// Basis of `(A)_J`: one element per connectedness class, the identity
    /// on the class summands.
    pub fn aj_basis(&self) -> Vec<AlgebraElement<T>> {
        self.data
            .connected_components()
            .into_iter()
            .map(|class| {
                let mut a = AlgebraElement::zeros(&self.data.dims);
                for i in class {
                    a.blocks[i] = CMat::<T>::identity(self.data.dims[i], self.data.dims[i]);
                }
                a
            })
            .collect()
    }

    /// `tau(x) = pi(x) + J pi(x) J*` for anti-Hermitian `x`.
    pub fn tau(&self, x: &AlgebraElement<T>) -> Result<CMat<T>, TripleError> {
        if !x.dims_match(&self.data.dims) {
            return Err(TripleError::Shape);
        }
        let r = x.antiherm_residual();
        if r > self.tol {
            return Err(TripleError::NotAntiHermitian(r.to_f64().unwrap()));
        }
        let m = self.represent(x);
        Ok(&m + self.j_conjugate(&m))
    }

    /// `pi(u) J pi(u) J*` for unitary `u`; implements `u J u J*`.
    pub fn gauge_element(&self, u: &AlgebraElement<T>) -> Result<CMat<T>, TripleError> {
        if !u.dims_match(&self.data.dims) {
            return Err(TripleError::Shape);
        }
        let r = u.unitary_residual();
        if r > self.tol {
            return Err(TripleError::NotUnitary(r.to_f64().unwrap()));
        }
        let m = self.represent(u);
        Ok(&m * self.j_conjugate(&m))
    }

    /// Numerical rank of `tau` restricted to the anti-Hermitian basis.
    pub fn tau_rank(&self) -> usize {
        let basis = self.antihermitian_basis();
        let rows = 2 * self.dim_h * self.dim_h;
        let cols = basis.len();
        let mut m = DMatrix::<T>::zeros(rows, cols);
        for (j, x) in basis.iter().enumerate() {
            let t = self.tau(x).expect("basis is anti-Hermitian");
            for (i, v) in to_real_coords(&t).into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        let svd = m.svd(false, false);
        let smax = svd
            .singular_values
            .iter()
            .copied()
            .fold(T::zero(), |a, b| if b > a { b } else { a });
        if smax == T::zero() {
            return 0;
        }
        let cutoff = T::c(1e-8) * smax;
        svd.singular_values.iter().filter(|&&s| s > cutoff).count()
    }

    /// Connectedness classes, `u(A)` dimension and the gauge Lie-algebra
    /// dimension, cross-validated against the rank of `tau`.
    pub fn gauge_structure(&self) -> GaugeStructure {
        let components = self.data.connected_components();
        let dim_u_af: usize = self.data.dims.iter().map(|&n| n * n).sum();
        let dim_aj = components.len();
        GaugeStructure {
            components,
            dim_u_af,
            dim_aj,
            gauge_lie_dim: dim_u_af - dim_aj,
            tau_rank: self.tau_rank(),
        }
    }

    /// Write a unitary `u` as `v w` with `w in U(A_J)` built from per-class
    /// principal roots of determinants and `v` per-class unimodular.
    pub fn unimodular_decompose(
        &self,
        u: &AlgebraElement<T>,
    ) -> Result<(AlgebraElement<T>, AlgebraElement<T>), TripleError> {
        if !u.dims_match(&self.data.dims) {
            return Err(TripleError::Shape);
        }
        let r = u.unitary_residual();
        if r > self.tol {
            return Err(TripleError::NotUnitary(r.to_f64().unwrap()));
        }
        let block_dets: Vec<Complex<T>> = u.blocks.iter().map(|b| b.determinant()).collect();
        let components = self.data.connected_components();
        let mut scalars = vec![c(T::one(), T::zero()); self.data.dims.len()];
        for class in &components {
            // det over End(E_[class]): left action of u_s on slot (s, j)
            // contributes det(u_s)^{N_j}.
            let mut det = c(T::one(), T::zero());
            let mut rank = 0usize;
            for slot in &self.slots {
                if class.contains(&slot.left) {
                    let mut p = c(T::one(), T::zero());
                    for _ in 0..slot.cols {
                        p *= block_dets[slot.left];
                    }
                    det *= p;
                    rank += slot.rows * slot.cols;
                }
            }
            // Principal branch of the rank-th root; arg in (-pi, pi] so the
            // negative real axis resolves to +pi/rank.
            use nalgebra::ComplexField;
            let modulus = det.modulus();
            let arg = det.argument();
            let nr = T::from_usize(rank).unwrap();
            let root_mod = modulus.powf(T::one() / nr);
            let root_arg = arg / nr;
            let root = c(root_mod * root_arg.cos(), root_mod * root_arg.sin());
            for &i in class {
                scalars[i] = root;
            }
        }
        let w = AlgebraElement::from_scalars(&self.data.dims, &scalars);
        let w_inv = AlgebraElement::from_scalars(
            &self.data.dims,
            &scalars.iter().map(|z| z.conj()).collect::<Vec<_>>(),
        );
        let v = u.mul(&w_inv);
        Ok((v, w))
    }
}
