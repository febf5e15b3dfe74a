//! Inner fluctuations of a Dirac operator: `D_A = D + A + eps' J A J*`
//! for Hermitian one-forms `A = sum_j a_j [D, b_j]`, and their gauge
//! transformation law.

use crate::matrix::{comm, herm_residual, max_abs};
use crate::triple::{AlgebraElement, FiniteTriple, TripleError};
use crate::{CMat, Scalar};
use num_complex::Complex;

/// A one-form as a list of `(a_j, b_j)` terms; the associated operator is
/// `sum_j pi(a_j) [D, pi(b_j)]`.
#[derive(Debug, Clone)]
pub struct OneForm<T: Scalar> {
    pub terms: Vec<(AlgebraElement<T>, AlgebraElement<T>)>,
}

impl<T: Scalar> OneForm<T> {
    /// The operator `sum_j pi(a_j) [D, pi(b_j)]` on the triple's Hilbert
    /// space.
    pub fn operator(&self, t: &FiniteTriple<T>) -> CMat<T> {
        let n = t.dim_h();
        let mut a = CMat::<T>::zeros(n, n);
        for (x, y) in &self.terms {
            a += t.represent(x) * comm(t.dirac(), &t.represent(y));
        }
        a
    }

    /// Append the adjoint of every term so the operator is Hermitian:
    /// `(a [D, b])† = [b†, D] a† = -[D, b†] a†`, realized as the pair
    /// `(-b†, ...)` expansion through `[D, b† a†] = [D, b†] a† + b† [D, a†]`.
    /// Rather than expanding symbolically, the Hermitization is done at the
    /// operator level by [`hermitize`].
    pub fn push(&mut self, a: AlgebraElement<T>, b: AlgebraElement<T>) {
        self.terms.push((a, b));
    }
}

/// Hermitian part `(m + m†) / 2`.
pub fn hermitize<T: Scalar>(m: &CMat<T>) -> CMat<T> {
    (m + m.adjoint()) * Complex::new(T::c(0.5), T::zero())
}

/// `D_A = D + A + eps' J A J*` for a Hermitian one-form operator `A`.
/// Rejects non-Hermitian input beyond the triple's tolerance.
pub fn fluctuate<T: Scalar>(t: &FiniteTriple<T>, a: &CMat<T>) -> Result<CMat<T>, TripleError> {
    let r = herm_residual(a);
    if r > t.tolerance() {
        return Err(TripleError::NotHermitian(r.to_f64().unwrap()));
    }
    let eps_prime = Complex::new(t.eps_prime(), T::zero());
    Ok(t.dirac() + a + t.j_conjugate(a) * eps_prime)
}

/// Gauge transform of a one-form operator:
/// `A^u = pi(u) A pi(u)* + pi(u) [D, pi(u)*]`.
pub fn gauge_transform_one_form<T: Scalar>(
    t: &FiniteTriple<T>,
    u: &AlgebraElement<T>,
    a: &CMat<T>,
) -> Result<CMat<T>, TripleError> {
    let r = u.unitary_residual();
    if r > t.tolerance() {
        return Err(TripleError::NotUnitary(r.to_f64().unwrap()));
    }
    let pu = t.represent(u);
    let pu_star = t.represent(&u.adjoint());
    Ok(&pu * a * &pu_star + &pu * comm(t.dirac(), &pu_star))
}

/// Residual of the covariance law `U D_A U* = D_{A^u}` with
/// `U = pi(u) J pi(u) J*`.
pub fn covariance_residual<T: Scalar>(
    t: &FiniteTriple<T>,
    u: &AlgebraElement<T>,
    a: &CMat<T>,
) -> Result<T, TripleError> {
    let da = fluctuate(t, a)?;
    let big_u = t.gauge_element(u)?;
    let lhs = &big_u * da * big_u.adjoint();
    let au = gauge_transform_one_form(t, u, a)?;
    let rhs = fluctuate(t, &au)?;
    Ok(max_abs(&(lhs - rhs)))
}
