//! Numerical library for finite real spectral triples and their
//! almost-commutative gauge theories.
//!
//! The building blocks are:
//!
//! - [`krajewski`]: combinatorial data (summand dimensions, pair multiset,
//!   KO signs, grading) classifying a finite real spectral triple,
//! - [`triple`]: explicit matrix realizations, axiom verification, gauge
//!   group structure and the unimodular decomposition,
//! - [`moduli`]: the linear space of admissible Dirac operators ("mass
//!   matrices") computed by rank-revealing nullspace solving,
//! - [`fluctuation`]: inner fluctuations `D_A = D + A + eps' J A J*`,
//! - [`lagrangian`]: spectral-action Lagrangian densities on a periodic
//!   lattice,
//! - [`product`]: the full product Dirac operator on a desk-scale lattice,
//!   its spectrum, KO signs and the fermionic bilinear form,
//! - [`cech`]: Cech-level principal-bundle data checks.
//!
//! All matrix code is generic over the real scalar type through
//! [`Scalar`]; concrete `f64` aliases are exported at the crate root.

pub mod cech;
pub mod clifford;
pub mod fields;
pub mod fluctuation;
pub mod io;
pub mod ko;
pub mod krajewski;
pub mod lagrangian;
pub mod lattice;
pub mod matrix;
pub mod moduli;
pub mod product;
pub mod report;
pub mod scalar;
pub mod triple;

pub use ko::KOSignature;
pub use krajewski::KrajewskiData;
pub use report::{Check, Report};
pub use scalar::Scalar;
pub use triple::{AlgebraElement, FiniteTriple, GaugeStructure};

use nalgebra::DMatrix;
use num_complex::Complex;

/// Dense complex matrix over a generic real scalar.
pub type CMat<T> = DMatrix<Complex<T>>;
/// Dense complex column vector over a generic real scalar.
pub type CVec<T> = nalgebra::DVector<Complex<T>>;

/// Double-precision complex matrix, the working type of the CLI.
pub type CMat64 = CMat<f64>;
/// Single-precision complex matrix.
pub type CMat32 = CMat<f32>;
/// Double-precision complex vector.
pub type CVec64 = CVec<f64>;
