//! KO-dimension sign table.
//!
//! The signs `(eps, eps', eps'')` of a real structure determine the
//! KO-dimension `n` modulo 8:
//!
//! ```text
//! n     0   1   2   3   4   5   6   7
//! e     +   +   -   -   -   -   +   +
//! e'    +   -   +   +   +   -   +   +
//! e''   +       -       +       -
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Row of the KO sign table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KOSignature {
    /// KO-dimension modulo 8.
    pub n: u8,
    /// Sign of `J^2`.
    pub eps: i8,
    /// Sign in `JD = eps' DJ`.
    pub eps_prime: i8,
    /// Sign in `Jg = eps'' gJ`; absent in the odd case.
    pub eps_double_prime: Option<i8>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KOError {
    #[error("KO-dimension must be in 0..8, got {0}")]
    OutOfRange(u8),
    #[error("signs ({eps}, {eps_prime}, {eps_double_prime:?}) match no KO table row")]
    NoTableRow {
        eps: i8,
        eps_prime: i8,
        eps_double_prime: Option<i8>,
    },
}

const TABLE: [(i8, i8, Option<i8>); 8] = [
    (1, 1, Some(1)),
    (1, -1, None),
    (-1, 1, Some(-1)),
    (-1, 1, None),
    (-1, 1, Some(1)),
    (-1, -1, None),
    (1, 1, Some(-1)),
    (1, 1, None),
];

impl KOSignature {
    /// Table row for KO-dimension `n` mod 8.
    pub fn from_dimension(n: u8) -> Result<Self, KOError> {
        if n > 7 {
            return Err(KOError::OutOfRange(n));
        }
        let (eps, eps_prime, eps_double_prime) = TABLE[n as usize];
        Ok(KOSignature {
            n,
            eps,
            eps_prime,
            eps_double_prime,
        })
    }

    /// Look up the KO-dimension from a sign triple.
    pub fn from_signs(
        eps: i8,
        eps_prime: i8,
        eps_double_prime: Option<i8>,
    ) -> Result<Self, KOError> {
        for (n, row) in TABLE.iter().enumerate() {
            if *row == (eps, eps_prime, eps_double_prime) {
                return Ok(KOSignature {
                    n: n as u8,
                    eps,
                    eps_prime,
                    eps_double_prime,
                });
            }
        }
        Err(KOError::NoTableRow {
            eps,
            eps_prime,
            eps_double_prime,
        })
    }

    pub fn is_even(&self) -> bool {
        self.eps_double_prime.is_some()
    }

    /// Signature of a product with the 4-dimensional canonical triple:
    /// `(J_I (x) J_M)^2 = -eps`, `D` commutes with the product `J`, and
    /// `eps''` is inherited, i.e. KO-dimension `4 + n` mod 8.
    pub fn product_with_4d(&self) -> Result<Self, KOError> {
        KOSignature::from_dimension((self.n + 4) % 8)
    }
}
