//! Combinatorial data classifying a finite real spectral triple: matrix
//! algebra summand dimensions `N_i`, a symmetric multiset `K` of pairs
//! `(i, j)` (the Hilbert space is the direct sum of `V_i (x) conj(V_j)`
//! over `K`), a KO signature, and a grading sign per pair slot.

use crate::ko::KOSignature;
use thiserror::Error;

/// Krajewski data for a finite real spectral triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KrajewskiData {
    /// Summand dimensions `N_i`, indexed `0..l`.
    pub dims: Vec<usize>,
    /// Pair multiset `K`; repetition encodes multiplicity. 0-based indices.
    pub pairs: Vec<(usize, usize)>,
    /// KO signature.
    pub ko: KOSignature,
    /// Grading sign per slot, aligned with [`KrajewskiData::slots`] order.
    /// Empty for odd KO-dimension.
    pub grading: Vec<i8>,
}

/// One summand of the Hilbert space: the `copy`-th occurrence of the pair
/// `(left, right)` in `K`, occupying `rows * cols` basis vectors starting
/// at `offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub left: usize,
    pub right: usize,
    pub copy: usize,
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DataError {
    #[error("dims must be non-empty with positive entries")]
    BadDims,
    #[error("pair ({0}, {1}) references a summand out of range")]
    PairOutOfRange(usize, usize),
    #[error("multiplicity m[{i}][{j}] = {mij} differs from m[{j}][{i}] = {mji}")]
    AsymmetricMultiset {
        i: usize,
        j: usize,
        mij: usize,
        mji: usize,
    },
    #[error("summand {0} does not act on any slot (action not faithful)")]
    NotFaithful(usize),
    #[error("eps = -1 requires even diagonal multiplicity, but m[{i}][{i}] = {m}")]
    OddDiagonalMultiplicity { i: usize, m: usize },
    #[error("grading has {got} signs for {want} slots")]
    GradingLength { got: usize, want: usize },
    #[error("grading signs must be +1 or -1, got {0}")]
    GradingSign(i8),
    #[error("odd KO-dimension admits no grading, but grading signs were given")]
    GradingForOddKO,
    #[error(
        "grading of slot {partner} must equal eps'' * grading of slot {slot} \
         (J gamma = eps'' gamma J across paired slots)"
    )]
    GradingInconsistent { slot: usize, partner: usize },
}

impl KrajewskiData {
    /// Multiplicity matrix `m[i][j]`.
    pub fn multiplicities(&self) -> Vec<Vec<usize>> {
        let l = self.dims.len();
        let mut m = vec![vec![0usize; l]; l];
        for &(i, j) in &self.pairs {
            if i < l && j < l {
                m[i][j] += 1;
            }
        }
        m
    }

    /// Slots in canonical order: lexicographic over `(left, right, copy)`,
    /// with basis offsets assigned in that order.
    pub fn slots(&self) -> Vec<Slot> {
        let m = self.multiplicities();
        let l = self.dims.len();
        let mut out = Vec::new();
        let mut offset = 0;
        for i in 0..l {
            for j in 0..l {
                for copy in 0..m[i][j] {
                    let rows = self.dims[i];
                    let cols = self.dims[j];
                    out.push(Slot {
                        left: i,
                        right: j,
                        copy,
                        offset,
                        rows,
                        cols,
                    });
                    offset += rows * cols;
                }
            }
        }
        out
    }

    /// Total Hilbert-space dimension `sum N_i N_j` over `K`.
    pub fn dim_h(&self) -> usize {
        self.pairs.iter().map(|&(i, j)| self.dims[i] * self.dims[j]).sum()
    }

    /// For each slot index, the index of its `J`-partner slot and the sign
    /// with which `J` maps into it.
    pub fn j_partners(&self) -> Vec<(usize, i8)> {
        let slots = self.slots();
        let eps = self.ko.eps;
        let find = |left: usize, right: usize, copy: usize| {
            slots
                .iter()
                .position(|s| s.left == left && s.right == right && s.copy == copy)
                .expect("partner slot exists for symmetric multiset")
        };
        slots
            .iter()
            .map(|s| {
                if s.left < s.right {
                    (find(s.right, s.left, s.copy), 1)
                } else if s.left > s.right {
                    (find(s.right, s.left, s.copy), eps)
                } else if eps == 1 {
                    (find(s.left, s.right, s.copy), 1)
                } else if s.copy % 2 == 0 {
                    (find(s.left, s.right, s.copy + 1), 1)
                } else {
                    (find(s.left, s.right, s.copy - 1), -1)
                }
            })
            .collect()
    }

    /// Check every structural invariant.
    pub fn validate(&self) -> Result<(), DataError> {
        let l = self.dims.len();
        if l == 0 || self.dims.iter().any(|&n| n == 0) {
            return Err(DataError::BadDims);
        }
        for &(i, j) in &self.pairs {
            if i >= l || j >= l {
                return Err(DataError::PairOutOfRange(i, j));
            }
        }
        let m = self.multiplicities();
        for i in 0..l {
            for j in 0..l {
                if m[i][j] != m[j][i] {
                    return Err(DataError::AsymmetricMultiset {
                        i,
                        j,
                        mij: m[i][j],
                        mji: m[j][i],
                    });
                }
            }
        }
        for i in 0..l {
            if (0..l).all(|j| m[i][j] == 0) {
                return Err(DataError::NotFaithful(i));
            }
        }
        if self.ko.eps == -1 {
            for i in 0..l {
                if m[i][i] % 2 != 0 {
                    return Err(DataError::OddDiagonalMultiplicity { i, m: m[i][i] });
                }
            }
        }
        match self.ko.eps_double_prime {
            None => {
                if !self.grading.is_empty() {
                    return Err(DataError::GradingForOddKO);
                }
            }
            Some(epp) => {
                let n_slots: usize = m.iter().flatten().sum();
                if self.grading.len() != n_slots {
                    return Err(DataError::GradingLength {
                        got: self.grading.len(),
                        want: n_slots,
                    });
                }
                for &g in &self.grading {
                    if g != 1 && g != -1 {
                        return Err(DataError::GradingSign(g));
                    }
                }
                for (s, &(p, _)) in self.j_partners().iter().enumerate() {
                    if self.grading[p] != epp * self.grading[s] {
                        return Err(DataError::GradingInconsistent { slot: s, partner: p });
                    }
                }
            }
        }
        Ok(())
    }

    /// Partition of the summand index set into connectedness classes:
    /// `i ~ j` iff a chain of nonzero off-diagonal multiplicities links
    /// them. Classes are sorted, smallest member first.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let l = self.dims.len();
        let m = self.multiplicities();
        let mut parent: Vec<usize> = (0..l).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for i in 0..l {
            for j in (i + 1)..l {
                if m[i][j] > 0 {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        for i in 0..l {
            let r = find(&mut parent, i);
            match roots.iter().position(|&x| x == r) {
                Some(k) => classes[k].push(i),
                None => {
                    roots.push(r);
                    classes.push(vec![i]);
                }
            }
        }
        classes.sort_by_key(|c| c[0]);
        classes
    }
}

/// The electrodynamics data: two 1-dimensional summands, `K = {(1,2) x 2,
/// (2,1) x 2}`, KO-dimension 6, grading `(+,-,-,+)`.
pub fn electrodynamics() -> KrajewskiData {
    KrajewskiData {
        dims: vec![1, 1],
        pairs: vec![(0, 1), (0, 1), (1, 0), (1, 0)],
        ko: KOSignature::from_dimension(6).unwrap(),
        grading: vec![1, -1, -1, 1],
    }
}

/// The Yang-Mills data: one summand `M_N` acting on `M_N` by left
/// multiplication, KO-dimension 0, trivial grading.
pub fn yang_mills(n: usize) -> KrajewskiData {
    KrajewskiData {
        dims: vec![n],
        pairs: vec![(0, 0)],
        ko: KOSignature::from_dimension(0).unwrap(),
        grading: vec![1],
    }
}

/// Deterministic pseudo-random valid instance keyed by `seed`: up to 4
/// summands of dimension at most 3, an even KO-dimension and a consistent
/// grading. Useful for fuzzing structural invariants.
pub fn sample_data(seed: u64) -> KrajewskiData {
    // splitmix64
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    };

    let ko_n = [0u8, 2, 4, 6][(next() % 4) as usize];
    let ko = KOSignature::from_dimension(ko_n).unwrap();
    // KO 6 (eps = +1, eps'' = -1) admits no diagonal slots, so it needs a
    // second summand to act on.
    let min_l = if ko_n == 6 { 2 } else { 1 };
    let l = min_l + (next() as usize) % (4 - min_l + 1);
    let dims: Vec<usize> = (0..l).map(|_| 1 + (next() as usize) % 3).collect();

    let mut pairs = Vec::new();
    for i in 0..l {
        for j in i..l {
            let m = (next() as usize) % 2;
            if i == j {
                if ko_n == 6 {
                    continue;
                }
                let m = if ko.eps == -1 { 2 * m } else { m };
                pairs.extend(std::iter::repeat((i, i)).take(m));
            } else {
                for _ in 0..m {
                    pairs.push((i, j));
                    pairs.push((j, i));
                }
            }
        }
    }
    // Faithfulness: every summand must act somewhere.
    for i in 0..l {
        if !pairs.iter().any(|&(a, b)| a == i || b == i) {
            if l >= 2 {
                let j = if i == 0 { 1 } else { 0 };
                pairs.push((i, j));
                pairs.push((j, i));
            } else if ko.eps == -1 {
                pairs.push((0, 0));
                pairs.push((0, 0));
            } else {
                pairs.push((0, 0));
            }
        }
    }

    let mut data = KrajewskiData {
        dims,
        pairs,
        ko,
        grading: Vec::new(),
    };
    let partners = data.j_partners();
    let epp = ko.eps_double_prime.expect("even KO");
    let mut grading = vec![0i8; partners.len()];
    for s in 0..partners.len() {
        if grading[s] != 0 {
            continue;
        }
        let g = if next() % 2 == 0 { 1 } else { -1 };
        grading[s] = g;
        grading[partners[s].0] = epp * g;
    }
    data.grading = grading;
    debug_assert!(data.validate().is_ok(), "{data:?}");
    data
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ed_data_valid() {
        let d = electrodynamics();
        d.validate().unwrap();
        assert_eq!(d.dim_h(), 4);
        assert_eq!(d.slots().len(), 4);
        assert_eq!(d.connected_components(), vec![vec![0, 1]]);
    }

    #[test]
    fn ym_data_valid() {
        let d = yang_mills(3);
        d.validate().unwrap();
        assert_eq!(d.dim_h(), 9);
        assert_eq!(d.connected_components(), vec![vec![0]]);
    }

    #[test]
    fn disconnected_components() {
        let d = KrajewskiData {
            dims: vec![1, 2],
            pairs: vec![(0, 0), (1, 1)],
            ko: KOSignature::from_dimension(0).unwrap(),
            grading: vec![1, 1],
        };
        d.validate().unwrap();
        assert_eq!(d.connected_components(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn chain_closure() {
        let d = KrajewskiData {
            dims: vec![1, 1, 1],
            pairs: vec![(0, 1), (1, 0), (1, 2), (2, 1)],
            ko: KOSignature::from_dimension(1).unwrap(),
            grading: vec![],
        };
        d.validate().unwrap();
        assert_eq!(d.connected_components(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn asymmetric_multiset_rejected() {
        let d = KrajewskiData {
            dims: vec![1, 1],
            pairs: vec![(0, 1)],
            ko: KOSignature::from_dimension(0).unwrap(),
            grading: vec![1],
        };
        assert!(matches!(d.validate(), Err(DataError::AsymmetricMultiset { .. })));
    }

    #[test]
    fn odd_diagonal_rejected_for_negative_eps() {
        let d = KrajewskiData {
            dims: vec![2],
            pairs: vec![(0, 0)],
            ko: KOSignature::from_dimension(2).unwrap(),
            grading: vec![1],
        };
        assert!(matches!(
            d.validate(),
            Err(DataError::OddDiagonalMultiplicity { .. })
        ));
    }

    #[test]
    fn grading_consistency_enforced() {
        // KO 6 has eps'' = -1, so paired off-diagonal slots need opposite signs.
        let mut d = electrodynamics();
        d.grading = vec![1, 1, 1, 1];
        assert!(matches!(d.validate(), Err(DataError::GradingInconsistent { .. })));
    }

    #[test]
    fn negative_eps_diagonal_partners_pair_copies() {
        let d = KrajewskiData {
            dims: vec![1],
            pairs: vec![(0, 0), (0, 0)],
            ko: KOSignature::from_dimension(4).unwrap(),
            grading: vec![1, 1],
        };
        d.validate().unwrap();
        let p = d.j_partners();
        assert_eq!(p, vec![(1, 1), (0, -1)]);
    }
}
