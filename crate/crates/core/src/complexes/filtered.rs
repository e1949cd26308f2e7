use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::chain::{ChainComplex, ComplexJson};
use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, SparseVec};

/// Filtration levels beyond this magnitude are treated as unbounded.
pub const LEVEL_BOUND: i64 = 1 << 20;

/// A complex with an increasing filtration given by one integer level per
/// basis vector: `F_p C_n` is spanned by the basis vectors of level `<= p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredComplex {
    complex: ChainComplex,
    levels: BTreeMap<i64, Vec<i64>>,
}

impl FilteredComplex {
    /// Checks that every differential preserves the filtration.
    pub fn new(complex: ChainComplex, levels: BTreeMap<i64, Vec<i64>>) -> Result<Self> {
        for n in complex.degrees() {
            let l = levels.get(&n).map_or(0, Vec::len);
            if l != complex.dim(n) {
                return Err(Error::Dimension(format!(
                    "degree {n} has dimension {} but {l} filtration levels",
                    complex.dim(n)
                )));
            }
        }
        if let Some(bad) = levels.values().flatten().find(|l| l.abs() > LEVEL_BOUND) {
            return Err(Error::UnboundedFiltration(format!("level {bad} exceeds {LEVEL_BOUND}")));
        }
        let levels: BTreeMap<i64, Vec<i64>> =
            levels.into_iter().filter(|(n, _)| complex.dim(*n) > 0).collect();
        let f = FilteredComplex { complex, levels };
        for (n, d) in f.complex.nonzero_differentials() {
            let src = f.levels_at(n);
            let tgt = f.levels_at(n + i64::from(f.complex.direction()));
            for (c, col) in d.columns().iter().enumerate() {
                if let Some((r, _)) = col.iter().find(|(r, _)| tgt[*r] > src[c]) {
                    return Err(Error::FiltrationViolation(format!(
                        "d_{n} sends basis vector {c} (level {}) onto vector {r} (level {})",
                        src[c], tgt[*r]
                    )));
                }
            }
        }
        Ok(f)
    }

    /// Every basis vector at level 0.
    pub fn trivial(complex: ChainComplex) -> Self {
        let levels = complex.dims().iter().map(|(n, d)| (*n, vec![0; *d])).collect();
        FilteredComplex { complex, levels }
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn levels_at(&self, n: i64) -> &[i64] {
        self.levels.get(&n).map_or(&[], Vec::as_slice)
    }

    /// Lowest and highest level in use, or `(0, 0)` for the zero complex.
    pub fn bounds(&self) -> (i64, i64) {
        let mut it = self.levels.values().flatten();
        match it.next() {
            None => (0, 0),
            Some(&first) => it.fold((first, first), |(lo, hi), &l| (lo.min(l), hi.max(l))),
        }
    }

    pub fn width(&self) -> i64 {
        let (lo, hi) = self.bounds();
        hi - lo
    }

    /// Basis indices of `F_p C_n`.
    pub fn filtered_indices(&self, n: i64, p: i64) -> Vec<usize> {
        self.levels_at(n).iter().enumerate().filter(|(_, l)| **l <= p).map(|(i, _)| i).collect()
    }

    /// `{x in F_p C_n : dx in F_q C_{n+dir}}` as a spanning set of vectors in `C_n`.
    pub fn preimage_space(&self, n: i64, p: i64, q: i64) -> Vec<SparseVec> {
        let cols = self.filtered_indices(n, p);
        if cols.is_empty() {
            return Vec::new();
        }
        let tgt = n + i64::from(self.complex.direction());
        let rows: Vec<usize> = self
            .levels_at(tgt)
            .iter()
            .enumerate()
            .filter(|(_, l)| **l > q)
            .map(|(i, _)| i)
            .collect();
        let d = self.complex.differential(n).select(&rows, &cols);
        d.kernel_basis()
            .into_iter()
            .map(|v| v.into_iter().map(|(i, x)| (cols[i], x)).collect())
            .collect()
    }

    /// The associated graded piece `F_k / F_{k-1}` as a complex.
    pub fn graded_piece(&self, k: i64) -> ChainComplex {
        let dir = i64::from(self.complex.direction());
        let idx: BTreeMap<i64, Vec<usize>> = self
            .complex
            .degrees()
            .into_iter()
            .map(|n| {
                let v: Vec<usize> = self
                    .levels_at(n)
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| **l == k)
                    .map(|(i, _)| i)
                    .collect();
                (n, v)
            })
            .collect();
        let dims = idx.iter().map(|(n, v)| (*n, v.len())).collect();
        let mut diffs = BTreeMap::new();
        for (n, cols) in &idx {
            if let Some(rows) = idx.get(&(n + dir)) {
                diffs.insert(*n, self.complex.differential(*n).select(rows, cols));
            }
        }
        ChainComplex::new(self.complex.direction(), dims, diffs)
            .expect("graded piece of a filtered complex")
    }

    /// Levels that occur, ascending.
    pub fn level_set(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.levels.values().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// A chain map given by one matrix per degree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainMap {
    pub maps: BTreeMap<i64, SparseMatrix>,
}

impl ChainMap {
    pub fn at(&self, n: i64, rows: usize, cols: usize) -> SparseMatrix {
        self.maps.get(&n).cloned().unwrap_or_else(|| SparseMatrix::zeros(rows, cols))
    }

    pub fn identity(c: &ChainComplex) -> Self {
        ChainMap { maps: c.dims().iter().map(|(n, d)| (*n, SparseMatrix::identity(*d))).collect() }
    }

    /// Checks shapes and `g d = d f`.
    pub fn check(&self, src: &ChainComplex, tgt: &ChainComplex) -> Result<()> {
        if src.direction() != tgt.direction() {
            return Err(Error::DirectionMismatch(src.direction(), tgt.direction()));
        }
        let dir = i64::from(src.direction());
        for (n, m) in &self.maps {
            if m.shape() != (tgt.dim(*n), src.dim(*n)) {
                return Err(Error::Dimension(format!("map at degree {n} has shape {:?}", m.shape())));
            }
        }
        let mut degrees = src.degrees();
        degrees.extend(tgt.degrees());
        degrees.sort_unstable();
        degrees.dedup();
        for n in degrees {
            let f_n = self.at(n, tgt.dim(n), src.dim(n));
            let f_next = self.at(n + dir, tgt.dim(n + dir), src.dim(n + dir));
            if f_next.mul(&src.differential(n))? != tgt.differential(n).mul(&f_n)? {
                return Err(Error::IllFormedComplex(format!(
                    "map does not commute with differentials at degree {n}"
                )));
            }
        }
        Ok(())
    }
}

/// Exchange form: a complex plus per-degree levels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilteredComplexJson {
    pub complex: ComplexJson,
    pub levels: BTreeMap<i64, Vec<i64>>,
}

impl TryFrom<FilteredComplexJson> for FilteredComplex {
    type Error = Error;
    fn try_from(j: FilteredComplexJson) -> Result<Self> {
        FilteredComplex::new(ChainComplex::try_from(j.complex)?, j.levels)
    }
}

impl From<&FilteredComplex> for FilteredComplexJson {
    fn from(f: &FilteredComplex) -> Self {
        FilteredComplexJson { complex: ComplexJson::from(&f.complex), levels: f.levels.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_step() -> FilteredComplex {
        let c = ChainComplex::new(
            -1,
            BTreeMap::from([(0, 1), (1, 1)]),
            BTreeMap::from([(1, SparseMatrix::identity(1))]),
        )
        .unwrap();
        FilteredComplex::new(c, BTreeMap::from([(0, vec![0]), (1, vec![1])])).unwrap()
    }

    #[test]
    fn filtration_is_checked() {
        let c = two_step().complex().clone();
        let bad = FilteredComplex::new(c.clone(), BTreeMap::from([(0, vec![1]), (1, vec![0])]));
        assert!(matches!(bad, Err(Error::FiltrationViolation(_))));
        let unbounded = FilteredComplex::new(c, BTreeMap::from([(0, vec![0]), (1, vec![1 << 30])]));
        assert!(matches!(unbounded, Err(Error::UnboundedFiltration(_))));
    }

    #[test]
    fn graded_pieces_and_preimages() {
        let f = two_step();
        assert_eq!(f.bounds(), (0, 1));
        assert_eq!(f.graded_piece(0).homology_dims(), BTreeMap::from([(0, 1)]));
        assert_eq!(f.graded_piece(1).homology_dims(), BTreeMap::from([(1, 1)]));
        // Nothing in F_1 C_1 has boundary in F_{-1}.
        assert!(f.preimage_space(1, 1, -1).is_empty());
        assert_eq!(f.preimage_space(1, 1, 0).len(), 1);
    }

    #[test]
    fn identity_is_a_chain_map() {
        let f = two_step();
        ChainMap::identity(f.complex()).check(f.complex(), f.complex()).unwrap();
    }
}
