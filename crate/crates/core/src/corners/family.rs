use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cw::{cohomology, CwComplex, CwJson};
use super::laurent::laurent_space;
use super::local_system::{dense, local_system_cohomology, BaseJson, BaseSpace, LocalSystem};
use super::poset::FacePoset;
use crate::error::{Error, Result};
use crate::linalg::{Rational, SparseMatrix};

/// `dim H^h(B; H^k(L(fibre)))` for each `(k, h)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyTable {
    pub fiber_dims: Vec<usize>,
    #[serde(with = "crate::tables")]
    pub entries: BTreeMap<(usize, usize), usize>,
}

impl FamilyTable {
    /// Sum of the entries with `k + h = n`.
    pub fn total(&self, n: usize) -> usize {
        self.entries.iter().filter(|((k, h), _)| k + h == n).map(|(_, d)| d).sum()
    }

    pub fn max_total_degree(&self) -> usize {
        self.entries.keys().map(|(k, h)| k + h).max().unwrap_or(0)
    }
}

/// Input of a family computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyJson {
    pub base: BaseJson,
    pub fiber: FacePoset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<CwJson>,
    /// For each fibre degree `k`, a dense matrix per 1-cell of the base
    /// acting on `H^k` of the fibre's Laurent space. Missing degrees are
    /// trivial.
    #[serde(default)]
    pub monodromy: BTreeMap<usize, Vec<Vec<Vec<Rational>>>>,
}

/// Cohomology of the base with coefficients in the local systems formed by
/// the fibrewise Laurent cohomology.
pub fn family_cohomology(
    base: &BaseSpace,
    fiber: &FacePoset,
    realization: Option<&CwComplex>,
    monodromy: &BTreeMap<usize, Vec<SparseMatrix>>,
) -> Result<FamilyTable> {
    let l = laurent_space(fiber, realization)?;
    let fiber_dims = cohomology(&l.cw);
    if let Some(k) = monodromy.keys().find(|k| **k >= fiber_dims.len()) {
        return Err(Error::RankMismatch(format!("monodromy given for fibre degree {k} beyond the fibre dimension")));
    }
    let mut entries = BTreeMap::new();
    for (k, &r) in fiber_dims.iter().enumerate() {
        let ls = match monodromy.get(&k) {
            Some(m) => LocalSystem::new(base.clone(), r, m.clone())?,
            None => LocalSystem::trivial(base.clone(), r),
        };
        for (h, d) in local_system_cohomology(&ls)?.into_iter().enumerate() {
            entries.insert((k, h), d);
        }
    }
    Ok(FamilyTable { fiber_dims, entries })
}

impl FamilyJson {
    pub fn run(self) -> Result<FamilyTable> {
        let base = BaseSpace::try_from(self.base)?;
        let realization = self.realization.map(|r| r.into_cw(Some(&self.fiber))).transpose()?;
        let fiber_dims = cohomology(&laurent_space(&self.fiber, realization.as_ref())?.cw);
        let mut mono = BTreeMap::new();
        for (k, mats) in self.monodromy {
            let r = fiber_dims.get(k).copied().ok_or_else(|| {
                Error::RankMismatch(format!("monodromy given for fibre degree {k} beyond the fibre dimension"))
            })?;
            mono.insert(k, mats.iter().map(|m| dense(m, r)).collect::<Result<Vec<_>>>()?);
        }
        family_cohomology(&base, &self.fiber, realization.as_ref(), &mono)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::ChainComplex;

    fn flip() -> BTreeMap<usize, Vec<SparseMatrix>> {
        BTreeMap::from([(1, vec![SparseMatrix::from_int_rows(&[&[0, 1], &[1, 0]])])])
    }

    #[test]
    fn trivial_and_flipped_interval_bundles() {
        let i = FacePoset::interval();
        let t = family_cohomology(&BaseSpace::circle(), &i, None, &BTreeMap::new()).unwrap();
        let want = BTreeMap::from([((0, 0), 1), ((0, 1), 1), ((1, 0), 2), ((1, 1), 2)]);
        assert_eq!(t.entries, want);
        let f = family_cohomology(&BaseSpace::circle(), &i, None, &flip()).unwrap();
        assert!(f.entries.values().all(|d| *d == 1));
        assert_eq!(f.entries.len(), 4);
    }

    /// Chains of the mapping torus of a cellular self-map `phi` of `x`:
    /// cells `c` and `c x e`, with `d(c x e) = (dc) x e + (-1)^|c| (phi(c) - c)`.
    fn mapping_torus(x: &ChainComplex, phi: &BTreeMap<i64, SparseMatrix>) -> ChainComplex {
        let top = *x.degrees().last().unwrap();
        let dims: BTreeMap<i64, usize> = (0..=top + 1).map(|n| (n, x.dim(n) + x.dim(n - 1))).collect();
        let mut diffs = BTreeMap::new();
        for n in 1..=top + 1 {
            let mut t = Vec::new();
            let off_row = x.dim(n - 1);
            for (r, c, v) in x.differential(n).triplets() {
                t.push((r, c, v));
            }
            let sign: i64 = if (n - 1) % 2 == 0 { 1 } else { -1 };
            let p = &phi[&(n - 1)];
            for c in 0..x.dim(n - 1) {
                for (r, v) in p.column(c) {
                    t.push((*r, x.dim(n) + c, v.clone() * Rational::from(sign)));
                }
                t.push((c, x.dim(n) + c, Rational::from(-sign)));
            }
            for (r, c, v) in x.differential(n - 1).triplets() {
                t.push((off_row + r, x.dim(n) + c, v));
            }
            diffs.insert(n, SparseMatrix::from_triplets(dims[&(n - 1)], dims[&n], t).unwrap());
        }
        ChainComplex::new(-1, dims, diffs).unwrap()
    }

    #[test]
    fn flip_matches_mapping_torus() {
        let l = laurent_space(&FacePoset::interval(), None).unwrap();
        let x = l.cw.chains().clone();
        let mut phi = BTreeMap::new();
        let mut p0 = Vec::new();
        for (i, c) in l.cells[&0].iter().enumerate() {
            let j = l.cells[&0].iter().position(|d| d.face == 1 - c.face).unwrap();
            p0.push((j, i, 1));
        }
        let mut p1 = Vec::new();
        for (i, c) in l.cells[&1].iter().enumerate() {
            if c.face == 2 {
                p1.push((i, i, -1));
            } else {
                let j = l.cells[&1].iter().position(|d| d.face == 1 - c.face).unwrap();
                p1.push((j, i, 1));
            }
        }
        let mk = |v: Vec<(usize, usize, i64)>, n: usize| {
            SparseMatrix::from_triplets(n, n, v.into_iter().map(|(a, b, c)| (a, b, Rational::from(c)))).unwrap()
        };
        phi.insert(0, mk(p0, 2));
        phi.insert(1, mk(p1, 3));
        let t = mapping_torus(&x, &phi);
        let table = family_cohomology(&BaseSpace::circle(), &FacePoset::interval(), None, &flip()).unwrap();
        for n in 0..=2 {
            assert_eq!(t.homology_dim(n), table.total(n as usize), "degree {n}");
        }
    }
}
