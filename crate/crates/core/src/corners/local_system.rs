use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cw::{CwComplex, CwJson};
use crate::complexes::ChainComplex;
use crate::error::{Error, Result};
use crate::linalg::{Rational, SparseMatrix};

/// The boundary loop of a 2-cell: a base vertex and a sequence of
/// `(edge, +1 | -1)` steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word {
    pub base: usize,
    pub steps: Vec<(usize, i8)>,
}

/// A CW complex with the data needed to twist its cochains: the endpoints
/// of every 1-cell and a boundary word for every 2-cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseSpace {
    cw: CwComplex,
    edges: Vec<(usize, usize)>,
    words: Vec<Word>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaseJson {
    pub cw: CwJson,
    /// `[tail, head]` per 1-cell.
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub words: Vec<Word>,
}

impl BaseSpace {
    pub fn new(cw: CwComplex, edges: Vec<(usize, usize)>, words: Vec<Word>) -> Result<Self> {
        let (v, e, f) = (cw.cells(0), cw.cells(1), cw.cells(2));
        if edges.len() != e {
            return Err(Error::InvalidCw(format!("{} edge endpoint pairs for {e} one-cells", edges.len())));
        }
        let d1 = cw.boundary(1);
        for (i, &(t, h)) in edges.iter().enumerate() {
            if t >= v || h >= v {
                return Err(Error::InvalidCw(format!("edge {i} names a missing vertex")));
            }
            let expected: Vec<(usize, Rational)> = if t == h {
                vec![]
            } else if t < h {
                vec![(t, Rational::from(-1)), (h, Rational::one())]
            } else {
                vec![(h, Rational::one()), (t, Rational::from(-1))]
            };
            if d1.column(i) != expected.as_slice() {
                return Err(Error::InvalidCw(format!("edge {i} endpoints ({t}, {h}) disagree with its boundary")));
            }
        }
        if !words.is_empty() {
            if words.len() != f {
                return Err(Error::InvalidCw(format!("{} boundary words for {f} two-cells", words.len())));
            }
            let d2 = cw.boundary(2);
            for (i, w) in words.iter().enumerate() {
                let mut at = w.base;
                let mut sum: BTreeMap<usize, i64> = BTreeMap::new();
                for &(edge, s) in &w.steps {
                    let &(t, h) = edges
                        .get(edge)
                        .ok_or_else(|| Error::InvalidCw(format!("word {i} names missing edge {edge}")))?;
                    let (from, to) = match s {
                        1 => (t, h),
                        -1 => (h, t),
                        _ => return Err(Error::InvalidCw(format!("word {i} has step sign {s}"))),
                    };
                    if from != at {
                        return Err(Error::InvalidCw(format!("word {i} is not a path at edge {edge}")));
                    }
                    at = to;
                    *sum.entry(edge).or_default() += i64::from(s);
                }
                if at != w.base {
                    return Err(Error::InvalidCw(format!("word {i} is not closed")));
                }
                let sum: Vec<(usize, Rational)> =
                    sum.into_iter().filter(|(_, c)| *c != 0).map(|(e, c)| (e, Rational::from(c))).collect();
                if d2.column(i) != sum.as_slice() {
                    return Err(Error::InvalidCw(format!("word {i} disagrees with the cellular boundary")));
                }
            }
        }
        Ok(BaseSpace { cw, edges, words })
    }

    pub fn cw(&self) -> &CwComplex {
        &self.cw
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// One vertex, one loop.
    pub fn circle() -> Self {
        BaseSpace::new(super::cw::circle(), vec![(0, 0)], vec![]).expect("circle")
    }

    /// One vertex, loops `a`, `b`, and a 2-cell attached along `a b a^-1 b^-1`.
    pub fn torus() -> Self {
        let w = Word { base: 0, steps: vec![(0, 1), (1, 1), (0, -1), (1, -1)] };
        BaseSpace::new(super::cw::torus(), vec![(0, 0), (0, 0)], vec![w]).expect("torus")
    }
}

impl TryFrom<BaseJson> for BaseSpace {
    type Error = Error;
    fn try_from(j: BaseJson) -> Result<Self> {
        BaseSpace::new(j.cw.into_cw(None)?, j.edges, j.words)
    }
}

impl From<&BaseSpace> for BaseJson {
    fn from(b: &BaseSpace) -> Self {
        BaseJson { cw: CwJson::from(&b.cw), edges: b.edges.clone(), words: b.words.clone() }
    }
}

/// A flat rank-`r` local system: one invertible matrix per 1-cell,
/// transporting the fibre at the tail to the fibre at the head.
#[derive(Debug, Clone)]
pub struct LocalSystem {
    base: BaseSpace,
    rank: usize,
    monodromy: Vec<SparseMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalSystemJson {
    pub base: BaseJson,
    pub rank: usize,
    /// Dense `rank x rank` matrix per 1-cell.
    pub monodromy: Vec<Vec<Vec<Rational>>>,
}

impl LocalSystem {
    pub fn new(base: BaseSpace, rank: usize, monodromy: Vec<SparseMatrix>) -> Result<Self> {
        if monodromy.len() != base.edges.len() {
            return Err(Error::RankMismatch(format!(
                "{} monodromy matrices for {} one-cells",
                monodromy.len(),
                base.edges.len()
            )));
        }
        for (i, m) in monodromy.iter().enumerate() {
            if m.shape() != (rank, rank) {
                return Err(Error::RankMismatch(format!(
                    "monodromy on edge {i} has shape {:?}, fibre rank is {rank}",
                    m.shape()
                )));
            }
            if m.rank() != rank {
                return Err(Error::RankMismatch(format!("monodromy on edge {i} is not invertible")));
            }
        }
        let ls = LocalSystem { base, rank, monodromy };
        if !ls.is_trivial() {
            if ls.base.cw.top_dim() > 2 {
                return Err(Error::InvalidCw("twisted coefficients need a base of dimension at most 2".into()));
            }
            if ls.base.cw.cells(2) > 0 && ls.base.words.is_empty() {
                return Err(Error::InvalidCw("twisted coefficients need a boundary word for every 2-cell".into()));
            }
        }
        for (i, w) in ls.base.words.iter().enumerate() {
            let hol = ls.holonomy(w)?;
            if hol != SparseMatrix::identity(rank) {
                return Err(Error::FlatnessViolation(format!("holonomy around 2-cell {i} is not the identity")));
            }
        }
        Ok(ls)
    }

    /// The constant system with fibre of dimension `rank`.
    pub fn trivial(base: BaseSpace, rank: usize) -> Self {
        let m = vec![SparseMatrix::identity(rank); base.edges.len()];
        LocalSystem::new(base, rank, m).expect("trivial local system")
    }

    pub fn base(&self) -> &BaseSpace {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn monodromy(&self) -> &[SparseMatrix] {
        &self.monodromy
    }

    pub fn is_trivial(&self) -> bool {
        let id = SparseMatrix::identity(self.rank);
        self.monodromy.iter().all(|m| *m == id)
    }

    fn step(&self, edge: usize, sign: i8) -> Result<SparseMatrix> {
        if sign > 0 {
            Ok(self.monodromy[edge].clone())
        } else {
            self.monodromy[edge]
                .inverse()
                .ok_or_else(|| Error::Invariant(format!("monodromy on edge {edge} lost invertibility")))
        }
    }

    /// Transport around a closed word.
    pub fn holonomy(&self, w: &Word) -> Result<SparseMatrix> {
        let mut q = SparseMatrix::identity(self.rank);
        for &(e, s) in &w.steps {
            q = self.step(e, s)?.mul(&q)?;
        }
        Ok(q)
    }

    /// The twisted cellular cochain complex. The fibre over a cell is
    /// identified with the fibre at its tail vertex (edges) or base vertex
    /// (2-cells).
    pub fn cochain_complex(&self) -> Result<ChainComplex> {
        let r = self.rank;
        let cw = &self.base.cw;
        let dims: BTreeMap<i64, usize> = cw.chains().dims().iter().map(|(n, d)| (*n, d * r)).collect();
        let mut diffs = BTreeMap::new();
        if self.is_trivial() || r == 0 {
            for (n, d) in cw.chains().nonzero_differentials() {
                diffs.insert(n - 1, kron_identity(&d.transpose(), r)?);
            }
        } else {
            let mut t0 = Vec::new();
            for (e, &(t, h)) in self.base.edges.iter().enumerate() {
                let back = self.step(e, -1)?;
                push_block(&mut t0, e * r, h * r, &back, 1);
                push_block(&mut t0, e * r, t * r, &SparseMatrix::identity(r), -1);
            }
            diffs.insert(0, SparseMatrix::from_triplets(dims.get(&1).copied().unwrap_or(0), cw.cells(0) * r, t0)?);
            let mut t1 = Vec::new();
            for (f, w) in self.base.words.iter().enumerate() {
                let mut q = SparseMatrix::identity(r);
                for &(e, s) in &w.steps {
                    let next = self.step(e, s)?.mul(&q)?;
                    let (block, sign) = if s > 0 { (q.clone(), 1) } else { (next.clone(), -1) };
                    let inv = block
                        .inverse()
                        .ok_or_else(|| Error::Invariant("path transport lost invertibility".into()))?;
                    push_block(&mut t1, f * r, e * r, &inv, sign);
                    q = next;
                }
            }
            if cw.cells(2) > 0 {
                diffs.insert(1, SparseMatrix::from_triplets(cw.cells(2) * r, cw.cells(1) * r, t1)?);
            }
        }
        ChainComplex::new(1, dims, diffs).map_err(|e| Error::Invariant(format!("twisted cochains: {e}")))
    }
}

fn push_block(out: &mut Vec<(usize, usize, Rational)>, row: usize, col: usize, m: &SparseMatrix, sign: i64) {
    for (r, c, v) in m.triplets() {
        out.push((row + r, col + c, if sign < 0 { -v } else { v }));
    }
}

fn kron_identity(m: &SparseMatrix, r: usize) -> Result<SparseMatrix> {
    let mut t = Vec::new();
    for (i, j, v) in m.triplets() {
        for a in 0..r {
            t.push((i * r + a, j * r + a, v.clone()));
        }
    }
    SparseMatrix::from_triplets(m.nrows() * r, m.ncols() * r, t)
}

/// `dim H^n(B; L)` for `n = 0..=dim B`.
pub fn local_system_cohomology(ls: &LocalSystem) -> Result<Vec<usize>> {
    let c = ls.cochain_complex()?;
    Ok((0..=ls.base.cw.top_dim()).map(|n| c.homology_dim(n)).collect())
}

impl TryFrom<LocalSystemJson> for LocalSystem {
    type Error = Error;
    fn try_from(j: LocalSystemJson) -> Result<Self> {
        let base = BaseSpace::try_from(j.base)?;
        let mats = j.monodromy.iter().map(|m| dense(m, j.rank)).collect::<Result<Vec<_>>>()?;
        LocalSystem::new(base, j.rank, mats)
    }
}

/// A dense square matrix given as rows.
pub fn dense(rows: &[Vec<Rational>], rank: usize) -> Result<SparseMatrix> {
    if rows.len() != rank || rows.iter().any(|r| r.len() != rank) {
        return Err(Error::RankMismatch(format!("expected a {rank} x {rank} matrix")));
    }
    Ok(SparseMatrix::from_dense(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn twisted_circle_oracle(t: &SparseMatrix) -> (usize, usize) {
        let n = t.nrows();
        let k = t.sub(&SparseMatrix::identity(n)).unwrap().rank();
        (n - k, n - k)
    }

    #[test]
    fn twisted_circles() {
        for m in [
            SparseMatrix::from_int_rows(&[&[-1]]),
            SparseMatrix::from_int_rows(&[&[0, 1], &[1, 0]]),
            SparseMatrix::from_int_rows(&[&[1, 1], &[0, 1]]),
            SparseMatrix::from_int_rows(&[&[2, 0], &[0, 1]]),
        ] {
            let r = m.nrows();
            let ls = LocalSystem::new(BaseSpace::circle(), r, vec![m.clone()]).unwrap();
            let h = local_system_cohomology(&ls).unwrap();
            let (h0, h1) = twisted_circle_oracle(&m);
            assert_eq!(h, vec![h0, h1]);
        }
    }

    #[test]
    fn torus_with_commuting_monodromy() {
        let a = SparseMatrix::from_int_rows(&[&[-1]]);
        let ls = LocalSystem::new(BaseSpace::torus(), 1, vec![a, SparseMatrix::identity(1)]).unwrap();
        assert_eq!(local_system_cohomology(&ls).unwrap(), vec![0, 0, 0]);
        let triv = LocalSystem::trivial(BaseSpace::torus(), 2);
        assert_eq!(local_system_cohomology(&triv).unwrap(), vec![2, 4, 2]);
    }

    #[test]
    fn non_flat_rejected() {
        let a = SparseMatrix::from_int_rows(&[&[1, 1], &[0, 1]]);
        let b = SparseMatrix::from_int_rows(&[&[1, 0], &[1, 1]]);
        let r = LocalSystem::new(BaseSpace::torus(), 2, vec![a, b]);
        assert!(matches!(r, Err(Error::FlatnessViolation(_))));
    }

    #[test]
    fn wrong_rank_rejected() {
        let r = LocalSystem::new(BaseSpace::circle(), 2, vec![SparseMatrix::identity(1)]);
        assert!(matches!(r, Err(Error::RankMismatch(_))));
    }
}
