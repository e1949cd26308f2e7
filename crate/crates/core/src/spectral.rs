//! Spectral sequence of a bounded filtered complex.
//!
//! Bidegrees are `(k, h)` with `k` the filtration level and `k + h` the
//! total degree. With `Z^r_k = F_k ∩ d^{-1}(F_{k-r})` the pages are
//!
//! `E^r_k = Z^r_k / (Z^{r-1}_{k-1} + d Z^{r-1}_{k+r-1})`
//!
//! and `d^r : E^r_{k,h} -> E^r_{k-r, h+r+dir}`, so for chain complexes
//! (`dir = -1`) the target is `(k-r, h+r-1)`. Classes are stored as vectors
//! of the underlying complex.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complexes::{ChainMap, FilteredComplex};
use crate::error::{Error, Result};
use crate::linalg::{self, EchelonBasis, Quotient, SparseMatrix, SparseVec};

/// One group `E^r_{k,h}` with its representatives.
#[derive(Debug, Clone)]
pub struct PageGroup {
    pub k: i64,
    pub h: i64,
    pub quotient: Quotient,
}

impl PageGroup {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn degree(&self) -> i64 {
        self.k + self.h
    }

    pub fn representatives(&self) -> &[SparseVec] {
        &self.quotient.representatives
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageDifferential {
    pub from: (i64, i64),
    pub to: (i64, i64),
    pub matrix: SparseMatrix,
}

#[derive(Debug, Clone)]
pub struct SpectralPage {
    pub r: usize,
    pub groups: BTreeMap<(i64, i64), PageGroup>,
    pub differentials: Vec<PageDifferential>,
}

impl SpectralPage {
    pub fn dim(&self, k: i64, h: i64) -> usize {
        self.groups.get(&(k, h)).map_or(0, PageGroup::dim)
    }

    /// Nonzero dimensions keyed by `(k, h)`.
    pub fn dims(&self) -> BTreeMap<(i64, i64), usize> {
        self.groups
            .iter()
            .filter(|(_, g)| g.dim() > 0)
            .map(|(kh, g)| (*kh, g.dim()))
            .collect()
    }

    /// `sum_k dim E_{k, n-k}`.
    pub fn total_dim(&self, n: i64) -> usize {
        self.groups.values().filter(|g| g.degree() == n).map(PageGroup::dim).sum()
    }

    fn differential_from(&self, kh: (i64, i64)) -> Option<&PageDifferential> {
        self.differentials.iter().find(|d| d.from == kh)
    }

    pub fn report(&self) -> PageReport {
        PageReport {
            r: self.r,
            groups: self
                .dims()
                .into_iter()
                .map(|((k, h), dim)| GroupReport { k, h, dim })
                .collect(),
            differentials: self
                .differentials
                .iter()
                .filter(|d| !d.matrix.is_zero())
                .cloned()
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupReport {
    pub k: i64,
    pub h: i64,
    pub dim: usize,
}

/// Exchange form `{r, groups: [{k, h, dim}], differentials}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageReport {
    pub r: usize,
    pub groups: Vec<GroupReport>,
    pub differentials: Vec<PageDifferential>,
}

fn z_space(f: &FilteredComplex, r: i64, k: i64, n: i64) -> Vec<SparseVec> {
    f.preimage_space(n, k, k - r)
}

fn group(f: &FilteredComplex, r: i64, k: i64, n: i64) -> Quotient {
    let dir = i64::from(f.complex().direction());
    let num = z_space(f, r, k, n);
    let mut den = z_space(f, r - 1, k - 1, n);
    if !num.is_empty() {
        let d = f.complex().differential(n - dir);
        den.extend(z_space(f, r - 1, k + r - 1, n - dir).iter().map(|x| d.mul_vec(x)));
    }
    linalg::quotient_of_spans(&num, &den)
}

fn grid(f: &FilteredComplex) -> Vec<(i64, i64)> {
    let levels = f.level_set();
    let mut out = Vec::new();
    for n in f.complex().degrees() {
        for &k in &levels {
            out.push((k, n));
        }
    }
    out
}

/// Computes `E^r` with its differential.
pub fn page(f: &FilteredComplex, r: usize) -> Result<SpectralPage> {
    let ri = r as i64;
    let dir = i64::from(f.complex().direction());
    let cells = grid(f);
    let quotients = crate::par::map(&cells, |&(k, n)| group(f, ri, k, n));
    let groups: BTreeMap<(i64, i64), PageGroup> = cells
        .iter()
        .zip(quotients)
        .map(|(&(k, n), quotient)| ((k, n - k), PageGroup { k, h: n - k, quotient }))
        .collect();
    let mut differentials = Vec::new();
    for (&(k, h), g) in &groups {
        let n = k + h;
        let to = (k - ri, n + dir - (k - ri));
        let d = f.complex().differential(n);
        let target = groups.get(&to);
        let rows = target.map_or(0, PageGroup::dim);
        let mut cols = Vec::with_capacity(g.dim());
        for z in g.representatives() {
            let dz = d.mul_vec(z);
            let c = match target {
                Some(t) => t.quotient.class_of(&dz),
                None if dz.is_empty() => Some(Vec::new()),
                None => group(f, ri, to.0, n + dir).class_of(&dz),
            };
            cols.push(c.ok_or_else(|| {
                Error::Invariant(format!("d^{r} of a class at ({k}, {h}) is not a class at {to:?}"))
            })?);
        }
        differentials.push(PageDifferential {
            from: (k, h),
            to,
            matrix: SparseMatrix::from_columns(rows, cols),
        });
    }
    let page = SpectralPage { r, groups, differentials };
    for d in &page.differentials {
        if let Some(next) = page.differential_from(d.to) {
            if !next.matrix.mul(&d.matrix)?.is_zero() {
                return Err(Error::Invariant(format!("d^{r} * d^{r} != 0 at {:?}", d.from)));
            }
        }
    }
    Ok(page)
}

/// `E^{r+1}` must be the homology of `(E^r, d^r)`, checked dimensionally.
fn check_successor(prev: &SpectralPage, next: &SpectralPage) -> Result<()> {
    for (&kh, g) in &prev.groups {
        let out = prev.differential_from(kh).map_or(0, |d| d.matrix.rank());
        let inc: usize =
            prev.differentials.iter().filter(|d| d.to == kh).map(|d| d.matrix.rank()).sum();
        let expected = g.dim() - out - inc;
        if next.dim(kh.0, kh.1) != expected {
            return Err(Error::Invariant(format!(
                "E^{} at {kh:?} has dim {} but H(E^{}) has dim {expected}",
                next.r,
                next.dim(kh.0, kh.1),
                prev.r
            )));
        }
    }
    Ok(())
}

/// Pages `E^1 .. E^max_r`, each checked against the homology of the previous one.
pub fn pages(f: &FilteredComplex, max_r: usize) -> Result<Vec<SpectralPage>> {
    let mut out: Vec<SpectralPage> = Vec::new();
    for r in 1..=max_r.max(1) {
        let p = page(f, r)?;
        if let Some(prev) = out.last() {
            check_successor(prev, &p)?;
        }
        out.push(p);
    }
    Ok(out)
}

/// The stable page with the first page index at which it was reached.
#[derive(Debug, Clone)]
pub struct EInfinity {
    pub page: SpectralPage,
    pub stabilized_at: usize,
}

/// `E^∞`, which for a filtration of width `w` equals `E^{w+1}`.
pub fn e_infinity(f: &FilteredComplex) -> Result<EInfinity> {
    let last = f.width() as usize + 1;
    let all = pages(f, last)?;
    let stable = all.last().expect("at least one page").clone();
    let target = stable.dims();
    let stabilized_at = all.iter().find(|p| p.dims() == target).map_or(last, |p| p.r);
    Ok(EInfinity { page: stable, stabilized_at })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeConvergence {
    pub n: i64,
    pub homology_dim: usize,
    pub e_infinity_dim: usize,
    /// `(p, dim F_p H_n)` for every level `p`.
    pub filtration: Vec<(i64, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub degrees: Vec<DegreeConvergence>,
    pub stabilized_at: usize,
}

/// Checks `dim H_n = sum_k dim E^∞_{k, n-k}` and that the induced filtration
/// of `H_n` has `E^∞` as its graded pieces.
pub fn check_convergence(f: &FilteredComplex) -> Result<ConvergenceReport> {
    let einf = e_infinity(f)?;
    let c = f.complex();
    let dir = i64::from(c.direction());
    let (_, hi) = f.bounds();
    let levels = f.level_set();
    let mut degrees = Vec::new();
    for n in c.degrees() {
        let hdim = c.homology_dim(n);
        let edim = einf.page.total_dim(n);
        let d_in = c.differential(n - dir);
        let mut filtration = Vec::new();
        let mut prev = 0;
        for &p in &levels {
            let cycles = f.preimage_space(n, p, i64::MIN).len();
            let mut bd = EchelonBasis::new();
            for x in f.preimage_space(n - dir, hi, p) {
                bd.insert(&d_in.mul_vec(&x));
            }
            let dim = cycles - bd.rank();
            let piece = dim - prev;
            if piece != einf.page.dim(p, n - p) {
                return Err(Error::Invariant(format!(
                    "F_{p} H_{n} / F_{{p-1}} has dim {piece}, E^inf has {}",
                    einf.page.dim(p, n - p)
                )));
            }
            prev = dim;
            filtration.push((p, dim));
        }
        if hdim != edim {
            return Err(Error::Invariant(format!("dim H_{n} = {hdim} but E^inf sums to {edim}")));
        }
        degrees.push(DegreeConvergence { n, homology_dim: hdim, e_infinity_dim: edim, filtration });
    }
    Ok(ConvergenceReport { degrees, stabilized_at: einf.stabilized_at })
}

/// Matrices of the maps `E^r(f) -> E^r(g)` induced by a filtered chain map,
/// keyed by source bidegree.
#[derive(Debug, Clone)]
pub struct PageMap {
    pub r: usize,
    pub blocks: BTreeMap<(i64, i64), SparseMatrix>,
}

impl PageMap {
    pub fn is_isomorphism(&self, src: &SpectralPage, tgt: &SpectralPage) -> bool {
        let mut keys: Vec<(i64, i64)> = src.dims().into_keys().collect();
        keys.extend(tgt.dims().into_keys());
        keys.iter().all(|kh| {
            let (a, b) = (src.dim(kh.0, kh.1), tgt.dim(kh.0, kh.1));
            a == b && self.blocks.get(kh).map_or(a == 0, |m| m.rank() == a)
        })
    }
}

/// Maps induced on `E^1 .. E^max_r`, checked to commute with every `d^r`.
pub fn induced_map_on_pages(
    f: &FilteredComplex,
    g: &FilteredComplex,
    map: &ChainMap,
    max_r: usize,
) -> Result<Vec<PageMap>> {
    map.check(f.complex(), g.complex())?;
    for (n, m) in &map.maps {
        let (src, tgt) = (f.levels_at(*n), g.levels_at(*n));
        for (c, col) in m.columns().iter().enumerate() {
            if let Some((r, _)) = col.iter().find(|(r, _)| tgt[*r] > src[c]) {
                return Err(Error::FiltrationViolation(format!(
                    "map sends vector {c} of level {} in degree {n} to level {}",
                    src[c], tgt[*r]
                )));
            }
        }
    }
    let fp = pages(f, max_r)?;
    let gp = pages(g, max_r)?;
    let mut out = Vec::new();
    for (pf, pg) in fp.iter().zip(&gp) {
        let mut blocks = BTreeMap::new();
        for (&kh, grp) in &pf.groups {
            let n = kh.0 + kh.1;
            let m = map.at(n, g.complex().dim(n), f.complex().dim(n));
            let target = pg.groups.get(&kh);
            let mut cols = Vec::new();
            for z in grp.representatives() {
                let img = m.mul_vec(z);
                let c = match target {
                    Some(t) => t.quotient.class_of(&img),
                    None => img.is_empty().then(Vec::new),
                };
                cols.push(c.ok_or_else(|| Error::Invariant("image is not a class".into()))?);
            }
            blocks.insert(kh, SparseMatrix::from_columns(target.map_or(0, PageGroup::dim), cols));
        }
        for d in &pf.differentials {
            let Some(dg) = pg.differential_from(d.from) else { continue };
            let lhs = dg.matrix.mul(&blocks[&d.from])?;
            let to_block = blocks
                .get(&d.to)
                .cloned()
                .unwrap_or_else(|| SparseMatrix::zeros(dg.matrix.nrows(), d.matrix.nrows()));
            let rhs = to_block.mul(&d.matrix)?;
            if lhs != rhs {
                return Err(Error::Invariant(format!(
                    "induced map does not commute with d^{} at {:?}",
                    pf.r, d.from
                )));
            }
        }
        out.push(PageMap { r: pf.r, blocks });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::ChainComplex;

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
    fn trivial_filtration_is_homology() {
        let c = ChainComplex::new(
            -1,
            BTreeMap::from([(0, 2), (1, 1)]),
            BTreeMap::from([(1, SparseMatrix::from_int_rows(&[&[1], &[-1]]))]),
        )
        .unwrap();
        let f = FilteredComplex::trivial(c);
        let ps = pages(&f, 3).unwrap();
        for p in &ps {
            assert_eq!(p.dims(), BTreeMap::from([((0, 0), 1)]));
        }
        let e = e_infinity(&f).unwrap();
        assert_eq!(e.stabilized_at, 1);
        check_convergence(&f).unwrap();
    }

    #[test]
    fn two_step_example() {
        let f = two_step();
        let ps = pages(&f, 2).unwrap();
        assert_eq!(ps[0].dims(), BTreeMap::from([((0, 0), 1), ((1, 0), 1)]));
        let d1 = ps[0].differential_from((1, 0)).unwrap();
        assert_eq!(d1.to, (0, 0));
        assert_eq!(d1.matrix.rank(), 1);
        assert!(ps[1].dims().is_empty());
        let e = e_infinity(&f).unwrap();
        assert!(e.page.dims().is_empty());
        assert_eq!(e.stabilized_at, 2);
        let rep = check_convergence(&f).unwrap();
        assert!(rep.degrees.iter().all(|d| d.homology_dim == 0 && d.e_infinity_dim == 0));
    }

    #[test]
    fn differential_past_an_empty_level() {
        let c = ChainComplex::new(
            -1,
            BTreeMap::from([(0, 1), (1, 1)]),
            BTreeMap::from([(1, SparseMatrix::identity(1))]),
        )
        .unwrap();
        let f = FilteredComplex::new(c, BTreeMap::from([(0, vec![0]), (1, vec![2])])).unwrap();
        let ps = pages(&f, 3).unwrap();
        assert_eq!(ps[0].dims(), BTreeMap::from([((0, 0), 1), ((2, -1), 1)]));
        assert_eq!(ps[1].dims(), ps[0].dims());
        assert_eq!(ps[1].differential_from((2, -1)).unwrap().matrix.rank(), 1);
        assert!(ps[2].dims().is_empty());
    }

    #[test]
    fn split_complex_has_no_differentials() {
        let c = ChainComplex::new(
            -1,
            BTreeMap::from([(0, 2), (1, 2)]),
            BTreeMap::from([(1, SparseMatrix::from_int_rows(&[&[1, 0], &[0, 0]]))]),
        )
        .unwrap();
        let f = FilteredComplex::new(c, BTreeMap::from([(0, vec![0, 1]), (1, vec![0, 1])])).unwrap();
        for p in pages(&f, 3).unwrap() {
            assert!(p.differentials.iter().all(|d| d.matrix.is_zero()));
        }
    }

    #[test]
    fn identity_and_zero_maps() {
        let f = two_step();
        let id = ChainMap::identity(f.complex());
        for pm in induced_map_on_pages(&f, &f, &id, 2).unwrap() {
            assert!(pm.blocks.values().all(|m| m.rank() == m.ncols() && m.nrows() == m.ncols()));
        }
        let zero = ChainMap::default();
        for pm in induced_map_on_pages(&f, &f, &zero, 2).unwrap() {
            assert!(pm.blocks.values().all(SparseMatrix::is_zero));
        }
    }
}
