use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::poset::FacePoset;
use crate::complexes::{dual_complex, ChainComplex, ComplexPair, DifferentialJson};
use crate::error::{Error, Result};
use crate::linalg::{Rational, SparseMatrix};

/// A finite CW complex given by its cellular chain complex, with each cell
/// optionally labelled by the open face of a [`FacePoset`] containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CwComplex {
    chains: ChainComplex,
    faces: Option<BTreeMap<i64, Vec<usize>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellDegreeJson {
    pub n: i64,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<usize>>,
}

/// Exchange form: the chain-complex form without `direction`, plus optional
/// per-cell face labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CwJson {
    pub degrees: Vec<CellDegreeJson>,
    #[serde(default)]
    pub differentials: Vec<DifferentialJson>,
}

impl CwComplex {
    /// `cells[n]` cells in degree `n`; `boundary[n] : C_n -> C_{n-1}`.
    pub fn new(cells: BTreeMap<i64, usize>, boundary: BTreeMap<i64, SparseMatrix>) -> Result<Self> {
        if let Some(n) = cells.keys().find(|n| **n < 0) {
            return Err(Error::InvalidCw(format!("cells in negative degree {n}")));
        }
        let chains = ChainComplex::new(-1, cells, boundary).map_err(|e| Error::InvalidCw(e.to_string()))?;
        Ok(CwComplex { chains, faces: None })
    }

    pub fn with_cell_labels(mut self, labels: BTreeMap<i64, Vec<String>>) -> Result<Self> {
        self.chains = self.chains.with_labels(labels)?;
        Ok(self)
    }

    /// Attaches face labels. Every cell must be labelled, and each
    /// boundary incidence must go from a cell to one in the closure of its face.
    pub fn with_faces(mut self, faces: BTreeMap<i64, Vec<usize>>, poset: &FacePoset) -> Result<Self> {
        for n in self.chains.degrees() {
            let f = faces.get(&n).map_or(&[][..], Vec::as_slice);
            if f.len() != self.chains.dim(n) {
                return Err(Error::LabelMismatch(format!(
                    "{} face labels for {} cells in degree {n}",
                    f.len(),
                    self.chains.dim(n)
                )));
            }
        }
        for (&n, f) in &faces {
            if f.len() != self.chains.dim(n) {
                return Err(Error::LabelMismatch(format!("face labels given for empty degree {n}")));
            }
            for (i, id) in f.iter().enumerate() {
                let face = poset
                    .face(*id)
                    .ok_or_else(|| Error::LabelMismatch(format!("cell {i} in degree {n}: unknown face {id}")))?;
                if n as usize > face.dim {
                    return Err(Error::LabelMismatch(format!(
                        "cell {i} of degree {n} lies in face {id} of dimension {}",
                        face.dim
                    )));
                }
            }
        }
        for (n, d) in self.chains.nonzero_differentials() {
            for (c, col) in d.columns().iter().enumerate() {
                for (r, _) in col {
                    let (hi, lo) = (faces[&n][c], faces[&(n - 1)][*r]);
                    if !poset.le(lo, hi) {
                        return Err(Error::LabelMismatch(format!(
                            "cell {c} of degree {n} (face {hi}) has cell {r} (face {lo}) in its boundary"
                        )));
                    }
                }
            }
        }
        self.faces = Some(faces);
        Ok(self)
    }

    pub fn chains(&self) -> &ChainComplex {
        &self.chains
    }

    pub fn faces(&self) -> Option<&BTreeMap<i64, Vec<usize>>> {
        self.faces.as_ref()
    }

    pub fn cells(&self, n: i64) -> usize {
        self.chains.dim(n)
    }

    pub fn top_dim(&self) -> i64 {
        self.chains.degrees().last().copied().unwrap_or(0)
    }

    pub fn boundary(&self, n: i64) -> SparseMatrix {
        self.chains.differential(n)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.chains.euler_characteristic()
    }

    /// The regular CW structure whose closed cells are the closed faces.
    /// Incidence signs are fixed face by face, propagating through the
    /// codimension-two faces shared by pairs of facets.
    pub fn from_poset(poset: &FacePoset) -> Result<Self> {
        let mut by_dim: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for f in poset.faces() {
            by_dim.entry(f.dim as i64).or_default().push(f.id);
        }
        for ids in by_dim.values_mut() {
            ids.sort_unstable();
        }
        let pos: BTreeMap<usize, usize> =
            by_dim.values().flat_map(|ids| ids.iter().enumerate().map(|(i, id)| (*id, i))).collect();
        let mut signs: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (&n, ids) in &by_dim {
            if n == 0 {
                continue;
            }
            for &f in ids {
                let facets = poset.facets_of(f);
                if facets.is_empty() {
                    return Err(Error::InvalidPoset(format!(
                        "face {f} of dimension {n} has no boundary; supply a realization"
                    )));
                }
                if n == 1 {
                    if facets.len() != 2 {
                        return Err(Error::InvalidPoset(format!(
                            "edge {f} has {} endpoints; supply a realization",
                            facets.len()
                        )));
                    }
                    signs.insert((f, facets[0]), -1);
                    signs.insert((f, facets[1]), 1);
                    continue;
                }
                let mut shared: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for &g in &facets {
                    for k in poset.facets_of(g) {
                        shared.entry(k).or_default().push(g);
                    }
                }
                let mut adj: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
                for (&k, gs) in &shared {
                    if gs.len() != 2 {
                        return Err(Error::InvalidPoset(format!(
                            "face {k} lies in {} facets of face {f}; not a regular cell",
                            gs.len()
                        )));
                    }
                    adj.entry(gs[0]).or_default().push((gs[1], k));
                    adj.entry(gs[1]).or_default().push((gs[0], k));
                }
                let mut eps: BTreeMap<usize, i64> = BTreeMap::from([(facets[0], 1)]);
                let mut queue = VecDeque::from([facets[0]]);
                while let Some(a) = queue.pop_front() {
                    for &(b, k) in adj.get(&a).map_or(&[][..], Vec::as_slice) {
                        let want = -eps[&a] * signs[&(a, k)] * signs[&(b, k)];
                        match eps.get(&b) {
                            Some(&e) if e != want => {
                                return Err(Error::InvalidPoset(format!(
                                    "face {f} admits no consistent orientation"
                                )))
                            }
                            Some(_) => {}
                            None => {
                                eps.insert(b, want);
                                queue.push_back(b);
                            }
                        }
                    }
                }
                if eps.len() != facets.len() {
                    return Err(Error::InvalidPoset(format!("boundary of face {f} is disconnected")));
                }
                for (g, e) in eps {
                    signs.insert((f, g), e);
                }
            }
        }
        let cells: BTreeMap<i64, usize> = by_dim.iter().map(|(n, ids)| (*n, ids.len())).collect();
        let mut boundary = BTreeMap::new();
        for (&n, ids) in &by_dim {
            if n == 0 {
                continue;
            }
            let entries: Vec<(usize, usize, Rational)> = signs
                .iter()
                .filter(|((f, _), _)| by_dim[&n].binary_search(f).is_ok())
                .map(|((f, g), e)| (pos[g], pos[f], Rational::from(*e)))
                .collect();
            boundary.insert(n, SparseMatrix::from_triplets(cells.get(&(n - 1)).copied().unwrap_or(0), ids.len(), entries)?);
        }
        let labels = by_dim.iter().map(|(n, ids)| (*n, ids.iter().map(|i| format!("F{i}")).collect())).collect();
        let faces = by_dim.clone();
        CwComplex::new(cells, boundary)?.with_cell_labels(labels)?.with_faces(faces, poset)
    }
}

/// Cellular cohomology dimensions in degrees `0..=top`.
pub fn cohomology(cw: &CwComplex) -> Vec<usize> {
    let dual = dual_complex(&cw.chains);
    (0..=cw.top_dim()).map(|n| dual.homology_dim(n)).collect()
}

/// `H^*(X, A)` for the subcomplex `A` spanned by the given cells.
pub fn relative_cohomology(cw: &CwComplex, sub: &BTreeMap<i64, Vec<usize>>) -> Result<Vec<usize>> {
    let pair = ComplexPair::from_basis_subset(cw.chains.clone(), sub)?;
    let (quot, _) = pair.quotient()?;
    let dual = dual_complex(&quot);
    Ok((0..=cw.top_dim()).map(|n| dual.homology_dim(n)).collect())
}

impl From<&CwComplex> for CwJson {
    fn from(cw: &CwComplex) -> Self {
        CwJson {
            degrees: cw
                .chains
                .dims()
                .iter()
                .map(|(n, d)| CellDegreeJson {
                    n: *n,
                    dim: *d,
                    labels: cw.chains.labels(*n).map(<[String]>::to_vec),
                    faces: cw.faces.as_ref().and_then(|f| f.get(n).cloned()),
                })
                .collect(),
            differentials: cw
                .chains
                .nonzero_differentials()
                .map(|(n, m)| DifferentialJson { from_degree: n, matrix: m.clone() })
                .collect(),
        }
    }
}

impl CwJson {
    /// Builds the complex; face labels are checked against `poset` when both are present.
    pub fn into_cw(self, poset: Option<&FacePoset>) -> Result<CwComplex> {
        let mut cells = BTreeMap::new();
        let mut labels = BTreeMap::new();
        let mut faces = BTreeMap::new();
        for d in self.degrees {
            if cells.insert(d.n, d.dim).is_some() {
                return Err(Error::Parse(format!("degree {} listed twice", d.n)));
            }
            if d.dim == 0 {
                continue;
            }
            if let Some(l) = d.labels {
                labels.insert(d.n, l);
            }
            if let Some(f) = d.faces {
                faces.insert(d.n, f);
            }
        }
        let mut boundary = BTreeMap::new();
        for d in self.differentials {
            if d.matrix.ncols() == 0 {
                continue;
            }
            if boundary.insert(d.from_degree, d.matrix).is_some() {
                return Err(Error::Parse(format!("boundary {} listed twice", d.from_degree)));
            }
        }
        let cw = CwComplex::new(cells, boundary)?.with_cell_labels(labels)?;
        match poset {
            Some(p) if !faces.is_empty() => cw.with_faces(faces, p),
            _ if !faces.is_empty() => {
                Ok(CwComplex { faces: Some(faces), ..cw })
            }
            _ => Ok(cw),
        }
    }
}

impl Serialize for CwComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CwJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CwComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        CwJson::deserialize(d)?.into_cw(None).map_err(serde::de::Error::custom)
    }
}

/// The circle with one 0-cell and one 1-cell.
pub fn circle() -> CwComplex {
    CwComplex::new(BTreeMap::from([(0, 1), (1, 1)]), BTreeMap::new()).expect("circle")
}

/// The torus with one 0-cell, two 1-cells and one 2-cell.
pub fn torus() -> CwComplex {
    CwComplex::new(BTreeMap::from([(0, 1), (1, 2), (2, 1)]), BTreeMap::new()).expect("torus")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn realizations_of_standard_posets() {
        let i = CwComplex::from_poset(&FacePoset::interval()).unwrap();
        assert_eq!(cohomology(&i), vec![1, 0]);
        let sq = CwComplex::from_poset(&FacePoset::square()).unwrap();
        assert_eq!(cohomology(&sq), vec![1, 0, 0]);
        let cube = FacePoset::square().product(&FacePoset::interval()).unwrap();
        let c = CwComplex::from_poset(&cube).unwrap();
        assert_eq!(cohomology(&c), vec![1, 0, 0, 0]);
        assert_eq!(c.euler_characteristic(), 1);
    }

    #[test]
    fn relative_to_endpoints() {
        let i = CwComplex::from_poset(&FacePoset::interval()).unwrap();
        let r = relative_cohomology(&i, &BTreeMap::from([(0, vec![0, 1])])).unwrap();
        assert_eq!(r, vec![0, 1]);
        let bad = relative_cohomology(&i, &BTreeMap::from([(1, vec![0])]));
        assert!(matches!(bad, Err(Error::NotSubcomplex(_))));
    }

    #[test]
    fn torus_and_circle() {
        assert_eq!(cohomology(&circle()), vec![1, 1]);
        assert_eq!(cohomology(&torus()), vec![1, 2, 1]);
    }

    #[test]
    fn label_mismatch_detected() {
        let p = FacePoset::interval();
        let cw = CwComplex::from_poset(&p).unwrap();
        let bad = cw.clone().with_faces(BTreeMap::from([(0, vec![0, 2]), (1, vec![0])]), &p);
        assert!(matches!(bad, Err(Error::LabelMismatch(_))));
    }

    #[test]
    fn json_round_trip() {
        let cw = CwComplex::from_poset(&FacePoset::square()).unwrap();
        let s = serde_json::to_string(&cw).unwrap();
        let back: CwComplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cw);
    }
}
