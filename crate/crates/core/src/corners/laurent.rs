use std::collections::BTreeMap;

use serde::Serialize;

use super::cw::CwComplex;
use super::poset::FacePoset;
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

/// A cell `sigma x prod_{H in S} e_H` of the Laurent space: a realization
/// cell `sigma` lying in face `G`, times one open circle arc for each
/// hyperface `H` in a subset `S` of the hyperfaces of `G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LaurentCell {
    pub base_degree: i64,
    pub base_index: usize,
    pub face: usize,
    pub arcs: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LaurentSpace {
    pub cw: CwComplex,
    pub cells: BTreeMap<i64, Vec<LaurentCell>>,
}

/// Builds the cellular chain complex of the Laurent space of `poset`.
///
/// Without a realization the regular structure from [`CwComplex::from_poset`]
/// is used. The boundary is `d(sigma, S) = sum_tau [sigma : tau] (tau, S)`:
/// the one-cells of the circles are cycles.
pub fn laurent_space(poset: &FacePoset, realization: Option<&CwComplex>) -> Result<LaurentSpace> {
    let owned;
    let real = match realization {
        Some(r) => r,
        None => {
            owned = CwComplex::from_poset(poset)?;
            &owned
        }
    };
    let faces = real
        .faces()
        .ok_or_else(|| Error::LabelMismatch("realization cells carry no face labels".into()))?;
    for (n, d) in real.chains().nonzero_differentials() {
        for (c, col) in d.columns().iter().enumerate() {
            for (r, _) in col {
                let (hi, lo) = (faces[&n][c], faces[&(n - 1)][*r]);
                let outer = poset.hyperfaces_of(hi);
                let inner = poset.hyperfaces_of(lo);
                if !outer.iter().all(|h| inner.contains(h)) {
                    return Err(Error::NonEmbeddedCorner(format!(
                        "face {lo} in the closure of face {hi} misses one of its hyperfaces"
                    )));
                }
            }
        }
    }

    let mut cells: BTreeMap<i64, Vec<LaurentCell>> = BTreeMap::new();
    let mut lookup: BTreeMap<(i64, usize, Vec<usize>), usize> = BTreeMap::new();
    for n in real.chains().degrees() {
        for (i, &face) in faces[&n].iter().enumerate() {
            let hyp = poset.hyperfaces_of(face);
            for mask in 0u64..(1u64 << hyp.len()) {
                let arcs: Vec<usize> =
                    hyp.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, h)| *h).collect();
                let deg = n + arcs.len() as i64;
                let list = cells.entry(deg).or_default();
                lookup.insert((n, i, sorted(&arcs)), list.len());
                list.push(LaurentCell { base_degree: n, base_index: i, face, arcs });
            }
        }
    }

    let dims: BTreeMap<i64, usize> = cells.iter().map(|(n, c)| (*n, c.len())).collect();
    let mut boundary = BTreeMap::new();
    for (&deg, list) in &cells {
        let rows = dims.get(&(deg - 1)).copied().unwrap_or(0);
        if rows == 0 {
            continue;
        }
        let mut entries = Vec::new();
        for (c, cell) in list.iter().enumerate() {
            if cell.base_degree == 0 {
                continue;
            }
            let d = real.boundary(cell.base_degree);
            let key = sorted(&cell.arcs);
            for (r, v) in d.column(cell.base_index) {
                let row = lookup[&(cell.base_degree - 1, *r, key.clone())];
                entries.push((row, c, v.clone()));
            }
        }
        boundary.insert(deg, SparseMatrix::from_triplets(rows, list.len(), entries)?);
    }
    let labels = cells
        .iter()
        .map(|(n, list)| {
            let names = list
                .iter()
                .map(|c| {
                    let base = real
                        .chains()
                        .labels(c.base_degree)
                        .map_or_else(|| format!("c{}_{}", c.base_degree, c.base_index), |l| l[c.base_index].clone());
                    let arcs: Vec<String> = c.arcs.iter().map(|h| format!("H{h}")).collect();
                    if arcs.is_empty() {
                        base
                    } else {
                        format!("{base}x{}", arcs.join("x"))
                    }
                })
                .collect();
            (*n, names)
        })
        .collect();
    let cw = CwComplex::new(dims, boundary)
        .map_err(|e| Error::Invariant(format!("Laurent boundary: {e}")))?
        .with_cell_labels(labels)?;
    Ok(LaurentSpace { cw, cells })
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::super::cw::cohomology;
    use super::*;

    /// Each closed face is contractible, so it contributes one class in
    /// degree equal to its codimension.
    fn face_count_oracle(p: &FacePoset) -> Vec<usize> {
        let mut v = vec![0; p.dim() + 1];
        for f in p.faces() {
            v[f.codim] += 1;
        }
        v
    }

    #[test]
    fn interval_and_square() {
        let l = laurent_space(&FacePoset::interval(), None).unwrap();
        assert_eq!(cohomology(&l.cw), vec![1, 2]);
        let sq = FacePoset::square();
        let l = laurent_space(&sq, None).unwrap();
        assert_eq!(l.cw.chains().dims().values().copied().collect::<Vec<_>>(), vec![4, 12, 9]);
        assert_eq!(cohomology(&l.cw), vec![1, 4, 4]);
        assert_eq!(cohomology(&l.cw), face_count_oracle(&sq));
    }

    #[test]
    fn cube_matches_oracle() {
        let cube = FacePoset::square().product(&FacePoset::interval()).unwrap();
        let l = laurent_space(&cube, None).unwrap();
        assert_eq!(cohomology(&l.cw), face_count_oracle(&cube));
        assert_eq!(cohomology(&l.cw), vec![1, 6, 12, 8]);
    }

    #[test]
    fn point_is_a_point() {
        let l = laurent_space(&FacePoset::point(), None).unwrap();
        assert_eq!(cohomology(&l.cw), vec![1]);
    }

    #[test]
    fn top_degree_counts_minimal_faces() {
        let sq = FacePoset::square();
        let l = laurent_space(&sq, None).unwrap();
        assert_eq!(*cohomology(&l.cw).last().unwrap(), sq.minimal_faces().len());
    }
}
