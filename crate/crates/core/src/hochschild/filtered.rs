use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::algebra::{associated_graded, FilteredSuperAlgebra};
use super::chains::HochschildChains;
use crate::complexes::FilteredComplex;
use crate::error::{Error, Result};
use crate::spectral;

/// The Hochschild complex of the underlying algebra, each tuple at the sum
/// of the levels of its factors.
pub fn hochschild_filtration(f: &FilteredSuperAlgebra, max_n: usize) -> Result<FilteredComplex> {
    let chains = HochschildChains::new(f.algebra().clone(), max_n);
    filtered_chains(&chains, f.levels())
}

fn filtered_chains(chains: &HochschildChains, levels: &[i64]) -> Result<FilteredComplex> {
    let c = chains.complex()?;
    let lv: BTreeMap<i64, Vec<i64>> =
        (0..=chains.max_n()).map(|n| (n as i64, chains.tuple_weights(n, levels))).collect();
    FilteredComplex::new(c, lv).map_err(|e| Error::Invariant(format!("Hochschild filtration: {e}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Entry {
    pub k: i64,
    pub h: i64,
    pub e1: usize,
    pub hh_gr: usize,
}

/// `E^1_{k,h}` of the Hochschild filtration next to `HH_{k+h}(Gr A)` in
/// internal degree `k`, for total degrees below `max_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Comparison {
    pub entries: Vec<E1Entry>,
    pub agree: bool,
}

pub fn compare_e1_with_gr(f: &FilteredSuperAlgebra, max_n: usize) -> Result<E1Comparison> {
    let fc = hochschild_filtration(f, max_n)?;
    let e1 = spectral::page(&fc, 1)?;
    let gr = associated_graded(f)?;
    let gr_chains = HochschildChains::new(gr.algebra, max_n);
    let gr_fc = filtered_chains(&gr_chains, &gr.degrees)?;
    let mut entries = Vec::new();
    for k in fc.level_set() {
        let piece = gr_fc.graded_piece(k);
        for n in 0..max_n as i64 {
            let e = e1.dim(k, n - k);
            let g = piece.homology_dim(n);
            if e > 0 || g > 0 {
                entries.push(E1Entry { k, h: n - k, e1: e, hh_gr: g });
            }
        }
    }
    let agree = entries.iter().all(|e| e.e1 == e.hh_gr);
    Ok(E1Comparison { entries, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hochschild::{hh, SuperAlgebra};

    #[test]
    fn trivial_filtration_e1_is_hh() {
        let f = FilteredSuperAlgebra::trivial(SuperAlgebra::dual_numbers());
        let fc = hochschild_filtration(&f, 3).unwrap();
        let e1 = spectral::page(&fc, 1).unwrap();
        let dims = hh(f.algebra(), 3).unwrap().dims;
        for (n, d) in dims.iter().enumerate() {
            assert_eq!(e1.dim(0, n as i64), *d);
        }
    }

    #[test]
    fn graded_dual_numbers() {
        let f = FilteredSuperAlgebra::new(SuperAlgebra::dual_numbers(), vec![0, -1]).unwrap();
        let c = compare_e1_with_gr(&f, 3).unwrap();
        assert!(c.agree, "{c:?}");
    }

    #[test]
    fn filtered_matrices_converge() {
        let f = FilteredSuperAlgebra::new(SuperAlgebra::matrix_algebra(2), vec![0, 0, 1, 0]).unwrap();
        let c = compare_e1_with_gr(&f, 3).unwrap();
        assert!(c.agree, "{c:?}");
        let fc = hochschild_filtration(&f, 3).unwrap();
        let rep = spectral::check_convergence(&fc).unwrap();
        let dims = hh(f.algebra(), 3).unwrap().dims;
        for d in &rep.degrees {
            if (d.n as usize) < 3 {
                assert_eq!(d.e_infinity_dim, dims[d.n as usize]);
            }
        }
    }
}
