use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::algebra::SuperAlgebra;
use super::chains::HochschildChains;
use crate::complexes::{exact_at, ChainComplex};
use crate::error::{Error, Result};
use crate::linalg::{self, Quotient, Rational, SparseMatrix, SparseVec};

/// Dimensions per degree from a truncated computation. Degrees below
/// `max_n` are exact; `top` is the value seen at `max_n`, which can only
/// overestimate the true group because boundaries from `max_n + 1` are not
/// built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedDims {
    pub dims: Vec<usize>,
    pub top: TopDegree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopDegree {
    pub n: usize,
    pub upper_bound: usize,
}

/// `dim HH_n(a)` for `n < max_n`.
pub fn hh(a: &SuperAlgebra, max_n: usize) -> Result<TruncatedDims> {
    hh_of(&HochschildChains::new(a.clone(), max_n))
}

pub fn hh_of(chains: &HochschildChains) -> Result<TruncatedDims> {
    truncated(&chains.complex()?, chains.max_n())
}

fn truncated(c: &ChainComplex, max_n: usize) -> Result<TruncatedDims> {
    let all = c.homology_dims();
    let get = |n: usize| all.get(&(n as i64)).copied().unwrap_or(0);
    Ok(TruncatedDims {
        dims: (0..max_n).map(get).collect(),
        top: TopDegree { n: max_n, upper_bound: get(max_n) },
    })
}

/// The `(b, B)` total complex `Tot_n = C_n (+) C_{n-2} (+) ...`, with the
/// block of `C_{n-2j}` listed `j`-th. Output block `j` is `b x_j + B x_{j+1}`.
pub struct CyclicBicomplex {
    chains: HochschildChains,
    complex: ChainComplex,
}

impl CyclicBicomplex {
    pub fn new(chains: HochschildChains) -> Result<Self> {
        let max_n = chains.max_n();
        let b: Vec<SparseMatrix> = (0..=max_n).map(|n| chains.b(n)).collect::<Result<_>>()?;
        let big_b: Vec<SparseMatrix> = (0..max_n).map(|n| chains.big_b(n)).collect::<Result<_>>()?;
        let dims: BTreeMap<i64, usize> = (0..=max_n)
            .map(|n| (n as i64, (0..=n / 2).map(|j| chains.dim(n - 2 * j)).sum()))
            .collect();
        let mut diffs = BTreeMap::new();
        for n in 1..=max_n {
            let mut entries = Vec::new();
            let mut src_off = 0;
            let tgt_offsets = block_offsets(&chains, n - 1);
            for j in 0..=n / 2 {
                let m = n - 2 * j;
                // b on block j lands in target block j (degree m - 1).
                if m >= 1 {
                    let to = tgt_offsets[j];
                    for (r, c, v) in b[m].triplets() {
                        entries.push((to + r, src_off + c, v));
                    }
                }
                // B on block j lands in target block j - 1 (degree m + 1).
                if j >= 1 {
                    let to = tgt_offsets[j - 1];
                    for (r, c, v) in big_b[m].triplets() {
                        entries.push((to + r, src_off + c, v));
                    }
                }
                src_off += chains.dim(m);
            }
            diffs.insert(n as i64, SparseMatrix::from_triplets(dims[&(n as i64 - 1)], dims[&(n as i64)], entries)?);
        }
        let complex = ChainComplex::new(-1, dims, diffs)
            .map_err(|e| Error::Invariant(format!("(b, B) total complex: {e}")))?;
        Ok(CyclicBicomplex { chains, complex })
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn chains(&self) -> &HochschildChains {
        &self.chains
    }

    fn offsets(&self, n: usize) -> Vec<usize> {
        block_offsets(&self.chains, n)
    }
}

fn block_offsets(chains: &HochschildChains, n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut off = 0;
    for j in 0..=n / 2 {
        out.push(off);
        off += chains.dim(n - 2 * j);
    }
    out
}

/// Cyclic homology dimensions, with how they were obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HcReport {
    pub dims: Vec<usize>,
    pub top: TopDegree,
    /// Non-unital input handled as `ker(HC(A+) -> HC(Q))`.
    pub unitalized: bool,
    /// Whether `S : HC_{max_n - 1} -> HC_{max_n - 3}` is an isomorphism; a
    /// finite stand-in for periodicity.
    pub periodicity_proxy: Option<bool>,
}

/// `dim HC_n(a)` for `n < max_n`.
pub fn hc(a: &SuperAlgebra, max_n: usize) -> Result<HcReport> {
    if !a.is_unital() {
        let plus = hc(&a.unitalization(), max_n)?;
        let ground = hc(&SuperAlgebra::ground_field(), max_n)?;
        let sub = |x: usize, y: usize| {
            x.checked_sub(y).ok_or_else(|| Error::Invariant("HC(A+) smaller than HC(Q)".into()))
        };
        return Ok(HcReport {
            dims: plus.dims.iter().zip(&ground.dims).map(|(x, y)| sub(*x, *y)).collect::<Result<_>>()?,
            top: TopDegree {
                n: max_n,
                upper_bound: sub(plus.top.upper_bound, ground.top.upper_bound)?,
            },
            unitalized: true,
            periodicity_proxy: plus.periodicity_proxy,
        });
    }
    let bi = CyclicBicomplex::new(HochschildChains::new(a.clone(), max_n))?;
    let t = truncated(bi.complex(), max_n)?;
    let periodicity_proxy = if max_n >= 3 {
        let top = max_n as i64 - 1;
        let src = bi.complex().homology(top).quotient;
        let tgt = bi.complex().homology(top - 2).quotient;
        let s = s_matrix(&bi, top as usize, &src, &tgt)?;
        Some(src.dim() == tgt.dim() && s.rank() == src.dim())
    } else {
        None
    };
    Ok(HcReport { dims: t.dims, top: t.top, unitalized: false, periodicity_proxy })
}

fn s_matrix(bi: &CyclicBicomplex, n: usize, src: &Quotient, tgt: &Quotient) -> Result<SparseMatrix> {
    let c0 = bi.chains.dim(n);
    let tgt_dim = bi.complex.dim(n as i64 - 2);
    let entries = (c0..c0 + tgt_dim).map(|i| (i - c0, i, Rational::one()));
    let drop0 = SparseMatrix::from_triplets(tgt_dim, bi.complex.dim(n as i64), entries)?;
    linalg::induced_matrix(&drop0, src, tgt)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SbiRow {
    pub n: usize,
    pub hh: usize,
    pub hc: usize,
    pub rank_i: usize,
    pub rank_s: usize,
    pub rank_b: usize,
}

/// Explicit `I`, `S`, `B` maps and exactness of
/// `HH_n -I-> HC_n -S-> HC_{n-2} -B-> HH_{n-1} -> ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SbiReport {
    pub rows: Vec<SbiRow>,
    /// Terms at which exactness was checked, as `("HH" | "HC", n)`.
    pub checked: Vec<(String, usize)>,
    pub exact: bool,
    pub unitalized: bool,
}

pub fn sbi_check(a: &SuperAlgebra, max_n: usize) -> Result<SbiReport> {
    let (alg, unitalized) = if a.is_unital() { (a.clone(), false) } else { (a.unitalization(), true) };
    let chains = HochschildChains::new(alg, max_n);
    let hcx = chains.complex()?;
    let bi = CyclicBicomplex::new(chains.clone())?;
    let top = max_n;
    let hh_q: Vec<Quotient> = (0..top).map(|n| hcx.homology(n as i64).quotient).collect();
    let hc_q: Vec<Quotient> = (0..top).map(|n| bi.complex.homology(n as i64).quotient).collect();
    let zero_q = || linalg::quotient_of_spans(&[], &[]);
    let hc_at = |n: i64| if n < 0 { zero_q() } else { hc_q[n as usize].clone() };
    let hh_at = |n: i64| if n < 0 { zero_q() } else { hh_q[n as usize].clone() };
    let mut i_maps = Vec::new();
    let mut s_maps = Vec::new();
    let mut b_maps = Vec::new();
    for n in 0..top {
        // I : HH_n -> HC_n
        let inc_entries = (0..chains.dim(n)).map(|i| (i, i, Rational::one()));
        let inc = SparseMatrix::from_triplets(bi.complex.dim(n as i64), chains.dim(n), inc_entries)?;
        i_maps.push(linalg::induced_matrix(&inc, &hh_q[n], &hc_q[n])?);
        // S : HC_n -> HC_{n-2}
        let s = if n >= 2 {
            s_matrix(&bi, n, &hc_q[n], &hc_q[n - 2])?
        } else {
            SparseMatrix::zeros(0, hc_q[n].dim())
        };
        s_maps.push(s);
        // B : HC_{n-2} -> HH_{n-1}, lifting to block 1 of Tot_n and applying D.
        let src = hc_at(n as i64 - 2);
        let tgt = hh_at(n as i64 - 1);
        let mut cols = Vec::new();
        if n >= 2 {
            let src_offsets = bi.offsets(n - 2);
            for z in &src.representatives {
                let end = src_offsets.get(1).copied().unwrap_or(usize::MAX);
                let x0: SparseVec = z.iter().filter(|(i, _)| *i < end).cloned().collect();
                let bx = chains.apply_big_b(&x0, n - 2)?;
                cols.push(tgt.class_of(&bx).ok_or_else(|| {
                    Error::Invariant("connecting map does not land in cycles".into())
                })?);
            }
        }
        b_maps.push(SparseMatrix::from_columns(tgt.dim(), cols));
    }
    let mut exact = true;
    let mut checked = Vec::new();
    for n in 0..top {
        // At HH_n: incoming B from HC_{n-1}, outgoing I.
        if n + 1 < top {
            exact &= exact_at(hh_q[n].dim(), &b_maps[n + 1], &i_maps[n])?;
            checked.push(("HH".to_string(), n));
        }
        // At HC_n: incoming I, outgoing S.
        exact &= exact_at(hc_q[n].dim(), &i_maps[n], &s_maps[n])?;
        checked.push(("HC".to_string(), n));
        // At HC_{n-2} as the target of S: outgoing B into HH_{n-1}.
        if n >= 2 {
            exact &= exact_at(hc_q[n - 2].dim(), &s_maps[n], &b_maps[n])?;
            checked.push(("HC".to_string(), n - 2));
        }
    }
    let rows = (0..top)
        .map(|n| SbiRow {
            n,
            hh: hh_q[n].dim(),
            hc: hc_q[n].dim(),
            rank_i: i_maps[n].rank(),
            rank_s: s_maps[n].rank(),
            rank_b: b_maps[n].rank(),
        })
        .collect();
    Ok(SbiReport { rows, checked, exact, unitalized })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HUnitalReport {
    pub dims: Vec<usize>,
    pub acyclic: bool,
}

/// Homology of `(C_n, b')` in degrees `< max_n`, including `A / A^2` in degree 0.
pub fn hunital_check(a: &SuperAlgebra, max_n: usize) -> Result<HUnitalReport> {
    let chains = HochschildChains::new(a.clone(), max_n);
    let t = truncated(&chains.bprime_complex()?, max_n)?;
    let acyclic = t.dims.iter().all(|d| *d == 0);
    Ok(HUnitalReport { dims: t.dims, acyclic })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupertraceSpace {
    pub dim: usize,
    /// Each functional as its values on the basis.
    pub basis: Vec<Vec<Rational>>,
}

/// Functionals with `tau(xy) = (-1)^{|x||y|} tau(yx)`.
pub fn supertrace_space(a: &SuperAlgebra) -> SupertraceSpace {
    let n = a.dim();
    let rows: Vec<SparseVec> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a.supercommutator(i, j)).collect();
    let basis: Vec<Vec<Rational>> = linalg::null_space_of_rows(&rows, n)
        .into_iter()
        .map(|v| linalg::sparse::to_dense(&v, n))
        .collect();
    SupertraceSpace { dim: basis.len(), basis }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hh_examples() {
        assert_eq!(hh(&SuperAlgebra::ground_field(), 4).unwrap().dims, vec![1, 0, 0, 0]);
        assert_eq!(hh(&SuperAlgebra::dual_numbers(), 4).unwrap().dims, vec![2, 1, 1, 1]);
        assert_eq!(hh(&SuperAlgebra::matrix_algebra(2), 3).unwrap().dims, vec![1, 0, 0]);
    }

    #[test]
    fn hc_examples() {
        let q = hc(&SuperAlgebra::ground_field(), 4).unwrap();
        assert_eq!(q.dims, vec![1, 0, 1, 0]);
        assert_eq!(q.periodicity_proxy, Some(true));
        let q5 = hc(&SuperAlgebra::ground_field(), 5).unwrap();
        assert_eq!(q5.dims, vec![1, 0, 1, 0, 1]);
        assert_eq!(q5.periodicity_proxy, Some(true));
        let d = hc(&SuperAlgebra::dual_numbers(), 4).unwrap();
        assert_eq!(d.dims[0], 2);
        let z = hc(&SuperAlgebra::square_zero(), 3).unwrap();
        assert!(z.unitalized);
    }

    #[test]
    fn sbi_examples() {
        for a in [SuperAlgebra::ground_field(), SuperAlgebra::dual_numbers(), SuperAlgebra::matrix_algebra(2)] {
            let r = sbi_check(&a, 4).unwrap();
            assert!(r.exact, "{r:?}");
        }
        let q = sbi_check(&SuperAlgebra::ground_field(), 4).unwrap();
        assert_eq!(q.rows[2].rank_s, 1);
    }

    #[test]
    fn hunital_examples() {
        assert!(hunital_check(&SuperAlgebra::ground_field(), 3).unwrap().acyclic);
        assert!(hunital_check(&SuperAlgebra::matrix_algebra(2), 3).unwrap().acyclic);
        let z = hunital_check(&SuperAlgebra::square_zero(), 3).unwrap();
        assert_eq!(z.dims, vec![1, 1, 1]);
    }

    #[test]
    fn supertrace_examples() {
        assert_eq!(supertrace_space(&SuperAlgebra::ground_field()).dim, 1);
        let m2 = supertrace_space(&SuperAlgebra::matrix_algebra(2));
        assert_eq!(m2.dim, 1);
        let s = supertrace_space(&SuperAlgebra::super_matrix(1, 1));
        assert_eq!(s.dim, 1);
        let tau = &s.basis[0];
        assert_eq!(tau[0], -tau[3].clone());
        assert!(!tau[0].is_zero());
    }
}
