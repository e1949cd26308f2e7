//! Rank and kernel computation by sparse Gaussian elimination.

use std::collections::BTreeMap;

use super::echelon::{null_space_of_rows, EchelonBasis};
use super::sparse::{axpy, SparseMatrix, SparseVec};
use super::Rational;
use crate::error::{Error, Result};

/// Minimum number of live vectors before switching to dense elimination.
const DENSE_MIN_ROWS: usize = 8;

struct Component {
    cols: Vec<usize>,
    rows: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the bipartite row/column incidence graph.
/// Zero columns form singleton components with no rows.
fn components(m: &SparseMatrix) -> Vec<Component> {
    let n = m.ncols();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut row_owner = vec![usize::MAX; m.nrows()];
    for c in 0..n {
        for (r, _) in m.column(c) {
            if row_owner[*r] == usize::MAX {
                row_owner[*r] = c;
            } else {
                let (a, b) = (find(&mut parent, row_owner[*r]), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut comps: Vec<Component> = Vec::new();
    for c in 0..n {
        let root = find(&mut parent, c);
        let id = *index.entry(root).or_insert_with(|| {
            comps.push(Component { cols: Vec::new(), rows: Vec::new() });
            comps.len() - 1
        });
        comps[id].cols.push(c);
    }
    for (r, &owner) in row_owner.iter().enumerate() {
        if owner != usize::MAX {
            let root = find(&mut parent, owner);
            comps[index[&root]].rows.push(r);
        }
    }
    comps
}

/// Rank of a set of sparse vectors.
///
/// Vectors are bucketed by leading index and the buckets are cleared in
/// ascending order. In each bucket the pivot is the vector whose leading
/// entry has the smallest `|num| * den`, ties going to the lowest vector id.
/// Once the live vectors fill more than half of the remaining rectangle the
/// rest is finished densely.
pub fn rank_of_vectors(vectors: Vec<SparseVec>) -> usize {
    let mut store: Vec<SparseVec> = Vec::with_capacity(vectors.len());
    let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut nnz = 0usize;
    for v in vectors {
        if let Some(&(lead, _)) = v.first() {
            nnz += v.len();
            buckets.entry(lead).or_default().push(store.len());
            store.push(v);
        }
    }
    let max_index = store.iter().filter_map(|v| v.last().map(|e| e.0)).max().unwrap_or(0);
    let mut live = store.len();
    let mut rank = 0;
    while let Some((lead, mut ids)) = buckets.pop_first() {
        let span = max_index + 1 - lead;
        if live >= DENSE_MIN_ROWS && 2 * nnz > live * span {
            let mut rest: Vec<SparseVec> = Vec::new();
            for id in ids.drain(..).chain(buckets.into_values().flatten()) {
                rest.push(std::mem::take(&mut store[id]));
            }
            return rank + dense_rank(rest, lead, span);
        }
        ids.sort_unstable();
        let piv_pos = (0..ids.len())
            .min_by(|&a, &b| {
                store[ids[a]][0].1.height_cmp(&store[ids[b]][0].1).then(ids[a].cmp(&ids[b]))
            })
            .expect("nonempty bucket");
        let piv_id = ids.swap_remove(piv_pos);
        let pivot = std::mem::take(&mut store[piv_id]);
        nnz -= pivot.len();
        live -= 1;
        rank += 1;
        let inv = pivot[0].1.recip();
        for id in ids {
            let v = std::mem::take(&mut store[id]);
            nnz -= v.len();
            let f = -(&v[0].1 * &inv);
            let w = axpy(&v, &f, &pivot);
            match w.first() {
                Some(&(l, _)) => {
                    nnz += w.len();
                    buckets.entry(l).or_default().push(id);
                    store[id] = w;
                }
                None => live -= 1,
            }
        }
    }
    rank
}

fn dense_rank(vectors: Vec<SparseVec>, offset: usize, width: usize) -> usize {
    let mut a: Vec<Vec<Rational>> = vectors
        .iter()
        .map(|v| {
            let mut row = vec![Rational::zero(); width];
            for (i, x) in v {
                row[i - offset] = x.clone();
            }
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..width {
        if rank == a.len() {
            break;
        }
        let piv = (rank..a.len())
            .filter(|&r| !a[r][col].is_zero())
            .min_by(|&x, &y| a[x][col].height_cmp(&a[y][col]).then(x.cmp(&y)));
        let Some(piv) = piv else { continue };
        a.swap(rank, piv);
        let inv = a[rank][col].recip();
        for r in rank + 1..a.len() {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for j in col..width {
                if !a[rank][j].is_zero() {
                    let t = &f * &a[rank][j];
                    a[r][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over the rationals. Deterministic for a fixed input.
pub fn rank(m: &SparseMatrix) -> usize {
    if m.is_zero() {
        return 0;
    }
    let comps = components(m);
    let ranks = crate::par::map(&comps, |comp| {
        if comp.rows.is_empty() {
            return 0;
        }
        if comp.cols.len() == 1 || comp.rows.len() == 1 {
            return 1;
        }
        let vecs: Vec<SparseVec> = comp.cols.iter().map(|&c| m.column(c).to_vec()).collect();
        rank_of_vectors(vecs)
    });
    ranks.into_iter().sum()
}

/// Basis of `ker m`, as column vectors over `m.ncols()` indices.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let comps = components(m);
    let rows = m.row_vectors();
    let parts = crate::par::map(&comps, |comp| {
        if comp.rows.is_empty() {
            return vec![vec![(comp.cols[0], Rational::one())]];
        }
        let mut local = vec![usize::MAX; m.ncols()];
        for (i, &c) in comp.cols.iter().enumerate() {
            local[c] = i;
        }
        let local_rows: Vec<SparseVec> = comp
            .rows
            .iter()
            .map(|&r| rows[r].iter().map(|(c, v)| (local[*c], v.clone())).collect())
            .collect();
        null_space_of_rows(&local_rows, comp.cols.len())
            .into_iter()
            .map(|v| v.into_iter().map(|(i, x)| (comp.cols[i], x)).collect())
            .collect()
    });
    let mut out: Vec<SparseVec> = parts.into_iter().flatten().collect();
    out.sort_by(|a, b| a.last().map(|e| e.0).cmp(&b.last().map(|e| e.0)));
    out
}

/// A basis of the column space of `m`.
pub fn image_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let mut e = EchelonBasis::new();
    for c in m.columns() {
        e.insert(c);
    }
    e.vectors().cloned().collect()
}

fn check_composable(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<()> {
    let prod = d_out.mul(d_in)?;
    if !prod.is_zero() {
        return Err(Error::CompositionNonzero { nonzero: prod.nnz() });
    }
    Ok(())
}

/// `dim ker d_out / im d_in`. Fails if `d_out * d_in != 0`.
pub fn quotient_dimension(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<usize> {
    check_composable(d_in, d_out)?;
    Ok(d_out.ncols() - rank(d_out) - rank(d_in))
}

/// Homology of `V --d_in--> W --d_out--> U` at `W`, with explicit data for
/// computing classes.
#[derive(Debug, Clone)]
pub struct Quotient {
    /// Cycles spanning a complement of the boundaries inside the kernel.
    pub representatives: Vec<SparseVec>,
    basis: EchelonBasis,
}

impl Quotient {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of the class of `z` against the representatives, or
    /// `None` if `z` is not in the kernel span used to build the quotient.
    pub fn class_of(&self, z: &[(usize, Rational)]) -> Option<SparseVec> {
        let r = self.basis.reduce(z);
        r.residual.is_empty().then_some(r.coords)
    }
}

/// `ker / im` for explicit spanning sets of the two subspaces; `image`
/// must lie inside the span of `kernel`.
pub fn quotient_of_spans(kernel: &[SparseVec], image: &[SparseVec]) -> Quotient {
    let mut basis = EchelonBasis::new();
    for b in image {
        basis.insert(b);
    }
    let mut reps = Vec::new();
    for z in kernel {
        if basis.insert_tagged(z, reps.len()).is_some() {
            reps.push(z.clone());
        }
    }
    Quotient { representatives: reps, basis }
}

/// Quotient `ker d_out / im d_in` with representatives.
pub fn homology(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<Quotient> {
    check_composable(d_in, d_out)?;
    let kernel = kernel_basis(d_out);
    Ok(quotient_of_spans(&kernel, d_in.columns()))
}

/// Some `x` with `m x = b`, if one exists.
pub fn solve(m: &SparseMatrix, b: &[(usize, Rational)]) -> Option<SparseVec> {
    let mut e = EchelonBasis::new();
    for (c, col) in m.columns().iter().enumerate() {
        e.insert_tagged(col, c);
    }
    let r = e.reduce(b);
    r.residual.is_empty().then_some(r.coords)
}

/// Matrix of a map between subquotients: `f` applied to each source
/// representative, expressed in target classes.
pub fn induced_matrix(
    f: &SparseMatrix,
    source: &Quotient,
    target: &Quotient,
) -> Result<SparseMatrix> {
    let mut cols = Vec::with_capacity(source.dim());
    for z in &source.representatives {
        let img = f.mul_vec(z);
        let c = target.class_of(&img).ok_or_else(|| {
            Error::Invariant("map does not send cycles to cycles".into())
        })?;
        cols.push(c);
    }
    Ok(SparseMatrix::from_columns(target.dim(), cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&SparseMatrix::zeros(3, 3)), 0);
        assert_eq!(rank(&SparseMatrix::identity(2)), 2);
        assert_eq!(rank(&SparseMatrix::from_int_rows(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&SparseMatrix::identity(2)).is_empty());
        assert_eq!(kernel_basis(&SparseMatrix::zeros(2, 3)).len(), 3);
        let k = kernel_basis(&SparseMatrix::from_int_rows(&[&[1, 1]]));
        assert_eq!(k, vec![vec![(0, q(-1)), (1, q(1))]]);
    }

    #[test]
    fn quotient_examples() {
        let z = |r, c| SparseMatrix::zeros(r, c);
        assert_eq!(quotient_dimension(&z(4, 0), &z(0, 4)).unwrap(), 4);
        assert_eq!(quotient_dimension(&SparseMatrix::identity(3), &z(0, 3)).unwrap(), 0);
        let d_in = SparseMatrix::from_int_rows(&[&[0], &[0]]);
        let d_out = SparseMatrix::from_int_rows(&[&[0, 1]]);
        assert_eq!(quotient_dimension(&d_in, &d_out).unwrap(), 1);
        let bad_in = SparseMatrix::from_int_rows(&[&[1], &[1]]);
        assert!(matches!(
            quotient_dimension(&bad_in, &d_out),
            Err(Error::CompositionNonzero { nonzero: 1 })
        ));
    }

    #[test]
    fn dense_fallback_agrees() {
        // A full 10x10 Vandermonde-like matrix triggers the dense path.
        let rows: Vec<Vec<Rational>> =
            (1..=10).map(|i| (0..10).map(|j| q(i).pow(j)).collect()).collect();
        let m = SparseMatrix::from_dense(&rows);
        assert_eq!(rank(&m), 10);
        let mut dup = rows.clone();
        dup[9] = dup[0].iter().zip(&dup[1]).map(|(a, b)| a + b).collect();
        assert_eq!(rank(&SparseMatrix::from_dense(&dup)), 9);
    }

    #[test]
    fn solve_and_classes() {
        let m = SparseMatrix::from_int_rows(&[&[1, 0], &[1, 1]]);
        let x = solve(&m, &[(1, q(2))]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![(1, q(2))]);
        let h = homology(&SparseMatrix::zeros(2, 0), &SparseMatrix::zeros(0, 2)).unwrap();
        assert_eq!(h.dim(), 2);
        assert_eq!(h.class_of(&[(1, q(3))]), Some(vec![(1, q(3))]));
    }
}
