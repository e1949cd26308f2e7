#![allow(dead_code)]

use corner_homology::{Rational, SparseMatrix};
use rand::Rng;

/// Rank by fraction-free (Bareiss) elimination over i128.
pub fn bareiss_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|x| i128::from(*x)).collect()).collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            for j in c + 1..ncols {
                m[r][j] = (m[rank][c] * m[r][j] - m[r][c] * m[rank][j]) / prev;
            }
            m[r][c] = 0;
        }
        prev = m[rank][c];
        rank += 1;
    }
    rank
}

pub fn to_sparse(rows: &[Vec<i64>], ncols: usize) -> SparseMatrix {
    let t = rows
        .iter()
        .enumerate()
        .flat_map(|(r, row)| row.iter().enumerate().filter(|(_, v)| **v != 0).map(move |(c, v)| (r, c, Rational::from(*v))))
        .collect::<Vec<_>>();
    SparseMatrix::from_triplets(rows.len(), ncols, t).unwrap()
}

/// A random unimodular `n x n` matrix and its inverse, built from
/// elementary row operations `row_i += c row_j` allowed by `allowed(i, j)`.
pub fn unimodular<R: Rng>(n: usize, steps: usize, rng: &mut R, allowed: impl Fn(usize, usize) -> bool) -> (SparseMatrix, SparseMatrix) {
    let mut u = vec![vec![0i64; n]; n];
    let mut inv = vec![vec![0i64; n]; n];
    for i in 0..n {
        u[i][i] = 1;
        inv[i][i] = 1;
    }
    for _ in 0..steps {
        if n < 2 {
            break;
        }
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j || !allowed(i, j) {
            continue;
        }
        let c = rng.gen_range(-2i64..=2);
        // u <- E u with E = I + c e_ij; inv <- inv E^{-1}.
        for k in 0..n {
            u[i][k] += c * u[j][k];
        }
        for k in 0..n {
            inv[k][j] -= c * inv[k][i];
        }
    }
    (to_sparse(&u, n), to_sparse(&inv, n))
}

/// An elementary filtered complex (cancelling pairs plus free cells) hidden
/// behind a filtration-preserving change of basis.
#[derive(Debug, Clone)]
pub struct Elementary {
    /// `levels[n][i]`: filtration level of cell `i` in degree `n`.
    pub levels: Vec<Vec<i64>>,
    /// `(n, a, b)`: cell `a` of degree `n` hits cell `b` of degree `n - 1`.
    pub pairs: Vec<(usize, usize, usize)>,
    pub complex: corner_homology::complexes::ChainComplex,
}

impl Elementary {
    pub fn paired(&self, n: usize, i: usize) -> bool {
        self.pairs.iter().any(|&(m, a, b)| (m == n && a == i) || (m == n + 1 && b == i))
    }

    pub fn homology(&self, n: usize) -> usize {
        self.levels.get(n).map_or(0, |l| (0..l.len()).filter(|i| !self.paired(n, *i)).count())
    }

    /// `dim E^r_{k, n-k}`: a pair with level gap `g` is visible on pages `r <= g`.
    pub fn page_dim(&self, r: i64, k: i64, n: usize) -> usize {
        let Some(lv) = self.levels.get(n) else { return 0 };
        let mut count = (0..lv.len()).filter(|i| lv[*i] == k && !self.paired(n, *i)).count();
        for &(m, a, b) in &self.pairs {
            let gap = self.levels[m][a] - self.levels[m - 1][b];
            if gap >= r {
                if m == n && self.levels[m][a] == k {
                    count += 1;
                }
                if m == n + 1 && self.levels[m - 1][b] == k {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn filtered(&self) -> corner_homology::complexes::FilteredComplex {
        let lv = self.levels.iter().enumerate().map(|(n, l)| (n as i64, l.clone())).collect();
        corner_homology::complexes::FilteredComplex::new(self.complex.clone(), lv).unwrap()
    }
}

pub fn elementary<R: Rng>(rng: &mut R, top: usize, max_cells: usize, max_level: i64) -> Elementary {
    use std::collections::BTreeMap;
    let levels: Vec<Vec<i64>> =
        (0..=top).map(|_| (0..rng.gen_range(1..=max_cells)).map(|_| rng.gen_range(0..=max_level)).collect()).collect();
    let mut pairs = Vec::new();
    let mut used: Vec<Vec<bool>> = levels.iter().map(|l| vec![false; l.len()]).collect();
    for n in 1..=top {
        for a in 0..levels[n].len() {
            if rng.gen_bool(0.5) {
                continue;
            }
            let free: Vec<usize> =
                (0..levels[n - 1].len()).filter(|b| !used[n - 1][*b] && levels[n - 1][*b] <= levels[n][a]).collect();
            if free.is_empty() || used[n][a] {
                continue;
            }
            let b = free[rng.gen_range(0..free.len())];
            used[n][a] = true;
            used[n - 1][b] = true;
            pairs.push((n, a, b));
        }
    }
    let changes: Vec<(SparseMatrix, SparseMatrix)> = levels
        .iter()
        .map(|l| unimodular(l.len(), 3 * l.len(), rng, |i, j| l[i] <= l[j]))
        .collect();
    let mut dims = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for (n, l) in levels.iter().enumerate() {
        dims.insert(n as i64, l.len());
    }
    for n in 1..=top {
        let t: Vec<(usize, usize, Rational)> =
            pairs.iter().filter(|p| p.0 == n).map(|&(_, a, b)| (b, a, Rational::one())).collect();
        let e = SparseMatrix::from_triplets(levels[n - 1].len(), levels[n].len(), t).unwrap();
        let d = changes[n - 1].0.mul(&e).unwrap().mul(&changes[n].1).unwrap();
        diffs.insert(n as i64, d);
    }
    let complex = corner_homology::complexes::ChainComplex::new(-1, dims, diffs).unwrap();
    Elementary { levels, pairs, complex }
}
