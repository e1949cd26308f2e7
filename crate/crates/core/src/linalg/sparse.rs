use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// A sparse vector: `(index, value)` pairs sorted by index, no zeros.
pub type SparseVec = Vec<(usize, Rational)>;

/// `x + c * y` for sorted sparse vectors.
pub fn axpy(x: &[(usize, Rational)], c: &Rational, y: &[(usize, Rational)]) -> SparseVec {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j == y.len() || (i < x.len() && x[i].0 < y[j].0) {
            out.push(x[i].clone());
            i += 1;
        } else if i == x.len() || y[j].0 < x[i].0 {
            out.push((y[j].0, c * &y[j].1));
            j += 1;
        } else {
            let v = &x[i].1 + &(c * &y[j].1);
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale(x: &[(usize, Rational)], c: &Rational) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    x.iter().map(|(i, v)| (*i, v * c)).collect()
}

pub fn dot(x: &[(usize, Rational)], y: &[(usize, Rational)]) -> Rational {
    let (mut i, mut j) = (0, 0);
    let mut acc = Rational::zero();
    while i < x.len() && j < y.len() {
        match x[i].0.cmp(&y[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += &x[i].1 * &y[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Builds a sorted sparse vector from unsorted `(index, value)` pairs,
/// summing duplicates and dropping zeros.
pub fn collect_sparse(pairs: impl IntoIterator<Item = (usize, Rational)>) -> SparseVec {
    let mut map: BTreeMap<usize, Rational> = BTreeMap::new();
    for (i, v) in pairs {
        *map.entry(i).or_insert_with(Rational::zero) += v;
    }
    map.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

pub fn to_dense(x: &[(usize, Rational)], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, v) in x {
        out[*i] = v.clone();
    }
    out
}

pub fn from_dense(x: &[Rational]) -> SparseVec {
    x.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (i, v.clone()))
        .collect()
}

/// An exact sparse matrix over the rationals, stored column by column.
///
/// Invariants: every stored value is nonzero, row indices within each
/// column are strictly increasing and below `rows`.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: Vec<SparseVec>,
}

impl std::fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SparseMatrix {}x{} {:?}", self.rows, self.ncols(), self.triplets())
    }
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix { rows: n, cols: (0..n).map(|i| vec![(i, Rational::one())]).collect() }
    }

    /// Columns must be sorted sparse vectors with indices below `rows`.
    pub fn from_columns(rows: usize, cols: Vec<SparseVec>) -> Self {
        debug_assert!(cols.iter().all(|c| {
            c.windows(2).all(|w| w[0].0 < w[1].0)
                && c.iter().all(|(r, v)| *r < rows && !v.is_zero())
        }));
        SparseMatrix { rows, cols }
    }

    pub fn from_triplets(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self> {
        let mut per_col: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::Dimension(format!(
                    "entry ({r}, {c}) outside {rows}x{cols}"
                )));
            }
            per_col[c].push((r, v));
        }
        let cols = per_col.into_iter().map(collect_sparse).collect();
        Ok(SparseMatrix { rows, cols })
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let entries = rows.iter().enumerate().flat_map(|(r, row)| {
            row.iter().enumerate().map(move |(c, v)| (r, c, v.clone()))
        });
        Self::from_triplets(nrows, ncols, entries).expect("rectangular input")
    }

    /// Convenience constructor from small integer rows.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Rational>> =
            rows.iter().map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect()).collect();
        Self::from_dense(&dense)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols.len())
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn column(&self, c: usize) -> &[(usize, Rational)] {
        &self.cols[c]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        match self.cols[c].binary_search_by_key(&r, |e| e.0) {
            Ok(i) => self.cols[c][i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Entries sorted by `(row, col)`.
    pub fn triplets(&self) -> Vec<(usize, usize, Rational)> {
        let mut out: Vec<_> = self
            .cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v.clone())))
            .collect();
        out.sort_by_key(|t| (t.0, t.1));
        out
    }

    /// Row-major view: one sorted sparse vector per row.
    pub fn row_vectors(&self) -> Vec<SparseVec> {
        let mut rows = vec![Vec::new(); self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                rows[*r].push((c, v.clone()));
            }
        }
        rows
    }

    pub fn transpose(&self) -> Self {
        SparseMatrix { rows: self.ncols(), cols: self.row_vectors() }
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.ncols()]; self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                out[*r][c] = v.clone();
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[(usize, Rational)]) -> SparseVec {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (c, xv) in x {
            for (r, v) in &self.cols[*c] {
                *acc.entry(*r).or_insert_with(Rational::zero) += v * xv;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ncols() != other.nrows() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.ncols(),
                other.rows,
                other.ncols()
            )));
        }
        let cols = crate::par::map(&other.cols, |col| self.mul_vec(col));
        Ok(SparseMatrix { rows: self.rows, cols })
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.lin_comb(&Rational::one(), other)
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.lin_comb(&-Rational::one(), other)
    }

    /// `self + c * other`.
    pub fn lin_comb(&self, c: &Rational, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "shape {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let cols = self.cols.iter().zip(&other.cols).map(|(a, b)| axpy(a, c, b)).collect();
        Ok(SparseMatrix { rows: self.rows, cols })
    }

    pub fn scale(&self, c: &Rational) -> SparseMatrix {
        SparseMatrix { rows: self.rows, cols: self.cols.iter().map(|col| scale(col, c)).collect() }
    }

    /// Submatrix with the given rows and columns, reindexed in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut pos = vec![usize::MAX; self.rows];
        for (i, r) in rows.iter().enumerate() {
            pos[*r] = i;
        }
        let new_cols = cols
            .iter()
            .map(|c| {
                let mut col: SparseVec = self.cols[*c]
                    .iter()
                    .filter(|(r, _)| pos[*r] != usize::MAX)
                    .map(|(r, v)| (pos[*r], v.clone()))
                    .collect();
                col.sort_by_key(|e| e.0);
                col
            })
            .collect();
        SparseMatrix { rows: rows.len(), cols: new_cols }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack row mismatch".into()));
        }
        let mut cols = self.cols.clone();
        cols.extend(other.cols.iter().cloned());
        Ok(SparseMatrix { rows: self.rows, cols })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ncols() != other.ncols() {
            return Err(Error::Dimension("vstack column mismatch".into()));
        }
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.extend(b.iter().map(|(r, v)| (r + self.rows, v.clone())));
                c
            })
            .collect();
        Ok(SparseMatrix { rows: self.rows + other.rows, cols })
    }

    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[&SparseMatrix]) -> SparseMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut cols = Vec::new();
        let mut off = 0;
        for b in blocks {
            for col in &b.cols {
                cols.push(col.iter().map(|(r, v)| (r + off, v.clone())).collect());
            }
            off += b.rows;
        }
        SparseMatrix { rows, cols }
    }

    /// Permutes rows and columns: entry `(r, c)` moves to `(row_perm[r], col_perm[c])`.
    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> SparseMatrix {
        let entries = self
            .triplets()
            .into_iter()
            .map(|(r, c, v)| (row_perm[r], col_perm[c], v));
        SparseMatrix::from_triplets(self.rows, self.ncols(), entries).expect("permutation")
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<SparseMatrix> {
        let n = self.rows;
        if n != self.ncols() {
            return None;
        }
        let mut a = self.to_dense();
        let mut inv: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let p = a[col][col].recip();
            for j in 0..n {
                a[col][j] = &a[col][j] * &p;
                inv[col][j] = &inv[col][j] * &p;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for j in 0..n {
                        let t = &a[col][j] * &f;
                        a[r][j] -= t;
                        let t = &inv[col][j] * &f;
                        inv[r][j] -= t;
                    }
                }
            }
        }
        Some(SparseMatrix::from_dense(&inv))
    }

    pub fn rank(&self) -> usize {
        super::elimination::rank(self)
    }

    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        super::elimination::kernel_basis(self)
    }
}

/// JSON exchange form: `{rows, cols, entries: [[r, c, "p/q"], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, Rational)>,
}

impl From<&SparseMatrix> for MatrixJson {
    fn from(m: &SparseMatrix) -> Self {
        MatrixJson { rows: m.nrows(), cols: m.ncols(), entries: m.triplets() }
    }
}

impl TryFrom<MatrixJson> for SparseMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        SparseMatrix::from_triplets(j.rows, j.cols, j.entries)
    }
}

impl Serialize for SparseMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparseMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        SparseMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiply_and_transpose() {
        let a = SparseMatrix::from_int_rows(&[&[1, 2], &[0, 3]]);
        let b = SparseMatrix::from_int_rows(&[&[1, 0], &[1, 1]]);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab, SparseMatrix::from_int_rows(&[&[3, 2], &[3, 3]]));
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.get(0, 1), Rational::from_integer(2));
        assert!(a.mul(&SparseMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = SparseMatrix::from_triplets(2, 3, vec![(1, 2, Rational::new(-1, 2))]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":3,"entries":[[1,2,"-1/2"]]}"#);
        let back: SparseMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"rows":1,"cols":1,"entries":[[1,0,"1"]]}"#;
        assert!(serde_json::from_str::<SparseMatrix>(bad).is_err());
    }

    #[test]
    fn duplicate_entries_sum_and_zeros_drop() {
        let m = SparseMatrix::from_triplets(
            1,
            1,
            vec![(0, 0, Rational::one()), (0, 0, -Rational::one())],
        )
        .unwrap();
        assert!(m.is_zero());
        assert_eq!(m.nnz(), 0);
    }

    #[test]
    fn inverse_of_small_matrix() {
        let a = SparseMatrix::from_int_rows(&[&[0, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), SparseMatrix::identity(2));
        assert!(SparseMatrix::from_int_rows(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }
}
