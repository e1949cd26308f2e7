use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Quotient, Rational, SparseMatrix, SparseVec};

/// A finite graded vector space with an optional basis labelling.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GradedSpace {
    pub dims: BTreeMap<i64, usize>,
    pub labels: BTreeMap<i64, Vec<String>>,
}

impl GradedSpace {
    pub fn dim(&self, n: i64) -> usize {
        self.dims.get(&n).copied().unwrap_or(0)
    }
}

/// A bounded chain (`direction = -1`) or cochain (`direction = +1`) complex
/// over the rationals, with `d_n : C_n -> C_{n + direction}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    direction: i8,
    space: GradedSpace,
    diffs: BTreeMap<i64, SparseMatrix>,
}

/// `H_n` of a complex with representative cycles.
#[derive(Debug, Clone)]
pub struct HomologyGroup {
    pub degree: i64,
    pub quotient: Quotient,
}

impl HomologyGroup {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn representatives(&self) -> &[SparseVec] {
        &self.quotient.representatives
    }
}

impl ChainComplex {
    /// Builds a complex, checking shapes and `d * d = 0`. Differentials not
    /// given are zero.
    pub fn new(
        direction: i8,
        dims: BTreeMap<i64, usize>,
        diffs: BTreeMap<i64, SparseMatrix>,
    ) -> Result<Self> {
        if direction != 1 && direction != -1 {
            return Err(Error::IllFormedComplex(format!("direction must be +1 or -1, got {direction}")));
        }
        let dims: BTreeMap<i64, usize> = dims.into_iter().filter(|(_, d)| *d > 0).collect();
        let space = GradedSpace { dims, labels: BTreeMap::new() };
        let dir = i64::from(direction);
        let mut kept = BTreeMap::new();
        for (n, d) in diffs {
            let expected = (space.dim(n + dir), space.dim(n));
            if d.shape() != expected {
                return Err(Error::IllFormedComplex(format!(
                    "d_{n} has shape {:?}, expected {:?}",
                    d.shape(),
                    expected
                )));
            }
            if !d.is_zero() {
                kept.insert(n, d);
            }
        }
        for (n, d) in &kept {
            if let Some(next) = kept.get(&(n + dir)) {
                let dd = next.mul(d)?;
                if !dd.is_zero() {
                    return Err(Error::IllFormedComplex(format!(
                        "d_{} * d_{n} has {} nonzero entries",
                        n + dir,
                        dd.nnz()
                    )));
                }
            }
        }
        Ok(ChainComplex { direction, space, diffs: kept })
    }

    /// Attaches basis labels; each label list must match the degree's dimension.
    pub fn with_labels(mut self, labels: BTreeMap<i64, Vec<String>>) -> Result<Self> {
        for (n, l) in &labels {
            if l.len() != self.dim(*n) {
                return Err(Error::Dimension(format!(
                    "{} labels for degree {n} of dimension {}",
                    l.len(),
                    self.dim(*n)
                )));
            }
        }
        self.space.labels = labels;
        Ok(self)
    }

    /// The complex with a single copy of the rationals in degree 0.
    pub fn point(direction: i8) -> Self {
        Self::new(direction, BTreeMap::from([(0, 1)]), BTreeMap::new()).expect("point complex")
    }

    pub fn direction(&self) -> i8 {
        self.direction
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn dim(&self, n: i64) -> usize {
        self.space.dim(n)
    }

    pub fn dims(&self) -> &BTreeMap<i64, usize> {
        &self.space.dims
    }

    pub fn labels(&self, n: i64) -> Option<&[String]> {
        self.space.labels.get(&n).map(Vec::as_slice)
    }

    /// Degrees with nonzero dimension, ascending.
    pub fn degrees(&self) -> Vec<i64> {
        self.space.dims.keys().copied().collect()
    }

    pub fn total_dim(&self) -> usize {
        self.space.dims.values().sum()
    }

    /// `d_n : C_n -> C_{n + direction}`.
    pub fn differential(&self, n: i64) -> SparseMatrix {
        match self.diffs.get(&n) {
            Some(d) => d.clone(),
            None => SparseMatrix::zeros(self.dim(n + i64::from(self.direction)), self.dim(n)),
        }
    }

    /// The differential arriving at degree `n`.
    pub fn incoming(&self, n: i64) -> SparseMatrix {
        self.differential(n - i64::from(self.direction))
    }

    pub fn nonzero_differentials(&self) -> impl Iterator<Item = (i64, &SparseMatrix)> {
        self.diffs.iter().map(|(n, d)| (*n, d))
    }

    pub fn homology(&self, n: i64) -> HomologyGroup {
        let q = linalg::homology(&self.incoming(n), &self.differential(n))
            .expect("d * d = 0 is checked on construction");
        HomologyGroup { degree: n, quotient: q }
    }

    /// `dim H_n` from ranks alone.
    pub fn homology_dim(&self, n: i64) -> usize {
        let dim = self.dim(n);
        if dim == 0 {
            return 0;
        }
        dim - self.differential(n).rank() - self.incoming(n).rank()
    }

    /// `dim H_n` for every degree in the support, computed in parallel.
    pub fn homology_dims(&self) -> BTreeMap<i64, usize> {
        let degrees = self.degrees();
        let dims = crate::par::map(&degrees, |&n| self.homology_dim(n));
        degrees.into_iter().zip(dims).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.space.dims.iter().map(|(n, d)| sign(*n) * *d as i64).sum()
    }

    /// Euler characteristic of the homology.
    pub fn homology_euler_characteristic(&self) -> i64 {
        self.homology_dims().iter().map(|(n, d)| sign(*n) * *d as i64).sum()
    }
}

fn sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Offsets of the `C_i (x) D_j` blocks inside degree `n` of the tensor
/// product, ordered by ascending `i`.
fn tensor_blocks(c: &ChainComplex, d: &ChainComplex, n: i64) -> Vec<(i64, i64, usize)> {
    let mut out = Vec::new();
    let mut off = 0;
    for (&i, &ci) in c.dims() {
        let j = n - i;
        let dj = d.dim(j);
        if dj > 0 {
            out.push((i, j, off));
            off += ci * dj;
        }
    }
    out
}

/// Total complex of `c (x) d` with `D(x (x) y) = dx (x) y + (-1)^|x| x (x) dy`.
/// The basis of `C_i (x) D_j` is ordered with the `d`-index varying fastest.
pub fn tensor_product(c: &ChainComplex, d: &ChainComplex) -> Result<ChainComplex> {
    if c.direction != d.direction {
        return Err(Error::DirectionMismatch(c.direction, d.direction));
    }
    let dir = i64::from(c.direction);
    let mut dims = BTreeMap::new();
    for (&i, &ci) in c.dims() {
        for (&j, &dj) in d.dims() {
            *dims.entry(i + j).or_insert(0) += ci * dj;
        }
    }
    let mut diffs = BTreeMap::new();
    for &n in dims.keys() {
        let src = tensor_blocks(c, d, n);
        let tgt = tensor_blocks(c, d, n + dir);
        let tgt_off: BTreeMap<i64, usize> = tgt.iter().map(|(i, _, o)| (*i, *o)).collect();
        let mut entries = Vec::new();
        for &(i, j, off) in &src {
            let (ci, dj) = (c.dim(i), d.dim(j));
            let dc = c.differential(i);
            let dd = d.differential(j);
            let sgn = Rational::from_integer(sign(i));
            for a in 0..ci {
                for b in 0..dj {
                    let col = off + a * dj + b;
                    if let Some(&to) = tgt_off.get(&(i + dir)) {
                        for (r, v) in dc.column(a) {
                            entries.push((to + r * dj + b, col, v.clone()));
                        }
                    }
                    if let Some(&to) = tgt_off.get(&i) {
                        let dj2 = d.dim(j + dir);
                        for (r, v) in dd.column(b) {
                            entries.push((to + a * dj2 + r, col, &sgn * v));
                        }
                    }
                }
            }
        }
        let rows = dims.get(&(n + dir)).copied().unwrap_or(0);
        diffs.insert(n, SparseMatrix::from_triplets(rows, dims[&n], entries)?);
    }
    ChainComplex::new(c.direction, dims, diffs)
}

/// Dual complex: same dimensions, transposed differentials, flipped direction.
pub fn dual_complex(c: &ChainComplex) -> ChainComplex {
    let dir = i64::from(c.direction);
    let diffs = c.diffs.iter().map(|(n, d)| (n + dir, d.transpose())).collect();
    let mut out = ChainComplex::new(-c.direction, c.space.dims.clone(), diffs)
        .expect("dual of a complex is a complex");
    out.space.labels = c.space.labels.clone();
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeJson {
    pub n: i64,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DifferentialJson {
    pub from_degree: i64,
    pub matrix: SparseMatrix,
}

/// Exchange form `{direction, degrees, differentials}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexJson {
    pub direction: i8,
    pub degrees: Vec<DegreeJson>,
    pub differentials: Vec<DifferentialJson>,
}

impl From<&ChainComplex> for ComplexJson {
    fn from(c: &ChainComplex) -> Self {
        ComplexJson {
            direction: c.direction,
            degrees: c
                .dims()
                .iter()
                .map(|(n, d)| DegreeJson { n: *n, dim: *d, labels: c.space.labels.get(n).cloned() })
                .collect(),
            differentials: c
                .diffs
                .iter()
                .map(|(n, m)| DifferentialJson { from_degree: *n, matrix: m.clone() })
                .collect(),
        }
    }
}

impl TryFrom<ComplexJson> for ChainComplex {
    type Error = Error;
    fn try_from(j: ComplexJson) -> Result<Self> {
        let mut dims = BTreeMap::new();
        let mut labels = BTreeMap::new();
        for d in j.degrees {
            if dims.insert(d.n, d.dim).is_some() {
                return Err(Error::Parse(format!("degree {} listed twice", d.n)));
            }
            if let Some(l) = d.labels {
                labels.insert(d.n, l);
            }
        }
        let mut diffs = BTreeMap::new();
        for d in j.differentials {
            if diffs.insert(d.from_degree, d.matrix).is_some() {
                return Err(Error::Parse(format!("differential {} listed twice", d.from_degree)));
            }
        }
        labels.retain(|n, _| dims.get(n).is_some_and(|d| *d > 0));
        ChainComplex::new(j.direction, dims, diffs)?.with_labels(labels)
    }
}
