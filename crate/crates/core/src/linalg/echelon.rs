use std::collections::BTreeMap;

use super::sparse::{axpy, scale, SparseVec};
use super::Rational;

#[derive(Debug, Clone)]
struct Row {
    vec: SparseVec,
    comb: SparseVec,
}

/// A subspace held in echelon form, keyed by leading (lowest) index.
///
/// Vectors inserted with a tag carry a combination vector so that later
/// reductions can report coordinates in terms of those tags. Untagged
/// vectors contribute to the span but never to coordinates, which is what
/// quotient coordinates `V / W` need: insert `W` untagged, then a
/// complement tagged.
#[derive(Debug, Clone, Default)]
pub struct EchelonBasis {
    rows: BTreeMap<usize, Row>,
}

/// Result of reducing a vector against an [`EchelonBasis`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub residual: SparseVec,
    /// Coordinates over the tags: `v = residual + span(untagged) + sum coords[t] * tagged[t]`.
    pub coords: SparseVec,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn leads(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &SparseVec> + '_ {
        self.rows.values().map(|r| &r.vec)
    }

    pub fn reduce(&self, v: &[(usize, Rational)]) -> Reduction {
        let mut cur: SparseVec = v.to_vec();
        let mut coords: SparseVec = Vec::new();
        let mut pos = 0;
        loop {
            let hit = cur.iter().skip(pos).position(|(i, _)| self.rows.contains_key(i));
            let Some(off) = hit else { break };
            let k = pos + off;
            let (lead, c) = (cur[k].0, cur[k].1.clone());
            let row = &self.rows[&lead];
            let f = -c;
            cur = axpy(&cur, &f, &row.vec);
            if !row.comb.is_empty() {
                coords = axpy(&coords, &f, &row.comb);
            }
            pos = cur.partition_point(|(i, _)| *i <= lead);
        }
        Reduction { residual: cur, coords: scale(&coords, &-Rational::one()) }
    }

    pub fn contains(&self, v: &[(usize, Rational)]) -> bool {
        self.reduce(v).residual.is_empty()
    }

    /// Adds `v` to the span. Returns the new lead if `v` was independent.
    pub fn insert(&mut self, v: &[(usize, Rational)]) -> Option<usize> {
        self.insert_inner(v, Vec::new())
    }

    /// Adds `v` under `tag`. Returns the new lead if `v` was independent.
    pub fn insert_tagged(&mut self, v: &[(usize, Rational)], tag: usize) -> Option<usize> {
        self.insert_inner(v, vec![(tag, Rational::one())])
    }

    fn insert_inner(&mut self, v: &[(usize, Rational)], comb: SparseVec) -> Option<usize> {
        let red = self.reduce(v);
        if red.residual.is_empty() {
            return None;
        }
        let comb = axpy(&comb, &-Rational::one(), &red.coords);
        let lead = red.residual[0].0;
        let inv = red.residual[0].1.recip();
        self.rows.insert(lead, Row { vec: scale(&red.residual, &inv), comb: scale(&comb, &inv) });
        Some(lead)
    }

    /// Fully reduced row echelon form of the span, ordered by lead.
    pub fn rref(&self) -> Vec<SparseVec> {
        let mut done: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (&lead, row) in self.rows.iter().rev() {
            let mut v = row.vec.clone();
            let mut pos = 1;
            loop {
                let hit = v.iter().skip(pos).position(|(i, _)| done.contains_key(i));
                let Some(off) = hit else { break };
                let k = pos + off;
                let (l, c) = (v[k].0, v[k].1.clone());
                v = axpy(&v, &-c, &done[&l]);
                pos = v.partition_point(|(i, _)| *i <= l);
            }
            done.insert(lead, v);
        }
        done.into_values().collect()
    }
}

/// Basis of the null space of the linear map whose matrix has the given rows,
/// over `ncols` unknowns.
pub fn null_space_of_rows(rows: &[SparseVec], ncols: usize) -> Vec<SparseVec> {
    let mut e = EchelonBasis::new();
    for r in rows {
        e.insert(r);
    }
    let rref = e.rref();
    let mut is_pivot = vec![false; ncols];
    for r in &rref {
        is_pivot[r[0].0] = true;
    }
    let mut by_free: Vec<SparseVec> = vec![Vec::new(); ncols];
    for r in &rref {
        let lead = r[0].0;
        for (c, v) in &r[1..] {
            by_free[*c].push((lead, -v));
        }
    }
    (0..ncols)
        .filter(|c| !is_pivot[*c])
        .map(|f| {
            let mut v = std::mem::take(&mut by_free[f]);
            v.push((f, Rational::one()));
            v.sort_by_key(|e| e.0);
            v
        })
        .collect()
}
