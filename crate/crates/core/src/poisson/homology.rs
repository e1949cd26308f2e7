use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::form::{Bivector, Form, Monomial, Patch};
use super::ops::{bidegree, d_hor, d_vert, delta, delta_vert};
use super::star::Star;
use crate::error::{Error, Result};
use crate::linalg::{self, Rational, SparseMatrix};
use crate::par;

/// Differentials whose homology is computed on windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomologyOp {
    Delta,
    DeltaVert,
}

/// A block of forms invariant under every operator here: fixed
/// `D_i = w(x_i) - w(xi_i)` and fixed `w(y_j)`, where `w(v)` is the exponent
/// of `v` plus one if `dv` is present.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Sector {
    d: Vec<i32>,
    wy: Vec<i32>,
}

fn sectors(patch: &Patch, window: i32) -> Vec<Sector> {
    let mut out = vec![Sector { d: vec![], wy: vec![] }];
    for _ in 0..patch.p() {
        out = out
            .into_iter()
            .flat_map(|s| {
                (-window..=window).map(move |v| {
                    let mut d = s.d.clone();
                    d.push(v);
                    Sector { d, wy: s.wy.clone() }
                })
            })
            .collect();
    }
    for _ in 0..patch.q() {
        out = out
            .into_iter()
            .flat_map(|s| {
                (-window..=window).map(move |v| {
                    let mut wy = s.wy.clone();
                    wy.push(v);
                    Sector { d: s.d.clone(), wy }
                })
            })
            .collect();
    }
    out
}

/// Splits of `l` into `p` parts; each part is bounded by `window` once `p >= 2`.
fn splits(p: usize, l: i32, window: i32) -> Vec<Vec<i32>> {
    if p == 1 {
        return vec![vec![l]];
    }
    let mut out = Vec::new();
    let mut cur = vec![0; p];
    fn rec(i: usize, left: i32, w: i32, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        let p = cur.len();
        if i == p - 1 {
            if left.abs() <= w {
                cur[i] = left;
                out.push(cur.clone());
            }
            return;
        }
        for t in -w..=w {
            cur[i] = t;
            rec(i + 1, left - t, w, cur, out);
        }
    }
    rec(0, l, window, &mut cur, &mut out);
    out
}

/// Monomials of total degree `m`, homogeneity `l`, optional horizontal
/// degree `j`, in the sector.
fn basis(patch: &Patch, s: &Sector, m: i64, l: i32, j: Option<usize>, window: i32) -> Vec<Monomial> {
    if m < 0 || m > patch.nvars() as i64 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for syms in 0..=patch.all_mask() {
        if i64::from(syms.count_ones()) != m {
            continue;
        }
        let (_, h) = bidegree(patch, &Monomial { exps: vec![], syms });
        if j.is_some_and(|j| j != h) {
            continue;
        }
        let has = |v: usize| (syms >> v & 1) as i32;
        for t in splits(patch.p(), l, window) {
            let mut exps = vec![0; patch.nvars()];
            for i in 0..patch.p() {
                exps[patch.x(i)] = s.d[i] + t[i] - has(patch.x(i));
                exps[patch.xi(i)] = t[i] - has(patch.xi(i));
            }
            for (jj, w) in s.wy.iter().enumerate() {
                exps[patch.y(jj)] = w - has(patch.y(jj));
            }
            if patch.admits(&exps) {
                out.push(Monomial { exps, syms });
            }
        }
    }
    out.sort();
    out
}

/// Matrix of `op` from `src` to `tgt`, collecting monomials that leave `tgt`.
fn matrix(
    src: &[Monomial],
    tgt: &[Monomial],
    op: &dyn Fn(&Form) -> Form,
    leaks: &mut Vec<String>,
) -> SparseMatrix {
    let pos: HashMap<&Monomial, usize> = tgt.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut entries = Vec::new();
    for (c, m) in src.iter().enumerate() {
        let img = op(&Form::monomial(m.exps.clone(), m.syms, Rational::one()));
        for (t, v) in img.terms() {
            match pos.get(t) {
                Some(&r) => entries.push((r, c, v.clone())),
                None => leaks.push(t.to_string()),
            }
        }
    }
    SparseMatrix::from_triplets(tgt.len(), src.len(), entries).expect("indices in range")
}

fn leak_error(mut leaks: Vec<String>) -> Result<()> {
    if leaks.is_empty() {
        return Ok(());
    }
    leaks.sort();
    leaks.dedup();
    let count = leaks.len();
    leaks.truncate(5);
    Err(Error::WindowLeak { count, examples: leaks })
}

/// Homology of a graded operator of shift `(dm, dl)` at `(m, l)`, summed
/// over the sectors of the window.
fn windowed_dim(
    patch: &Patch,
    window: i32,
    m: i64,
    l: i32,
    shift: (i64, i32),
    op: &(dyn Fn(&Form) -> Form + Sync),
) -> Result<usize> {
    let results = par::map(&sectors(patch, window), |s| {
        let mut leaks = Vec::new();
        let mid = basis(patch, s, m, l, None, window);
        if mid.is_empty() {
            return (0, leaks);
        }
        let before = basis(patch, s, m - shift.0, l - shift.1, None, window);
        let after = basis(patch, s, m + shift.0, l + shift.1, None, window);
        let d_in = matrix(&before, &mid, op, &mut leaks);
        let d_out = matrix(&mid, &after, op, &mut leaks);
        (mid.len() - d_in.rank() - d_out.rank(), leaks)
    });
    let mut total = 0;
    let mut leaks = Vec::new();
    for (d, l) in results {
        total += d;
        leaks.extend(l);
    }
    leak_error(leaks)?;
    Ok(total)
}

fn check_window(window: i32) -> Result<()> {
    if window < 0 {
        return Err(Error::OutOfRange(format!("window {window} is negative")));
    }
    Ok(())
}

/// Homology of the complex `P^k` at position `l`, i.e. of `op` on forms of
/// degree `k + l` and homogeneity `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoissonHomology {
    pub op: HomologyOp,
    pub k: i64,
    pub l: i32,
    pub degree: i64,
    pub window: i32,
    pub dim: usize,
    pub dim_next_window: usize,
    pub stable: bool,
}

pub fn poisson_homology(
    patch: &Patch,
    g: &Bivector,
    op: HomologyOp,
    k: i64,
    l: i32,
    window: i32,
) -> Result<PoissonHomology> {
    check_window(window)?;
    let f = |x: &Form| match op {
        HomologyOp::Delta => delta(patch, g, x),
        HomologyOp::DeltaVert => delta_vert(patch, g, x),
    };
    let degree = k + i64::from(l);
    let dim = windowed_dim(patch, window, degree, l, (-1, -1), &f)?;
    let next = windowed_dim(patch, window + 1, degree, l, (-1, -1), &f)?;
    Ok(PoissonHomology { op, k, l, degree, window, dim, dim_next_window: next, stable: dim == next })
}

/// Homogeneous de Rham cohomology at homogeneity `l`.
///
/// `vertical` holds the `d_vert`-cohomology per bidegree `(i, j)`; `table`
/// holds the `d_hor`-cohomology of that, which is the bigraded cohomology
/// of `d` in this product model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerhamTable {
    pub l: i32,
    pub window: i32,
    #[serde(with = "crate::tables")]
    pub vertical: BTreeMap<(usize, usize), usize>,
    #[serde(with = "crate::tables")]
    pub table: BTreeMap<(usize, usize), usize>,
    /// `table` agrees with the next window.
    pub stable: bool,
    /// `vertical` agrees with the next window; false whenever horizontal
    /// monomials are inert, as for `q > 0`.
    pub vertical_stable: bool,
}

fn derham_once(patch: &Patch, l: i32, window: i32) -> Result<(BTreeMap<(usize, usize), usize>, BTreeMap<(usize, usize), usize>)> {
    let (p2, q) = (2 * patch.p(), patch.q());
    let dv = |x: &Form| d_vert(patch, x);
    let dh = |x: &Form| d_hor(patch, x);
    let per_sector = par::map(&sectors(patch, window), |s| -> Result<_> {
        let mut leaks = Vec::new();
        let b = |i: i64, j: i64| {
            if i < 0 || j < 0 || i as usize > p2 || j as usize > q {
                Vec::new()
            } else {
                basis(patch, s, i + j, l, Some(j as usize), window)
            }
        };
        let mut quotients: BTreeMap<(usize, usize), (linalg::Quotient, Vec<Monomial>)> = BTreeMap::new();
        for j in 0..=q as i64 {
            for i in 0..=p2 as i64 {
                let mid = b(i, j);
                let d_in = matrix(&b(i - 1, j), &mid, &dv, &mut leaks);
                let d_out = matrix(&mid, &b(i + 1, j), &dv, &mut leaks);
                quotients.insert((i as usize, j as usize), (linalg::homology(&d_in, &d_out)?, mid));
            }
        }
        let mut vertical = BTreeMap::new();
        let mut table = BTreeMap::new();
        for (&(i, j), (quot, _)) in &quotients {
            vertical.insert((i, j), quot.dim());
            let induced = |from: (usize, usize), to: (usize, usize)| -> Result<usize> {
                let (Some((qs, bs)), Some((qt, bt))) = (quotients.get(&from), quotients.get(&to)) else {
                    return Ok(0);
                };
                if qs.dim() == 0 || qt.dim() == 0 {
                    return Ok(0);
                }
                let mut lk = Vec::new();
                let m = matrix(bs, bt, &dh, &mut lk);
                leak_error(lk)?;
                Ok(linalg::induced_matrix(&m, qs, qt)?.rank())
            };
            let r_out = if j < q { induced((i, j), (i, j + 1))? } else { 0 };
            let r_in = if j > 0 { induced((i, j - 1), (i, j))? } else { 0 };
            table.insert((i, j), quot.dim() - r_out - r_in);
        }
        leak_error(leaks)?;
        Ok((vertical, table))
    });
    let mut vertical: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut table: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for r in per_sector {
        let (v, t) = r?;
        for (k, d) in v {
            *vertical.entry(k).or_default() += d;
        }
        for (k, d) in t {
            *table.entry(k).or_default() += d;
        }
    }
    Ok((vertical, table))
}

pub fn homogeneous_derham(patch: &Patch, l: i32, window: i32) -> Result<DerhamTable> {
    check_window(window)?;
    let (vertical, table) = derham_once(patch, l, window)?;
    let (v2, t2) = derham_once(patch, l, window + 1)?;
    let (stable, vertical_stable) = (table == t2, vertical == v2);
    Ok(DerhamTable { l, window, vertical, table, stable, vertical_stable })
}

/// Both sides of the duality between homogeneous Poisson homology and
/// homogeneous de Rham cohomology, for forms of degree `degree` and
/// homogeneity `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub degree: i64,
    pub l: i32,
    pub window: i32,
    /// `delta`-homology.
    pub delta: usize,
    /// `delta_vert`-homology.
    pub delta_vert: usize,
    /// `d_vert`-cohomology at the image of `*`: bidegree `(2p - i, j)`, homogeneity `l + p - i`.
    pub transported: usize,
    /// Homogeneity-zero de Rham cohomology at bidegree `(p - l, degree - l - p)`.
    pub derham: usize,
    pub intertwining: bool,
    pub star_involution: bool,
    pub stable: bool,
    pub agree: bool,
}

fn vertical_bidegree_dim(patch: &Patch, i: i64, j: i64, l: i32, window: i32) -> Result<usize> {
    if i < 0 || j < 0 || i as usize > 2 * patch.p() || j as usize > patch.q() {
        return Ok(0);
    }
    let dv = |x: &Form| d_vert(patch, x);
    let res = par::map(&sectors(patch, window), |s| {
        let mut leaks = Vec::new();
        let mid = basis(patch, s, i + j, l, Some(j as usize), window);
        if mid.is_empty() {
            return (0, leaks);
        }
        let bi = |ii: i64| {
            if ii < 0 || ii as usize > 2 * patch.p() {
                Vec::new()
            } else {
                basis(patch, s, ii + j, l, Some(j as usize), window)
            }
        };
        let d_in = matrix(&bi(i - 1), &mid, &dv, &mut leaks);
        let d_out = matrix(&mid, &bi(i + 1), &dv, &mut leaks);
        (mid.len() - d_in.rank() - d_out.rank(), leaks)
    });
    let mut total = 0;
    let mut leaks = Vec::new();
    for (d, l) in res {
        total += d;
        leaks.extend(l);
    }
    leak_error(leaks)?;
    Ok(total)
}

/// Exact operator checks `*^2 = id` and `(-1)^{i+1} d_vert * = * delta_vert`
/// on every monomial of degree `degree` and homogeneity `l` in the window.
pub fn star_identities_on_window(patch: &Patch, g: &Bivector, degree: i64, l: i32, window: i32) -> (bool, bool) {
    let star = Star::new(patch);
    let mut inv = true;
    let mut inter = true;
    for s in sectors(patch, window) {
        for m in basis(patch, &s, degree, l, None, window) {
            let (i, _) = bidegree(patch, &m);
            let f = Form::monomial(m.exps.clone(), m.syms, Rational::one());
            inv &= star.apply(&star.apply(&f)) == f;
            let sign = if i % 2 == 1 { Rational::one() } else { Rational::from(-1) };
            let lhs = d_vert(patch, &star.apply(&f)).scale(&sign);
            let rhs = star.apply(&delta_vert(patch, g, &f));
            inter &= lhs == rhs;
        }
    }
    (inv, inter)
}

pub fn verify_theorem_delta(patch: &Patch, degree: i64, l: i32, window: i32) -> Result<TheoremReport> {
    check_window(window)?;
    if patch.p() == 0 {
        return Err(Error::OutOfRange("the symplectic operations need p >= 1".into()));
    }
    let g = Bivector::canonical(patch);
    let p = patch.p() as i64;
    let dl = |w: i32, op: HomologyOp| -> Result<usize> {
        let f = |x: &Form| match op {
            HomologyOp::Delta => delta(patch, &g, x),
            HomologyOp::DeltaVert => delta_vert(patch, &g, x),
        };
        windowed_dim(patch, w, degree, l, (-1, -1), &f)
    };
    let transported_at = |w: i32| -> Result<usize> {
        let mut t = 0;
        for j in 0..=patch.q() as i64 {
            let i = degree - j;
            if i < 0 || i > 2 * p {
                continue;
            }
            t += vertical_bidegree_dim(patch, 2 * p - i, j, l + (p - i) as i32, w)?;
        }
        Ok(t)
    };
    let derham_at = |w: i32| -> Result<usize> {
        let (i, j) = (p - i64::from(l), degree - i64::from(l) - p);
        if i < 0 || j < 0 || i > 2 * p || j as usize > patch.q() {
            return Ok(0);
        }
        Ok(derham_once(patch, 0, w)?.1.get(&(i as usize, j as usize)).copied().unwrap_or(0))
    };
    let values = |w: i32| -> Result<[usize; 4]> {
        Ok([dl(w, HomologyOp::Delta)?, dl(w, HomologyOp::DeltaVert)?, transported_at(w)?, derham_at(w)?])
    };
    let now = values(window)?;
    let next = values(window + 1)?;
    let (star_involution, intertwining) = star_identities_on_window(patch, &g, degree, l, window);
    let [delta, delta_vert, transported, derham] = now;
    Ok(TheoremReport {
        degree,
        l,
        window,
        delta,
        delta_vert,
        transported,
        derham,
        intertwining,
        star_involution,
        stable: now == next,
        agree: delta == delta_vert && delta_vert == transported && transported == derham,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1(x_laurent: bool) -> (Patch, Bivector) {
        let p = Patch::new(1, 0, x_laurent);
        let g = Bivector::canonical(&p);
        (p, g)
    }

    #[test]
    fn derham_polynomial_x() {
        let (p, _) = p1(false);
        for w in [3, 4] {
            let t = homogeneous_derham(&p, 0, w).unwrap();
            assert!(t.stable);
            assert_eq!(t.table.get(&(0, 0)), Some(&1));
            assert_eq!(t.table.get(&(1, 0)), Some(&1));
            assert_eq!(t.table.get(&(2, 0)), Some(&0));
            for l in [-2, -1, 1, 2] {
                let t = homogeneous_derham(&p, l, w).unwrap();
                assert!(t.table.values().all(|d| *d == 0), "l = {l}");
            }
        }
    }

    #[test]
    fn derham_laurent_x() {
        let (p, _) = p1(true);
        let t = homogeneous_derham(&p, 0, 3).unwrap();
        assert_eq!(t.table.values().copied().collect::<Vec<_>>(), vec![1, 2, 1]);
    }

    #[test]
    fn base_circle_kunneth() {
        let p = Patch::with_flags(1, 1, &[false], &[true], &[true]).unwrap();
        let t = homogeneous_derham(&p, 0, 3).unwrap();
        let fibre = [1, 1, 0];
        let base = [1, 1];
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(t.table[&(i, j)], fibre[i] * base[j], "({i}, {j})");
            }
        }
        assert!(t.stable);
    }

    #[test]
    fn delta_homology_matches_derham() {
        let (p, g) = p1(false);
        for l in -2..=2 {
            for k in -1..=3 {
                let h = poisson_homology(&p, &g, HomologyOp::Delta, k, l, 3).unwrap();
                let hv = poisson_homology(&p, &g, HomologyOp::DeltaVert, k, l, 3).unwrap();
                assert!(h.stable);
                assert_eq!(h.dim, hv.dim);
                let r = verify_theorem_delta(&p, k + i64::from(l), l, 3).unwrap();
                assert!(r.agree && r.intertwining && r.star_involution && r.stable, "{r:?}");
                assert_eq!(h.dim, r.delta);
            }
        }
        let r = verify_theorem_delta(&p, 1, 0, 3).unwrap();
        assert_eq!(r.delta, 1);
        let r = verify_theorem_delta(&p, 2, 1, 3).unwrap();
        assert_eq!(r.delta, 1);
    }

    #[test]
    fn p2_leaks_are_reported() {
        let p = Patch::new(2, 0, true);
        let g = Bivector::canonical(&p);
        let r = poisson_homology(&p, &g, HomologyOp::Delta, 1, 0, 1);
        assert!(matches!(r, Err(Error::WindowLeak { .. })), "{r:?}");
    }
}
