use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::symbol::{FormalSymbol, Key};
use crate::error::{Error, Result};
use crate::linalg::echelon::EchelonBasis;
use crate::linalg::Rational;
use crate::par;

/// One point-derivative evaluation `weight * d^order f (point)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointDerivative {
    pub point: Vec<Rational>,
    #[serde(default)]
    pub order: Vec<u32>,
    pub weight: Rational,
}

/// A finitely supported distribution on the base, acting on polynomials in `y`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BaseFunctional {
    pub terms: Vec<PointDerivative>,
}

impl BaseFunctional {
    /// Evaluation at the origin of `base_dim` variables.
    pub fn delta(base_dim: usize) -> Self {
        BaseFunctional {
            terms: vec![PointDerivative { point: vec![Rational::zero(); base_dim], order: vec![0; base_dim], weight: Rational::one() }],
        }
    }

    /// Value on the monomial `y^exps`.
    pub fn eval_monomial(&self, exps: &[u32]) -> Result<Rational> {
        let mut total = Rational::zero();
        for t in &self.terms {
            if t.point.len() != exps.len() || (!t.order.is_empty() && t.order.len() != exps.len()) {
                return Err(Error::Dimension(format!(
                    "base functional point of dimension {} applied to {} variables",
                    t.point.len(),
                    exps.len()
                )));
            }
            let mut v = t.weight.clone();
            for (j, &e) in exps.iter().enumerate() {
                let a = t.order.get(j).copied().unwrap_or(0);
                if a > e {
                    v = Rational::zero();
                    break;
                }
                let c: i64 = (0..i64::from(a)).map(|i| i64::from(e) - i).product();
                v = v * Rational::from(c) * t.point[j].pow((e - a) as i32);
            }
            total += v;
        }
        Ok(total)
    }
}

fn supertrace_sign(a: &FormalSymbol, i: usize) -> Rational {
    if i < a.size().0 {
        Rational::one()
    } else {
        Rational::from(-1)
    }
}

/// `tau_mu(a)`: the base functional applied to the `u^{-1}` coefficient of
/// the supertrace of the order `-1` part, summed over sheets.
pub fn residue_supertrace(a: &FormalSymbol, mu: &BaseFunctional) -> Result<Rational> {
    residue_with(a, mu, true)
}

/// The same pairing with the ordinary trace in place of the supertrace.
pub fn residue_trace(a: &FormalSymbol, mu: &BaseFunctional) -> Result<Rational> {
    residue_with(a, mu, false)
}

fn residue_with(a: &FormalSymbol, mu: &BaseFunctional, graded: bool) -> Result<Rational> {
    let (lo, _) = a.window();
    if lo > -1 {
        return Err(Error::WindowTooShallow { needed: -1, floor: lo });
    }
    let mut total = Rational::zero();
    for (k, v) in a.terms() {
        if k.order == -1 && k.u == -1 && k.row == k.col {
            let s = if graded { supertrace_sign(a, k.row) } else { Rational::one() };
            total += s * v.clone() * mu.eval_monomial(&k.y)?;
        }
    }
    Ok(total)
}

/// Outcome of the trace property on random supercommutators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceCheck {
    pub samples: usize,
    /// Supercommutators with nonzero residue supertrace.
    pub failures: usize,
    /// Supercommutators on which the ordinary trace is nonzero.
    pub ordinary_nonzero: usize,
}

/// Evaluates `tau_mu` on `samples` random homogeneous supercommutators in
/// `(r|s)` matrices over one base variable.
pub fn check_trace_property(size: (usize, usize), sheets: usize, samples: usize, seed: u64) -> Result<TraceCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = BaseFunctional {
        terms: vec![
            PointDerivative { point: vec![Rational::new(1, 2)], order: vec![0], weight: Rational::one() },
            PointDerivative { point: vec![Rational::from(2)], order: vec![1], weight: Rational::from(-3) },
        ],
    };
    let pairs: Vec<(FormalSymbol, FormalSymbol)> = (0..samples)
        .map(|_| {
            let pa = if size.1 > 0 { rng.gen_range(0..=1) } else { 0 };
            let pb = if size.1 > 0 { rng.gen_range(0..=1) } else { 0 };
            let a = FormalSymbol::random((-3, 2), size, sheets, 1, 8, 3, pa, &mut rng)?;
            let b = FormalSymbol::random((-3, 2), size, sheets, 1, 8, 3, pb, &mut rng)?;
            Ok((a, b))
        })
        .collect::<Result<_>>()?;
    let results = par::map(&pairs, |(a, b)| -> Result<(bool, bool)> {
        let c = a.supercommutator(b)?;
        Ok((!residue_supertrace(&c, &mu)?.is_zero(), !residue_trace(&c, &mu)?.is_zero()))
    });
    let mut check = TraceCheck { samples, failures: 0, ordinary_nonzero: 0 };
    for r in results {
        let (f, o) = r?;
        check.failures += usize::from(f);
        check.ordinary_nonzero += usize::from(o);
    }
    Ok(check)
}

/// A family of symbol algebras for the trace-space probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeModel {
    pub size: (usize, usize),
    /// 1 for the one-sided model (`xi > 0`), 2 for both ends.
    pub sheets: usize,
}

/// Trace functionals supported on one truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceProbe {
    pub len: i32,
    pub target_dim: usize,
    pub commutator_rank: usize,
    pub trace_dim: usize,
    /// The residue supertrace of each sheet kills every probed commutator.
    pub residue_vanishes: bool,
    /// The ordinary trace residue kills every probed commutator.
    pub ordinary_trace_vanishes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceSpaceReport {
    pub model: ProbeModel,
    pub probes: Vec<TraceProbe>,
    pub dim: usize,
    pub stable: bool,
}

/// Dimension of the functionals supported on monomials `u^e xi^m E_ij` with
/// `|e|, |m| <= len` that vanish on all supercommutators, computed at
/// truncations `len` and `len + 1`.
pub fn trace_space_probe(model: ProbeModel, len: i32) -> Result<TraceSpaceReport> {
    if len < 1 {
        return Err(Error::OutOfRange(format!("truncation length {len}; need at least 1")));
    }
    let probes = vec![probe(model, len)?, probe(model, len + 1)?];
    let dim = probes[0].trace_dim;
    let stable = probes.iter().all(|p| p.trace_dim == dim);
    Ok(TraceSpaceReport { model, probes, dim, stable })
}

fn monomial(model: ProbeModel, window: (i32, i32), key: Key) -> Result<FormalSymbol> {
    let mut a = FormalSymbol::new(window, model.size, model.sheets, 0)?;
    a.add_term(key, Rational::one())?;
    Ok(a)
}

fn monomials(model: ProbeModel, bound: i32) -> Vec<Key> {
    let n = model.size.0 + model.size.1;
    let mut out = Vec::new();
    for sheet in 0..model.sheets {
        for order in -bound..=bound {
            for u in -bound..=bound {
                for row in 0..n {
                    for col in 0..n {
                        out.push(Key { sheet, order, u, y: vec![], row, col });
                    }
                }
            }
        }
    }
    out
}

fn probe(model: ProbeModel, len: i32) -> Result<TraceProbe> {
    let target: BTreeMap<Key, usize> = monomials(model, len).into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    let small = monomials(model, 1);
    let large = monomials(model, len + 1);
    let pairs: Vec<(&Key, &Key)> =
        small.iter().flat_map(|a| large.iter().filter(move |b| b.sheet == a.sheet).map(move |b| (a, b))).collect();
    let n = model.size.0;
    let vectors = par::map(&pairs, |(ka, kb)| -> Result<Vec<(usize, Rational)>> {
        let a = monomial(model, (ka.order, ka.order), (*ka).clone())?;
        let b = monomial(model, (kb.order, kb.order), (*kb).clone())?;
        let pa = u8::from(ka.row >= n) ^ u8::from(ka.col >= n);
        let pb = u8::from(kb.row >= n) ^ u8::from(kb.col >= n);
        let ab = a.compose_exact(&b, -len)?;
        let ba = b.compose_exact(&a, -len)?;
        let sign = if pa & pb == 1 { Rational::one() } else { Rational::from(-1) };
        let c = ab.lin_comb(&sign, &ba.truncate_below(-len))?;
        let mut v: Vec<(usize, Rational)> =
            c.terms().filter_map(|(k, x)| target.get(k).map(|i| (*i, x.clone()))).collect();
        v.sort_by_key(|(i, _)| *i);
        Ok(v)
    });
    let mut basis = EchelonBasis::new();
    let mut residue_vanishes = true;
    let mut ordinary_trace_vanishes = true;
    let residue_slots: Vec<(usize, usize, usize)> = target
        .iter()
        .filter(|(k, _)| k.order == -1 && k.u == -1 && k.row == k.col)
        .map(|(k, i)| (*i, k.sheet, k.row))
        .collect();
    for v in vectors {
        let v = v?;
        let mut st = vec![Rational::zero(); model.sheets];
        let mut tr = Rational::zero();
        for (i, sheet, row) in &residue_slots {
            if let Ok(pos) = v.binary_search_by_key(i, |(j, _)| *j) {
                let x = v[pos].1.clone();
                st[*sheet] = st[*sheet].clone() + if *row < n { x.clone() } else { -x.clone() };
                tr += x;
            }
        }
        residue_vanishes &= st.iter().all(Rational::is_zero);
        ordinary_trace_vanishes &= tr.is_zero();
        if !v.is_empty() {
            basis.insert(&v);
        }
    }
    let target_dim = target.len();
    Ok(TraceProbe {
        len,
        target_dim,
        commutator_rank: basis.rank(),
        trace_dim: target_dim - basis.rank(),
        residue_vanishes,
        ordinary_trace_vanishes,
    })
}
