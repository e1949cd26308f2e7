use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Rational;

/// Coordinates `x_1..x_p, y_1..y_q, xi_1..xi_p`, in that order.
///
/// `x` and `xi` are vertical, `y` horizontal. A variable flagged Laurent
/// admits negative exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    p: usize,
    q: usize,
    laurent: Vec<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatchJson {
    pub p: usize,
    #[serde(default)]
    pub q: usize,
    #[serde(default)]
    pub laurent_x: Vec<bool>,
    #[serde(default)]
    pub laurent_y: Vec<bool>,
    #[serde(default)]
    pub laurent_xi: Vec<bool>,
}

impl Patch {
    /// Uniform flags: `x` Laurent or polynomial, `y` polynomial, `xi` Laurent.
    pub fn new(p: usize, q: usize, x_laurent: bool) -> Self {
        let mut laurent = vec![x_laurent; p];
        laurent.extend(vec![false; q]);
        laurent.extend(vec![true; p]);
        Patch { p, q, laurent }
    }

    pub fn with_flags(p: usize, q: usize, x: &[bool], y: &[bool], xi: &[bool]) -> Result<Self> {
        if x.len() != p || y.len() != q || xi.len() != p {
            return Err(Error::Parse(format!(
                "Laurent flags have lengths ({}, {}, {}), expected ({p}, {q}, {p})",
                x.len(),
                y.len(),
                xi.len()
            )));
        }
        if 2 * p + q > 30 {
            return Err(Error::OutOfRange(format!("{} variables; at most 30 supported", 2 * p + q)));
        }
        let laurent = x.iter().chain(y).chain(xi).copied().collect();
        Ok(Patch { p, q, laurent })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn nvars(&self) -> usize {
        2 * self.p + self.q
    }

    pub fn x(&self, i: usize) -> usize {
        i
    }

    pub fn y(&self, j: usize) -> usize {
        self.p + j
    }

    pub fn xi(&self, i: usize) -> usize {
        self.p + self.q + i
    }

    pub fn is_laurent(&self, v: usize) -> bool {
        self.laurent[v]
    }

    pub fn is_vertical(&self, v: usize) -> bool {
        v < self.p || v >= self.p + self.q
    }

    pub fn is_xi(&self, v: usize) -> bool {
        v >= self.p + self.q
    }

    /// Bit mask of the vertical variables.
    pub fn vertical_mask(&self) -> u32 {
        let all = (1u32 << self.nvars()) - 1;
        all & !self.horizontal_mask()
    }

    pub fn horizontal_mask(&self) -> u32 {
        ((1u32 << self.q) - 1) << self.p
    }

    pub fn all_mask(&self) -> u32 {
        (1u32 << self.nvars()) - 1
    }

    pub fn var_name(&self, v: usize) -> String {
        if v < self.p {
            format!("x{}", v + 1)
        } else if v < self.p + self.q {
            format!("y{}", v - self.p + 1)
        } else {
            format!("xi{}", v - self.p - self.q + 1)
        }
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        (0..self.nvars()).find(|&v| self.var_name(v) == name)
    }

    /// True when every exponent is allowed by the Laurent flags.
    pub fn admits(&self, exps: &[i32]) -> bool {
        exps.iter().enumerate().all(|(v, e)| *e >= 0 || self.laurent[v])
    }
}

impl TryFrom<PatchJson> for Patch {
    type Error = Error;
    fn try_from(j: PatchJson) -> Result<Self> {
        let fill = |v: Vec<bool>, n: usize, default: bool| if v.is_empty() { vec![default; n] } else { v };
        Patch::with_flags(
            j.p,
            j.q,
            &fill(j.laurent_x, j.p, false),
            &fill(j.laurent_y, j.q, false),
            &fill(j.laurent_xi, j.p, true),
        )
    }
}

impl From<&Patch> for PatchJson {
    fn from(p: &Patch) -> Self {
        PatchJson {
            p: p.p,
            q: p.q,
            laurent_x: p.laurent[..p.p].to_vec(),
            laurent_y: p.laurent[p.p..p.p + p.q].to_vec(),
            laurent_xi: p.laurent[p.p + p.q..].to_vec(),
        }
    }
}

/// A monomial form `x^e dv_{i_1} ^ ... ^ dv_{i_k}` with the symbols in
/// ascending variable order, recorded as a bit mask.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub exps: Vec<i32>,
    pub syms: u32,
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.syms.count_ones() as usize
    }
}

/// Sign of sorting the concatenation `a ++ b` of two ascending symbol
/// lists, or `None` when they share a symbol.
pub fn wedge_sign(a: u32, b: u32) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> j).count_ones();
        rest &= rest - 1;
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

/// A finite sum of monomial forms with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Form {
    terms: BTreeMap<Monomial, Rational>,
}

impl Form {
    pub fn zero() -> Self {
        Form::default()
    }

    pub fn monomial(exps: Vec<i32>, syms: u32, c: Rational) -> Self {
        let mut f = Form::zero();
        f.add_term(Monomial { exps, syms }, c);
        f
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Form::monomial(vec![0; n], 0, c)
    }

    /// The 1-form `dv` on `n` variables.
    pub fn dvar(n: usize, v: usize) -> Self {
        Form::monomial(vec![0; n], 1 << v, Rational::one())
    }

    /// The function `v`.
    pub fn var(n: usize, v: usize) -> Self {
        let mut e = vec![0; n];
        e[v] = 1;
        Form::monomial(e, 0, Rational::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut f = Form::zero();
        for (m, c) in terms {
            f.add_term(m, c);
        }
        f
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Form) -> Form {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Form {
        if c.is_zero() {
            return Form::zero();
        }
        Form { terms: self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c.clone())).collect() }
    }

    pub fn wedge(&self, other: &Form) -> Form {
        let mut out = Form::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let Some(s) = wedge_sign(m1.syms, m2.syms) else { continue };
                let exps = m1.exps.iter().zip(&m2.exps).map(|(a, b)| a + b).collect();
                out.add_term(Monomial { exps, syms: m1.syms | m2.syms }, c1.clone() * c2.clone() * Rational::from(s));
            }
        }
        out
    }

    /// Keeps the terms satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Form {
        Form { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Random form with `terms` monomials, exponents in `-range..=range`
    /// (clamped at 0 for polynomial variables) and coefficients in `-3..=3`.
    pub fn random<R: Rng>(patch: &Patch, terms: usize, range: i32, rng: &mut R) -> Form {
        let n = patch.nvars();
        let mut f = Form::zero();
        for _ in 0..terms {
            let exps = (0..n)
                .map(|v| {
                    let lo = if patch.is_laurent(v) { -range } else { 0 };
                    rng.gen_range(lo..=range)
                })
                .collect();
            let syms = rng.gen_range(0..=patch.all_mask());
            f.add_term(Monomial { exps, syms }, Rational::from(rng.gen_range(-3i64..=3)));
        }
        f
    }

    pub fn display(&self, patch: &Patch) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut s = c.to_string();
                for (v, e) in m.exps.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => s.push_str(&format!(" {}", patch.var_name(v))),
                        _ => s.push_str(&format!(" {}^{e}", patch.var_name(v))),
                    }
                }
                let syms: Vec<String> =
                    (0..patch.nvars()).filter(|v| m.syms >> v & 1 == 1).map(|v| format!("d{}", patch.var_name(v))).collect();
                if !syms.is_empty() {
                    s.push(' ');
                    s.push_str(&syms.join("^"));
                }
                s
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}|{:b}", self.exps, self.syms)
    }
}

/// One term of the exchange form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: Rational,
    #[serde(default)]
    pub exponents: BTreeMap<String, i32>,
    #[serde(default)]
    pub symbols: Vec<String>,
}

impl Form {
    /// Parses a term list, normalizing symbol order and sign.
    pub fn from_json(patch: &Patch, terms: &[TermJson]) -> Result<Form> {
        let n = patch.nvars();
        let mut f = Form::zero();
        for t in terms {
            let mut exps = vec![0; n];
            for (name, e) in &t.exponents {
                let v = patch.var_index(name).ok_or_else(|| Error::Parse(format!("unknown variable {name}")))?;
                exps[v] = *e;
            }
            if !patch.admits(&exps) {
                return Err(Error::Parse(format!("negative exponent on a polynomial variable in {:?}", t.exponents)));
            }
            let mut sign = 1;
            let mut syms = 0u32;
            for s in &t.symbols {
                let v = s
                    .strip_prefix('d')
                    .and_then(|name| patch.var_index(name))
                    .ok_or_else(|| Error::Parse(format!("unknown symbol {s}")))?;
                match wedge_sign(syms, 1 << v) {
                    Some(sg) => sign *= sg,
                    None => {
                        sign = 0;
                        break;
                    }
                }
                syms |= 1 << v;
            }
            if sign != 0 {
                f.add_term(Monomial { exps, syms }, t.coeff.clone() * Rational::from(sign));
            }
        }
        Ok(f)
    }

    pub fn to_json(&self, patch: &Patch) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(m, c)| TermJson {
                coeff: c.clone(),
                exponents: m
                    .exps
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| **e != 0)
                    .map(|(v, e)| (patch.var_name(v), *e))
                    .collect(),
                symbols: (0..patch.nvars()).filter(|v| m.syms >> v & 1 == 1).map(|v| format!("d{}", patch.var_name(v))).collect(),
            })
            .collect()
    }
}

/// A bivector `sum c x^e d/dv_a ^ d/dv_b`, stored with `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bivector {
    terms: BTreeMap<(Vec<i32>, usize, usize), Rational>,
}

impl Bivector {
    /// Adds `c x^e d/da ^ d/db`, normalizing antisymmetry.
    pub fn add_term(&mut self, exps: Vec<i32>, a: usize, b: usize, c: Rational) {
        if a == b || c.is_zero() {
            return;
        }
        let (key, c) = if a < b { ((exps, a, b), c) } else { ((exps, b, a), -c) };
        let s = self.terms.get(&key).cloned().unwrap_or_else(Rational::zero) + c;
        if s.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, s);
        }
    }

    /// `G = sum_i d/dxi_i ^ d/dx_i`.
    pub fn canonical(patch: &Patch) -> Self {
        let mut g = Bivector::default();
        for i in 0..patch.p() {
            g.add_term(vec![0; patch.nvars()], patch.xi(i), patch.x(i), Rational::one());
        }
        g
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Vec<i32>, usize, usize), &Rational)> {
        self.terms.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge_sign(0b01, 0b10), Some(1));
        assert_eq!(wedge_sign(0b10, 0b01), Some(-1));
        assert_eq!(wedge_sign(0b101, 0b010), Some(-1));
        assert_eq!(wedge_sign(0b011, 0b100), Some(1));
        assert_eq!(wedge_sign(0b110, 0b001), Some(1));
        assert_eq!(wedge_sign(0b1, 0b1), None);
    }

    #[test]
    fn graded_commutativity() {
        let patch = Patch::new(1, 1, true);
        let n = patch.nvars();
        let a = Form::dvar(n, 0);
        let b = Form::dvar(n, 2);
        assert_eq!(a.wedge(&b), b.wedge(&a).scale(&Rational::from(-1)));
        assert!(a.wedge(&a).is_zero());
    }

    #[test]
    fn json_normalizes_symbol_order() {
        let patch = Patch::new(1, 0, false);
        let t = TermJson { coeff: Rational::one(), exponents: BTreeMap::new(), symbols: vec!["dxi1".into(), "dx1".into()] };
        let f = Form::from_json(&patch, &[t]).unwrap();
        let expect = Form::monomial(vec![0, 0], 0b11, Rational::from(-1));
        assert_eq!(f, expect);
        let back = Form::from_json(&patch, &f.to_json(&patch)).unwrap();
        assert_eq!(back, f);
    }
}
