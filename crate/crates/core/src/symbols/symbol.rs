use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Rational;

/// Index of one coefficient: sheet, xi-order, u-exponent, base exponents
/// and matrix entry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub sheet: usize,
    pub order: i32,
    pub u: i32,
    pub y: Vec<u32>,
    pub row: usize,
    pub col: usize,
}

/// A truncated complete symbol `sum_m a_m(u, y) xi^m` on a one-dimensional
/// fibre, with values in `(r|s) x (r|s)` super matrices.
///
/// Orders below `window.0` are unknown; orders above `window.1` vanish.
/// A two-sheet symbol carries independent expansions for `xi > 0` and
/// `xi < 0`, which compose separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSymbol {
    window: (i32, i32),
    size: (usize, usize),
    sheets: usize,
    base_dim: usize,
    terms: BTreeMap<Key, Rational>,
}

/// Result of a composition: the product, and how many term pairs had their
/// expansion cut at the window floor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition {
    pub symbol: FormalSymbol,
    pub discarded: usize,
}

fn falling(n: i64, k: usize) -> i64 {
    (0..k as i64).map(|i| n - i).product()
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

impl FormalSymbol {
    pub fn new(window: (i32, i32), size: (usize, usize), sheets: usize, base_dim: usize) -> Result<Self> {
        if window.0 > window.1 {
            return Err(Error::WindowIncompatible(format!("empty window [{}, {}]", window.0, window.1)));
        }
        if size.0 + size.1 == 0 {
            return Err(Error::Dimension("matrix size 0|0".into()));
        }
        if sheets == 0 || sheets > 2 {
            return Err(Error::OutOfRange(format!("{sheets} sheets; expected 1 or 2")));
        }
        Ok(FormalSymbol { window, size, sheets, base_dim, terms: BTreeMap::new() })
    }

    /// The unit symbol.
    pub fn identity(window: (i32, i32), size: (usize, usize), sheets: usize, base_dim: usize) -> Result<Self> {
        let mut a = FormalSymbol::new(window, size, sheets, base_dim)?;
        if window.0 <= 0 && 0 <= window.1 {
            for sheet in 0..sheets {
                for i in 0..size.0 + size.1 {
                    a.add_term(Key { sheet, order: 0, u: 0, y: vec![0; base_dim], row: i, col: i }, Rational::one())?;
                }
            }
        }
        Ok(a)
    }

    pub fn window(&self) -> (i32, i32) {
        self.window
    }

    pub fn size(&self) -> (usize, usize) {
        self.size
    }

    pub fn sheets(&self) -> usize {
        self.sheets
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn n(&self) -> usize {
        self.size.0 + self.size.1
    }

    pub fn add_term(&mut self, key: Key, c: Rational) -> Result<()> {
        if key.order < self.window.0 || key.order > self.window.1 {
            return Err(Error::WindowIncompatible(format!(
                "order {} outside the window [{}, {}]",
                key.order, self.window.0, self.window.1
            )));
        }
        if key.row >= self.n() || key.col >= self.n() || key.sheet >= self.sheets || key.y.len() != self.base_dim {
            return Err(Error::Dimension(format!("term {key:?} does not fit the symbol shape")));
        }
        if c.is_zero() {
            return Ok(());
        }
        let s = self.terms.get(&key).cloned().unwrap_or_else(Rational::zero) + c;
        if s.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, s);
        }
        Ok(())
    }

    fn entry_parity(&self, i: usize) -> u8 {
        u8::from(i >= self.size.0)
    }

    /// Parity of a homogeneous symbol; `None` when even and odd entries mix.
    /// The zero symbol is even.
    pub fn parity(&self) -> Option<u8> {
        let mut par = None;
        for k in self.terms.keys() {
            let p = self.entry_parity(k.row) ^ self.entry_parity(k.col);
            match par {
                None => par = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(par.unwrap_or(0))
    }

    fn check_compatible(&self, other: &FormalSymbol) -> Result<()> {
        if self.size != other.size || self.sheets != other.sheets || self.base_dim != other.base_dim {
            return Err(Error::WindowIncompatible(format!(
                "shapes {:?}/{}/{} and {:?}/{}/{} differ",
                self.size, self.sheets, self.base_dim, other.size, other.sheets, other.base_dim
            )));
        }
        Ok(())
    }

    /// `sum_k (1/k!) d_xi^k a . d_u^k b`, up to `k_max` (by default every
    /// term that can reach the window). The result window is
    /// `[max(min_a + max_b, min_b + max_a), max_a + max_b]`.
    pub fn compose(&self, other: &FormalSymbol, k_max: Option<usize>) -> Result<Composition> {
        self.check_compatible(other)?;
        let floor = (self.window.0 + other.window.1).max(other.window.0 + self.window.1);
        self.compose_to(other, floor, k_max)
    }

    /// Composition of complete symbols: both inputs are taken as exact
    /// (no unknown lower orders) and the product is kept down to `floor`.
    pub fn compose_exact(&self, other: &FormalSymbol, floor: i32) -> Result<FormalSymbol> {
        self.check_compatible(other)?;
        Ok(self.compose_to(other, floor, None)?.symbol)
    }

    fn compose_to(&self, other: &FormalSymbol, floor: i32, k_max: Option<usize>) -> Result<Composition> {
        let top = self.window.1 + other.window.1;
        let floor = floor.min(top);
        let k_max = k_max.unwrap_or((top - floor) as usize);
        let mut out = FormalSymbol::new((floor, top), self.size, self.sheets, self.base_dim)?;
        let mut by_row: BTreeMap<(usize, usize), Vec<(&Key, &Rational)>> = BTreeMap::new();
        for (k, v) in &other.terms {
            by_row.entry((k.sheet, k.row)).or_default().push((k, v));
        }
        let mut discarded = 0;
        for (ka, va) in &self.terms {
            let Some(bs) = by_row.get(&(ka.sheet, ka.col)) else { continue };
            for (kb, vb) in bs {
                for k in 0..=k_max {
                    let order = ka.order + kb.order - k as i32;
                    let ca = falling(i64::from(ka.order), k);
                    let cb = falling(i64::from(kb.u), k);
                    if ca == 0 || cb == 0 {
                        break;
                    }
                    if order < floor {
                        discarded += 1;
                        break;
                    }
                    let c = va.clone() * (*vb).clone() * Rational::new(ca * cb, factorial(k));
                    let key = Key {
                        sheet: ka.sheet,
                        order,
                        u: ka.u + kb.u - k as i32,
                        y: ka.y.iter().zip(&kb.y).map(|(a, b)| a + b).collect(),
                        row: ka.row,
                        col: kb.col,
                    };
                    out.add_term(key, c)?;
                }
            }
        }
        Ok(Composition { symbol: out, discarded })
    }

    /// `a + c b` on the common window `[max(min), max(max)]`; terms below
    /// the floor are dropped.
    pub fn lin_comb(&self, c: &Rational, other: &FormalSymbol) -> Result<FormalSymbol> {
        self.check_compatible(other)?;
        let window = (self.window.0.max(other.window.0), self.window.1.max(other.window.1));
        let mut out = FormalSymbol::new(window, self.size, self.sheets, self.base_dim)?;
        for (k, v) in &self.terms {
            if k.order >= window.0 {
                out.add_term(k.clone(), v.clone())?;
            }
        }
        for (k, v) in &other.terms {
            if k.order >= window.0 {
                out.add_term(k.clone(), v.clone() * c.clone())?;
            }
        }
        Ok(out)
    }

    /// `a o b - (-1)^{|a||b|} b o a` for homogeneous `a`, `b`.
    pub fn supercommutator(&self, other: &FormalSymbol) -> Result<FormalSymbol> {
        let (Some(pa), Some(pb)) = (self.parity(), other.parity()) else {
            return Err(Error::Dimension("supercommutator of inhomogeneous symbols".into()));
        };
        let ab = self.compose(other, None)?.symbol;
        let ba = other.compose(self, None)?.symbol;
        let sign = if pa & pb == 1 { Rational::one() } else { Rational::from(-1) };
        ab.lin_comb(&sign, &ba)
    }

    /// Coefficients of the top order `window.1`.
    pub fn leading(&self) -> BTreeMap<Key, Rational> {
        self.terms.iter().filter(|(k, _)| k.order == self.window.1).map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    /// Terms restricted to orders `>= floor`.
    pub fn truncate_below(&self, floor: i32) -> FormalSymbol {
        let mut out = self.clone();
        out.window.0 = out.window.0.max(floor).min(out.window.1);
        out.terms.retain(|k, _| k.order >= out.window.0);
        out
    }

    /// Equality of the coefficients at orders `>= floor`.
    pub fn agrees_above(&self, other: &FormalSymbol, floor: i32) -> bool {
        let a: BTreeMap<_, _> = self.terms.iter().filter(|(k, _)| k.order >= floor).collect();
        let b: BTreeMap<_, _> = other.terms.iter().filter(|(k, _)| k.order >= floor).collect();
        a == b
    }

    /// Random homogeneous symbol of the given parity.
    #[allow(clippy::too_many_arguments)]
    pub fn random<R: Rng>(
        window: (i32, i32),
        size: (usize, usize),
        sheets: usize,
        base_dim: usize,
        nterms: usize,
        u_range: i32,
        parity: u8,
        rng: &mut R,
    ) -> Result<FormalSymbol> {
        let mut a = FormalSymbol::new(window, size, sheets, base_dim)?;
        let n = size.0 + size.1;
        for _ in 0..nterms {
            let row = rng.gen_range(0..n);
            let cols: Vec<usize> = (0..n).filter(|c| a.entry_parity(row) ^ a.entry_parity(*c) == parity).collect();
            if cols.is_empty() {
                continue;
            }
            let col = cols[rng.gen_range(0..cols.len())];
            let key = Key {
                sheet: rng.gen_range(0..sheets),
                order: rng.gen_range(window.0..=window.1),
                u: rng.gen_range(-u_range..=u_range),
                y: (0..base_dim).map(|_| rng.gen_range(0..=2)).collect(),
                row,
                col,
            };
            a.add_term(key, Rational::from(rng.gen_range(-3i64..=3)))?;
        }
        Ok(a)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolTermJson {
    pub xi_order: i32,
    #[serde(default)]
    pub u_exp: i32,
    #[serde(default)]
    pub y_exp: Vec<u32>,
    pub entry: (usize, usize),
    pub coeff: Rational,
    #[serde(default)]
    pub sheet: usize,
}

/// Exchange form `{window, size, sheets, base_dim, terms}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolJson {
    pub window: (i32, i32),
    pub size: (usize, usize),
    #[serde(default = "one")]
    pub sheets: usize,
    #[serde(default)]
    pub base_dim: Option<usize>,
    pub terms: Vec<SymbolTermJson>,
}

fn one() -> usize {
    1
}

impl TryFrom<SymbolJson> for FormalSymbol {
    type Error = Error;
    fn try_from(j: SymbolJson) -> Result<Self> {
        let base_dim = j.base_dim.unwrap_or_else(|| j.terms.iter().map(|t| t.y_exp.len()).max().unwrap_or(0));
        let mut a = FormalSymbol::new(j.window, j.size, j.sheets, base_dim)?;
        for t in j.terms {
            let mut y = t.y_exp;
            if y.len() > base_dim {
                return Err(Error::Dimension(format!("y_exp {y:?} longer than base dimension {base_dim}")));
            }
            y.resize(base_dim, 0);
            a.add_term(Key { sheet: t.sheet, order: t.xi_order, u: t.u_exp, y, row: t.entry.0, col: t.entry.1 }, t.coeff)?;
        }
        Ok(a)
    }
}

impl From<&FormalSymbol> for SymbolJson {
    fn from(a: &FormalSymbol) -> Self {
        SymbolJson {
            window: a.window,
            size: a.size,
            sheets: a.sheets,
            base_dim: Some(a.base_dim),
            terms: a
                .terms
                .iter()
                .map(|(k, v)| SymbolTermJson {
                    xi_order: k.order,
                    u_exp: k.u,
                    y_exp: k.y.clone(),
                    entry: (k.row, k.col),
                    coeff: v.clone(),
                    sheet: k.sheet,
                })
                .collect(),
        }
    }
}

impl Serialize for FormalSymbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SymbolJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormalSymbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        FormalSymbol::try_from(SymbolJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn mono(window: (i32, i32), order: i32, u: i32) -> FormalSymbol {
        let mut a = FormalSymbol::new(window, (1, 0), 1, 0).unwrap();
        a.add_term(Key { sheet: 0, order, u, y: vec![], row: 0, col: 0 }, Rational::one()).unwrap();
        a
    }

    #[test]
    fn xi_times_u() {
        let xi = mono((0, 1), 1, 0);
        let u = mono((-1, 0), 0, 1);
        let c = xi.compose(&u, None).unwrap().symbol;
        let mut want = FormalSymbol::new((0, 1), (1, 0), 1, 0).unwrap();
        want.add_term(Key { sheet: 0, order: 1, u: 1, y: vec![], row: 0, col: 0 }, Rational::one()).unwrap();
        want.add_term(Key { sheet: 0, order: 0, u: 0, y: vec![], row: 0, col: 0 }, Rational::one()).unwrap();
        assert_eq!(c, want);
        let back = u.compose(&xi, None).unwrap().symbol;
        assert_eq!(back.terms().count(), 1);
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = rand::thread_rng();
        let a = FormalSymbol::random((-2, 1), (1, 1), 1, 1, 6, 2, 0, &mut rng).unwrap();
        let id = FormalSymbol::identity((-2, 0), (1, 1), 1, 1).unwrap();
        let c = a.compose(&id, None).unwrap().symbol;
        assert!(c.agrees_above(&a, c.window().0));
        let c = id.compose(&a, None).unwrap().symbol;
        assert!(c.agrees_above(&a, c.window().0));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = FormalSymbol::new((0, 1), (1, 0), 1, 0).unwrap();
        let b = FormalSymbol::new((0, 1), (1, 1), 1, 0).unwrap();
        assert!(matches!(a.compose(&b, None), Err(Error::WindowIncompatible(_))));
    }

    #[test]
    fn json_round_trip() {
        let mut rng = rand::thread_rng();
        let a = FormalSymbol::random((-2, 1), (1, 1), 2, 1, 6, 2, 1, &mut rng).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<FormalSymbol>(&s).unwrap(), a);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        fn sym(seed: u64, parity: u8, window: (i32, i32)) -> FormalSymbol {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            FormalSymbol::random(window, (1, 1), 1, 1, 5, 2, parity, &mut rng).unwrap()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn associative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), lo in -3i32..=0) {
                let (a, b, c) = (sym(s1, 0, (lo, 1)), sym(s2, 1, (lo, 1)), sym(s3, 1, (lo, 1)));
                let l = a.compose(&b, None).unwrap().symbol.compose(&c, None).unwrap().symbol;
                let r = a.compose(&b.compose(&c, None).unwrap().symbol, None).unwrap().symbol;
                let floor = l.window().0.max(r.window().0);
                prop_assert!(l.agrees_above(&r, floor));
            }

            #[test]
            fn leading_symbol_multiplies(s1 in any::<u64>(), s2 in any::<u64>()) {
                let (a, b) = (sym(s1, 0, (-1, 1)), sym(s2, 1, (-2, 0)));
                let c = a.compose(&b, None).unwrap().symbol;
                let mut want = FormalSymbol::new((1, 1), (1, 1), 1, 1).unwrap();
                for (ka, va) in a.leading() {
                    for (kb, vb) in b.leading() {
                        if ka.col == kb.row {
                            let key = Key {
                                sheet: 0,
                                order: 1,
                                u: ka.u + kb.u,
                                y: vec![ka.y[0] + kb.y[0]],
                                row: ka.row,
                                col: kb.col,
                            };
                            want.add_term(key, va.clone() * vb.clone()).unwrap();
                        }
                    }
                }
                let got: BTreeMap<_, _> = c.leading();
                let want: BTreeMap<_, _> = want.terms().map(|(k, v)| (k.clone(), v.clone())).collect();
                prop_assert_eq!(got, want);
            }
        }
    }
}
