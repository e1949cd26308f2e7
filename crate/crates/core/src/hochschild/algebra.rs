use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sparse::{axpy, collect_sparse};
use crate::linalg::{Rational, SparseVec};

/// A finite-dimensional Z/2-graded associative algebra over the rationals,
/// given by structure constants `e_i e_j = sum_k c_ij^k e_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperAlgebra {
    dim: usize,
    parity: Vec<u8>,
    table: Vec<SparseVec>,
    unit: Option<SparseVec>,
}

impl SuperAlgebra {
    /// Validates parity additivity, associativity and the unit laws.
    pub fn new(
        dim: usize,
        parity: Vec<u8>,
        products: impl IntoIterator<Item = (usize, usize, usize, Rational)>,
        unit: Option<Vec<Rational>>,
    ) -> Result<Self> {
        if parity.len() != dim {
            return Err(Error::InvalidAlgebra(format!("{} parities for dimension {dim}", parity.len())));
        }
        if parity.iter().any(|p| *p > 1) {
            return Err(Error::InvalidAlgebra("parities must be 0 or 1".into()));
        }
        let mut raw: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); dim * dim];
        for (i, j, k, c) in products {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidAlgebra(format!("product index ({i}, {j}, {k}) out of range")));
            }
            raw[i * dim + j].push((k, c));
        }
        let table: Vec<SparseVec> = raw.into_iter().map(collect_sparse).collect();
        for i in 0..dim {
            for j in 0..dim {
                for (k, _) in &table[i * dim + j] {
                    if parity[*k] != (parity[i] + parity[j]) % 2 {
                        return Err(Error::InvalidAlgebra(format!(
                            "e{i} e{j} has a component on e{k} of the wrong parity"
                        )));
                    }
                }
            }
        }
        let unit = match unit {
            None => None,
            Some(u) if u.len() != dim => {
                return Err(Error::InvalidAlgebra(format!("unit has {} coefficients", u.len())))
            }
            Some(u) => Some(crate::linalg::sparse::from_dense(&u)),
        };
        let a = SuperAlgebra { dim, parity, table, unit };
        a.check_associative()?;
        a.check_unit()?;
        Ok(a)
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.dim;
        let bad = crate::par::map_range(n, |i| {
            for j in 0..n {
                for k in 0..n {
                    let left = self.mul(self.basis_product(i, j), &[(k, Rational::one())]);
                    let right = self.mul(&[(i, Rational::one())], self.basis_product(j, k));
                    if left != right {
                        return Some((i, j, k));
                    }
                }
            }
            None
        });
        match bad.into_iter().flatten().next() {
            Some((i, j, k)) => Err(Error::InvalidAlgebra(format!("(e{i} e{j}) e{k} != e{i} (e{j} e{k})"))),
            None => Ok(()),
        }
    }

    fn check_unit(&self) -> Result<()> {
        let Some(u) = &self.unit else { return Ok(()) };
        if u.iter().any(|(k, _)| self.parity[*k] != 0) {
            return Err(Error::InvalidAlgebra("unit must be even".into()));
        }
        for i in 0..self.dim {
            let e = [(i, Rational::one())];
            if self.mul(u, &e) != e || self.mul(&e, u) != e {
                return Err(Error::InvalidAlgebra(format!("unit law fails on e{i}")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self, i: usize) -> u8 {
        self.parity[i]
    }

    pub fn parities(&self) -> &[u8] {
        &self.parity
    }

    pub fn unit(&self) -> Option<&SparseVec> {
        self.unit.as_ref()
    }

    pub fn is_unital(&self) -> bool {
        self.unit.is_some()
    }

    /// The basis index of the unit, when the unit is a basis vector.
    pub fn unit_index(&self) -> Option<usize> {
        match self.unit.as_deref() {
            Some([(i, c)]) if c.is_one() => Some(*i),
            _ => None,
        }
    }

    pub fn is_trivially_graded(&self) -> bool {
        self.parity.iter().all(|p| *p == 0)
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &SparseVec {
        &self.table[i * self.dim + j]
    }

    pub fn mul(&self, x: &[(usize, Rational)], y: &[(usize, Rational)]) -> SparseVec {
        let mut acc = Vec::new();
        for (i, a) in x {
            for (j, b) in y {
                let p = self.basis_product(*i, *j);
                if !p.is_empty() {
                    acc = axpy(&acc, &(a * b), p);
                }
            }
        }
        acc
    }

    /// Structure constants `(i, j, k, c)` in lexicographic order.
    pub fn products(&self) -> Vec<(usize, usize, usize, Rational)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for (k, c) in self.basis_product(i, j) {
                    out.push((i, j, *k, c.clone()));
                }
            }
        }
        out
    }

    /// The rationals.
    pub fn ground_field() -> Self {
        Self::new(1, vec![0], [(0, 0, 0, Rational::one())], Some(vec![Rational::one()]))
            .expect("ground field")
    }

    /// `Q[eps]/(eps^2)` with basis `{1, eps}`, both even.
    pub fn dual_numbers() -> Self {
        let one = Rational::one();
        Self::new(
            2,
            vec![0, 0],
            [(0, 0, 0, one.clone()), (0, 1, 1, one.clone()), (1, 0, 1, one.clone())],
            Some(vec![one, Rational::zero()]),
        )
        .expect("dual numbers")
    }

    /// `Q[e]/(e^2 = 1)` with `e` odd; basis `{1, e}`.
    pub fn clifford() -> Self {
        let one = Rational::one();
        Self::new(
            2,
            vec![0, 1],
            [
                (0, 0, 0, one.clone()),
                (0, 1, 1, one.clone()),
                (1, 0, 1, one.clone()),
                (1, 1, 0, one.clone()),
            ],
            Some(vec![one, Rational::zero()]),
        )
        .expect("clifford algebra")
    }

    /// Even `n x n` matrices; basis `E_ij` at index `i * n + j`.
    pub fn matrix_algebra(n: usize) -> Self {
        Self::super_matrix_with_parity(n, vec![0; n])
    }

    /// `M_{r|s}`: `E_ij` has parity `p_i + p_j` with the first `r` indices even.
    pub fn super_matrix(r: usize, s: usize) -> Self {
        let mut p = vec![0; r];
        p.extend(vec![1; s]);
        Self::super_matrix_with_parity(r + s, p)
    }

    fn super_matrix_with_parity(n: usize, p: Vec<u8>) -> Self {
        let mut products = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    products.push((i * n + j, j * n + k, i * n + k, Rational::one()));
                }
            }
        }
        let parity = (0..n * n).map(|ij| (p[ij / n] + p[ij % n]) % 2).collect();
        let unit = (0..n * n)
            .map(|ij| if ij / n == ij % n { Rational::one() } else { Rational::zero() })
            .collect();
        Self::new(n * n, parity, products, Some(unit)).expect("matrix algebra")
    }

    /// The non-unital algebra spanned by `x` with `x^2 = 0`.
    pub fn square_zero() -> Self {
        Self::new(1, vec![0], [], None).expect("square-zero algebra")
    }

    /// Graded tensor product: `(a (x) b)(a' (x) b') = (-1)^{|b||a'|} aa' (x) bb'`.
    /// Basis `e_i (x) f_j` sits at index `i * dim(other) + j`.
    pub fn tensor(&self, other: &SuperAlgebra) -> SuperAlgebra {
        let (m, n) = (self.dim, other.dim);
        let mut products = Vec::new();
        for i in 0..m {
            for j in 0..n {
                for i2 in 0..m {
                    for j2 in 0..n {
                        let sign = if other.parity[j] * self.parity[i2] == 1 { -1 } else { 1 };
                        let s = Rational::from_integer(sign);
                        for (k, c) in self.basis_product(i, i2) {
                            for (l, d) in other.basis_product(j, j2) {
                                products.push((i * n + j, i2 * n + j2, k * n + l, &(&s * c) * d));
                            }
                        }
                    }
                }
            }
        }
        let parity = (0..m * n).map(|ij| (self.parity[ij / n] + other.parity[ij % n]) % 2).collect();
        let unit = match (&self.unit, &other.unit) {
            (Some(u), Some(v)) => {
                let mut w = vec![Rational::zero(); m * n];
                for (i, a) in u {
                    for (j, b) in v {
                        w[i * n + j] = a * b;
                    }
                }
                Some(w)
            }
            _ => None,
        };
        SuperAlgebra::new(m * n, parity, products, unit).expect("tensor product of algebras")
    }

    /// `M_n(A) = M_n(Q) (x) A`.
    pub fn matrices_over(&self, n: usize) -> SuperAlgebra {
        SuperAlgebra::matrix_algebra(n).tensor(self)
    }

    /// `A+ = A (+) Q 1`, with the new unit as the last basis vector.
    pub fn unitalization(&self) -> SuperAlgebra {
        let d = self.dim;
        let mut products = self.products();
        for i in 0..=d {
            products.push((d, i, i, Rational::one()));
            if i < d {
                products.push((i, d, i, Rational::one()));
            }
        }
        let mut parity = self.parity.clone();
        parity.push(0);
        let mut unit = vec![Rational::zero(); d + 1];
        unit[d] = Rational::one();
        SuperAlgebra::new(d + 1, parity, products, Some(unit)).expect("unitalization")
    }

    /// Graded commutator `xy - (-1)^{|x||y|} yx` of basis vectors.
    pub fn supercommutator(&self, i: usize, j: usize) -> SparseVec {
        let sign = if self.parity[i] * self.parity[j] == 1 { 1 } else { -1 };
        axpy(self.basis_product(i, j), &Rational::from_integer(sign), self.basis_product(j, i))
    }

    /// Whether the functional `tau` (coefficients on the basis) vanishes on
    /// every graded commutator.
    pub fn is_supertrace(&self, tau: &[Rational]) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let c = self.supercommutator(i, j);
                c.iter().map(|(k, v)| v * &tau[*k]).sum::<Rational>().is_zero()
            })
        })
    }
}

/// Exchange form `{dim, parity, unit, products: [[i, j, k, "p/q"]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    pub parity: Vec<u8>,
    pub unit: Option<Vec<Rational>>,
    pub products: Vec<(usize, usize, usize, Rational)>,
}

impl From<&SuperAlgebra> for AlgebraJson {
    fn from(a: &SuperAlgebra) -> Self {
        AlgebraJson {
            dim: a.dim,
            parity: a.parity.clone(),
            unit: a.unit.as_ref().map(|u| crate::linalg::sparse::to_dense(u, a.dim)),
            products: a.products(),
        }
    }
}

impl TryFrom<AlgebraJson> for SuperAlgebra {
    type Error = Error;
    fn try_from(j: AlgebraJson) -> Result<Self> {
        SuperAlgebra::new(j.dim, j.parity, j.products, j.unit)
    }
}

impl Serialize for SuperAlgebra {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AlgebraJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SuperAlgebra {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SuperAlgebra::try_from(AlgebraJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// An algebra with an integer filtration level per basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FilteredAlgebraJson", into = "FilteredAlgebraJson")]
pub struct FilteredSuperAlgebra {
    algebra: SuperAlgebra,
    levels: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilteredAlgebraJson {
    pub algebra: SuperAlgebra,
    pub levels: Vec<i64>,
}

impl TryFrom<FilteredAlgebraJson> for FilteredSuperAlgebra {
    type Error = Error;
    fn try_from(j: FilteredAlgebraJson) -> Result<Self> {
        FilteredSuperAlgebra::new(j.algebra, j.levels)
    }
}

impl From<FilteredSuperAlgebra> for FilteredAlgebraJson {
    fn from(f: FilteredSuperAlgebra) -> Self {
        FilteredAlgebraJson { algebra: f.algebra, levels: f.levels }
    }
}

impl FilteredSuperAlgebra {
    /// Checks `c_ij^k != 0 => level(k) <= level(i) + level(j)`.
    pub fn new(algebra: SuperAlgebra, levels: Vec<i64>) -> Result<Self> {
        if levels.len() != algebra.dim() {
            return Err(Error::InvalidAlgebra(format!(
                "{} levels for dimension {}",
                levels.len(),
                algebra.dim()
            )));
        }
        for (i, j, k, _) in algebra.products() {
            if levels[k] > levels[i] + levels[j] {
                return Err(Error::FiltrationViolation(format!(
                    "e{i} e{j} has a component on e{k} above level {}",
                    levels[i] + levels[j]
                )));
            }
        }
        Ok(FilteredSuperAlgebra { algebra, levels })
    }

    pub fn trivial(algebra: SuperAlgebra) -> Self {
        let levels = vec![0; algebra.dim()];
        FilteredSuperAlgebra { algebra, levels }
    }

    pub fn algebra(&self) -> &SuperAlgebra {
        &self.algebra
    }

    pub fn levels(&self) -> &[i64] {
        &self.levels
    }
}

/// `Gr(A)` together with the internal degree of each basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedAlgebra {
    pub algebra: SuperAlgebra,
    pub degrees: Vec<i64>,
}

/// Keeps exactly the structure constants with `level(k) = level(i) + level(j)`.
pub fn associated_graded(f: &FilteredSuperAlgebra) -> Result<GradedAlgebra> {
    let a = &f.algebra;
    let l = &f.levels;
    let products: Vec<_> =
        a.products().into_iter().filter(|(i, j, k, _)| l[*k] == l[*i] + l[*j]).collect();
    let unit = a.unit().and_then(|u| {
        u.iter()
            .all(|(k, _)| l[*k] == 0)
            .then(|| crate::linalg::sparse::to_dense(u, a.dim()))
    });
    let g = match SuperAlgebra::new(a.dim(), a.parities().to_vec(), products.clone(), unit) {
        Ok(g) => g,
        Err(Error::InvalidAlgebra(msg)) if msg.starts_with("unit") => {
            SuperAlgebra::new(a.dim(), a.parities().to_vec(), products, None)?
        }
        Err(e) => return Err(Error::Invariant(format!("associated graded is not an algebra: {e}"))),
    };
    Ok(GradedAlgebra { algebra: g, degrees: l.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn standard_algebras_validate() {
        for a in [
            SuperAlgebra::ground_field(),
            SuperAlgebra::dual_numbers(),
            SuperAlgebra::clifford(),
            SuperAlgebra::matrix_algebra(2),
            SuperAlgebra::super_matrix(1, 1),
            SuperAlgebra::square_zero(),
        ] {
            let j = serde_json::to_string(&a).unwrap();
            assert_eq!(serde_json::from_str::<SuperAlgebra>(&j).unwrap(), a);
        }
        assert_eq!(SuperAlgebra::dual_numbers().matrices_over(2).dim(), 8);
        assert!(SuperAlgebra::square_zero().unitalization().is_unital());
    }

    #[test]
    fn rejects_nonassociative_and_bad_parity() {
        // e0 e0 = e1, e1 e0 = e0 breaks associativity on (e0 e0) e0.
        let r = SuperAlgebra::new(2, vec![0, 0], [(0, 0, 1, q(1)), (1, 0, 0, q(1))], None);
        assert!(matches!(r, Err(Error::InvalidAlgebra(_))));
        let r = SuperAlgebra::new(1, vec![1], [(0, 0, 0, q(1))], None);
        assert!(matches!(r, Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn matrix_units_multiply() {
        let m = SuperAlgebra::matrix_algebra(2);
        // E12 E21 = E11
        assert_eq!(m.basis_product(1, 2), &vec![(0, q(1))]);
    }

    #[test]
    fn supertrace_of_super_matrices() {
        let m = SuperAlgebra::super_matrix(1, 1);
        assert!(m.is_supertrace(&[q(1), q(0), q(0), q(-1)]));
        assert!(!m.is_supertrace(&[q(1), q(0), q(0), q(1)]));
    }

    #[test]
    fn associated_graded_of_triangular_filtration() {
        let m = SuperAlgebra::matrix_algebra(2);
        let f = FilteredSuperAlgebra::new(m, vec![0, 0, 1, 0]).unwrap();
        let g = associated_graded(&f).unwrap().algebra;
        // E21 E12 and E12 E21 drop filtration, E21 E21 = 0 already.
        assert!(g.basis_product(2, 1).is_empty());
        assert!(g.basis_product(1, 2).is_empty());
        assert!(g.basis_product(2, 2).is_empty());
        assert_eq!(g.basis_product(0, 1), &vec![(1, q(1))]);
        assert!(g.is_unital());
        let triv = FilteredSuperAlgebra::trivial(SuperAlgebra::dual_numbers());
        assert_eq!(associated_graded(&triv).unwrap().algebra, SuperAlgebra::dual_numbers());
    }

    #[test]
    fn filtration_is_checked() {
        let r = FilteredSuperAlgebra::new(SuperAlgebra::matrix_algebra(2), vec![1, 0, 0, 0]);
        assert!(matches!(r, Err(Error::FiltrationViolation(_))));
    }
}
