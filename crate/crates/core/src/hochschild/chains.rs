use std::collections::BTreeMap;
use std::sync::Arc;

use super::algebra::SuperAlgebra;
use crate::complexes::ChainComplex;
use crate::error::{Error, Result};
use crate::linalg::sparse::{axpy, collect_sparse};
use crate::linalg::{Rational, SparseMatrix, SparseVec};

/// The Hochschild chains `C_n = A^{(x)(n+1)}` for `n <= max_n`.
///
/// Basis tuples `(a_0, ..., a_n)` are encoded with `a_0` most significant.
/// In the normalized variant the unit (which must then be a basis vector)
/// is excluded from positions `1..=n`.
#[derive(Debug, Clone)]
pub struct HochschildChains {
    algebra: Arc<SuperAlgebra>,
    max_n: usize,
    normalized: Option<usize>,
}

impl HochschildChains {
    pub fn new(algebra: SuperAlgebra, max_n: usize) -> Self {
        HochschildChains { algebra: Arc::new(algebra), max_n, normalized: None }
    }

    /// Normalized chains; requires the unit to be a basis vector.
    pub fn normalized(algebra: SuperAlgebra, max_n: usize) -> Result<Self> {
        let u = algebra.unit_index().ok_or(Error::NonUnital("normalized chains"))?;
        Ok(HochschildChains { algebra: Arc::new(algebra), max_n, normalized: Some(u) })
    }

    pub fn algebra(&self) -> &SuperAlgebra {
        &self.algebra
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized.is_some()
    }

    fn radix(&self) -> usize {
        self.algebra.dim() - usize::from(self.normalized.is_some())
    }

    pub fn dim(&self, n: usize) -> usize {
        self.algebra.dim() * self.radix().pow(n as u32)
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.max_n {
            return Err(Error::TruncationExceeded { requested: n, max_n: self.max_n });
        }
        Ok(())
    }

    pub fn decode(&self, n: usize, mut idx: usize) -> Vec<usize> {
        let r = self.radix();
        let mut t = vec![0; n + 1];
        for pos in (1..=n).rev() {
            let digit = idx % r;
            idx /= r;
            t[pos] = match self.normalized {
                Some(u) if digit >= u => digit + 1,
                _ => digit,
            };
        }
        t[0] = idx;
        t
    }

    /// Index of a tuple, or `None` when the tuple is zero in normalized chains.
    pub fn encode(&self, t: &[usize]) -> Option<usize> {
        let r = self.radix();
        let mut idx = t[0];
        for &a in &t[1..] {
            let digit = match self.normalized {
                Some(u) if a == u => return None,
                Some(u) if a > u => a - 1,
                _ => a,
            };
            idx = idx * r + digit;
        }
        Some(idx)
    }

    fn push(&self, out: &mut Vec<(usize, Rational)>, t: &[usize], c: Rational) {
        if let Some(i) = self.encode(t) {
            out.push((i, c));
        }
    }

    fn parity_sum(&self, t: &[usize]) -> u8 {
        t.iter().map(|a| self.algebra.parity(*a)).sum::<u8>() % 2
    }

    /// Sign and tuple of the cyclic rotation `t(a_0..a_n) = ±(a_n, a_0, .., a_{n-1})`.
    fn rotate(&self, t: &[usize]) -> (bool, Vec<usize>) {
        let n = t.len() - 1;
        let mu = self.algebra.parity(t[n]) * self.parity_sum(&t[..n]);
        let negative = (n + mu as usize) % 2 == 1;
        let mut r = Vec::with_capacity(n + 1);
        r.push(t[n]);
        r.extend_from_slice(&t[..n]);
        (negative, r)
    }

    fn bprime_terms(&self, t: &[usize], out: &mut Vec<(usize, Rational)>) {
        let n = t.len() - 1;
        for i in 0..n {
            let sign = if i % 2 == 0 { Rational::one() } else { -Rational::one() };
            for (k, c) in self.algebra.basis_product(t[i], t[i + 1]) {
                let mut s = Vec::with_capacity(n);
                s.extend_from_slice(&t[..i]);
                s.push(*k);
                s.extend_from_slice(&t[i + 2..]);
                self.push(out, &s, &sign * c);
            }
        }
    }

    fn cyclic_term(&self, t: &[usize], out: &mut Vec<(usize, Rational)>) {
        let n = t.len() - 1;
        let (negative, r) = self.rotate(t);
        let sign = if negative { -Rational::one() } else { Rational::one() };
        for (k, c) in self.algebra.basis_product(r[0], r[1]) {
            let mut s = Vec::with_capacity(n);
            s.push(*k);
            s.extend_from_slice(&r[2..]);
            self.push(out, &s, &sign * c);
        }
    }

    fn build(&self, n_src: usize, rows: usize, f: impl Fn(&[usize]) -> SparseVec + Sync + Send) -> SparseMatrix {
        let cols = crate::par::map_range(self.dim(n_src), |i| f(&self.decode(n_src, i)));
        SparseMatrix::from_columns(rows, cols)
    }

    /// `b' : C_n -> C_{n-1}`, the alternating sum of adjacent products.
    pub fn bprime(&self, n: usize) -> Result<SparseMatrix> {
        self.check(n)?;
        if n == 0 {
            return Ok(SparseMatrix::zeros(0, self.dim(0)));
        }
        Ok(self.build(n, self.dim(n - 1), |t| {
            let mut out = Vec::new();
            self.bprime_terms(t, &mut out);
            collect_sparse(out)
        }))
    }

    /// `b = b' + (-1)^{n+mu} a_n a_0 (x) a_1 .. a_{n-1}`.
    pub fn b(&self, n: usize) -> Result<SparseMatrix> {
        self.check(n)?;
        if n == 0 {
            return Ok(SparseMatrix::zeros(0, self.dim(0)));
        }
        Ok(self.build(n, self.dim(n - 1), |t| {
            let mut out = Vec::new();
            self.bprime_terms(t, &mut out);
            self.cyclic_term(t, &mut out);
            collect_sparse(out)
        }))
    }

    /// `t : C_n -> C_n`. Only defined on unnormalized chains.
    pub fn t(&self, n: usize) -> Result<SparseMatrix> {
        self.check(n)?;
        if self.is_normalized() {
            return Err(Error::InvalidAlgebra("t does not preserve normalized chains".into()));
        }
        Ok(self.build(n, self.dim(n), |t| {
            let (negative, r) = self.rotate(t);
            let c = if negative { -Rational::one() } else { Rational::one() };
            vec![(self.encode(&r).expect("unnormalized"), c)]
        }))
    }

    fn unit(&self) -> Result<&SparseVec> {
        self.algebra.unit().ok_or(Error::NonUnital("the extra degeneracy s"))
    }

    fn s_apply(&self, x: &[(usize, Rational)], n: usize) -> SparseVec {
        let u = self.unit().expect("checked by caller");
        let mut out = Vec::new();
        for (i, c) in x {
            let t = self.decode(n, *i);
            for (k, uk) in u {
                let mut s = Vec::with_capacity(n + 2);
                s.push(*k);
                s.extend_from_slice(&t);
                self.push(&mut out, &s, c * uk);
            }
        }
        collect_sparse(out)
    }

    /// `s(T) = 1 (x) T : C_n -> C_{n+1}`.
    pub fn s(&self, n: usize) -> Result<SparseMatrix> {
        self.check(n + 1)?;
        self.unit()?;
        Ok(self.build(n, self.dim(n + 1), |t| {
            let i = self.encode(t).expect("decoded tuple");
            self.s_apply(&[(i, Rational::one())], n)
        }))
    }

    /// `N = sum_k t^k` applied to a basis tuple, in unnormalized coordinates.
    fn norm_unnormalized(&self, t: &[usize]) -> Vec<(Vec<usize>, Rational)> {
        let mut out = Vec::with_capacity(t.len());
        let mut cur = t.to_vec();
        let mut sign = Rational::one();
        for _ in 0..t.len() {
            out.push((cur.clone(), sign.clone()));
            let (neg, r) = self.rotate(&cur);
            if neg {
                sign = -sign;
            }
            cur = r;
        }
        out
    }

    fn b0_and_b(&self, t: &[usize]) -> (SparseVec, SparseVec) {
        let u = self.unit().expect("checked by caller");
        let mut b0 = Vec::new();
        let mut b = Vec::new();
        for (tt, c) in self.norm_unnormalized(t) {
            for (k, uk) in u {
                let mut s = Vec::with_capacity(tt.len() + 1);
                s.push(*k);
                s.extend_from_slice(&tt);
                let coeff = &c * uk;
                self.push(&mut b0, &s, coeff.clone());
                self.push(&mut b, &s, coeff.clone());
                let (neg, r) = self.rotate(&s);
                let rc = if neg { coeff } else { -coeff };
                self.push(&mut b, &r, rc);
            }
        }
        (collect_sparse(b0), collect_sparse(b))
    }

    /// `B_0 = s N : C_n -> C_{n+1}`.
    pub fn b0(&self, n: usize) -> Result<SparseMatrix> {
        self.check(n + 1)?;
        self.unit()?;
        Ok(self.build(n, self.dim(n + 1), |t| self.b0_and_b(t).0))
    }

    /// Connes' `B = (1 - t) B_0 : C_n -> C_{n+1}`.
    pub fn big_b(&self, n: usize) -> Result<SparseMatrix> {
        self.check(n + 1)?;
        self.unit()?;
        Ok(self.build(n, self.dim(n + 1), |t| self.b0_and_b(t).1))
    }

    /// `(C_*, b)` for degrees `0..=max_n`.
    pub fn complex(&self) -> Result<ChainComplex> {
        self.complex_with(|n| self.b(n))
    }

    /// `(C_*, b')` for degrees `0..=max_n`.
    pub fn bprime_complex(&self) -> Result<ChainComplex> {
        self.complex_with(|n| self.bprime(n))
    }

    fn complex_with(&self, d: impl Fn(usize) -> Result<SparseMatrix>) -> Result<ChainComplex> {
        let dims = (0..=self.max_n).map(|n| (n as i64, self.dim(n))).collect();
        let mut diffs = BTreeMap::new();
        for n in 1..=self.max_n {
            diffs.insert(n as i64, d(n)?);
        }
        ChainComplex::new(-1, dims, diffs).map_err(|e| Error::Invariant(format!("Hochschild complex: {e}")))
    }

    /// Parity of each basis tuple of `C_n`.
    pub fn parities(&self, n: usize) -> Vec<u8> {
        (0..self.dim(n)).map(|i| self.parity_sum(&self.decode(n, i))).collect()
    }

    /// Sum of the given per-basis weights over each tuple of `C_n`.
    pub fn tuple_weights(&self, n: usize, weight: &[i64]) -> Vec<i64> {
        (0..self.dim(n)).map(|i| self.decode(n, i).iter().map(|a| weight[*a]).sum()).collect()
    }

    /// `B` applied to a chain vector.
    pub fn apply_big_b(&self, x: &[(usize, Rational)], n: usize) -> Result<SparseVec> {
        self.unit()?;
        let mut acc = Vec::new();
        for (i, c) in x {
            acc = axpy(&acc, c, &self.b0_and_b(&self.decode(n, *i)).1);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn b_examples() {
        let c = HochschildChains::new(SuperAlgebra::ground_field(), 3);
        assert!(c.b(1).unwrap().is_zero());
        assert_eq!(c.bprime(1).unwrap().get(0, 0), q(1));
        let d = HochschildChains::new(SuperAlgebra::dual_numbers(), 3);
        // b(1 (x) eps) = eps - eps
        let col = d.encode(&[0, 1]).unwrap();
        assert!(d.b(1).unwrap().column(col).is_empty());
        let cl = HochschildChains::new(SuperAlgebra::clifford(), 3);
        let col = cl.encode(&[1, 1]).unwrap();
        assert_eq!(cl.b(1).unwrap().column(col), &[(0, q(2))]);
        let m = HochschildChains::new(SuperAlgebra::matrix_algebra(2), 2);
        // b'(E12 (x) E21) = E11
        let col = m.encode(&[1, 2]).unwrap();
        assert_eq!(m.bprime(1).unwrap().column(col), &[(0, q(1))]);
    }

    #[test]
    fn truncation_and_unit_errors() {
        let c = HochschildChains::new(SuperAlgebra::ground_field(), 2);
        assert!(matches!(c.b(3), Err(Error::TruncationExceeded { requested: 3, max_n: 2 })));
        assert!(matches!(c.big_b(2), Err(Error::TruncationExceeded { .. })));
        let z = HochschildChains::new(SuperAlgebra::square_zero(), 2);
        assert!(matches!(z.s(0), Err(Error::NonUnital(_))));
        assert!(z.bprime(2).unwrap().is_zero());
    }

    #[test]
    fn degree_zero_cyclic_operators() {
        let c = HochschildChains::new(SuperAlgebra::dual_numbers(), 2);
        assert_eq!(c.t(0).unwrap(), SparseMatrix::identity(2));
        assert_eq!(c.b0(0).unwrap(), c.s(0).unwrap());
    }

    #[test]
    fn dual_numbers_big_b_by_hand() {
        // B(eps) = (1 - t)(1 (x) eps) = 1 (x) eps - eps (x) 1, since t has sign -1 in degree 1.
        let c = HochschildChains::new(SuperAlgebra::dual_numbers(), 2);
        let bb = c.big_b(0).unwrap();
        let one_eps = c.encode(&[0, 1]).unwrap();
        let eps_one = c.encode(&[1, 0]).unwrap();
        let mut expected = vec![(one_eps, q(1)), (eps_one, q(1))];
        expected.sort();
        assert_eq!(bb.column(1), expected.as_slice());
    }

    #[test]
    fn encode_decode_round_trip() {
        let c = HochschildChains::normalized(SuperAlgebra::dual_numbers(), 3).unwrap();
        assert_eq!(c.dim(3), 2);
        for i in 0..c.dim(3) {
            assert_eq!(c.encode(&c.decode(3, i)), Some(i));
        }
        assert_eq!(c.encode(&[0, 0, 1]), None);
    }
}
