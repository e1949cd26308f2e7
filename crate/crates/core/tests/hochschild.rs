mod common;

use common::unimodular;
use corner_homology::hochschild::{hh, sbi_check, supertrace_space, HochschildChains, SuperAlgebra};
use corner_homology::linalg::sparse::to_dense;
use corner_homology::{Rational, SparseMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `k[x]/(x^m)` on the basis `1, x, ..., x^{m-1}`.
fn truncated(m: usize) -> SuperAlgebra {
    let products = (0..m).flat_map(|i| (0..m).filter(move |j| i + j < m).map(move |j| (i, j, i + j, Rational::one())));
    let mut unit = vec![Rational::zero(); m];
    unit[0] = Rational::one();
    SuperAlgebra::new(m, vec![0; m], products, Some(unit)).unwrap()
}

/// Rank of the periodic resolution maps: the odd map is multiplication by
/// `x - y` (zero on `A`), the even one by `m x^{m-1}`.
fn truncated_oracle(m: usize, n: usize) -> usize {
    if n == 0 {
        m
    } else {
        m - 1
    }
}

/// The same algebra written in the basis given by the columns of `p`.
fn rebase(a: &SuperAlgebra, p: &SparseMatrix, p_inv: &SparseMatrix) -> SuperAlgebra {
    let d = a.dim();
    let mut products = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let prod = a.mul(p.column(i), p.column(j));
            for (k, c) in p_inv.mul_vec(&prod) {
                products.push((i, j, k, c));
            }
        }
    }
    let parity: Vec<u8> = (0..d).map(|i| a.parity(p.column(i)[0].0)).collect();
    let unit = a.unit().map(|u| to_dense(&p_inv.mul_vec(u), d));
    SuperAlgebra::new(d, parity, products, unit).unwrap()
}

fn convolve(x: &[usize], y: &[usize]) -> Vec<usize> {
    let n = x.len().min(y.len());
    (0..n).map(|k| (0..=k).map(|i| x[i] * y[k - i]).sum()).collect()
}

#[test]
fn truncated_polynomials() {
    for m in 2..=4 {
        let max_n = if m == 4 { 3 } else { 4 };
        let dims = hh(&truncated(m), max_n).unwrap().dims;
        for (n, d) in dims.iter().enumerate() {
            assert_eq!(*d, truncated_oracle(m, n), "m = {m}, n = {n}");
        }
        assert_eq!(supertrace_space(&truncated(m)).dim, m);
    }
}

#[test]
fn supertraces_are_zeroth_homology() {
    for a in [
        SuperAlgebra::ground_field(),
        SuperAlgebra::dual_numbers(),
        SuperAlgebra::clifford(),
        SuperAlgebra::matrix_algebra(2),
        SuperAlgebra::super_matrix(1, 1),
        SuperAlgebra::super_matrix(2, 1),
        SuperAlgebra::dual_numbers().tensor(&SuperAlgebra::clifford()),
    ] {
        let s = supertrace_space(&a);
        assert_eq!(s.dim, hh(&a, 1).unwrap().dims[0]);
        assert!(s.basis.iter().all(|t| a.is_supertrace(t)));
    }
}

#[test]
fn kunneth_for_tensor_products() {
    let pairs = [
        (SuperAlgebra::dual_numbers(), SuperAlgebra::dual_numbers()),
        (SuperAlgebra::dual_numbers(), SuperAlgebra::clifford()),
        (SuperAlgebra::super_matrix(1, 1), SuperAlgebra::dual_numbers()),
    ];
    for (a, b) in pairs {
        let want = convolve(&hh(&a, 3).unwrap().dims, &hh(&b, 3).unwrap().dims);
        let got = hh(&a.tensor(&b), 3).unwrap().dims;
        assert_eq!(got[..want.len()], want[..]);
    }
}

#[test]
fn morita_invariance() {
    let a = SuperAlgebra::dual_numbers();
    let want = hh(&a, 3).unwrap().dims;
    assert_eq!(hh(&a.matrices_over(2), 3).unwrap().dims, want);
}

#[test]
fn normalized_chains_agree() {
    for a in [SuperAlgebra::dual_numbers(), truncated(3)] {
        let full = HochschildChains::new(a.clone(), 4).complex().unwrap();
        let norm = HochschildChains::normalized(a, 4).unwrap().complex().unwrap();
        for n in 0..4 {
            assert_eq!(full.homology_dim(n), norm.homology_dim(n));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn invariant_under_change_of_basis(seed in any::<u64>(), which in 0usize..4) {
        let a = [
            truncated(3),
            SuperAlgebra::matrix_algebra(2),
            SuperAlgebra::super_matrix(1, 1),
            SuperAlgebra::clifford(),
        ][which]
            .clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let par = a.parities().to_vec();
        let (p, p_inv) = unimodular(a.dim(), 4 * a.dim(), &mut rng, |i, j| par[i] == par[j]);
        let b = rebase(&a, &p, &p_inv);
        prop_assert_eq!(hh(&b, 3).unwrap().dims, hh(&a, 3).unwrap().dims);
        prop_assert_eq!(supertrace_space(&b).dim, supertrace_space(&a).dim);
        prop_assert!(sbi_check(&b, 2).unwrap().exact);
    }
}
