mod common;

use std::collections::BTreeMap;

use common::{bareiss_rank, unimodular};
use corner_homology::corners::{
    cohomology, family_cohomology, laurent_space, local_system_cohomology, BaseSpace, FacePoset, LocalSystem,
};
use corner_homology::{Rational, SparseMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn codim_counts(p: &FacePoset) -> Vec<usize> {
    let mut out = vec![0; p.dim() + 1];
    for f in p.faces() {
        out[f.codim] += 1;
    }
    out
}

fn convolve(x: &[usize], y: &[usize]) -> Vec<usize> {
    let mut out = vec![0; x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn int_entries(m: &SparseMatrix) -> Vec<Vec<i64>> {
    m.to_dense().iter().map(|r| r.iter().map(|x| x.to_string().parse().unwrap()).collect()).collect()
}

#[test]
fn products_of_intervals_count_faces_by_codimension() {
    let point = FacePoset::point();
    let interval = FacePoset::interval();
    let mut p = point.clone();
    for _ in 0..3 {
        let h = cohomology(&laurent_space(&p, None).unwrap().cw);
        assert_eq!(h, codim_counts(&p));
        assert_eq!(h[p.dim()], p.minimal_faces().len());
        let next = p.product(&interval).unwrap();
        let h_next = cohomology(&laurent_space(&next, None).unwrap().cw);
        let h_int = cohomology(&laurent_space(&interval, None).unwrap().cw);
        assert_eq!(h_next, convolve(&h, &h_int));
        p = next;
    }
    assert_eq!(codim_counts(&p), vec![1, 6, 12, 8]);
    assert_eq!(cohomology(&laurent_space(&point.product(&point).unwrap(), None).unwrap().cw), vec![1]);
}

#[test]
fn trivial_family_is_a_product() {
    let fiber = FacePoset::square();
    let fiber_dims = cohomology(&laurent_space(&fiber, None).unwrap().cw);
    for (base, base_dims) in [(BaseSpace::circle(), vec![1, 1]), (BaseSpace::torus(), vec![1, 2, 1])] {
        let t = family_cohomology(&base, &fiber, None, &BTreeMap::new()).unwrap();
        for (k, f) in fiber_dims.iter().enumerate() {
            for (h, b) in base_dims.iter().enumerate() {
                assert_eq!(t.entries[&(k, h)], f * b);
            }
        }
    }
}

#[test]
fn non_invertible_monodromy_rejected() {
    let m = SparseMatrix::zeros(1, 1);
    assert!(LocalSystem::new(BaseSpace::circle(), 1, vec![m]).is_err());
}

#[test]
fn non_commuting_torus_monodromy_rejected() {
    let a = SparseMatrix::from_int_rows(&[&[1, 1], &[0, 1]]);
    let b = SparseMatrix::from_int_rows(&[&[1, 0], &[1, 1]]);
    assert!(LocalSystem::new(BaseSpace::torus(), 2, vec![a, b]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// On the circle both groups are the invariants of the monodromy `T`:
    /// `dim ker (T - 1)`.
    #[test]
    fn circle_twisted_by_random_monodromy(seed in any::<u64>(), rank in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, p_inv) = unimodular(rank, 3 * rank, &mut rng, |_, _| true);
        let diag: Vec<(usize, usize, Rational)> =
            (0..rank).map(|i| (i, i, Rational::from([1i64, -1, 2][rng.gen_range(0..3)]))).collect();
        let d = SparseMatrix::from_triplets(rank, rank, diag).unwrap();
        let t = p.mul(&d).unwrap().mul(&p_inv).unwrap();
        let fixed = rank - bareiss_rank(&int_entries(&t.sub(&SparseMatrix::identity(rank)).unwrap()));
        let ls = LocalSystem::new(BaseSpace::circle(), rank, vec![t]).unwrap();
        prop_assert_eq!(local_system_cohomology(&ls).unwrap(), vec![fixed, fixed]);
    }

    /// Commuting monodromies split into characters; only the trivial one
    /// carries cohomology.
    #[test]
    fn torus_with_commuting_monodromy(seed in any::<u64>(), rank in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, p_inv) = unimodular(rank, 3 * rank, &mut rng, |_, _| true);
        let signs: Vec<(i64, i64)> =
            (0..rank).map(|_| (if rng.gen_bool(0.5) { 1 } else { -1 }, if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
        let conj = |f: &dyn Fn(&(i64, i64)) -> i64| {
            let t: Vec<(usize, usize, Rational)> = signs.iter().enumerate().map(|(i, s)| (i, i, Rational::from(f(s)))).collect();
            p.mul(&SparseMatrix::from_triplets(rank, rank, t).unwrap()).unwrap().mul(&p_inv).unwrap()
        };
        let a = conj(&|s| s.0);
        let b = conj(&|s| s.1);
        let trivial = signs.iter().filter(|s| **s == (1, 1)).count();
        let ls = LocalSystem::new(BaseSpace::torus(), rank, vec![a, b]).unwrap();
        prop_assert_eq!(local_system_cohomology(&ls).unwrap(), vec![trivial, 2 * trivial, trivial]);
    }
}
