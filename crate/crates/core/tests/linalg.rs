mod common;

use common::{bareiss_rank, to_sparse, unimodular};
use corner_homology::linalg::{kernel_basis, rank, solve};
use corner_homology::{Rational, SparseMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix() -> impl Strategy<Value = (Vec<Vec<i64>>, usize)> {
    (1usize..8, 1usize..8).prop_flat_map(|(r, c)| {
        (proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r), Just(c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rank_matches_bareiss((rows, c) in matrix()) {
        let m = to_sparse(&rows, c);
        prop_assert_eq!(rank(&m), bareiss_rank(&rows));
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn kernel_is_kernel_and_complementary((rows, c) in matrix()) {
        let m = to_sparse(&rows, c);
        let k = kernel_basis(&m);
        prop_assert_eq!(k.len() + m.rank(), c);
        for v in &k {
            prop_assert!(m.mul_vec(v).is_empty());
        }
    }

    #[test]
    fn solve_recovers_image((rows, c) in matrix(), x in proptest::collection::vec(-3i64..=3, 8)) {
        let m = to_sparse(&rows, c);
        let xv: Vec<(usize, Rational)> =
            x.iter().take(c).enumerate().filter(|(_, v)| **v != 0).map(|(i, v)| (i, Rational::from(*v))).collect();
        let b = m.mul_vec(&xv);
        let y = solve(&m, &b).expect("b lies in the image");
        prop_assert_eq!(m.mul_vec(&y), b);
    }

    #[test]
    fn rank_invariant_under_unimodular_change(seed in any::<u64>(), (rows, c) in matrix()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = to_sparse(&rows, c);
        let (u, _) = unimodular(rows.len(), 12, &mut rng, |_, _| true);
        let (v, _) = unimodular(c, 12, &mut rng, |_, _| true);
        prop_assert_eq!(u.mul(&m).unwrap().mul(&v).unwrap().rank(), m.rank());
    }

    #[test]
    fn rational_field_laws(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
        let x = Rational::new(a, b);
        let y = Rational::new(c, d);
        prop_assert_eq!(x.clone() + y.clone(), y.clone() + x.clone());
        if !y.is_zero() {
            prop_assert_eq!((x.clone() * y.clone()) / y.clone(), x.clone());
        }
        prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x.clone());
        prop_assert_eq!(Rational::new(a * c, b * d), x * y);
    }
}

#[test]
fn unimodular_inverse_is_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (u, inv) = unimodular(6, 40, &mut rng, |_, _| true);
    assert_eq!(u.mul(&inv).unwrap(), SparseMatrix::identity(6));
}

#[test]
fn large_entries_stay_exact() {
    // Hilbert-like matrix with big denominators: rank is full.
    let n = 7;
    let t: Vec<(usize, usize, Rational)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j, Rational::new(1, (i + j + 1) as i64)))).collect();
    let h = SparseMatrix::from_triplets(n, n, t).unwrap();
    assert_eq!(h.rank(), n);
}
