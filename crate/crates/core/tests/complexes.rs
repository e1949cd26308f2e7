mod common;

use std::collections::BTreeMap;

use common::elementary;
use corner_homology::complexes::{dual_complex, tensor_product, ChainComplex, ComplexJson, ComplexPair};
use corner_homology::{Error, SparseMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homology_of_hidden_elementary_complexes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = elementary(&mut rng, 3, 5, 2);
        for n in 0..=3 {
            prop_assert_eq!(e.complex.homology_dim(n as i64), e.homology(n));
        }
        prop_assert_eq!(e.complex.euler_characteristic(), e.complex.homology_euler_characteristic());
    }

    #[test]
    fn kunneth(s1 in any::<u64>(), s2 in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s1);
        let a = elementary(&mut rng, 2, 3, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(s2);
        let b = elementary(&mut rng, 2, 3, 0);
        let t = tensor_product(&a.complex, &b.complex).unwrap();
        for n in 0..=4usize {
            let want: usize = (0..=n).map(|i| a.homology(i) * b.homology(n - i)).sum();
            prop_assert_eq!(t.homology_dim(n as i64), want);
        }
    }

    #[test]
    fn dual_has_same_dimensions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = elementary(&mut rng, 3, 4, 1);
        let d = dual_complex(&e.complex);
        prop_assert_eq!(d.direction(), 1);
        for n in 0..=3 {
            prop_assert_eq!(d.homology_dim(n), e.complex.homology_dim(n));
        }
    }

    /// The bottom filtration step is a basis subcomplex; sub and relative
    /// homology are read off the pairs.
    #[test]
    fn pair_with_bottom_filtration_step(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = elementary(&mut rng, 3, 4, 1);
        let subset: BTreeMap<i64, Vec<usize>> = e
            .levels
            .iter()
            .enumerate()
            .map(|(n, l)| (n as i64, (0..l.len()).filter(|i| l[*i] == 0).collect()))
            .collect();
        let pair = ComplexPair::from_basis_subset(e.complex.clone(), &subset).unwrap();
        let les = pair.long_exact_sequence().unwrap();
        prop_assert!(les.exact);
        for row in &les.dims {
            let n = row.degree as usize;
            if n > 3 {
                continue;
            }
            let lv = &e.levels[n];
            let partner_level = |i: usize| -> Option<(bool, i64)> {
                e.pairs.iter().find_map(|&(m, a, b)| {
                    if m == n && a == i {
                        Some((true, e.levels[m - 1][b]))
                    } else if m == n + 1 && b == i {
                        Some((false, e.levels[m][a]))
                    } else {
                        None
                    }
                })
            };
            let sub = (0..lv.len())
                .filter(|&i| lv[i] == 0 && partner_level(i).is_none_or(|(_, p)| p > 0))
                .count();
            let rel = (0..lv.len())
                .filter(|&i| lv[i] > 0 && partner_level(i).is_none_or(|(_, p)| p == 0))
                .count();
            prop_assert_eq!(row.sub, sub);
            prop_assert_eq!(row.relative, rel);
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = elementary(&mut rng, 2, 4, 0);
        let s = serde_json::to_string(&ComplexJson::from(&e.complex)).unwrap();
        let back = ChainComplex::try_from(serde_json::from_str::<ComplexJson>(&s).unwrap()).unwrap();
        prop_assert_eq!(back.homology_dims(), e.complex.homology_dims());
    }
}

#[test]
fn nonzero_composition_rejected() {
    let d1 = SparseMatrix::from_int_rows(&[&[1]]);
    let d2 = SparseMatrix::from_int_rows(&[&[1]]);
    let r = ChainComplex::new(-1, BTreeMap::from([(0, 1), (1, 1), (2, 1)]), BTreeMap::from([(1, d1), (2, d2)]));
    assert!(matches!(r, Err(Error::IllFormedComplex(_))));
}
