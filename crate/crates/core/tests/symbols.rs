use std::collections::BTreeMap;

use corner_homology::symbols::{
    check_trace_property, residue_supertrace, residue_trace, trace_space_probe, BaseFunctional, FormalSymbol, Key,
    PointDerivative, ProbeModel,
};
use corner_homology::Rational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Vector of Laurent polynomials in `(u, y)`, keyed by `(component, u, y)`.
type Vector = BTreeMap<(usize, i32, u32), Rational>;

fn falling(s: i32, m: i32) -> i64 {
    (0..m).map(|i| i64::from(s - i)).product()
}

/// Realizes `sum c u^e y^f xi^m E_rc` as the differential operator
/// `sum c u^e y^f (d/du)^m E_rc` and applies it.
fn apply(a: &FormalSymbol, v: &Vector) -> Vector {
    let mut out = Vector::new();
    for (k, c) in a.terms() {
        assert!(k.order >= 0);
        for ((comp, s, t), x) in v {
            if *comp != k.col {
                continue;
            }
            let f = falling(*s, k.order);
            if f == 0 {
                continue;
            }
            let key = (k.row, s + k.u - k.order, t + k.y[0]);
            *out.entry(key).or_insert_with(Rational::zero) += c.clone() * x.clone() * Rational::from(f);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn differential_operator(rng: &mut ChaCha8Rng, size: (usize, usize), top: i32) -> FormalSymbol {
    let n = size.0 + size.1;
    let mut a = FormalSymbol::new((0, top), size, 1, 1).unwrap();
    for _ in 0..4 {
        let key = Key {
            sheet: 0,
            order: rng.gen_range(0..=top),
            u: rng.gen_range(-2..=2),
            y: vec![rng.gen_range(0..=1)],
            row: rng.gen_range(0..n),
            col: rng.gen_range(0..n),
        };
        a.add_term(key, Rational::from(rng.gen_range(-3i64..=3))).unwrap();
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Composition of symbols is composition of the operators they realize.
    #[test]
    fn composition_realizes_operator_composition(seed in any::<u64>(), which in 0usize..3) {
        let size = [(1, 0), (2, 0), (1, 1)][which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = differential_operator(&mut rng, size, 2);
        let b = differential_operator(&mut rng, size, 2);
        let ab = a.compose_exact(&b, 0).unwrap();
        let n = size.0 + size.1;
        for s in -3..=3 {
            for comp in 0..n {
                let v = Vector::from([((comp, s, 0), Rational::one())]);
                prop_assert_eq!(apply(&ab, &v), apply(&a, &apply(&b, &v)));
            }
        }
    }

    #[test]
    fn residue_kills_supercommutators(seed in any::<u64>(), which in 0usize..4) {
        let (size, sheets) = [((1, 0), 1), ((2, 0), 1), ((1, 1), 1), ((1, 1), 2)][which];
        let c = check_trace_property(size, sheets, 8, seed).unwrap();
        prop_assert_eq!(c.samples, 8);
        prop_assert_eq!(c.failures, 0);
    }

    #[test]
    fn residue_is_linear(seed in any::<u64>(), c in -5i64..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = FormalSymbol::random((-2, 1), (1, 1), 1, 1, 8, 2, 0, &mut rng).unwrap();
        let b = FormalSymbol::random((-2, 1), (1, 1), 1, 1, 8, 2, 0, &mut rng).unwrap();
        let mu = BaseFunctional {
            terms: vec![
                PointDerivative { point: vec![Rational::new(1, 3)], order: vec![0], weight: Rational::from(2) },
                PointDerivative { point: vec![Rational::from(-1)], order: vec![1], weight: Rational::one() },
            ],
        };
        let c = Rational::from(c);
        let lhs = residue_supertrace(&a.lin_comb(&c, &b).unwrap(), &mu).unwrap();
        let rhs = residue_supertrace(&a, &mu).unwrap() + c * residue_supertrace(&b, &mu).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn point_derivatives_on_monomials() {
    let mu = BaseFunctional {
        terms: vec![PointDerivative { point: vec![Rational::from(2), Rational::one()], order: vec![2, 0], weight: Rational::one() }],
    };
    // d^2/dy0^2 (y0^3 y1^4) at (2, 1) = 6 * 2
    assert_eq!(mu.eval_monomial(&[3, 4]).unwrap(), Rational::from(12));
    assert_eq!(mu.eval_monomial(&[1, 4]).unwrap(), Rational::zero());
    assert!(mu.eval_monomial(&[1]).is_err());
}

#[test]
fn residue_of_inverse_derivative_times_inverse_u() {
    let mut a = FormalSymbol::new((-1, 0), (1, 1), 1, 0).unwrap();
    for (i, c) in [(0, 3), (1, 5)] {
        a.add_term(Key { sheet: 0, order: -1, u: -1, y: vec![], row: i, col: i }, Rational::from(c)).unwrap();
    }
    let mu = BaseFunctional::delta(0);
    assert_eq!(residue_supertrace(&a, &mu).unwrap(), Rational::from(-2));
    assert_eq!(residue_trace(&a, &mu).unwrap(), Rational::from(8));
}

#[test]
fn ordinary_trace_fails_on_odd_blocks() {
    let c = check_trace_property((1, 1), 1, 40, 7).unwrap();
    assert_eq!(c.failures, 0);
    assert!(c.ordinary_nonzero > 0);
}

#[test]
fn trace_space_dimensions() {
    for (model, want) in [
        (ProbeModel { size: (1, 0), sheets: 1 }, 1),
        (ProbeModel { size: (1, 0), sheets: 2 }, 2),
        (ProbeModel { size: (1, 1), sheets: 1 }, 1),
    ] {
        let r = trace_space_probe(model, 2).unwrap();
        assert!(r.stable);
        assert_eq!(r.dim, want);
        assert!(r.probes.iter().all(|p| p.residue_vanishes));
    }
}
