use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::form::{Bivector, Form, Patch};
use super::ops::{
    alpha_op, bidegree, d_full, d_hor, d_vert, delta, delta_explicit, delta_vert, expand_factored, homogeneity,
};
use super::star::Star;
use crate::linalg::Rational;
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
}

/// Outcome of randomized operator-identity checks on one patch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub p: usize,
    pub q: usize,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0 && c.samples > 0)
    }
}

fn terms_of(f: &Form) -> impl Iterator<Item = Form> + '_ {
    f.terms().map(|(m, c)| Form::monomial(m.exps.clone(), m.syms, c.clone()))
}

fn neg(f: &Form) -> Form {
    f.scale(&Rational::from(-1))
}

/// Checks every differential identity of the bigraded model on `samples`
/// random forms with exponents in `-range..=range`. Deterministic in `seed`.
pub fn check_identities(patch: &Patch, samples: usize, range: i32, seed: u64) -> IdentityReport {
    let g = Bivector::canonical(patch);
    let star = Star::new(patch);
    let p = patch.p() as i32;
    type Check<'a> = (&'a str, Box<dyn Fn(&Form) -> bool + Sync + 'a>);
    let checks: Vec<Check> = vec![
        ("d^2 = 0", Box::new(|f| d_full(patch, &d_full(patch, f)).is_zero())),
        ("d_vert^2 = 0", Box::new(|f| d_vert(patch, &d_vert(patch, f)).is_zero())),
        ("d_hor^2 = 0", Box::new(|f| d_hor(patch, &d_hor(patch, f)).is_zero())),
        (
            "d_vert d_hor + d_hor d_vert = 0",
            Box::new(|f| d_vert(patch, &d_hor(patch, f)).add(&d_hor(patch, &d_vert(patch, f))).is_zero()),
        ),
        ("d = d_vert + d_hor", Box::new(|f| d_full(patch, f) == d_vert(patch, f).add(&d_hor(patch, f)))),
        ("delta^2 = 0", Box::new(|f| delta(patch, &g, &delta(patch, &g, f)).is_zero())),
        ("delta_vert^2 = 0", Box::new(|f| delta_vert(patch, &g, &delta_vert(patch, &g, f)).is_zero())),
        (
            "delta = delta_vert + alpha",
            Box::new(|f| delta(patch, &g, f) == delta_vert(patch, &g, f).add(&alpha_op(patch, &g, f))),
        ),
        (
            "delta_vert alpha + alpha delta_vert = 0",
            Box::new(|f| {
                delta_vert(patch, &g, &alpha_op(patch, &g, f)).add(&alpha_op(patch, &g, &delta_vert(patch, &g, f))).is_zero()
            }),
        ),
        (
            "alpha has bidegree (-2, +1)",
            Box::new(|f| {
                terms_of(f).all(|t| {
                    let (m, _) = t.terms().next().map(|(m, c)| (m.clone(), c.clone())).expect("one term");
                    let (i, j) = bidegree(patch, &m);
                    alpha_op(patch, &g, &t).terms().all(|(n, _)| bidegree(patch, n) == (i.wrapping_sub(2), j + 1))
                })
            }),
        ),
        (
            "delta_vert has bidegree (-1, 0)",
            Box::new(|f| {
                terms_of(f).all(|t| {
                    let m = t.terms().next().expect("one term").0.clone();
                    let (i, j) = bidegree(patch, &m);
                    delta_vert(patch, &g, &t).terms().all(|(n, _)| bidegree(patch, n) == (i.wrapping_sub(1), j))
                })
            }),
        ),
        (
            "delta lowers homogeneity by 1",
            Box::new(|f| {
                terms_of(f).all(|t| {
                    let m = t.terms().next().expect("one term").0.clone();
                    let h = homogeneity(patch, &m);
                    delta(patch, &g, &t).terms().all(|(n, _)| homogeneity(patch, n) == h - 1)
                })
            }),
        ),
        ("*^2 = id", Box::new(|f| star.apply(&star.apply(f)) == *f)),
        (
            "* maps (i, j)_l to (2p - i, j)_(l + p - i)",
            Box::new(|f| {
                terms_of(f).all(|t| {
                    let m = t.terms().next().expect("one term").0.clone();
                    let (i, j) = bidegree(patch, &m);
                    let h = homogeneity(patch, &m);
                    star.apply(&t).terms().all(|(n, _)| {
                        bidegree(patch, n) == (2 * patch.p() - i, j) && homogeneity(patch, n) == h + p - i as i32
                    })
                })
            }),
        ),
        (
            "(-1)^(i+1) d_vert * = * delta_vert",
            Box::new(|f| {
                let mut lhs = Form::zero();
                for t in terms_of(f) {
                    let m = t.terms().next().expect("one term").0.clone();
                    let (i, _) = bidegree(patch, &m);
                    let dt = d_vert(patch, &star.apply(&t));
                    lhs = lhs.add(&if i % 2 == 1 { dt } else { neg(&dt) });
                }
                lhs == star.apply(&delta_vert(patch, &g, f))
            }),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forms: Vec<Form> = (0..samples)
        .map(|_| {
            let n = rng.gen_range(1..=4);
            Form::random(patch, n, range, &mut rng)
        })
        .collect();
    let results = par::map(&checks, |(name, check)| IdentityCheck {
        name: (*name).to_string(),
        samples: forms.len(),
        failures: forms.iter().filter(|f| !check(f)).count(),
    });
    IdentityReport { p: patch.p(), q: patch.q(), checks: results }
}

/// Compares `delta` with the bracket formula on `samples` random factored
/// inputs `f_0 df_1 ^ ... ^ df_k`, `k <= 3`.
pub fn check_explicit_formula(patch: &Patch, samples: usize, range: i32, seed: u64) -> IdentityCheck {
    let g = Bivector::canonical(patch);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<Vec<Form>> = (0..samples)
        .map(|_| {
            let k = rng.gen_range(0..=3);
            (0..=k)
                .map(|_| {
                    let f = Form::random(patch, rng.gen_range(1..=2), range, &mut rng);
                    f.filter(|m| m.syms == 0)
                })
                .collect()
        })
        .collect();
    let failures = par::map(&inputs, |factors| {
        let lhs = delta(patch, &g, &expand_factored(patch, factors));
        delta_explicit(patch, &g, factors).map(|rhs| rhs != lhs).unwrap_or(true)
    })
    .into_iter()
    .filter(|b| *b)
    .count();
    IdentityCheck { name: "delta = bracket formula".into(), samples, failures }
}

/// `delta(a ^ beta) = delta(a) ^ beta` for horizontal monomial forms `beta`.
pub fn check_base_bilinearity(patch: &Patch, samples: usize, range: i32, seed: u64) -> IdentityCheck {
    let g = Bivector::canonical(patch);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hmask = patch.horizontal_mask();
    let mut failures = 0;
    for _ in 0..samples {
        let a = Form::random(patch, 2, range, &mut rng);
        let b = Form::random(patch, 1, range, &mut rng);
        let beta = Form::from_terms(b.terms().map(|(m, c)| {
            let mut m = m.clone();
            for i in 0..patch.nvars() {
                if patch.is_vertical(i) {
                    m.exps[i] = 0;
                }
            }
            m.syms &= hmask;
            (m, c.clone())
        }));
        if delta(patch, &g, &a.wedge(&beta)) != delta(patch, &g, &a).wedge(&beta) {
            failures += 1;
        }
    }
    IdentityCheck { name: "delta is base-linear".into(), samples, failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_identities_hold() {
        for (p, q) in [(1, 0), (1, 1), (2, 0), (2, 1)] {
            for x_laurent in [false, true] {
                let patch = Patch::new(p, q, x_laurent);
                let r = check_identities(&patch, 60, 2, 7);
                assert!(r.passed(), "{r:?}");
                let e = check_explicit_formula(&patch, 40, 2, 11);
                assert_eq!(e.failures, 0, "p={p} q={q}");
                let b = check_base_bilinearity(&patch, 30, 2, 13);
                assert_eq!(b.failures, 0, "p={p} q={q}");
            }
        }
    }
}
