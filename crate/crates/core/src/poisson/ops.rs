use super::form::{wedge_sign, Bivector, Form, Monomial, Patch};
use crate::error::{Error, Result};
use crate::linalg::Rational;

/// Exterior derivative in the variables of `mask`.
pub fn d_in(f: &Form, mask: u32) -> Form {
    let mut out = Form::zero();
    for (m, c) in f.terms() {
        for (v, &e) in m.exps.iter().enumerate() {
            if e == 0 || mask >> v & 1 == 0 {
                continue;
            }
            let Some(s) = wedge_sign(1 << v, m.syms) else { continue };
            let mut exps = m.exps.clone();
            exps[v] -= 1;
            out.add_term(Monomial { exps, syms: m.syms | 1 << v }, c.clone() * Rational::from(i64::from(e) * i64::from(s)));
        }
    }
    out
}

pub fn d_full(patch: &Patch, f: &Form) -> Form {
    d_in(f, patch.all_mask())
}

/// Differentiates in `x` and `xi` only.
pub fn d_vert(patch: &Patch, f: &Form) -> Form {
    d_in(f, patch.vertical_mask())
}

/// Differentiates in `y` only.
pub fn d_hor(patch: &Patch, f: &Form) -> Form {
    d_in(f, patch.horizontal_mask())
}

/// Interior product with `d/dv`.
pub fn interior(v: usize, f: &Form) -> Form {
    let mut out = Form::zero();
    for (m, c) in f.terms() {
        if m.syms >> v & 1 == 0 {
            continue;
        }
        let before = (m.syms & ((1u32 << v) - 1)).count_ones();
        let s = if before.is_multiple_of(2) { c.clone() } else { -c.clone() };
        out.add_term(Monomial { exps: m.exps.clone(), syms: m.syms & !(1 << v) }, s);
    }
    out
}

/// `i_G`, normalized by `i_{d/da ^ d/db}(da ^ db) = 1`.
pub fn contract(g: &Bivector, f: &Form) -> Form {
    let mut out = Form::zero();
    for ((exps, a, b), c) in g.terms() {
        let part = interior(*b, &interior(*a, f));
        if part.is_zero() {
            continue;
        }
        let coeff = Form::monomial(exps.clone(), 0, c.clone());
        out = out.add(&coeff.wedge(&part));
    }
    out
}

/// Brylinski differential `i_G d - d i_G`.
pub fn delta(patch: &Patch, g: &Bivector, f: &Form) -> Form {
    let all = patch.all_mask();
    contract(g, &d_in(f, all)).sub(&d_in(&contract(g, f), all))
}

/// `i_G d_vert - d_vert i_G`.
pub fn delta_vert(patch: &Patch, g: &Bivector, f: &Form) -> Form {
    let m = patch.vertical_mask();
    contract(g, &d_in(f, m)).sub(&d_in(&contract(g, f), m))
}

/// `i_G d_hor - d_hor i_G`.
pub fn alpha_op(patch: &Patch, g: &Bivector, f: &Form) -> Form {
    let m = patch.horizontal_mask();
    contract(g, &d_in(f, m)).sub(&d_in(&contract(g, f), m))
}

/// `{f, g} = i_G(df ^ dg)`.
pub fn bracket(patch: &Patch, g: &Bivector, a: &Form, b: &Form) -> Form {
    contract(g, &d_full(patch, a).wedge(&d_full(patch, b)))
}

/// Evaluates `delta(f_0 df_1 ^ ... ^ df_k)` through the bracket formula
///
/// `sum_i (-1)^{i+1} {f_0, f_i} df_1..^df_i..df_k
///  + sum_{i<j} (-1)^{i+j} f_0 d{f_i, f_j} ^ df_1..^df_i..^df_j..df_k`.
pub fn delta_explicit(patch: &Patch, g: &Bivector, factors: &[Form]) -> Result<Form> {
    let Some((f0, rest)) = factors.split_first() else {
        return Err(Error::Parse("a factored form needs at least the function f_0".into()));
    };
    if let Some(i) = factors.iter().position(|f| f.max_degree() > 0) {
        return Err(Error::Parse(format!("factor {i} is not a function")));
    }
    let n = patch.nvars();
    let dfs: Vec<Form> = rest.iter().map(|f| d_full(patch, f)).collect();
    let wedge_except = |skip: &[usize]| {
        let mut w = Form::constant(n, Rational::one());
        for (i, df) in dfs.iter().enumerate() {
            if !skip.contains(&i) {
                w = w.wedge(df);
            }
        }
        w
    };
    let mut out = Form::zero();
    for i in 0..rest.len() {
        let sign = if i % 2 == 0 { Rational::one() } else { Rational::from(-1) };
        let term = bracket(patch, g, f0, &rest[i]).wedge(&wedge_except(&[i]));
        out = out.add(&term.scale(&sign));
    }
    for i in 0..rest.len() {
        for j in i + 1..rest.len() {
            let sign = if (i + j) % 2 == 0 { Rational::one() } else { Rational::from(-1) };
            let inner = d_full(patch, &bracket(patch, g, &rest[i], &rest[j]));
            let term = f0.wedge(&inner).wedge(&wedge_except(&[i, j]));
            out = out.add(&term.scale(&sign));
        }
    }
    Ok(out)
}

/// Expands `f_0 df_1 ^ ... ^ df_k` into a form.
pub fn expand_factored(patch: &Patch, factors: &[Form]) -> Form {
    let n = patch.nvars();
    let mut w = factors.first().cloned().unwrap_or_else(|| Form::constant(n, Rational::one()));
    for f in factors.iter().skip(1) {
        w = w.wedge(&d_full(patch, f));
    }
    w
}

/// `omega = sum_i dxi_i ^ dx_i`.
pub fn symplectic_form(patch: &Patch) -> Form {
    let n = patch.nvars();
    let mut w = Form::zero();
    for i in 0..patch.p() {
        w = w.add(&Form::dvar(n, patch.xi(i)).wedge(&Form::dvar(n, patch.x(i))));
    }
    w
}

/// `omega^p / p! = prod_i dxi_i ^ dx_i`.
pub fn volume_form(patch: &Patch) -> Form {
    let n = patch.nvars();
    let mut w = Form::constant(n, Rational::one());
    for i in 0..patch.p() {
        w = w.wedge(&Form::dvar(n, patch.xi(i)).wedge(&Form::dvar(n, patch.x(i))));
    }
    w
}

/// Contraction with the radial field `R = sum_i xi_i d/dxi_i`.
pub fn radial_contract(patch: &Patch, f: &Form) -> Form {
    let n = patch.nvars();
    let mut out = Form::zero();
    for i in 0..patch.p() {
        out = out.add(&Form::var(n, patch.xi(i)).wedge(&interior(patch.xi(i), f)));
    }
    out
}

/// `i_R(omega^p / p!)`. For `p = 1` this is `xi_1 dx_1`.
pub fn liouville_form(patch: &Patch) -> Result<Form> {
    if patch.p() == 0 {
        return Err(Error::OutOfRange("the Liouville form needs p >= 1".into()));
    }
    Ok(radial_contract(patch, &volume_form(patch)))
}

/// `(vertical degree, horizontal degree)` of a monomial.
pub fn bidegree(patch: &Patch, m: &Monomial) -> (usize, usize) {
    let v = (m.syms & patch.vertical_mask()).count_ones() as usize;
    (v, m.degree() - v)
}

/// Sum of `xi` exponents plus the number of `dxi`.
pub fn homogeneity(patch: &Patch, m: &Monomial) -> i32 {
    (0..patch.p())
        .map(|i| {
            let v = patch.xi(i);
            m.exps[v] + (m.syms >> v & 1) as i32
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> (Patch, Bivector) {
        let p = Patch::new(1, 0, true);
        let g = Bivector::canonical(&p);
        (p, g)
    }

    #[test]
    fn basic_derivatives() {
        let (p, _) = p1();
        let x = Form::var(2, 0);
        assert_eq!(d_vert(&p, &x), Form::dvar(2, 0));
        let inv = Form::monomial(vec![0, -1], 0, Rational::one());
        assert_eq!(d_vert(&p, &inv), Form::monomial(vec![0, -2], 0b10, Rational::from(-1)));
    }

    #[test]
    fn contraction_normalization() {
        let (p, g) = p1();
        let w = Form::dvar(2, 1).wedge(&Form::dvar(2, 0));
        assert_eq!(contract(&g, &w), Form::constant(2, Rational::one()));
        assert!(contract(&g, &Form::dvar(2, 0)).is_zero());
        let q = Patch::new(1, 1, true);
        let g = Bivector::canonical(&q);
        let x = Form::var(3, 0);
        let f = x.wedge(&Form::dvar(3, 2)).wedge(&Form::dvar(3, 0)).wedge(&Form::dvar(3, 1));
        assert_eq!(contract(&g, &f), x.wedge(&Form::dvar(3, 1)));
        let _ = p;
    }

    #[test]
    fn explicit_example() {
        let (p, g) = p1();
        let x = Form::var(2, 0);
        let xi = Form::var(2, 1);
        let factored = [x.clone(), xi.clone(), x.clone()];
        let e = delta_explicit(&p, &g, &factored).unwrap();
        assert_eq!(e, Form::dvar(2, 0).scale(&Rational::from(-1)));
        assert_eq!(delta(&p, &g, &expand_factored(&p, &factored)), e);
        assert_eq!(bracket(&p, &g, &xi, &x), Form::constant(2, Rational::one()));
    }

    #[test]
    fn liouville() {
        let (p, _) = p1();
        let a = liouville_form(&p).unwrap();
        assert_eq!(a, Form::monomial(vec![0, 1], 0b01, Rational::one()));
        assert_eq!(d_vert(&p, &a), volume_form(&p));
        assert!(radial_contract(&p, &a).is_zero());
    }
}
