use super::form::{wedge_sign, Form, Monomial, Patch};
use crate::linalg::{Rational, SparseMatrix};

/// The vertical symplectic star operator for `omega = sum_i dxi_i ^ dx_i`.
///
/// On vertical symbols `*` solves `b ^ *a = (b, a) vol` with
/// `(b, a) = det[i_G(db_r ^ da_s)]` and `vol = omega^p / p!`; it extends by
/// `*(eta ^ beta) = *(eta) ^ beta` for horizontal `beta`.
#[derive(Debug, Clone)]
pub struct Star {
    patch: Patch,
    /// `table[mask]`: `*` of the vertical symbol set `mask`, as (mask, coefficient) pairs.
    table: std::collections::BTreeMap<u32, Vec<(u32, Rational)>>,
}

impl Star {
    pub fn new(patch: &Patch) -> Self {
        let vert: Vec<usize> = (0..patch.nvars()).filter(|v| patch.is_vertical(*v)).collect();
        let vmask = patch.vertical_mask();
        let pairing = |b: usize, a: usize| -> i64 {
            // i_G(db ^ da) for the canonical G.
            for i in 0..patch.p() {
                if (b, a) == (patch.xi(i), patch.x(i)) {
                    return 1;
                }
                if (b, a) == (patch.x(i), patch.xi(i)) {
                    return -1;
                }
            }
            0
        };
        let mut vol_mask = 0u32;
        let mut vol_sign = 1;
        for i in 0..patch.p() {
            let pair = (1u32 << patch.xi(i)) | (1u32 << patch.x(i));
            let s = wedge_sign(1 << patch.xi(i), 1 << patch.x(i)).expect("distinct");
            vol_sign *= s * wedge_sign(vol_mask, pair).expect("disjoint");
            vol_mask |= pair;
        }
        let subsets: Vec<u32> = (0..=vmask).filter(|m| m & !vmask == 0).collect();
        let mut table = std::collections::BTreeMap::new();
        for &s in &subsets {
            let a: Vec<usize> = vert.iter().copied().filter(|v| s >> v & 1 == 1).collect();
            let mut out = Vec::new();
            for &bm in &subsets {
                if bm.count_ones() != s.count_ones() {
                    continue;
                }
                let b: Vec<usize> = vert.iter().copied().filter(|v| bm >> v & 1 == 1).collect();
                let m: Vec<Vec<i64>> = b.iter().map(|&bv| a.iter().map(|&av| pairing(bv, av)).collect()).collect();
                let c = det(&m);
                if c == 0 {
                    continue;
                }
                let comp = vmask & !bm;
                let sg = wedge_sign(bm, comp).expect("disjoint");
                out.push((comp, Rational::new(c * i64::from(vol_sign), i64::from(sg))));
            }
            table.insert(s, out);
        }
        Star { patch: patch.clone(), table }
    }

    pub fn apply(&self, f: &Form) -> Form {
        let vmask = self.patch.vertical_mask();
        let mut out = Form::zero();
        for (m, c) in f.terms() {
            let sv = m.syms & vmask;
            let sy = m.syms & !vmask;
            let sg = wedge_sign(sv, sy).expect("disjoint");
            for (comp, k) in &self.table[&sv] {
                let Some(s2) = wedge_sign(*comp, sy) else { continue };
                let coeff = c.clone() * k.clone() * Rational::from(sg * s2);
                out.add_term(Monomial { exps: m.exps.clone(), syms: comp | sy }, coeff);
            }
        }
        out
    }

    /// The matrix of `*` on the vertical symbol sets, indexed by ascending mask.
    pub fn symbol_matrix(&self) -> SparseMatrix {
        let keys: Vec<u32> = self.table.keys().copied().collect();
        let pos = |m: u32| keys.binary_search(&m).expect("vertical mask");
        let entries = keys
            .iter()
            .enumerate()
            .flat_map(|(c, k)| self.table[k].iter().map(move |(r, v)| (pos(*r), c, v.clone())))
            .collect::<Vec<_>>();
        SparseMatrix::from_triplets(keys.len(), keys.len(), entries).expect("square")
    }
}

fn det(m: &[Vec<i64>]) -> i64 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .filter(|&j| m[0][j] != 0)
        .map(|j| {
            let minor: Vec<Vec<i64>> =
                m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det(&minor)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::super::ops::volume_form;
    use super::*;

    #[test]
    fn star_of_one_and_vol() {
        let p = Patch::new(1, 0, true);
        let s = Star::new(&p);
        let one = Form::constant(2, Rational::one());
        assert_eq!(s.apply(&one), volume_form(&p));
        assert_eq!(s.apply(&volume_form(&p)), one);
    }

    /// Solves `b ^ *a = (b, a) vol` over the 1-form basis directly.
    #[test]
    fn one_forms_solve_defining_system() {
        let p = Patch::new(1, 0, true);
        let s = Star::new(&p);
        let g = super::super::form::Bivector::canonical(&p);
        let vol = volume_form(&p);
        let basis = [Form::dvar(2, 0), Form::dvar(2, 1)];
        for a in &basis {
            for b in &basis {
                let lhs = b.wedge(&s.apply(a));
                let pair = super::super::ops::contract(&g, &b.wedge(a));
                let rhs = pair.wedge(&vol);
                assert_eq!(lhs, rhs);
            }
        }
        assert_eq!(s.apply(&Form::dvar(2, 0)), Form::dvar(2, 0));
        assert_eq!(s.apply(&Form::dvar(2, 1)), Form::dvar(2, 1));
    }

    #[test]
    fn involution_on_symbols() {
        for pp in 1..=3 {
            let p = Patch::new(pp, 1, true);
            let m = Star::new(&p).symbol_matrix();
            assert_eq!(m.mul(&m).unwrap(), SparseMatrix::identity(m.nrows()));
        }
    }
}
