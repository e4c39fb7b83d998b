//! Exterior algebra over dx1..dxn with D-finite coefficients, all
//! living in one shared rectangular system. Only the operations the
//! telescoping recursion needs: wedge (with at least one rational
//! factor), the truncated differential d_s, operator action, and the
//! omega = u /\ dx_l + v split.

use crate::dfinite::DFiniteElement;
use crate::error::{Error, Result};
use crate::ore::{OreOperator, WeylOperator};
use crate::rational::RationalFunction;
use std::collections::BTreeMap;
use std::rc::Rc;

#[derive(Clone, Debug)]
pub struct DifferentialForm {
    arity: usize,
    /// strictly increasing tuples of x-indices (1-based) -> coefficient
    terms: BTreeMap<Vec<usize>, DFiniteElement>,
}

impl PartialEq for DifferentialForm {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.terms == other.terms
    }
}

impl DifferentialForm {
    pub fn zero(arity: usize) -> Self {
        DifferentialForm {
            arity,
            terms: BTreeMap::new(),
        }
    }

    /// A 0-form.
    pub fn scalar(f: DFiniteElement) -> Self {
        let mut w = Self::zero(f.arity());
        w.insert(Vec::new(), f).expect("empty tuple is valid");
        w
    }

    pub fn from_terms(
        arity: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, DFiniteElement)>,
    ) -> Result<Self> {
        let mut w = Self::zero(arity);
        for (idx, c) in terms {
            w.insert(idx, c)?;
        }
        Ok(w)
    }

    fn insert(&mut self, idx: Vec<usize>, c: DFiniteElement) -> Result<()> {
        if c.arity() != self.arity {
            return Err(Error::Incompatible);
        }
        if !idx.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Invalid("indices must be strictly increasing".into()));
        }
        if idx.iter().any(|&i| i == 0 || i >= self.arity) {
            return Err(Error::Invalid("index out of range".into()));
        }
        if let Some(d) = self.degree() {
            if d != idx.len() && !self.terms.is_empty() {
                return Err(Error::Invalid("mixed-degree form".into()));
            }
        }
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&idx) {
            None => {
                if let Some((_, other)) = self.terms.iter().next() {
                    if !same_system(other, &c) {
                        return Err(Error::Incompatible);
                    }
                }
                self.terms.insert(idx, c);
            }
            Some(old) => {
                if !same_system(&old, &c) {
                    return Err(Error::Incompatible);
                }
                let s = old.add(&c)?;
                if !s.is_zero() {
                    self.terms.insert(idx, s);
                }
            }
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next().map(|k| k.len())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &DFiniteElement)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &[usize]) -> Option<&DFiniteElement> {
        self.terms.get(idx)
    }

    pub fn coefficients(&self) -> Vec<DFiniteElement> {
        self.terms.values().cloned().collect()
    }

    pub fn system(&self) -> Option<&Rc<crate::dfinite::RectangularSystem>> {
        self.terms.values().next().map(|c| c.system())
    }

    pub fn add(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        let mut w = self.clone();
        for (idx, c) in &other.terms {
            w.insert(idx.clone(), c.clone())?;
        }
        Ok(w)
    }

    pub fn neg(&self) -> DifferentialForm {
        DifferentialForm {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        self.add(&other.neg())
    }

    pub fn scale(&self, f: &RationalFunction) -> DifferentialForm {
        if f.is_zero() {
            return Self::zero(self.arity);
        }
        DifferentialForm {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.mul_rat(f)))
                .collect(),
        }
    }

    pub fn scale_coeff(&self, c: &crate::poly::Coeff) -> DifferentialForm {
        self.scale(&RationalFunction::constant(self.arity, c.clone()))
    }

    /// Graded-antisymmetric product. At least one factor of every
    /// coefficient pair must be a known rational element (general
    /// D-finite products are out of scope).
    pub fn wedge(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        if self.arity != other.arity {
            return Err(Error::Incompatible);
        }
        let mut out = Self::zero(self.arity);
        for (i1, c1) in &self.terms {
            for (i2, c2) in &other.terms {
                let Some((idx, sign)) = merge_indices(i1, i2) else {
                    continue;
                };
                let prod = match (c1.to_rational(), c2.to_rational()) {
                    (Some(r1), Some(r2)) => {
                        crate::dfinite::df_from_rational(&r1.mul(&r2))
                    }
                    (_, Some(r2)) => c1.mul_rat(&r2),
                    (Some(r1), _) => c2.mul_rat(&r1),
                    _ => {
                        return Err(Error::Invalid(
                            "wedge of two non-rational coefficients is not supported".into(),
                        ));
                    }
                };
                let signed = if sign < 0 { prod.neg() } else { prod };
                out.insert(idx, signed)?;
            }
        }
        Ok(out)
    }

    /// omega /\ dx_l.
    pub fn wedge_dx(&self, l: usize) -> DifferentialForm {
        let mut out = Self::zero(self.arity);
        for (idx, c) in &self.terms {
            if idx.contains(&l) {
                continue;
            }
            // moving dx_l past the trailing indices greater than l
            let after = idx.iter().filter(|&&i| i > l).count();
            let mut idx2 = idx.clone();
            idx2.push(l);
            idx2.sort_unstable();
            let signed = if after % 2 == 1 { c.neg() } else { c.clone() };
            out.insert(idx2, signed).expect("valid by construction");
        }
        out
    }

    /// d_s = sum_{j<=s} dx_j /\ Dx_j(-); d_0 = 0, d_n is the full
    /// exterior differential.
    pub fn d_s(&self, s: usize) -> Result<DifferentialForm> {
        let mut out = Self::zero(self.arity);
        for (idx, c) in &self.terms {
            for j in 1..=s {
                if idx.contains(&j) {
                    continue;
                }
                let dc = c.diff(j)?;
                if dc.is_zero() {
                    continue;
                }
                // dx_j /\ dx_idx: j moves past the indices smaller than j
                let before = idx.iter().filter(|&&i| i < j).count();
                let mut idx2 = idx.clone();
                idx2.push(j);
                idx2.sort_unstable();
                let signed = if before % 2 == 1 { dc.neg() } else { dc };
                out.insert(idx2, signed)?;
            }
        }
        Ok(out)
    }

    /// Coefficientwise action of an operator on the form.
    pub fn apply_ore(&self, op: &OreOperator) -> Result<DifferentialForm> {
        let mut out = Self::zero(self.arity);
        for (idx, c) in &self.terms {
            out.insert(idx.clone(), c.apply_ore(op)?)?;
        }
        Ok(out)
    }

    pub fn apply_weyl(&self, op: &WeylOperator) -> Result<DifferentialForm> {
        let mut out = Self::zero(self.arity);
        for (idx, c) in &self.terms {
            out.insert(idx.clone(), c.apply_weyl(op)?)?;
        }
        Ok(out)
    }

    /// Coefficientwise Dx_l (not the exterior derivative).
    pub fn diff_coeffs(&self, l: usize) -> Result<DifferentialForm> {
        let mut out = Self::zero(self.arity);
        for (idx, c) in &self.terms {
            out.insert(idx.clone(), c.diff(l)?)?;
        }
        Ok(out)
    }

    /// omega = u /\ dx_l + v with u, v free of dx_l.
    pub fn split_top(&self, l: usize) -> (DifferentialForm, DifferentialForm) {
        let mut u = Self::zero(self.arity);
        let mut v = Self::zero(self.arity);
        for (idx, c) in &self.terms {
            match idx.iter().position(|&i| i == l) {
                None => v.insert(idx.clone(), c.clone()).expect("copy"),
                Some(_) => {
                    let rest: Vec<usize> =
                        idx.iter().copied().filter(|&i| i != l).collect();
                    // f dx_rest /\ dx_l picks up a sign from the indices
                    // of rest that exceed l
                    let after = rest.iter().filter(|&&i| i > l).count();
                    let signed = if after % 2 == 1 { c.neg() } else { c.clone() };
                    u.insert(rest, signed).expect("valid");
                }
            }
        }
        (u, v)
    }

    /// Drop every term whose index tuple contains l.
    pub fn prune_dx(&self, l: usize) -> DifferentialForm {
        DifferentialForm {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| !k.contains(&l))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

fn same_system(a: &DFiniteElement, b: &DFiniteElement) -> bool {
    Rc::ptr_eq(a.system(), b.system()) || **a.system() == **b.system()
}

/// Concatenate two strictly increasing tuples; None on a repeat, else
/// the sorted tuple and the sign of the merging permutation.
fn merge_indices(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut out: Vec<usize> = a.to_vec();
    let mut sign = 1;
    for &j in b {
        if out.contains(&j) {
            return None;
        }
        // insert j into the sorted prefix, counting transpositions
        let pos = out.iter().take_while(|&&i| i < j).count();
        let moved = out.len() - pos;
        if moved % 2 == 1 {
            sign = -sign;
        }
        out.insert(pos, j);
    }
    Some((out, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfinite::df_from_rational;
    use crate::poly::MultiPoly;

    fn rat(p: MultiPoly, q: MultiPoly) -> DFiniteElement {
        df_from_rational(&RationalFunction::new(p, q).unwrap())
    }

    fn one_form(arity: usize, coeffs: Vec<(usize, DFiniteElement)>) -> DifferentialForm {
        DifferentialForm::from_terms(arity, coeffs.into_iter().map(|(i, c)| (vec![i], c)))
            .unwrap()
    }

    #[test]
    fn wedge_basics() {
        let a = 3usize;
        let x1 = rat(MultiPoly::x(a, 1), MultiPoly::one(a));
        let x2 = rat(MultiPoly::x(a, 2), MultiPoly::one(a));
        let w1 = one_form(a, vec![(1, x1.clone())]);
        let w2 = one_form(a, vec![(2, x2.clone())]);
        // dx1 /\ dx1 = 0
        assert!(w1.wedge(&w1).unwrap().is_zero());
        // (x1 dx1) /\ (x2 dx2) = x1 x2 dx1dx2
        let p = w1.wedge(&w2).unwrap();
        let c = p.coeff(&[1, 2]).unwrap();
        assert_eq!(
            c.to_rational().unwrap(),
            RationalFunction::x(a, 1).mul(&RationalFunction::x(a, 2))
        );
        // dx2 /\ dx1 = -dx1 /\ dx2
        let q = w2.wedge(&w1).unwrap();
        assert_eq!(q, p.neg());
    }

    #[test]
    fn wedge_graded_commutativity() {
        let a = 4usize;
        let f = rat(MultiPoly::t(a), MultiPoly::x(a, 1).add(&MultiPoly::one(a)));
        let g = rat(MultiPoly::x(a, 2), MultiPoly::t(a).add(&MultiPoly::one(a)));
        // p = 1, q = 2
        let w1 = one_form(a, vec![(3, f)]);
        let w2 = DifferentialForm::from_terms(a, vec![(vec![1, 2], g)]).unwrap();
        let lhs = w1.wedge(&w2).unwrap();
        let rhs = w2.wedge(&w1).unwrap();
        // (-1)^{1*2} = +1
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn d_s_examples() {
        let a = 3usize;
        // d_0(anything) = 0
        let f = rat(MultiPoly::x(a, 2), MultiPoly::one(a));
        let w = one_form(a, vec![(2, f.clone())]);
        assert!(w.d_s(0).unwrap().is_zero());
        // d_1(x2 dx2) = 0
        assert!(w.d_s(1).unwrap().is_zero());
        // d_2(x2 dx1) = -dx1 /\ ... : Dx2(x2) dx2 /\ dx1 = -dx1dx2
        let w2 = one_form(a, vec![(1, f)]);
        let d = w2.d_s(2).unwrap();
        let c = d.coeff(&[1, 2]).unwrap();
        assert_eq!(
            c.to_rational().unwrap(),
            RationalFunction::one(a).neg()
        );
    }

    #[test]
    fn euler_closed_surrogate() {
        // W = (x1^2 + x2^2)/2 - t x1 x2 satisfies x1 Wx1 + x2 Wx2 = 2W,
        // so omega = (x1/W) dx2 - (x2/W) dx1 is d_2-closed
        let a = 3usize;
        let w = MultiPoly::x(a, 1)
            .pow(2)
            .add(&MultiPoly::x(a, 2).pow(2))
            .scale(&crate::poly::coeff_ratio(1, 2))
            .sub(&MultiPoly::t(a).mul(&MultiPoly::x(a, 1)).mul(&MultiPoly::x(a, 2)));
        // coefficients must share one system: build both from one 1/W
        let invw = df_from_rational(&RationalFunction::from_poly(w).inv().unwrap());
        let c2 = invw.mul_rat(&RationalFunction::x(a, 1));
        let c1 = invw.mul_rat(&RationalFunction::x(a, 2)).neg();
        let omega = one_form(a, vec![(1, c1), (2, c2)]);
        assert!(omega.d_s(2).unwrap().is_zero());
    }

    #[test]
    fn d_squared_zero_and_identities() {
        let a = 3usize;
        let invw = df_from_rational(
            &RationalFunction::new(
                MultiPoly::one(a),
                MultiPoly::t(a)
                    .mul(&MultiPoly::x(a, 1))
                    .add(&MultiPoly::x(a, 2))
                    .add(&MultiPoly::one(a)),
            )
            .unwrap(),
        );
        let f = DifferentialForm::scalar(invw.clone());
        for s in 0..=2 {
            let d = f.d_s(s).unwrap();
            assert!(d.d_s(s).unwrap().is_zero());
        }
        // d_s(u /\ dx_s) = d_{s-1}(u) /\ dx_s  at s = 2
        let u = one_form(a, vec![(1, invw.clone())]);
        let lhs = u.wedge_dx(2).d_s(2).unwrap();
        let rhs = u.d_s(1).unwrap().wedge_dx(2);
        assert_eq!(lhs, rhs);
        // d_s(u) = d_{s-1}(u) + dx_s /\ Dx_s(u)
        let lhs = u.d_s(2).unwrap();
        let dxs_part = u.diff_coeffs(2).unwrap().wedge_dx(2).neg(); // dx2 /\ eta = -eta /\ dx2 for 1-forms
        let rhs = u.d_s(1).unwrap().add(&dxs_part).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn operator_commutes_with_d_s() {
        // L free of x1..xn commutes with d_s
        let a = 3usize;
        let invw = df_from_rational(
            &RationalFunction::new(
                MultiPoly::one(a),
                MultiPoly::t(a)
                    .mul(&MultiPoly::x(a, 1))
                    .add(&MultiPoly::x(a, 2).mul(&MultiPoly::t(a)))
                    .add(&MultiPoly::one(a)),
            )
            .unwrap(),
        );
        let w = one_form(a, vec![(1, invw.clone()), (2, invw.neg())]);
        let l = OreOperator::new(
            a,
            0,
            vec![
                RationalFunction::t(a),
                RationalFunction::one(a),
                RationalFunction::t(a).pow(2),
            ],
        );
        let lhs = w.d_s(2).unwrap().apply_ore(&l).unwrap();
        let rhs = w.apply_ore(&l).unwrap().d_s(2).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn split_top_examples() {
        let a = 3usize;
        let f = rat(MultiPoly::t(a), MultiPoly::one(a));
        let g = rat(MultiPoly::x(a, 1), MultiPoly::one(a));
        // omega = f dx1, l = 1: u = f, v = 0
        let w = one_form(a, vec![(1, f.clone())]);
        let (u, v) = w.split_top(1);
        assert_eq!(u, DifferentialForm::scalar(f.clone()));
        assert!(v.is_zero());
        // omega = f dx1dx2, l = 2: u = f dx1
        let w = DifferentialForm::from_terms(a, vec![(vec![1, 2], f.clone())]).unwrap();
        let (u, v) = w.split_top(2);
        assert_eq!(u, one_form(a, vec![(1, f.clone())]));
        assert!(v.is_zero());
        // omega = f dx1 + g dx2, l = 2: u = g, v = f dx1
        // (coefficients must share a system; promote by direct sum)
        let fs = crate::dfinite::promote_common(&[f.clone(), g.clone()]).unwrap();
        let w = one_form(a, vec![(1, fs[0].clone()), (2, fs[1].clone())]);
        let (u, v) = w.split_top(2);
        assert_eq!(u, DifferentialForm::scalar(fs[1].clone()));
        assert_eq!(v, one_form(a, vec![(1, fs[0].clone())]));
        // roundtrip: u /\ dx_l + v = omega
        let back = u.wedge_dx(2).add(&v).unwrap();
        assert_eq!(back, w);
    }
}
