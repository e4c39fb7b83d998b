//! D-finite elements over K = Q(t, x1..xn), represented by rectangular
//! annihilator systems: one monic operator per derivation. Elements are
//! coordinate vectors over K in the finite derivative basis
//! {D^beta f : beta_delta < ord(A_delta)}.
//!
//! Reduction of an out-of-range derivative monomial rewrites the
//! overflowing slot through its relation and pushes the remaining
//! derivations in by Leibniz; every step strictly decreases the
//! overflowing exponent and never increases the others, so the
//! rewriting terminates and can be memoized per monomial.

use crate::error::{Error, Result};
use crate::linalg::solve_rf;
use crate::ore::{OreOperator, WeylOperator};
use crate::rational::RationalFunction;
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

enum Kind {
    Leaf {
        /// ops[delta]: monic annihilator in that derivation, when given.
        ops: Vec<Option<OreOperator>>,
        dims: Vec<usize>,
        basis: Vec<Vec<u32>>,
        index: HashMap<Vec<u32>, usize>,
        /// optional rational value of each basis element, when the
        /// system was built from an explicit rational function
        labels: Option<Vec<RationalFunction>>,
        memo: RefCell<HashMap<Vec<u32>, Vec<RationalFunction>>>,
    },
    Sum {
        left: Rc<RectangularSystem>,
        right: Rc<RectangularSystem>,
    },
}

pub struct RectangularSystem {
    arity: usize,
    kind: Kind,
}

impl PartialEq for RectangularSystem {
    fn eq(&self, other: &Self) -> bool {
        if self.arity != other.arity {
            return false;
        }
        match (&self.kind, &other.kind) {
            (
                Kind::Leaf { ops: a, labels: la, .. },
                Kind::Leaf { ops: b, labels: lb, .. },
            ) => a == b && la == lb,
            (
                Kind::Sum { left: a, right: b },
                Kind::Sum { left: c, right: d },
            ) => a == c && b == d,
            _ => false,
        }
    }
}

impl std::fmt::Debug for RectangularSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            Kind::Leaf { ops, .. } => {
                write!(f, "RectangularSystem[")?;
                for (d, op) in ops.iter().enumerate() {
                    if let Some(op) = op {
                        write!(f, " d{d}: {op};")?;
                    }
                }
                write!(f, " ]")
            }
            Kind::Sum { left, right } => write!(f, "({left:?} (+) {right:?})"),
        }
    }
}

fn binom_u(n: u32, k: u32) -> crate::poly::Coeff {
    use num_traits::One;
    let mut r = crate::poly::Coeff::one();
    for i in 0..k {
        r *= crate::poly::coeff_int((n - i) as i64);
        r /= crate::poly::coeff_int((i + 1) as i64);
    }
    r
}

impl RectangularSystem {
    /// Build a system from one monic operator per derivation (operators
    /// are normalized monic here; missing entries mean that derivation
    /// is never applied to elements of this system). Integrability of
    /// the provided derivations is verified on every basis element.
    pub fn leaf(
        arity: usize,
        ops_in: Vec<Option<OreOperator>>,
        labels: Option<Vec<RationalFunction>>,
    ) -> Result<Rc<Self>> {
        assert_eq!(ops_in.len(), arity);
        let mut ops = Vec::with_capacity(arity);
        let mut dims = Vec::with_capacity(arity);
        for (d, op) in ops_in.into_iter().enumerate() {
            match op {
                None => {
                    ops.push(None);
                    dims.push(1);
                }
                Some(op) => {
                    let ord = op.order().ok_or(Error::ZeroInput)?;
                    if ord == 0 {
                        return Err(Error::Invalid(
                            "annihilator of order 0 only annihilates 0".into(),
                        ));
                    }
                    ops.push(Some(op.monic().with_der(d)));
                    dims.push(ord);
                }
            }
        }
        let mut basis = vec![vec![0u32; arity]];
        for (d, &dim) in dims.iter().enumerate() {
            let mut next = Vec::new();
            for b in &basis {
                for e in 0..dim as u32 {
                    let mut b2 = b.clone();
                    b2[d] = e;
                    next.push(b2);
                }
            }
            basis = next;
        }
        basis.sort();
        let index: HashMap<Vec<u32>, usize> = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, b)| (b, i))
            .collect();
        if let Some(l) = &labels {
            assert_eq!(l.len(), basis.len());
        }
        let sys = Rc::new(RectangularSystem {
            arity,
            kind: Kind::Leaf {
                ops,
                dims,
                basis,
                index,
                labels,
                memo: RefCell::new(HashMap::new()),
            },
        });
        sys.check_confluence()?;
        Ok(sys)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Leaf { basis, .. } => basis.len(),
            Kind::Sum { left, right } => left.dim() + right.dim(),
        }
    }

    pub fn direct_sum(left: Rc<Self>, right: Rc<Self>) -> Result<Rc<Self>> {
        if left.arity != right.arity {
            return Err(Error::Incompatible);
        }
        Ok(Rc::new(RectangularSystem {
            arity: left.arity,
            kind: Kind::Sum { left, right },
        }))
    }

    /// Rational values of the basis elements, when known.
    pub fn labels(&self) -> Option<Vec<RationalFunction>> {
        match &self.kind {
            Kind::Leaf { labels, .. } => labels.clone(),
            Kind::Sum { left, right } => {
                let mut l = left.labels()?;
                l.extend(right.labels()?);
                Some(l)
            }
        }
    }

    /// Coordinates of D^mu f in the derivative basis.
    fn reduce(&self, mu: &[u32]) -> Result<Vec<RationalFunction>> {
        let Kind::Leaf {
            ops,
            dims,
            basis,
            index,
            memo,
            ..
        } = &self.kind
        else {
            unreachable!("reduce is only called on leaves");
        };
        if let Some(&i) = index.get(mu) {
            let mut v = vec![RationalFunction::zero(self.arity); basis.len()];
            v[i] = RationalFunction::one(self.arity);
            return Ok(v);
        }
        if let Some(v) = memo.borrow().get(mu) {
            return Ok(v.clone());
        }
        let d = (0..self.arity)
            .find(|&d| mu[d] as usize >= dims[d])
            .expect("not a basis monomial");
        let Some(op) = &ops[d] else {
            return Err(Error::Invalid(format!(
                "derivation {d} has no annihilator in this system"
            )));
        };
        let ord = dims[d];
        // relation: D_d^ord f = sum_{i<ord} c_i D_d^i f
        let rel: Vec<RationalFunction> = (0..ord).map(|i| op.coeff(i).neg()).collect();
        // remaining derivations to push in
        let mut rho = mu.to_vec();
        rho[d] = mu[d] - ord as u32;
        // Leibniz over all kappa <= rho
        let mut out = vec![RationalFunction::zero(self.arity); basis.len()];
        let mut kappas = vec![vec![0u32; self.arity]];
        for s in 0..self.arity {
            let mut next = Vec::new();
            for k in &kappas {
                for e in 0..=rho[s] {
                    let mut k2 = k.clone();
                    k2[s] = e;
                    next.push(k2);
                }
            }
            kappas = next;
        }
        for (i, ci) in rel.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for kappa in &kappas {
                // multinomial coefficient prod binom(rho_s, kappa_s)
                let mut coeff = crate::poly::coeff_int(1);
                for s in 0..self.arity {
                    coeff *= binom_u(rho[s], kappa[s]);
                }
                // D^kappa(c_i)
                let mut dc = ci.clone();
                for (s, &e) in kappa.iter().enumerate() {
                    for _ in 0..e {
                        dc = dc.derivative(s);
                    }
                }
                if dc.is_zero() {
                    continue;
                }
                let mut nu: Vec<u32> = rho
                    .iter()
                    .zip(kappa)
                    .map(|(r, k)| r - k)
                    .collect();
                nu[d] += i as u32;
                let sub = self.reduce(&nu)?;
                let f = dc.scale(&coeff);
                for (o, s) in out.iter_mut().zip(&sub) {
                    *o = o.add(&f.mul(s));
                }
            }
        }
        memo.borrow_mut().insert(mu.to_vec(), out.clone());
        Ok(out)
    }

    /// Derivation d applied to an element with the given coordinates.
    pub fn apply_der(&self, coords: &[RationalFunction], d: usize) -> Result<Vec<RationalFunction>> {
        match &self.kind {
            Kind::Leaf { basis, .. } => {
                let mut out = vec![RationalFunction::zero(self.arity); basis.len()];
                for (i, v) in coords.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    // product rule: D(v * b) = D(v) b + v D(b)
                    out[i] = out[i].add(&v.derivative(d));
                    let mut b2 = basis[i].clone();
                    b2[d] += 1;
                    let red = self.reduce(&b2)?;
                    for (o, r) in out.iter_mut().zip(&red) {
                        *o = o.add(&v.mul(r));
                    }
                }
                Ok(out)
            }
            Kind::Sum { left, right } => {
                let nl = left.dim();
                let mut out = left.apply_der(&coords[..nl], d)?;
                out.extend(right.apply_der(&coords[nl..], d)?);
                Ok(out)
            }
        }
    }

    fn check_confluence(&self) -> Result<()> {
        let Kind::Leaf { ops, basis, .. } = &self.kind else {
            return Ok(());
        };
        let present: Vec<usize> = (0..self.arity).filter(|&d| ops[d].is_some()).collect();
        for (i, b) in basis.iter().enumerate() {
            let mut unit = vec![RationalFunction::zero(self.arity); basis.len()];
            unit[i] = RationalFunction::one(self.arity);
            for (ai, &d1) in present.iter().enumerate() {
                for &d2 in &present[ai + 1..] {
                    let ab = self.apply_der(&self.apply_der(&unit, d1)?, d2)?;
                    let ba = self.apply_der(&self.apply_der(&unit, d2)?, d1)?;
                    if ab != ba {
                        return Err(Error::NotIntegrable(format!(
                            "D{d1} D{d2} vs D{d2} D{d1} on basis monomial {b:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// An element of the module defined by a rectangular system.
#[derive(Clone, Debug)]
pub struct DFiniteElement {
    system: Rc<RectangularSystem>,
    coords: Vec<RationalFunction>,
}

impl PartialEq for DFiniteElement {
    fn eq(&self, other: &Self) -> bool {
        (Rc::ptr_eq(&self.system, &other.system) || self.system == other.system)
            && self.coords == other.coords
    }
}

impl DFiniteElement {
    pub fn new(system: Rc<RectangularSystem>, coords: Vec<RationalFunction>) -> Self {
        assert_eq!(coords.len(), system.dim());
        DFiniteElement { system, coords }
    }

    /// The cyclic generator of the system's module (coordinate 1 on the
    /// empty derivative monomial, which sorts first).
    pub fn generator(system: Rc<RectangularSystem>) -> Self {
        let mut coords = vec![RationalFunction::zero(system.arity()); system.dim()];
        coords[0] = RationalFunction::one(system.arity());
        DFiniteElement { system, coords }
    }

    pub fn system(&self) -> &Rc<RectangularSystem> {
        &self.system
    }

    pub fn coords(&self) -> &[RationalFunction] {
        &self.coords
    }

    pub fn arity(&self) -> usize {
        self.system.arity()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn zero_like(&self) -> Self {
        DFiniteElement {
            system: Rc::clone(&self.system),
            coords: vec![RationalFunction::zero(self.arity()); self.coords.len()],
        }
    }

    pub fn neg(&self) -> Self {
        DFiniteElement {
            system: Rc::clone(&self.system),
            coords: self.coords.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul_rat(&self, f: &RationalFunction) -> Self {
        DFiniteElement {
            system: Rc::clone(&self.system),
            coords: self.coords.iter().map(|c| c.mul(f)).collect(),
        }
    }

    /// Sum; over distinct systems this builds the direct sum (orders
    /// add, no decoupling attempted).
    pub fn add(&self, other: &DFiniteElement) -> Result<DFiniteElement> {
        if self.arity() != other.arity() {
            return Err(Error::Incompatible);
        }
        if Rc::ptr_eq(&self.system, &other.system) || self.system == other.system {
            return Ok(DFiniteElement {
                system: Rc::clone(&self.system),
                coords: self
                    .coords
                    .iter()
                    .zip(&other.coords)
                    .map(|(a, b)| a.add(b))
                    .collect(),
            });
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let sum = RectangularSystem::direct_sum(
            Rc::clone(&self.system),
            Rc::clone(&other.system),
        )?;
        let mut coords = self.coords.clone();
        coords.extend(other.coords.iter().cloned());
        Ok(DFiniteElement { system: sum, coords })
    }

    pub fn sub(&self, other: &DFiniteElement) -> Result<DFiniteElement> {
        self.add(&other.neg())
    }

    pub fn diff(&self, d: usize) -> Result<DFiniteElement> {
        Ok(DFiniteElement {
            system: Rc::clone(&self.system),
            coords: self.system.apply_der(&self.coords, d)?,
        })
    }

    /// Rational value when the system carries labels.
    pub fn to_rational(&self) -> Option<RationalFunction> {
        let labels = self.system.labels()?;
        let mut acc = RationalFunction::zero(self.arity());
        for (c, l) in self.coords.iter().zip(&labels) {
            acc = acc.add(&c.mul(l));
        }
        Some(acc)
    }

    pub fn apply_ore(&self, op: &OreOperator) -> Result<DFiniteElement> {
        let mut acc = self.zero_like();
        let mut df = self.clone();
        for (i, c) in op.coeffs().iter().enumerate() {
            if i > 0 {
                df = df.diff(op.der())?;
            }
            if !c.is_zero() {
                acc = acc.add(&df.mul_rat(c))?;
            }
        }
        Ok(acc)
    }

    pub fn apply_weyl(&self, w: &WeylOperator) -> Result<DFiniteElement> {
        let mut acc = self.zero_like();
        for (m, c) in w.terms() {
            let mut g = self.clone();
            for (s, &e) in m.ders.0.iter().enumerate() {
                for _ in 0..e {
                    g = g.diff(s)?;
                }
            }
            let mut mono = crate::poly::MultiPoly::constant(self.arity(), c.clone());
            for (s, &e) in m.vars.0.iter().enumerate() {
                mono = mono.mul(&crate::poly::MultiPoly::var(self.arity(), s).pow(e));
            }
            acc = acc.add(&g.mul_rat(&RationalFunction::from_poly(mono)))?;
        }
        Ok(acc)
    }

    /// Monic operator in Dt of minimal order annihilating this element
    /// relative to the module: first K-linear dependence among
    /// f, Dt f, Dt^2 f, ...
    pub fn min_annihilator_t(&self) -> Result<OreOperator> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let arity = self.arity();
        let mut rows = vec![self.coords.clone()];
        for _ in 0..self.system.dim() {
            let next = self.system.apply_der(rows.last().unwrap(), 0)?;
            // solve: next = sum a_i rows[i] (columns are the rows)
            let m: Vec<Vec<RationalFunction>> = (0..next.len())
                .map(|j| rows.iter().map(|r| r[j].clone()).collect())
                .collect();
            if let Some(a) = solve_rf(&m, &next, arity) {
                let mut coeffs: Vec<RationalFunction> =
                    a.into_iter().map(|c| c.neg()).collect();
                coeffs.push(RationalFunction::one(arity));
                return Ok(OreOperator::new(arity, 0, coeffs));
            }
            rows.push(next);
        }
        unreachable!("dependence must appear within dim+1 iterates");
    }
}

/// Move a family of elements onto one shared system: the direct sum of
/// their distinct systems, in order of first appearance. Elements
/// already sharing a system are left untouched when only one system
/// occurs.
pub fn promote_common(elems: &[DFiniteElement]) -> Result<Vec<DFiniteElement>> {
    if elems.is_empty() {
        return Ok(Vec::new());
    }
    let mut systems: Vec<Rc<RectangularSystem>> = Vec::new();
    let mut which = Vec::with_capacity(elems.len());
    for e in elems {
        let pos = systems
            .iter()
            .position(|s| Rc::ptr_eq(s, e.system()) || **s == **e.system());
        match pos {
            Some(i) => which.push(i),
            None => {
                systems.push(Rc::clone(e.system()));
                which.push(systems.len() - 1);
            }
        }
    }
    if systems.len() == 1 {
        return Ok(elems.to_vec());
    }
    let mut combined = Rc::clone(&systems[0]);
    for s in &systems[1..] {
        combined = RectangularSystem::direct_sum(combined, Rc::clone(s))?;
    }
    let offsets: Vec<usize> = systems
        .iter()
        .scan(0usize, |acc, s| {
            let o = *acc;
            *acc += s.dim();
            Some(o)
        })
        .collect();
    let arity = combined.arity();
    let total = combined.dim();
    Ok(elems
        .iter()
        .zip(&which)
        .map(|(e, &i)| {
            let mut coords = vec![RationalFunction::zero(arity); total];
            coords[offsets[i]..offsets[i] + e.coords().len()]
                .clone_from_slice(e.coords());
            DFiniteElement::new(Rc::clone(&combined), coords)
        })
        .collect())
}

/// A rational function as a D-finite element: for f != 0 the system is
/// A_delta = delta - delta(f)/f with basis {f}; zero gets the system of
/// constants with coordinate 0.
pub fn df_from_rational(f: &RationalFunction) -> DFiniteElement {
    let arity = f.arity();
    if f.is_zero() {
        let ops = (0..arity)
            .map(|d| Some(OreOperator::der_op(arity, d)))
            .collect();
        let sys = RectangularSystem::leaf(
            arity,
            ops,
            Some(vec![RationalFunction::one(arity)]),
        )
        .expect("constant system is integrable");
        let mut e = DFiniteElement::generator(sys);
        e.coords[0] = RationalFunction::zero(arity);
        return e;
    }
    let ops = (0..arity)
        .map(|d| {
            let logd = f.derivative(d).div(f).expect("f nonzero");
            Some(OreOperator::new(
                arity,
                d,
                vec![logd.neg(), RationalFunction::one(arity)],
            ))
        })
        .collect();
    let sys = RectangularSystem::leaf(arity, ops, Some(vec![f.clone()]))
        .expect("log-derivative system is integrable");
    DFiniteElement::generator(sys)
}
