//! Operator arithmetic.
//!
//! Two layers: the full algebra k<t, x, Dt, Dx> with polynomial
//! "coefficients" kept as part of the normal-ordered monomials
//! (variables on the left, derivations on the right), and the
//! univariate ring K<D> over the rational-function field with its
//! right-Euclidean structure (division, gcrd, lclm, transformation).

use crate::error::{Error, Result};
use crate::poly::{coeff_int, Coeff, Monomial, MultiPoly};
use crate::rational::{rf_is_semisplit, RationalFunction};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A generator of the algebra: a variable or a derivation, indexed the
/// same way as polynomial slots (0 = t, i >= 1 = x_i).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Gen {
    Var(usize),
    Der(usize),
}

/// Normal-ordered word: all variables first, then all derivations.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct WeylMonomial {
    pub vars: Monomial,
    pub ders: Monomial,
}

impl WeylMonomial {
    pub fn unit(arity: usize) -> Self {
        WeylMonomial {
            vars: Monomial::unit(arity),
            ders: Monomial::unit(arity),
        }
    }
}

/// Element of the Weyl algebra with rational-constant coefficients,
/// stored in normal order. Zero terms are never kept.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeylOperator {
    arity: usize,
    terms: BTreeMap<WeylMonomial, Coeff>,
}

fn binom(n: u32, k: u32) -> Coeff {
    let mut r = Coeff::one();
    for i in 0..k {
        r *= coeff_int((n - i) as i64);
        r /= coeff_int((i + 1) as i64);
    }
    r
}

fn factorial(k: u32) -> Coeff {
    let mut r = Coeff::one();
    for i in 2..=k {
        r *= coeff_int(i as i64);
    }
    r
}

impl WeylOperator {
    pub fn zero(arity: usize) -> Self {
        WeylOperator {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::term(arity, WeylMonomial::unit(arity), Coeff::one())
    }

    pub fn gen(arity: usize, g: Gen) -> Self {
        let mut m = WeylMonomial::unit(arity);
        match g {
            Gen::Var(v) => m.vars.0[v] = 1,
            Gen::Der(v) => m.ders.0[v] = 1,
        }
        Self::term(arity, m, Coeff::one())
    }

    pub fn term(arity: usize, m: WeylMonomial, c: Coeff) -> Self {
        let mut w = Self::zero(arity);
        w.add_term(m, c);
        w
    }

    pub fn from_poly(p: &MultiPoly) -> Self {
        let mut w = Self::zero(p.arity());
        for (m, c) in p.terms() {
            w.add_term(
                WeylMonomial {
                    vars: m.clone(),
                    ders: Monomial::unit(p.arity()),
                },
                c.clone(),
            );
        }
        w
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WeylMonomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: WeylMonomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Coeff::zero);
        *e += c;
        if e.is_zero() {
            // remove the cancelled key
            let dead: Vec<WeylMonomial> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &WeylOperator) -> WeylOperator {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> WeylOperator {
        WeylOperator {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &WeylOperator) -> WeylOperator {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Coeff) -> WeylOperator {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        WeylOperator {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.clone() * c.clone()))
                .collect(),
        }
    }

    /// Product in normal order. Per variable slot the reordering law is
    /// D^m x^v = sum_k C(m,k) C(v,k) k! x^(v-k) D^(m-k); distinct slots
    /// commute.
    pub fn mul(&self, other: &WeylOperator) -> WeylOperator {
        assert_eq!(self.arity, other.arity);
        let mut out = Self::zero(self.arity);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                // reorder a.ders past b.vars, slot by slot
                let mut parts: Vec<Vec<(u32, u32, Coeff)>> = Vec::with_capacity(self.arity);
                for s in 0..self.arity {
                    let m = a.ders.0[s];
                    let v = b.vars.0[s];
                    let kmax = m.min(v);
                    let mut slot = Vec::with_capacity(kmax as usize + 1);
                    for k in 0..=kmax {
                        let c = binom(m, k) * binom(v, k) * factorial(k);
                        slot.push((v - k, m - k, c));
                    }
                    parts.push(slot);
                }
                // cartesian product over slots
                let mut stack: Vec<(usize, WeylMonomial, Coeff)> = vec![(
                    0,
                    WeylMonomial::unit(self.arity),
                    ca.clone() * cb.clone(),
                )];
                while let Some((s, m, c)) = stack.pop() {
                    if s == self.arity {
                        let mono = WeylMonomial {
                            vars: a.vars.mul(&m.vars),
                            ders: m.ders.mul(&b.ders),
                        };
                        out.add_term(mono, c);
                        continue;
                    }
                    for (xv, dv, cc) in &parts[s] {
                        let mut m2 = m.clone();
                        m2.vars.0[s] = *xv;
                        m2.ders.0[s] = *dv;
                        stack.push((s + 1, m2, c.clone() * cc.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> WeylOperator {
        let mut r = Self::one(self.arity);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Support scan: every term uses only generators from S. In normal
    /// order this is exactly membership in the subalgebra k<S>.
    pub fn lies_in(&self, gens: &BTreeSet<Gen>) -> bool {
        self.terms.keys().all(|m| {
            (0..self.arity).all(|s| {
                (m.vars.0[s] == 0 || gens.contains(&Gen::Var(s)))
                    && (m.ders.0[s] == 0 || gens.contains(&Gen::Der(s)))
            })
        })
    }

    pub fn depends_on(&self, g: Gen) -> bool {
        self.terms.keys().any(|m| match g {
            Gen::Var(s) => m.vars.0[s] > 0,
            Gen::Der(s) => m.ders.0[s] > 0,
        })
    }

    /// P = sum_k M_k D_s^k with every M_k free of D_s (direct grouping,
    /// derivations already sit on the right).
    pub fn coeffs_in_der(&self, s: usize) -> Vec<WeylOperator> {
        let top = self
            .terms
            .keys()
            .map(|m| m.ders.0[s])
            .max()
            .unwrap_or(0) as usize;
        let mut out = vec![Self::zero(self.arity); top + 1];
        for (m, c) in &self.terms {
            let k = m.ders.0[s] as usize;
            let mut m2 = m.clone();
            m2.ders.0[s] = 0;
            out[k].add_term(m2, c.clone());
        }
        out
    }

    /// P = sum_k x_s^k M_k with every M_k free of x_s.
    pub fn coeffs_in_var(&self, s: usize) -> Vec<WeylOperator> {
        let top = self
            .terms
            .keys()
            .map(|m| m.vars.0[s])
            .max()
            .unwrap_or(0) as usize;
        let mut out = vec![Self::zero(self.arity); top + 1];
        for (m, c) in &self.terms {
            let k = m.vars.0[s] as usize;
            let mut m2 = m.clone();
            m2.vars.0[s] = 0;
            out[k].add_term(m2, c.clone());
        }
        out
    }

    /// P = sum_k D_s^k N_k with every N_k free of D_s. Uses the slot-s
    /// anti-normal rewrite x^a D^e = sum_k (-1)^k k! C(a,k) C(e,k)
    /// D^(e-k) x^(a-k).
    pub fn coeffs_der_left(&self, s: usize) -> Vec<WeylOperator> {
        let top = self
            .terms
            .keys()
            .map(|m| m.ders.0[s])
            .max()
            .unwrap_or(0) as usize;
        let mut out = vec![Self::zero(self.arity); top + 1];
        for (m, c) in &self.terms {
            let a = m.vars.0[s];
            let e = m.ders.0[s];
            for k in 0..=a.min(e) {
                let mut cc = binom(a, k) * binom(e, k) * factorial(k) * c.clone();
                if k % 2 == 1 {
                    cc = -cc;
                }
                let mut m2 = m.clone();
                m2.vars.0[s] = a - k;
                m2.ders.0[s] = 0;
                out[(e - k) as usize].add_term(m2, cc);
            }
        }
        while out.last().is_some_and(|w| w.is_zero()) && out.len() > 1 {
            out.pop();
        }
        out
    }

    /// P = sum_k M_k x_s^k with every M_k free of x_s: same anti-normal
    /// rewrite, grouped by the surviving x_s power.
    pub fn coeffs_var_right(&self, s: usize) -> Vec<WeylOperator> {
        let top = self
            .terms
            .keys()
            .map(|m| m.vars.0[s])
            .max()
            .unwrap_or(0) as usize;
        let mut out = vec![Self::zero(self.arity); top + 1];
        for (m, c) in &self.terms {
            let a = m.vars.0[s];
            let e = m.ders.0[s];
            for k in 0..=a.min(e) {
                let mut cc = binom(a, k) * binom(e, k) * factorial(k) * c.clone();
                if k % 2 == 1 {
                    cc = -cc;
                }
                let mut m2 = m.clone();
                m2.vars.0[s] = 0;
                m2.ders.0[s] = e - k;
                out[(a - k) as usize].add_term(m2, cc);
            }
        }
        while out.last().is_some_and(|w| w.is_zero()) && out.len() > 1 {
            out.pop();
        }
        out
    }

    /// Conversion to the univariate ring over K; requires the operator
    /// to be free of every Dx.
    pub fn to_ore(&self) -> Result<OreOperator> {
        if (1..self.arity).any(|s| self.depends_on(Gen::Der(s))) {
            return Err(Error::Invalid(
                "operator involves Dx, not an element of K<Dt>".into(),
            ));
        }
        let top = self
            .terms
            .keys()
            .map(|m| m.ders.0[0])
            .max()
            .unwrap_or(0) as usize;
        let mut coeffs = vec![MultiPoly::zero(self.arity); top + 1];
        for (m, c) in &self.terms {
            coeffs[m.ders.0[0] as usize].add_term(m.vars.clone(), c.clone());
        }
        Ok(OreOperator::new(
            self.arity,
            0,
            coeffs
                .into_iter()
                .map(RationalFunction::from_poly)
                .collect(),
        ))
    }
}

impl fmt::Display for WeylOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            for s in (1..self.arity).chain(std::iter::once(0)) {
                let e = m.vars.0[s];
                if e > 0 {
                    let name = if s == 0 { "t".into() } else { format!("x{s}") };
                    factors.push(if e == 1 { name } else { format!("{name}^{e}") });
                }
            }
            for s in (1..self.arity).chain(std::iter::once(0)) {
                let e = m.ders.0[s];
                if e > 0 {
                    let name = if s == 0 { "Dt".into() } else { format!("Dx{s}") };
                    factors.push(if e == 1 { name } else { format!("{name}^{e}") });
                }
            }
            let mag = if c.abs() == Coeff::one() && !factors.is_empty() {
                factors.join("*")
            } else if factors.is_empty() {
                format!("{}", c.abs())
            } else {
                format!("{}*{}", c.abs(), factors.join("*"))
            };
            if first {
                if c < &Coeff::zero() {
                    write!(f, "-{mag}")?;
                } else {
                    write!(f, "{mag}")?;
                }
                first = false;
            } else if c < &Coeff::zero() {
                write!(f, " - {mag}")?;
            } else {
                write!(f, " + {mag}")?;
            }
        }
        Ok(())
    }
}

/// Element of K<D> for a single derivation D (by default Dt):
/// coeffs[i] multiplies D^i from the left, coefficients in K.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OreOperator {
    arity: usize,
    der: usize,
    coeffs: Vec<RationalFunction>,
}

impl OreOperator {
    pub fn new(arity: usize, der: usize, mut coeffs: Vec<RationalFunction>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        OreOperator { arity, der, coeffs }
    }

    pub fn zero(arity: usize) -> Self {
        Self::new(arity, 0, Vec::new())
    }

    pub fn one(arity: usize) -> Self {
        Self::new(arity, 0, vec![RationalFunction::one(arity)])
    }

    /// The bare derivation D as an operator.
    pub fn dt(arity: usize) -> Self {
        Self::der_op(arity, 0)
    }

    pub fn der_op(arity: usize, der: usize) -> Self {
        OreOperator {
            arity,
            der,
            coeffs: vec![RationalFunction::zero(arity), RationalFunction::one(arity)],
        }
    }

    pub fn from_rational(f: RationalFunction) -> Self {
        Self::new(f.arity(), 0, vec![f])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn der(&self) -> usize {
        self.der
    }

    pub fn with_der(mut self, der: usize) -> Self {
        self.der = der;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> RationalFunction {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| RationalFunction::zero(self.arity))
    }

    pub fn coeffs(&self) -> &[RationalFunction] {
        &self.coeffs
    }

    pub fn lc(&self) -> Option<&RationalFunction> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_some_and(|c| c.is_one())
    }

    pub fn monic(&self) -> OreOperator {
        match self.lc() {
            None => self.clone(),
            Some(l) => self.scale(&l.inv().expect("lc nonzero")),
        }
    }

    pub fn add(&self, other: &OreOperator) -> OreOperator {
        debug_assert!(self.compatible(other));
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            self.arity,
            self.der.max(other.der),
            (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect(),
        )
    }

    pub fn neg(&self) -> OreOperator {
        OreOperator {
            arity: self.arity,
            der: self.der,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &OreOperator) -> OreOperator {
        self.add(&other.neg())
    }

    pub fn scale(&self, f: &RationalFunction) -> OreOperator {
        if f.is_zero() {
            return OreOperator {
                arity: self.arity,
                der: self.der,
                coeffs: Vec::new(),
            };
        }
        OreOperator {
            arity: self.arity,
            der: self.der,
            coeffs: self.coeffs.iter().map(|c| c.mul(f)).collect(),
        }
    }

    fn compatible(&self, other: &OreOperator) -> bool {
        self.arity == other.arity
            && (self.der == other.der || self.is_constant() || other.is_constant())
    }

    fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Apply to an element of K: sum c_i * D^i(f).
    pub fn apply_rational(&self, f: &RationalFunction) -> RationalFunction {
        let mut acc = RationalFunction::zero(self.arity);
        let mut df = f.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                df = df.derivative(self.der);
            }
            acc = acc.add(&c.mul(&df));
        }
        acc
    }

    /// Exact product using D*f = f*D + D(f).
    pub fn mul(&self, other: &OreOperator) -> OreOperator {
        debug_assert!(self.compatible(other));
        let der = if self.is_constant() { other.der } else { self.der };
        let mut out = OreOperator::new(self.arity, der, Vec::new()).with_der(der);
        // rows[i] = D^i * other, built incrementally
        let mut row = other.clone().with_der(der);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                // D * row = (coefficients differentiated) + (shifted)
                let mut coeffs =
                    vec![RationalFunction::zero(self.arity); row.coeffs.len() + 1];
                for (j, rc) in row.coeffs.iter().enumerate() {
                    coeffs[j] = coeffs[j].add(&rc.derivative(der));
                    coeffs[j + 1] = coeffs[j + 1].add(rc);
                }
                row = OreOperator::new(self.arity, der, coeffs);
            }
            if !c.is_zero() {
                out = out.add(&row.scale(c));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> OreOperator {
        let mut r = OreOperator::one(self.arity).with_der(self.der);
        for _ in 0..e {
            r = self.mul(&r);
        }
        r
    }

    /// Right division: A = Q*B + R with ord R < ord B; Q, R unique.
    pub fn rdiv(&self, b: &OreOperator) -> Result<(OreOperator, OreOperator)> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        debug_assert!(self.compatible(b));
        let der = if b.is_constant() { self.der } else { b.der };
        let ob = b.coeffs.len() - 1;
        let binv = b.lc().unwrap().inv().expect("lc nonzero");
        let mut r = self.clone().with_der(der);
        let mut q = OreOperator::new(self.arity, der, Vec::new());
        while let Some(or) = r.order() {
            if or < ob || r.is_zero() {
                break;
            }
            let c = r.lc().unwrap().mul(&binv);
            let mut mono = vec![RationalFunction::zero(self.arity); or - ob + 1];
            mono[or - ob] = c;
            let qk = OreOperator::new(self.arity, der, mono);
            r = r.sub(&qk.mul(b));
            debug_assert!(r.order().map_or(true, |o| o < or));
            q = q.add(&qk);
        }
        Ok((q, r))
    }

    /// Greatest common right factor, monic, by the right Euclidean
    /// algorithm.
    pub fn gcrd(&self, other: &OreOperator) -> Result<OreOperator> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::ZeroInput);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.rdiv(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// Least common left multiple, monic, via the extended Euclidean
    /// cofactor row at the zero remainder.
    pub fn lclm(&self, other: &OreOperator) -> Result<OreOperator> {
        if self.is_zero() || other.is_zero() {
            return Err(Error::ZeroInput);
        }
        let arity = self.arity;
        let der = self.der.max(other.der);
        let mut r0 = self.clone().with_der(der);
        let mut r1 = other.clone().with_der(der);
        let mut u0 = OreOperator::one(arity).with_der(der);
        let mut u1 = OreOperator::new(arity, der, Vec::new());
        while !r1.is_zero() {
            let (q, r) = r0.rdiv(&r1)?;
            let u = u0.sub(&q.mul(&u1));
            r0 = std::mem::replace(&mut r1, r);
            u0 = std::mem::replace(&mut u1, u);
        }
        // r1 = 0 and u1*self = -v1*other is the lclm
        let l = u1.mul(&self.clone().with_der(der));
        Ok(l.monic())
    }

    /// Exact left quotient: C with C*B = self; errors when not exact.
    pub fn ldiv_exact(&self, b: &OreOperator) -> Result<OreOperator> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let der = if b.is_constant() { self.der } else { b.der };
        let ob = b.coeffs.len() - 1;
        let binv = b.lc().unwrap().inv().expect("lc nonzero");
        let mut r = self.clone().with_der(der);
        let mut cq = OreOperator::new(self.arity, der, Vec::new());
        while let Some(or) = r.order() {
            if r.is_zero() {
                break;
            }
            if or < ob {
                return Err(Error::InexactDivision);
            }
            // top coefficient of (c D^(or-ob)) * B is c * lc(B)
            let c = r.lc().unwrap().mul(&binv);
            let mut mono = vec![RationalFunction::zero(self.arity); or - ob + 1];
            mono[or - ob] = c;
            let qk = OreOperator::new(self.arity, der, mono);
            r = r.sub(&qk.mul(b));
            if r.order().is_some_and(|o| o >= or) {
                return Err(Error::InexactDivision);
            }
            cq = cq.add(&qk);
        }
        if r.is_zero() {
            Ok(cq)
        } else {
            Err(Error::InexactDivision)
        }
    }

    /// Transformation of P by Q: the monic P~ with P~ Q = lambda *
    /// lclm(P, Q). Whenever P(f) = 0, the transformed operator kills
    /// Q(f).
    pub fn transform(&self, q: &OreOperator) -> Result<OreOperator> {
        if self.is_zero() || q.is_zero() {
            return Err(Error::ZeroInput);
        }
        if q.order() == Some(0) {
            // multiplication operator: P~ = monic(P c^{-1}) satisfies
            // P~ c = lambda P with lambda of order 0
            let cinv = OreOperator::from_rational(q.coeff(0).inv()?).with_der(self.der);
            return Ok(self.mul(&cinv).monic());
        }
        let l = self.lclm(q)?;
        Ok(l.ldiv_exact(q)?.monic())
    }

    /// Coefficient-wise specialization of x-variables.
    pub fn specialize(&self, point: &BTreeMap<usize, Coeff>) -> Result<OreOperator> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.specialize(point))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(self.arity, self.der, coeffs))
    }

    /// Monic with every coefficient semisplit.
    pub fn is_semisplit(&self) -> bool {
        self.is_monic() && self.coeffs.iter().all(rf_is_semisplit)
    }

    /// Apply D |-> the whole operator to each coefficient's derivative:
    /// used nowhere directly, kept for the adjoint-free tests.
    pub fn extend_arity(&self, arity: usize) -> OreOperator {
        OreOperator {
            arity,
            der: self.der,
            coeffs: self.coeffs.iter().map(|c| c.extend_arity(arity)).collect(),
        }
    }
}

impl fmt::Display for OreOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let dname = if self.der == 0 {
            "Dt".to_string()
        } else {
            format!("Dx{}", self.der)
        };
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let dpart = match i {
                0 => String::new(),
                1 => dname.clone(),
                _ => format!("{dname}^{i}"),
            };
            let cs = format!("{c}");
            let (sign, mag) = if let Some(rest) = cs.strip_prefix('-') {
                ("-", rest.to_string())
            } else {
                ("+", cs)
            };
            let needs_parens = mag.contains(['+', '-', ' ']) && !dpart.is_empty();
            let body = if dpart.is_empty() {
                mag
            } else if mag == "1" {
                dpart
            } else if needs_parens {
                format!("({mag})*{dpart}")
            } else {
                format!("{mag}*{dpart}")
            };
            if first {
                if sign == "-" {
                    write!(f, "-{body}")?;
                } else {
                    write!(f, "{body}")?;
                }
                first = false;
            } else if sign == "-" {
                write!(f, " - {body}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}
