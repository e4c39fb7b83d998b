//! Sparse multivariate polynomials over the rationals.
//!
//! Variable slot 0 is always `t`; slots `1..=n` are `x1..xn`. All
//! polynomials carry a fixed arity so exponent vectors line up, and the
//! term map is a `BTreeMap` keyed by exponent vector, which gives a
//! canonical iteration order and structural equality for free. The
//! implied monomial order (lex on exponent vectors) is multiplicative,
//! so leading-term division is a valid exact-division procedure.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Coeff = BigRational;

pub fn coeff_int(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

pub fn coeff_ratio(num: i64, den: i64) -> Coeff {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exponent vector; index 0 is `t`, index `i >= 1` is `x_i`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn unit(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn var(arity: usize, var: usize) -> Self {
        let mut e = vec![0; arity];
        e[var] = 1;
        Monomial(e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    arity: usize,
    terms: BTreeMap<Monomial, Coeff>,
}

impl MultiPoly {
    pub fn zero(arity: usize) -> Self {
        MultiPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Coeff::one())
    }

    pub fn constant(arity: usize, c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(arity), c);
        }
        MultiPoly { arity, terms }
    }

    pub fn var(arity: usize, var: usize) -> Self {
        assert!(var < arity, "variable index out of range");
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(arity, var), Coeff::one());
        MultiPoly { arity, terms }
    }

    /// The variable `t`.
    pub fn t(arity: usize) -> Self {
        Self::var(arity, 0)
    }

    /// The variable `x_i` (1-based).
    pub fn x(arity: usize, i: usize) -> Self {
        Self::var(arity, i)
    }

    pub fn from_terms(arity: usize, it: impl IntoIterator<Item = (Monomial, Coeff)>) -> Self {
        let mut p = Self::zero(arity);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1
            && self
                .terms
                .keys()
                .all(|m| m.0.iter().all(|&e| e == 0))
    }

    pub fn constant_value(&self) -> Option<Coeff> {
        if self.is_zero() {
            Some(Coeff::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        debug_assert_eq!(m.0.len(), self.arity);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    o.insert(sum);
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.arity, other.arity);
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.arity, other.arity);
        let mut r = MultiPoly::zero(self.arity);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                r.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        r
    }

    pub fn scale(&self, c: &Coeff) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.arity);
        }
        MultiPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut r = MultiPoly::one(self.arity);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn leading(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    pub fn derivative(&self, var: usize) -> MultiPoly {
        let mut r = MultiPoly::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e > 0 {
                let mut m2 = m.clone();
                m2.0[var] = e - 1;
                r.add_term(m2, c.clone() * coeff_int(e as i64));
            }
        }
        r
    }

    /// Substitute rational values for some variables.
    pub fn substitute(&self, point: &BTreeMap<usize, Coeff>) -> MultiPoly {
        let mut r = MultiPoly::zero(self.arity);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut m2 = m.clone();
            for (&var, val) in point {
                let e = m.0[var];
                if e > 0 {
                    let mut p = Coeff::one();
                    for _ in 0..e {
                        p *= val.clone();
                    }
                    coeff *= p;
                    m2.0[var] = 0;
                }
            }
            r.add_term(m2, coeff);
        }
        r
    }

    /// Coefficients with respect to one variable, dense from power 0 up.
    /// Each returned polynomial is free of `var`.
    pub fn coeffs_in_var(&self, var: usize) -> Vec<MultiPoly> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![MultiPoly::zero(self.arity); d + 1];
        for (m, c) in &self.terms {
            let e = m.0[var] as usize;
            let mut m2 = m.clone();
            m2.0[var] = 0;
            out[e].add_term(m2, c.clone());
        }
        out
    }

    pub fn from_coeffs_in_var(arity: usize, var: usize, coeffs: &[MultiPoly]) -> MultiPoly {
        let mut r = MultiPoly::zero(arity);
        for (e, c) in coeffs.iter().enumerate() {
            for (m, k) in &c.terms {
                let mut m2 = m.clone();
                m2.0[var] += e as u32;
                r.add_term(m2, k.clone());
            }
        }
        r
    }

    /// Divide by the leading coefficient so the lex-leading term has
    /// coefficient one.
    pub fn monic(&self) -> MultiPoly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = Coeff::one() / c.clone();
                self.scale(&inv)
            }
        }
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &MultiPoly) -> Option<MultiPoly> {
        assert!(!other.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut q = MultiPoly::zero(self.arity);
        let (lm, lc) = {
            let (m, c) = other.leading().unwrap();
            (m.clone(), c.clone())
        };
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            if !lm.divides(&rm) {
                return None;
            }
            let qm = rm.div(&lm);
            let qc = rc / lc.clone();
            let mut t = MultiPoly::zero(self.arity);
            t.add_term(qm.clone(), qc.clone());
            q.add_term(qm, qc);
            rem = rem.sub(&t.mul(other));
        }
        Some(q)
    }

    /// Content with respect to `var`: gcd of the coefficients of the
    /// powers of `var`.
    pub fn content_in_var(&self, var: usize) -> MultiPoly {
        let mut g = MultiPoly::zero(self.arity);
        for c in self.coeffs_in_var(var) {
            if !c.is_zero() {
                g = gcd(&g, &c);
            }
        }
        g
    }

    /// Rename/embed into a larger arity (slots keep their indices).
    pub fn extend_arity(&self, arity: usize) -> MultiPoly {
        assert!(arity >= self.arity);
        MultiPoly {
            arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.resize(arity, 0);
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }
}

/// Gcd of multivariate polynomials, normalized to lex-leading
/// coefficient one. Content/primitive-part split in the first active
/// variable, then a subresultant PRS on the primitive parts.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    // divisibility settles it outright; nested powers of one factor
    // (certificate denominators are mostly W^k) hit this constantly
    if b.div_exact(a).is_some() {
        return a.monic();
    }
    if a.div_exact(b).is_some() {
        return b.monic();
    }
    // First variable either operand depends on.
    let var = (0..a.arity()).find(|&v| a.depends_on(v) || b.depends_on(v));
    let var = match var {
        None => return MultiPoly::one(a.arity()),
        Some(v) => v,
    };
    let cont_a = a.content_in_var(var);
    let cont_b = b.content_in_var(var);
    let prim_a = a.div_exact(&cont_a).expect("content divides");
    let prim_b = b.div_exact(&cont_b).expect("content divides");
    let cont_gcd = gcd(&cont_a, &cont_b);

    // evaluation shortcut: a degree-0 gcd of univariate images (at a
    // point keeping both leading coefficients alive) proves the
    // primitive parts coprime, skipping the PRS entirely
    if coprime_by_image(&prim_a, &prim_b, var) {
        return cont_gcd.monic();
    }

    let w = subresultant_gcd_in_var(&prim_a, &prim_b, var);
    if w.degree_in(var) == 0 {
        return cont_gcd.monic();
    }
    let cont_w = w.content_in_var(var);
    let w = w.div_exact(&cont_w).expect("content divides");
    cont_gcd.mul(&w).monic()
}

fn coprime_by_image(a: &MultiPoly, b: &MultiPoly, var: usize) -> bool {
    let arity = a.arity();
    let others: Vec<usize> = (0..arity)
        .filter(|&v| v != var && (a.depends_on(v) || b.depends_on(v)))
        .collect();
    if others.is_empty() {
        return false; // already univariate: just run the PRS
    }
    'seed: for seed in 0..4i64 {
        let point: std::collections::BTreeMap<usize, Coeff> = others
            .iter()
            .enumerate()
            .map(|(k, &v)| (v, coeff_int(2 + seed + 3 * k as i64)))
            .collect();
        let ia = a.substitute(&point);
        let ib = b.substitute(&point);
        if ia.degree_in(var) != a.degree_in(var) || ib.degree_in(var) != b.degree_in(var) {
            continue 'seed; // a leading coefficient vanished
        }
        let ca: Vec<Coeff> = ia
            .coeffs_in_var(var)
            .iter()
            .map(|c| c.constant_value().expect("image is univariate"))
            .collect();
        let cb: Vec<Coeff> = ib
            .coeffs_in_var(var)
            .iter()
            .map(|c| c.constant_value().expect("image is univariate"))
            .collect();
        if uni_gcd_degree(ca, cb) == 0 {
            return true;
        }
        // a nonzero image gcd can be an artifact of the point; a
        // different seed settles it when the operands are coprime
    }
    false
}

/// Subresultant PRS in `var` with polynomial coefficients in the
/// remaining variables. Returns a polynomial multiple of the gcd;
/// primitive part is left to the caller. No coefficient gcds are
/// computed along the way, and the subresultant divisors keep the
/// remainders from blowing up the way plain Euclid does.
fn subresultant_gcd_in_var(a: &MultiPoly, b: &MultiPoly, var: usize) -> MultiPoly {
    let arity = a.arity();
    let to_vec = |p: &MultiPoly| -> Vec<MultiPoly> { p.coeffs_in_var(var) };
    let trim = |v: &mut Vec<MultiPoly>| {
        while v.last().map_or(false, |c| c.is_zero()) {
            v.pop();
        }
    };
    // pseudo-remainder: lc(w)^(deg u - deg w + 1) * u mod w
    let prem = |u: &[MultiPoly], w: &[MultiPoly]| -> Vec<MultiPoly> {
        let d = u.len() - w.len();
        let lq = w.last().unwrap();
        let mut r = u.to_vec();
        let mut steps = 0usize;
        while r.len() >= w.len() {
            let f = r.last().unwrap().clone();
            let off = r.len() - w.len();
            let top = r.len() - 1;
            for c in r.iter_mut().take(top) {
                *c = c.mul(lq);
            }
            for (k, c) in w.iter().enumerate().take(w.len() - 1) {
                r[off + k] = r[off + k].sub(&f.mul(c));
            }
            r.pop();
            steps += 1;
            trim(&mut r);
        }
        for _ in steps..=d {
            for c in r.iter_mut() {
                *c = c.mul(lq);
            }
        }
        r
    };
    let mut p = to_vec(a);
    let mut q = to_vec(b);
    trim(&mut p);
    trim(&mut q);
    if p.len() < q.len() {
        std::mem::swap(&mut p, &mut q);
    }
    let mut g = MultiPoly::one(arity);
    let mut h = MultiPoly::one(arity);
    loop {
        let d = (p.len() - q.len()) as u32;
        let r = prem(&p, &q);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            // gcd has degree 0 in var
            q = r;
            break;
        }
        let divisor = g.mul(&h.pow(d));
        p = q;
        q = r
            .into_iter()
            .map(|c| c.div_exact(&divisor).expect("subresultant division is exact"))
            .collect();
        g = p.last().unwrap().clone();
        h = match d {
            0 => h,
            1 => g.clone(),
            _ => g
                .pow(d)
                .div_exact(&h.pow(d - 1))
                .expect("subresultant h-update is exact"),
        };
    }
    let mut out = MultiPoly::zero(arity);
    let x = MultiPoly::var(arity, var);
    let mut pow = MultiPoly::one(arity);
    for c in &q {
        out = out.add(&c.mul(&pow));
        pow = pow.mul(&x);
    }
    out
}

/// Degree of the gcd of two dense univariate rational polynomials.
fn uni_gcd_degree(mut a: Vec<Coeff>, mut b: Vec<Coeff>) -> usize {
    let trim = |v: &mut Vec<Coeff>| {
        while v.last().map_or(false, |c| c.is_zero()) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        while a.len() >= b.len() {
            let f = a.last().unwrap() / b.last().unwrap();
            let off = a.len() - b.len();
            for (k, c) in b.iter().enumerate() {
                let v = &a[off + k] - &f * c;
                a[off + k] = v;
            }
            a.pop();
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

pub fn lcm(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() || b.is_zero() {
        return MultiPoly::zero(a.arity());
    }
    if b.div_exact(a).is_some() {
        return b.monic();
    }
    if a.div_exact(b).is_some() {
        return a.monic();
    }
    let g = gcd(a, b);
    a.mul(b).div_exact(&g).expect("gcd divides").monic()
}

fn var_name(var: usize) -> String {
    if var == 0 {
        "t".to_string()
    } else {
        format!("x{var}")
    }
}

fn fmt_coeff(c: &Coeff) -> String {
    if c.is_integer() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Descending lex order reads naturally (highest powers first).
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let mut factors: Vec<String> = Vec::new();
            // x-variables first, then t, matching the usual way these
            // expressions are written out.
            let order = (1..m.0.len()).chain(std::iter::once(0));
            for v in order {
                let e = m.0[v];
                if e == 1 {
                    factors.push(var_name(v));
                } else if e > 1 {
                    factors.push(format!("{}^{}", var_name(v), e));
                }
            }
            let abs = c.abs();
            let mut body = if factors.is_empty() {
                fmt_coeff(&abs)
            } else if abs.is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", fmt_coeff(&abs), factors.join("*"))
            };
            if first {
                if c.is_negative() {
                    body = format!("-{body}");
                }
                write!(f, "{body}")?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {body}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(arity: usize) -> MultiPoly {
        MultiPoly::t(arity)
    }
    fn x(arity: usize, i: usize) -> MultiPoly {
        MultiPoly::x(arity, i)
    }

    #[test]
    fn arithmetic_basics() {
        let a = t(2).add(&MultiPoly::one(2)); // t + 1
        let b = t(2).sub(&MultiPoly::one(2)); // t - 1
        let p = a.mul(&b); // t^2 - 1
        let t2 = t(2).mul(&t(2));
        assert_eq!(p, t2.sub(&MultiPoly::one(2)));
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn gcd_univariate() {
        // gcd(t^2 - 1, t - 1) = t - 1
        let a = t(1).mul(&t(1)).sub(&MultiPoly::one(1));
        let b = t(1).sub(&MultiPoly::one(1));
        assert_eq!(gcd(&a, &b), b.monic());
    }

    #[test]
    fn gcd_multivariate() {
        // gcd((x*t + 1)^2 * (t - 1), (x*t + 1) * x) = x*t + 1 (monic in lex)
        let q = x(2, 1).mul(&t(2)).add(&MultiPoly::one(2));
        let a = q.pow(2).mul(&t(2).sub(&MultiPoly::one(2)));
        let b = q.mul(&x(2, 1));
        let g = gcd(&a, &b);
        assert_eq!(g, q.monic());
    }

    #[test]
    fn exact_division() {
        let q = x(2, 1).mul(&t(2)).add(&MultiPoly::one(2));
        let p = q.pow(3);
        assert_eq!(p.div_exact(&q).unwrap(), q.pow(2));
        assert!(q.div_exact(&p).is_none());
    }

    #[test]
    fn substitution() {
        // (x*t + 1) at x=1 -> t + 1
        let q = x(2, 1).mul(&t(2)).add(&MultiPoly::one(2));
        let mut pt = BTreeMap::new();
        pt.insert(1usize, Coeff::one());
        assert_eq!(q.substitute(&pt), t(2).add(&MultiPoly::one(2)));
    }

    #[test]
    fn derivative_and_display() {
        let q = x(2, 1).mul(&t(2)).add(&MultiPoly::one(2));
        assert_eq!(q.derivative(0), x(2, 1));
        assert_eq!(q.to_string(), "x1*t + 1");
    }
}
