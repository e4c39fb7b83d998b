//! Dense univariate polynomials in t whose coefficients live in Q(x).
//!
//! Used by the separability tests, which repeatedly need field-of-
//! coefficients operations that are awkward on the sparse multivariate
//! representation: Euclidean division, gcds, Yun's squarefree
//! decomposition, resultants and partial fractions.

use crate::error::{Error, Result};
use crate::poly::{Coeff, MultiPoly, Monomial};
use crate::rational::RationalFunction;

/// coeffs[i] is the coefficient of t^i; each coefficient is free of t.
/// The top coefficient is nonzero (or the vector is empty for zero).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    arity: usize,
    coeffs: Vec<RationalFunction>,
}

impl UniPoly {
    pub fn new(arity: usize, mut coeffs: Vec<RationalFunction>) -> Self {
        debug_assert!(coeffs.iter().all(|c| !c.depends_on(0)));
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { arity, coeffs }
    }

    pub fn zero(arity: usize) -> Self {
        UniPoly { arity, coeffs: Vec::new() }
    }

    pub fn one(arity: usize) -> Self {
        Self::new(arity, vec![RationalFunction::one(arity)])
    }

    pub fn t(arity: usize) -> Self {
        Self::new(
            arity,
            vec![RationalFunction::zero(arity), RationalFunction::one(arity)],
        )
    }

    pub fn constant(c: RationalFunction) -> Self {
        let arity = c.arity();
        Self::new(arity, vec![c])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
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

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// True when no coefficient involves an x-variable.
    pub fn is_x_free(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_constant())
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        Self::new(self.arity, coeffs)
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly {
            arity: self.arity,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero(self.arity);
        }
        let mut coeffs =
            vec![RationalFunction::zero(self.arity); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::new(self.arity, coeffs)
    }

    pub fn scale(&self, c: &RationalFunction) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero(self.arity);
        }
        UniPoly {
            arity: self.arity,
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn pow(&self, e: usize) -> UniPoly {
        let mut r = UniPoly::one(self.arity);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn monic(&self) -> UniPoly {
        match self.lc() {
            None => self.clone(),
            Some(l) => self.scale(&l.inv().expect("lc nonzero")),
        }
    }

    /// Euclidean division: self = q * d + r with deg r < deg d.
    pub fn divrem(&self, d: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dl = d.lc().unwrap().inv().expect("lc nonzero");
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        let mut q = vec![
            RationalFunction::zero(self.arity);
            self.coeffs.len().saturating_sub(dd)
        ];
        while r.len() > dd || (dd == 0 && !r.is_empty()) {
            if r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
                continue;
            }
            if r.len() <= dd {
                break;
            }
            let k = r.len() - 1 - dd;
            let f = r.last().unwrap().mul(&dl);
            for (j, c) in d.coeffs.iter().enumerate() {
                let v = r[k + j].sub(&f.mul(c));
                r[k + j] = v;
            }
            debug_assert!(r.last().unwrap().is_zero());
            r.pop();
            q[k] = f;
        }
        Ok((Self::new(self.arity, q), Self::new(self.arity, r)))
    }

    pub fn rem(&self, d: &UniPoly) -> Result<UniPoly> {
        Ok(self.divrem(d)?.1)
    }

    pub fn div_exact(&self, d: &UniPoly) -> Result<UniPoly> {
        let (q, r) = self.divrem(d)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision)
        }
    }

    /// d/dt.
    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero(self.arity);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale(&crate::poly::coeff_int(i as i64 + 1)))
            .collect();
        Self::new(self.arity, coeffs)
    }

    /// Coefficient-wise x-derivative.
    pub fn derivative_x(&self, var: usize) -> UniPoly {
        debug_assert!(var >= 1);
        Self::new(
            self.arity,
            self.coeffs.iter().map(|c| c.derivative(var)).collect(),
        )
    }

    /// Evaluate t at a rational function free of t.
    pub fn eval(&self, v: &RationalFunction) -> RationalFunction {
        let mut acc = RationalFunction::zero(self.arity);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(v).add(c);
        }
        acc
    }

    /// View a rational function A/B as a fraction of t-polynomials over
    /// Q(x): clears x-content so both output polynomials have
    /// coefficients in Q(x) exactly as written.
    pub fn fraction_of(f: &RationalFunction) -> (UniPoly, UniPoly) {
        (
            UniPoly::from_multipoly(f.numerator()),
            UniPoly::from_multipoly(f.denominator()),
        )
    }

    pub fn from_multipoly(p: &MultiPoly) -> UniPoly {
        let arity = p.arity();
        let deg = p.degree_in(0);
        let mut coeffs = vec![RationalFunction::zero(arity); deg as usize + 1];
        for (m, c) in p.terms() {
            let k = m.0[0] as usize;
            let mut xm = Monomial::unit(arity);
            xm.0[1..].copy_from_slice(&m.0[1..]);
            let mut mono = MultiPoly::zero(arity);
            mono.add_term(xm, c.clone());
            coeffs[k] = coeffs[k].add(&RationalFunction::from_poly(mono));
        }
        UniPoly::new(arity, coeffs)
    }

    /// Collapse back to a rational function of all variables.
    pub fn to_rational(&self) -> RationalFunction {
        let t = RationalFunction::t(self.arity);
        let mut acc = RationalFunction::zero(self.arity);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&t).add(c);
        }
        acc
    }

    /// Integer coefficient content test helper: all coefficients in Q.
    pub fn constant_coeffs(&self) -> Option<Vec<Coeff>> {
        self.coeffs.iter().map(|c| c.constant_value()).collect()
    }
}

/// Monic gcd by the Euclidean algorithm over the field Q(x).
pub fn uni_gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let r = a.rem(&b).expect("b nonzero");
        a = b;
        b = r;
    }
    a.monic()
}

/// Extended Euclid: returns (g, s, u) monic with s*a + u*b = g.
pub fn uni_xgcd(a: &UniPoly, b: &UniPoly) -> (UniPoly, UniPoly, UniPoly) {
    let arity = a.arity();
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (UniPoly::one(arity), UniPoly::zero(arity));
    let (mut u0, mut u1) = (UniPoly::zero(arity), UniPoly::one(arity));
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1).expect("r1 nonzero");
        let s = s0.sub(&q.mul(&s1));
        let u = u0.sub(&q.mul(&u1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        u0 = std::mem::replace(&mut u1, u);
    }
    match r0.lc() {
        None => (r0, s0, u0),
        Some(l) => {
            let inv = l.inv().expect("lc nonzero");
            (r0.scale(&inv), s0.scale(&inv), u0.scale(&inv))
        }
    }
}

/// Yun's algorithm: monic squarefree factors with multiplicities, so
/// input = lc * prod f_i ^ m_i with the f_i pairwise coprime squarefree.
pub fn squarefree_decomposition(p: &UniPoly) -> Vec<(UniPoly, usize)> {
    if p.is_zero() || p.is_constant() {
        return Vec::new();
    }
    let p = p.monic();
    let dp = p.derivative();
    let mut a = uni_gcd(&p, &dp);
    let mut b = p.div_exact(&a).expect("gcd divides");
    let mut c = dp.div_exact(&a).expect("gcd divides");
    let mut out = Vec::new();
    let mut m = 1usize;
    loop {
        let d = c.sub(&b.derivative());
        if d.is_zero() {
            if !b.is_constant() {
                out.push((b.monic(), m));
            }
            break;
        }
        let f = uni_gcd(&b, &d);
        if !f.is_constant() {
            out.push((f.clone(), m));
        }
        b = b.div_exact(&f).expect("gcd divides");
        c = d.div_exact(&f).expect("gcd divides");
        m += 1;
        if b.is_constant() {
            break;
        }
        let _ = &mut a;
    }
    out
}

/// Resultant res_t(a, b) over Q(x), by the Euclidean remainder chain.
pub fn resultant(a: &UniPoly, b: &UniPoly) -> RationalFunction {
    let arity = a.arity();
    if a.is_zero() || b.is_zero() {
        return RationalFunction::zero(arity);
    }
    let mut a = a.clone();
    let mut b = b.clone();
    let mut acc = RationalFunction::one(arity);
    loop {
        let n = a.degree().unwrap();
        let m = b.degree().unwrap();
        if m == 0 {
            return acc.mul(&b.lc().unwrap().pow(n as u32));
        }
        let r = a.rem(&b).expect("b nonzero");
        if r.is_zero() {
            return RationalFunction::zero(arity);
        }
        let d = r.degree().unwrap();
        // res(a,b) = (-1)^{nm} lc(b)^{n-d} res(b,r)
        let mut factor = b.lc().unwrap().pow((n - d) as u32);
        if (n * m) % 2 == 1 {
            factor = factor.neg();
        }
        acc = acc.mul(&factor);
        a = b;
        b = r;
    }
}

/// Decompose num/den as poly + sum_i n_i / f_i^{e_i} for the pairwise
/// coprime factorization den = lc * prod f_i^{e_i}; deg n_i < e_i*deg f_i.
/// Returns (polynomial part, parts aligned with `factors`).
pub fn partial_fractions(
    num: &UniPoly,
    den_lc: &RationalFunction,
    factors: &[(UniPoly, usize)],
) -> (UniPoly, Vec<UniPoly>) {
    let arity = num.arity();
    let mut den = UniPoly::constant(den_lc.clone());
    for (f, e) in factors {
        den = den.mul(&f.pow(*e));
    }
    let (poly, mut rem) = num.divrem(&den).expect("den nonzero");
    let mut parts = Vec::with_capacity(factors.len());
    let mut co_den = den.div_exact(&UniPoly::constant(den_lc.clone())).unwrap();
    for (i, (f, e)) in factors.iter().enumerate() {
        let fe = f.pow(*e);
        co_den = co_den.div_exact(&fe).expect("factor divides");
        if i + 1 == factors.len() {
            // the remaining fraction is rem/(lc * fe)
            debug_assert!(co_den.is_constant());
            let c = co_den
                .lc()
                .cloned()
                .unwrap_or_else(|| RationalFunction::one(arity))
                .mul(den_lc);
            parts.push(rem.scale(&c.inv().expect("nonzero")));
            break;
        }
        // rem/(fe * rest) = a/fe + b/rest  with  a*rest + b*fe = rem
        let rest = co_den.scale(den_lc);
        let (g, s, _) = uni_xgcd(&rest, &fe);
        debug_assert!(g.is_constant() && !g.is_zero());
        let ginv = g.lc().unwrap().inv().expect("nonzero");
        // a = rem * s / g  mod fe
        let a = rem.mul(&s).scale(&ginv).rem(&fe).expect("fe nonzero");
        // b = (rem - a*rest)/fe
        let b = rem
            .sub(&a.mul(&rest))
            .div_exact(&fe)
            .expect("exact by construction");
        parts.push(a);
        rem = b;
    }
    if factors.is_empty() {
        debug_assert!(rem.is_zero());
    }
    (poly, parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::coeff_int;

    fn c(n: i64) -> RationalFunction {
        RationalFunction::constant(1, coeff_int(n))
    }

    fn up(coeffs: &[i64]) -> UniPoly {
        UniPoly::new(1, coeffs.iter().map(|&n| c(n)).collect())
    }

    #[test]
    fn divrem_roundtrip() {
        let a = up(&[1, 0, -3, 0, 1]); // t^4 - 3t^2 + 1
        let b = up(&[-1, 1]); // t - 1
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn gcd_and_xgcd() {
        // gcd((t-1)^2(t+2), (t-1)(t+3)) = t-1
        let a = up(&[-1, 1]).pow(2).mul(&up(&[2, 1]));
        let b = up(&[-1, 1]).mul(&up(&[3, 1]));
        assert_eq!(uni_gcd(&a, &b), up(&[-1, 1]));
        let (g, s, u) = uni_xgcd(&a, &b);
        assert_eq!(g, up(&[-1, 1]));
        assert_eq!(s.mul(&a).add(&u.mul(&b)), g);
    }

    #[test]
    fn yun() {
        // (t-1)^1 (t+1)^2 (t-2)^3
        let p = up(&[-1, 1])
            .mul(&up(&[1, 1]).pow(2))
            .mul(&up(&[-2, 1]).pow(3));
        let sf = squarefree_decomposition(&p);
        assert_eq!(
            sf,
            vec![(up(&[-1, 1]), 1), (up(&[1, 1]), 2), (up(&[-2, 1]), 3)]
        );
    }

    #[test]
    fn resultant_known() {
        // res(t^2 - 1, t - 2) = (2)^2 - 1 = 3
        let a = up(&[-1, 0, 1]);
        let b = up(&[-2, 1]);
        assert_eq!(resultant(&a, &b), c(3));
        // res with common factor is zero
        let d = up(&[-1, 1]);
        assert!(resultant(&a.mul(&d), &b.mul(&d)).is_zero());
        // swap symmetry up to sign (-1)^{nm}: n=2, m=1 -> sign -1
        assert_eq!(resultant(&b, &a), c(3));
    }

    #[test]
    fn resultant_with_x() {
        // res_t(x*t + 1, t - x) = x*x + 1  (evaluate first at root t=x)
        let x = RationalFunction::x(2, 1);
        let a = UniPoly::new(2, vec![RationalFunction::one(2), x.clone()]);
        let b = UniPoly::new(2, vec![x.neg(), RationalFunction::one(2)]);
        let r = resultant(&a, &b);
        assert_eq!(r, x.mul(&x).add(&RationalFunction::one(2)).neg());
    }

    #[test]
    fn partial_fraction_roundtrip() {
        // 1/((t-1)(t+1)^2) = A/(t-1) + B/(t+1)^2
        let f1 = up(&[-1, 1]);
        let f2 = up(&[1, 1]);
        let factors = vec![(f1.clone(), 1usize), (f2.clone(), 2usize)];
        let num = UniPoly::one(1);
        let (poly, parts) = partial_fractions(&num, &c(1), &factors);
        assert!(poly.is_zero());
        // recombine
        let total = parts[0]
            .mul(&f2.pow(2))
            .add(&parts[1].mul(&f1.clone()));
        assert_eq!(total, num);
        // residue at t = 1 is 1/(1+1)^2 = 1/4
        assert_eq!(
            parts[0],
            UniPoly::constant(RationalFunction::constant(
                1,
                Coeff::new(1.into(), 4.into())
            ))
        );
    }
}
