//! The fraction field K = Q(t, x1..xn) with a unique reduced
//! representation, plus the split/semisplit predicates.
//!
//! Canonical form: gcd(num, den) = 1 and the denominator's lex-leading
//! coefficient is 1. Structural equality on the canonical form is the
//! zero test used everywhere else in the crate.

use crate::error::{Error, Result};
use crate::poly::{gcd, Coeff, MultiPoly};
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    /// Canonicalize a fraction already known to be in lowest terms.
    fn normalized(num: MultiPoly, mut den: MultiPoly) -> Self {
        if num.is_zero() {
            return RationalFunction {
                num,
                den: MultiPoly::one(den.arity()),
            };
        }
        let lc = den.leading().expect("den nonzero").1.clone();
        if !lc.is_one() {
            let inv = Coeff::one() / lc;
            return RationalFunction {
                num: num.scale(&inv),
                den: den.scale(&inv),
            };
        }
        let _ = &mut den;
        RationalFunction { num, den }
    }

    fn reduced(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return RationalFunction {
                num,
                den: MultiPoly::one(den.arity()),
            };
        }
        let g = gcd(&num, &den);
        let mut num = num.div_exact(&g).expect("gcd divides");
        let mut den = den.div_exact(&g).expect("gcd divides");
        // Unique representative: denominator lex-leading coefficient 1.
        let lc = den.leading().expect("den nonzero").1.clone();
        if !lc.is_one() {
            let inv = Coeff::one() / lc;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RationalFunction { num, den }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let arity = p.arity();
        RationalFunction {
            num: p,
            den: MultiPoly::one(arity),
        }
    }

    pub fn zero(arity: usize) -> Self {
        Self::from_poly(MultiPoly::zero(arity))
    }

    pub fn one(arity: usize) -> Self {
        Self::from_poly(MultiPoly::one(arity))
    }

    pub fn constant(arity: usize, c: Coeff) -> Self {
        Self::from_poly(MultiPoly::constant(arity, c))
    }

    pub fn var(arity: usize, v: usize) -> Self {
        Self::from_poly(MultiPoly::var(arity, v))
    }

    pub fn t(arity: usize) -> Self {
        Self::var(arity, 0)
    }

    pub fn x(arity: usize, i: usize) -> Self {
        Self::var(arity, i)
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    pub fn arity(&self) -> usize {
        self.num.arity()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<Coeff> {
        if self.is_constant() {
            let n = self.num.constant_value()?;
            let d = self.den.constant_value()?;
            Some(n / d)
        } else {
            None
        }
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.num.depends_on(var) || self.den.depends_on(var)
    }

    /// Free of every x-variable (element of Q(t)).
    pub fn is_t_only(&self) -> bool {
        (1..self.arity()).all(|v| !self.depends_on(v))
    }

    /// Free of t (element of Q(x)).
    pub fn is_x_only(&self) -> bool {
        !self.depends_on(0)
    }

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        // classical reduction: with both operands canonical, the result
        // over lcm(d1, d2) can only share factors with g = gcd(d1, d2)
        let g = gcd(&self.den, &other.den);
        let d1 = self.den.div_exact(&g).expect("gcd divides");
        let d2 = other.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&d2).add(&other.num.mul(&d1));
        if num.is_zero() {
            return RationalFunction::zero(self.arity());
        }
        let g2 = gcd(&num, &g);
        let num = num.div_exact(&g2).expect("gcd divides");
        let den = self
            .den
            .div_exact(&g2)
            .expect("gcd divides")
            .mul(&d2);
        Self::normalized(num, den)
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RationalFunction) -> RationalFunction {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        if self.is_zero() || other.is_zero() {
            return RationalFunction::zero(self.arity());
        }
        // cross-cancel first; the operands are canonical, so the result
        // of the cross-reduced product is already in lowest terms
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let num = self
            .num
            .div_exact(&g1)
            .expect("gcd divides")
            .mul(&other.num.div_exact(&g2).expect("gcd divides"));
        let den = self
            .den
            .div_exact(&g2)
            .expect("gcd divides")
            .mul(&other.den.div_exact(&g1).expect("gcd divides"));
        Self::normalized(num, den)
    }

    pub fn div(&self, other: &RationalFunction) -> Result<RationalFunction> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.mul(&RationalFunction::normalized(
            other.den.clone(),
            other.num.clone(),
        )))
    }

    pub fn inv(&self) -> Result<RationalFunction> {
        RationalFunction::one(self.arity()).div(self)
    }

    pub fn scale(&self, c: &Coeff) -> RationalFunction {
        Self::reduced(self.num.scale(c), self.den.clone())
    }

    pub fn pow(&self, e: u32) -> RationalFunction {
        let mut r = RationalFunction::one(self.arity());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Derivative with respect to variable `var` (quotient rule).
    pub fn derivative(&self, var: usize) -> RationalFunction {
        let u = self
            .num
            .derivative(var)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(var)));
        if u.is_zero() {
            return RationalFunction::zero(self.arity());
        }
        // reduce against one copy of the denominator before squaring
        let g = gcd(&u, &self.den);
        let u = u.div_exact(&g).expect("gcd divides");
        let d1 = self.den.div_exact(&g).expect("gcd divides");
        Self::reduced(u, d1.mul(&self.den))
    }

    /// Substitute rational values for some variables; errors when the
    /// denominator vanishes identically at the point.
    pub fn specialize(&self, point: &BTreeMap<usize, Coeff>) -> Result<RationalFunction> {
        let den = self.den.substitute(point);
        if den.is_zero() {
            return Err(Error::DenominatorVanishes);
        }
        let num = self.num.substitute(point);
        Ok(Self::reduced(num, den))
    }

    pub fn extend_arity(&self, arity: usize) -> RationalFunction {
        RationalFunction {
            num: self.num.extend_arity(arity),
            den: self.den.extend_arity(arity),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num_simple = self.num.num_terms() <= 1;
        if self.den == MultiPoly::one(self.arity()) {
            if num_simple {
                write!(f, "{}", self.num)
            } else {
                write!(f, "{}", self.num)
            }
        } else {
            let n = if num_simple {
                format!("{}", self.num)
            } else {
                format!("({})", self.num)
            };
            let d = if self.den.num_terms() <= 1 && self.den.total_degree() <= 1 {
                format!("{}", self.den)
            } else {
                format!("({})", self.den)
            };
            write!(f, "{n}/{d}")
        }
    }
}

/// Factorization of a polynomial into a t-free part, an x-free part and
/// a mixed remainder with trivial content in both directions. The three
/// parts multiply back to the input up to a nonzero rational constant.
#[derive(Clone, Debug)]
pub struct SplitDecomposition {
    pub x_part: MultiPoly,
    pub t_part: MultiPoly,
    pub mixed_part: MultiPoly,
    /// input = constant * x_part * t_part * mixed_part
    pub constant: Coeff,
}

impl SplitDecomposition {
    pub fn is_split(&self) -> bool {
        self.mixed_part.is_constant()
    }
}

/// Extract the t-free content, then the x-free content of the quotient.
/// What remains is the mixed part: split iff it is constant.
pub fn poly_split_decompose(p: &MultiPoly) -> Result<SplitDecomposition> {
    if p.is_zero() {
        return Err(Error::ZeroInput);
    }
    // Content as a polynomial in t over Q[x]: a polynomial free of t.
    let x_part = p.content_in_var(0).monic();
    let q = p.div_exact(&x_part).expect("content divides");
    // Content of the quotient in the x-block: gcd of its coefficients
    // when written in the x-monomial basis, a polynomial in t alone.
    let t_part = x_block_content(&q);
    let mixed = q.div_exact(&t_part).expect("content divides").monic();
    let prod = x_part.mul(&t_part).mul(&mixed);
    // input = constant * prod, with prod monic-by-parts.
    let (m, c) = p.leading().expect("nonzero");
    let (pm, pc) = prod.leading().expect("nonzero");
    debug_assert_eq!(m, pm);
    let constant = c.clone() / pc.clone();
    Ok(SplitDecomposition {
        x_part,
        t_part,
        mixed_part: mixed,
        constant,
    })
}

/// Gcd of the coefficients of `p` grouped by x-monomial; the result is
/// free of all x-variables.
fn x_block_content(p: &MultiPoly) -> MultiPoly {
    let arity = p.arity();
    let mut groups: BTreeMap<Vec<u32>, MultiPoly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let xkey: Vec<u32> = m.0[1..].to_vec();
        let mut tm = crate::poly::Monomial::unit(arity);
        tm.0[0] = m.0[0];
        groups
            .entry(xkey)
            .or_insert_with(|| MultiPoly::zero(arity))
            .add_term(tm, c.clone());
    }
    let mut g = MultiPoly::zero(arity);
    for v in groups.values() {
        g = gcd(&g, v);
    }
    g.monic()
}

/// A rational function (in lowest terms) is semisplit iff the mixed
/// part of its denominator is constant.
pub fn rf_is_semisplit(f: &RationalFunction) -> bool {
    if f.is_zero() {
        return true;
    }
    let d = poly_split_decompose(f.denominator()).expect("denominator nonzero");
    d.is_split()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::coeff_int;

    fn rf(num: MultiPoly, den: MultiPoly) -> RationalFunction {
        RationalFunction::new(num, den).unwrap()
    }

    fn t(a: usize) -> MultiPoly {
        MultiPoly::t(a)
    }
    fn x(a: usize, i: usize) -> MultiPoly {
        MultiPoly::x(a, i)
    }
    fn one(a: usize) -> MultiPoly {
        MultiPoly::one(a)
    }

    #[test]
    fn normalizes_gcd() {
        // (t^2 - 1)/(t - 1) -> t + 1
        let f = rf(t(1).pow(2).sub(&one(1)), t(1).sub(&one(1)));
        assert_eq!(f, RationalFunction::from_poly(t(1).add(&one(1))));
    }

    #[test]
    fn additive_identity() {
        let q = x(2, 1).mul(&t(2)).add(&one(2));
        let f = rf(x(2, 1), q.clone());
        assert_eq!(f.add(&RationalFunction::zero(2)), f);
    }

    #[test]
    fn product_of_inverses() {
        // 1/(t+1) * 1/(t-1) = 1/(t^2-1)
        let a = rf(one(1), t(1).add(&one(1)));
        let b = rf(one(1), t(1).sub(&one(1)));
        let c = rf(one(1), t(1).pow(2).sub(&one(1)));
        assert_eq!(a.mul(&b), c);
    }

    #[test]
    fn specialization() {
        let q = x(2, 1).mul(&t(2)).add(&one(2));
        let f = rf(x(2, 1), q);
        let mut at1 = BTreeMap::new();
        at1.insert(1usize, coeff_int(1));
        let g = f.specialize(&at1).unwrap();
        assert_eq!(g, rf(one(2), t(2).add(&one(2))));
        let mut at0 = BTreeMap::new();
        at0.insert(1usize, coeff_int(0));
        assert!(f.specialize(&at0).unwrap().is_zero());
        // 1/x at x=0 vanishing denominator
        let h = rf(one(2), x(2, 1));
        assert!(matches!(
            h.specialize(&at0),
            Err(Error::DenominatorVanishes)
        ));
    }

    #[test]
    fn split_decomposition_cases() {
        // x*t + 1 is mixed (not split)
        let q = x(2, 1).mul(&t(2)).add(&one(2));
        let d = poly_split_decompose(&q).unwrap();
        assert!(!d.is_split());
        assert_eq!(d.mixed_part, q.monic());

        // x^2 * (t - 1): x-part x^2, t-part t-1, mixed 1
        let p = x(2, 1).pow(2).mul(&t(2).sub(&one(2)));
        let d = poly_split_decompose(&p).unwrap();
        assert!(d.is_split());
        assert_eq!(d.x_part, x(2, 1).pow(2));
        assert_eq!(d.t_part, t(2).sub(&one(2)));

        // (x+1)*(x*t+1)^2: x-part x+1, mixed (x*t+1)^2
        let p = x(2, 1).add(&one(2)).mul(&q.pow(2));
        let d = poly_split_decompose(&p).unwrap();
        assert_eq!(d.x_part, x(2, 1).add(&one(2)).monic());
        assert_eq!(d.mixed_part, q.pow(2).monic());
        assert!(!d.is_split());

        // parts multiply back to input up to the recorded constant
        let back = d
            .x_part
            .mul(&d.t_part)
            .mul(&d.mixed_part)
            .scale(&d.constant);
        assert_eq!(back, p);
    }

    #[test]
    fn semisplit_predicate() {
        let q = x(2, 1).mul(&t(2)).add(&one(2));
        assert!(!rf_is_semisplit(&rf(one(2), q)));
        // (t+x)/(x^2*(t-1)) is semisplit: denominator split
        let f = rf(
            t(2).add(&x(2, 1)),
            x(2, 1).pow(2).mul(&t(2).sub(&one(2))),
        );
        assert!(rf_is_semisplit(&f));
        // anything free of x
        let g = rf(one(2), t(2).pow(3).add(&t(2)));
        assert!(rf_is_semisplit(&g));
    }
}
