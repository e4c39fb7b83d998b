//! Annihilator search by undetermined coefficients: for D-finite
//! elements f1..fm and a generator set S with |S| > n+1, a nonzero
//! operator in k<S> killing all of them exists and is found by degree
//! escalation. The normal-form variant reshapes that operator into
//! L + sum Dx_i M_i + sum N_j Dx_j with L in k<{t,Dt} u V>, following
//! the two multiplier tricks (lex-minimal x-power on the left, then
//! lex-maximal Dx-power on the left).

use crate::dfinite::{promote_common, DFiniteElement};
use crate::error::{Error, Result};
use crate::linalg::kernel_q;
use crate::ore::{Gen, WeylMonomial, WeylOperator};
use crate::poly::{coeff_int, Coeff, Monomial, MultiPoly};
use crate::rational::RationalFunction;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};

pub const DEFAULT_DEGREE_CEILING: u32 = 12;

/// All exponent vectors over `gens` of total degree <= d, in graded-lex
/// order with respect to the declaration order of the generators.
fn exponent_vectors(ngens: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for deg in 0..=d {
        let mut stack = vec![(Vec::new(), deg)];
        while let Some((prefix, rem)) = stack.pop() {
            if prefix.len() == ngens {
                if rem == 0 {
                    out.push(prefix);
                }
                continue;
            }
            let last = prefix.len() + 1 == ngens;
            // popped order gives earlier-declared generators priority
            for e in 0..=rem {
                if last && e != rem {
                    continue;
                }
                let mut p = prefix.clone();
                p.push(e);
                stack.push((p, rem - e));
            }
        }
    }
    out
}

fn monomial_of(arity: usize, gens: &[Gen], exps: &[u32]) -> WeylMonomial {
    let mut m = WeylMonomial::unit(arity);
    for (g, &e) in gens.iter().zip(exps) {
        match *g {
            Gen::Var(v) => m.vars.0[v] += e,
            Gen::Der(v) => m.ders.0[v] += e,
        }
    }
    m
}

/// Normalize a nonzero rational-coefficient operator to coprime integer
/// coefficients with the graded-lex-leading term positive.
fn normalize_integer(w: &WeylOperator) -> WeylOperator {
    use num_integer::Integer;
    let mut den = num_bigint::BigInt::from(1);
    for (_, c) in w.terms() {
        den = den.lcm(c.denom());
    }
    let mut scaled = w.scale(&Coeff::from(den));
    let mut num = num_bigint::BigInt::zero();
    for (_, c) in scaled.terms() {
        num = num.gcd(c.numer());
    }
    if !num.is_zero() {
        scaled = scaled.scale(&Coeff::new(1.into(), num));
    }
    // sign: make the highest-derivation term's coefficient positive
    if let Some((_, c)) = scaled
        .terms()
        .max_by_key(|(m, _)| (m.ders.degree(), m.ders.clone(), m.vars.clone()))
    {
        if c < &Coeff::zero() {
            return scaled.neg();
        }
    }
    scaled
}

/// Nonzero T in k<S> with T(f) = 0 for every f. `force` permits
/// |S| <= n+1, where termination is no longer guaranteed by theory.
pub fn lipshitz_annihilator(
    fs: &[DFiniteElement],
    gens: &[Gen],
    ceiling: u32,
    force: bool,
) -> Result<WeylOperator> {
    if fs.is_empty() {
        return Err(Error::ZeroInput);
    }
    let arity = fs[0].arity();
    let n = arity - 1;
    if gens.len() <= n + 1 && !force {
        return Err(Error::Invalid(format!(
            "generator set of size {} gives no termination guarantee for n = {n}",
            gens.len()
        )));
    }
    {
        let set: BTreeSet<Gen> = gens.iter().copied().collect();
        assert_eq!(set.len(), gens.len(), "duplicate generators");
    }
    let fs = promote_common(fs)?;
    if fs.iter().all(|f| f.is_zero()) {
        return Ok(WeylOperator::gen(arity, Gen::Der(0)));
    }
    let dim = fs[0].system().dim();
    // applications are extended one generator at a time from the
    // degree-(d-1) parent, never recomputed from scratch: a var gen is
    // a coefficient multiplication, a der gen one derivation (safe
    // because monomials are normal-ordered, so a var can always be
    // peeled on the left and, once no vars remain, any der can)
    let mut cache: BTreeMap<Vec<u32>, Vec<DFiniteElement>> = BTreeMap::new();
    cache.insert(vec![0u32; gens.len()], fs.clone());
    for d in 1..=ceiling {
        eprintln!("[lip] d={d} gens={gens:?} nfs={} dim={dim}", fs.len());
        let _t0 = std::time::Instant::now();
        let exps = exponent_vectors(gens.len(), d);
        let monos: Vec<WeylMonomial> =
            exps.iter().map(|e| monomial_of(arity, gens, e)).collect();
        for e in &exps {
            if cache.contains_key(e) {
                continue;
            }
            let pos = (0..gens.len())
                .filter(|&i| e[i] > 0)
                .max_by_key(|&i| matches!(gens[i], Gen::Var(_)))
                .expect("nonzero exponent vector");
            let mut pe = e.clone();
            pe[pos] -= 1;
            let parent = cache.get(&pe).expect("graded order fills parents first");
            let applied: Vec<DFiniteElement> = match gens[pos] {
                Gen::Var(v) => {
                    let xv = RationalFunction::from_poly(MultiPoly::var(arity, v));
                    parent.iter().map(|g| g.mul_rat(&xv)).collect()
                }
                Gen::Der(v) => parent
                    .iter()
                    .map(|g| g.diff(v))
                    .collect::<Result<Vec<_>>>()?,
            };
            cache.insert(e.clone(), applied);
        }
        // applied[m][f] = coordinates of (monomial m)(f)
        let applied: Vec<&Vec<DFiniteElement>> =
            exps.iter().map(|e| &cache[e]).collect();
        let mut rows: Vec<Vec<Coeff>> = Vec::new();
        for fi in 0..fs.len() {
            for b in 0..dim {
                let entries: Vec<&RationalFunction> =
                    applied.iter().map(|a| &a[fi].coords()[b]).collect();
                if entries.iter().all(|e| e.is_zero()) {
                    continue;
                }
                let mut den = MultiPoly::one(arity);
                for e in &entries {
                    den = crate::poly::lcm(&den, e.denominator());
                }
                let polys: Vec<MultiPoly> = entries
                    .iter()
                    .map(|e| {
                        e.numerator()
                            .mul(&den.div_exact(e.denominator()).expect("lcm divides"))
                    })
                    .collect();
                let mut support: BTreeSet<Monomial> = BTreeSet::new();
                for p in &polys {
                    support.extend(p.terms().map(|(m, _)| m.clone()));
                }
                for s in &support {
                    rows.push(
                        polys
                            .iter()
                            .map(|p| {
                                p.terms()
                                    .find(|(m, _)| *m == s)
                                    .map(|(_, c)| c.clone())
                                    .unwrap_or_else(Coeff::zero)
                            })
                            .collect(),
                    );
                }
            }
        }
        eprintln!(
            "[lip] d={d} rows={} cols={} built in {:?}",
            rows.len(),
            monos.len(),
            _t0.elapsed()
        );
        let kernel = kernel_q(&rows);
        eprintln!("[lip] d={d} kernel={} total {:?}", kernel.len(), _t0.elapsed());
        if kernel.is_empty() {
            continue;
        }
        // fewest nonzero terms, ties by position
        let best = kernel
            .iter()
            .enumerate()
            .min_by_key(|(i, v)| (v.iter().filter(|c| !c.is_zero()).count(), *i))
            .map(|(_, v)| v)
            .unwrap();
        let mut t = WeylOperator::zero(arity);
        for (m, c) in monos.iter().zip(best) {
            t.add_term(m.clone(), c.clone());
        }
        let t = normalize_integer(&t);
        debug_assert!(!t.is_zero());
        debug_assert!(fs
            .iter()
            .all(|f| f.apply_weyl(&t).map(|g| g.is_zero()).unwrap_or(false)));
        return Ok(t);
    }
    Err(Error::DegreeCeiling(ceiling))
}

/// Split w = r + D_s * tilde with r free of D_s (anti-normal grouping
/// in slot s).
fn strip_der_left(w: &WeylOperator, s: usize) -> (WeylOperator, WeylOperator) {
    let parts = w.coeffs_der_left(s);
    let arity = w.arity();
    let d = WeylOperator::gen(arity, Gen::Der(s));
    let mut tilde = WeylOperator::zero(arity);
    for (k, p) in parts.iter().enumerate().skip(1) {
        tilde = tilde.add(&d.pow(k as u32 - 1).mul(p));
    }
    (parts[0].clone(), tilde)
}

/// Split w = r + tilde * D_s with r free of D_s (normal-order grouping).
fn strip_der_right(w: &WeylOperator, s: usize) -> (WeylOperator, WeylOperator) {
    let parts = w.coeffs_in_der(s);
    let arity = w.arity();
    let d = WeylOperator::gen(arity, Gen::Der(s));
    let mut tilde = WeylOperator::zero(arity);
    for (k, p) in parts.iter().enumerate().skip(1) {
        tilde = tilde.add(&p.mul(&d.pow(k as u32 - 1)));
    }
    (parts[0].clone(), tilde)
}

#[derive(Clone, Debug)]
pub struct NormalFormParts {
    pub l: WeylOperator,
    pub m: BTreeMap<usize, WeylOperator>,
    pub n: BTreeMap<usize, WeylOperator>,
}

impl NormalFormParts {
    /// The full operator L + sum Dx_i M_i + sum N_j Dx_j.
    pub fn total(&self) -> WeylOperator {
        let arity = self.l.arity();
        let mut p = self.l.clone();
        for (&i, mi) in &self.m {
            p = p.add(&WeylOperator::gen(arity, Gen::Der(i)).mul(mi));
        }
        for (&j, nj) in &self.n {
            p = p.add(&nj.mul(&WeylOperator::gen(arity, Gen::Der(j))));
        }
        p
    }
}

/// Annihilator in the shape L + sum_{i in I} Dx_i M_i +
/// sum_{j in J} N_j Dx_j with L nonzero in k<{t,Dt} u V> and every N_j
/// free of x_i, i in I.
pub fn normal_form_annihilator(
    fs: &[DFiniteElement],
    i_set: &[usize],
    j_set: &[usize],
    v: &[Gen],
    ceiling: u32,
) -> Result<NormalFormParts> {
    if fs.is_empty() {
        return Err(Error::ZeroInput);
    }
    let arity = fs[0].arity();
    if fs.iter().all(|f| f.is_zero()) {
        return Ok(NormalFormParts {
            l: WeylOperator::gen(arity, Gen::Der(0)),
            m: BTreeMap::new(),
            n: BTreeMap::new(),
        });
    }
    let mut gens: Vec<Gen> = vec![Gen::Var(0), Gen::Der(0)];
    gens.extend(i_set.iter().map(|&i| Gen::Der(i)));
    gens.extend(j_set.iter().map(|&j| Gen::Var(j)));
    gens.extend(v.iter().copied());
    let t = lipshitz_annihilator(fs, &gens, ceiling, false)?;

    // lex-minimal exponent of the I-derivations over the terms of T
    let dbar: Vec<u32> = if i_set.is_empty() {
        Vec::new()
    } else {
        t.terms()
            .map(|(m, _)| i_set.iter().map(|&i| m.ders.0[i]).collect::<Vec<u32>>())
            .min()
            .unwrap()
    };
    let mut xmul = WeylMonomial::unit(arity);
    for (&i, &e) in i_set.iter().zip(&dbar) {
        xmul.vars.0[i] = e;
    }
    let mut w = WeylOperator::term(arity, xmul, coeff_int(1)).mul(&t);
    let mut m_map = BTreeMap::new();
    for &i in i_set {
        let (rem, tilde) = strip_der_left(&w, i);
        if !tilde.is_zero() {
            m_map.insert(i, tilde);
        }
        w = rem;
    }
    let a = w; // alpha * T_dbar, free of every Dx_i and x_i, i in I
    debug_assert!(!a.is_zero());

    // lex-maximal exponent of the J-variables over the terms of A
    let ebar: Vec<u32> = if j_set.is_empty() {
        Vec::new()
    } else {
        a.terms()
            .map(|(m, _)| j_set.iter().map(|&j| m.vars.0[j]).collect::<Vec<u32>>())
            .max()
            .unwrap()
    };
    let mut dmul = WeylMonomial::unit(arity);
    for (&j, &e) in j_set.iter().zip(&ebar) {
        dmul.ders.0[j] = e;
    }
    let dmul_op = WeylOperator::term(arity, dmul, coeff_int(1));
    let mut w2 = dmul_op.mul(&a);
    let mut n_map = BTreeMap::new();
    for &j in j_set {
        let (rem, tilde) = strip_der_right(&w2, j);
        if !tilde.is_zero() {
            n_map.insert(j, tilde);
        }
        w2 = rem;
    }
    let l = w2; // beta * L_ebar, in k<{t,Dt} u V>
    debug_assert!(!l.is_zero());
    {
        let mut allowed: BTreeSet<Gen> = v.iter().copied().collect();
        allowed.insert(Gen::Var(0));
        allowed.insert(Gen::Der(0));
        debug_assert!(l.lies_in(&allowed));
    }
    // the D_J^ebar multiplication also acts on the M_i parts
    for mi in m_map.values_mut() {
        *mi = dmul_op.mul(mi);
    }
    let parts = NormalFormParts { l, m: m_map, n: n_map };
    debug_assert!({
        let p = parts.total();
        fs.iter()
            .all(|f| f.apply_weyl(&p).map(|g| g.is_zero()).unwrap_or(false))
    });
    Ok(parts)
}

/// Nonzero L in k<{t,Dt} u V> annihilating all fs, assuming each f is
/// constant in the J-directions.
pub fn compatible_annihilator(
    fs: &[DFiniteElement],
    j_set: &[usize],
    v: &[Gen],
    ceiling: u32,
) -> Result<WeylOperator> {
    for f in fs {
        for &j in j_set {
            if !f.diff(j)?.is_zero() {
                return Err(Error::Invalid(format!(
                    "element is not constant in direction x{j}"
                )));
            }
        }
    }
    Ok(normal_form_annihilator(fs, &[], j_set, v, ceiling)?.l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfinite::{df_from_rational, DFiniteElement, RectangularSystem};
    use crate::ore::OreOperator;
    use crate::poly::coeff_int;

    fn exp_xt() -> DFiniteElement {
        // Dt f = x f, Dx f = t f
        let at = OreOperator::new(
            2,
            0,
            vec![RationalFunction::x(2, 1).neg(), RationalFunction::one(2)],
        );
        let ax = OreOperator::new(
            2,
            1,
            vec![RationalFunction::t(2).neg(), RationalFunction::one(2)],
        );
        let sys = RectangularSystem::leaf(2, vec![Some(at), Some(ax)], None).unwrap();
        DFiniteElement::generator(sys)
    }

    #[test]
    fn lipshitz_exp_xt() {
        let f = exp_xt();
        let gens = [Gen::Var(0), Gen::Der(0), Gen::Der(1)];
        let t = lipshitz_annihilator(&[f.clone()], &gens, 12, false).unwrap();
        // a k-multiple of Dx - t
        let expect = WeylOperator::gen(2, Gen::Der(1)).sub(&WeylOperator::gen(2, Gen::Var(0)));
        assert_eq!(t, expect);
        assert!(f.apply_weyl(&t).unwrap().is_zero());
    }

    #[test]
    fn lipshitz_inverse_linear() {
        let h = RationalFunction::new(
            MultiPoly::one(2),
            MultiPoly::x(2, 1).mul(&MultiPoly::t(2)).add(&MultiPoly::one(2)),
        )
        .unwrap();
        let f = df_from_rational(&h);
        let gens = [Gen::Var(0), Gen::Var(1), Gen::Der(0), Gen::Der(1)];
        let t = lipshitz_annihilator(&[f.clone()], &gens, 12, false).unwrap();
        assert!(f.apply_weyl(&t).unwrap().is_zero());
        let s: BTreeSet<Gen> = gens.iter().copied().collect();
        assert!(t.lies_in(&s));
        // the hand annihilator t*Dt - x*Dx also kills f
        let oracle = WeylOperator::gen(2, Gen::Var(0))
            .mul(&WeylOperator::gen(2, Gen::Der(0)))
            .sub(
                &WeylOperator::gen(2, Gen::Var(1)).mul(&WeylOperator::gen(2, Gen::Der(1))),
            );
        assert!(f.apply_weyl(&oracle).unwrap().is_zero());
    }

    #[test]
    fn lipshitz_constant_gets_dt() {
        let c = df_from_rational(&RationalFunction::constant(2, coeff_int(5)));
        let gens = [Gen::Var(0), Gen::Der(0), Gen::Der(1)];
        let t = lipshitz_annihilator(&[c], &gens, 12, false).unwrap();
        assert_eq!(t, WeylOperator::gen(2, Gen::Der(0)));
    }

    #[test]
    fn lipshitz_small_set_rejected() {
        let c = df_from_rational(&RationalFunction::one(2));
        let gens = [Gen::Var(0), Gen::Der(0)];
        assert!(lipshitz_annihilator(&[c.clone()], &gens, 12, false).is_err());
        // forced search still works here
        let t = lipshitz_annihilator(&[c], &gens, 12, true).unwrap();
        assert_eq!(t, WeylOperator::gen(2, Gen::Der(0)));
    }

    #[test]
    fn normal_form_exp_xt() {
        let f = exp_xt();
        let parts = normal_form_annihilator(&[f.clone()], &[1], &[], &[], 12).unwrap();
        assert!(!parts.l.is_zero());
        let mut allowed = BTreeSet::new();
        allowed.insert(Gen::Var(0));
        allowed.insert(Gen::Der(0));
        assert!(parts.l.lies_in(&allowed));
        assert!(parts.n.is_empty());
        let p = parts.total();
        assert!(f.apply_weyl(&p).unwrap().is_zero());
        // the spec's hand instance (t*Dt + 1) + Dx*(-x) also annihilates
        let hand = WeylOperator::gen(2, Gen::Var(0))
            .mul(&WeylOperator::gen(2, Gen::Der(0)))
            .add(&WeylOperator::one(2))
            .add(
                &WeylOperator::gen(2, Gen::Der(1))
                    .mul(&WeylOperator::gen(2, Gen::Var(1)).neg()),
            );
        assert!(f.apply_weyl(&hand).unwrap().is_zero());
    }

    #[test]
    fn normal_form_degenerate_zero() {
        let z = df_from_rational(&RationalFunction::zero(2));
        let parts = normal_form_annihilator(&[z], &[1], &[], &[], 12).unwrap();
        assert_eq!(parts.l, WeylOperator::gen(2, Gen::Der(0)));
        assert!(parts.m.is_empty() && parts.n.is_empty());
    }

    #[test]
    fn compatible_rational_in_t() {
        // f = 1/(t^2 - 1), free of x; J = {1}, V = {} (n = 1)
        let h = RationalFunction::new(
            MultiPoly::one(2),
            MultiPoly::t(2).pow(2).sub(&MultiPoly::one(2)),
        )
        .unwrap();
        let f = df_from_rational(&h);
        let l = compatible_annihilator(&[f.clone()], &[1], &[], 12).unwrap();
        assert!(f.apply_weyl(&l).unwrap().is_zero());
        let mut allowed = BTreeSet::new();
        allowed.insert(Gen::Var(0));
        allowed.insert(Gen::Der(0));
        assert!(l.lies_in(&allowed));
        // oracle: (t^2 - 1) Dt + 2t kills f
        let t = WeylOperator::gen(2, Gen::Var(0));
        let oracle = t
            .pow(2)
            .sub(&WeylOperator::one(2))
            .mul(&WeylOperator::gen(2, Gen::Der(0)))
            .add(&t.scale(&coeff_int(2)));
        assert!(f.apply_weyl(&oracle).unwrap().is_zero());
    }

    #[test]
    fn compatible_x_variable() {
        // f = x1, V = {x1}: the degree-1 hit Dt
        let f = df_from_rational(&RationalFunction::x(2, 1));
        let l = compatible_annihilator(&[f.clone()], &[], &[Gen::Var(1)], 12).unwrap();
        assert_eq!(l, WeylOperator::gen(2, Gen::Der(0)));
    }

    #[test]
    fn compatible_exp_t() {
        // Dt f = f, Dx f = 0
        let at = OreOperator::new(
            2,
            0,
            vec![RationalFunction::one(2).neg(), RationalFunction::one(2)],
        );
        let ax = OreOperator::der_op(2, 1);
        let sys = RectangularSystem::leaf(2, vec![Some(at), Some(ax)], None).unwrap();
        let f = DFiniteElement::generator(sys);
        let l = compatible_annihilator(&[f.clone()], &[1], &[], 12).unwrap();
        let expect = WeylOperator::gen(2, Gen::Der(0)).sub(&WeylOperator::one(2));
        assert_eq!(l, expect);
        // precondition violation when the element does depend on x
        let g = exp_xt();
        assert!(compatible_annihilator(&[g], &[1], &[], 12).is_err());
    }

    #[test]
    fn multiple_inputs_common_annihilator() {
        let f = df_from_rational(&RationalFunction::t(2));
        let g = df_from_rational(
            &RationalFunction::new(MultiPoly::one(2), MultiPoly::t(2)).unwrap(),
        );
        let gens = [Gen::Var(0), Gen::Der(0), Gen::Der(1)];
        let t = lipshitz_annihilator(&[f.clone(), g.clone()], &gens, 12, false).unwrap();
        assert!(f.apply_weyl(&t).unwrap().is_zero());
        assert!(g.apply_weyl(&t).unwrap().is_zero());
    }
}
