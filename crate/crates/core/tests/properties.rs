//! Randomized property suites over small operators and forms.

use proptest::prelude::*;
use telescoper::ansatz::compatible_annihilator;
use telescoper::dfinite::df_from_rational;
use telescoper::forms::DifferentialForm;
use telescoper::ore::{Gen, OreOperator, WeylMonomial, WeylOperator};
use telescoper::poly::{coeff_int, MultiPoly};
use telescoper::rational::{poly_split_decompose, rf_is_semisplit, RationalFunction};

const ARITY: usize = 3; // t, x1, x2

fn small_poly_in(arity: usize) -> impl Strategy<Value = MultiPoly> {
    // up to three terms, exponents <= 2, coefficients in -3..=3
    proptest::collection::vec(
        (proptest::collection::vec(0u32..=2, arity), -3i64..=3),
        1..=3,
    )
    .prop_map(move |terms| {
        let mut p = MultiPoly::zero(arity);
        for (e, c) in terms {
            p.add_term(telescoper::poly::Monomial(e), coeff_int(c));
        }
        p
    })
}

fn small_poly() -> impl Strategy<Value = MultiPoly> {
    small_poly_in(ARITY)
}

fn tiny_poly() -> impl Strategy<Value = MultiPoly> {
    // one or two terms, exponents <= 1
    proptest::collection::vec(
        (proptest::collection::vec(0u32..=1, ARITY), -2i64..=2),
        1..=2,
    )
    .prop_map(|terms| {
        let mut p = MultiPoly::zero(ARITY);
        for (e, c) in terms {
            p.add_term(telescoper::poly::Monomial(e), coeff_int(c));
        }
        p
    })
}

fn biv_poly() -> impl Strategy<Value = MultiPoly> {
    // t and x1 only: keeps the Euclidean coefficient blowup in check
    proptest::collection::vec(
        (proptest::collection::vec(0u32..=1, 2), -2i64..=2),
        1..=2,
    )
    .prop_map(|terms| {
        let mut p = MultiPoly::zero(ARITY);
        for (e, c) in terms {
            let mut m = vec![0u32; ARITY];
            m[..2].copy_from_slice(&e);
            p.add_term(telescoper::poly::Monomial(m), coeff_int(c));
        }
        p
    })
}

fn biv_rational() -> impl Strategy<Value = RationalFunction> {
    (
        biv_poly(),
        biv_poly().prop_filter("nonzero", |p| !p.is_zero()),
    )
        .prop_map(|(n, d)| RationalFunction::new(n, d).expect("nonzero denominator"))
}

fn biv_operator(max_order: usize) -> impl Strategy<Value = OreOperator> {
    proptest::collection::vec(biv_rational(), 1..=max_order + 1)
        .prop_map(|cs| OreOperator::new(ARITY, 0, cs))
        .prop_filter("nonzero", |p| !p.is_zero())
}

fn rational() -> impl Strategy<Value = RationalFunction> {
    (
        tiny_poly(),
        tiny_poly().prop_filter("nonzero", |p| !p.is_zero()),
    )
        .prop_map(|(n, d)| RationalFunction::new(n, d).expect("nonzero denominator"))
}

fn t_only_poly() -> impl Strategy<Value = MultiPoly> {
    proptest::collection::vec(-3i64..=3, 1..=3).prop_map(|cs| {
        let mut p = MultiPoly::zero(ARITY);
        for (e, c) in cs.into_iter().enumerate() {
            let mut m = vec![0u32; ARITY];
            m[0] = e as u32;
            p.add_term(telescoper::poly::Monomial(m), coeff_int(c));
        }
        p
    })
}

fn t_only_rational() -> impl Strategy<Value = RationalFunction> {
    (
        t_only_poly(),
        t_only_poly().prop_filter("nonzero", |p| !p.is_zero()),
    )
        .prop_map(|(n, d)| RationalFunction::new(n, d).expect("nonzero denominator"))
}

fn operator(max_order: usize) -> impl Strategy<Value = OreOperator> {
    proptest::collection::vec(rational(), 1..=max_order + 1)
        .prop_map(|cs| OreOperator::new(ARITY, 0, cs))
        .prop_filter("nonzero", |p| !p.is_zero())
}

fn t_only_operator(max_order: usize) -> impl Strategy<Value = OreOperator> {
    proptest::collection::vec(t_only_rational(), 1..=max_order + 1)
        .prop_map(|cs| OreOperator::new(ARITY, 0, cs))
        .prop_filter("nonzero", |p| !p.is_zero())
}

fn weyl() -> impl Strategy<Value = WeylOperator> {
    // a couple of tiny normal-ordered terms
    proptest::collection::vec(
        (
            proptest::collection::vec(0u32..=1, ARITY),
            proptest::collection::vec(0u32..=1, ARITY),
            -2i64..=2,
        ),
        1..=2,
    )
    .prop_map(|terms| {
        let mut w = WeylOperator::zero(ARITY);
        for (vs, ds, c) in terms {
            let mut m = WeylMonomial::unit(ARITY);
            m.vars.0.copy_from_slice(&vs);
            m.ders.0.copy_from_slice(&ds);
            w.add_term(m, coeff_int(c));
        }
        w
    })
}

/// 1-form with both coefficients over one shared leaf system.
fn one_form() -> impl Strategy<Value = DifferentialForm> {
    (rational(), rational(), rational()).prop_map(|(f, g, h)| {
        let base = df_from_rational(&f);
        DifferentialForm::from_terms(
            ARITY,
            vec![(vec![1], base.mul_rat(&g)), (vec![2], base.mul_rat(&h))],
        )
        .expect("same system")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn weyl_associativity_and_distributivity(a in weyl(), b in weyl(), c in weyl()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
    }

    #[test]
    fn rdiv_contract(a in operator(2), b in operator(2)) {
        let (q, r) = a.rdiv(&b).unwrap();
        prop_assert_eq!(q.mul(&b).add(&r), a.clone());
        prop_assert!(r.is_zero() || r.order().unwrap() < b.order().unwrap());
        // multiples divide exactly
        let (q2, r2) = a.mul(&b).rdiv(&b).unwrap();
        prop_assert!(r2.is_zero());
        prop_assert_eq!(q2, a);
    }

    #[test]
    fn gcrd_lclm_contracts(a in biv_operator(2), b in biv_operator(1)) {
        let g = a.gcrd(&b).unwrap();
        prop_assert!(a.rdiv(&g).unwrap().1.is_zero());
        prop_assert!(b.rdiv(&g).unwrap().1.is_zero());
        let l = a.lclm(&b).unwrap();
        prop_assert!(l.rdiv(&a).unwrap().1.is_zero());
        prop_assert!(l.rdiv(&b).unwrap().1.is_zero());
        // order law: ord g + ord l = ord a + ord b
        prop_assert_eq!(
            g.order().unwrap() + l.order().unwrap(),
            a.order().unwrap() + b.order().unwrap()
        );
    }

    #[test]
    fn transformation_identity(p in biv_operator(2), q in biv_operator(1)) {
        // P~ Q = lambda * lclm(P, Q) for some lambda in K
        let pt = match p.transform(&q) {
            Ok(pt) => pt,
            Err(_) => return Ok(()), // q trivial or degenerate input
        };
        let l = p.lclm(&q).unwrap();
        let prod = pt.mul(&q);
        let (lam, r) = prod.rdiv(&l).unwrap();
        prop_assert!(r.is_zero());
        prop_assert_eq!(lam.order(), Some(0));
    }

    #[test]
    fn d_s_identities(w in one_form()) {
        // d_s . d_s = 0 at every level
        for s in 0..ARITY {
            let d = w.d_s(s).unwrap();
            prop_assert!(d.d_s(s).unwrap().is_zero());
        }
        // d_s(u ^ dx_s) = d_{s-1}(u) ^ dx_s
        let s = 2;
        let lhs = w.wedge_dx(s).d_s(s).unwrap();
        let rhs = w.d_s(s - 1).unwrap().wedge_dx(s);
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero());
        // d_s(u) = d_{s-1}(u) + dx_s ^ Dx_s(u)
        let dxu = w.diff_coeffs(s).unwrap();
        let wedge = dxu.wedge_dx(s).scale_coeff(&coeff_int(-1)); // dx_s ^ eta = -eta ^ dx_s for 1-forms
        let rhs = w.d_s(s - 1).unwrap().add(&wedge).unwrap();
        prop_assert!(w.d_s(s).unwrap().sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn wedge_graded_commutativity(u in one_form(), g in rational()) {
        // 1-forms anticommute; 0-form times 1-form commutes
        let v = u.scale(&g);
        let uv = u.wedge(&v).unwrap();
        let vu = v.wedge(&u).unwrap();
        prop_assert!(uv.add(&vu).unwrap().is_zero());
    }

    #[test]
    fn t_only_operators_commute_with_d_s(w in one_form(), p in t_only_operator(2)) {
        for s in 1..ARITY {
            let lhs = w.apply_ore(&p).unwrap().d_s(s).unwrap();
            let rhs = w.d_s(s).unwrap().apply_ore(&p).unwrap();
            prop_assert!(lhs.sub(&rhs).unwrap().is_zero());
        }
    }

    #[test]
    fn annihilators_annihilate(f in rational()) {
        if f.is_zero() { return Ok(()); }
        let e = df_from_rational(&f);
        let p = e.min_annihilator_t().unwrap();
        prop_assert!(p.order().is_some());
        prop_assert!(e.apply_ore(&p).unwrap().is_zero());
        // support restriction: an annihilator over {t, Dt, Dx1, Dx2}
        // applied through the ansatz engine kills the element and uses
        // only the allowed generators
        let gens = [Gen::Der(1), Gen::Der(2)];
        let l = compatible_annihilator(&[e.clone()], &[], &gens, 12).unwrap();
        let allowed: std::collections::BTreeSet<Gen> =
            [Gen::Var(0), Gen::Der(0), Gen::Der(1), Gen::Der(2)].into();
        prop_assert!(l.lies_in(&allowed));
        prop_assert!(e.apply_weyl(&l).unwrap().is_zero());
    }

    #[test]
    fn split_extraction_is_semisplit(g in t_only_poly(), h in small_poly()) {
        // denominators assembled from a t-part and an x-part stay
        // semisplit, and the decomposition flags them as split
        let mut hx = MultiPoly::zero(ARITY);
        for (m, c) in h.terms() {
            let mut e = m.0.clone();
            e[0] = 0;
            hx.add_term(telescoper::poly::Monomial(e), c.clone());
        }
        if g.is_zero() || hx.is_zero() { return Ok(()); }
        let den = g.mul(&hx);
        let d = poly_split_decompose(&den).unwrap();
        prop_assert!(d.is_split());
        let f = RationalFunction::new(MultiPoly::one(ARITY), den).unwrap();
        prop_assert!(rf_is_semisplit(&f));
        prop_assert!(rf_is_semisplit(&f.add(&RationalFunction::t(ARITY))));
    }

    #[test]
    fn semisplit_product_law(a in t_only_rational()) {
        // P = Q1 Q2 with semisplit monic Q2: P semisplit iff Q1 is
        let q2 = OreOperator::new(
            ARITY,
            0,
            vec![a.clone(), RationalFunction::one(ARITY)],
        );
        prop_assert!(q2.is_semisplit());
        let mixed = RationalFunction::new(
            MultiPoly::one(ARITY),
            MultiPoly::t(ARITY)
                .mul(&MultiPoly::x(ARITY, 1))
                .add(&MultiPoly::one(ARITY)),
        )
        .unwrap();
        let q1_split = OreOperator::new(ARITY, 0, vec![a, RationalFunction::one(ARITY)]);
        prop_assert!(q1_split.mul(&q2).monic().is_semisplit());
        let q1_mixed = OreOperator::new(ARITY, 0, vec![mixed, RationalFunction::one(ARITY)]);
        prop_assert!(!q1_mixed.mul(&q2).monic().is_semisplit());
    }
}

fn tiny_poly_2() -> impl Strategy<Value = MultiPoly> {
    proptest::collection::vec(
        (proptest::collection::vec(0u32..=1, 2), -2i64..=2),
        1..=2,
    )
    .prop_map(|terms| {
        let mut p = MultiPoly::zero(2);
        for (e, c) in terms {
            p.add_term(telescoper::poly::Monomial(e), coeff_int(c));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn positive_verdicts_pass_their_verifiers(
        n in tiny_poly_2(),
        d in tiny_poly_2().prop_filter("nonzero", |p| !p.is_zero()),
    ) {
        use telescoper::frontend::{has_telescoper, verify, PipelineOptions, ProblemInstance, Status};
        // top forms are always closed, so the recursion must succeed
        // and every emitted certificate must verify
        let f = RationalFunction::new(n, d).unwrap();
        if f.is_zero() { return Ok(()); }
        let a = 2;
        let omega = DifferentialForm::from_terms(
            a,
            vec![(vec![1], df_from_rational(&f))],
        )
        .unwrap();
        let inst = ProblemInstance::new(1, omega, PipelineOptions::default()).unwrap();
        let r = has_telescoper(&inst).unwrap();
        prop_assert_eq!(r.status, Status::Telescoper);
        prop_assert!(verify(&inst, &r));
    }
}
