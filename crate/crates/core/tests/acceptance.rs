//! Acceptance gate: one test per criterion, each printing a pass line
//! (run with `--nocapture` to see them).  Failures surface as ordinary
//! test failures.

use telescoper::dfinite::df_from_rational;
use telescoper::forms::DifferentialForm;
use telescoper::frontend::parse::parse_operator;
use telescoper::frontend::{has_telescoper, verify, PipelineOptions, ProblemInstance, Status};
use telescoper::ore::{Gen, OreOperator, WeylOperator};
use telescoper::poincare::telescope_closed;
use telescoper::poly::{coeff_int, coeff_ratio, MultiPoly};
use telescoper::rational::RationalFunction;
use telescoper::separability::{is_separable, RiccatiFactorizer, SeparabilityConfig};

fn falling(n: i64, k: u32) -> i64 {
    (0..k as i64).map(|j| n - j).product()
}

fn binom(n: u32, k: u32) -> i64 {
    falling(n as i64, k) / (1..=k as i64).product::<i64>().max(1)
}

/// 1. Normal ordering reproduces the falling-factorial commutation laws
///    for all exponents up to 5.
#[test]
fn criterion_1_commutation_laws() {
    let a = 2usize; // t, x
    let x = WeylOperator::gen(a, Gen::Var(1));
    let dx = WeylOperator::gen(a, Gen::Der(1));
    for mu in 0u32..=5 {
        for nu in 0u32..=5 {
            // Dx^mu x^nu = nu(nu-1)...(nu-mu+1) x^(nu-mu) + (...)Dx
            let nf = dx.pow(mu).mul(&x.pow(nu));
            let mut free = WeylOperator::zero(a);
            for (m, c) in nf.terms() {
                if m.ders.0.iter().all(|&e| e == 0) {
                    free.add_term(m.clone(), c.clone());
                }
            }
            let expected = if nu >= mu {
                x.pow(nu - mu).scale(&coeff_int(falling(nu as i64, mu)))
            } else {
                WeylOperator::zero(a)
            };
            assert_eq!(free, expected, "Dx^{mu} x^{nu} leading term");

            // x^mu Dx^nu = (-1)^nu mu(mu-1)...(mu-nu+1) x^(mu-nu) + Dx (...)
            // with the cofactor written out explicitly
            let lhs = x.pow(mu).mul(&dx.pow(nu));
            let mut rhs = if mu >= nu {
                let sign = if nu % 2 == 0 { 1 } else { -1 };
                x.pow(mu - nu).scale(&coeff_int(sign * falling(mu as i64, nu)))
            } else {
                WeylOperator::zero(a)
            };
            let mut cof = WeylOperator::zero(a);
            for k in 0..nu {
                if k > mu {
                    break;
                }
                let sign = if k % 2 == 0 { 1 } else { -1 };
                let c = coeff_int(sign * binom(nu, k) * falling(mu as i64, k));
                cof = cof.add(&dx.pow(nu - 1 - k).mul(&x.pow(mu - k)).scale(&c));
            }
            rhs = rhs.add(&dx.mul(&cof));
            assert_eq!(lhs, rhs, "x^{mu} Dx^{nu} decomposition");
        }
    }
    println!("criterion 1 (commutation laws): pass");
}

/// 2. Operator product Dt^2 = (Dt + x/(xt+1)) (Dt - x/(xt+1)) and
///    right division recovering the cofactor.
#[test]
fn criterion_2_product_and_division() {
    let a = 2;
    let left = parse_operator("Dt + x1/(x1*t + 1)", a).unwrap();
    let right = parse_operator("Dt - x1/(x1*t + 1)", a).unwrap();
    let dt2 = parse_operator("Dt^2", a).unwrap();
    assert_eq!(left.mul(&right), dt2);
    let (q, r) = dt2.rdiv(&right).unwrap();
    assert!(r.is_zero());
    assert_eq!(q, left);
    println!("criterion 2 (product and division): pass");
}

fn two_log_operator() -> OreOperator {
    // Dt^2 + rho Dt with rho = ((t-1)^2 x1 + (t+1)^2 x2)
    //                           / ((t^2-1)((t-1)x1 + (t+1)x2))
    parse_operator(
        "Dt^2 + (((t-1)^2*x1 + (t+1)^2*x2)/((t^2-1)*((t-1)*x1 + (t+1)*x2)))*Dt",
        3,
    )
    .unwrap()
}

/// 3. Separability fixtures: a definite negative and a positive whose
///    witness is confirmed by remainder-zero right division.
#[test]
fn criterion_3_separability_fixtures() {
    let cfg = SeparabilityConfig::default();

    let neg = parse_operator("Dt + x1/(x1*t + 1)", 2).unwrap();
    let v = is_separable(&neg, &RiccatiFactorizer, &cfg).unwrap();
    assert!(!v.separable);
    assert!(v.definite, "negative must not depend on the bounds");

    let p = two_log_operator();
    let v = is_separable(&p, &RiccatiFactorizer, &cfg).unwrap();
    assert!(v.separable, "notes: {:?}", v.provenance.notes);
    assert!(v.definite);
    let l = v.witness.unwrap();
    assert!(l.coeffs().iter().all(RationalFunction::is_t_only));
    let (_, r) = l.rdiv(&p.monic()).unwrap();
    assert!(r.is_zero());
    println!("criterion 3 (separability fixtures): pass");
}

/// 4. End-to-end telescoper for omega = dx/(xt+1), n = 1; the hand
///    oracle t Dt + 1 right-divides the returned operator.
#[test]
fn criterion_4_one_form_pipeline() {
    let a = 2;
    let f = RationalFunction::new(
        MultiPoly::one(a),
        MultiPoly::x(a, 1).mul(&MultiPoly::t(a)).add(&MultiPoly::one(a)),
    )
    .unwrap();
    let omega = DifferentialForm::from_terms(a, vec![(vec![1], df_from_rational(&f))]).unwrap();
    let inst = ProblemInstance::new(1, omega, PipelineOptions::default()).unwrap();
    let r = has_telescoper(&inst).unwrap();
    assert_eq!(r.status, Status::Telescoper);
    assert!(verify(&inst, &r));
    let oracle = parse_operator("t*Dt + 1", a).unwrap().monic();
    let (_, rem) = r.l.unwrap().rdiv(&oracle).unwrap();
    assert!(rem.is_zero());
    println!("criterion 4 (1-form pipeline): pass");
}

/// Quintic family: W = (x1^5+...+x5^5)/5 - t x1 x2 x3 x4 x5 and the
/// alternating (n-1)-form with coefficients x_i / W.
fn quintic_form() -> DifferentialForm {
    let a = 6usize;
    let mut w = MultiPoly::zero(a);
    let mut prod = MultiPoly::t(a);
    for i in 1..=5 {
        w = w.add(&MultiPoly::x(a, i).pow(5));
        prod = prod.mul(&MultiPoly::x(a, i));
    }
    let w = w.scale(&coeff_ratio(1, 5)).sub(&prod);
    let invw = df_from_rational(&RationalFunction::from_poly(w).inv().unwrap());
    let mut terms = Vec::new();
    for i in 1..=5usize {
        let idx: Vec<usize> = (1..=5).filter(|&j| j != i).collect();
        let mut c = invw.mul_rat(&RationalFunction::x(a, i));
        if i % 2 == 0 {
            c = c.neg();
        }
        terms.push((idx, c));
    }
    DifferentialForm::from_terms(a, terms).unwrap()
}

/// 5. The quintic form is d_5-closed, symbolically.
#[test]
fn criterion_5_quintic_closedness() {
    let omega = quintic_form();
    assert!(omega.d_s(5).unwrap().is_zero());
    println!("criterion 5 (quintic closedness): pass");
}

/// 6 (mandatory part). Trivariate Euler-type surrogate: a verified
/// certificate for the closed 2-form with W3 = (x1^3+x2^3+x3^3)/3
/// - t x1 x2 x3.
#[test]
fn criterion_6_trivariate_telescoper() {
    let a = 4usize;
    let mut w = MultiPoly::zero(a);
    let mut prod = MultiPoly::t(a);
    for i in 1..=3 {
        w = w.add(&MultiPoly::x(a, i).pow(3));
        prod = prod.mul(&MultiPoly::x(a, i));
    }
    let w = w.scale(&coeff_ratio(1, 3)).sub(&prod);
    let invw = df_from_rational(&RationalFunction::from_poly(w).inv().unwrap());
    let mut terms = Vec::new();
    for i in 1..=3usize {
        let idx: Vec<usize> = (1..=3).filter(|&j| j != i).collect();
        let mut c = invw.mul_rat(&RationalFunction::x(a, i));
        if i % 2 == 0 {
            c = c.neg();
        }
        terms.push((idx, c));
    }
    let omega = DifferentialForm::from_terms(a, terms).unwrap();
    assert!(omega.d_s(3).unwrap().is_zero());
    let cert = telescope_closed(&omega, 3, &[]).unwrap();
    assert!(cert.verify(&omega));
    assert!(cert.presented().is_some(), "operator lies in k(t)<Dt>");
    println!("criterion 6 (trivariate telescoper): pass");
}

/// 6 (stretch). The quintic itself; the classical fourth-order
/// operator (1-t^5) Dt^4 - 10 t^4 Dt^3 - 25 t^3 Dt^2 - 15 t^2 Dt - 1
/// must right-divide the monic-normalized result.
#[test]
#[ignore = "stretch goal: may run for hours"]
fn criterion_6_stretch_quintic_telescoper() {
    let omega = quintic_form();
    let cert = telescope_closed(&omega, 5, &[]).unwrap();
    assert!(cert.verify(&omega));
    let l = cert.presented().unwrap().monic();
    let oracle = parse_operator(
        "(1 - t^5)*Dt^4 - 10*t^4*Dt^3 - 25*t^3*Dt^2 - 15*t^2*Dt - 1",
        6,
    )
    .unwrap()
    .monic();
    let (_, r) = l.rdiv(&oracle).unwrap();
    assert!(r.is_zero());
    println!("criterion 6 stretch (quintic telescoper): pass");
}

/// 7. The randomized suites (>= 200 cases each) live in
///    tests/properties.rs and run under `cargo test`; here a fixed
///    deterministic instance of each contract is spot-checked.
#[test]
fn criterion_7_property_suites_spot_checks() {
    let a = 3;
    let p = parse_operator("Dt^2 + x1*Dt + t", a).unwrap();
    let q = parse_operator("(t + x2)*Dt + 1", a).unwrap();
    let (qq, r) = p.rdiv(&q).unwrap();
    assert_eq!(qq.mul(&q).add(&r), p);
    assert!(r.order().unwrap() < q.order().unwrap());
    let g = p.gcrd(&q).unwrap();
    let l = p.lclm(&q).unwrap();
    assert!(l.rdiv(&p).unwrap().1.is_zero());
    assert!(l.rdiv(&q).unwrap().1.is_zero());
    assert_eq!(
        g.order().unwrap() + l.order().unwrap(),
        p.order().unwrap() + q.order().unwrap()
    );
    let pt = p.transform(&q).unwrap();
    let (lam, rr) = pt.mul(&q).rdiv(&l).unwrap();
    assert!(rr.is_zero());
    assert_eq!(lam.order(), Some(0));

    // d_s . d_s = 0 on a mixed 1-form
    let f = RationalFunction::new(
        MultiPoly::one(a),
        MultiPoly::t(a).mul(&MultiPoly::x(a, 1)).add(&MultiPoly::x(a, 2)).add(&MultiPoly::one(a)),
    )
    .unwrap();
    let u = DifferentialForm::from_terms(a, vec![(vec![1], df_from_rational(&f))]).unwrap();
    for s in 0..a {
        assert!(u.d_s(s).unwrap().d_s(s).unwrap().is_zero());
    }
    println!("criterion 7 (property suites; randomized runs in tests/properties.rs): pass");
}
