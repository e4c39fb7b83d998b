//! End-to-end pipeline: telescoper existence and construction for
//! arbitrary p-forms, plus parsers, JSON interchange and the CLI.
//!
//! The reduction: a telescoper for omega exists iff either d_n(omega)
//! vanishes (then the exactness recursion applies directly) or every
//! coefficient of d_n(omega) admits an annihilator in k(t)<Dt>. The
//! latter is the separability question for the minimal t-annihilators;
//! the lclm of the witnesses closes the form and the recursion finishes
//! the job.

pub mod cli;
pub mod json;
pub mod parse;

use crate::error::{Error, Result};
use crate::forms::DifferentialForm;
use crate::ore::{Gen, OreOperator, WeylOperator};
use crate::poincare::{telescope_closed, Certificate};
use crate::rational::RationalFunction;
use crate::separability::{
    is_separable, HintedFactorizer, RiccatiFactorizer, SeparabilityConfig,
};

#[derive(Clone, Debug, Default)]
pub struct PipelineOptions {
    /// overrides both the ansatz degree bound and the Riccati bound
    pub bound: Option<u32>,
    pub accept_bound_negatives: bool,
    pub hints: Vec<OreOperator>,
}

#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub n: usize,
    pub omega: DifferentialForm,
    pub options: PipelineOptions,
}

impl ProblemInstance {
    pub fn new(n: usize, omega: DifferentialForm, options: PipelineOptions) -> Result<Self> {
        if omega.arity() != n + 1 {
            return Err(Error::Invalid(format!(
                "form has arity {}, expected n + 1 = {}",
                omega.arity(),
                n + 1
            )));
        }
        Ok(ProblemInstance { n, omega, options })
    }

    fn config(&self) -> SeparabilityConfig {
        let mut cfg = SeparabilityConfig {
            accept_bound_negatives: self.options.accept_bound_negatives,
            hints: self.options.hints.clone(),
            ..Default::default()
        };
        if let Some(b) = self.options.bound {
            cfg.degree_bound = b;
            cfg.riccati_bound = b;
        }
        cfg
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Telescoper,
    NoTelescoper,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct TelescoperResult {
    pub status: Status,
    /// monic element of k(t)<Dt>, present iff status is Telescoper
    pub l: Option<OreOperator>,
    /// exactness certificate for L applied to the input form
    pub certificate: Option<Certificate>,
    pub notes: Vec<String>,
}

/// Clears t-denominators: c(t) * L has coefficients in k[t], and left
/// multiplication by c(t) commutes with every d_s, so the witness just
/// picks up the same factor.
fn weyl_of_t_operator(l: &OreOperator) -> Result<(WeylOperator, RationalFunction)> {
    let arity = l.coeff(0).arity();
    let mut den = crate::poly::MultiPoly::one(arity);
    for c in l.coeffs() {
        if !c.is_t_only() {
            return Err(Error::Invalid("operator is not free of x".into()));
        }
        den = crate::poly::lcm(&den, c.denominator());
    }
    let scale = RationalFunction::from_poly(den);
    let dt = WeylOperator::gen(arity, Gen::Der(l.der()));
    let mut w = WeylOperator::zero(arity);
    for (i, c) in l.coeffs().iter().enumerate() {
        let p = c.mul(&scale);
        debug_assert!(p.denominator().is_constant());
        let lead = p
            .denominator()
            .constant_value()
            .ok_or(Error::InexactDivision)?;
        let poly = p.numerator().scale(&(crate::poly::coeff_int(1) / lead));
        if !poly.is_zero() {
            w = w.add(&WeylOperator::from_poly(&poly).mul(&dt.pow(i as u32)));
        }
    }
    Ok((w, scale))
}

/// Rebuilds a certificate for the monic operator `l` against the
/// original form. `inner` certifies W(eta) = d(mu) where eta is the
/// form l was derived from; l differs from W by the t-leading
/// coefficient, and clearing l's denominators scales the witness.
fn repackage(
    l: &OreOperator,
    inner: &Certificate,
    omega: &DifferentialForm,
    n: usize,
) -> Result<Certificate> {
    let (w, scale) = weyl_of_t_operator(l)?;
    let lead = inner.op().to_ore()?.lc().ok_or(Error::ZeroInput)?.clone();
    let witness = inner.witness().scale(&scale.div(&lead)?);
    Certificate::new(w, witness, n, inner.engine_calls(), omega)
}

impl TelescoperResult {
    /// Witness matching the monic presentation: L(omega) = d_n(mu).
    /// The stored certificate clears L's denominators, so its witness
    /// carries that extra t-factor.
    pub fn monic_witness(&self) -> Option<DifferentialForm> {
        let (l, cert) = (self.l.as_ref()?, self.certificate.as_ref()?);
        let (_, scale) = weyl_of_t_operator(l).ok()?;
        Some(cert.witness().scale(&scale.inv().ok()?))
    }
}

/// Decides telescoper existence and, in the positive case, constructs
/// a monic L in k(t)<Dt> with a verified exactness certificate.
pub fn has_telescoper(inst: &ProblemInstance) -> Result<TelescoperResult> {
    let n = inst.n;
    let omega = &inst.omega;
    let mut notes = Vec::new();
    let d = omega.d_s(n)?;
    if d.is_zero() {
        notes.push("d(omega) = 0: exactness recursion applied directly".into());
        let inner = telescope_closed(omega, n, &[])?;
        let l = inner
            .presented()
            .ok_or_else(|| Error::Invalid("recursion returned an operator outside k(t)<Dt>".into()))?;
        let cert = repackage(&l, &inner, omega, n)?;
        return Ok(TelescoperResult {
            status: Status::Telescoper,
            l: Some(l),
            certificate: Some(cert),
            notes,
        });
    }

    // separability route: each coefficient of d(omega) needs an
    // annihilator in k(t)<Dt>
    let cfg = inst.config();
    let riccati = RiccatiFactorizer;
    let hinted;
    let factorizer: &dyn crate::separability::Factorizer = if cfg.hints.is_empty() {
        &riccati
    } else {
        hinted = HintedFactorizer {
            hints: cfg.hints.clone(),
        };
        &hinted
    };
    let mut l0: Option<OreOperator> = None;
    let mut unknown = false;
    for (idx, a) in d.coefficients().iter().enumerate() {
        // caveat: minimality is relative to the generic solution of the
        // declared system
        let p = a.min_annihilator_t()?;
        let verdict = is_separable(&p, factorizer, &cfg)?;
        notes.push(format!(
            "coefficient #{idx}: annihilator order {:?}, separable = {}{}",
            p.order(),
            verdict.separable,
            if verdict.definite { "" } else { " (within bounds)" }
        ));
        notes.extend(verdict.provenance.notes.iter().cloned());
        if !verdict.separable {
            if verdict.definite {
                return Ok(TelescoperResult {
                    status: Status::NoTelescoper,
                    l: None,
                    certificate: None,
                    notes,
                });
            }
            unknown = true;
            continue;
        }
        let w = verdict.witness.expect("positive verdict carries L");
        l0 = Some(match l0 {
            None => w,
            Some(acc) => acc.lclm(&w)?,
        });
    }
    if unknown {
        return Ok(TelescoperResult {
            status: Status::Unknown,
            l: None,
            certificate: None,
            notes,
        });
    }
    let l0 = l0.expect("d(omega) != 0 has a coefficient").monic();
    let closed = omega.apply_ore(&l0)?;
    if !closed.d_s(n)?.is_zero() {
        return Err(Error::Invalid(
            "internal: lclm of witnesses failed to close the form".into(),
        ));
    }
    notes.push(format!("closing operator of order {:?}", l0.order()));
    let cert1 = telescope_closed(&closed, n, &[])?;
    let l1 = cert1
        .presented()
        .ok_or_else(|| Error::Invalid("recursion returned an operator outside k(t)<Dt>".into()))?;
    let l = l1.mul(&l0); // monic times monic stays monic
    let cert = repackage(&l, &cert1, omega, n)?;
    Ok(TelescoperResult {
        status: Status::Telescoper,
        l: Some(l),
        certificate: Some(cert),
        notes,
    })
}

/// Re-checks a positive result end to end: nonzero L, coefficients
/// free of x, and the certificate identity L(omega) = d_n(mu).
pub fn verify(inst: &ProblemInstance, result: &TelescoperResult) -> bool {
    if result.status != Status::Telescoper {
        return false;
    }
    let (Some(l), Some(cert)) = (&result.l, &result.certificate) else {
        return false;
    };
    if l.is_zero() || !l.coeffs().iter().all(RationalFunction::is_t_only) {
        return false;
    }
    if cert.level() != inst.n {
        return false;
    }
    cert.verify(&inst.omega)
}
