//! Versioned JSON interchange. Operators and coefficients travel as
//! canonical expression strings, so every number stays exact.

use crate::dfinite::{df_from_rational, promote_common, DFiniteElement, RectangularSystem};
use crate::error::{Error, Result};
use crate::forms::DifferentialForm;
use crate::ore::OreOperator;
use crate::rational::RationalFunction;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::rc::Rc;

use super::parse::{parse_operator, parse_rational};
use super::{PipelineOptions, ProblemInstance, Status, TelescoperResult};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct InstanceJson {
    pub version: u32,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemJson>,
    pub form: FormJson,
    #[serde(default)]
    pub options: OptionsJson,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct SystemJson {
    /// one monic operator per derivation, keyed "t", "x1", .., "x9"
    pub ops: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct FormJson {
    pub degree: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct TermJson {
    pub indices: Vec<usize>,
    pub coefficient: CoefficientJson,
}

/// A rational expression, or coordinates on the derivative basis of
/// the declared system.
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum CoefficientJson {
    Expr(String),
    Coords(Vec<String>),
}

#[derive(Serialize, Deserialize, Debug, Clone, Default)]
pub struct OptionsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u32>,
    #[serde(default)]
    pub accept_bound_negatives: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hints: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ResultJson {
    pub version: u32,
    pub status: String,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<FormJson>,
    pub provenance: ProvenanceJson,
}

#[derive(Serialize, Deserialize, Debug, Clone, Default)]
pub struct ProvenanceJson {
    #[serde(default)]
    pub engine_calls: usize,
    #[serde(default)]
    pub notes: Vec<String>,
}

fn der_index(key: &str) -> Result<usize> {
    if key == "t" {
        return Ok(0);
    }
    match key.strip_prefix('x').and_then(|s| s.parse::<usize>().ok()) {
        Some(i) if (1..=9).contains(&i) => Ok(i),
        _ => Err(Error::Json(format!("unknown derivation key `{key}`"))),
    }
}

fn build_system(sys: &SystemJson, arity: usize) -> Result<Rc<RectangularSystem>> {
    let mut ops: Vec<Option<OreOperator>> = vec![None; arity];
    for (key, src) in &sys.ops {
        let d = der_index(key)?;
        if d >= arity {
            return Err(Error::Json(format!("derivation `{key}` exceeds n")));
        }
        ops[d] = Some(parse_operator(src, arity)?.with_der(d));
    }
    RectangularSystem::leaf(arity, ops, None)
}

fn build_coefficient(
    c: &CoefficientJson,
    arity: usize,
    system: Option<&Rc<RectangularSystem>>,
) -> Result<DFiniteElement> {
    match c {
        CoefficientJson::Expr(src) => Ok(df_from_rational(&parse_rational(src, arity)?)),
        CoefficientJson::Coords(coords) => {
            let sys = system.ok_or_else(|| {
                Error::Json("coordinate coefficients need a declared system".into())
            })?;
            if coords.len() != sys.dim() {
                return Err(Error::Json(format!(
                    "coordinate vector has length {}, system dimension is {}",
                    coords.len(),
                    sys.dim()
                )));
            }
            let coords = coords
                .iter()
                .map(|s| parse_rational(s, arity))
                .collect::<Result<Vec<_>>>()?;
            Ok(DFiniteElement::new(Rc::clone(sys), coords))
        }
    }
}

fn build_form(
    form: &FormJson,
    arity: usize,
    system: Option<&Rc<RectangularSystem>>,
) -> Result<DifferentialForm> {
    let mut indices = Vec::new();
    let mut coeffs = Vec::new();
    for term in &form.terms {
        if term.indices.len() != form.degree {
            return Err(Error::Json(format!(
                "term {:?} does not match the declared degree {}",
                term.indices, form.degree
            )));
        }
        indices.push(term.indices.clone());
        coeffs.push(build_coefficient(&term.coefficient, arity, system)?);
    }
    let coeffs = promote_common(&coeffs)?;
    DifferentialForm::from_terms(arity, indices.into_iter().zip(coeffs).collect::<Vec<_>>())
}

pub fn instance_from_json(j: &InstanceJson) -> Result<ProblemInstance> {
    if j.version != FORMAT_VERSION {
        return Err(Error::Json(format!(
            "unsupported format version {}",
            j.version
        )));
    }
    let arity = j.n + 1;
    let system = j
        .system
        .as_ref()
        .map(|s| build_system(s, arity))
        .transpose()?;
    let omega = build_form(&j.form, arity, system.as_ref())?;
    let hints = j
        .options
        .hints
        .iter()
        .map(|s| parse_operator(s, arity))
        .collect::<Result<Vec<_>>>()?;
    ProblemInstance::new(
        j.n,
        omega,
        PipelineOptions {
            bound: j.options.bound,
            accept_bound_negatives: j.options.accept_bound_negatives,
            hints,
        },
    )
}

pub fn parse_instance(src: &str) -> Result<ProblemInstance> {
    let j: InstanceJson =
        serde_json::from_str(src).map_err(|e| Error::Json(e.to_string()))?;
    instance_from_json(&j)
}

fn coefficient_to_json(c: &DFiniteElement) -> CoefficientJson {
    match c.to_rational() {
        Some(f) => CoefficientJson::Expr(format!("{f}")),
        None => CoefficientJson::Coords(
            c.coords().iter().map(|f| format!("{f}")).collect(),
        ),
    }
}

pub fn form_to_json(form: &DifferentialForm) -> FormJson {
    FormJson {
        degree: form.degree().unwrap_or(0),
        terms: form
            .terms()
            .map(|(idx, c)| TermJson {
                indices: idx.clone(),
                coefficient: coefficient_to_json(c),
            })
            .collect(),
    }
}

pub fn result_to_json(r: &TelescoperResult) -> ResultJson {
    ResultJson {
        version: FORMAT_VERSION,
        status: match r.status {
            Status::Telescoper => "telescoper",
            Status::NoTelescoper => "no-telescoper",
            Status::Unknown => "unknown",
        }
        .into(),
        l: r.l.as_ref().map(|l| format!("{l}")),
        mu: r.monic_witness().as_ref().map(form_to_json),
        provenance: ProvenanceJson {
            engine_calls: r.certificate.as_ref().map_or(0, |c| c.engine_calls()),
            notes: r.notes.clone(),
        },
    }
}

/// Independent re-check of a serialized positive result against its
/// instance: L nonzero and free of x, and L(omega) = d_n(mu) exactly.
pub fn verify_serialized(inst_src: &str, result_src: &str) -> Result<bool> {
    let ij: InstanceJson =
        serde_json::from_str(inst_src).map_err(|e| Error::Json(e.to_string()))?;
    let rj: ResultJson =
        serde_json::from_str(result_src).map_err(|e| Error::Json(e.to_string()))?;
    if rj.status != "telescoper" {
        return Ok(false);
    }
    let (Some(l_src), Some(mu_json)) = (&rj.l, &rj.mu) else {
        return Ok(false);
    };
    let arity = ij.n + 1;
    let system = ij
        .system
        .as_ref()
        .map(|s| build_system(s, arity))
        .transpose()?;
    let l = parse_operator(l_src, arity)?;
    if l.is_zero() || !l.coeffs().iter().all(RationalFunction::is_t_only) {
        return Ok(false);
    }

    let omega = build_form(&ij.form, arity, system.as_ref())?;
    let mu = build_form(mu_json, arity, system.as_ref())?;
    let lhs = omega.apply_ore(&l)?;
    let rhs = mu.d_s(ij.n)?;
    forms_equal(&lhs, &rhs)
}

/// Equality of two forms whose coefficients may live over unrelated
/// systems: rational values are compared directly, everything else by
/// structural subtraction over a common promotion.
fn forms_equal(a: &DifferentialForm, b: &DifferentialForm) -> Result<bool> {
    let idx: std::collections::BTreeSet<Vec<usize>> = a
        .terms()
        .map(|(i, _)| i.clone())
        .chain(b.terms().map(|(i, _)| i.clone()))
        .collect();
    for i in &idx {
        let (ca, cb) = (a.coeff(i), b.coeff(i));
        let equal = match (ca, cb) {
            (None, None) => true,
            (Some(c), None) | (None, Some(c)) => c.is_zero(),
            (Some(c1), Some(c2)) => match (c1.to_rational(), c2.to_rational()) {
                (Some(r1), Some(r2)) => r1 == r2,
                _ => {
                    let p = promote_common(&[c1.clone(), c2.clone()])?;
                    p[0].sub(&p[1])?.is_zero()
                }
            },
        };
        if !equal {
            return Ok(false);
        }
    }
    Ok(true)
}
