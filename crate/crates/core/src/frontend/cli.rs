//! `tele` command line. Exit codes: 0 definite answer, 2 inconclusive
//! within the configured bounds, 1 error.

use clap::{Parser, Subcommand, ValueEnum};
use std::io::Write;

use crate::error::Result;
use crate::ore::{Gen, OreOperator};
use crate::poincare::telescope_closed;
use crate::separability::{
    is_separable, HintedFactorizer, RiccatiFactorizer, SeparabilityConfig,
};

use super::json;
use super::parse::{parse_operator, scan_arity};
use super::{has_telescoper, Status};

#[derive(Parser, Debug)]
#[command(name = "tele", version, about = "telescopers for differential forms", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// degree bound for ansatz and factor searches
    #[arg(long, global = true)]
    bound: Option<u32>,
    /// treat bound-limited negatives as definite
    #[arg(long, global = true)]
    accept_bound_negatives: bool,
    /// file with one right-factor hint per line
    #[arg(long, global = true)]
    hints: Option<String>,
    /// machine-readable output
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// decide and construct a telescoper for an instance file
    Telescope { instance: String },
    /// decide (x,t)-separability of an operator in k(t,x)<Dt>
    Separable { operator: String },
    /// run the exactness recursion on a closed form
    Closed {
        instance: String,
        /// recursion level s (defaults to n)
        #[arg(long)]
        level: Option<usize>,
    },
    /// operator arithmetic on two expressions
    Ops {
        op: OpKind,
        a: String,
        b: String,
    },
    /// re-check a serialized result against its instance
    Verify { instance: String, result: String },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OpKind {
    Mul,
    Rdiv,
    Gcrd,
    Lclm,
    Transform,
}

pub fn run<I, S>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            1
        }
    }
}

fn load_hints(cli: &Cli, arity: usize) -> Result<Vec<OreOperator>> {
    let Some(path) = &cli.hints else {
        return Ok(Vec::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| crate::error::Error::Invalid(format!("{path}: {e}")))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| parse_operator(l, arity))
        .collect()
}

fn config(cli: &Cli, arity: usize) -> Result<SeparabilityConfig> {
    let mut cfg = SeparabilityConfig {
        accept_bound_negatives: cli.accept_bound_negatives,
        hints: load_hints(cli, arity)?,
        ..Default::default()
    };
    if let Some(b) = cli.bound {
        cfg.degree_bound = b;
        cfg.riccati_bound = b;
    }
    Ok(cfg)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.cmd {
        Cmd::Telescope { instance } => {
            let src = std::fs::read_to_string(instance)
                .map_err(|e| crate::error::Error::Invalid(format!("{instance}: {e}")))?;
            let mut inst = json::parse_instance(&src)?;
            if let Some(b) = cli.bound {
                inst.options.bound = Some(b);
            }
            if cli.accept_bound_negatives {
                inst.options.accept_bound_negatives = true;
            }
            inst.options
                .hints
                .extend(load_hints(cli, inst.n + 1)?);
            let r = has_telescoper(&inst)?;
            if cli.json {
                let j = json::result_to_json(&r);
                writeln!(out, "{}", serde_json::to_string_pretty(&j).unwrap()).ok();
            } else {
                match r.status {
                    Status::Telescoper => {
                        writeln!(out, "telescoper: {}", r.l.as_ref().unwrap()).ok();
                    }
                    Status::NoTelescoper => {
                        writeln!(out, "no telescoper").ok();
                    }
                    Status::Unknown => {
                        writeln!(out, "unknown (within bounds)").ok();
                    }
                }
                for note in &r.notes {
                    writeln!(out, "  {note}").ok();
                }
            }
            Ok(if r.status == Status::Unknown { 2 } else { 0 })
        }
        Cmd::Separable { operator } => {
            let arity = scan_arity(&[operator.as_str()])?.max(2);
            let p = parse_operator(operator, arity)?;
            let cfg = config(cli, arity)?;
            let hinted = HintedFactorizer {
                hints: cfg.hints.clone(),
            };
            let v = if cfg.hints.is_empty() {
                is_separable(&p, &RiccatiFactorizer, &cfg)?
            } else {
                is_separable(&p, &hinted, &cfg)?
            };
            let verdict = if v.separable {
                "separable"
            } else {
                "not separable"
            };
            if cli.json {
                writeln!(
                    out,
                    "{}",
                    serde_json::json!({
                        "version": json::FORMAT_VERSION,
                        "separable": v.separable,
                        "definite": v.definite,
                        "witness": v.witness.as_ref().map(|w| format!("{w}")),
                        "notes": v.provenance.notes,
                    })
                )
                .ok();
            } else if v.definite {
                match &v.witness {
                    Some(w) => writeln!(out, "{verdict}: {w}").ok(),
                    None => writeln!(out, "{verdict}").ok(),
                };
            } else {
                writeln!(out, "{verdict} (within bounds)").ok();
            }
            Ok(if v.definite { 0 } else { 2 })
        }
        Cmd::Closed { instance, level } => {
            let src = std::fs::read_to_string(instance)
                .map_err(|e| crate::error::Error::Invalid(format!("{instance}: {e}")))?;
            let inst = json::parse_instance(&src)?;
            let s = level.unwrap_or(inst.n);
            let aux: Vec<Gen> = (s + 1..=inst.n).map(Gen::Var).collect();
            let cert = telescope_closed(&inst.omega, s, &aux)?;
            if cli.json {
                writeln!(
                    out,
                    "{}",
                    serde_json::json!({
                        "version": json::FORMAT_VERSION,
                        "L": format!("{}", cert.op()),
                        "mu": json::form_to_json(cert.witness()),
                        "level": s,
                        "engine_calls": cert.engine_calls(),
                    })
                )
                .ok();
            } else {
                writeln!(out, "L = {}", cert.op()).ok();
                writeln!(out, "engine calls: {}", cert.engine_calls()).ok();
            }
            Ok(0)
        }
        Cmd::Ops { op, a, b } => {
            let arity = scan_arity(&[a.as_str(), b.as_str()])?.max(2);
            let pa = parse_operator(a, arity)?;
            let pb = parse_operator(b, arity)?;
            let lines: Vec<(String, OreOperator)> = match op {
                OpKind::Mul => vec![("result".into(), pa.mul(&pb))],
                OpKind::Rdiv => {
                    let (q, r) = pa.rdiv(&pb)?;
                    vec![("quotient".into(), q), ("remainder".into(), r)]
                }
                OpKind::Gcrd => vec![("result".into(), pa.gcrd(&pb)?)],
                OpKind::Lclm => vec![("result".into(), pa.lclm(&pb)?)],
                OpKind::Transform => vec![("result".into(), pa.transform(&pb)?)],
            };
            if cli.json {
                let m: serde_json::Map<String, serde_json::Value> = lines
                    .iter()
                    .map(|(k, v)| (k.clone(), format!("{v}").into()))
                    .collect();
                writeln!(out, "{}", serde_json::Value::Object(m)).ok();
            } else {
                for (k, v) in &lines {
                    writeln!(out, "{k}: {v}").ok();
                }
            }
            Ok(0)
        }
        Cmd::Verify { instance, result } => {
            let isrc = std::fs::read_to_string(instance)
                .map_err(|e| crate::error::Error::Invalid(format!("{instance}: {e}")))?;
            let rsrc = std::fs::read_to_string(result)
                .map_err(|e| crate::error::Error::Invalid(format!("{result}: {e}")))?;
            let ok = json::verify_serialized(&isrc, &rsrc)?;
            writeln!(out, "{}", if ok { "valid" } else { "invalid" }).ok();
            Ok(0)
        }
    }
}
