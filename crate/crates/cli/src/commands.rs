//! Command handlers shared by the CLI surface and session replay.

use serde_json::Value;

use ultraprod::fol::{los_verdict, transfer_report, truth_set, EvalOptions};
use ultraprod::index_filters::{classify, DefinableSet};
use ultraprod::proto::{FiltrationDescriptor, Membership};
use ultraprod::structures::StructureFamily;
use ultraprod::ultra::{UltraElement, UltraInt, UltraNat};
use ultraprod::{Error, Result};

use crate::exprs::{parse_elem, parse_filter, parse_sequence, ElemExpr};
use crate::report::{
    ordering_str, transfer_json, ClassifyReport, ElemReport, EvalReport, MembershipJson,
    ProtoReport, ResidueJson, SCHEMA,
};

pub struct Ctx {
    pub window: u64,
    pub assumes: Vec<DefinableSet>,
    pub opts: EvalOptions,
}

impl Ctx {
    pub fn new(window: u64, assume_texts: &[String]) -> Result<Self> {
        let mut assumes = Vec::new();
        for text in assume_texts {
            assumes.push(DefinableSet::parse(text)?);
        }
        Ok(Ctx {
            window,
            assumes,
            opts: EvalOptions::default(),
        })
    }
}

pub fn cmd_eval(ctx: &Ctx, family: &str, formula: &str, filter: &str, bitmap: bool) -> Result<EvalReport> {
    let fam = StructureFamily::parse(family)?;
    let sentence = ultraprod::fol::parse_sentence(formula)?;
    let f = parse_filter(filter, &ctx.assumes)?;
    let verdict = los_verdict(&fam, &sentence, &f, ctx.window, &ctx.opts)?;
    let (exact_set, samples) = if bitmap {
        let ts = truth_set(&fam, &sentence, ctx.window, &ctx.opts)?;
        (ts.exact.as_ref().map(|s| s.to_string()), Some(ts.samples))
    } else {
        (None, None)
    };
    Ok(EvalReport {
        schema: SCHEMA,
        command: "eval",
        family: fam.to_string(),
        formula: sentence.to_string(),
        filter: f.to_string(),
        window: ctx.window,
        verdict: (&verdict).into(),
        exact_set,
        bitmap: samples,
    })
}

pub fn cmd_classify(ctx: &Ctx, set: &str, filter: &str) -> Result<ClassifyReport> {
    let s = DefinableSet::parse(set)?;
    let f = parse_filter(filter, &ctx.assumes)?;
    let verdict = classify(&s, &f)?;
    Ok(ClassifyReport {
        schema: SCHEMA,
        command: "classify",
        set: s.to_string(),
        filter: f.to_string(),
        verdict: (&verdict).into(),
    })
}

pub fn cmd_elem(ctx: &Ctx, expr_text: &str) -> Result<ElemReport> {
    let expr = parse_elem(expr_text)?;
    let mut report = ElemReport {
        schema: SCHEMA,
        command: "elem",
        expression: expr_text.trim().to_string(),
        verdict: None,
        element: None,
        witness: None,
        ordering: None,
        constant: None,
        residues: None,
    };
    match expr {
        ElemExpr::Eq { left, right, family, filter } => {
            let fam = StructureFamily::parse(&family)?;
            let f = parse_filter(&filter, &ctx.assumes)?;
            let a = UltraElement::new(fam.clone(), left);
            let b = UltraElement::new(fam, right);
            let v = a.eq(&b, &f)?;
            report.verdict = Some((&v).into());
        }
        ElemExpr::Inv { rule, family, filter } => {
            let fam = StructureFamily::parse(&family)?;
            let f = parse_filter(&filter, &ctx.assumes)?;
            let e = UltraElement::new(fam, rule);
            let inv = e.is_invertible(&f)?;
            report.verdict = Some((&inv.verdict).into());
            report.witness = inv.witness.map(|w| w.to_string());
        }
        ElemExpr::Residue { rule, modulus } => {
            let r = UltraInt::new(rule).residue(modulus)?;
            report.residues = Some(ResidueJson::from(&r));
        }
        ElemExpr::Compare { left, right } => {
            let a = UltraNat::new(left)?;
            let b = UltraNat::new(right)?;
            report.ordering = Some(ordering_str(a.compare(&b)).to_string());
        }
        ElemExpr::Const { rule } => {
            let n = UltraNat::new(rule)?;
            report.constant = Some(match n.constant_detect() {
                Some(c) => format!("Some({c})"),
                None => "NotConstant".to_string(),
            });
        }
        ElemExpr::Arith { op, left, right, family } => {
            let fam = StructureFamily::parse(&family)?;
            let a = UltraElement::new(fam.clone(), left);
            let result = match (op.as_str(), right) {
                ("add", Some(r)) => a.add(&UltraElement::new(fam, r))?,
                ("mul", Some(r)) => a.mul(&UltraElement::new(fam, r))?,
                ("sub", Some(r)) => a.sub(&UltraElement::new(fam, r))?,
                ("neg", None) => a.neg(),
                _ => unreachable!("parser guarantees arity"),
            };
            report.element = Some(result.to_string());
        }
    }
    Ok(report)
}

pub fn cmd_proto_check(input: &str) -> Result<ProtoReport> {
    let parsed = parse_sequence(input)?;
    let deg = parsed.sequence.membership_check(&FiltrationDescriptor::degree());
    let cnt = parsed
        .sequence
        .membership_check(&FiltrationDescriptor::monomial_count());
    Ok(ProtoReport {
        schema: SCHEMA,
        command: "proto-check",
        input: input.trim().to_string(),
        memberships: Some(vec![
            MembershipJson::new("deg", &deg),
            MembershipJson::new("count", &cnt),
        ]),
        result: None,
        step: None,
    })
}

pub fn cmd_proto_collapse(input: &str) -> Result<ProtoReport> {
    let parsed = parse_sequence(input)?;
    let poly = parsed.sequence.degree_collapse()?;
    if let Some((filt, limit)) = parsed.constraint {
        let m = parsed.sequence.membership_check(&filt);
        match m {
            Membership::Accepted { step } if step <= limit => {}
            Membership::Accepted { step } => {
                return Err(Error::RejectedSequence {
                    reason: format!("sequence lies in step {step}, above the declared {limit}"),
                })
            }
            Membership::Rejected { reason } => {
                return Err(Error::RejectedSequence { reason })
            }
        }
    }
    let step = poly.bound();
    Ok(ProtoReport {
        schema: SCHEMA,
        command: "proto-collapse",
        input: input.trim().to_string(),
        memberships: None,
        result: Some(poly.to_string()),
        step: Some(step),
    })
}

pub fn cmd_proto_mul(a: &str, b: &str) -> Result<ProtoReport> {
    let pa = parse_sequence(a)?.sequence.degree_collapse()?;
    let pb = parse_sequence(b)?.sequence.degree_collapse()?;
    let prod = pa.mul(&pb);
    Ok(ProtoReport {
        schema: SCHEMA,
        command: "proto-mul",
        input: format!("({}) * ({})", a.trim(), b.trim()),
        memberships: None,
        result: Some(prod.to_string()),
        step: Some(prod.bound()),
    })
}

pub fn cmd_proto_mono_mul(a: &str, b: &str) -> Result<ProtoReport> {
    let ma = parse_sequence(a)?.sequence.monomial_collapse()?;
    let mb = parse_sequence(b)?.sequence.monomial_collapse()?;
    let prod = ma.mul(&mb)?;
    Ok(ProtoReport {
        schema: SCHEMA,
        command: "proto-mono-mul",
        input: format!("({}) * ({})", a.trim(), b.trim()),
        memberships: None,
        result: Some(prod.to_string()),
        step: Some(prod.bound()),
    })
}

pub fn cmd_transfer(
    ctx: &Ctx,
    family_a: &str,
    family_b: &str,
    formula: &str,
) -> Result<crate::report::TransferJson> {
    let fa = StructureFamily::parse(family_a)?;
    let fb = StructureFamily::parse(family_b)?;
    let sentence = ultraprod::fol::parse_sentence(formula)?;
    let report = transfer_report(&fa, &fb, &sentence, ctx.window, &ctx.opts)?;
    Ok(transfer_json(
        &report,
        fa.to_string(),
        fb.to_string(),
        sentence.to_string(),
    ))
}

/// Execute a session command given as an argv array; used by `session`
/// files. Returns the JSON value and the text rendering of the report.
pub fn dispatch(ctx: &Ctx, argv: &[String]) -> Result<(Value, String)> {
    let arg = |i: usize| -> Result<&str> {
        argv.get(i).map(String::as_str).ok_or_else(|| Error::Unsupported {
            msg: format!("command `{}` is missing argument {i}", argv.join(" ")),
        })
    };
    fn pack<T: serde::Serialize>(report: T, text: String) -> Result<(Value, String)> {
        let value = serde_json::to_value(&report).map_err(|e| Error::Unsupported {
            msg: format!("serialization failure: {e}"),
        })?;
        Ok((value, text))
    }
    match arg(0)? {
        "eval" => {
            let bitmap = argv.iter().any(|a| a == "--bitmap");
            let r = cmd_eval(ctx, arg(1)?, arg(2)?, arg(3)?, bitmap)?;
            let text = r.text();
            pack(r, text)
        }
        "classify" => {
            let r = cmd_classify(ctx, arg(1)?, arg(2)?)?;
            let text = r.text();
            pack(r, text)
        }
        "elem" => {
            let r = cmd_elem(ctx, arg(1)?)?;
            let text = r.text();
            pack(r, text)
        }
        "transfer" => {
            let r = cmd_transfer(ctx, arg(1)?, arg(2)?, arg(3)?)?;
            let text = r.text();
            pack(r, text)
        }
        "proto-check" => {
            let r = cmd_proto_check(arg(1)?)?;
            let text = r.text();
            pack(r, text)
        }
        "proto-collapse" => {
            let r = cmd_proto_collapse(arg(1)?)?;
            let text = r.text();
            pack(r, text)
        }
        "proto-mul" => {
            let r = cmd_proto_mul(arg(1)?, arg(2)?)?;
            let text = r.text();
            pack(r, text)
        }
        "proto-mono-mul" => {
            let r = cmd_proto_mono_mul(arg(1)?, arg(2)?)?;
            let text = r.text();
            pack(r, text)
        }
        other => Err(Error::Unsupported {
            msg: format!("unknown session command `{other}`"),
        }),
    }
}

/// Validate a window value.
pub fn check_window(window: u64) -> Result<u64> {
    if !(10..=10_000_000).contains(&window) {
        return Err(Error::Unsupported {
            msg: format!("window {window} out of range [10, 10^7]"),
        });
    }
    Ok(window)
}
