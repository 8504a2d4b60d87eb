//! JSON documents for fields, datums and computed records. Inputs are parsed
//! through serde with unknown keys rejected; outputs are `serde_json::Value`
//! trees, whose maps are key-sorted.

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::characters::{build_multchar, MultChar, QmodZ};
use crate::field_tower::{make_field, Fe, FieldError, FqField, LocalFieldDesc, Step};
use crate::galois_side::{ImprimitivityResult, KernelFieldDesc, ParameterRecord, XiRestriction};
use crate::gl_side::{DescentRecord, EpipelagicDatum};
use crate::suite::{CaseReport, Fault};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    /// The document does not have the expected shape.
    #[error("schema: {0}")]
    Schema(String),
    /// Well-formed, but the values do not describe a valid object.
    #[error("{kind}: {message}")]
    Domain { kind: &'static str, message: String },
}

impl WireError {
    pub fn domain(kind: &'static str, e: impl std::fmt::Display) -> WireError {
        WireError::Domain {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<FieldError> for WireError {
    fn from(e: FieldError) -> WireError {
        WireError::domain("field", e)
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum StepDoc {
    Base { p: u32, f: u32 },
    Unramified { f: u32 },
    Tame { e: u32, unit: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetDoc {
    mu: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct OmegaDoc {
    on_pi: String,
    on_mu: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct DatumDoc {
    field: Vec<StepDoc>,
    n: u32,
    det_alpha: DetDoc,
    #[serde(default)]
    omega: Option<OmegaDoc>,
    #[serde(default)]
    eps_index: u32,
}

fn from_value<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T, WireError> {
    T::deserialize(v).map_err(|e| WireError::Schema(e.to_string()))
}

/// Parses text as JSON; syntax errors are schema errors.
pub fn parse_json(text: &str) -> Result<Value, WireError> {
    serde_json::from_str(text).map_err(|e| WireError::Schema(e.to_string()))
}

fn build_field(steps: Vec<StepDoc>) -> Result<LocalFieldDesc, WireError> {
    let mut out: Vec<Step> = Vec::with_capacity(steps.len());
    let mut partial: Option<LocalFieldDesc> = None;
    for s in steps {
        let step = match s {
            StepDoc::Base { p, f } => Step::Base { p, f },
            StepDoc::Unramified { f } => Step::Unramified { f },
            StepDoc::Tame { e, unit } => {
                let parent = partial.as_ref().ok_or(FieldError::BaseFirst)?;
                let u = parent.residue().parse(&unit)?;
                let unit_log = parent
                    .residue()
                    .log(u)
                    .ok_or(FieldError::NotRootOfUnity)?;
                Step::Tame { e, unit_log }
            }
        };
        out.push(step);
        partial = Some(make_field(&out)?);
    }
    partial.ok_or_else(|| FieldError::EmptyTower.into())
}

pub fn parse_field(v: &Value) -> Result<LocalFieldDesc, WireError> {
    build_field(from_value(v)?)
}

pub fn field_to_json(k: &LocalFieldDesc) -> Value {
    Value::Array(
        k.steps()
            .iter()
            .map(|s| match *s {
                Step::Base { p, f } => json!({"kind": "base", "p": p, "f": f}),
                Step::Unramified { f } => json!({"kind": "unramified", "f": f}),
                Step::Tame { e, unit_log } => {
                    json!({"kind": "tame", "e": e, "unit": format!("g^{unit_log}")})
                }
            })
            .collect(),
    )
}

/// `{ "field": .., "e": .., "f": .., "q": .. }`
pub fn field_summary(k: &LocalFieldDesc) -> Value {
    json!({"field": field_to_json(k), "e": k.e(), "f": k.f(), "q": k.q()})
}

fn parse_residue(k: &FqField, s: &str) -> Result<Fe, WireError> {
    Ok(k.parse(s)?)
}

pub fn parse_datum(v: &Value) -> Result<EpipelagicDatum, WireError> {
    let doc: DatumDoc = from_value(v)?;
    let field = build_field(doc.field)?;
    let mu = parse_residue(field.residue(), &doc.det_alpha.mu)?;
    let omega = match doc.omega {
        None => MultChar::trivial(&field),
        Some(o) => {
            let on_pi: QmodZ = o
                .on_pi
                .parse()
                .map_err(|e| WireError::Schema(format!("omega.onPi: {e}")))?;
            build_multchar(&field, on_pi, o.on_mu, &[]).map_err(|e| WireError::domain("character", e))?
        }
    };
    EpipelagicDatum::new(&field, doc.n, mu, omega, doc.eps_index)
        .map_err(|e| WireError::domain("datum", e))
}

/// Parses `{"mu": "g^k"}` over `k`.
pub fn parse_det(v: &Value, k: &LocalFieldDesc) -> Result<Fe, WireError> {
    let doc: DetDoc = from_value(v)?;
    let mu = parse_residue(k.residue(), &doc.mu)?;
    if mu.is_zero() {
        return Err(FieldError::NotRootOfUnity.into());
    }
    Ok(mu)
}

pub fn multchar_to_json(chi: &MultChar) -> Value {
    let k = chi.field().residue();
    match chi.direct_data() {
        Some((on_pi, on_mu, wild)) => {
            let mut v = json!({
                "onPi": on_pi.to_string(),
                "onMu": on_mu,
                "sw": chi.sw(),
            });
            if let Some(c) = wild {
                v["wild"] = Value::String(k.format(c));
            }
            v
        }
        None => json!({"pullback": true, "sw": chi.sw()}),
    }
}

pub fn datum_to_json(d: &EpipelagicDatum) -> Value {
    let (on_pi, on_mu, _) = d
        .omega()
        .direct_data()
        .expect("datums carry direct central characters");
    json!({
        "field": field_to_json(d.field()),
        "n": d.n(),
        "detAlpha": {"mu": d.field().residue().format(d.det_mu())},
        "omega": {"onPi": on_pi.to_string(), "onMu": on_mu},
        "epsIndex": d.eps_index(),
    })
}

fn qz(x: Result<QmodZ, impl std::fmt::Display>) -> Value {
    match x {
        Ok(v) => Value::String(v.to_string()),
        Err(e) => json!({"error": e.to_string()}),
    }
}

pub fn descent_to_json(rec: &DescentRecord) -> Value {
    json!({
        "K": field_summary(&rec.k),
        "e": rec.e,
        "r": rec.r,
        "datumK": datum_to_json(&rec.datum_k),
        "normSign": rec.norm_sign,
        "deltaKF": rec.delta_kf,
        "lambdaKF": rec.lambda_kf,
        "inducedSwan": rec.induced_swan,
        "relations": rec.relations.iter().map(|r| json!({
            "name": r.name,
            "statement": r.statement,
            "holds": r.holds,
        })).collect::<Vec<_>>(),
    })
}

fn residues(k: &FqField, xs: &[Fe]) -> Value {
    Value::Array(xs.iter().map(|&a| Value::String(k.format(a))).collect())
}

pub fn imprimitivity_to_json(imp: &ImprimitivityResult) -> Value {
    let k = imp.t.residue();
    json!({
        "T": field_summary(&imp.t),
        "roots": residues(k, &imp.roots),
        "exponent": imp.exponent,
        "rhs": {"valuation": imp.rhs.0, "mu": k.format(imp.rhs.1)},
        "subfieldCounts": imp.subfield_counts.iter().map(|(l, c)| json!({
            "field": field_to_json(l),
            "solutions": c,
        })).collect::<Vec<_>>(),
    })
}

pub fn kernel_to_json(kernel: &KernelFieldDesc) -> Value {
    let k = kernel.t.residue();
    json!({
        "deltas": kernel.deltas.iter().zip(&kernel.roots).map(|(d, &a)| {
            let mut v = multchar_to_json(d);
            v["root"] = Value::String(k.format(a));
            v
        }).collect::<Vec<_>>(),
        "groupOrder": kernel.group_table.len(),
        "groupTable": kernel.group_table,
        "normSubgroup": {
            "annihilatorBasis": residues(k, &kernel.norm_subgroup.annihilator_basis),
            "index": kernel.norm_subgroup.index,
        },
        "eET": kernel.e_et,
        "dET": kernel.d_et,
        "cPsiE": kernel.c_psi_e,
    })
}

pub fn xi_to_json(xi: &XiRestriction) -> Value {
    let k = xi.t.residue();
    json!({
        "betaLeading": k.format(xi.beta_leading),
        "betaNormCoset": k.format(xi.beta_norm_coset),
        "gradedCoeff": k.format(xi.graded_coeff),
        "tauE": "1",
        "swan": xi.swan,
        "swanByInduction": xi.swan_by_induction,
        "artin": xi.artin,
        "cPsiE": xi.c_psi_e,
        "hallAlt": {"swTau": xi.hall_alt.sw_tau, "swTauH": xi.hall_alt.sw_tau_h},
    })
}

pub fn parameter_to_json(rec: &ParameterRecord) -> Value {
    let mut imp = imprimitivity_to_json(&rec.imprimitivity);
    let t = imp
        .as_object_mut()
        .and_then(|m| m.remove("T"))
        .unwrap_or(Value::Null);
    json!({
        "input": datum_to_json(&rec.input),
        "T": t,
        "imprimitivity": imp,
        "kernel": kernel_to_json(&rec.kernel),
        "xi": xi_to_json(&rec.xi),
        "detSigma": multchar_to_json(&rec.det_sigma),
        "eps": rec.eps.to_string(),
        "epsBase": qz(rec.input.eps_base()),
        "twistIndex": rec.twist_resolution,
    })
}

pub fn report_to_json(reports: &[CaseReport], fault: Option<Fault>) -> Value {
    json!({
        "fault": fault.map(|f| f.to_string()),
        "pass": reports.iter().all(CaseReport::pass),
        "cases": reports.iter().map(|rep| json!({
            "case": rep.case.name,
            "p": rep.case.p,
            "f": rep.case.f,
            "r": rep.case.r,
            "pass": rep.pass(),
            "checks": rep.checks.iter().map(|c| json!({
                "name": c.name,
                "criterion": c.criterion,
                "pass": c.pass,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn datum_round_trip() {
        let text = r#"{"field":[{"kind":"base","p":2,"f":1},{"kind":"unramified","f":2},
            {"kind":"tame","e":3,"unit":"g^1"}],"n":2,"detAlpha":{"mu":"g^2"},
            "omega":{"onPi":"1/2","onMu":1},"epsIndex":1}"#;
        let d = parse_datum(&parse_json(text).unwrap()).unwrap();
        let back = parse_datum(&datum_to_json(&d)).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn unknown_keys_and_zero_units() {
        let extra = parse_json(r#"[{"kind":"base","p":2,"f":1,"x":0}]"#).unwrap();
        assert!(matches!(parse_field(&extra), Err(WireError::Schema(_))));
        let zero = parse_json(r#"[{"kind":"base","p":2,"f":1},{"kind":"tame","e":3,"unit":"0"}]"#)
            .unwrap();
        assert!(matches!(parse_field(&zero), Err(WireError::Domain { .. })));
    }
}
