//! Input documents and JSON reports for the command-line driver.

use std::time::Instant;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::ach::{bianchi_residual, christoffel, curvature, table1_reference, ACHMetric};
use crate::algebra::{self, Bracket, CRFrameAlgebra, ValidationReport};
use crate::error::{Error, Result};
use crate::pseudohermitian::{identity_residuals, PseudohermitianData};
use crate::scalar::{rational_string, Rational, Scalar};
use crate::series::RhoSeries;
use crate::solver::{self, SolverOptions};
use crate::tensor::InvariantTensor;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexDoc {
    re: String,
    #[serde(default)]
    im: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BracketDoc {
    x: String,
    y: String,
    z: String,
    c: ComplexDoc,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentOptions {
    #[serde(default)]
    pub autocomplete: bool,
    #[serde(default)]
    pub truncation: Option<usize>,
    #[serde(default)]
    pub checks: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraDocument {
    n: usize,
    brackets: Vec<BracketDoc>,
    #[serde(default)]
    options: DocumentOptions,
}

/// A parsed input: either a document or a `builtin:<name>` reference.
#[derive(Debug)]
pub struct Input {
    pub name: String,
    pub algebra: CRFrameAlgebra,
    pub options: DocumentOptions,
    pub notes: Vec<String>,
}

pub fn parse_document(name: &str, text: &str) -> Result<Input> {
    let doc: AlgebraDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let a = crate::index::Alphabet::new(doc.n.max(1));
    let label = |s: &str| {
        a.parse_label(s)
            .filter(|&i| i != crate::index::INF)
            .ok_or_else(|| Error::Parse(format!("unknown frame label {s:?}")))
    };
    let mut brackets = Vec::with_capacity(doc.brackets.len());
    for b in &doc.brackets {
        let re = Scalar::parse_rational(&b.c.re).map_err(as_parse)?;
        let im = match &b.c.im {
            Some(s) => Scalar::parse_rational(s).map_err(as_parse)?,
            None => Rational::from_integer(0.into()),
        };
        brackets.push(Bracket { x: label(&b.x)?, y: label(&b.y)?, z: label(&b.z)?, c: Scalar::new(re, im) });
    }
    let (algebra, notes) = CRFrameAlgebra::from_brackets(doc.n, &brackets, doc.options.autocomplete)?;
    Ok(Input { name: name.into(), algebra, options: doc.options, notes })
}

fn as_parse(e: Error) -> Error {
    match e {
        Error::Parse(_) => e,
        other => Error::Parse(other.to_string()),
    }
}

/// Reads `builtin:<name>` or a path to a JSON document.
pub fn load_input(spec: &str) -> Result<Input> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let algebra = algebra::builtin(name)?;
        return Ok(Input { name: spec.into(), algebra, options: DocumentOptions::default(), notes: Vec::new() });
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Error::Parse(format!("{spec}: {e}")))?;
    parse_document(spec, &text)
}

pub fn rational_json(r: &Rational) -> Value {
    Value::String(rational_string(r))
}

pub fn scalar_json(s: &Scalar) -> Value {
    json!({ "re": rational_string(&s.re), "im": rational_string(&s.im) })
}

/// Nonzero entries keyed by comma-joined frame labels.
pub fn tensor_json(t: &InvariantTensor) -> Value {
    let a = t.alphabet();
    let mut m = Map::new();
    for (idx, v) in t.nonzero() {
        let key: Vec<String> = idx.iter().map(|&i| a.label(i)).collect();
        m.insert(key.join(","), scalar_json(v));
    }
    Value::Object(m)
}

pub fn series_json(s: &RhoSeries) -> Value {
    let mut out = Vec::new();
    for d in 0..s.len() {
        if let Some(c) = s.coeff_ref(d) {
            if !c.is_zero() {
                out.push(json!({ "degree": d, "entries": tensor_json(c) }));
            }
        }
    }
    Value::Array(out)
}

pub fn validation_json(r: &ValidationReport) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "witnesses": c.witnesses }))
        .collect();
    json!({ "passed": r.passed(), "checks": checks, "notes": r.notes })
}

fn invariants_json(p: &PseudohermitianData) -> Value {
    json!({
        "h": tensor_json(&p.h_tensor()),
        "A": tensor_json(&p.a_hol()),
        "N": tensor_json(&p.n_hol()),
        "R": tensor_json(&p.ricci_hol()),
        "scalar_curvature": scalar_json(&p.scalar_curvature),
    })
}

/// Outcome of a driver command: the report and the process exit code.
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
}

fn validated(input: &Input) -> std::result::Result<ValidationReport, Outcome> {
    let mut v = input.algebra.validate();
    v.notes.extend(input.notes.iter().cloned());
    if v.passed() {
        Ok(v)
    } else {
        Err(Outcome { report: json!({ "input": input.name, "validation": validation_json(&v) }), exit_code: 2 })
    }
}

pub fn validate(input: &Input) -> Outcome {
    match validated(input) {
        Ok(v) => Outcome { report: json!({ "input": input.name, "validation": validation_json(&v) }), exit_code: 0 },
        Err(o) => o,
    }
}

fn error_outcome(name: &str, e: &Error) -> Outcome {
    Outcome { report: json!({ "input": name, "error": e.to_string() }), exit_code: e.exit_code() }
}

#[derive(Clone, Debug, Default)]
pub struct SolveFlags {
    pub truncation: Option<usize>,
    pub timing: bool,
}

pub fn solve(input: &Input, flags: &SolveFlags) -> Outcome {
    let v = match validated(input) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let start = Instant::now();
    match solve_report(input, &v, flags.truncation.or(input.options.truncation)) {
        Ok(mut report) => {
            if flags.timing {
                report["timing_ms"] = json!(start.elapsed().as_millis() as u64);
            }
            Outcome { report, exit_code: 0 }
        }
        Err(e) => error_outcome(&input.name, &e),
    }
}

fn solve_report(input: &Input, v: &ValidationReport, truncation: Option<usize>) -> Result<Value> {
    let p = PseudohermitianData::new(&input.algebra)?;
    let opts = SolverOptions { truncation, ..SolverOptions::default() };
    let s = solver::solve(&p, &opts)?;
    let r = &s.obstruction;
    let (u, vv) = solver::compute_u_v(&p, r);
    let (e0, pred) = solver::second_obstruction_check(&p, r);
    let div = solver::divergence_identity(&p, r);
    let (rd_l, rd_r) = solver::reeb_divergence_check(&p, r);
    let steps: Vec<Value> = s
        .steps
        .iter()
        .map(|st| json!({ "m": st.m, "order_forms_hold": st.order_forms_hold, "bianchi_exact": st.bianchi_exact }))
        .collect();
    Ok(json!({
        "input": input.name,
        "n": p.n(),
        "validation": validation_json(v),
        "invariants": invariants_json(&p),
        "truncation": s.metric.trunc(),
        "phi": series_json(s.phi.series()),
        "steps": steps,
        "obstruction": tensor_json(&r.o),
        "E": tensor_json(&r.e),
        "u": scalar_json(&u),
        "v": scalar_json(&vv),
        "checks": {
            "bianchi": s.steps.iter().all(|st| st.bianchi_exact && st.order_forms_hold),
            "second_obstruction": { "passed": e0 == pred, "lhs": tensor_json(&e0), "rhs": tensor_json(&pred) },
            "divergence": { "passed": div.is_zero(), "residual": scalar_json(&div) },
            "reeb_divergence": { "passed": rd_l == rd_r, "lhs": scalar_json(&rd_l), "rhs": scalar_json(&rd_r) },
            "u_real": u.is_real(),
        },
    }))
}

pub const CHECK_NAMES: &[&str] = &["seed", "bianchi", "divergence", "scaling", "table1", "second-obstruction", "identities"];

/// Parses a comma-separated check list; `all` selects every check.
pub fn parse_checks(list: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item == "all" {
            return Ok(CHECK_NAMES.iter().map(|s| s.to_string()).collect());
        }
        if !CHECK_NAMES.contains(&item) {
            return Err(Error::BadParameter(format!("unknown check {item:?}; expected one of {}", CHECK_NAMES.join(", "))));
        }
        if !out.iter().any(|c: &String| c == item) {
            out.push(item.to_string());
        }
    }
    if out.is_empty() {
        return Err(Error::BadParameter("no checks selected".into()));
    }
    Ok(out)
}

/// A strictly positive rescale factor.
pub fn parse_lambda(s: &str) -> Result<Rational> {
    let l = Scalar::parse_rational(s)?;
    if l <= Rational::from_integer(0.into()) {
        return Err(Error::BadParameter(format!("lambda must be positive, got {l}")));
    }
    Ok(l)
}

pub fn verify(input: &Input, checks: &[String], lambda: &Rational, truncation: Option<usize>) -> Outcome {
    if let Err(o) = validated(input) {
        return o;
    }
    match verify_report(input, checks, lambda, truncation) {
        Ok((report, passed)) => Outcome { report, exit_code: if passed { 0 } else { 3 } },
        Err(e) => error_outcome(&input.name, &e),
    }
}

fn verify_report(input: &Input, checks: &[String], lambda: &Rational, truncation: Option<usize>) -> Result<(Value, bool)> {
    let p = PseudohermitianData::new(&input.algebra)?;
    let opts = SolverOptions { truncation, ..SolverOptions::default() };
    let needs_solution = checks.iter().any(|c| !matches!(c.as_str(), "seed" | "table1" | "identities" | "scaling"));
    let sol = if needs_solution { Some(solver::solve(&p, &opts)?) } else { None };
    let mut results = Map::new();
    let mut all = true;
    for c in checks {
        let (passed, detail) = match c.as_str() {
            "seed" => {
                let seed = solver::seed(&p)?;
                let m = ACHMetric::assemble(&p, &seed, 5)?;
                let ein = curvature(&p, &m)?.einstein;
                let low: Vec<Value> = (0..3).filter_map(|d| ein.coeff_ref(d)).filter(|t| !t.is_zero()).map(tensor_json).collect();
                (ein.vanishes_below(3), json!({ "phi": series_json(seed.series()), "low_order_einstein": low }))
            }
            "bianchi" => {
                let s = sol.as_ref().expect("solved");
                let seed = ACHMetric::assemble(&p, &s.phi.truncate(3), s.metric.trunc())?;
                let seed_res = bianchi_residual(&p, &seed, &curvature(&p, &seed)?)?;
                let steps = s.steps.iter().all(|st| st.bianchi_exact);
                let forms = s.steps.iter().all(|st| st.order_forms_hold);
                (steps && forms && seed_res.is_empty(), json!({ "steps_exact": steps, "order_forms": forms, "seed_exact": seed_res.is_empty() }))
            }
            "divergence" => {
                let s = sol.as_ref().expect("solved");
                let d = solver::divergence_identity(&p, &s.obstruction);
                let (l, r) = solver::reeb_divergence_check(&p, &s.obstruction);
                (d.is_zero() && l == r, json!({ "residual": scalar_json(&d), "reeb_lhs": scalar_json(&l), "reeb_rhs": scalar_json(&r) }))
            }
            "second-obstruction" => {
                let s = sol.as_ref().expect("solved");
                let (l, r) = solver::second_obstruction_check(&p, &s.obstruction);
                (l == r, json!({ "lhs": tensor_json(&l), "rhs": tensor_json(&r) }))
            }
            "scaling" => {
                let (scaled, expected) = solver::scaling_law(&input.algebra, lambda, &opts)?;
                (scaled == expected, json!({ "lambda": rational_json(lambda), "scaled": tensor_json(&scaled), "expected": tensor_json(&expected) }))
            }
            "table1" => {
                let seed = solver::seed(&p)?;
                let m = ACHMetric::assemble(&p, &seed, solver::solution_truncation(p.n()))?;
                let lhs = christoffel(&p, &m)?.lower;
                let rhs = table1_reference(&p, &m)?;
                let diff = lhs.try_sub(&rhs)?;
                (diff.is_empty(), json!({ "mismatched_degrees": (0..diff.len()).filter(|&d| diff.coeff_ref(d).is_some_and(|t| !t.is_zero())).collect::<Vec<_>>() }))
            }
            "identities" => {
                let res = identity_residuals(&p)?;
                let failed: Vec<&str> = res.iter().filter(|r| !r.holds()).map(|r| r.name).collect();
                (failed.is_empty(), json!({ "failed": failed }))
            }
            other => return Err(Error::BadParameter(format!("unknown check {other:?}"))),
        };
        all &= passed;
        results.insert(c.clone(), json!({ "passed": passed, "detail": detail }));
    }
    Ok((json!({ "input": input.name, "checks": results, "passed": all }), all))
}

/// Pretty-printed with sorted keys and a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialise");
    s.push('\n');
    s
}
