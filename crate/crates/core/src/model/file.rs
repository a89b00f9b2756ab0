//! JSON spec-file reader.
//!
//! ```json
//! {
//!   "terms": [{"a": 2, "b": 2, "perturb": "floor"}],
//!   "g": {"c": 1, "alpha": 1, "beta": 0},
//!   "x0": 4,
//!   "base": {"const": 1}
//! }
//! ```
//!
//! `perturb` is `"none"`, `"floor"`, `"ceil"` or `{"lambda": E, "mu": E}`
//! where an envelope `E` is `"zero"`, `"invx"`, `"invlog:ALPHA"`,
//! `"const:V"`, a bare number (constant) or `{"table": [[x, v], ...]}`.
//! `g` is a poly-log `{"c", "alpha", "beta"}`, `{"sum": [poly-log, ...]}`,
//! `{"zero": true}` or `{"table": [[x, v], ...]}`. Exponents may be written
//! as rationals such as `"3/2"`. Unknown fields are rejected.

use serde::Deserialize;

use super::{
    AtomicMeasure, BaseCase, DrivingFunction, Envelope, MeasureTerm, Perturbation,
    PerturbationSpec, PolyLog, RecurrenceSpec, Table,
};
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    terms: Vec<TermFile>,
    g: GFile,
    #[serde(default)]
    x0: Option<f64>,
    base: BaseFile,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    a: f64,
    b: f64,
    #[serde(default)]
    perturb: Option<PerturbFile>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PerturbFile {
    Named(String),
    Bounded(BoundedFile),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundedFile {
    lambda: EnvelopeFile,
    mu: EnvelopeFile,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EnvelopeFile {
    Number(f64),
    Named(String),
    Table(TableFile),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    table: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Float(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyLogFile {
    c: Number,
    alpha: Number,
    #[serde(default)]
    beta: Option<Number>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SumFile {
    sum: Vec<PolyLogFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ZeroFile {
    zero: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GFile {
    PolyLog(PolyLogFile),
    Sum(SumFile),
    Zero(ZeroFile),
    Table(TableFile),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
enum BaseFile {
    #[serde(rename = "const")]
    Const(f64),
    #[serde(rename = "table")]
    Table(Vec<(u64, f64)>),
}

fn number(n: &Number) -> Result<f64> {
    match n {
        Number::Float(v) => Ok(*v),
        Number::Text(s) => parse_rational(s),
    }
}

/// Parses `"p/q"` or a plain decimal string.
fn parse_rational(s: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("`{s}` is not a number or rational p/q"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            Ok(p / q)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

fn polylog(p: &PolyLogFile) -> Result<PolyLog> {
    Ok(PolyLog::new(
        number(&p.c)?,
        number(&p.alpha)?,
        p.beta.as_ref().map(number).transpose()?.unwrap_or(0.0),
    ))
}

/// Parses the compact envelope syntax used by spec files and the CLI:
/// `zero`, `invx`, `invlog:ALPHA`, `const:V`.
pub fn parse_envelope(s: &str) -> Result<Envelope> {
    let s = s.trim();
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (s, None),
    };
    let arg = |what: &str| -> Result<f64> {
        arg.ok_or_else(|| Error::Parse(format!("envelope `{s}` needs a {what}")))
            .and_then(parse_rational)
    };
    match head {
        "zero" | "0" => Ok(Envelope::Const(0.0)),
        "invx" => Ok(Envelope::InverseX),
        "invlog" => Ok(Envelope::InverseLogPow(arg("power")?)),
        "const" => Ok(Envelope::Const(arg("value")?)),
        _ => Err(Error::Parse(format!(
            "unknown envelope `{s}` (expected zero, invx, invlog:A or const:V)"
        ))),
    }
}

fn envelope(e: &EnvelopeFile) -> Result<Envelope> {
    match e {
        EnvelopeFile::Number(v) => Ok(Envelope::Const(*v)),
        EnvelopeFile::Named(s) => parse_envelope(s),
        EnvelopeFile::Table(t) => Ok(Envelope::Tabulated(
            t.table.iter().map(|r| (r[0], r[1])).collect(),
        )),
    }
}

fn perturbation(p: &Option<PerturbFile>) -> Result<Perturbation> {
    match p {
        None => Ok(Perturbation::None),
        Some(PerturbFile::Named(s)) => match s.as_str() {
            "none" => Ok(Perturbation::None),
            "floor" => Ok(Perturbation::Floor),
            "ceil" => Ok(Perturbation::Ceil),
            other => Err(Error::Parse(format!(
                "unknown perturbation `{other}` (expected none, floor, ceil or an object)"
            ))),
        },
        Some(PerturbFile::Bounded(b)) => Ok(Perturbation::Bounded {
            lambda: envelope(&b.lambda)?,
            mu: envelope(&b.mu)?,
        }),
    }
}

/// Parses a recurrence spec from JSON text. Syntax errors carry the
/// line and column reported by the JSON reader.
pub fn parse_spec(text: &str) -> Result<RecurrenceSpec> {
    let raw: SpecFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;

    let mut terms = Vec::with_capacity(raw.terms.len());
    let mut perturbations = Vec::with_capacity(raw.terms.len());
    for t in &raw.terms {
        terms.push(MeasureTerm::new(t.a, t.b));
        perturbations.push(perturbation(&t.perturb)?);
    }

    let g = match &raw.g {
        GFile::PolyLog(p) => DrivingFunction::PolyLog(polylog(p)?),
        GFile::Sum(s) => DrivingFunction::Sum(s.sum.iter().map(polylog).collect::<Result<_>>()?),
        GFile::Zero(z) => {
            if !z.zero {
                return Err(Error::Parse("`{\"zero\": false}` is not a driving function".into()));
            }
            DrivingFunction::Zero
        }
        GFile::Table(t) => {
            DrivingFunction::Tabulated(Table::new(t.table.iter().map(|r| (r[0], r[1])).collect()))
        }
    };

    let base = match raw.base {
        BaseFile::Const(v) => BaseCase::Const(v),
        BaseFile::Table(rows) => BaseCase::Table(rows),
    };

    Ok(RecurrenceSpec {
        measure: AtomicMeasure::new(terms),
        g,
        perturbation: PerturbationSpec::new(perturbations),
        x0: raw.x0,
        base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_merge_sort() {
        let s = parse_spec(
            r#"{"terms":[{"a":2,"b":2,"perturb":"floor"}],
                "g":{"c":1,"alpha":1,"beta":0},"x0":4,"base":{"const":1}}"#,
        )
        .unwrap();
        assert_eq!(s.measure.terms(), &[MeasureTerm::new(2.0, 2.0)]);
        assert_eq!(s.perturbation.terms, vec![Perturbation::Floor]);
        assert_eq!(s.g, DrivingFunction::PolyLog(PolyLog::new(1.0, 1.0, 0.0)));
        assert_eq!(s.x0, Some(4.0));
    }

    #[test]
    fn parses_envelopes_tables_and_rationals() {
        let s = parse_spec(
            r#"{"terms":[{"a":3,"b":3,"perturb":{"lambda":"zero","mu":"invlog:3/2"}},
                         {"a":1,"b":4,"perturb":{"lambda":0.0,"mu":{"table":[[10,0.1],[100,0.05]]}}}],
                "g":{"sum":[{"c":1,"alpha":"1/2","beta":-1},{"c":2,"alpha":0}]},
                "base":{"table":[[1,1],[2,3]]}}"#,
        )
        .unwrap();
        assert_eq!(
            s.perturbation.terms[0],
            Perturbation::Bounded {
                lambda: Envelope::Const(0.0),
                mu: Envelope::InverseLogPow(1.5)
            }
        );
        assert_eq!(
            s.g,
            DrivingFunction::Sum(vec![PolyLog::new(1.0, 0.5, -1.0), PolyLog::new(2.0, 0.0, 0.0)])
        );
        assert_eq!(s.base, BaseCase::Table(vec![(1, 1.0), (2, 3.0)]));
        assert_eq!(s.x0, None);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = parse_spec(
            r#"{"terms":[{"a":2,"b":2}],"g":{"zero":true},"base":{"const":1},"extra":1}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("extra")), "{err}");
        assert!(parse_spec(r#"{"terms":[{"a":2,"b":2,"c":1}],"g":{"zero":true},"base":{"const":1}}"#).is_err());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_spec("{\n  \"terms\": [\n  }").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn envelope_syntax() {
        assert_eq!(parse_envelope("invlog:1").unwrap(), Envelope::InverseLogPow(1.0));
        assert_eq!(parse_envelope("invx").unwrap(), Envelope::InverseX);
        assert_eq!(parse_envelope("const:0.01").unwrap(), Envelope::Const(0.01));
        assert!(parse_envelope("invlog").is_err());
        assert!(parse_envelope("sqrt").is_err());
    }
}
