//! JSON file formats.
//!
//! Parameter set, keys in this order:
//! `{"d": int, "nu": s, "p": [s; d+1], "pt": [s; d+1], "u": [[s; d+1]; d+1]}`.
//!
//! Table: `{"kappa": <parameter set>, "N": int, "order": "grlex", "values": [[s; L]; L]}`
//! with rows indexed by `m`, columns by `mt`, both in graded-lex order of
//! the lattice (`L = C(N+d, d)`).
//!
//! Scalars `s` are strings: lowest-terms `a/b` in exact mode, 17
//! significant digits in approximate mode. Readers also accept plain JSON
//! numbers and decimal strings.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::bispec::{AffineCoeff, DifferenceOperator};
use crate::hyperg::{HypergError, PolynomialTable};
use crate::kappa::{KappaError, ParameterSet, RawParameters};
use crate::numeric::{ParseScalarError, Scalar};
use crate::report::CheckReport;

pub const TABLE_ORDER: &str = "grlex";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Scalar(#[from] ParseScalarError),
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Kappa(#[from] KappaError),
    #[error(transparent)]
    Table(#[from] HypergError),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamsDoc {
    pub d: usize,
    pub nu: Value,
    pub p: Vec<Value>,
    pub pt: Vec<Value>,
    pub u: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableDoc {
    pub kappa: ParamsDoc,
    #[serde(rename = "N")]
    pub n: u32,
    pub order: String,
    pub values: Vec<Vec<Value>>,
}

fn s<S: Scalar>(x: &S) -> Value {
    Value::String(x.to_canonical())
}

fn strings<S: Scalar>(xs: &[S]) -> Vec<Value> {
    xs.iter().map(s).collect()
}

fn scalar_of<S: Scalar>(v: &Value) -> Result<S, FormatError> {
    match v {
        Value::String(t) => Ok(S::parse_scalar(t)?),
        Value::Number(n) => Ok(S::parse_scalar(&n.to_string())?),
        other => Err(FormatError::Shape(format!("expected a scalar, found {other}"))),
    }
}

fn scalars_of<S: Scalar>(vs: &[Value]) -> Result<Vec<S>, FormatError> {
    vs.iter().map(scalar_of).collect()
}

pub fn params_doc<S: Scalar>(kappa: &ParameterSet<S>) -> ParamsDoc {
    ParamsDoc {
        d: kappa.d(),
        nu: s(kappa.nu()),
        p: strings(kappa.p()),
        pt: strings(kappa.pt()),
        u: kappa.u().to_rows().iter().map(|r| strings(r)).collect(),
    }
}

pub fn raw_from_doc<S: Scalar>(doc: &ParamsDoc) -> Result<RawParameters<S>, FormatError> {
    Ok(RawParameters {
        d: doc.d,
        nu: scalar_of(&doc.nu)?,
        p: scalars_of(&doc.p)?,
        pt: scalars_of(&doc.pt)?,
        u: doc.u.iter().map(|r| scalars_of(r)).collect::<Result<_, _>>()?,
    })
}

pub fn params_to_value<S: Scalar>(kappa: &ParameterSet<S>) -> Value {
    serde_json::to_value(params_doc(kappa)).expect("plain data")
}

pub fn write_params<S: Scalar>(kappa: &ParameterSet<S>) -> String {
    serde_json::to_string_pretty(&params_doc(kappa)).expect("plain data")
}

/// Reads parameter data without validating it.
pub fn parse_raw_params<S: Scalar>(text: &str) -> Result<RawParameters<S>, FormatError> {
    let doc: ParamsDoc = serde_json::from_str(text)?;
    raw_from_doc(&doc)
}

pub fn parse_params<S: Scalar>(text: &str, eps: f64) -> Result<ParameterSet<S>, FormatError> {
    Ok(parse_raw_params::<S>(text)?.validate_with(eps)?)
}

pub fn table_doc<S: Scalar>(table: &PolynomialTable<S>) -> TableDoc {
    TableDoc {
        kappa: params_doc(table.kappa()),
        n: table.degree(),
        order: TABLE_ORDER.into(),
        values: table.values().iter().map(|r| strings(r)).collect(),
    }
}

pub fn write_table<S: Scalar>(table: &PolynomialTable<S>) -> String {
    serde_json::to_string_pretty(&table_doc(table)).expect("plain data")
}

pub fn parse_table<S: Scalar>(text: &str, eps: f64) -> Result<PolynomialTable<S>, FormatError> {
    let doc: TableDoc = serde_json::from_str(text)?;
    if doc.order != TABLE_ORDER {
        return Err(FormatError::Shape(format!("unsupported order {:?}", doc.order)));
    }
    let kappa = raw_from_doc::<S>(&doc.kappa)?.validate_with(eps)?;
    let values = doc.values.iter().map(|r| scalars_of(r)).collect::<Result<_, _>>()?;
    Ok(PolynomialTable::from_values(kappa, doc.n, values)?)
}

fn affine_value<S: Scalar>(c: &AffineCoeff<S>) -> Value {
    serde_json::json!({
        "constant": s(&c.constant),
        "slack": s(&c.slack),
        "coords": strings(&c.coords),
    })
}

/// `{"label", "d", "N", "terms": [{"shift", "coeff"}], "eigenvalue"}`, each
/// coefficient as `constant + slack (N - |x|) + sum coords[l] x_l`.
pub fn stencil_to_value<S: Scalar>(op: &DifferenceOperator<S>) -> Value {
    let terms: Vec<Value> = op
        .terms
        .iter()
        .map(|t| serde_json::json!({ "shift": t.shift, "coeff": affine_value(&t.coeff) }))
        .collect();
    serde_json::json!({
        "label": op.label,
        "d": op.d,
        "N": op.n,
        "terms": terms,
        "eigenvalue": op.eigenvalue.as_ref().map(affine_value),
    })
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    check: &'a str,
    kappa: ParamsDoc,
    #[serde(rename = "N")]
    n: u32,
    pass: bool,
    failures: &'a [crate::report::Failure],
    checked: usize,
    max_residual: f64,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    notes: &'a [String],
}

/// `{"check", "kappa", "N", "pass", "failures", "checked", "max_residual", "notes"?}`.
pub fn report_to_value<S: Scalar>(report: &CheckReport, kappa: &ParameterSet<S>) -> Value {
    let doc = ReportDoc {
        check: &report.check,
        kappa: params_doc(kappa),
        n: report.n,
        pass: report.pass,
        failures: &report.failures,
        checked: report.checked,
        max_residual: report.max_residual,
        notes: &report.notes,
    };
    serde_json::to_value(doc).expect("plain data")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperg::table;
    use crate::kappa::{family_ds, family_milch};
    use crate::numeric::{Approx, Exact};

    #[test]
    fn params_round_trip_and_key_order() {
        let k = family_ds(Exact::from_i64(2), 2).unwrap();
        let text = write_params(&k);
        let keys: Vec<usize> = ["\"d\"", "\"nu\"", "\"p\"", "\"pt\"", "\"u\""]
            .iter()
            .map(|key| text.find(key).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(text.contains("\"1/4\""));
        let back: ParameterSet<Exact> = parse_params(&text, 0.0).unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn numbers_and_decimals_are_accepted() {
        let text = r#"{"d":1,"nu":2,"p":[0.5,"1/2"],"pt":["0.5",0.5],"u":[[1,1],[1,-1]]}"#;
        let k: ParameterSet<Exact> = parse_params(text, 0.0).unwrap();
        assert_eq!(k.p()[0], Exact::from_ratio(1, 2));
        assert!(parse_params::<Exact>(r#"{"d":1,"nu":2,"p":[0.5,0.5],"pt":[0.5,0.5],"u":[[1,1],[1,1]]}"#, 0.0).is_err());
        assert!(matches!(parse_params::<Exact>("{", 0.0), Err(FormatError::Json(_))));
    }

    #[test]
    fn report_keys_keep_order() {
        let k = family_ds(Exact::from_i64(2), 1).unwrap();
        let text = serde_json::to_string(&report_to_value(&CheckReport::new("demo", 2), &k)).unwrap();
        assert!(text.starts_with(r#"{"check":"demo","kappa":{"d":1,"#));
        assert!(text.find(r#""N":2,"pass":true"#).is_some());
    }

    #[test]
    fn table_round_trip() {
        let k = family_milch(&[Exact::from_ratio(1, 2), Exact::from_ratio(1, 4), Exact::from_ratio(1, 4)]).unwrap();
        let t = table(&k, 2);
        let text = write_table(&t);
        let n_at = text.find("\"N\"").unwrap();
        assert!(text.find("\"kappa\"").unwrap() < n_at && n_at < text.find("\"order\"").unwrap());
        let back: PolynomialTable<Exact> = parse_table(&text, 0.0).unwrap();
        assert_eq!(back, t);

        let ta = table(&k.to_approx(), 2);
        let back: PolynomialTable<Approx> = parse_table(&write_table(&ta), 1e-10).unwrap();
        for (r, row) in back.values().iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert_eq!(*v, *ta.get(r, c));
            }
        }
    }
}
