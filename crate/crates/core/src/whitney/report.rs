use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Rounds to 12 significant digits (the precision of all emitted numbers).
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

/// Formats with 12 significant digits and `.` as decimal separator.
pub fn format_sig(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(v);
    if r == 0.0 || (1e-4..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn ser_sig<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*v))
}

/// How `actual` is compared with `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// `|actual - expected| <= tol`
    #[serde(rename = "=")]
    Eq,
    /// `actual <= expected + tol`
    #[serde(rename = "<=")]
    Le,
    /// `actual >= expected - tol`
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, actual: f64, expected: f64, tol: f64) -> bool {
        match self {
            Relation::Eq => (actual - expected).abs() <= tol,
            Relation::Le => actual <= expected + tol,
            Relation::Ge => actual >= expected - tol,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        }
    }
}

/// One checked assertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    #[serde(serialize_with = "ser_sig")]
    pub expected: f64,
    #[serde(serialize_with = "ser_sig")]
    pub actual: f64,
    #[serde(serialize_with = "ser_sig")]
    pub tol: f64,
    pub relation: Relation,
    /// `reference` (published value), `oracle` (independent computation) or
    /// `identity` (holds exactly by construction).
    pub provenance: String,
    pub pass: bool,
}

impl Case {
    pub fn new(id: impl Into<String>, relation: Relation, expected: f64, actual: f64, tol: f64, provenance: &str) -> Self {
        Self {
            id: id.into(),
            expected,
            actual,
            tol,
            relation,
            provenance: provenance.into(),
            pass: relation.holds(actual, expected, tol),
        }
    }

    /// A case for an operation that failed outright.
    pub fn failed(id: impl Into<String>, expected: f64, provenance: &str) -> Self {
        Self {
            id: id.into(),
            expected,
            actual: f64::NAN,
            tol: 0.0,
            relation: Relation::Eq,
            provenance: provenance.into(),
            pass: false,
        }
    }
}

/// Cases of one suite, in a fixed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub cases: Vec<Case>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            cases: Vec::new(),
        }
    }

    pub fn push(&mut self, case: Case) {
        self.cases.push(case);
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    suite: &'a str,
    id: &'a str,
    expected: String,
    relation: &'a str,
    actual: String,
    tol: String,
    provenance: &'a str,
    pass: bool,
}

/// One CSV table for any number of reports, one row per case.
pub fn to_csv(reports: &[Report]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        for c in &r.cases {
            w.serialize(CsvRow {
                suite: &r.suite,
                id: &c.id,
                expected: format_sig(c.expected),
                relation: c.relation.symbol(),
                actual: format_sig(c.actual),
                tol: format_sig(c.tol),
                provenance: &c.provenance,
                pass: c.pass,
            })
            .map_err(|e| Error::Internal(e.to_string()))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(2.0), "2");
        assert_eq!(format_sig(-1.5e-20), "-1.5e-20");
    }

    #[test]
    fn relations() {
        assert!(Relation::Le.holds(1.0, 1.0, 0.0));
        assert!(!Relation::Ge.holds(0.9, 1.0, 0.05));
        assert!(Case::new("x", Relation::Eq, 0.5, 0.5 + 1e-10, 1e-9, "oracle").pass);
        assert!(!Case::failed("y", 1.0, "oracle").pass);
    }

    #[test]
    fn csv_layout() {
        let mut r = Report::new("demo");
        r.push(Case::new("a", Relation::Eq, 0.5, 0.5, 0.0, "identity"));
        let text = to_csv(&[r]).unwrap();
        assert_eq!(
            text,
            "suite,id,expected,relation,actual,tol,provenance,pass\ndemo,a,0.5,=,0.5,0,identity,true\n"
        );
    }
}
