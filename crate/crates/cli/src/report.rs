use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use thetalab_core::theta::ThetaTruncation;
use thetalab_core::{GramTarget, Lattice, RootSystemReport};

pub const REPORT_SCHEMA: &str = "thetalab-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Computed,
    /// The library contradicted itself, e.g. a non-uniform constant.
    Inconsistent,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Computed => "computed",
            Status::Inconsistent => "inconsistent",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass | Status::Computed => 0,
            Status::Fail => 2,
            Status::Inconsistent => 4,
        }
    }

    pub(crate) fn from_check(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Result of one job. The JSON form has sorted keys and no timing, so it
/// only depends on the job's inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub job: Value,
    pub status: Status,
    pub payload: Value,
}

impl Report {
    pub fn to_json(&self) -> String {
        let doc = json!({
            "schema": REPORT_SCHEMA,
            "job": self.job,
            "status": self.status.name(),
            "payload": self.payload,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        text
    }
}

pub(crate) fn big(v: &BigInt) -> Value {
    Value::String(v.to_string())
}

/// `p/q`, always with a denominator.
pub fn rational(v: &BigRational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

pub(crate) fn target(t: &GramTarget) -> Value {
    json!(t.upper())
}

pub(crate) fn lattice_header(l: &Lattice) -> Value {
    json!({ "name": l.name(), "rank": l.rank(), "fingerprint": l.fingerprint() })
}

pub(crate) fn root_system(rs: &RootSystemReport) -> Value {
    let components: serde_json::Map<String, Value> =
        rs.components.iter().map(|(c, m)| (c.to_string(), json!(m))).collect();
    json!({
        "label": rs.label(),
        "components": components,
        "root_count": rs.root_count,
        "coxeter_number": rs.coxeter_number(),
    })
}

pub(crate) fn series(s: &ThetaTruncation) -> Value {
    json!(s.to_text().lines().collect::<Vec<_>>())
}

pub(crate) fn digest(s: &ThetaTruncation) -> String {
    hex::encode(Sha256::digest(s.to_text().as_bytes()))
}
