//! Plain-text series format.
//!
//! ```text
//! thetalab-series v1
//! lattice_or_expr: E8
//! rank: 8
//! genus: 1
//! trace_bound: 4
//! domain: trace
//! fingerprint: 3f…
//! rows: 3
//! 0 1
//! 2 240
//! 4 2160
//! ```
//!
//! Each row is the upper triangle of `T` followed by the coefficient. For
//! `domain: targets` every sampled target is listed, zero or not.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Domain, Provenance, ThetaError, ThetaTruncation, Weight};
use crate::enumeration::GramTarget;

pub const SERIES_HEADER: &str = "thetalab-series v1";

impl ThetaTruncation {
    pub fn to_text(&self) -> String {
        let rows: Vec<(GramTarget, BigInt)> = match &self.domain {
            Domain::TraceBound(_) => self.coeffs.iter().map(|(t, c)| (t.clone(), c.clone())).collect(),
            Domain::Targets(set) => set.iter().map(|t| (t.clone(), self.coefficient(t))).collect(),
        };
        let mut out = String::new();
        writeln!(out, "{SERIES_HEADER}").unwrap();
        writeln!(out, "lattice_or_expr: {}", self.provenance.label()).unwrap();
        writeln!(out, "rank: {}", self.weight.twice()).unwrap();
        writeln!(out, "genus: {}", self.genus).unwrap();
        writeln!(out, "trace_bound: {}", self.domain.trace_bound()).unwrap();
        let kind = if matches!(self.domain, Domain::TraceBound(_)) { "trace" } else { "targets" };
        writeln!(out, "domain: {kind}").unwrap();
        writeln!(out, "fingerprint: {}", self.provenance.fingerprint().unwrap_or("-")).unwrap();
        writeln!(out, "rows: {}", rows.len()).unwrap();
        for (t, c) in rows {
            for v in t.upper() {
                write!(out, "{v} ").unwrap();
            }
            writeln!(out, "{c}").unwrap();
        }
        out
    }
}

fn field<'a>(lines: &mut impl Iterator<Item = &'a str>, name: &str) -> Result<&'a str, ThetaError> {
    let line = lines.next().ok_or_else(|| ThetaError::Format(format!("missing {name}")))?;
    line.strip_prefix(name)
        .and_then(|rest| rest.strip_prefix(": "))
        .ok_or_else(|| ThetaError::Format(format!("expected {name}, got {line:?}")))
}

fn number<T: std::str::FromStr>(text: &str, what: &str) -> Result<T, ThetaError> {
    text.parse().map_err(|_| ThetaError::Format(format!("bad {what}: {text:?}")))
}

/// Inverse of [`ThetaTruncation::to_text`].
pub fn parse_series(text: &str) -> Result<ThetaTruncation, ThetaError> {
    let mut lines = text.lines();
    if lines.next() != Some(SERIES_HEADER) {
        return Err(ThetaError::Format("missing header line".into()));
    }
    let label = field(&mut lines, "lattice_or_expr")?.to_string();
    let rank: usize = number(field(&mut lines, "rank")?, "rank")?;
    let genus: usize = number(field(&mut lines, "genus")?, "genus")?;
    let bound: i64 = number(field(&mut lines, "trace_bound")?, "trace bound")?;
    let kind = field(&mut lines, "domain")?;
    let fingerprint = field(&mut lines, "fingerprint")?;
    let count: usize = number(field(&mut lines, "rows")?, "row count")?;
    let width = genus * (genus + 1) / 2;
    let mut coeffs = BTreeMap::new();
    let mut listed = BTreeSet::new();
    for _ in 0..count {
        let line = lines.next().ok_or_else(|| ThetaError::Format("too few rows".into()))?;
        let parts: Vec<&str> = line.split(' ').collect();
        if parts.len() != width + 1 {
            return Err(ThetaError::Format(format!("row {line:?} has the wrong length")));
        }
        let upper = parts[..width].iter().map(|p| number(p, "entry")).collect::<Result<Vec<i64>, _>>()?;
        let t = GramTarget::from_upper(genus, upper)?;
        let c: BigInt = number(parts[width], "coefficient")?;
        if !c.is_zero() {
            coeffs.insert(t.clone(), c);
        }
        listed.insert(t);
    }
    if lines.next().is_some() {
        return Err(ThetaError::Format("trailing lines".into()));
    }
    let domain = match kind {
        "trace" => Domain::TraceBound(bound),
        "targets" => Domain::Targets(listed),
        other => return Err(ThetaError::Format(format!("unknown domain {other:?}"))),
    };
    let provenance = match fingerprint {
        "-" => Provenance::Expression(label),
        fp => Provenance::Lattice { name: label, fingerprint: fp.to_string() },
    };
    Ok(ThetaTruncation { genus, domain, weight: Weight(rank), coeffs, provenance })
}
