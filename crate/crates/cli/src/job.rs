use std::fmt;
use std::path::PathBuf;

use num_rational::BigRational;
use serde_json::{json, Value};
use thiserror::Error;

use thetalab_core::enumeration::EnumerationError;
use thetalab_core::jacobi::JacobiError;
use thetalab_core::{LatticeError, ThetaError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JobKind {
    Validate,
    Shells,
    Theta,
    Diff,
    Product,
    Restrict,
    Venkov,
    Heat,
    Witt,
    Schottky,
    A4Separation,
    KIdentity,
    Independence,
    HypPredicate,
    RegistryList,
}

impl JobKind {
    pub fn name(self) -> &'static str {
        match self {
            JobKind::Validate => "validate",
            JobKind::Shells => "shells",
            JobKind::Theta => "theta",
            JobKind::Diff => "diff",
            JobKind::Product => "product",
            JobKind::Restrict => "restrict",
            JobKind::Venkov => "venkov",
            JobKind::Heat => "heat",
            JobKind::Witt => "witt",
            JobKind::Schottky => "schottky",
            JobKind::A4Separation => "a4-separation",
            JobKind::KIdentity => "k-identity",
            JobKind::Independence => "independence",
            JobKind::HypPredicate => "hyp-predicate",
            JobKind::RegistryList => "registry-list",
        }
    }
}

impl fmt::Display for JobKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A lattice named in the registry or read from a spec file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeRef {
    Name(String),
    SpecFile(PathBuf),
}

impl fmt::Display for LatticeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeRef::Name(n) => f.write_str(n),
            LatticeRef::SpecFile(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// One verification job. Unset bounds fall back to per-kind defaults.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationJob {
    pub kind: JobKind,
    pub lattices: Vec<LatticeRef>,
    pub pair: Option<(String, String)>,
    pub genus: Option<usize>,
    pub max_genus: Option<usize>,
    pub trace_bound: Option<i64>,
    pub norm_bound: Option<i64>,
    pub tset: Option<PathBuf>,
    pub constant: Option<BigRational>,
    pub registry_dir: Option<PathBuf>,
    /// Worker count; 0 uses the available parallelism. Never echoed, since
    /// reports must not depend on it.
    pub jobs: usize,
}

impl VerificationJob {
    pub fn new(kind: JobKind) -> Self {
        VerificationJob {
            kind,
            lattices: Vec::new(),
            pair: None,
            genus: None,
            max_genus: None,
            trace_bound: None,
            norm_bound: None,
            tset: None,
            constant: None,
            registry_dir: None,
            jobs: 0,
        }
    }

    pub fn lattice(mut self, name: &str) -> Self {
        self.lattices.push(LatticeRef::Name(name.to_string()));
        self
    }

    pub fn pair(mut self, first: &str, second: &str) -> Self {
        self.pair = Some((first.to_string(), second.to_string()));
        self
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub(crate) fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [("trace bound", self.trace_bound), ("norm bound", self.norm_bound)] {
            if let Some(b) = v {
                if b < 0 {
                    return Err(CliError::Input(format!("{name} must be nonnegative, got {b}")));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn echo(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("kind".into(), json!(self.kind.name()));
        if !self.lattices.is_empty() {
            m.insert("lattices".into(), json!(self.lattices.iter().map(ToString::to_string).collect::<Vec<_>>()));
        }
        if let Some((a, b)) = &self.pair {
            m.insert("pair".into(), json!([a, b]));
        }
        let numbers = [
            ("genus", self.genus.map(|v| v as i64)),
            ("max_genus", self.max_genus.map(|v| v as i64)),
            ("trace_bound", self.trace_bound),
            ("norm_bound", self.norm_bound),
        ];
        for (k, v) in numbers {
            if let Some(v) = v {
                m.insert(k.into(), json!(v));
            }
        }
        if let Some(p) = &self.tset {
            m.insert("tset".into(), json!(p.display().to_string()));
        }
        if let Some(c) = &self.constant {
            m.insert("constant".into(), json!(crate::report::rational(c)));
        }
        Value::Object(m)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, unknown lattices, malformed files.
    #[error("input error: {0}")]
    Input(String),
    /// Something the library should never produce.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EnumerationError> for CliError {
    fn from(e: EnumerationError) -> Self {
        match e {
            EnumerationError::Overflow | EnumerationError::CoordinateOverflow | EnumerationError::HistogramTooLarge => {
                CliError::Internal(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ThetaError> for CliError {
    fn from(e: ThetaError) -> Self {
        match e {
            ThetaError::Enumeration(inner) => inner.into(),
            ThetaError::Lattice(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<JacobiError> for CliError {
    fn from(e: JacobiError) -> Self {
        match e {
            JacobiError::Enumeration(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}
