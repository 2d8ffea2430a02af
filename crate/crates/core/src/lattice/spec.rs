//! TOML lattice spec files.
//!
//! ```toml
//! schema = "thetalab-lattice/1"
//! name = "D4^6"
//! root_system = "D4^6"          # optional, checked after construction
//!
//! # exactly one of:
//! gram = [[2, -1], [-1, 2]]
//! components = "D4^6"           # or [{ type = "D", rank = 4 }, ...]
//! glue_words = [[1, 1, 1, 1, 1, 1]]
//! construction = "D_plus"       # with n = 16
//! construction = "direct_sum"   # with summands = ["E8", "E8"]
//! ```

use serde::{Deserialize, Serialize};

use super::construct::{direct_sum, glue, plus_construction, GlueSpec};
use super::roots::{parse_root_system, Component};
use super::{root_system, Lattice, LatticeError};
use crate::exactnum::IntMatrix;

pub const SCHEMA: &str = "thetalab-lattice/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComponentEntry {
    Label(String),
    Table {
        #[serde(rename = "type")]
        kind: String,
        rank: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComponentsField {
    Label(String),
    List(Vec<ComponentEntry>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub schema: Option<String>,
    pub name: String,
    pub root_system: Option<String>,
    pub gram: Option<Vec<Vec<i64>>>,
    pub components: Option<ComponentsField>,
    pub glue_words: Option<Vec<Vec<usize>>>,
    pub construction: Option<String>,
    pub n: Option<usize>,
    pub summands: Option<Vec<String>>,
}

fn spec_err(msg: impl Into<String>) -> LatticeError {
    LatticeError::Spec(msg.into())
}

impl LatticeSpec {
    pub fn parse(text: &str) -> Result<Self, LatticeError> {
        let spec: LatticeSpec = toml::from_str(text).map_err(|e| spec_err(e.to_string()))?;
        if let Some(s) = &spec.schema {
            if s != SCHEMA {
                return Err(spec_err(format!("unsupported schema `{s}`, expected `{SCHEMA}`")));
            }
        }
        let kinds = [spec.gram.is_some(), spec.components.is_some(), spec.construction.is_some()];
        if kinds.iter().filter(|&&k| k).count() != 1 {
            return Err(spec_err("exactly one of `gram`, `components`, `construction` is required"));
        }
        Ok(spec)
    }

    pub fn glue_spec(&self) -> Result<Option<GlueSpec>, LatticeError> {
        let Some(field) = &self.components else { return Ok(None) };
        let components = match field {
            ComponentsField::Label(label) => parse_root_system(label)?,
            ComponentsField::List(entries) => entries
                .iter()
                .map(|e| match e {
                    ComponentEntry::Label(l) => l.parse::<Component>(),
                    ComponentEntry::Table { kind, rank } => format!("{kind}{rank}").parse::<Component>(),
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        Ok(Some(GlueSpec { components, glue_words: self.glue_words.clone().unwrap_or_default() }))
    }

    /// Builds the lattice. `resolve` looks up names used by `direct_sum`.
    pub fn build(&self, resolve: &dyn Fn(&str) -> Result<Lattice, LatticeError>) -> Result<Lattice, LatticeError> {
        let lattice = if let Some(rows) = &self.gram {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(spec_err("`gram` must be a square matrix"));
            }
            Lattice::from_gram(&self.name, IntMatrix::from_rows(rows))?
        } else if let Some(g) = self.glue_spec()? {
            glue(&self.name, &g)?
        } else {
            match self.construction.as_deref() {
                Some("D_plus") => {
                    let n = self.n.ok_or_else(|| spec_err("`D_plus` needs `n`"))?;
                    plus_construction(n)?.with_name(&self.name)
                }
                Some("direct_sum") => {
                    let names = self.summands.as_ref().ok_or_else(|| spec_err("`direct_sum` needs `summands`"))?;
                    let mut acc = Lattice::zero();
                    for name in names {
                        acc = direct_sum(&acc, &resolve(name)?);
                    }
                    acc.with_name(&self.name)
                }
                Some(other) => return Err(spec_err(format!("unknown construction `{other}`"))),
                None => unreachable!("checked in parse"),
            }
        };
        if let Some(label) = &self.root_system {
            let report = root_system(&lattice)?;
            if !report.matches_label(label)? {
                return Err(LatticeError::NotEvenUnimodular {
                    name: self.name.clone(),
                    reason: format!("root system is {}, expected {label}", report.label()),
                });
            }
        }
        Ok(lattice)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_names(name: &str) -> Result<Lattice, LatticeError> {
        Err(LatticeError::UnknownLattice(name.to_string()))
    }

    #[test]
    fn gram_spec() {
        let s = LatticeSpec::parse("name = \"A2\"\ngram = [[2, -1], [-1, 2]]\nroot_system = \"A2\"\n").unwrap();
        let l = s.build(&no_names).unwrap();
        assert_eq!(l.rank(), 2);
        assert_eq!(l.name(), "A2");
    }

    #[test]
    fn table_components() {
        let text = r#"
            name = "D8+"
            components = [{ type = "D", rank = 8 }]
            glue_words = [[1]]
        "#;
        let l = LatticeSpec::parse(text).unwrap().build(&no_names).unwrap();
        assert_eq!(l.rank(), 8);
    }

    #[test]
    fn rejects_malformed() {
        assert!(LatticeSpec::parse("name = \"x\"\n").is_err());
        assert!(LatticeSpec::parse("name = \"x\"\ngram = [[2]]\nn = 8\nconstruction = \"D_plus\"\n").is_err());
        assert!(LatticeSpec::parse("name = \"x\"\ngram = [[2]]\nbogus = 1\n").is_err());
        assert!(LatticeSpec::parse("schema = \"v9\"\nname = \"x\"\ngram = [[2]]\n").is_err());
        let s = LatticeSpec::parse("name = \"x\"\ngram = [[2, 1]]\n").unwrap();
        assert!(s.build(&no_names).is_err());
        let s = LatticeSpec::parse("name = \"x\"\ngram = [[2]]\nroot_system = \"A2\"\n").unwrap();
        assert!(s.build(&no_names).is_err());
    }
}
