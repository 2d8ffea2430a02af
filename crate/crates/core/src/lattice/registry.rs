//! Built-in lattices and name resolution.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::construct::{plus_construction, root_lattice};
use super::roots::Component;
use super::spec::LatticeSpec;
use super::{minimum_norm, root_system, Lattice, LatticeError};

const BUILTIN: &[&str] = &[
    include_str!("../../data/e8.toml"),
    include_str!("../../data/e8-e8.toml"),
    include_str!("../../data/d16-plus.toml"),
    include_str!("../../data/a5-4-d4.toml"),
    include_str!("../../data/d4-6.toml"),
    include_str!("../../data/a9-2-d6.toml"),
    include_str!("../../data/d6-4.toml"),
    include_str!("../../data/e6-4.toml"),
    include_str!("../../data/a11-d7-e6.toml"),
    include_str!("../../data/a17-e7.toml"),
    include_str!("../../data/d10-e7-2.toml"),
    include_str!("../../data/e8-d16.toml"),
    include_str!("../../data/e8-3.toml"),
];

/// The five pairs of rank-24 lattices with equal root counts, with that
/// count.
pub const RANK24_PAIRS: [(&str, &str, u64); 5] = [
    ("A5^4D4", "D4^6", 144),
    ("A9^2D6", "D6^4", 240),
    ("E6^4", "A11D7E6", 288),
    ("A17E7", "D10E7^2", 432),
    ("E8D16", "E8^3", 720),
];

/// All ten rank-24 lattices appearing in [`RANK24_PAIRS`].
pub fn rank24_names() -> Vec<&'static str> {
    RANK24_PAIRS.iter().flat_map(|&(a, b, _)| [a, b]).collect()
}

/// Named lattice specs; built-ins first, then any loaded from a directory.
#[derive(Clone, Debug)]
pub struct Registry {
    specs: BTreeMap<String, LatticeSpec>,
    order: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub name: String,
    pub rank: usize,
    pub min_norm: i64,
    pub root_count: u64,
    pub root_system: String,
}

fn memo() -> &'static Mutex<BTreeMap<String, Lattice>> {
    static MEMO: OnceLock<Mutex<BTreeMap<String, Lattice>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(BTreeMap::new()))
}

impl Registry {
    pub fn builtin() -> Self {
        let mut r = Registry { specs: BTreeMap::new(), order: Vec::new() };
        for text in BUILTIN {
            let spec = LatticeSpec::parse(text).expect("built-in spec parses");
            r.insert(spec);
        }
        r
    }

    /// Built-ins plus every `*.toml` spec in `dir` (sorted by file name).
    pub fn with_dir(dir: &Path) -> Result<Self, LatticeError> {
        let mut r = Registry::builtin();
        let read = std::fs::read_dir(dir).map_err(|e| LatticeError::Spec(format!("{}: {e}", dir.display())))?;
        let mut paths: Vec<_> = read
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        paths.sort();
        for p in paths {
            let text = std::fs::read_to_string(&p).map_err(|e| LatticeError::Spec(format!("{}: {e}", p.display())))?;
            r.insert(LatticeSpec::parse(&text)?);
        }
        Ok(r)
    }

    fn insert(&mut self, spec: LatticeSpec) {
        if !self.specs.contains_key(&spec.name) {
            self.order.push(spec.name.clone());
        }
        self.specs.insert(spec.name.clone(), spec);
    }

    pub fn names(&self) -> &[String] {
        &self.order
    }

    pub fn spec(&self, name: &str) -> Option<&LatticeSpec> {
        self.specs.get(name)
    }

    /// Resolves a registry name, `D<n>+`, or a single root lattice label
    /// such as `A4`. Built-in lattices are constructed once per process.
    pub fn resolve(&self, name: &str) -> Result<Lattice, LatticeError> {
        let spec = self.specs.get(name);
        let memoize = spec.is_some() && builtin_specs().get(name) == spec;
        if memoize {
            if let Some(l) = memo().lock().expect("registry memo poisoned").get(name) {
                return Ok(l.clone());
            }
        }
        let lattice = if let Some(spec) = spec {
            spec.build(&|n| self.resolve(n))?
        } else if let Some(n) = name.strip_prefix('D').and_then(|r| r.strip_suffix('+')) {
            let n: usize = n.parse().map_err(|_| LatticeError::UnknownLattice(name.to_string()))?;
            plus_construction(n)?
        } else if let Ok(c) = name.parse::<Component>() {
            root_lattice(c.kind, c.rank)?
        } else {
            return Err(LatticeError::UnknownLattice(name.to_string()));
        };
        if memoize {
            memo().lock().expect("registry memo poisoned").insert(name.to_string(), lattice.clone());
        }
        Ok(lattice)
    }

    /// One line of invariants per registered lattice, in registration order.
    pub fn list(&self) -> Result<Vec<RegistryEntry>, LatticeError> {
        self.order
            .iter()
            .map(|name| {
                let l = self.resolve(name)?;
                let rs = root_system(&l)?;
                Ok(RegistryEntry {
                    name: name.clone(),
                    rank: l.rank(),
                    min_norm: minimum_norm(&l)?,
                    root_count: rs.root_count,
                    root_system: rs.label(),
                })
            })
            .collect()
    }
}

fn builtin_specs() -> &'static BTreeMap<String, LatticeSpec> {
    static SPECS: OnceLock<BTreeMap<String, LatticeSpec>> = OnceLock::new();
    SPECS.get_or_init(|| Registry::builtin().specs)
}

impl Default for Registry {
    fn default() -> Self {
        Registry::builtin()
    }
}

/// Resolves a name against the built-in registry.
pub fn resolve(name: &str) -> Result<Lattice, LatticeError> {
    Registry::builtin().resolve(name)
}
