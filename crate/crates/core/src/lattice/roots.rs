//! Simply-laced root systems: Cartan matrices, fundamental weights and the
//! standard discriminant-group representatives used by glue codes.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::LatticeError;
use crate::exactnum::{inverse_rational, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RootType {
    A,
    D,
    E,
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            RootType::A => "A",
            RootType::D => "D",
            RootType::E => "E",
        };
        f.write_str(c)
    }
}

/// One irreducible ADE component `X_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Component {
    pub kind: RootType,
    pub rank: usize,
}

// Label order: A before D before E, larger rank first within a type.
impl Ord for Component {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.kind.cmp(&other.kind).then(other.rank.cmp(&self.rank))
    }
}

impl PartialOrd for Component {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Component {
    pub fn new(kind: RootType, rank: usize) -> Result<Self, LatticeError> {
        let ok = match kind {
            RootType::A => rank >= 1,
            RootType::D => rank >= 3,
            RootType::E => (6..=8).contains(&rank),
        };
        if ok {
            Ok(Component { kind, rank })
        } else {
            Err(LatticeError::InvalidComponent(format!("{kind}{rank}")))
        }
    }

    /// Number of roots (norm-2 vectors) of the root lattice.
    pub fn root_count(&self) -> u64 {
        let r = self.rank as u64;
        match (self.kind, self.rank) {
            (RootType::A, _) => r * (r + 1),
            (RootType::D, _) => 2 * r * (r - 1),
            (RootType::E, 6) => 72,
            (RootType::E, 7) => 126,
            (RootType::E, _) => 240,
        }
    }

    pub fn coxeter_number(&self) -> u64 {
        let r = self.rank as u64;
        match (self.kind, self.rank) {
            (RootType::A, _) => r + 1,
            (RootType::D, _) => 2 * r - 2,
            (RootType::E, 6) => 12,
            (RootType::E, 7) => 18,
            (RootType::E, _) => 30,
        }
    }

    /// Order of the discriminant group `L*/L`.
    pub fn discriminant_order(&self) -> usize {
        match (self.kind, self.rank) {
            (RootType::A, n) => n + 1,
            (RootType::D, _) => 4,
            (RootType::E, 6) => 3,
            (RootType::E, 7) => 2,
            (RootType::E, _) => 1,
        }
    }

    /// Edges of the Dynkin diagram with Bourbaki numbering (0-based).
    fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.rank;
        match self.kind {
            RootType::A => (1..n).map(|i| (i - 1, i)).collect(),
            RootType::D => {
                let mut e: Vec<(usize, usize)> = (1..n - 1).map(|i| (i - 1, i)).collect();
                e.push((n - 3, n - 1));
                e
            }
            RootType::E => {
                let mut e = vec![(0, 2), (1, 3)];
                e.extend((3..n).map(|i| (i - 1, i)));
                e
            }
        }
    }

    pub fn cartan(&self) -> IntMatrix {
        let n = self.rank;
        let mut g = vec![0i64; n * n];
        for i in 0..n {
            g[i * n + i] = 2;
        }
        for (a, b) in self.edges() {
            g[a * n + b] = -1;
            g[b * n + a] = -1;
        }
        IntMatrix::from_i64(n, n, &g)
    }

    /// Index of the fundamental weight representing discriminant class
    /// `class`, or `None` for the trivial class.
    ///
    /// Labels follow the usual glue-code conventions: `[i]` is `ω_i` for
    /// `A_n`; for `D_n` `[1]` is the spinor `ω_n`, `[2]` the vector `ω_1`,
    /// `[3]` the other spinor `ω_{n-1}`; `E6` uses `ω_1, ω_6`; `E7` uses `ω_7`.
    fn weight_index(&self, class: usize) -> Result<Option<usize>, LatticeError> {
        if class >= self.discriminant_order() {
            return Err(LatticeError::InvalidGlueIndex { component: self.to_string(), index: class });
        }
        if class == 0 {
            return Ok(None);
        }
        let n = self.rank;
        let idx = match (self.kind, class) {
            (RootType::A, i) => i - 1,
            (RootType::D, 1) => n - 1,
            (RootType::D, 2) => 0,
            (RootType::D, _) => n - 2,
            (RootType::E, 1) if n == 6 => 0,
            (RootType::E, _) if n == 6 => 5,
            (RootType::E, _) => 6,
        };
        Ok(Some(idx))
    }

    /// Glue vector for discriminant class `class` in simple-root coordinates.
    pub fn glue_vector(&self, class: usize) -> Result<Vec<BigRational>, LatticeError> {
        let n = self.rank;
        match self.weight_index(class)? {
            None => Ok(vec![BigRational::from_integer(BigInt::from(0)); n]),
            Some(k) => {
                let inv = inverse_rational(&self.cartan().to_rational())?;
                Ok(inv.row(k).to_vec())
            }
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind, self.rank)
    }
}

impl FromStr for Component {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LatticeError::InvalidComponent(s.to_string());
        let mut chars = s.chars();
        let kind = match chars.next() {
            Some('A') => RootType::A,
            Some('D') => RootType::D,
            Some('E') => RootType::E,
            _ => return Err(bad()),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| bad())?;
        Component::new(kind, rank)
    }
}

/// Parses a root-system label such as `A5^4D4`, `E8^3` or `A11D7E6` into its
/// components (with multiplicity, in label order).
pub fn parse_root_system(label: &str) -> Result<Vec<Component>, LatticeError> {
    let bad = || LatticeError::InvalidComponent(label.to_string());
    let bytes = label.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < bytes.len() {
        let start = i;
        if !matches!(bytes[i], b'A' | b'D' | b'E') {
            return Err(bad());
        }
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let comp: Component = label[start..i].parse()?;
        let mut mult = 1usize;
        if i < bytes.len() && bytes[i] == b'^' {
            i += 1;
            let s = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            mult = label[s..i].parse().map_err(|_| bad())?;
        }
        out.extend(std::iter::repeat(comp).take(mult));
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Formats a multiset of components as a label, e.g. `A5^4D4`.
pub fn format_root_system(components: &[Component]) -> String {
    let mut sorted = components.to_vec();
    sorted.sort();
    let mut out = String::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        out.push_str(&sorted[i].to_string());
        if j - i > 1 {
            out.push_str(&format!("^{}", j - i));
        }
        i = j;
    }
    out
}
