//! Invariants of a lattice computed by enumeration: validation, minimum,
//! extremality and the root system.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::roots::{format_root_system, parse_root_system, Component, RootType};
use super::{Lattice, LatticeError};
use crate::exactnum::{rank_exact, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub symmetric: bool,
    pub even: bool,
    #[serde(with = "crate::decimal")]
    pub det: BigInt,
    pub positive_definite: bool,
    /// `None` when the lattice is not positive definite or has rank 0.
    pub min_norm: Option<i64>,
    pub root_count: Option<u64>,
}

impl ValidationReport {
    pub fn is_even_unimodular(&self) -> bool {
        self.symmetric && self.even && self.positive_definite && self.det == BigInt::from(1)
    }
}

/// Runs every invariant check exactly; failures are reported, not raised.
pub fn validate(lattice: &Lattice) -> ValidationReport {
    let positive_definite = lattice.is_positive_definite();
    let (min_norm, root_count) = if positive_definite {
        let min = minimum_norm(lattice).ok();
        let roots = crate::enumeration::shell_counts(lattice, 2).ok().map(|c| c[2]);
        (min, roots)
    } else {
        (None, None)
    };
    ValidationReport {
        symmetric: lattice.gram().is_symmetric(),
        even: lattice.is_even(),
        det: lattice.determinant(),
        positive_definite,
        min_norm,
        root_count,
    }
}

/// Smallest norm of a nonzero vector.
pub fn minimum_norm(lattice: &Lattice) -> Result<i64, LatticeError> {
    let n = lattice.rank();
    if n == 0 {
        return Err(LatticeError::EmptyLattice);
    }
    // Some basis vector has norm equal to the smallest diagonal entry, so
    // that bound always finds the minimum.
    let bound = (0..n).map(|i| lattice.gram_i64()[i * n + i]).min().expect("rank > 0");
    let en = lattice.enumerator()?;
    let mut best = i64::MAX;
    en.for_each_half(bound, &[], |_, q| best = best.min(q))?;
    Ok(best)
}

/// Upper bound `2⌊N/24⌋ + 2` on the minimum of an even unimodular lattice of
/// rank `N`.
pub fn extremal_bound(rank: usize) -> i64 {
    2 * (rank / 24) as i64 + 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalityReport {
    pub bound: i64,
    pub min_norm: i64,
    pub is_extremal: bool,
}

pub fn extremality_check(lattice: &Lattice) -> Result<ExtremalityReport, LatticeError> {
    let bound = extremal_bound(lattice.rank());
    let min_norm = minimum_norm(lattice)?;
    Ok(ExtremalityReport { bound, min_norm, is_extremal: min_norm == bound })
}

/// Hypotheses of the stable-equation criterion on invariants alone: equal
/// rank, equal minimum, and `rank / μ ≤ 8`.
pub fn stable_eq_hyp_predicate_for(rank_a: usize, mu_a: i64, rank_b: usize, mu_b: i64) -> bool {
    rank_a == rank_b && mu_a == mu_b && mu_a > 0 && (rank_a as i64) <= 8 * mu_a
}

pub fn stable_eq_hyp_predicate(first: &Lattice, second: &Lattice) -> Result<bool, LatticeError> {
    Ok(stable_eq_hyp_predicate_for(
        first.rank(),
        minimum_norm(first)?,
        second.rank(),
        minimum_norm(second)?,
    ))
}

/// Decomposition of the norm-2 vectors into irreducible ADE components.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootSystemReport {
    /// Components with multiplicity, in label order.
    pub components: BTreeMap<Component, usize>,
    pub root_count: u64,
}

impl RootSystemReport {
    pub fn label(&self) -> String {
        let flat: Vec<Component> =
            self.components.iter().flat_map(|(c, &m)| std::iter::repeat(*c).take(m)).collect();
        format_root_system(&flat)
    }

    /// Whether the components agree, as a multiset, with a label such as
    /// `E8D16`.
    pub fn matches_label(&self, label: &str) -> Result<bool, LatticeError> {
        let mut expected: BTreeMap<Component, usize> = BTreeMap::new();
        for c in parse_root_system(label)? {
            *expected.entry(c).or_default() += 1;
        }
        Ok(expected == self.components)
    }

    /// The Coxeter number shared by every component, if there is one.
    pub fn coxeter_number(&self) -> Option<u64> {
        let mut hs = self.components.keys().map(Component::coxeter_number);
        let h = hs.next()?;
        hs.all(|x| x == h).then_some(h)
    }
}

impl fmt::Display for RootSystemReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            write!(f, "(no roots)")
        } else {
            write!(f, "{} ({} roots)", self.label(), self.root_count)
        }
    }
}

fn classify(rank: usize, roots: u64) -> Option<Component> {
    let r = rank as u64;
    let kind = if roots == r * (r + 1) {
        RootType::A
    } else if rank >= 4 && roots == 2 * r * (r - 1) {
        RootType::D
    } else if matches!((rank, roots), (6, 72) | (7, 126) | (8, 240)) {
        RootType::E
    } else {
        return None;
    };
    Some(Component { kind, rank })
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Connected components of the roots under "nonzero inner product",
/// classified by span rank and size.
pub fn root_system(lattice: &Lattice) -> Result<RootSystemReport, LatticeError> {
    let n = lattice.rank();
    if n == 0 {
        return Ok(RootSystemReport::default());
    }
    let en = lattice.enumerator()?;
    let mut half: Vec<Vec<i64>> = Vec::new();
    en.for_each_half(2, &[], |x, q| {
        if q == 2 {
            half.push(x.to_vec());
        }
    })?;
    // Images G·y make each inner product a plain dot product.
    let gram = lattice.gram_i64();
    let images: Vec<Vec<i64>> = half
        .iter()
        .map(|y| (0..n).map(|i| (0..n).map(|j| gram[i * n + j] * y[j]).sum()).collect())
        .collect();
    let mut parent: Vec<usize> = (0..half.len()).collect();
    for a in 0..half.len() {
        for b in a + 1..half.len() {
            let dot: i64 = half[a].iter().zip(&images[b]).map(|(p, q)| p * q).sum();
            if dot != 0 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in 0..half.len() {
        let r = find(&mut parent, a);
        groups.entry(r).or_default().push(a);
    }
    let mut report = RootSystemReport { components: BTreeMap::new(), root_count: 2 * half.len() as u64 };
    for members in groups.values() {
        let flat: Vec<i64> = members.iter().flat_map(|&a| half[a].iter().copied()).collect();
        let rank = rank_exact(&IntMatrix::from_i64(members.len(), n, &flat));
        let roots = 2 * members.len() as u64;
        let comp = classify(rank, roots).ok_or(LatticeError::UnrecognizedRootSystem { rank, roots })?;
        *report.components.entry(comp).or_default() += 1;
    }
    Ok(report)
}
