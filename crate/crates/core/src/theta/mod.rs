//! Truncated Siegel theta series as formal coefficient tables, and the
//! algebra on them.

mod checks;
mod export;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::enumeration::{Engine, EnumerationError, GramTarget};
use crate::lattice::{Lattice, LatticeError};

pub use checks::{
    block_factorization_check, curated_genus4_targets, distinguishing_report, first_difference, k_identity_check,
    linear_independence_rank, product_coefficient, Distinguishing, FactorizationReport, KIdentityReport, KIdentityRow,
    ScanPlan, ScanStep,
};
pub use export::{parse_series, SERIES_HEADER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaError {
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("weight mismatch: {0} vs {1}")]
    WeightMismatch(Weight, Weight),
    #[error("operation needs series truncated by trace, not sampled on a target list")]
    NotTraceBounded,
    #[error("Siegel operator needs genus at least 1")]
    GenusZero,
    #[error("lattices have different ranks: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("cannot normalize k: the right-hand side vanishes on every supplied target")]
    CannotNormalize,
    #[error("malformed series text: {0}")]
    Format(String),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Half-integral weight, stored doubled (so it equals the lattice rank).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(pub usize);

impl Weight {
    pub fn of_rank(rank: usize) -> Self {
        Weight(rank)
    }

    pub fn twice(self) -> usize {
        self.0
    }
}

impl std::ops::Add for Weight {
    type Output = Weight;
    fn add(self, other: Weight) -> Weight {
        Weight(self.0 + other.0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Which coefficients a truncation knows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Every target with trace at most the bound.
    TraceBound(i64),
    /// Exactly the listed targets.
    Targets(BTreeSet<GramTarget>),
}

impl Domain {
    pub fn contains(&self, t: &GramTarget) -> bool {
        match self {
            Domain::TraceBound(b) => t.trace() <= *b,
            Domain::Targets(set) => set.contains(t),
        }
    }

    /// Largest trace present.
    pub fn trace_bound(&self) -> i64 {
        match self {
            Domain::TraceBound(b) => *b,
            Domain::Targets(set) => set.iter().map(GramTarget::trace).max().unwrap_or(0),
        }
    }

    fn intersect(&self, other: &Domain) -> Domain {
        match (self, other) {
            (Domain::TraceBound(a), Domain::TraceBound(b)) => Domain::TraceBound(*a.min(b)),
            (Domain::Targets(s), d) | (d, Domain::Targets(s)) => {
                Domain::Targets(s.iter().filter(|t| d.contains(t)).cloned().collect())
            }
        }
    }
}

/// Where a series came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Lattice { name: String, fingerprint: String },
    Expression(String),
}

impl Provenance {
    pub fn label(&self) -> &str {
        match self {
            Provenance::Lattice { name, .. } => name,
            Provenance::Expression(e) => e,
        }
    }

    pub fn fingerprint(&self) -> Option<&str> {
        match self {
            Provenance::Lattice { fingerprint, .. } => Some(fingerprint),
            Provenance::Expression(_) => None,
        }
    }
}

/// A theta series (or a formal combination of them) known on `domain`;
/// absent coefficients are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaTruncation {
    pub genus: usize,
    pub domain: Domain,
    pub weight: Weight,
    pub coeffs: BTreeMap<GramTarget, BigInt>,
    pub provenance: Provenance,
}

impl ThetaTruncation {
    /// The constant series 1 (the theta series of the rank-0 lattice).
    pub fn one(genus: usize, bound: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(GramTarget::zero(genus), BigInt::one());
        ThetaTruncation {
            genus,
            domain: Domain::TraceBound(bound),
            weight: Weight(0),
            coeffs,
            provenance: Provenance::Expression("1".into()),
        }
    }

    pub fn coefficient(&self, t: &GramTarget) -> BigInt {
        self.coeffs.get(t).cloned().unwrap_or_default()
    }

    pub fn trace_bound(&self) -> Option<i64> {
        match self.domain {
            Domain::TraceBound(b) => Some(b),
            Domain::Targets(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(Zero::is_zero)
    }

    /// Targets in the domain, for sampled series, or the nonzero support.
    pub fn support(&self) -> Vec<GramTarget> {
        match &self.domain {
            Domain::Targets(set) => set.iter().cloned().collect(),
            Domain::TraceBound(_) => self.coeffs.keys().cloned().collect(),
        }
    }

    /// The same series on a smaller domain.
    pub fn restricted_to(&self, domain: &Domain) -> ThetaTruncation {
        let domain = self.domain.intersect(domain);
        let coeffs = self.coeffs.iter().filter(|(t, _)| domain.contains(t)).map(|(t, c)| (t.clone(), c.clone())).collect();
        ThetaTruncation { domain, coeffs, ..self.clone() }
    }
}

/// `Θ_{L,g}` on every target with trace at most `bound`.
pub fn theta_truncated(
    engine: &Engine,
    lattice: &Lattice,
    genus: usize,
    bound: i64,
) -> Result<ThetaTruncation, ThetaError> {
    let coeffs = engine.representation_profile(lattice, genus, bound)?;
    Ok(ThetaTruncation {
        genus,
        domain: Domain::TraceBound(bound),
        weight: Weight::of_rank(lattice.rank()),
        coeffs,
        provenance: lattice_provenance(lattice),
    })
}

/// `Θ_{L,g}` on an explicit list of targets of one genus.
pub fn theta_sampled(
    engine: &Engine,
    lattice: &Lattice,
    genus: usize,
    targets: &[GramTarget],
) -> Result<ThetaTruncation, ThetaError> {
    let mut coeffs = BTreeMap::new();
    for t in targets {
        if t.genus() != genus {
            return Err(ThetaError::GenusMismatch(genus, t.genus()));
        }
        let c = engine.representation_count(lattice, t)?;
        if !c.is_zero() {
            coeffs.insert(t.clone(), c);
        }
    }
    Ok(ThetaTruncation {
        genus,
        domain: Domain::Targets(targets.iter().cloned().collect()),
        weight: Weight::of_rank(lattice.rank()),
        coeffs,
        provenance: lattice_provenance(lattice),
    })
}

fn lattice_provenance(lattice: &Lattice) -> Provenance {
    Provenance::Lattice { name: lattice.name().to_string(), fingerprint: lattice.fingerprint().to_string() }
}

/// `F − G` with its operands recorded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalDifference {
    pub minuend: String,
    pub subtrahend: String,
    /// Signed coefficients; zero entries are dropped.
    pub series: ThetaTruncation,
}

impl FormalDifference {
    pub fn is_zero(&self) -> bool {
        self.series.is_zero()
    }

    pub fn coefficient(&self, t: &GramTarget) -> BigInt {
        self.series.coefficient(t)
    }

    /// Siegel operator applied to the difference; equal to the difference
    /// of the restrictions.
    pub fn siegel_restrict(&self) -> Result<FormalDifference, ThetaError> {
        Ok(FormalDifference { series: siegel_restrict(&self.series)?, ..self.clone() })
    }
}

/// Coefficientwise difference on the common domain.
pub fn series_difference(first: &ThetaTruncation, second: &ThetaTruncation) -> Result<FormalDifference, ThetaError> {
    if first.genus != second.genus {
        return Err(ThetaError::GenusMismatch(first.genus, second.genus));
    }
    if first.weight != second.weight {
        return Err(ThetaError::WeightMismatch(first.weight, second.weight));
    }
    let domain = first.domain.intersect(&second.domain);
    let keys: BTreeSet<&GramTarget> = first.coeffs.keys().chain(second.coeffs.keys()).collect();
    let coeffs = keys
        .into_iter()
        .filter(|t| domain.contains(t))
        .filter_map(|t| {
            let d = first.coefficient(t) - second.coefficient(t);
            (!d.is_zero()).then(|| (t.clone(), d))
        })
        .collect();
    let (a, b) = (first.provenance.label().to_string(), second.provenance.label().to_string());
    Ok(FormalDifference {
        series: ThetaTruncation {
            genus: first.genus,
            domain,
            weight: first.weight,
            coeffs,
            provenance: Provenance::Expression(format!("({a}) - ({b})")),
        },
        minuend: a,
        subtrahend: b,
    })
}

/// Product of series: coefficients convolve over `T1 + T2 = T`.
pub fn series_product(first: &ThetaTruncation, second: &ThetaTruncation) -> Result<ThetaTruncation, ThetaError> {
    if first.genus != second.genus {
        return Err(ThetaError::GenusMismatch(first.genus, second.genus));
    }
    let (Some(b1), Some(b2)) = (first.trace_bound(), second.trace_bound()) else {
        return Err(ThetaError::NotTraceBounded);
    };
    let bound = b1.min(b2);
    let mut coeffs: BTreeMap<GramTarget, BigInt> = BTreeMap::new();
    for (t1, c1) in first.coeffs.range(..).filter(|(t, _)| t.trace() <= bound) {
        for (t2, c2) in second.coeffs.iter().filter(|(t, _)| t1.trace() + t.trace() <= bound) {
            let t = t1.add(t2).expect("same genus");
            *coeffs.entry(t).or_default() += c1 * c2;
        }
    }
    coeffs.retain(|_, c| !c.is_zero());
    Ok(ThetaTruncation {
        genus: first.genus,
        domain: Domain::TraceBound(bound),
        weight: first.weight + second.weight,
        coeffs,
        provenance: Provenance::Expression(format!(
            "({}) * ({})",
            first.provenance.label(),
            second.provenance.label()
        )),
    })
}

/// The Siegel operator: the genus-`g` series whose coefficient at `T` is the
/// coefficient of `F` at `T ⊕ 0`.
pub fn siegel_restrict(series: &ThetaTruncation) -> Result<ThetaTruncation, ThetaError> {
    if series.genus == 0 {
        return Err(ThetaError::GenusZero);
    }
    let domain = match &series.domain {
        Domain::TraceBound(b) => Domain::TraceBound(*b),
        Domain::Targets(set) => Domain::Targets(set.iter().filter_map(GramTarget::drop_zero_last).collect()),
    };
    let coeffs = series
        .coeffs
        .iter()
        .filter_map(|(t, c)| t.drop_zero_last().map(|s| (s, c.clone())))
        .collect();
    Ok(ThetaTruncation { genus: series.genus - 1, domain, weight: series.weight, coeffs, provenance: series.provenance.clone() })
}
