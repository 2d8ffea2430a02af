//! Coefficient-level identity checks built on truncated series.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{theta_truncated, ThetaError, ThetaTruncation};
use crate::enumeration::{Engine, GramTarget};
use crate::exactnum::{rank_exact, IntMatrix};
use crate::lattice::{registry, Lattice};

/// `Σ_{T1+T2=T} F(T1)·G(T2)` for a single target; both series must know
/// every summand.
pub fn product_coefficient(first: &ThetaTruncation, second: &ThetaTruncation, target: &GramTarget) -> BigInt {
    target
        .decompositions()
        .iter()
        .map(|(a, b)| first.coefficient(a) * second.coefficient(b))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationReport {
    pub first: GramTarget,
    pub second: GramTarget,
    /// Off-diagonal blocks `C` that occur.
    pub blocks: usize,
    /// `Σ_C r([[T1, C], [Cᵀ, T2]])`.
    pub sum: BigInt,
    /// `r(T1)·r(T2)`.
    pub product: BigInt,
    /// Every block count agreed with an independent count of the big matrix.
    pub recount_consistent: bool,
}

impl FactorizationReport {
    pub fn holds(&self) -> bool {
        self.sum == self.product && self.recount_consistent
    }
}

/// Checks that the counts of the block matrices `[[T1, C], [Cᵀ, T2]]`
/// over all `C` add up to `r(T1)·r(T2)`.
pub fn block_factorization_check(
    engine: &Engine,
    lattice: &Lattice,
    first: &GramTarget,
    second: &GramTarget,
) -> Result<FactorizationReport, ThetaError> {
    let completions = engine.block_completions(lattice, first, second)?;
    let mut sum = BigInt::zero();
    let mut recount_consistent = true;
    for (cross, count) in &completions {
        let big = GramTarget::block(first, second, cross);
        if engine.representation_count(lattice, &big)? != *count {
            recount_consistent = false;
        }
        sum += count;
    }
    let product = engine.representation_count(lattice, first)? * engine.representation_count(lattice, second)?;
    Ok(FactorizationReport {
        first: first.clone(),
        second: second.clone(),
        blocks: completions.len(),
        sum,
        product,
        recount_consistent,
    })
}

/// One genus of a distinguishing scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScanStep {
    /// Every target of the genus with trace at most `bound`.
    Full { genus: usize, bound: i64 },
    /// Only the listed targets.
    Targets { genus: usize, targets: Vec<GramTarget> },
}

impl ScanStep {
    pub fn genus(&self) -> usize {
        match self {
            ScanStep::Full { genus, .. } | ScanStep::Targets { genus, .. } => *genus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanPlan {
    pub steps: Vec<ScanStep>,
}

impl ScanPlan {
    /// Full scans of genus `1..=max_genus` at one trace bound.
    pub fn uniform(max_genus: usize, bound: i64) -> Self {
        ScanPlan { steps: (1..=max_genus).map(|genus| ScanStep::Full { genus, bound }).collect() }
    }

    /// Full scans up to genus 3 with the given per-genus bounds, then the
    /// curated genus-4 targets.
    pub fn with_curated_genus4(bounds: &[i64], max_genus: usize) -> Self {
        let mut steps: Vec<ScanStep> = (1..=max_genus.min(3))
            .map(|genus| ScanStep::Full { genus, bound: bounds[(genus - 1).min(bounds.len() - 1)] })
            .collect();
        if max_genus >= 4 {
            steps.push(ScanStep::Targets { genus: 4, targets: curated_genus4_targets() });
        }
        ScanPlan { steps }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Distinguishing {
    Differs { genus: usize, target: GramTarget, first: BigInt, second: BigInt },
    Indistinguishable { targets_compared: usize },
}

/// First target, in canonical order, where two truncations differ.
pub fn first_difference(first: &ThetaTruncation, second: &ThetaTruncation) -> Option<(GramTarget, BigInt, BigInt)> {
    let keys: BTreeSet<&GramTarget> = first.coeffs.keys().chain(second.coeffs.keys()).collect();
    keys.into_iter().find_map(|t| {
        let (a, b) = (first.coefficient(t), second.coefficient(t));
        (a != b).then(|| (t.clone(), a, b))
    })
}

/// Scans the plan genus by genus and stops at the first differing
/// coefficient.
pub fn distinguishing_report(
    engine: &Engine,
    first: &Lattice,
    second: &Lattice,
    plan: &ScanPlan,
) -> Result<Distinguishing, ThetaError> {
    if first.rank() != second.rank() {
        return Err(ThetaError::RankMismatch(first.rank(), second.rank()));
    }
    let mut compared = 0usize;
    for step in &plan.steps {
        match step {
            ScanStep::Full { genus, bound } => {
                let a = theta_truncated(engine, first, *genus, *bound)?;
                let b = theta_truncated(engine, second, *genus, *bound)?;
                if let Some((target, x, y)) = first_difference(&a, &b) {
                    return Ok(Distinguishing::Differs { genus: *genus, target, first: x, second: y });
                }
                compared += a.coeffs.keys().chain(b.coeffs.keys()).collect::<BTreeSet<_>>().len();
            }
            ScanStep::Targets { genus, targets } => {
                let mut sorted = targets.clone();
                sorted.sort();
                for target in sorted {
                    let x = engine.representation_count(first, &target)?;
                    let y = engine.representation_count(second, &target)?;
                    if x != y {
                        return Ok(Distinguishing::Differs { genus: *genus, target, first: x, second: y });
                    }
                    compared += 1;
                }
            }
        }
    }
    Ok(Distinguishing::Indistinguishable { targets_compared: compared })
}

/// Rank over `Q` of the matrix whose rows are the coefficient vectors.
pub fn linear_independence_rank(series: &[ThetaTruncation]) -> Result<usize, ThetaError> {
    let Some(head) = series.first() else { return Ok(0) };
    for s in series {
        if s.genus != head.genus {
            return Err(ThetaError::GenusMismatch(head.genus, s.genus));
        }
    }
    let columns: BTreeSet<&GramTarget> = series.iter().flat_map(|s| s.coeffs.keys()).collect();
    let entries: Vec<BigInt> =
        series.iter().flat_map(|s| columns.iter().map(|t| s.coefficient(t)).collect::<Vec<_>>()).collect();
    Ok(rank_exact(&IntMatrix::new(series.len(), columns.len(), entries)))
}

fn target(rows: &[[i64; 4]; 4]) -> GramTarget {
    GramTarget::from_rows(rows).expect("curated target is valid")
}

/// Diverse genus-4 targets of trace at most 8, in canonical order.
pub fn curated_genus4_targets() -> Vec<GramTarget> {
    let mut out = vec![
        GramTarget::zero(4),
        target(&[[2, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]),
        target(&[[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]]),
        // A2 ⊕ A2
        target(&[[2, -1, 0, 0], [-1, 2, 0, 0], [0, 0, 2, -1], [0, 0, -1, 2]]),
        // A4
        target(&[[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 2]]),
        // D4, branch node last
        target(&[[2, 0, 0, -1], [0, 2, 0, -1], [0, 0, 2, -1], [-1, -1, -1, 2]]),
    ];
    for a in -1..=1 {
        out.push(target(&[[2, a, 0, 0], [a, 2, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]));
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KIdentityRow {
    pub target: GramTarget,
    /// `r_Λ(T) − r_Γ(T)`.
    pub lhs: BigInt,
    /// `(Θ_E8 · (Θ_{E8⊕E8} − Θ_{D16+}))(T)`.
    pub rhs: BigInt,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KIdentityReport {
    pub normalizer: GramTarget,
    pub k: BigRational,
    pub rows: Vec<KIdentityRow>,
}

impl KIdentityReport {
    pub fn verified(&self) -> bool {
        !self.k.is_zero() && self.rows.iter().all(|r| r.holds)
    }
}

/// Finds `k` from the first target where the right side is nonzero and
/// checks `Θ_Λ − Θ_Γ = k·Θ_E8·(Θ_{E8⊕E8} − Θ_{D16+})` on every target.
pub fn k_identity_check(
    engine: &Engine,
    first: &Lattice,
    second: &Lattice,
    targets: &[GramTarget],
) -> Result<KIdentityReport, ThetaError> {
    if first.rank() != second.rank() {
        return Err(ThetaError::RankMismatch(first.rank(), second.rank()));
    }
    let e8 = registry::resolve("E8")?;
    let e8e8 = registry::resolve("E8+E8")?;
    let d16 = registry::resolve("D16+")?;
    let mut schottky: BTreeMap<GramTarget, BigInt> = BTreeMap::new();
    let mut rows = Vec::new();
    for t in targets {
        let mut rhs = BigInt::zero();
        for (a, b) in t.decompositions() {
            let outer = engine.representation_count(&e8, &a)?;
            if outer.is_zero() {
                continue;
            }
            let inner = match schottky.get(&b) {
                Some(v) => v.clone(),
                None => {
                    let v = engine.representation_count(&e8e8, &b)? - engine.representation_count(&d16, &b)?;
                    schottky.insert(b.clone(), v.clone());
                    v
                }
            };
            rhs += outer * inner;
        }
        let lhs = engine.representation_count(first, t)? - engine.representation_count(second, t)?;
        rows.push(KIdentityRow { target: t.clone(), lhs, rhs, holds: false });
    }
    let normal = rows.iter().find(|r| !r.rhs.is_zero()).ok_or(ThetaError::CannotNormalize)?;
    let k = BigRational::new(normal.lhs.clone(), normal.rhs.clone());
    let normalizer = normal.target.clone();
    for r in rows.iter_mut() {
        r.holds = BigRational::from(r.lhs.clone()) == &k * BigRational::from(r.rhs.clone());
    }
    Ok(KIdentityReport { normalizer, k, rows })
}
