//! Fourier–Jacobi coefficients as joint counts, and the root second-moment
//! identities (Venkov proportionality and the heat identity).

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::enumeration::{Engine, EnumerationError, ExactEnumerator, GramTarget};
use crate::lattice::Lattice;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JacobiError {
    #[error("lattice {0} has no roots")]
    NoRoots(String),
    #[error("root counts differ: {0} vs {1}")]
    RootCountMismatch(u64, u64),
    #[error("constant must be positive, got {0}")]
    BadConstant(BigRational),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

/// Counts `N(S, ℓ)` of `(x_1..x_g, y)` with `Gram(x) = S`, `Q(y) = 2n` and
/// `(y, x_i) = ℓ_i`, for every `S` with trace at most `trace_bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiCoefficient {
    pub genus: usize,
    pub index: i64,
    pub trace_bound: i64,
    pub entries: BTreeMap<(GramTarget, Vec<i64>), BigInt>,
}

impl JacobiCoefficient {
    /// Distinct `S` with at least one nonzero count.
    pub fn targets(&self) -> BTreeSet<GramTarget> {
        self.entries.keys().map(|(s, _)| s.clone()).collect()
    }

    fn rows<'a>(&'a self, s: &'a GramTarget) -> impl Iterator<Item = (&'a Vec<i64>, &'a BigInt)> + 'a {
        let start = (s.clone(), Vec::new());
        self.entries.range(start..).take_while(move |((t, _), _)| t == s).map(|((_, ell), c)| (ell, c))
    }

    /// `Σ_ℓ N(S, ℓ)`.
    pub fn marginal(&self, s: &GramTarget) -> BigInt {
        self.rows(s).map(|(_, c)| c).sum()
    }

    /// `Σ_ℓ ℓ_i N(S, ℓ)`.
    pub fn first_moment(&self, s: &GramTarget, i: usize) -> BigInt {
        self.rows(s).map(|(ell, c)| c * ell[i]).sum()
    }

    /// `Σ_ℓ ℓ_i ℓ_j N(S, ℓ)`.
    pub fn second_moment(&self, s: &GramTarget, i: usize, j: usize) -> BigInt {
        self.rows(s).map(|(ell, c)| c * (ell[i] * ell[j])).sum()
    }

    /// Every stored key satisfies `ℓ_i² ≤ 2n·S_ii`.
    pub fn respects_cauchy_schwarz(&self) -> bool {
        self.entries.keys().all(|(s, ell)| ell.iter().enumerate().all(|(i, l)| l * l <= 2 * self.index * s.get(i, i)))
    }
}

pub fn jacobi_coefficient(
    engine: &Engine,
    lattice: &Lattice,
    genus: usize,
    index: i64,
    trace_bound: i64,
) -> Result<JacobiCoefficient, JacobiError> {
    let entries = engine.jacobi_counts(lattice, genus, index, trace_bound)?;
    Ok(JacobiCoefficient { genus, index, trace_bound, entries })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VenkovReport {
    pub lattice: String,
    pub fingerprint: String,
    pub r2: u64,
    /// `c` in `r2·Q(v) = c·Σ_{y∈R2} (y, v)²`, from the first root.
    pub constant: Option<BigRational>,
    pub checked_norm_bound: i64,
    /// Nonzero vectors checked, both signs.
    pub vectors_checked: u64,
    /// A vector, in lattice coordinates, that disagrees with `constant`.
    pub counterexample: Option<Vec<i64>>,
}

impl VenkovReport {
    pub fn consistent(&self) -> bool {
        self.constant.is_some() && self.counterexample.is_none()
    }
}

/// Half of the roots, one per `±` pair, in the enumerator's basis.
fn half_roots(en: &ExactEnumerator) -> Result<Vec<Vec<i64>>, EnumerationError> {
    let mut roots = Vec::new();
    en.for_each_half(2, &[], |x, q| {
        if q == 2 {
            roots.push(x.to_vec());
        }
    })?;
    Ok(roots)
}

/// `Σ_{y∈R2} (Gy)(Gy)ᵀ` over all roots, so `vᵀ P v = Σ_y (y, v)²`.
fn moment_matrix(en: &ExactEnumerator, roots: &[Vec<i64>]) -> Vec<i64> {
    let n = en.dim();
    let gram = en.gram();
    let mut p = vec![0i64; n * n];
    for y in roots {
        let image: Vec<i64> = (0..n).map(|i| (0..n).map(|j| gram[i * n + j] * y[j]).sum()).collect();
        for i in 0..n {
            for j in 0..n {
                p[i * n + j] += 2 * image[i] * image[j];
            }
        }
    }
    p
}

/// [`moment_matrix`] in the lattice's own basis.
pub fn root_moment_matrix(lattice: &Lattice) -> Result<Vec<i64>, JacobiError> {
    let en = lattice.enumerator()?;
    Ok(moment_matrix(&en, &half_roots(&en)?))
}

/// Per-prefix outcome: vectors visited and the first one off the reference
/// ratio.
struct Chunk {
    visited: u64,
    bad: Option<Vec<i64>>,
}

/// Checks `r2·Q(v) = c·Σ_{y∈R2}(y, v)²` with one `c` for every nonzero `v`
/// with `Q(v) ≤ bound`. `c` is fixed by the first root.
pub fn venkov_constant(engine: &Engine, lattice: &Lattice, bound: i64) -> Result<VenkovReport, JacobiError> {
    let n = lattice.rank();
    let (en, transform) = lattice.enumerator_for_bound(bound.max(2))?;
    let roots = if n == 0 { Vec::new() } else { half_roots(&en)? };
    let Some(first_root) = roots.first() else {
        return Err(JacobiError::NoRoots(lattice.name().to_string()));
    };
    let r2 = 2 * roots.len() as u64;
    let moment = moment_matrix(&en, &roots);
    let aux0: i64 = (0..n).map(|i| (0..n).map(|j| moment[i * n + j] * first_root[i] * first_root[j]).sum::<i64>()).sum();
    let (q0, a0) = (2i128, i128::from(aux0));
    let prefixes = en.prefixes(bound, crate::enumeration::prefix_depth(n))?;
    let chunks: Vec<Result<Chunk, EnumerationError>> = engine.pool().install(|| {
        prefixes
            .par_iter()
            .map(|prefix| {
                let mut chunk = Chunk { visited: 0, bad: None };
                en.for_each_half_with_aux(bound, prefix, &moment, |x, q, aux| {
                    chunk.visited += 2;
                    if i128::from(q) * a0 != q0 * aux && chunk.bad.is_none() {
                        chunk.bad = Some(x.to_vec());
                    }
                })?;
                Ok(chunk)
            })
            .collect()
    });
    let mut counterexample = None;
    let mut vectors_checked = 0u64;
    for chunk in chunks {
        let chunk = chunk?;
        vectors_checked += chunk.visited;
        if counterexample.is_none() {
            counterexample = chunk.bad;
        }
    }
    let counterexample = counterexample.map(|y| {
        (0..n)
            .map(|j| (0..n).map(|i| y[i] * transform.get(i, j).to_i64().expect("unimodular transform fits")).sum())
            .collect()
    });
    let constant = (aux0 != 0).then(|| BigRational::new(BigInt::from(r2) * 2, BigInt::from(aux0)));
    Ok(VenkovReport {
        lattice: lattice.name().to_string(),
        fingerprint: lattice.fingerprint().to_string(),
        r2,
        constant,
        checked_norm_bound: bound,
        vectors_checked,
        counterexample,
    })
}

/// One `(S, i, j)` instance of `r2·S_ij·r(S) = c·Σ_ℓ ℓ_iℓ_j N(S, ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeatRow {
    pub target: GramTarget,
    pub i: usize,
    pub j: usize,
    pub lhs: BigInt,
    pub rhs: BigRational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeatReport {
    pub lattice: String,
    pub fingerprint: String,
    pub genus: usize,
    pub trace_bound: i64,
    pub constant: BigRational,
    pub rows: Vec<HeatRow>,
}

impl HeatReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

fn heat_rows(
    engine: &Engine,
    lattice: &Lattice,
    r2: &BigInt,
    table: &JacobiCoefficient,
    target: &GramTarget,
    constant: &BigRational,
) -> Result<Vec<HeatRow>, JacobiError> {
    let rep = engine.representation_count(lattice, target)?;
    let g = target.genus();
    let mut rows = Vec::new();
    for i in 0..g {
        for j in i..g {
            let lhs = r2 * target.get(i, j) * &rep;
            let rhs = constant * BigRational::from(table.second_moment(target, i, j));
            let holds = BigRational::from(lhs.clone()) == rhs;
            rows.push(HeatRow { target: target.clone(), i, j, lhs, rhs, holds });
        }
    }
    Ok(rows)
}

fn root_count(engine: &Engine, lattice: &Lattice) -> Result<BigInt, JacobiError> {
    if lattice.rank() == 0 {
        return Err(JacobiError::NoRoots(lattice.name().to_string()));
    }
    let r2 = engine.shell_count(lattice, 2)?;
    if r2.is_zero() {
        return Err(JacobiError::NoRoots(lattice.name().to_string()));
    }
    Ok(r2)
}

/// Heat identity at one `S`, with `N` taken from the index-1 coefficient
/// truncated at `trace(S)`.
pub fn heat_coefficient_check(
    engine: &Engine,
    lattice: &Lattice,
    target: &GramTarget,
    constant: &BigRational,
) -> Result<Vec<HeatRow>, JacobiError> {
    if !constant.is_positive() {
        return Err(JacobiError::BadConstant(constant.clone()));
    }
    let r2 = root_count(engine, lattice)?;
    let table = jacobi_coefficient(engine, lattice, target.genus(), 1, target.trace())?;
    heat_rows(engine, lattice, &r2, &table, target, constant)
}

/// Heat identity at every `S` of the genus with trace at most `bound` that
/// the lattice represents.
pub fn heat_check(
    engine: &Engine,
    lattice: &Lattice,
    genus: usize,
    bound: i64,
    constant: &BigRational,
) -> Result<HeatReport, JacobiError> {
    if !constant.is_positive() {
        return Err(JacobiError::BadConstant(constant.clone()));
    }
    let r2 = root_count(engine, lattice)?;
    let table = jacobi_coefficient(engine, lattice, genus, 1, bound)?;
    let mut rows = Vec::new();
    for target in engine.representation_profile(lattice, genus, bound)?.keys() {
        rows.extend(heat_rows(engine, lattice, &r2, &table, target, constant)?);
    }
    Ok(HeatReport {
        lattice: lattice.name().to_string(),
        fingerprint: lattice.fingerprint().to_string(),
        genus,
        trace_bound: bound,
        constant: constant.clone(),
        rows,
    })
}

/// One `(S, i, j)` of the pair check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairMomentRow {
    pub target: GramTarget,
    pub i: usize,
    pub j: usize,
    /// `Σ_ℓ ℓ_iℓ_j (N_Λ − N_Γ)(S, ℓ)`.
    pub moment_difference: BigInt,
    /// `(r2/c)·S_ij·(r_Λ(S) − r_Γ(S))`.
    pub predicted: BigRational,
    pub first_holds: bool,
    pub second_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairMomentReport {
    pub r2: u64,
    pub rows: Vec<PairMomentRow>,
}

impl PairMomentReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.first_holds && r.second_holds && BigRational::from(r.moment_difference.clone()) == r.predicted)
    }
}

/// For two lattices with the same root count, checks that the second
/// `ℓ`-moments of the index-1 coefficients are fixed by the representation
/// numbers through the heat identity, separately and for the difference.
pub fn pair_difference_f1_check(
    engine: &Engine,
    first: &Lattice,
    second: &Lattice,
    genus: usize,
    bound: i64,
    constant: &BigRational,
) -> Result<PairMomentReport, JacobiError> {
    let (ra, rb) = (root_count(engine, first)?, root_count(engine, second)?);
    if ra != rb {
        let as_u64 = |v: &BigInt| u64::try_from(v).unwrap_or(u64::MAX);
        return Err(JacobiError::RootCountMismatch(as_u64(&ra), as_u64(&rb)));
    }
    let a = heat_check(engine, first, genus, bound, constant)?;
    let b = heat_check(engine, second, genus, bound, constant)?;
    let ja = jacobi_coefficient(engine, first, genus, 1, bound)?;
    let jb = jacobi_coefficient(engine, second, genus, 1, bound)?;
    let index = |rows: &[HeatRow]| -> BTreeMap<(GramTarget, usize, usize), bool> {
        rows.iter().map(|r| ((r.target.clone(), r.i, r.j), r.holds)).collect()
    };
    let (ha, hb) = (index(&a.rows), index(&b.rows));
    let keys: BTreeSet<&(GramTarget, usize, usize)> = ha.keys().chain(hb.keys()).collect();
    let scale = BigRational::from(ra.clone()) / constant;
    let mut rows = Vec::new();
    for key @ (target, i, j) in keys {
        let reps = engine.representation_count(first, target)? - engine.representation_count(second, target)?;
        rows.push(PairMomentRow {
            target: target.clone(),
            i: *i,
            j: *j,
            moment_difference: ja.second_moment(target, *i, *j) - jb.second_moment(target, *i, *j),
            predicted: &scale * BigRational::from(reps * target.get(*i, *j)),
            first_holds: ha.get(key).copied().unwrap_or(true),
            second_holds: hb.get(key).copied().unwrap_or(true),
        });
    }
    Ok(PairMomentReport { r2: u64::try_from(&ra).unwrap_or(u64::MAX), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::enumerate_shells;
    use crate::lattice::{direct_sum, root_lattice, RootType};

    fn t(rows: &[&[i64]]) -> GramTarget {
        GramTarget::from_rows(rows).unwrap()
    }

    #[test]
    fn e8_index_one() {
        let e8 = root_lattice(RootType::E, 8).unwrap();
        let f = jacobi_coefficient(Engine::shared(), &e8, 1, 1, 2).unwrap();
        let zero = t(&[&[0]]);
        assert_eq!(f.rows(&zero).collect::<Vec<_>>(), vec![(&vec![0], &BigInt::from(240))]);
        let two = t(&[&[2]]);
        assert_eq!(f.marginal(&two), BigInt::from(240 * 240));
        assert_eq!(f.first_moment(&two, 0), BigInt::zero());
        // Inner products of a root with all roots: ±2 once, ±1 56 times.
        assert_eq!(f.second_moment(&two, 0, 0), BigInt::from(240 * 120));
        assert!(f.respects_cauchy_schwarz());
    }

    #[test]
    fn empty_without_short_vectors() {
        let l = Lattice::from_gram("4", crate::IntMatrix::from_rows(&[[4]])).unwrap();
        assert!(jacobi_coefficient(Engine::shared(), &l, 1, 1, 4).unwrap().entries.is_empty());
        assert!(matches!(venkov_constant(Engine::shared(), &l, 4), Err(JacobiError::NoRoots(_))));
    }

    /// Direct double loop over vectors and roots.
    fn brute_constant_consistent(lattice: &Lattice, bound: i64) -> (BigRational, bool) {
        let table = enumerate_shells(lattice, bound, true).unwrap();
        let roots = table.shells[&2].vectors.clone().unwrap();
        let r2 = roots.len() as i64;
        let mut c: Option<BigRational> = None;
        let mut ok = true;
        for (&q, shell) in table.shells.range(1..) {
            for v in shell.vectors.as_ref().unwrap() {
                let m: i64 = roots.iter().map(|y| lattice.inner(y, v).pow(2)).sum();
                let here = BigRational::new((r2 * q).into(), m.into());
                match &c {
                    None => c = Some(here),
                    Some(c0) => ok &= *c0 == here,
                }
            }
        }
        (c.unwrap(), ok)
    }

    #[test]
    fn venkov_matches_brute_force() {
        let e8 = root_lattice(RootType::E, 8).unwrap();
        let report = venkov_constant(Engine::shared(), &e8, 6).unwrap();
        assert!(report.consistent());
        let (c, ok) = brute_constant_consistent(&e8, 6);
        assert!(ok);
        assert_eq!(report.constant, Some(c));
        assert_eq!(report.constant, Some(BigRational::from(BigInt::from(4))));
        assert_eq!(report.vectors_checked, 240 + 2160 + 6720);

        // A1 ⊕ A2 has two root components of different Coxeter number.
        let mixed = direct_sum(&root_lattice(RootType::A, 1).unwrap(), &root_lattice(RootType::A, 2).unwrap());
        let report = venkov_constant(Engine::shared(), &mixed, 4).unwrap();
        assert!(!report.consistent());
        assert!(!brute_constant_consistent(&mixed, 4).1);
    }

    #[test]
    fn venkov_survives_basis_permutation() {
        let e8 = root_lattice(RootType::E, 8).unwrap();
        let permuted = e8.permuted(&[7, 3, 0, 5, 1, 6, 2, 4]).unwrap();
        let a = venkov_constant(Engine::shared(), &e8, 4).unwrap();
        let b = venkov_constant(Engine::shared(), &permuted, 4).unwrap();
        assert!(b.consistent());
        assert_eq!(a.constant, b.constant);
    }

    #[test]
    fn heat_identity_on_e8() {
        let e8 = root_lattice(RootType::E, 8).unwrap();
        let c = venkov_constant(Engine::shared(), &e8, 4).unwrap().constant.unwrap();
        let report = heat_check(Engine::shared(), &e8, 2, 4, &c).unwrap();
        assert!(report.holds());
        assert!(report.rows.iter().any(|r| r.i != r.j && r.lhs != BigInt::zero()));
        let rows = heat_coefficient_check(Engine::shared(), &e8, &t(&[&[2, 1], &[1, 2]]), &c).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.holds));
        let wrong = BigRational::from(BigInt::from(5));
        assert!(!heat_check(Engine::shared(), &e8, 1, 2, &wrong).unwrap().holds());
    }

    #[test]
    fn pair_check_needs_equal_roots() {
        let e8 = root_lattice(RootType::E, 8).unwrap();
        let d8 = root_lattice(RootType::D, 8).unwrap();
        let c = BigRational::from(BigInt::from(4));
        assert_eq!(
            pair_difference_f1_check(Engine::shared(), &e8, &d8, 1, 2, &c).unwrap_err(),
            JacobiError::RootCountMismatch(240, 112)
        );
        assert!(pair_difference_f1_check(Engine::shared(), &e8, &e8, 2, 4, &c).unwrap().holds());
    }
}
