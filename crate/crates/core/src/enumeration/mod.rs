//! Exact counting of lattice vectors and of vector tuples with a given Gram
//! matrix.

mod bitsets;
mod cache;
mod fincke_pohst;
mod shells;
mod target;
mod tuples;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::lattice::Lattice;
pub use cache::{CacheStats, CoefficientCache, CACHE_ENV};
pub use fincke_pohst::ExactEnumerator;
pub(crate) use shells::prefix_depth;
pub use shells::{PackedVectors, Shell, ShellTable};
pub use target::{all_targets, GramTarget};
use tuples::{pair_list, search, Histogram, PairRule, TupleQuery, MAX_SLOTS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("norm bound or Gram minors too large for 64-bit enumeration")]
    Overflow,
    #[error("norm bound {0} is negative")]
    NegativeBound(i64),
    #[error("vector coordinates too large for packed inner products")]
    CoordinateOverflow,
    #[error("invalid Gram target: {0}")]
    InvalidTarget(String),
    #[error("histogram of free inner products would be too large")]
    HistogramTooLarge,
    #[error("tuple search supports at most {MAX_SLOTS} nonzero slots, got {0}")]
    TooManySlots(usize),
}

/// Worker pool plus coefficient cache; every counting entry point lives
/// here. Results never depend on the number of workers.
#[derive(Debug)]
pub struct Engine {
    pool: rayon::ThreadPool,
    jobs: usize,
    cache: CoefficientCache,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl Engine {
    /// `jobs = 0` uses the available parallelism.
    pub fn new(jobs: usize) -> Self {
        let jobs = if jobs == 0 { default_jobs() } else { jobs };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .thread_name(|i| format!("thetalab-{i}"))
            .build()
            .expect("thread pool");
        Engine { pool, jobs, cache: CoefficientCache::in_memory() }
    }

    pub fn with_cache(mut self, cache: CoefficientCache) -> Self {
        self.cache = cache;
        self
    }

    /// Process-wide engine used by the free functions of this module.
    pub fn shared() -> &'static Engine {
        static SHARED: OnceLock<Engine> = OnceLock::new();
        SHARED.get_or_init(|| Engine::new(0))
    }

    pub fn jobs(&self) -> usize {
        self.jobs
    }

    pub fn cache(&self) -> &CoefficientCache {
        &self.cache
    }

    pub(crate) fn pool(&self) -> &rayon::ThreadPool {
        &self.pool
    }

    fn cached<T>(
        &self,
        lattice: &Lattice,
        key: &str,
        decode: impl Fn(&str) -> Option<T>,
        encode: impl Fn(&T) -> String,
        compute: impl FnOnce() -> Result<T, EnumerationError>,
    ) -> Result<T, EnumerationError> {
        let fp = lattice.fingerprint();
        if let Some(text) = self.cache.get(fp, key) {
            if let Some(v) = decode(&text) {
                return Ok(v);
            }
            log::warn!("undecodable cache entry {key} for {fp}; recomputing");
        }
        let value = compute()?;
        self.cache.put(fp, key, &encode(&value));
        Ok(value)
    }

    /// Number of vectors of each norm `0..=bound` (index = norm).
    pub fn shell_counts(&self, lattice: &Lattice, bound: i64) -> Result<Vec<BigInt>, EnumerationError> {
        if bound < 0 {
            return Err(EnumerationError::NegativeBound(bound));
        }
        let counts = self.cached(
            lattice,
            &format!("shells-b{bound}"),
            |text| {
                let v: Option<Vec<u64>> = text.lines().map(|l| l.trim().parse().ok()).collect();
                v.filter(|v| v.len() == bound as usize + 1)
            },
            |v| v.iter().map(|c| format!("{c}\n")).collect(),
            || shells::count_shells(lattice, bound, &self.pool),
        )?;
        Ok(counts.into_iter().map(BigInt::from).collect())
    }

    /// Number of vectors of norm exactly `norm`.
    pub fn shell_count(&self, lattice: &Lattice, norm: i64) -> Result<BigInt, EnumerationError> {
        Ok(self.shell_counts(lattice, norm)?.pop().unwrap_or_default())
    }

    /// Every vector with norm at most `bound`, grouped by norm. Vector lists
    /// (both signs) are kept only if `retain_vectors`.
    pub fn enumerate_shells(
        &self,
        lattice: &Lattice,
        bound: i64,
        retain_vectors: bool,
    ) -> Result<ShellTable, EnumerationError> {
        let counts = self.shell_counts(lattice, bound)?;
        let mut table = ShellTable {
            lattice: lattice.name().to_string(),
            fingerprint: lattice.fingerprint().to_string(),
            max_norm: bound,
            shells: BTreeMap::new(),
        };
        let lists = if retain_vectors && lattice.rank() > 0 {
            let norms: Vec<i64> = (1..=bound).collect();
            Some(shells::collect_half_shells(lattice, &norms, &self.pool)?)
        } else {
            None
        };
        for (norm, count) in counts.into_iter().enumerate() {
            let norm = norm as i64;
            if count == BigInt::from(0) {
                continue;
            }
            let vectors = lists.as_ref().map(|l| {
                if norm == 0 {
                    return vec![vec![0; lattice.rank()]];
                }
                let half = &l[&norm];
                let mut out = Vec::with_capacity(2 * half.len());
                for i in 0..half.len() {
                    let v = half.vector(i);
                    out.push(v.iter().map(|c| -c).collect());
                    out.push(v);
                }
                out
            });
            table.shells.insert(norm, Shell { count, vectors });
        }
        Ok(table)
    }

    fn histogram(&self, lattice: &Lattice, query: &TupleQuery) -> Result<Histogram, EnumerationError> {
        if query.norms.len() > MAX_SLOTS {
            return Err(EnumerationError::TooManySlots(query.norms.len()));
        }
        let mut norms = query.norms.clone();
        norms.sort_unstable();
        norms.dedup();
        let shells = shells::collect_half_shells(lattice, &norms, &self.pool)?;
        search(query, &shells, &self.pool)
    }

    /// `r_L(T)`: ordered tuples `(x_1, …, x_g)` with `(x_i, x_j) = T_ij`.
    pub fn representation_count(&self, lattice: &Lattice, target: &GramTarget) -> Result<BigInt, EnumerationError> {
        // Zero diagonal forces a zero vector (and a zero row, by PSD).
        let mut slots: Vec<usize> = (0..target.genus()).filter(|&i| target.get(i, i) > 0).collect();
        match slots.len() {
            0 => return Ok(BigInt::from(1)),
            1 => return self.shell_count(lattice, target.get(slots[0], slots[0])),
            _ => {}
        }
        let reduced = target.principal(&slots);
        let value = self.cached(
            lattice,
            &format!("rep-{}", reduced.key()),
            |text| text.trim().parse::<u64>().ok(),
            |v| format!("{v}\n"),
            || {
                // Small shells first keeps the outer loops short.
                slots.sort_by_key(|&i| target.get(i, i));
                let sub = target.principal(&slots);
                let k = slots.len();
                if k > MAX_SLOTS {
                    return Err(EnumerationError::TooManySlots(k));
                }
                let norms: Vec<i64> = (0..k).map(|i| sub.get(i, i)).collect();
                let values: Vec<i64> = pair_list(k).into_iter().map(|(i, j)| sub.get(i, j)).collect();
                let mut distinct = norms.clone();
                distinct.dedup();
                let shells = shells::collect_half_shells(lattice, &distinct, &self.pool)?;
                if k >= 3 {
                    if let Some(count) = bitsets::count_pinned(&norms, &values, &shells, &self.pool) {
                        return Ok(count);
                    }
                }
                let query = TupleQuery { norms, rules: values.into_iter().map(PairRule::Fixed).collect() };
                search(&query, &shells, &self.pool).map(|h| h.total())
            },
        )?;
        Ok(BigInt::from(value))
    }

    /// `r_L(T)` for every `g×g` target with trace at most `bound` and nonzero
    /// count, in canonical order.
    pub fn representation_profile(
        &self,
        lattice: &Lattice,
        genus: usize,
        bound: i64,
    ) -> Result<BTreeMap<GramTarget, BigInt>, EnumerationError> {
        if bound < 0 {
            return Err(EnumerationError::NegativeBound(bound));
        }
        let profile = self.cached(
            lattice,
            &format!("profile-g{genus}-b{bound}"),
            decode_profile,
            encode_profile,
            || self.compute_profile(lattice, genus, bound),
        )?;
        Ok(profile.into_iter().map(|(t, c)| (t, BigInt::from(c))).collect())
    }

    fn compute_profile(
        &self,
        lattice: &Lattice,
        genus: usize,
        bound: i64,
    ) -> Result<BTreeMap<GramTarget, u64>, EnumerationError> {
        let mut out = BTreeMap::new();
        out.insert(GramTarget::zero(genus), 1u64);
        if genus == 0 {
            return Ok(out);
        }
        let counts = shells::count_shells(lattice, bound, &self.pool)?;
        let patterns = diagonal_patterns(genus, bound);
        let needed: Vec<i64> = {
            let mut v: Vec<i64> = patterns.iter().filter(|p| p.len() > 1).flatten().copied().collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let half = shells::collect_half_shells(lattice, &needed, &self.pool)?;
        for pattern in &patterns {
            let k = pattern.len();
            let entries: Vec<(Vec<i64>, u64)> = if k == 1 {
                vec![(Vec::new(), counts[pattern[0] as usize])]
            } else {
                search(&TupleQuery::all_free(pattern.clone()), &half, &self.pool)?.entries()
            };
            let pairs = pair_list(k);
            for (offdiag, count) in entries {
                if count == 0 {
                    continue;
                }
                for placement in injections(k, genus) {
                    let mut m = vec![0i64; genus * genus];
                    for a in 0..k {
                        m[placement[a] * genus + placement[a]] = pattern[a];
                    }
                    for (&(a, b), &v) in pairs.iter().zip(&offdiag) {
                        m[placement[a] * genus + placement[b]] = v;
                        m[placement[b] * genus + placement[a]] = v;
                    }
                    let upper = (0..genus).flat_map(|i| (i..genus).map(move |j| (i, j))).map(|(i, j)| m[i * genus + j]);
                    let t = GramTarget::from_upper_unchecked(genus, upper.collect());
                    let prev = out.insert(t, count);
                    debug_assert!(prev.is_none() || prev == Some(count));
                }
            }
        }
        Ok(out)
    }

    /// Joint counts `N(S, ℓ)` = number of `(x_1, …, x_g, y)` with Gram matrix
    /// of the `x` equal to `S`, `Q(y) = 2n` and `(y, x_i) = ℓ_i`, for every
    /// `S` with trace at most `bound`.
    pub fn jacobi_counts(
        &self,
        lattice: &Lattice,
        genus: usize,
        index: i64,
        bound: i64,
    ) -> Result<BTreeMap<(GramTarget, Vec<i64>), BigInt>, EnumerationError> {
        if bound < 0 {
            return Err(EnumerationError::NegativeBound(bound));
        }
        if index < 1 {
            return Err(EnumerationError::InvalidTarget(format!("Fourier–Jacobi index {index} must be positive")));
        }
        let counts = self.cached(
            lattice,
            &format!("jacobi-g{genus}-n{index}-b{bound}"),
            decode_jacobi,
            encode_jacobi,
            || self.compute_jacobi(lattice, genus, index, bound),
        )?;
        Ok(counts.into_iter().map(|(k, c)| (k, BigInt::from(c))).collect())
    }

    fn compute_jacobi(
        &self,
        lattice: &Lattice,
        genus: usize,
        index: i64,
        bound: i64,
    ) -> Result<BTreeMap<(GramTarget, Vec<i64>), u64>, EnumerationError> {
        let y_norm = 2 * index;
        let mut out = BTreeMap::new();
        if lattice.rank() == 0 {
            return Ok(out);
        }
        let patterns = std::iter::once(Vec::new()).chain(diagonal_patterns(genus, bound));
        let mut patterns: Vec<Vec<i64>> = patterns.collect();
        for p in patterns.iter_mut() {
            p.push(y_norm);
        }
        let mut norms: Vec<i64> = patterns.iter().flatten().copied().collect();
        norms.sort_unstable();
        norms.dedup();
        let half = shells::collect_half_shells(lattice, &norms, &self.pool)?;
        for pattern in &patterns {
            let k = pattern.len() - 1;
            let hist = search(&TupleQuery::all_free(pattern.clone()), &half, &self.pool)?;
            let pairs = pair_list(k + 1);
            for (vals, count) in hist.entries() {
                for placement in injections(k, genus) {
                    let mut s = vec![0i64; genus * genus];
                    let mut ell = vec![0i64; genus];
                    for a in 0..k {
                        s[placement[a] * genus + placement[a]] = pattern[a];
                    }
                    for (&(a, b), &v) in pairs.iter().zip(&vals) {
                        if b == k {
                            ell[placement[a]] = v;
                        } else {
                            s[placement[a] * genus + placement[b]] = v;
                            s[placement[b] * genus + placement[a]] = v;
                        }
                    }
                    let upper = (0..genus).flat_map(|i| (i..genus).map(move |j| (i, j))).map(|(i, j)| s[i * genus + j]);
                    let key = (GramTarget::from_upper_unchecked(genus, upper.collect()), ell);
                    out.entry(key).or_insert(count);
                }
            }
        }
        Ok(out)
    }

    /// Counts of `(x_1..x_g1, y_1..y_g2)` with Gram blocks `first` and
    /// `second`, keyed by the cross block `((x_i, y_j))` in row-major order.
    pub fn block_completions(
        &self,
        lattice: &Lattice,
        first: &GramTarget,
        second: &GramTarget,
    ) -> Result<BTreeMap<Vec<i64>, BigInt>, EnumerationError> {
        let (g1, g2) = (first.genus(), second.genus());
        let s1: Vec<usize> = (0..g1).filter(|&i| first.get(i, i) > 0).collect();
        let s2: Vec<usize> = (0..g2).filter(|&i| second.get(i, i) > 0).collect();
        let k = s1.len() + s2.len();
        let mut out = BTreeMap::new();
        if k == 0 {
            out.insert(vec![0; g1 * g2], BigInt::from(1));
            return Ok(out);
        }
        let norms: Vec<i64> =
            s1.iter().map(|&i| first.get(i, i)).chain(s2.iter().map(|&j| second.get(j, j))).collect();
        let rules: Vec<PairRule> = pair_list(k)
            .into_iter()
            .map(|(a, b)| match (a < s1.len(), b < s1.len()) {
                (true, true) => PairRule::Fixed(first.get(s1[a], s1[b])),
                (false, false) => PairRule::Fixed(second.get(s2[a - s1.len()], s2[b - s1.len()])),
                _ => PairRule::Free,
            })
            .collect();
        let hist = self.histogram(lattice, &TupleQuery { norms, rules })?;
        for (vals, count) in hist.entries() {
            let mut cross = vec![0i64; g1 * g2];
            for (&(a, b), v) in hist.pairs.iter().zip(vals) {
                let (i, j) = (s1[a], s2[b - s1.len()]);
                cross[i * g2 + j] = v;
            }
            out.insert(cross, BigInt::from(count));
        }
        Ok(out)
    }
}

/// Non-increasing sequences of positive even integers of length `1..=genus`
/// with sum at most `bound`.
fn diagonal_patterns(genus: usize, bound: i64) -> Vec<Vec<i64>> {
    fn rec(genus: usize, remaining: i64, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == genus {
            return;
        }
        let mut d = 2;
        while d <= remaining.min(max) {
            cur.push(d);
            rec(genus, remaining - d, d, cur, out);
            cur.pop();
            d += 2;
        }
    }
    let mut out = Vec::new();
    rec(genus, bound, bound, &mut Vec::new(), &mut out);
    out
}

/// All injective maps `0..k → 0..n`, as vectors of images.
fn injections(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for p in 0..n {
            if !used[p] {
                used[p] = true;
                cur.push(p);
                rec(k, n, cur, used, out);
                cur.pop();
                used[p] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(k, n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn encode_profile(p: &BTreeMap<GramTarget, u64>) -> String {
    p.iter().map(|(t, c)| format!("{} {c}\n", t.key())).collect()
}

fn decode_profile(text: &str) -> Option<BTreeMap<GramTarget, u64>> {
    text.lines()
        .map(|l| {
            let (k, c) = l.split_once(' ')?;
            Some((k.parse().ok()?, c.parse().ok()?))
        })
        .collect()
}

type JacobiTable = BTreeMap<(GramTarget, Vec<i64>), u64>;

fn encode_jacobi(p: &JacobiTable) -> String {
    p.iter()
        .map(|((t, ell), c)| {
            let ell: Vec<String> = ell.iter().map(i64::to_string).collect();
            format!("{} {} {c}\n", t.key(), ell.join(","))
        })
        .collect()
}

fn decode_jacobi(text: &str) -> Option<JacobiTable> {
    text.lines()
        .map(|l| {
            let mut parts = l.split(' ');
            let t: GramTarget = parts.next()?.parse().ok()?;
            let ell_text = parts.next()?;
            let ell = if ell_text.is_empty() {
                Vec::new()
            } else {
                ell_text.split(',').map(|v| v.parse().ok()).collect::<Option<Vec<i64>>>()?
            };
            let c = parts.next()?.parse().ok()?;
            Some(((t, ell), c))
        })
        .collect()
}

pub(crate) fn fingerprint(lattice: &Lattice) -> String {
    let mut h = Sha256::new();
    h.update(b"thetalab-fingerprint v1\n");
    h.update(format!("rank {}\n", lattice.rank()));
    let gram: Vec<String> = lattice.gram_i64().iter().map(i64::to_string).collect();
    h.update(format!("gram {}\n", gram.join(",")));
    match shells::count_shells(lattice, 4, Engine::shared().pool()) {
        Ok(c) => h.update(format!("shells {c:?}\n")),
        Err(_) => h.update(b"shells none\n"),
    }
    hex::encode(h.finalize())
}

/// [`Engine::enumerate_shells`] on the shared engine.
pub fn enumerate_shells(lattice: &Lattice, bound: i64, retain_vectors: bool) -> Result<ShellTable, EnumerationError> {
    Engine::shared().enumerate_shells(lattice, bound, retain_vectors)
}

/// [`Engine::shell_count`] on the shared engine.
pub fn shell_count(lattice: &Lattice, norm: i64) -> Result<BigInt, EnumerationError> {
    Engine::shared().shell_count(lattice, norm)
}

/// Shell counts `0..=bound` on the shared engine, as machine integers.
pub(crate) fn shell_counts(lattice: &Lattice, bound: i64) -> Result<Vec<u64>, EnumerationError> {
    shells::count_shells(lattice, bound, Engine::shared().pool())
}

/// [`Engine::representation_count`] on the shared engine.
pub fn representation_count(lattice: &Lattice, target: &GramTarget) -> Result<BigInt, EnumerationError> {
    Engine::shared().representation_count(lattice, target)
}

/// [`Engine::representation_profile`] on the shared engine.
pub fn representation_profile(
    lattice: &Lattice,
    genus: usize,
    bound: i64,
) -> Result<BTreeMap<GramTarget, BigInt>, EnumerationError> {
    Engine::shared().representation_profile(lattice, genus, bound)
}
