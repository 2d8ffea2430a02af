//! Depth-first search over tuples of lattice vectors with prescribed norms.
//!
//! Slot `j` draws from the half shell of its norm and tries both signs of
//! each candidate, so one dot product per earlier slot serves two branches.
//! Slot 0 only takes the half-space representative; negating a whole tuple
//! preserves every inner product, so the final histogram is doubled.
//!
//! Each pair of slots is either pinned to a value or recorded in a dense
//! histogram whose range is fixed by Cauchy–Schwarz.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::shells::{dot, PackedVectors};
use super::target::isqrt;
use super::EnumerationError;

/// Largest number of slots in one search.
pub(crate) const MAX_SLOTS: usize = 8;
const MAX_HISTOGRAM: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PairRule {
    Fixed(i64),
    Free,
}

/// Norms of the slots (all positive) and one rule per pair `i < j`, in the
/// order `(0,1), (0,2), …, (1,2), …`.
#[derive(Clone, Debug)]
pub(crate) struct TupleQuery {
    pub norms: Vec<i64>,
    pub rules: Vec<PairRule>,
}

pub(crate) fn pair_list(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect()
}

impl TupleQuery {
    pub fn all_free(norms: Vec<i64>) -> Self {
        let k = norms.len();
        TupleQuery { norms, rules: vec![PairRule::Free; k * k.saturating_sub(1) / 2] }
    }
}

/// Tuple counts indexed by the values of the free pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Histogram {
    /// Free pairs in query order.
    pub pairs: Vec<(usize, usize)>,
    limits: Vec<i64>,
    counts: Vec<u64>,
}

impl Histogram {
    /// Nonzero entries as (free-pair values, count), in index order.
    pub fn entries(&self) -> Vec<(Vec<i64>, u64)> {
        let mut out = Vec::new();
        for (idx, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut rest = idx;
            let mut vals = vec![0i64; self.limits.len()];
            for (p, &lim) in self.limits.iter().enumerate() {
                let width = (2 * lim + 1) as usize;
                vals[p] = (rest % width) as i64 - lim;
                rest /= width;
            }
            out.push((vals, c));
        }
        out
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    #[cfg(test)]
    pub fn as_map(&self) -> BTreeMap<Vec<i64>, u64> {
        self.entries().into_iter().collect()
    }
}

#[derive(Clone, Copy)]
enum Check {
    Fixed { prev: usize, value: i32 },
    Free { prev: usize, stride: usize, offset: i64 },
}

impl Check {
    fn prev(&self) -> usize {
        match *self {
            Check::Fixed { prev, .. } | Check::Free { prev, .. } => prev,
        }
    }
}

struct Searcher<'a> {
    sets: Vec<&'a PackedVectors>,
    checks: Vec<Vec<Check>>,
    hist_len: usize,
}

pub(crate) fn search(
    query: &TupleQuery,
    shells: &BTreeMap<i64, PackedVectors>,
    pool: &rayon::ThreadPool,
) -> Result<Histogram, EnumerationError> {
    let k = query.norms.len();
    assert!(k >= 1 && k <= MAX_SLOTS, "tuple search needs 1..={MAX_SLOTS} slots");
    let pairs = pair_list(k);
    assert_eq!(pairs.len(), query.rules.len());

    let mut checks: Vec<Vec<Check>> = vec![Vec::new(); k];
    let mut free_pairs = Vec::new();
    let mut limits = Vec::new();
    let mut stride = 1usize;
    for (&(i, j), rule) in pairs.iter().zip(&query.rules) {
        let limit = isqrt(query.norms[i] * query.norms[j]);
        match *rule {
            PairRule::Fixed(v) => {
                if v.abs() > limit {
                    // Cauchy–Schwarz rules this out for every tuple.
                    return Ok(Histogram { pairs: Vec::new(), limits: Vec::new(), counts: vec![0] });
                }
                checks[j].push(Check::Fixed { prev: i, value: v as i32 });
            }
            PairRule::Free => {
                checks[j].push(Check::Free { prev: i, stride, offset: limit });
                free_pairs.push((i, j));
                limits.push(limit);
                stride = stride
                    .checked_mul((2 * limit + 1) as usize)
                    .filter(|&s| s <= MAX_HISTOGRAM)
                    .ok_or(EnumerationError::HistogramTooLarge)?;
            }
        }
    }
    let sets: Vec<&PackedVectors> =
        query.norms.iter().map(|q| shells.get(q).expect("shell for every slot norm")).collect();
    let searcher = Searcher { sets, checks, hist_len: stride };

    let first = searcher.sets[0].len();
    let jobs = pool.current_num_threads().max(1);
    let chunk = first.div_ceil(jobs * 16).max(1);
    let starts: Vec<usize> = (0..first).step_by(chunk).collect();
    let parts: Vec<Vec<u64>> = pool.install(|| {
        starts
            .par_iter()
            .map(|&s| {
                let mut hist = vec![0u64; searcher.hist_len];
                searcher.run_range(s..(s + chunk).min(first), &mut hist);
                hist
            })
            .collect()
    });
    let mut counts = vec![0u64; stride];
    for part in parts {
        for (c, v) in counts.iter_mut().zip(part) {
            *c += v;
        }
    }
    for c in counts.iter_mut() {
        *c *= 2;
    }
    Ok(Histogram { pairs: free_pairs, limits, counts })
}

impl<'a> Searcher<'a> {
    fn run_range(&self, range: std::ops::Range<usize>, hist: &mut [u64]) {
        let mut chosen: Vec<(&[i32], i32)> = Vec::with_capacity(self.sets.len());
        for v in range {
            chosen.clear();
            chosen.push((self.sets[0].image(v), 1));
            if self.sets.len() == 1 {
                hist[0] += 1;
            } else {
                self.slot(1, 0, &mut chosen, hist);
            }
        }
    }

    fn slot<'s>(&'s self, j: usize, base: usize, chosen: &mut Vec<(&'s [i32], i32)>, hist: &mut [u64]) {
        let set = self.sets[j];
        let checks = &self.checks[j];
        let last = j + 1 == self.sets.len();
        let mut raw = [0i32; MAX_SLOTS];
        for v in 0..set.len() {
            let coords = set.coords(v);
            for (c, r) in checks.iter().zip(raw.iter_mut()) {
                let (img, sign) = chosen[c.prev()];
                *r = sign * dot(coords, img);
            }
            for sign in [1i32, -1] {
                let mut idx = base;
                let mut ok = true;
                for (c, &r) in checks.iter().zip(raw.iter()) {
                    let d = sign * r;
                    match *c {
                        Check::Fixed { value, .. } => {
                            if d != value {
                                ok = false;
                                break;
                            }
                        }
                        Check::Free { stride, offset, .. } => {
                            debug_assert!(i64::from(d).abs() <= offset);
                            idx += (i64::from(d) + offset) as usize * stride;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                if last {
                    hist[idx] += 1;
                } else {
                    chosen.push((set.image(v), sign));
                    self.slot(j + 1, idx, chosen, hist);
                    chosen.pop();
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::shells::collect_half_shells;
    use crate::lattice::{root_lattice, RootType};

    fn pool() -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap()
    }

    #[test]
    fn e8_root_pairs() {
        let e8 = root_lattice(RootType::E, 8).unwrap();
        let shells = collect_half_shells(&e8, &[2], &pool()).unwrap();
        let h = search(&TupleQuery::all_free(vec![2, 2]), &shells, &pool()).unwrap();
        let m = h.as_map();
        // Inner products of a fixed root with all 240 roots: ±2 once, ±1 56 times, 0 126 times.
        assert_eq!(m[&vec![2]], 240);
        assert_eq!(m[&vec![1]], 240 * 56);
        assert_eq!(m[&vec![0]], 240 * 126);
        assert_eq!(h.total(), 240 * 240);
    }

    #[test]
    fn fixed_and_free_rules() {
        let a2 = root_lattice(RootType::A, 2).unwrap();
        let shells = collect_half_shells(&a2, &[2], &pool()).unwrap();
        let q = TupleQuery { norms: vec![2, 2], rules: vec![PairRule::Fixed(-1)] };
        assert_eq!(search(&q, &shells, &pool()).unwrap().total(), 12);
        let q = TupleQuery::all_free(vec![2, 2]);
        assert_eq!(search(&q, &shells, &pool()).unwrap().total(), 36);
        let q = TupleQuery { norms: vec![2, 2], rules: vec![PairRule::Fixed(3)] };
        assert_eq!(search(&q, &shells, &pool()).unwrap().total(), 0);
    }
}
