//! Tuple counting with every pair pinned, over shells small enough to hold
//! one bitset of compatible partners per vector.
//!
//! For slot `j` the candidates are the intersection over earlier slots `i`
//! of `{w : (x_i, w) = T_ij}`; the last slot is counted by a popcount.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::shells::{dot, PackedVectors};
use super::tuples::pair_list;

/// Largest shell (both signs) that gets partner bitsets.
pub(crate) const MAX_BITSET_SHELL: usize = 1 << 13;

/// Bitsets of partners with one fixed inner product: row `f` lists the
/// vectors `w` of the target shell with `(u_f, w) = value`. Vectors are
/// indexed with both signs, `2p` for `+v_p` and `2p + 1` for `−v_p`.
struct PartnerTable {
    words: usize,
    bits: Vec<u64>,
}

impl PartnerTable {
    fn build(from: &PackedVectors, to: &PackedVectors, value: i32, pool: &rayon::ThreadPool) -> Self {
        let words = (2 * to.len()).div_ceil(64).max(1);
        let mut bits = vec![0u64; 2 * from.len() * words];
        pool.install(|| {
            bits.par_chunks_mut(2 * words).enumerate().for_each(|(p, rows)| {
                let (plus, minus) = rows.split_at_mut(words);
                let u = from.coords(p);
                for q in 0..to.len() {
                    let d = dot(u, to.image(q));
                    let (same, flipped) = (2 * q, 2 * q + 1);
                    if d == value {
                        plus[same / 64] |= 1 << (same % 64);
                        minus[flipped / 64] |= 1 << (flipped % 64);
                    }
                    if -d == value {
                        plus[flipped / 64] |= 1 << (flipped % 64);
                        minus[same / 64] |= 1 << (same % 64);
                    }
                }
            });
        });
        PartnerTable { words, bits }
    }

    #[inline]
    fn row(&self, f: usize) -> &[u64] {
        &self.bits[f * self.words..(f + 1) * self.words]
    }
}

/// Number of ordered tuples with norms `norms` and pair values `values`
/// (in [`pair_list`] order). Returns `None` if some shell is too large for
/// bitsets.
pub(crate) fn count_pinned(
    norms: &[i64],
    values: &[i64],
    shells: &BTreeMap<i64, PackedVectors>,
    pool: &rayon::ThreadPool,
) -> Option<u64> {
    let k = norms.len();
    assert!(k >= 2);
    let sets: Vec<&PackedVectors> = norms.iter().map(|q| &shells[q]).collect();
    if sets.iter().any(|s| 2 * s.len() > MAX_BITSET_SHELL) {
        return None;
    }
    let pairs = pair_list(k);
    let mut tables: BTreeMap<(i64, i64, i64), PartnerTable> = BTreeMap::new();
    let mut table_of = vec![vec![(0i64, 0i64, 0i64); k]; k];
    for (&(i, j), &v) in pairs.iter().zip(values) {
        let Ok(value) = i32::try_from(v) else { return Some(0) };
        let key = (norms[i], norms[j], v);
        tables.entry(key).or_insert_with(|| PartnerTable::build(sets[i], sets[j], value, pool));
        table_of[i][j] = key;
    }
    let table = |i: usize, j: usize| &tables[&table_of[i][j]];

    let first = sets[0].len();
    let jobs = pool.current_num_threads().max(1);
    let chunk = first.div_ceil(jobs * 16).max(1);
    let starts: Vec<usize> = (0..first).step_by(chunk).collect();
    let total: u64 = pool.install(|| {
        starts
            .par_iter()
            .map(|&s| {
                // acc[d][m]: candidates for slot m given slots 0..d.
                let mut acc: Vec<Vec<Vec<u64>>> =
                    (0..k).map(|_| (0..k).map(|m| vec![0u64; table(0, m.max(1)).words]).collect()).collect();
                let mut sum = 0u64;
                for p in s..(s + chunk).min(first) {
                    let f = 2 * p;
                    if k == 2 {
                        sum += popcount(table(0, 1).row(f));
                        continue;
                    }
                    for m in 1..k {
                        acc[1][m].copy_from_slice(table(0, m).row(f));
                    }
                    sum += descend(1, k, &table, &mut acc);
                }
                sum
            })
            .sum()
    });
    Some(2 * total)
}

fn popcount(words: &[u64]) -> u64 {
    words.iter().map(|w| u64::from(w.count_ones())).sum()
}

/// Counts completions of slots `d..k` given the candidate sets in `acc[d]`.
fn descend<'t>(
    d: usize,
    k: usize,
    table: &impl Fn(usize, usize) -> &'t PartnerTable,
    acc: &mut [Vec<Vec<u64>>],
) -> u64 {
    let mut sum = 0u64;
    let words = acc[d][d].len();
    for w in 0..words {
        let mut bits = acc[d][d][w];
        while bits != 0 {
            let f = w * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if d + 2 == k {
                let last = table(d, k - 1).row(f);
                sum += acc[d][k - 1].iter().zip(last).map(|(a, b)| u64::from((a & b).count_ones())).sum::<u64>();
                continue;
            }
            let (head, tail) = acc.split_at_mut(d + 1);
            let mut any = true;
            for m in d + 1..k {
                let row = table(d, m).row(f);
                let mut nonzero = 0u64;
                for ((out, a), b) in tail[0][m].iter_mut().zip(&head[d][m]).zip(row) {
                    *out = a & b;
                    nonzero |= *out;
                }
                if nonzero == 0 {
                    any = false;
                    break;
                }
            }
            if any {
                sum += descend(d + 1, k, table, acc);
            }
        }
    }
    sum
}
