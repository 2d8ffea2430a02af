//! Fourier indices: symmetric even positive semidefinite integer matrices.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EnumerationError;
use crate::exactnum::{is_positive_semidefinite, IntMatrix};

/// A `g×g` symmetric integer matrix with even nonnegative diagonal that is
/// positive semidefinite, stored as its upper triangle in row-major order.
///
/// Ordered canonically by genus, then trace, then the upper triangle
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GramTarget {
    genus: usize,
    upper: Vec<i64>,
}

fn upper_index(genus: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * genus - i * (i + 1) / 2 + j
}

impl GramTarget {
    pub fn zero(genus: usize) -> Self {
        GramTarget { genus, upper: vec![0; genus * (genus + 1) / 2] }
    }

    /// Validating constructor from the upper triangle.
    pub fn from_upper(genus: usize, upper: Vec<i64>) -> Result<Self, EnumerationError> {
        if upper.len() != genus * (genus + 1) / 2 {
            return Err(EnumerationError::InvalidTarget(format!(
                "genus {genus} needs {} upper-triangle entries, got {}",
                genus * (genus + 1) / 2,
                upper.len()
            )));
        }
        let t = GramTarget { genus, upper };
        t.check()?;
        Ok(t)
    }

    /// Internal constructor for matrices known to be valid (e.g. Gram
    /// matrices of actual lattice vectors).
    pub(crate) fn from_upper_unchecked(genus: usize, upper: Vec<i64>) -> Self {
        debug_assert_eq!(upper.len(), genus * (genus + 1) / 2);
        GramTarget { genus, upper }
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, EnumerationError> {
        let g = rows.len();
        for r in rows {
            if r.as_ref().len() != g {
                return Err(EnumerationError::InvalidTarget("matrix is not square".into()));
            }
        }
        for i in 0..g {
            for j in 0..i {
                if rows[i].as_ref()[j] != rows[j].as_ref()[i] {
                    return Err(EnumerationError::InvalidTarget("matrix is not symmetric".into()));
                }
            }
        }
        let upper = (0..g).flat_map(|i| (i..g).map(move |j| (i, j))).map(|(i, j)| rows[i].as_ref()[j]).collect();
        GramTarget::from_upper(g, upper)
    }

    pub fn from_matrix(m: &IntMatrix) -> Result<Self, EnumerationError> {
        let rows = m
            .to_i64_rows()
            .ok_or_else(|| EnumerationError::InvalidTarget("entries do not fit in 64 bits".into()))?;
        GramTarget::from_rows(&rows)
    }

    fn check(&self) -> Result<(), EnumerationError> {
        for i in 0..self.genus {
            let d = self.get(i, i);
            if d < 0 || d % 2 != 0 {
                return Err(EnumerationError::InvalidTarget(format!("diagonal entry {d} is not even and nonnegative")));
            }
        }
        if !is_positive_semidefinite(&self.to_matrix()) {
            return Err(EnumerationError::InvalidTarget(format!("{self} is not positive semidefinite")));
        }
        Ok(())
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.upper[upper_index(self.genus, i, j)]
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    pub fn trace(&self) -> i64 {
        (0..self.genus).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.genus).map(|i| self.get(i, i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|&v| v == 0)
    }

    pub fn to_matrix(&self) -> IntMatrix {
        let g = self.genus;
        let entries: Vec<i64> = (0..g * g).map(|k| self.get(k / g, k % g)).collect();
        IntMatrix::from_i64(g, g, &entries)
    }

    /// `[[self, 0], [0, 0]]`, one genus higher.
    pub fn extend_by_zero(&self) -> GramTarget {
        let g = self.genus + 1;
        let upper = (0..g)
            .flat_map(|i| (i..g).map(move |j| (i, j)))
            .map(|(i, j)| if j == g - 1 { 0 } else { self.get(i, j) })
            .collect();
        GramTarget { genus: g, upper }
    }

    /// The leading `(g-1)×(g-1)` block, if the last row and column vanish.
    pub fn drop_zero_last(&self) -> Option<GramTarget> {
        let g = self.genus;
        if g == 0 || (0..g).any(|i| self.get(i, g - 1) != 0) {
            return None;
        }
        Some(self.principal(&(0..g - 1).collect::<Vec<_>>()))
    }

    /// Principal submatrix on `slots` (in that order).
    pub fn principal(&self, slots: &[usize]) -> GramTarget {
        let k = slots.len();
        let upper =
            (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).map(|(a, b)| self.get(slots[a], slots[b])).collect();
        GramTarget { genus: k, upper }
    }

    /// `PᵀTP` for the permutation sending slot `i` of the result to slot
    /// `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> GramTarget {
        self.principal(order)
    }

    /// Block matrix `[[first, cross], [crossᵀ, second]]`, with `cross` given
    /// row-major (`first.genus × second.genus`). Not validated.
    pub fn block(first: &GramTarget, second: &GramTarget, cross: &[i64]) -> GramTarget {
        let (g1, g2) = (first.genus, second.genus);
        let g = g1 + g2;
        let entry = |i: usize, j: usize| -> i64 {
            match (i < g1, j < g1) {
                (true, true) => first.get(i, j),
                (false, false) => second.get(i - g1, j - g1),
                (true, false) => cross[i * g2 + (j - g1)],
                (false, true) => cross[j * g2 + (i - g1)],
            }
        };
        let upper = (0..g).flat_map(|i| (i..g).map(move |j| (i, j))).map(|(i, j)| entry(i, j)).collect();
        GramTarget { genus: g, upper }
    }

    /// Entrywise sum, if genera agree.
    pub fn add(&self, other: &GramTarget) -> Option<GramTarget> {
        (self.genus == other.genus).then(|| GramTarget {
            genus: self.genus,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a + b).collect(),
        })
    }

    /// Every way to write `self = first + second` with both summands even
    /// positive semidefinite, in canonical order of `first`.
    pub fn decompositions(&self) -> Vec<(GramTarget, GramTarget)> {
        let g = self.genus;
        let mut out = Vec::new();
        let mut diag = vec![0i64; g];
        let mut emit = |d: &[i64]| {
            let pairs: Vec<(usize, usize)> = (0..g).flat_map(|i| (i + 1..g).map(move |j| (i, j))).collect();
            // Cauchy–Schwarz for both summands bounds each entry of `first`.
            let ranges: Vec<(i64, i64)> = pairs
                .iter()
                .map(|&(i, j)| {
                    let own = isqrt(d[i] * d[j]);
                    let rest = isqrt((self.get(i, i) - d[i]) * (self.get(j, j) - d[j]));
                    let t = self.get(i, j);
                    ((-own).max(t - rest), own.min(t + rest))
                })
                .collect();
            if ranges.iter().any(|(lo, hi)| lo > hi) {
                return;
            }
            let mut off: Vec<i64> = ranges.iter().map(|r| r.0).collect();
            loop {
                let mut upper = Vec::with_capacity(self.upper.len());
                let mut p = 0;
                for i in 0..g {
                    upper.push(d[i]);
                    for _ in i + 1..g {
                        upper.push(off[p]);
                        p += 1;
                    }
                }
                let rest: Vec<i64> = self.upper.iter().zip(&upper).map(|(t, a)| t - a).collect();
                if let (Ok(a), Ok(b)) = (GramTarget::from_upper(g, upper), GramTarget::from_upper(g, rest)) {
                    out.push((a, b));
                }
                let mut k = 0;
                loop {
                    if k == off.len() {
                        return;
                    }
                    off[k] += 1;
                    if off[k] > ranges[k].1 {
                        off[k] = ranges[k].0;
                        k += 1;
                    } else {
                        break;
                    }
                }
            }
        };
        fn diagonals(t: &GramTarget, at: usize, diag: &mut Vec<i64>, emit: &mut dyn FnMut(&[i64])) {
            if at == t.genus {
                emit(diag);
                return;
            }
            let mut d = 0;
            while d <= t.get(at, at) {
                diag[at] = d;
                diagonals(t, at + 1, diag, emit);
                d += 2;
            }
        }
        diagonals(self, 0, &mut diag, &mut emit);
        out.sort();
        out
    }

    /// Compact key `g:u00,u01,...`, also accepted by `FromStr`.
    pub fn key(&self) -> String {
        let body: Vec<String> = self.upper.iter().map(i64::to_string).collect();
        format!("{}:{}", self.genus, body.join(","))
    }
}

impl Ord for GramTarget {
    fn cmp(&self, other: &Self) -> Ordering {
        self.genus
            .cmp(&other.genus)
            .then_with(|| self.trace().cmp(&other.trace()))
            .then_with(|| self.upper.cmp(&other.upper))
    }
}

impl PartialOrd for GramTarget {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GramTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.genus {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.genus).map(|j| self.get(i, j).to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl FromStr for GramTarget {
    type Err = EnumerationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || EnumerationError::InvalidTarget(format!("cannot parse target key `{s}`"));
        let (g, body) = s.split_once(':').ok_or_else(bad)?;
        let genus: usize = g.trim().parse().map_err(|_| bad())?;
        let upper = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',').map(|v| v.trim().parse::<i64>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?
        };
        GramTarget::from_upper(genus, upper)
    }
}

/// Every even positive semidefinite `g×g` matrix with trace at most `bound`,
/// in canonical order.
pub fn all_targets(genus: usize, bound: i64) -> Vec<GramTarget> {
    let mut out = Vec::new();
    let mut diag = vec![0i64; genus];
    fill_diagonals(genus, bound, 0, &mut diag, &mut |d| {
        // Cauchy–Schwarz bounds each off-diagonal entry.
        let pairs: Vec<(usize, usize)> = (0..genus).flat_map(|i| (i + 1..genus).map(move |j| (i, j))).collect();
        let limits: Vec<i64> = pairs.iter().map(|&(i, j)| isqrt(d[i] * d[j])).collect();
        let mut off: Vec<i64> = limits.iter().map(|l| -l).collect();
        loop {
            let mut upper = Vec::with_capacity(genus * (genus + 1) / 2);
            let mut p = 0;
            for i in 0..genus {
                upper.push(d[i]);
                for _ in i + 1..genus {
                    upper.push(off[p]);
                    p += 1;
                }
            }
            if let Ok(t) = GramTarget::from_upper(genus, upper) {
                out.push(t);
            }
            let mut k = 0;
            loop {
                if k == off.len() {
                    return;
                }
                off[k] += 1;
                if off[k] > limits[k] {
                    off[k] = -limits[k];
                    k += 1;
                } else {
                    break;
                }
            }
        }
    });
    out.sort();
    out
}

fn fill_diagonals(genus: usize, remaining: i64, at: usize, diag: &mut Vec<i64>, emit: &mut dyn FnMut(&[i64])) {
    if at == genus {
        emit(diag);
        return;
    }
    let mut d = 0;
    while d <= remaining {
        diag[at] = d;
        fill_diagonals(genus, remaining - d, at + 1, diag, emit);
        d += 2;
    }
    diag[at] = 0;
}

pub(crate) fn isqrt(v: i64) -> i64 {
    if v <= 0 {
        return 0;
    }
    let mut r = (v as f64).sqrt() as i64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(GramTarget::from_rows(&[[2, 1], [1, 2]]).is_ok());
        assert!(GramTarget::from_rows(&[[2, 3], [3, 2]]).is_err());
        assert!(GramTarget::from_rows(&[[1]]).is_err());
        assert!(GramTarget::from_rows(&[[2, 1], [0, 2]]).is_err());
        assert!(GramTarget::from_rows(&[[0, 1], [1, 2]]).is_err());
        assert!(GramTarget::from_rows(&[[2, 2], [2, 2]]).is_ok());
    }

    #[test]
    fn decompositions_match_filtered_pairs() {
        for t in all_targets(2, 6).into_iter().chain([GramTarget::from_rows(&[[2, -1, 0], [-1, 2, -1], [0, -1, 2]]).unwrap()]) {
            let g = t.genus();
            let expected: Vec<(GramTarget, GramTarget)> = all_targets(g, t.trace())
                .into_iter()
                .filter_map(|a| {
                    let rest: Vec<i64> = t.upper().iter().zip(a.upper()).map(|(x, y)| x - y).collect();
                    GramTarget::from_upper(g, rest).ok().map(|b| (a, b))
                })
                .collect();
            assert_eq!(t.decompositions(), expected, "{t}");
        }
        assert_eq!(GramTarget::zero(3).decompositions().len(), 1);
    }

    #[test]
    fn ordering_and_keys() {
        let a = GramTarget::from_rows(&[[2, -1], [-1, 2]]).unwrap();
        let b = GramTarget::from_rows(&[[2, 1], [1, 2]]).unwrap();
        let c = GramTarget::from_rows(&[[4, 0], [0, 0]]).unwrap();
        let d = GramTarget::from_rows(&[[0, 0], [0, 2]]).unwrap();
        assert!(d < a && a < b && c > a);
        assert_eq!(a.key(), "2:2,-1,2");
        assert_eq!(a.key().parse::<GramTarget>().unwrap(), a);
        assert_eq!(GramTarget::zero(0).key(), "0:");
        assert_eq!("0:".parse::<GramTarget>().unwrap(), GramTarget::zero(0));
    }

    #[test]
    fn siegel_helpers() {
        let a = GramTarget::from_rows(&[[2, -1], [-1, 2]]).unwrap();
        let e = a.extend_by_zero();
        assert_eq!(e.genus(), 3);
        assert_eq!(e.drop_zero_last(), Some(a.clone()));
        assert_eq!(a.drop_zero_last(), None);
        let blk = GramTarget::block(&a, &GramTarget::from_rows(&[[4]]).unwrap(), &[1, 0]);
        assert_eq!(blk.get(0, 2), 1);
        assert_eq!(blk.get(2, 1), 0);
        assert_eq!(blk.get(2, 2), 4);
    }

    #[test]
    fn all_targets_counts() {
        // Genus 1: [0], [2], [4].
        assert_eq!(all_targets(1, 4).len(), 3);
        // Genus 2, trace ≤ 2: zero, diag(2,0), diag(0,2).
        assert_eq!(all_targets(2, 2).len(), 3);
        // Trace 4 adds diag(4,0), diag(0,4), and [[2,c],[c,2]] for |c| ≤ 2.
        assert_eq!(all_targets(2, 4).len(), 3 + 2 + 5);
        let t = all_targets(3, 6);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
    }
}
