//! Exact short-vector enumeration.
//!
//! The recursion is the usual Fincke–Pohst depth-first search over the
//! triangular decomposition `Q(x) = Σ D_i (x_i + Σ_{j>i} U_ij x_j)²`, but every
//! quantity is kept as a machine integer. With `d_i` the leading principal
//! minors and `M` the fraction-free (Bareiss) echelon form of the Gram matrix,
//! `z_i = d_{i+1} x_i + Σ_{j>i} M_ij x_j` is an integer and
//!
//! ```text
//! Q(x) = Σ_i z_i² / (d_i d_{i+1})
//! ```
//!
//! The partial sums `e_i = d_i · Σ_{k≥i} z_k² / (d_k d_{k+1})` are integers
//! (they are `d_i` times the norm of a projection onto the orthogonal
//! complement of the first `i` basis vectors) and obey
//! `e_i = (d_i e_{i+1} + z_i²) / d_{i+1}` with exact division. Pruning at
//! level `i` is the integer test `z_i² ≤ d_i (d_{i+1} B − e_{i+1})`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::exactnum::{inverse_rational, IntMatrix};

use super::EnumerationError;

/// Precomputed data for enumerating vectors of a positive definite integer
/// Gram matrix.
#[derive(Clone, Debug)]
pub struct ExactEnumerator {
    n: usize,
    gram: Vec<i64>,
    /// Upper triangle of the Bareiss echelon form, row-major `n×n`.
    echelon: Vec<i64>,
    /// `minors[i]` is the leading principal minor of size `i`.
    minors: Vec<i64>,
    inv_minors: Vec<f64>,
    exact_div: Vec<ExactDivisor>,
}

/// Division by a positive `d` known to be exact: `d = 2^shift · m` with `m`
/// odd, and `x / d = (x >> shift) · m⁻¹ mod 2^64`.
#[derive(Clone, Copy, Debug)]
struct ExactDivisor {
    shift: u32,
    inverse: u64,
}

impl ExactDivisor {
    fn new(d: i64) -> Self {
        let shift = d.trailing_zeros();
        let m = (d >> shift) as u64;
        // Newton iteration doubles the correct low bits each step.
        let mut inv = m;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
        }
        ExactDivisor { shift, inverse: inv }
    }

    #[inline(always)]
    fn divide(self, x: i64) -> i64 {
        ((x >> self.shift) as u64).wrapping_mul(self.inverse) as i64
    }
}

impl ExactEnumerator {
    /// `gram` is row-major `n×n`, symmetric and positive definite.
    pub fn new(n: usize, gram: &[i64]) -> Result<Self, EnumerationError> {
        assert_eq!(gram.len(), n * n);
        let mut m: Vec<BigInt> = gram.iter().map(|&x| BigInt::from(x)).collect();
        let mut minors = vec![1i64];
        let mut prev = BigInt::from(1);
        for k in 0..n {
            let pivot = m[k * n + k].clone();
            if pivot <= BigInt::zero() {
                return Err(EnumerationError::NotPositiveDefinite);
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i * n + j] * &pivot - &m[i * n + k] * &m[k * n + j];
                    m[i * n + j] = v / &prev;
                }
            }
            minors.push(pivot.to_i64().ok_or(EnumerationError::Overflow)?);
            prev = pivot;
        }
        let mut echelon = vec![0i64; n * n];
        for i in 0..n {
            for j in i..n {
                echelon[i * n + j] = m[i * n + j].to_i64().ok_or(EnumerationError::Overflow)?;
            }
        }
        let inv_minors = minors.iter().map(|&d| 1.0 / d as f64).collect();
        let exact_div = minors.iter().map(|&d| ExactDivisor::new(d)).collect();
        Ok(ExactEnumerator { n, gram: gram.to_vec(), echelon, minors, inv_minors, exact_div })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gram(&self) -> &[i64] {
        &self.gram
    }

    /// Exact norm `xᵀ G x`.
    pub fn norm(&self, x: &[i64]) -> i64 {
        let n = self.n;
        let mut acc = 0i64;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            let row = &self.gram[i * n..(i + 1) * n];
            let gx: i64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            acc += x[i] * gx;
        }
        acc
    }

    fn check_bound(&self, bound: i64) -> Result<(), EnumerationError> {
        if bound < 0 {
            return Err(EnumerationError::NegativeBound(bound));
        }
        // All intermediate quantities are bounded by d_i d_{i+1} (B + 1).
        for w in self.minors.windows(2) {
            let cap = (w[0] as i128) * (w[1] as i128) * (bound as i128 + 1);
            if cap > (i64::MAX as i128) / 4 {
                return Err(EnumerationError::Overflow);
            }
        }
        Ok(())
    }

    /// Valid prefixes `(x_{n-1}, …, x_{n-depth})` of half-space
    /// representatives with norm bound `bound`, in enumeration order.
    ///
    /// A prefix of all zeros is included; it stands for vectors whose top
    /// `depth` coordinates vanish.
    pub fn prefixes(&self, bound: i64, depth: usize) -> Result<Vec<Vec<i64>>, EnumerationError> {
        self.check_bound(bound)?;
        let depth = depth.min(self.n.saturating_sub(1));
        let mut out = Vec::new();
        let mut x = vec![0i64; self.n];
        self.prefix_rec(bound, self.n, 0, true, depth, &mut x, &mut out);
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn prefix_rec(
        &self,
        bound: i64,
        level_plus_one: usize,
        e_above: i64,
        zero_above: bool,
        depth: usize,
        x: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        let n = self.n;
        if n - level_plus_one == depth {
            out.push(x[level_plus_one..].iter().rev().copied().collect());
            return;
        }
        let i = level_plus_one - 1;
        let di = self.minors[i];
        let di1 = self.minors[i + 1];
        let s: i64 = (i + 1..n).map(|j| self.echelon[i * n + j] * x[j]).sum();
        let cap = di * (di1 * bound - e_above);
        if cap < 0 {
            return;
        }
        let (mut lo, hi) = coordinate_range(cap, s, di1, 1.0 / di1 as f64);
        if zero_above {
            lo = lo.max(if i == 0 { 1 } else { 0 });
        }
        for xi in lo..=hi {
            let z = di1 * xi + s;
            let e = (di * e_above + z * z) / di1;
            x[i] = xi;
            self.prefix_rec(bound, i, e, zero_above && xi == 0, depth, x, out);
        }
        x[i] = 0;
    }

    /// Visits one representative of every pair `±v` of nonzero vectors with
    /// `Q(v) ≤ bound`: the one whose last nonzero coordinate is positive.
    ///
    /// `prefix` pins the top coordinates `(x_{n-1}, x_{n-2}, …)`; pass an
    /// empty slice to enumerate everything. The visitor receives the
    /// coordinates and the norm.
    pub fn for_each_half<F>(&self, bound: i64, prefix: &[i64], mut visit: F) -> Result<(), EnumerationError>
    where
        F: FnMut(&[i64], i64),
    {
        self.check_bound(bound)?;
        if self.n > 0 {
            Walk::<false>::new(self, bound, prefix, &[]).run(|x, q, _| visit(x, q));
        }
        Ok(())
    }

    /// Like [`for_each_half`](Self::for_each_half) but also evaluates a
    /// second integer quadratic form `aux` (row-major `n×n`, symmetric) at
    /// every visited vector, incrementally.
    pub fn for_each_half_with_aux<F>(
        &self,
        bound: i64,
        prefix: &[i64],
        aux: &[i64],
        visit: F,
    ) -> Result<(), EnumerationError>
    where
        F: FnMut(&[i64], i64, i128),
    {
        self.check_bound(bound)?;
        assert_eq!(aux.len(), self.n * self.n);
        // Every walked coordinate obeys |x_j| ≤ √(B·(G⁻¹)_jj), which bounds
        // all partial values of the auxiliary form.
        let radii = self.coordinate_radii(bound)?;
        let n = self.n;
        let cap: f64 = (0..n * n).map(|k| (aux[k] as f64).abs() * radii[k / n] * radii[k % n]).sum();
        if cap > (1u64 << 60) as f64 {
            return Err(EnumerationError::Overflow);
        }
        if self.n > 0 {
            Walk::<true>::new(self, bound, prefix, aux).run(visit);
        }
        Ok(())
    }

    /// Upper bounds (with slack) on `|x_j|` over `Q(x) ≤ bound`.
    fn coordinate_radii(&self, bound: i64) -> Result<Vec<f64>, EnumerationError> {
        let gram = IntMatrix::from_i64(self.n, self.n, &self.gram).to_rational();
        let inv = inverse_rational(&gram).map_err(|_| EnumerationError::NotPositiveDefinite)?;
        Ok((0..self.n)
            .map(|j| (bound as f64 * inv.get(j, j).to_f64().unwrap_or(f64::INFINITY)).sqrt() + 1.0)
            .collect())
    }

    /// Counts nonzero vectors by norm: `counts[k]` is the number of vectors
    /// (both signs) with `Q(v) = k`, for `k ≤ bound`.
    pub fn count_by_norm(&self, bound: i64, prefix: &[i64]) -> Result<Vec<u64>, EnumerationError> {
        let mut counts = vec![0u64; bound.max(0) as usize + 1];
        self.for_each_half(bound, prefix, |_, q| counts[q as usize] += 2)?;
        Ok(counts)
    }
}

/// Integers `x` with `(d·x + s)² ≤ cap` (with `cap ≥ 0`), as `(lo, hi)`;
/// empty when `lo > hi`. Float estimates are settled by exact tests.
#[inline(always)]
fn coordinate_range(cap: i64, s: i64, d: i64, inv_d: f64) -> (i64, i64) {
    let c = -(s as f64) * inv_d;
    let r = (cap as f64).sqrt() * inv_d;
    let (lo_est, hi_est) = ((c - r) as i64, (c + r) as i64);
    let inside = |x: i64| {
        let z = d * x + s;
        z * z <= cap
    };
    let mut lo = lo_est;
    while inside(lo - 1) {
        lo -= 1;
    }
    while lo <= hi_est + 1 && !inside(lo) {
        lo += 1;
    }
    let mut hi = hi_est.max(lo - 1);
    while inside(hi + 1) {
        hi += 1;
    }
    while hi >= lo && !inside(hi) {
        hi -= 1;
    }
    (lo, hi)
}

/// State of one depth-first walk, run iteratively.
///
/// Row `r` of `partial` caches `Σ_{l ≥ j} M_rl x_l` at column `j`; it is
/// refreshed lazily from column `stale[r]` down when the walk descends into
/// level `r`, so a node costs amortized O(1) instead of O(n). With `AUX` the
/// same is done for the auxiliary form.
struct Walk<'a, const AUX: bool> {
    en: &'a ExactEnumerator,
    bound: i64,
    fixed: Vec<Option<i64>>,
    x: Vec<i64>,
    z: Vec<i64>,
    e: Vec<i64>,
    hi: Vec<i64>,
    zero_above: Vec<bool>,
    partial: Vec<i64>,
    stale: Vec<usize>,
    aux: &'a [i64],
    aux_partial: Vec<i64>,
    /// Value of the auxiliary form on the coordinates `x_i, …, x_{n-1}`.
    aux_value: Vec<i64>,
}

impl<'a, const AUX: bool> Walk<'a, AUX> {
    fn new(en: &'a ExactEnumerator, bound: i64, prefix: &[i64], aux: &'a [i64]) -> Self {
        let n = en.n;
        let mut fixed = vec![None; n];
        for (k, &v) in prefix.iter().enumerate().take(n) {
            fixed[n - 1 - k] = Some(v);
        }
        let mut zero_above = vec![false; n];
        zero_above[n - 1] = true;
        Walk {
            en,
            bound,
            fixed,
            x: vec![0; n],
            z: vec![0; n],
            e: vec![0; n + 1],
            hi: vec![0; n],
            zero_above,
            partial: vec![0; n * (n + 1)],
            stale: vec![n - 1; n],
            aux,
            aux_partial: if AUX { vec![0; n * (n + 1)] } else { Vec::new() },
            aux_value: vec![0; n + 1],
        }
    }

    /// Brings row `k` up to date and passes its staleness on to row `k - 1`.
    #[inline(always)]
    fn refresh(&mut self, k: usize) {
        let n = self.en.n;
        let w = n + 1;
        let top = self.stale[k].max(k + 1).min(n - 1);
        let row = &mut self.partial[k * w..(k + 1) * w];
        let m = &self.en.echelon[k * n..(k + 1) * n];
        for j in (k + 1..=top).rev() {
            row[j] = row[j + 1] + m[j] * self.x[j];
        }
        if AUX {
            let row = &mut self.aux_partial[k * w..(k + 1) * w];
            let a = &self.aux[k * n..(k + 1) * n];
            for j in (k + 1..=top).rev() {
                row[j] = row[j + 1] + a[j] * self.x[j];
            }
        }
        if k > 0 {
            self.stale[k - 1] = self.stale[k - 1].max(top);
        }
        self.stale[k] = k;
    }

    #[inline(always)]
    fn set_aux(&mut self, i: usize) {
        if AUX {
            let n = self.en.n;
            let t = if i + 1 < n { self.aux_partial[i * (n + 1) + i + 1] } else { 0 };
            let xi = self.x[i];
            self.aux_value[i] = self.aux_value[i + 1] + xi * (2 * t + self.aux[i * n + i] * xi);
        }
    }

    /// Sets level `i` to its first admissible value; false if there is none.
    #[inline(always)]
    fn enter(&mut self, i: usize) -> bool {
        let n = self.en.n;
        let di = self.en.minors[i];
        let di1 = self.en.minors[i + 1];
        let s = if i + 1 < n { self.partial[i * (n + 1) + i + 1] } else { 0 };
        let cap = di * (di1 * self.bound - self.e[i + 1]);
        if cap < 0 {
            return false;
        }
        let (mut lo, mut hi) = coordinate_range(cap, s, di1, self.en.inv_minors[i + 1]);
        if self.zero_above[i] {
            lo = lo.max(if i == 0 { 1 } else { 0 });
        }
        if let Some(v) = self.fixed[i] {
            lo = lo.max(v);
            hi = hi.min(v);
        }
        if lo > hi {
            return false;
        }
        let z = di1 * lo + s;
        self.x[i] = lo;
        self.z[i] = z;
        self.e[i] = self.en.exact_div[i + 1].divide(di * self.e[i + 1] + z * z);
        self.hi[i] = hi;
        if i > 0 {
            self.stale[i - 1] = self.stale[i - 1].max(i);
        }
        true
    }

    fn run<F>(&mut self, mut visit: F)
    where
        F: FnMut(&[i64], i64, i128),
    {
        let n = self.en.n;
        if !self.enter(n - 1) {
            return;
        }
        let mut i = n - 1;
        loop {
            if i == 0 {
                // Consecutive values differ by ((z + d)² − z²) / d = 2z + d.
                let d1 = self.en.minors[1];
                let (mut q, mut z) = (self.e[0], self.z[0]);
                for x0 in self.x[0]..=self.hi[0] {
                    self.x[0] = x0;
                    self.set_aux(0);
                    visit(&self.x, q, i128::from(self.aux_value[0]));
                    q += 2 * z + d1;
                    z += d1;
                }
                self.x[0] = 0;
                i = 1;
                if i == n {
                    return;
                }
            } else {
                self.set_aux(i);
                self.refresh(i - 1);
                self.zero_above[i - 1] = self.zero_above[i] && self.x[i] == 0;
                if self.enter(i - 1) {
                    i -= 1;
                    continue;
                }
            }
            // Advance level i, climbing while it is exhausted.
            loop {
                let di1 = self.en.minors[i + 1];
                if self.x[i] < self.hi[i] {
                    self.x[i] += 1;
                    self.e[i] += 2 * self.z[i] + di1;
                    self.z[i] += di1;
                    self.stale[i - 1] = self.stale[i - 1].max(i);
                    break;
                }
                self.x[i] = 0;
                self.stale[i - 1] = self.stale[i - 1].max(i);
                i += 1;
                if i == n {
                    return;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_divisor_matches_division() {
        for d in [1i64, 2, 3, 4, 6, 12, 96, 1023, 4096, 999_999_937] {
            let div = ExactDivisor::new(d);
            for q in [-1_000_003i64, -7, -1, 0, 1, 5, 17, 123_456_789] {
                assert_eq!(div.divide(q * d), q, "{q} * {d}");
            }
        }
    }

    fn brute_force(n: usize, gram: &[i64], bound: i64, box_radius: i64) -> Vec<u64> {
        let en = ExactEnumerator::new(n, gram).unwrap();
        let mut counts = vec![0u64; bound as usize + 1];
        let mut x = vec![-box_radius; n];
        loop {
            let q = en.norm(&x);
            if q > 0 && q <= bound {
                counts[q as usize] += 1;
            }
            let mut k = 0;
            loop {
                if k == n {
                    return counts;
                }
                x[k] += 1;
                if x[k] > box_radius {
                    x[k] = -box_radius;
                    k += 1;
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn a2_counts_match_box_search() {
        let g = [2, -1, -1, 2];
        let en = ExactEnumerator::new(2, &g).unwrap();
        assert_eq!(en.count_by_norm(8, &[]).unwrap(), brute_force(2, &g, 8, 6));
        assert_eq!(en.count_by_norm(2, &[]).unwrap()[2], 6);
    }

    #[test]
    fn odd_form_counts() {
        // x² + xy + 3y²  scaled: [[2,1],[1,6]]
        let g = [2, 1, 1, 6];
        let en = ExactEnumerator::new(2, &g).unwrap();
        assert_eq!(en.count_by_norm(30, &[]).unwrap(), brute_force(2, &g, 30, 8));
    }

    #[test]
    fn prefixes_partition_the_walk() {
        let g = [2, -1, 0, -1, 2, -1, 0, -1, 2];
        let en = ExactEnumerator::new(3, &g).unwrap();
        let total = en.count_by_norm(6, &[]).unwrap();
        let mut sum = vec![0u64; 7];
        for p in en.prefixes(6, 2).unwrap() {
            let c = en.count_by_norm(6, &p).unwrap();
            for (a, b) in sum.iter_mut().zip(c) {
                *a += b;
            }
        }
        assert_eq!(sum, total);
    }

    #[test]
    fn aux_form_is_tracked() {
        let g = [2, -1, 0, -1, 2, -1, 0, -1, 2];
        let aux = [1, 2, 3, 2, 5, 6, 3, 6, 9];
        let en = ExactEnumerator::new(3, &g).unwrap();
        en.for_each_half_with_aux(8, &[], &aux, |x, q, a| {
            assert_eq!(q, en.norm(x));
            let mut direct = 0i128;
            for i in 0..3 {
                for j in 0..3 {
                    direct += (aux[i * 3 + j] * x[i] * x[j]) as i128;
                }
            }
            assert_eq!(a, direct);
        })
        .unwrap();
    }

    #[test]
    fn prefixed_walks_partition_larger_forms() {
        // E7 Cartan matrix and a skewed rank-5 form.
        let e7 = [
            2, 0, -1, 0, 0, 0, 0, 0, 2, 0, -1, 0, 0, 0, -1, 0, 2, -1, 0, 0, 0, 0, -1, -1, 2, -1, 0, 0, 0, 0, 0, -1, 2,
            -1, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, -1, 2,
        ];
        let skew = [4, 1, -2, 0, 1, 1, 6, 1, -3, 0, -2, 1, 8, 2, -1, 0, -3, 2, 10, 3, 1, 0, -1, 3, 12];
        for (n, g) in [(7usize, &e7[..]), (5, &skew[..])] {
            let en = ExactEnumerator::new(n, g).unwrap();
            for bound in [0, 1, 2, 5, 8, 12] {
                let total = en.count_by_norm(bound, &[]).unwrap();
                let mut sum = vec![0u64; bound as usize + 1];
                for p in en.prefixes(bound, 2).unwrap() {
                    en.for_each_half(bound, &p, |x, q| {
                        assert_eq!(q, en.norm(x));
                        sum[q as usize] += 2;
                    })
                    .unwrap();
                }
                assert_eq!(sum, total);
            }
        }
        let e7_roots = ExactEnumerator::new(7, &e7).unwrap().count_by_norm(2, &[]).unwrap();
        assert_eq!(e7_roots[2], 126);
    }

    #[test]
    fn rejects_indefinite() {
        assert!(matches!(
            ExactEnumerator::new(2, &[2, 3, 3, 2]),
            Err(EnumerationError::NotPositiveDefinite)
        ));
    }
}
