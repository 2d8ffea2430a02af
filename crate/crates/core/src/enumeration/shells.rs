//! Shells of lattice vectors and their packed storage for inner-product
//! loops.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::EnumerationError;
use crate::lattice::Lattice;

/// Half of a set of lattice vectors (one of each `±v`), stored with the
/// coordinates and the Gram images `G·v` padded to a common stride so that
/// `(u, v)` is a plain dot product of `coords(u)` and `image(v)`.
#[derive(Clone, Debug, Default)]
pub struct PackedVectors {
    dim: usize,
    stride: usize,
    len: usize,
    coords: Vec<i32>,
    images: Vec<i32>,
}

// Keeps the i32 dot products exact: |Σ uᵢ (Gv)ᵢ| ≤ stride · max|u| · max|Gv|.
const DOT_LIMIT: i64 = i32::MAX as i64;

impl PackedVectors {
    pub fn new(dim: usize) -> Self {
        let stride = dim.div_ceil(8).max(1) * 8;
        PackedVectors { dim, stride, len: 0, coords: Vec::new(), images: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn push(&mut self, x: &[i64], gram: &[i64]) -> Result<(), EnumerationError> {
        let n = self.dim;
        for i in 0..self.stride {
            let c = if i < n { x[i] } else { 0 };
            let g: i64 = if i < n { (0..n).map(|j| gram[i * n + j] * x[j]).sum() } else { 0 };
            self.coords.push(i32::try_from(c).map_err(|_| EnumerationError::CoordinateOverflow)?);
            self.images.push(i32::try_from(g).map_err(|_| EnumerationError::CoordinateOverflow)?);
        }
        self.len += 1;
        Ok(())
    }

    fn check_dot_range(&self) -> Result<(), EnumerationError> {
        let max_c = self.coords.iter().map(|v| i64::from(*v).abs()).max().unwrap_or(0);
        let max_g = self.images.iter().map(|v| i64::from(*v).abs()).max().unwrap_or(0);
        if (self.stride as i64).saturating_mul(max_c).saturating_mul(max_g) > DOT_LIMIT {
            return Err(EnumerationError::CoordinateOverflow);
        }
        Ok(())
    }

    #[inline]
    pub fn coords(&self, i: usize) -> &[i32] {
        &self.coords[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn image(&self, i: usize) -> &[i32] {
        &self.images[i * self.stride..(i + 1) * self.stride]
    }

    /// Coordinates of vector `i` without padding.
    pub fn vector(&self, i: usize) -> Vec<i64> {
        self.coords(i)[..self.dim].iter().map(|&v| i64::from(v)).collect()
    }
}

/// Inner product of packed coordinates with a packed Gram image.
#[inline]
pub(crate) fn dot(coords: &[i32], image: &[i32]) -> i32 {
    coords.iter().zip(image).fold(0i32, |acc, (a, b)| acc.wrapping_add(a.wrapping_mul(*b)))
}

/// Half shells of the requested norms, each in enumeration order.
pub(crate) fn collect_half_shells(
    lattice: &Lattice,
    norms: &[i64],
    pool: &rayon::ThreadPool,
) -> Result<BTreeMap<i64, PackedVectors>, EnumerationError> {
    use rayon::prelude::*;

    let n = lattice.rank();
    let mut out: BTreeMap<i64, PackedVectors> = norms.iter().map(|&q| (q, PackedVectors::new(n))).collect();
    let Some(&max) = norms.iter().max() else { return Ok(out) };
    if n == 0 || max <= 0 {
        return Ok(out);
    }
    let en = lattice.enumerator()?;
    let prefixes = en.prefixes(max, prefix_depth(n))?;
    let gram = lattice.gram_i64();
    let chunks: Vec<Result<Vec<(i64, Vec<i64>)>, EnumerationError>> = pool.install(|| {
        prefixes
            .par_iter()
            .map(|p| {
                let mut found = Vec::new();
                en.for_each_half(max, p, |x, q| {
                    if norms.contains(&q) {
                        found.push((q, x.to_vec()));
                    }
                })?;
                Ok(found)
            })
            .collect()
    });
    for chunk in chunks {
        for (q, x) in chunk? {
            out.get_mut(&q).expect("norm requested").push(&x, gram)?;
        }
    }
    for set in out.values() {
        set.check_dot_range()?;
    }
    Ok(out)
}

/// Number of top coordinates fixed per parallel work unit.
pub(crate) fn prefix_depth(rank: usize) -> usize {
    match rank {
        0..=4 => 0,
        5..=12 => 2,
        _ => 3,
    }
}

/// Counts of vectors of each norm `0..=bound` (index = norm; the zero vector
/// is counted at norm 0).
pub(crate) fn count_shells(
    lattice: &Lattice,
    bound: i64,
    pool: &rayon::ThreadPool,
) -> Result<Vec<u64>, EnumerationError> {
    use rayon::prelude::*;

    if bound < 0 {
        return Err(EnumerationError::NegativeBound(bound));
    }
    let mut counts = vec![0u64; bound as usize + 1];
    counts[0] = 1;
    let n = lattice.rank();
    if n == 0 {
        return Ok(counts);
    }
    let (en, _) = lattice.enumerator_for_bound(bound)?;
    let prefixes = en.prefixes(bound, prefix_depth(n))?;
    let parts: Vec<Result<Vec<u64>, EnumerationError>> =
        pool.install(|| prefixes.par_iter().map(|p| en.count_by_norm(bound, p)).collect());
    for part in parts {
        for (c, v) in counts.iter_mut().zip(part?) {
            *c += v;
        }
    }
    Ok(counts)
}

/// Vectors of one norm, both signs, if retained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shell {
    #[serde(with = "crate::decimal")]
    pub count: BigInt,
    pub vectors: Option<Vec<Vec<i64>>>,
}

/// All vectors of norm at most `max_norm`, grouped by norm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShellTable {
    pub lattice: String,
    pub fingerprint: String,
    pub max_norm: i64,
    pub shells: BTreeMap<i64, Shell>,
}

impl ShellTable {
    pub fn count(&self, norm: i64) -> BigInt {
        self.shells.get(&norm).map(|s| s.count.clone()).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{root_lattice, RootType};

    fn pool() -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap()
    }

    #[test]
    fn e8_shell_counts() {
        let e8 = root_lattice(RootType::E, 8).unwrap();
        let c = count_shells(&e8, 6, &pool()).unwrap();
        assert_eq!(c, vec![1, 0, 240, 0, 2160, 0, 6720]);
    }

    #[test]
    fn packed_dot_products() {
        let a2 = root_lattice(RootType::A, 2).unwrap();
        let shells = collect_half_shells(&a2, &[2], &pool()).unwrap();
        let roots = &shells[&2];
        assert_eq!(roots.len(), 3);
        for i in 0..3 {
            assert_eq!(dot(roots.coords(i), roots.image(i)), 2);
            for j in 0..3 {
                let d = dot(roots.coords(i), roots.image(j));
                assert_eq!(i64::from(d), a2.inner(&roots.vector(i), &roots.vector(j)));
            }
        }
    }
}
