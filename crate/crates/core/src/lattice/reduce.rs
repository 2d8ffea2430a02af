//! LLL reduction of an integer Gram matrix.
//!
//! Gram–Schmidt data is kept in `f64` and only decides which unimodular row
//! operations to apply; the Gram matrix and the transform are updated in
//! exact integer arithmetic, so the output is always an exact basis change of
//! the input regardless of rounding.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::exactnum::IntMatrix;

const DELTA: f64 = 0.99;
const MAX_SWAPS: usize = 1_000_000;

/// Result of [`lll_reduce`]: `gram = transform · input · transformᵀ`.
#[derive(Clone, Debug)]
pub struct LllOutput {
    pub transform: IntMatrix,
    pub gram: IntMatrix,
}

/// LLL-reduces a positive definite Gram matrix. Entries must fit in `i64`;
/// returns `None` if they do not or if an update overflows `i128`.
pub fn lll_reduce(gram: &IntMatrix) -> Option<LllOutput> {
    let n = gram.rows();
    let mut g: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| gram.get(i, j).to_i128()).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    let mut t: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();

    let mut k = 1usize;
    let mut swaps = 0usize;
    while k < n && swaps < MAX_SWAPS {
        let (mut mu, bstar) = gso(&g, k);
        for j in (0..k).rev() {
            if mu[k][j].abs() <= 0.5 + 1e-9 {
                continue;
            }
            let q = mu[k][j].round();
            let q = q as i128;
            // b_k <- b_k - q b_j
            let gkk = g[k][k]
                .checked_sub(2i128.checked_mul(q)?.checked_mul(g[k][j])?)?
                .checked_add(q.checked_mul(q)?.checked_mul(g[j][j])?)?;
            for i in 0..n {
                if i != k {
                    let v = g[k][i].checked_sub(q.checked_mul(g[j][i])?)?;
                    g[k][i] = v;
                    g[i][k] = v;
                }
            }
            g[k][k] = gkk;
            for c in 0..n {
                t[k][c] = t[k][c].checked_sub(q.checked_mul(t[j][c])?)?;
            }
            let qf = q as f64;
            for i in 0..j {
                mu[k][i] -= qf * mu[j][i];
            }
            mu[k][j] -= qf;
        }
        let lhs = bstar_after_reduction(&g, &mu, &bstar, k);
        if lhs < (DELTA - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            t.swap(k, k - 1);
            swaps += 1;
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }

    let to_matrix = |m: &[Vec<i128>]| {
        IntMatrix::new(n, n, m.iter().flat_map(|r| r.iter().map(|&v| BigInt::from(v))).collect())
    };
    Some(LllOutput { transform: to_matrix(&t), gram: to_matrix(&g) })
}

/// Predicted number of nodes in a Fincke–Pohst walk for `Q ≤ bound`, by the
/// Gaussian heuristic: `Σ_k V_k B^{k/2} / √(D_{n-k} ⋯ D_{n-1})` with `V_k` the
/// unit-ball volume and `D_i` the Gram–Schmidt squared lengths.
pub fn enumeration_cost(gram: &IntMatrix, bound: i64) -> Option<f64> {
    let n = gram.rows();
    if n == 0 {
        return Some(0.0);
    }
    let g: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| gram.get(i, j).to_i128()).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    let (_, bstar) = gso(&g, n - 1);
    let b = bound as f64;
    let (mut total, mut tail, mut vol, mut vol_prev) = (0.0, 1.0, 2.0, 1.0);
    for k in 1..=n {
        if k > 1 {
            let next = vol_prev * 2.0 * std::f64::consts::PI / k as f64;
            vol_prev = vol;
            vol = next;
        }
        tail *= bstar[n - k];
        total += vol * b.powf(k as f64 / 2.0) / tail.sqrt();
    }
    Some(total)
}

/// The basis with the smallest [`enumeration_cost`] among the input itself
/// and LLL reductions of its cyclic rotations and their reversals. Ties keep
/// the earlier candidate, so the choice is deterministic.
pub fn enumeration_basis(gram: &IntMatrix, bound: i64) -> Option<LllOutput> {
    let n = gram.rows();
    let mut best = LllOutput { transform: IntMatrix::identity(n), gram: gram.clone() };
    let mut best_cost = enumeration_cost(gram, bound)?;
    for reverse in [false, true] {
        for r in 0..n {
            let mut order: Vec<usize> = (0..n).map(|i| (i + r) % n).collect();
            if reverse {
                order.reverse();
            }
            let mut p = IntMatrix::zeros(n, n);
            for (i, &j) in order.iter().enumerate() {
                p.set(i, j, BigInt::from(1));
            }
            let permuted = p.mul(gram).ok()?.mul(&p.transpose()).ok()?;
            let Some(out) = lll_reduce(&permuted) else { continue };
            let Some(cost) = enumeration_cost(&out.gram, bound) else { continue };
            if cost < best_cost {
                best_cost = cost;
                best = LllOutput { transform: out.transform.mul(&p).ok()?, gram: out.gram };
            }
        }
    }
    Some(best)
}

/// Gram–Schmidt coefficients and squared lengths for rows `0..=k`.
fn gso(g: &[Vec<i128>], k: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = g.len();
    let mut mu = vec![vec![0.0f64; n]; n];
    let mut bstar = vec![0.0f64; n];
    for i in 0..=k {
        for j in 0..i {
            let mut s = g[i][j] as f64;
            for l in 0..j {
                s -= mu[j][l] * mu[i][l] * bstar[l];
            }
            mu[i][j] = s / bstar[j];
        }
        let mut s = g[i][i] as f64;
        for l in 0..i {
            s -= mu[i][l] * mu[i][l] * bstar[l];
        }
        bstar[i] = s;
    }
    (mu, bstar)
}

fn bstar_after_reduction(g: &[Vec<i128>], mu: &[Vec<f64>], bstar: &[f64], k: usize) -> f64 {
    let mut s = g[k][k] as f64;
    for l in 0..k {
        s -= mu[k][l] * mu[k][l] * bstar[l];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::det_exact;

    #[test]
    fn reduces_skewed_basis_exactly() {
        // Basis of Z^3 sheared far away from orthogonal.
        let b = IntMatrix::from_rows(&[[1, 0, 0], [37, 1, 0], [-91, 53, 1]]);
        let gram = b.mul(&b.transpose()).unwrap();
        let out = lll_reduce(&gram).unwrap();
        let check = out.transform.mul(&gram).unwrap().mul(&out.transform.transpose()).unwrap();
        assert_eq!(check, out.gram);
        assert_eq!(det_exact(&out.transform).unwrap().magnitude(), &1u32.into());
        assert_eq!(out.gram, IntMatrix::identity(3));
    }

    #[test]
    fn enumeration_basis_is_a_basis_change() {
        let gram = IntMatrix::from_rows(&[[4, 2, 1, 0], [2, 4, 1, 1], [1, 1, 2, 1], [0, 1, 1, 2]]);
        let out = enumeration_basis(&gram, 8).unwrap();
        let check = out.transform.mul(&gram).unwrap().mul(&out.transform.transpose()).unwrap();
        assert_eq!(check, out.gram);
        assert_eq!(det_exact(&out.transform).unwrap().magnitude(), &1u32.into());
        assert!(enumeration_cost(&out.gram, 8).unwrap() <= enumeration_cost(&gram, 8).unwrap());
    }

    #[test]
    fn keeps_reduced_input() {
        let gram = IntMatrix::from_rows(&[[2, -1], [-1, 2]]);
        let out = lll_reduce(&gram).unwrap();
        assert_eq!(out.gram, gram);
    }
}
