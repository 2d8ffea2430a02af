use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use thetalab_core::enumeration::all_targets;
use thetalab_core::exactnum::{hnf_rowreduce, rank_exact};
use thetalab_core::jacobi::jacobi_coefficient;
use thetalab_core::lattice::{direct_sum, root_lattice, RootType};
use thetalab_core::theta::{series_product, siegel_restrict, theta_truncated, ThetaTruncation};
use thetalab_core::{Engine, GramTarget, IntMatrix, Lattice, RatMatrix};

fn small_lattice(pick: usize) -> Lattice {
    match pick % 4 {
        0 => root_lattice(RootType::A, 2).unwrap(),
        1 => root_lattice(RootType::A, 3).unwrap(),
        2 => root_lattice(RootType::D, 4).unwrap(),
        _ => direct_sum(&root_lattice(RootType::A, 1).unwrap(), &root_lattice(RootType::A, 2).unwrap()),
    }
}

/// Identity with `row[i] += c·row[j]` applied for each step.
fn unimodular(n: usize, steps: &[(usize, usize, i64)]) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for &(i, j, c) in steps {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        for k in 0..n {
            u[i][k] += c * u[j][k];
        }
    }
    u
}

fn conjugate(g: &IntMatrix, u: &[Vec<i64>]) -> IntMatrix {
    let u = IntMatrix::from_rows(u);
    u.mul(g).unwrap().mul(&u.transpose()).unwrap()
}

fn signed_permutation(n: usize, order: &[usize], signs: &[bool]) -> Vec<Vec<i64>> {
    let mut p = vec![vec![0; n]; n];
    for (i, &o) in order.iter().enumerate() {
        p[i][o] = if signs[i] { -1 } else { 1 };
    }
    p
}

fn rotate_perm(n: usize, seed: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, (seed / (i + 1) + i * 7) % (i + 1));
    }
    order
}

fn engine() -> Engine {
    Engine::new(1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shell_counts_ignore_basis(pick in 0usize..4, steps in prop::collection::vec((0usize..4, 0usize..4, -2i64..=2), 0..6)) {
        let l = small_lattice(pick);
        let u = unimodular(l.rank(), &steps);
        let moved = Lattice::from_gram("moved", conjugate(l.gram(), &u)).unwrap();
        let e = engine();
        prop_assert_eq!(e.shell_counts(&l, 8).unwrap(), e.shell_counts(&moved, 8).unwrap());
    }

    #[test]
    fn counts_invariant_under_signed_permutation(seed in 0usize..1000, signs in prop::collection::vec(any::<bool>(), 2)) {
        let d4 = root_lattice(RootType::D, 4).unwrap();
        let e = engine();
        let p = IntMatrix::from_rows(&signed_permutation(2, &rotate_perm(2, seed), &signs));
        let targets = all_targets(2, 6);
        let t = &targets[seed % targets.len()];
        let moved = GramTarget::from_matrix(&p.mul(&t.to_matrix()).unwrap().mul(&p.transpose()).unwrap()).unwrap();
        prop_assert_eq!(e.representation_count(&d4, t).unwrap(), e.representation_count(&d4, &moved).unwrap());
    }

    #[test]
    fn direct_sum_shells_convolve(a in 0usize..4, b in 0usize..4) {
        let (x, y) = (small_lattice(a), small_lattice(b));
        let e = engine();
        let bound = 8;
        let cx = e.shell_counts(&x, bound).unwrap();
        let cy = e.shell_counts(&y, bound).unwrap();
        let sum = e.shell_counts(&direct_sum(&x, &y), bound).unwrap();
        for (n, total) in sum.iter().enumerate() {
            let expected: BigInt = (0..=n).map(|k| &cx[k] * &cy[n - k]).sum();
            prop_assert_eq!(total, &expected, "norm {}", n);
        }
    }

    #[test]
    fn hnf_ignores_row_order(entries in prop::collection::vec(-6i64..=6, 12), seed in 0usize..1000) {
        let rows: Vec<Vec<i64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
        prop_assume!(rank_exact(&IntMatrix::from_rows(&rows)) == 3);
        let order = rotate_perm(4, seed);
        let shuffled: Vec<Vec<i64>> = order.iter().map(|&i| rows[i].clone()).collect();
        let a = hnf_rowreduce(&IntMatrix::from_rows(&rows).to_rational()).unwrap();
        let b = hnf_rowreduce(&IntMatrix::from_rows(&shuffled).to_rational()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn hnf_spans_the_same_lattice(entries in prop::collection::vec(-6i64..=6, 12)) {
        let rows: Vec<Vec<i64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
        prop_assume!(rank_exact(&IntMatrix::from_rows(&rows)) == 3);
        let m: RatMatrix = IntMatrix::from_rows(&rows).to_rational();
        let basis = hnf_rowreduce(&m).unwrap();
        for i in 0..m.rows() {
            prop_assert!(basis.coordinates(m.row(i)).is_some());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn profiles_do_not_depend_on_jobs(pick in 0usize..4, jobs in 2usize..6) {
        let l = small_lattice(pick);
        let one = Engine::new(1).representation_profile(&l, 2, 6).unwrap();
        let many = Engine::new(jobs).representation_profile(&l, 2, 6).unwrap();
        prop_assert_eq!(one, many);
    }

    #[test]
    fn product_commutes_and_has_unit(a in 0usize..4, b in 0usize..4) {
        let e = engine();
        let x = theta_truncated(&e, &small_lattice(a), 2, 6).unwrap();
        let y = theta_truncated(&e, &small_lattice(b), 2, 6).unwrap();
        let xy = series_product(&x, &y).unwrap();
        let yx = series_product(&y, &x).unwrap();
        prop_assert_eq!(&xy.coeffs, &yx.coeffs);
        let unit = series_product(&x, &ThetaTruncation::one(2, 6)).unwrap();
        prop_assert_eq!(&unit.coeffs, &x.coeffs);
        let direct = theta_truncated(&e, &direct_sum(&small_lattice(a), &small_lattice(b)), 2, 6).unwrap();
        prop_assert_eq!(&xy.coeffs, &direct.coeffs);
    }

    #[test]
    fn restriction_commutes_with_product(a in 0usize..4, b in 0usize..4) {
        let e = engine();
        let x = theta_truncated(&e, &small_lattice(a), 2, 6).unwrap();
        let y = theta_truncated(&e, &small_lattice(b), 2, 6).unwrap();
        let left = siegel_restrict(&series_product(&x, &y).unwrap()).unwrap();
        let right = series_product(&siegel_restrict(&x).unwrap(), &siegel_restrict(&y).unwrap()).unwrap();
        prop_assert_eq!(left.coeffs, right.coeffs);
    }

    #[test]
    fn jacobi_moments(pick in 0usize..4, index in 1i64..=2) {
        let e = engine();
        let l = small_lattice(pick);
        let jc = jacobi_coefficient(&e, &l, 2, index, 4).unwrap();
        prop_assert!(jc.respects_cauchy_schwarz());
        let shell = e.shell_count(&l, 2 * index).unwrap();
        for s in jc.targets() {
            for i in 0..2 {
                prop_assert!(jc.first_moment(&s, i).is_zero());
            }
            let r = e.representation_count(&l, &s).unwrap();
            prop_assert_eq!(jc.marginal(&s), r * &shell);
        }
    }
}
