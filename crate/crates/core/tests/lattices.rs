use std::time::Instant;

use thetalab_core::lattice::registry::{rank24_names, Registry, RANK24_PAIRS};
use thetalab_core::lattice::{
    direct_sum, extremality_check, minimum_norm, plus_construction, root_lattice, root_system, validate, RootType,
};
use thetalab_core::enumeration;

#[test]
fn rank24_lattices_are_niemeier() {
    let start = Instant::now();
    let reg = Registry::builtin();
    for &(a, b, roots) in RANK24_PAIRS.iter() {
        for name in [a, b] {
            let l = reg.resolve(name).unwrap();
            assert_eq!(l.rank(), 24, "{name}");
            let v = validate(&l);
            assert!(v.is_even_unimodular(), "{name}: {v:?}");
            let rs = root_system(&l).unwrap();
            assert!(rs.matches_label(name).unwrap(), "{name} has root system {rs}");
            assert_eq!(rs.root_count, roots, "{name}");
            let h = rs.coxeter_number().expect("single Coxeter number");
            assert_eq!(24 * h, roots, "{name}");
            assert_eq!(v.root_count, Some(roots));
        }
    }
    assert_eq!(rank24_names().len(), 10);
    eprintln!("rank-24 suite took {:?}", start.elapsed());
}

#[test]
fn rank16_lattices() {
    let reg = Registry::builtin();
    for name in ["E8+E8", "D16+"] {
        let l = reg.resolve(name).unwrap();
        let v = validate(&l);
        assert!(v.is_even_unimodular(), "{name}");
        assert_eq!(v.min_norm, Some(2));
        assert_eq!(v.root_count, Some(480));
    }
    let d16 = root_system(&reg.resolve("D16+").unwrap()).unwrap();
    assert_eq!(d16.label(), "D16");
    let e8e8 = root_system(&reg.resolve("E8+E8").unwrap()).unwrap();
    assert_eq!(e8e8.label(), "E8^2");
}

#[test]
fn plus_construction_rank8_is_e8_like() {
    let l = plus_construction(8).unwrap();
    let v = validate(&l);
    assert!(v.is_even_unimodular());
    assert_eq!(v.root_count, Some(240));
    assert!(plus_construction(12).is_err());
}

#[test]
fn extremality_of_examples() {
    let e8 = root_lattice(RootType::E, 8).unwrap();
    let e8_3 = direct_sum(&direct_sum(&e8, &e8), &e8);
    let ext = extremality_check(&e8_3).unwrap();
    assert_eq!((ext.bound, ext.min_norm, ext.is_extremal), (4, 2, false));
    assert_eq!(minimum_norm(&root_lattice(RootType::A, 1).unwrap()).unwrap(), 2);
}

#[test]
fn a_n_determinants() {
    for n in 1..=8 {
        let a = root_lattice(RootType::A, n).unwrap();
        assert_eq!(a.determinant(), (n as i64 + 1).into());
    }
}

#[test]
fn direct_sum_with_zero_is_identity() {
    let e8 = root_lattice(RootType::E, 8).unwrap();
    let sum = direct_sum(&e8, &thetalab_core::Lattice::zero());
    assert_eq!(sum.gram(), e8.gram());
    let two = direct_sum(&e8, &e8);
    assert_eq!(enumeration::shell_count(&two, 2).unwrap(), 480.into());
    assert_eq!(two.gram(), &e8.gram().block_diag(e8.gram()));
}
