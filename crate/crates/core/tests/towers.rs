use std::path::PathBuf;

use wildtame_core::iwasawa::{
    assemble_tower, criterion_kernel_m1, detect_coinvariant_stabilization, detect_stabilization, one_prime_above_three,
    psi, psi_twisted_delta, Stabilization,
};
use wildtame_core::nfengine::{layer_field, RecordLibrary};
use wildtame_core::quadclass::{fundamental_discriminant, radicand};
use wildtame_core::FiniteAbelianGroup;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn library() -> RecordLibrary {
    let mut lib = RecordLibrary::new();
    lib.load_dir(&data_dir()).unwrap();
    assert!(lib.rejected().is_empty(), "{:?}", lib.rejected());
    lib
}

fn group(f: &[u64]) -> FiniteAbelianGroup {
    FiniteAbelianGroup::from_u64(f).unwrap()
}

#[test]
fn record_polynomials_are_the_canonical_layers() {
    let lib = library();
    for r in [-14i64, -239, 3739] {
        let q = fundamental_discriminant(r).unwrap();
        for n in 0..=2 {
            let f = layer_field(Some(&q), n).unwrap();
            let rec = lib.group(&f.label).unwrap_or_else(|| panic!("missing {}", f.label));
            assert_eq!(rec.field.poly, f.poly, "{}", f.label);
            assert_eq!(rec.field.signature, f.signature);
        }
    }
}

#[test]
fn psi_of_minus_14_is_cyclic_of_order_3() {
    let lib = library();
    let q = fundamental_discriminant(-14).unwrap();
    assert!(!one_prime_above_three(&q));
    let t = assemble_tower(&q, 2, &lib).unwrap();
    assert_eq!(t.max_level(), 2);
    assert!(t.levels[0].module.group().is_trivial());
    assert_eq!(detect_stabilization(&t), Stabilization::NotStabilized(2));
    assert_eq!(detect_coinvariant_stabilization(&t).unwrap(), Stabilization::Stable(1));
    let p = psi(&t).unwrap();
    assert_eq!(p.group, group(&[3]));
    assert!(p.next_level_checked);
    assert_eq!(psi_twisted_delta(&p, 1).unwrap(), group(&[3]));
    assert_eq!(criterion_kernel_m1(&t, 1).unwrap(), group(&[3]));
}

#[test]
fn psi_of_minus_239_vanishes() {
    let lib = library();
    let q = fundamental_discriminant(-239).unwrap();
    assert!(!one_prime_above_three(&q));
    let t = assemble_tower(&q, 2, &lib).unwrap();
    assert_eq!(t.levels[0].module.group(), &group(&[3]));
    let p = psi(&t).unwrap();
    assert!(p.group.is_trivial());
    assert_eq!(p.level, 0);
    assert!(criterion_kernel_m1(&t, 1).unwrap().is_trivial());
}

#[test]
fn psi_of_3739_is_nonzero() {
    let lib = library();
    let q = fundamental_discriminant(3739).unwrap();
    assert_eq!(radicand(q.d), 3739);
    let t = assemble_tower(&q, 2, &lib).unwrap();
    let p = psi(&t).unwrap();
    assert_eq!(p.group, group(&[3]));
    assert_eq!(p.level, 1);
}

#[test]
fn exact_sequence_orders() {
    let lib = library();
    for r in [-14i64, -239, 3739] {
        let q = fundamental_discriminant(r).unwrap();
        let t = assemble_tower(&q, 2, &lib).unwrap();
        let p = psi(&t).unwrap();
        assert_eq!(p.group.order() * t.levels[0].module.group().order(), p.coinvariants.order(), "{r}");
    }
}

#[test]
fn missing_levels_leave_psi_open() {
    let lib = RecordLibrary::new();
    let q = fundamental_discriminant(-239).unwrap();
    let t = assemble_tower(&q, 2, &lib).unwrap();
    assert_eq!(t.max_level(), 0);
    assert!(psi(&t).is_err());
}
