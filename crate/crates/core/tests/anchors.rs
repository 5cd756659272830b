use std::path::PathBuf;

use wildtame_core::kernelctl::{compositum_delta_part, keune_tate_rank, wk_from_level_one, DataSources, Structure, Verdict};
use wildtame_core::nfengine::RecordLibrary;
use wildtame_core::{analyze, FiniteAbelianGroup};

fn sources() -> DataSources {
    let mut lib = RecordLibrary::new();
    lib.load_dir(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")).unwrap();
    assert!(lib.rejected().is_empty(), "{:?}", lib.rejected());
    DataSources::new(lib)
}

fn g(f: &[u64]) -> Structure {
    Structure::Determined(FiniteAbelianGroup::from_u64(f).unwrap())
}

#[test]
fn delta_717() {
    let r = analyze(717, &sources()).unwrap();
    assert_eq!(r.verdict, Verdict::Split);
    assert_eq!(r.v3_order.as_deref(), Some("2"));
    assert_eq!(r.rank3.as_deref(), Some("2"));
    assert_eq!(r.wk_structure, g(&[3]));
    assert_eq!(r.k2_structure, g(&[3, 3]));
    assert_eq!(r.deciding_rule().unwrap().rule, "R1");
}

#[test]
fn delta_42() {
    let r = analyze(42, &sources()).unwrap();
    assert_eq!(r.verdict, Verdict::NonSplit);
    assert_eq!(r.v3_order.as_deref(), Some("3"));
    assert_eq!(r.wk_structure, g(&[9]));
    assert_eq!(r.k2_structure, g(&[27]));
    assert_eq!(r.deciding_rule().unwrap().rule, "R2");
}

#[test]
fn deltas_4227_4974() {
    let src = sources();
    let a = analyze(4227, &src).unwrap();
    assert_eq!(a.wk_structure, g(&[3, 3]));
    assert_eq!(a.k2_structure, g(&[3, 9]));
    assert_eq!(a.verdict, Verdict::NonSplit);
    let b = analyze(4974, &src).unwrap();
    assert_eq!(b.wk_structure, g(&[9]));
    assert_eq!(b.k2_structure, g(&[3, 9]));
    assert_eq!(b.verdict, Verdict::Split);
    for (d, w) in [(4227, &[3u64, 3][..]), (4974, &[9][..])] {
        let rec = src.library.group(&format!("Q(sqrt({d}))(zeta9)")).unwrap();
        assert_eq!(wk_from_level_one(&rec).unwrap(), FiniteAbelianGroup::from_u64(w).unwrap());
    }
}

#[test]
fn delta_minus_11217() {
    let r = analyze(-11217, &sources()).unwrap();
    assert_eq!(r.rank3.as_deref(), Some("2"));
    assert_eq!(r.v3_source.as_deref(), Some("ingested"));
    assert_eq!(r.k2_structure, g(&[3, 3]));
    assert_eq!(r.verdict, Verdict::Split);
    let psi = r.evidence.iter().find(|e| e.rule == "PSI").unwrap();
    assert_eq!(psi.inputs["status"], "nonzero");
    assert!(r.diagnostics.iter().any(|d| d.contains("descent surjection")));
}

#[test]
fn compositum_rank_matches_forms() {
    let src = sources();
    let deltas = [6, 15, 33, 42, 69, 105, 717, 4227, -21, -11217];
    for d in deltas {
        let rec = src.library.group(&format!("Q(sqrt({d}))(zeta3)")).unwrap();
        let c = compositum_delta_part(&rec).unwrap();
        assert_eq!(c.p_rank(3) + 1, keune_tate_rank(d).unwrap(), "δ = {d}");
    }
    let c = compositum_delta_part(&src.library.group("Q(sqrt(-11217))(zeta3)").unwrap()).unwrap();
    assert_eq!(c.order(), 3.into());
}
