use std::time::Instant;

use wildtame_core::nfengine::{class_group_generic, layer_field, EngineParams};
use wildtame_core::quadclass::{class_group, fundamental_discriminant, s_class_group};
use wildtame_core::Assurance;

fn fundamental_discriminants(bound: i64) -> Vec<i64> {
    let mut out = Vec::new();
    for r in -bound..=bound {
        if let Ok(q) = fundamental_discriminant(r) {
            if q.d.abs() <= bound {
                out.push(r);
            }
        }
    }
    out
}

#[test]
fn engine_matches_forms_up_to_500() {
    let start = Instant::now();
    let mut count = 0;
    for r in fundamental_discriminants(500) {
        let q = fundamental_discriminant(r).unwrap();
        let field = layer_field(Some(&q), 0).unwrap();
        let out = class_group_generic(&field, &EngineParams::default())
            .unwrap_or_else(|e| panic!("engine failed on D = {}: {e}", q.d));
        let forms = class_group(q.d).unwrap();
        assert_eq!(out.class_group, forms.group, "D = {}", q.d);
        assert_eq!(out.assurance, Assurance::Pinned, "D = {}", q.d);
        let (s, _) = s_class_group(&q, 3).unwrap();
        assert_eq!(out.record.s_class_group, s.sylow(3).unwrap(), "3-part, D = {}", q.d);
        count += 1;
    }
    assert!(count > 280, "{count}");
    eprintln!("{count} discriminants in {:?}", start.elapsed());
}
