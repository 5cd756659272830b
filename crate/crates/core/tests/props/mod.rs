//! Property suites shared by the `properties` and `acceptance` test targets.
#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use wildtame_core::exactalg::{hnf, smith, subgroup_generated};
use wildtame_core::galmod::{
    casa_check, casa_from_chain, eigenspace, equivariant_section_exists, induced_map, purity_split_check, tate_twist,
    CyclotomicCharacterTable, FiniteGaloisModule,
};
use wildtame_core::iwasawa::{criterion_kernel_m1, psi, psi_at_level, Level, TowerData, GAMMA};
use wildtame_core::kernelctl::{
    abelian_split_decision, eligible_deltas, index_three_subgroup_types, three_groups_of_rank,
};
use wildtame_core::nfengine::RecordLibrary;
use wildtame_core::{analyze, Assurance, DataSources, FiniteAbelianGroup, GroupHom, IntMatrix, Verdict};

const CASES: u32 = 256;

type Outcome = Result<(), TestCaseError>;

fn check<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Outcome) -> Result<(), String> {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new(config).run(&strategy, test).map_err(|e| e.to_string())
}

fn pow3(e: u32) -> BigInt {
    BigInt::from(3).pow(e)
}

fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=5, 1usize..=5)
        .prop_flat_map(|(m, n)| (Just(m), Just(n), prop::collection::vec(-20i64..=20, m * n)))
        .prop_map(|(m, n, v)| IntMatrix::from_i64(m, n, &v))
}

fn three_group() -> impl Strategy<Value = FiniteAbelianGroup> {
    prop::collection::vec(1u32..=3, 1..=3).prop_map(|es| {
        let orders: Vec<BigInt> = es.iter().map(|&e| pow3(e)).collect();
        FiniteAbelianGroup::from_orders(&orders).unwrap()
    })
}

fn elements(g: &FiniteAbelianGroup, raw: &[i64]) -> Vec<Vec<BigInt>> {
    let r = g.rank();
    raw.chunks(r.max(1))
        .filter(|c| c.len() == r)
        .map(|c| g.reduce(&c.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()))
        .collect()
}

fn is_hnf(h: &IntMatrix) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero = false;
    for i in 0..h.rows() {
        let row = h.row(i);
        match row.iter().position(|x| !x.is_zero()) {
            None => seen_zero = true,
            Some(j) => {
                if seen_zero || last_pivot.is_some_and(|p| j <= p) || row[j] <= BigInt::zero() {
                    return false;
                }
                for k in 0..i {
                    let a = &h.row(k)[j];
                    if *a < BigInt::zero() || *a >= row[j] {
                        return false;
                    }
                }
                last_pivot = Some(j);
            }
        }
    }
    true
}

pub fn hnf_is_unimodular_and_normal() -> Result<(), String> {
    check(small_matrix(), |a| {
        let (h, u) = hnf(&a);
        prop_assert!(u.is_unimodular());
        prop_assert_eq!(u.mul(&a), h.clone());
        prop_assert!(is_hnf(&h));
        Ok(())
    })
}

pub fn snf_is_unimodular_and_divisible() -> Result<(), String> {
    check(small_matrix(), |a| {
        let s = smith(&a);
        prop_assert!(s.u.is_unimodular() && s.v.is_unimodular());
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert!(s.u.mul(&s.u_inv).is_unimodular() && s.u.mul(&s.u_inv) == IntMatrix::identity(a.rows()));
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    prop_assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        let d = s.diagonal();
        for w in d.windows(2) {
            prop_assert!(w[0] >= BigInt::zero());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
        Ok(())
    })
}

/// A product of elementary matrices and its inverse.
fn elementary_pair(r: usize, ops: &[(usize, usize, i64)]) -> (IntMatrix, IntMatrix) {
    let mut p = IntMatrix::identity(r);
    let mut p_inv = IntMatrix::identity(r);
    for &(i, j, k) in ops {
        let (i, j) = (i % r, j % r);
        if i == j {
            continue;
        }
        p.add_row_multiple(i, j, &BigInt::from(k));
        // (E·P)^{-1} = P^{-1}·E^{-1}
        p_inv.add_col_multiple(j, i, &BigInt::from(-k));
    }
    (p, p_inv)
}

fn free_module(e: u32, r: usize) -> FiniteAbelianGroup {
    FiniteAbelianGroup::from_orders(&vec![pow3(e); r]).unwrap()
}

fn same_action(a: &FiniteGaloisModule, b: &FiniteGaloisModule, name: &str) -> bool {
    let (ga, gb) = (a.actor_hom(name).unwrap(), b.actor_hom(name).unwrap());
    let g = a.group();
    (0..g.rank()).all(|i| {
        let x = g.generator(i);
        g.reduce(&ga.apply(&x)) == g.reduce(&gb.apply(&x))
    })
}

pub fn eigenspaces_partition_the_order() -> Result<(), String> {
    check(
        (
            1u32..=3,
            prop::collection::vec(any::<bool>(), 1..=4),
            prop::collection::vec((0usize..4, 0usize..4, -3i64..=3), 0..8),
        ),
        |(e, signs, ops)| {
            let r = signs.len();
            let g = free_module(e, r);
            let (p, p_inv) = elementary_pair(r, &ops);
            let d = IntMatrix::diagonal(
                &signs
                    .iter()
                    .map(|&s| BigInt::from(if s { 1 } else { -1 }))
                    .collect::<Vec<_>>(),
            );
            let delta = p.mul(&d).mul(&p_inv);
            let m = FiniteGaloisModule::new(g.clone(), vec![("delta".into(), delta)], None).unwrap();
            let plus = eigenspace(&m, "delta", 2, &BigInt::one()).unwrap();
            let minus = eigenspace(&m, "delta", 2, &BigInt::from(-1)).unwrap();
            prop_assert_eq!(plus.group().order() * minus.group().order(), g.order());
            let n_plus = signs.iter().filter(|&&s| s).count() as u32;
            prop_assert_eq!(plus.group().order(), pow3(e * n_plus));
            Ok(())
        },
    )
}

pub fn twists_are_functorial() -> Result<(), String> {
    check(
        (
            1u32..=3,
            1usize..=3,
            prop::collection::vec(0i64..3, 9),
            (-4i64..=4, -4i64..=4),
            -3i64..=3,
            -3i64..=3,
        ),
        |(e, r, n, c, j, k)| {
            let g = free_module(e, r);
            let q = pow3(e);
            let nm = IntMatrix::from_i64(r, r, &n[..r * r]);
            let gamma = IntMatrix::identity(r).add(&nm.scale(&BigInt::from(3)));
            let m = FiniteGaloisModule::new(g.clone(), vec![(GAMMA.into(), gamma.clone())], Some(q)).unwrap();
            let chi = CyclotomicCharacterTable::standard_3adic();
            let f = GroupHom::new(
                g.clone(),
                g.clone(),
                IntMatrix::identity(r)
                    .scale(&BigInt::from(c.0))
                    .add(&gamma.scale(&BigInt::from(c.1))),
            )
            .unwrap();
            prop_assert!(m.is_equivariant(&f, &m).unwrap());
            let mj = tate_twist(&m, j, &chi).unwrap();
            prop_assert!(mj.is_equivariant(&f, &mj).unwrap());
            let mjk = tate_twist(&mj, k, &chi).unwrap();
            prop_assert!(same_action(&mjk, &tate_twist(&m, j + k, &chi).unwrap(), GAMMA));
            prop_assert!(same_action(&tate_twist(&mj, -j, &chi).unwrap(), &m, GAMMA));
            prop_assert!(same_action(&tate_twist(&m, 0, &chi).unwrap(), &m, GAMMA));
            Ok(())
        },
    )
}

pub fn purity_iff_section_under_trivial_actions() -> Result<(), String> {
    check(
        (three_group(), prop::collection::vec(-30i64..=30, 0..=9)),
        |(g, raw)| {
            let (_, incl) = subgroup_generated(&g, &elements(&g, &raw));
            let pure = purity_split_check(&incl).unwrap();
            let (q, proj) = incl.cokernel();
            let src = FiniteGaloisModule::new(g.clone(), vec![], None).unwrap();
            let tgt = FiniteGaloisModule::new(q, vec![], None).unwrap();
            let (section, _) = equivariant_section_exists(&proj, &src, &tgt).unwrap();
            prop_assert_eq!(pure, section);
            Ok(())
        },
    )
}

pub fn casa_conditions_agree() -> Result<(), String> {
    check(
        (
            three_group(),
            prop::collection::vec(-30i64..=30, 0..=9),
            prop::collection::vec(-30i64..=30, 0..=9),
        ),
        |(b2, raw_a, raw_b)| {
            let (a2, a2_incl) = subgroup_generated(&b2, &elements(&b2, &raw_a));
            let (_, b1_incl) = subgroup_generated(&a2, &elements(&a2, &raw_b));
            let d = casa_from_chain(&b2, &a2_incl, &b1_incl).unwrap();
            let (i, ii) = casa_check(&d).unwrap();
            prop_assert_eq!(i, ii);
            Ok(())
        },
    )
}

/// Tower with A_0 = X/((γ−1)X + W0) and A_n = X/((γ^{3^n}−1)X + W) for n ≥ 1, norms induced by
/// the identity of X. Returns it with the expected |Ψ| = [(γ−1)X + W0 : (γ−1)X + W].
fn synthetic_tower(e: u32, r: usize, n: &[i64], w: u32, extra: &[i64], levels: usize) -> (TowerData, BigInt) {
    let g = free_module(e, r);
    let gamma = IntMatrix::identity(r).add(&IntMatrix::from_i64(r, r, &n[..r * r]).scale(&BigInt::from(3)));
    let x = FiniteGaloisModule::new(g.clone(), vec![(GAMMA.into(), gamma.clone())], None).unwrap();
    let id = IntMatrix::identity(r);
    let cols = |m: &IntMatrix| (0..r).map(|j| g.reduce(&m.column(j))).collect::<Vec<_>>();
    let w_gens = cols(&id.scale(&pow3(w)));
    let mut w0_gens = w_gens.clone();
    w0_gens.extend(elements(&g, extra));

    let mut quotients = Vec::new();
    let mut gp = gamma.clone();
    for lvl in 0..=levels {
        let mut gens = cols(&gp.sub(&id));
        gens.extend(if lvl == 0 { w0_gens.clone() } else { w_gens.clone() });
        let (_, incl) = subgroup_generated(&g, &gens);
        let (q, proj) = incl.cokernel();
        let module = x.push_to_quotient(&proj, &q).unwrap();
        quotients.push((module, proj));
        gp = gp.mul(&gp).mul(&gp);
        gp.reduce_rows_mod(&vec![pow3(e); r]);
    }
    let levels_v: Vec<Level> = quotients
        .iter()
        .enumerate()
        .map(|(i, (m, _))| Level {
            label: format!("L{i}"),
            module: m.clone(),
            assurance: Assurance::Pinned,
        })
        .collect();
    let idx = GroupHom::identity(&g);
    let norms: Vec<GroupHom> = (0..levels)
        .map(|i| induced_map(&idx, &quotients[i + 1].1, &quotients[i].1).unwrap())
        .collect();
    let t = TowerData::new("X", levels_v, norms, true).unwrap();

    let coinv = |gens: &[Vec<BigInt>]| {
        let mut all = cols(&gamma.sub(&id));
        all.extend(gens.iter().cloned());
        subgroup_generated(&g, &all).0.order()
    };
    (t, coinv(&w0_gens) / coinv(&w_gens))
}

pub fn psi_is_level_independent() -> Result<(), String> {
    check(
        (
            1u32..=3,
            1usize..=3,
            prop::collection::vec(0i64..3, 9),
            1u32..=3,
            prop::collection::vec(-9i64..=9, 0..=6),
        ),
        |(e, r, n, w, extra)| {
            let (t, expected) = synthetic_tower(e, r, &n, w.min(e), &extra, 3);
            let p = psi(&t).unwrap();
            prop_assert!(p.next_level_checked);
            prop_assert_eq!(p.group.order(), expected);
            for lvl in 1..=t.max_level() {
                let (m, _) = psi_at_level(&t, lvl).unwrap();
                prop_assert_eq!(m.group(), &p.group);
            }
            Ok(())
        },
    )
}

pub fn psi_zero_forces_zero_criterion_kernel() -> Result<(), String> {
    check(
        (
            1u32..=3,
            1usize..=3,
            prop::collection::vec(0i64..3, 9),
            1u32..=3,
            prop::collection::vec(-9i64..=9, 0..=6),
        ),
        |(e, r, n, w, extra)| {
            let (t, _) = synthetic_tower(e, r, &n, w.min(e), &extra, 2);
            let p = psi(&t).unwrap();
            let ck = criterion_kernel_m1(&t, 1).unwrap();
            if p.group.is_trivial() {
                prop_assert!(ck.is_trivial());
            }
            Ok(())
        },
    )
}

pub fn split_decision_matches_removing_a_z3() -> Result<(), String> {
    check((prop::collection::vec(1u32..=3, 1..=4), 0usize..4), |(es, pick)| {
        let orders: Vec<BigInt> = es.iter().map(|&e| pow3(e)).collect();
        let k2 = FiniteAbelianGroup::from_orders(&orders).unwrap();
        let subs = index_three_subgroup_types(&k2);
        let w = &subs[pick % subs.len()];
        let z3 = FiniteAbelianGroup::cyclic(3);
        let v = abelian_split_decision(&k2, w, &z3).unwrap();
        let mut with = w.invariant_factors().to_vec();
        with.push(BigInt::from(3));
        let expect = FiniteAbelianGroup::from_orders(&with).unwrap() == k2;
        prop_assert_eq!(v == Verdict::Split, expect);
        let a: u32 = es.iter().sum();
        prop_assert!(three_groups_of_rank(a, es.len()).contains(&k2));
        Ok(())
    })
}

fn sources() -> &'static DataSources {
    static S: OnceLock<DataSources> = OnceLock::new();
    S.get_or_init(|| {
        let mut lib = RecordLibrary::new();
        lib.load_dir(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
            .unwrap();
        DataSources::new(lib)
    })
}

fn admissible() -> impl Strategy<Value = i64> {
    let ds = eligible_deltas(-4000, 6000);
    (0..ds.len()).prop_map(move |i| ds[i])
}

pub fn pipeline_reports_are_deterministic_and_consistent() -> Result<(), String> {
    check(admissible(), |delta| {
        let src = sources();
        let a = analyze(delta, src).unwrap();
        let b = analyze(delta, src).unwrap();
        prop_assert_eq!(&a, &b);
        a.check_invariants().unwrap();
        let rank: u32 = a.rank3.as_ref().unwrap().parse().unwrap();
        if let Some(v3) = &a.v3_order {
            let v3: u32 = v3.parse().unwrap();
            prop_assert!(rank <= v3);
            if let Some(w) = a.wk_structure.group() {
                prop_assert_eq!(w.order() * 3, pow3(v3));
            }
        }
        if let Some(p) = a.evidence.iter().find(|e| e.rule == "PSI") {
            if p.inputs.get("Psi").map(String::as_str) == Some("0") {
                if let Some(ck) = p.inputs.get("criterion_kernel_m1") {
                    prop_assert_eq!(ck.as_str(), "0");
                }
            }
            if let Some(ck) = p.inputs.get("criterion_kernel_m1") {
                if ck == "0" {
                    prop_assert!(a.deciding_rule().unwrap().rule != "R2");
                }
            }
        }
        let fired = a.deciding_rule().unwrap().rule.clone();
        prop_assert!(["R0", "R1", "R2", "R3", "R4"].contains(&fired.as_str()));
        prop_assert_eq!(a.evidence.last().unwrap().rule.as_str(), fired.as_str());
        Ok(())
    })
}

pub type Suite = (&'static str, fn() -> Result<(), String>);

pub const SUITES: &[Suite] = &[
    ("hnf_is_unimodular_and_normal", hnf_is_unimodular_and_normal),
    ("snf_is_unimodular_and_divisible", snf_is_unimodular_and_divisible),
    ("eigenspaces_partition_the_order", eigenspaces_partition_the_order),
    ("twists_are_functorial", twists_are_functorial),
    (
        "purity_iff_section_under_trivial_actions",
        purity_iff_section_under_trivial_actions,
    ),
    ("casa_conditions_agree", casa_conditions_agree),
    ("psi_is_level_independent", psi_is_level_independent),
    (
        "psi_zero_forces_zero_criterion_kernel",
        psi_zero_forces_zero_criterion_kernel,
    ),
    (
        "split_decision_matches_removing_a_z3",
        split_decision_matches_removing_a_z3,
    ),
    (
        "pipeline_reports_are_deterministic_and_consistent",
        pipeline_reports_are_deterministic_and_consistent,
    ),
];
