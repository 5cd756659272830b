//! The splitting of WK₂(k){3} ⊆ K₂(o_k){3} for k = Q(√δ): local index, Keune–Tate rank,
//! Ψ(k') for k' = Q(√−3δ), structure synthesis and a verdict with its evidence chain.
//!
//! (A'_K/3(1))_Δ ≅ A'_{k'}/3 for K = k(μ₃): Gal(K/Q) is the Klein group with quadratic subfields
//! k, k' and Q(μ₃); the odd part of A'_K splits into the pieces coming from the three subfields,
//! Δ = Gal(K/k) acts on μ₃ by −1, so the (−1)-twisted Δ-coinvariants keep exactly the piece on
//! which Δ acts by −1, which is the image of A'_{k'} (A'_{Q(μ₃)} = 0).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::arith::is_squarefree;
use crate::exactalg::{direct_sum, iso_type_equal, FiniteAbelianGroup};
use crate::galmod::{coinvariants, tate_twist, CyclotomicCharacterTable};
use crate::iwasawa::{assemble_tower, criterion_kernel_m1, one_prime_above_three, psi, quadratic_level_zero, DELTA, GAMMA};
use crate::lvalues::{in_delta_set, k2_order_3part, zeta_k_minus1};
use crate::nfengine::field::cyclotomic_label;
use crate::nfengine::{quadratic_label, Assurance, ClassGroupRecord, RecordLibrary};
use crate::quadclass::{fundamental_discriminant, QuadDiscriminant};

/// Standing assumptions carried by every report.
pub const BANNER: &str = "Assumes Leopoldt's and Gross's conjectures for all layers K_n of the cyclotomic \
Z_3-extension of K = k(mu_3). For totally real k', Psi(k'_inf) = 0 additionally assumes Greenberg's conjecture.";

pub const DEFAULT_MAX_LEVEL: usize = 2;

const RULES: [&str; 6] = ["L1", "R0", "R1", "R2", "R3", "R4"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Split,
    NonSplit,
    TriviallySplit,
    NeedsLevelOneData,
    Unknown,
}

impl Verdict {
    pub const ALL: [Verdict; 5] =
        [Verdict::Split, Verdict::NonSplit, Verdict::TriviallySplit, Verdict::NeedsLevelOneData, Verdict::Unknown];

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Split => "Split",
            Verdict::NonSplit => "NonSplit",
            Verdict::TriviallySplit => "TriviallySplit",
            Verdict::NeedsLevelOneData => "NeedsLevelOneData",
            Verdict::Unknown => "Unknown",
        }
    }

    pub fn is_decisive(&self) -> bool {
        matches!(self, Verdict::Split | Verdict::NonSplit)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A group structure, or "undetermined". Serialized as a list of decimal invariant factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Determined(FiniteAbelianGroup),
    Undetermined,
}

impl Structure {
    pub fn group(&self) -> Option<&FiniteAbelianGroup> {
        match self {
            Structure::Determined(g) => Some(g),
            Structure::Undetermined => None,
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Determined(g) => write!(f, "{g}"),
            Structure::Undetermined => f.write_str("undetermined"),
        }
    }
}

impl Serialize for Structure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Structure::Determined(g) => {
                let fs = g.invariant_factors();
                let mut seq = s.serialize_seq(Some(fs.len()))?;
                for d in fs {
                    seq.serialize_element(&d.to_string())?;
                }
                seq.end()
            }
            Structure::Undetermined => s.serialize_str("undetermined"),
        }
    }
}

impl<'de> Deserialize<'de> for Structure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<String>),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) if w == "undetermined" => Ok(Structure::Undetermined),
            Raw::Word(w) => Err(de::Error::custom(format!("expected \"undetermined\", got {w:?}"))),
            Raw::List(v) => {
                let fs = v
                    .iter()
                    .map(|s| s.parse::<BigInt>().map_err(de::Error::custom))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                FiniteAbelianGroup::from_invariant_factors(fs).map(Structure::Determined).map_err(de::Error::custom)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRef {
    pub label: String,
    pub discriminant: String,
}

impl FieldRef {
    fn of(q: &QuadDiscriminant) -> Self {
        FieldRef { label: quadratic_label(q.delta), discriminant: q.d.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub rule: String,
    pub anchor: String,
    pub assurance: Assurance,
    pub inputs: BTreeMap<String, String>,
}

impl Evidence {
    fn new(rule: &str, anchor: &str, assurance: Assurance, inputs: &[(&str, String)]) -> Self {
        Evidence {
            rule: rule.into(),
            anchor: anchor.into(),
            assurance,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub delta: String,
    pub k: FieldRef,
    pub k_prime: Option<FieldRef>,
    pub local_index: String,
    /// v₃ of #K₂(o_k){3}.
    pub v3_order: Option<String>,
    /// "birch-tate" or "ingested".
    pub v3_source: Option<String>,
    pub rank3: Option<String>,
    pub wk_structure: Structure,
    pub k2_structure: Structure,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
    pub assurance: Assurance,
    pub banner: String,
    pub diagnostics: Vec<String>,
}

impl KernelReport {
    /// The evidence entry of the rule that produced the verdict.
    pub fn deciding_rule(&self) -> Option<&Evidence> {
        self.evidence.iter().find(|e| RULES.contains(&e.rule.as_str()))
    }

    /// Structural invariants every report must satisfy.
    pub fn check_invariants(&self) -> Result<()> {
        let fired = self.evidence.iter().filter(|e| RULES.contains(&e.rule.as_str())).count();
        if fired != 1 {
            return Err(Error::Internal(format!("δ = {}: {fired} deciding rules", self.delta)));
        }
        let li: u32 = self.local_index.parse().map_err(|_| Error::Internal("local index".into()))?;
        if let (Some(w), Some(k)) = (self.wk_structure.group(), self.k2_structure.group()) {
            if w.order() * BigInt::from(li) != k.order() {
                return Err(Error::Internal(format!("δ = {}: |WK|·{li} ≠ |K₂|", self.delta)));
            }
        }
        if let (Some(r), Some(a)) = (&self.rank3, &self.v3_order) {
            let (r, a): (u32, u32) = (r.parse().unwrap_or(u32::MAX), a.parse().unwrap_or(0));
            if r > a {
                return Err(Error::Internal(format!("δ = {}: rank {r} exceeds v₃ {a}", self.delta)));
            }
        }
        if self.verdict.is_decisive() && self.evidence.iter().any(|e| e.assurance < Assurance::IngestedTrusted) {
            return Err(Error::Internal(format!("δ = {}: decisive verdict on heuristic evidence", self.delta)));
        }
        Ok(())
    }
}

/// Where analyze finds its data.
#[derive(Clone, Debug)]
pub struct DataSources {
    pub library: RecordLibrary,
    pub max_level: usize,
    /// Inputs below this assurance are ignored.
    pub floor: Assurance,
}

impl DataSources {
    pub fn new(library: RecordLibrary) -> Self {
        DataSources { library, max_level: DEFAULT_MAX_LEVEL, floor: Assurance::IngestedTrusted }
    }
}

impl Default for DataSources {
    fn default() -> Self {
        Self::new(RecordLibrary::new())
    }
}

/// [K₂(o_k){3} : WK₂(k){3}]: 3 iff δ ≡ −3 mod 9 and δ ≠ −3.
pub fn local_mu_index(delta: i64) -> u32 {
    if in_delta_set(delta) {
        3
    } else {
        1
    }
}

/// Radicand of k' = Q(√−3δ).
pub fn k_prime_radicand(delta: i64) -> i64 {
    if delta % 3 == 0 {
        -delta / 3
    } else {
        -3 * delta
    }
}

/// rk₃ K₂(o_k) = rk₃(A'_{k'}) + 1 for δ in the admissible set.
pub fn keune_tate_rank(delta: i64) -> Result<usize> {
    if !in_delta_set(delta) || !is_squarefree(delta) {
        return Err(Error::invalid(format!("δ = {delta} is not a square-free element of the admissible set")));
    }
    let qp = fundamental_discriminant(k_prime_radicand(delta))?;
    let a = quadratic_level_zero(&qp)?.module.group().clone();
    Ok(a.p_rank(3) + 1)
}

/// (A'_K/3(1))_Δ from a record for K = k(μ₃) carrying the Δ-action.
pub fn compositum_delta_part(rec: &ClassGroupRecord) -> Result<FiniteAbelianGroup> {
    let m = rec.module()?;
    if !m.has_actor(DELTA) {
        return Err(Error::MissingData(format!("{} has no delta action", rec.field.label)));
    }
    let (m3, _) = m.restrict_actors(&[DELTA])?.reduce_mod(&BigInt::from(3))?;
    let tw = tate_twist(&m3, 1, &CyclotomicCharacterTable::standard_3adic())?;
    Ok(coinvariants(&tw, &[DELTA])?.0)
}

/// (A'_{K₁} ⊗ μ₉)_{Gal(K₁/k)} from a record for K₁ = k(μ₉) with gamma and delta actions.
pub fn wk_from_level_one(rec: &ClassGroupRecord) -> Result<FiniteAbelianGroup> {
    let m = rec.module()?;
    if m.group().is_trivial() {
        return Ok(FiniteAbelianGroup::trivial());
    }
    for a in [GAMMA, DELTA] {
        if !m.has_actor(a) {
            return Err(Error::MissingData(format!("{} has no {a} action", rec.field.label)));
        }
    }
    let (m9, _) = m.restrict_actors(&[GAMMA, DELTA])?.reduce_mod(&BigInt::from(9))?;
    let tw = tate_twist(&m9, 1, &CyclotomicCharacterTable::standard_3adic())?;
    Ok(coinvariants(&tw, &[GAMMA, DELTA])?.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiStatus {
    Zero,
    NonZero,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WildTriviality {
    Trivial,
    Nontrivial,
    Unknown,
}

/// WK₂(k){3} = 0 iff X'_{k'_∞} = 0; with Ψ(k') = 0 this is A'_{k'} = 0.
pub fn wild_triviality(psi: PsiStatus, a_kprime: &FiniteAbelianGroup) -> WildTriviality {
    match (psi, a_kprime.is_trivial()) {
        (_, false) => WildTriviality::Nontrivial,
        (PsiStatus::Zero, true) => WildTriviality::Trivial,
        (PsiStatus::NonZero, true) => WildTriviality::Nontrivial,
        (PsiStatus::Unknown, true) => WildTriviality::Unknown,
    }
}

/// Split iff K₂ ≅ WK ⊕ quotient.
pub fn abelian_split_decision(
    k2: &FiniteAbelianGroup,
    wk: &FiniteAbelianGroup,
    quotient: &FiniteAbelianGroup,
) -> Result<Verdict> {
    if wk.order() * quotient.order() != k2.order() {
        return Err(Error::validation(
            "order consistency",
            format!("|K₂| = {} but |WK|·|quotient| = {}", k2.order(), wk.order() * quotient.order()),
        ));
    }
    if iso_type_equal(k2, &direct_sum(wk, quotient)) {
        Ok(Verdict::Split)
    } else {
        Ok(Verdict::NonSplit)
    }
}

fn three_exponents(g: &FiniteAbelianGroup) -> Vec<u32> {
    g.invariant_factors()
        .iter()
        .map(|d| {
            let mut d = d.clone();
            let mut e = 0;
            while d > BigInt::from(1) {
                d /= 3;
                e += 1;
            }
            e
        })
        .collect()
}

fn from_three_exponents(es: &[u32]) -> FiniteAbelianGroup {
    let orders: Vec<BigInt> = es.iter().filter(|&&e| e > 0).map(|&e| BigInt::from(3).pow(e)).collect();
    FiniteAbelianGroup::from_orders(&orders).expect("powers of 3")
}

/// Abelian 3-groups of order 3^a and rank exactly r.
pub fn three_groups_of_rank(a: u32, r: usize) -> Vec<FiniteAbelianGroup> {
    fn go(left: u32, parts: usize, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let lo = left.div_ceil(parts as u32).max(1);
        for p in (lo..=max.min(left)).rev() {
            cur.push(p);
            go(left - p, parts - 1, p, cur, out);
            cur.pop();
        }
    }
    if r == 0 {
        return if a == 0 { vec![FiniteAbelianGroup::trivial()] } else { vec![] };
    }
    let mut out = Vec::new();
    go(a, r, a, &mut Vec::new(), &mut out);
    out.iter().map(|p| from_three_exponents(p)).collect()
}

/// Isomorphism types of the index-3 subgroups of an abelian 3-group.
pub fn index_three_subgroup_types(g: &FiniteAbelianGroup) -> Vec<FiniteAbelianGroup> {
    let es = three_exponents(g);
    let mut out: Vec<FiniteAbelianGroup> = Vec::new();
    for i in 0..es.len() {
        let mut e = es.clone();
        e[i] -= 1;
        let h = from_three_exponents(&e);
        if !out.contains(&h) {
            out.push(h);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Constraint {
    None,
    WkTrivial,
    Split,
    NonSplit,
}

/// (K₂, WK) pairs compatible with v₃, the rank and the constraints.
fn candidates(a: u32, rank: usize, c: Constraint, wk: Option<&FiniteAbelianGroup>) -> Vec<(FiniteAbelianGroup, FiniteAbelianGroup)> {
    let z3 = FiniteAbelianGroup::cyclic(3);
    let mut out = Vec::new();
    for k2 in three_groups_of_rank(a, rank) {
        for w in index_three_subgroup_types(&k2) {
            let split = iso_type_equal(&k2, &direct_sum(&w, &z3));
            let ok = match c {
                Constraint::None => true,
                Constraint::WkTrivial => w.is_trivial(),
                Constraint::Split => split,
                Constraint::NonSplit => !split,
            };
            if ok && wk.map_or(true, |x| iso_type_equal(x, &w)) {
                out.push((k2.clone(), w));
            }
        }
    }
    out
}

fn common<T: Clone + PartialEq>(xs: impl Iterator<Item = T>) -> Option<T> {
    let mut it = xs;
    let first = it.next()?;
    for x in it {
        if x != first {
            return None;
        }
    }
    Some(first)
}

struct PsiFinding {
    status: PsiStatus,
    group: Option<FiniteAbelianGroup>,
    method: &'static str,
    assurance: Assurance,
    criterion_kernel: Option<FiniteAbelianGroup>,
    level: Option<usize>,
    note: Option<String>,
}

impl PsiFinding {
    fn unknown(note: String) -> Self {
        PsiFinding {
            status: PsiStatus::Unknown,
            group: None,
            method: "unavailable",
            assurance: Assurance::Pinned,
            criterion_kernel: None,
            level: None,
            note: Some(note),
        }
    }
}

fn find_psi(qp: &QuadDiscriminant, a0: &FiniteAbelianGroup, src: &DataSources) -> Result<PsiFinding> {
    if one_prime_above_three(qp) {
        return Ok(PsiFinding {
            status: PsiStatus::Zero,
            group: Some(FiniteAbelianGroup::trivial()),
            method: "one prime above 3 in k'_inf",
            assurance: Assurance::Pinned,
            criterion_kernel: None,
            level: None,
            note: None,
        });
    }
    let tower = match assemble_tower(qp, src.max_level, &src.library) {
        Ok(t) => t,
        Err(e @ Error::Internal(_)) => return Err(e),
        Err(e) => return Ok(PsiFinding::unknown(format!("tower over {}: {e}", quadratic_label(qp.delta)))),
    };
    match psi(&tower) {
        Ok(p) => {
            if p.assurance < src.floor {
                return Ok(PsiFinding::unknown(format!("tower data for Ψ is {} (below the floor {})", p.assurance, src.floor)));
            }
            let ck = criterion_kernel_m1(&tower, 1)?;
            if p.group.is_trivial() && !ck.is_trivial() {
                return Err(Error::Internal(format!("Ψ = 0 but the m = 1 criterion kernel is {ck}")));
            }
            Ok(PsiFinding {
                status: if p.group.is_trivial() { PsiStatus::Zero } else { PsiStatus::NonZero },
                group: Some(p.group.clone()),
                method: "coinvariant stabilization of tower data",
                assurance: p.assurance,
                criterion_kernel: Some(ck),
                level: Some(p.level),
                note: None,
            })
        }
        Err(e @ Error::Internal(_)) => Err(e),
        Err(e) => {
            // A'_0 = 0 and some A'_n ≠ 0: X' ≠ 0 and Ψ = (X')_Γ ≠ 0
            if a0.is_trivial() {
                for n in 1..=tower.max_level() {
                    let asr = tower.assurance_up_to(n);
                    if !tower.levels[n].module.group().is_trivial() && asr >= src.floor {
                        return Ok(PsiFinding {
                            status: PsiStatus::NonZero,
                            group: None,
                            method: "A'_{k'} = 0 and a higher layer has nontrivial A'",
                            assurance: asr,
                            criterion_kernel: None,
                            level: Some(n),
                            note: None,
                        });
                    }
                }
            }
            Ok(PsiFinding::unknown(format!("Ψ over {}: {e}", quadratic_label(qp.delta))))
        }
    }
}

fn v3_of(n: &BigInt) -> Option<u32> {
    let mut n = n.clone();
    let mut e = 0;
    let three = BigInt::from(3);
    while n > BigInt::from(1) && (&n % &three) == BigInt::from(0) {
        n /= &three;
        e += 1;
    }
    (n == BigInt::from(1)).then_some(e)
}

/// v₃(24·ζ_k(−1)) for real k; w₂(k) has 3-part 3 for every real quadratic field.
fn birch_tate_v3(q: &QuadDiscriminant) -> Result<u32> {
    let z = zeta_k_minus1(q.d)?;
    let bt = z.0 * num_rational::BigRational::from_integer(BigInt::from(24));
    crate::lvalues::ExactRational(bt)
        .valuation(3)
        .map(|v| v.max(0) as u32)
        .ok_or_else(|| Error::validation("Birch–Tate positivity", format!("ζ_k(−1) = 0 for D = {}", q.d)))
}

const A_LI: &str = "local roots of unity: the quotient has order 3 iff δ ≡ −3 mod 9 and δ ≠ −3";
const A_BT: &str = "Birch–Tate: #K₂(o_k) = w₂(k)·ζ_k(−1), 3-part of w₂(k) is 3";
const A_H2: &str = "ingested order of H²_ét(o'_k, Z₃(2))";
const A_KT: &str = "Keune–Tate: 0 → (A'_K/3(1))_Δ → K₂(o_k)/3 → Z/3 → 0 with (A'_K/3(1))_Δ ≅ A'_{k'}/3";
const A_KTX: &str = "(A'_K/3(1))_Δ computed on K = k(μ₃) agrees with A'_{k'}/3";
const A_PSI: &str = "Ψ(k') = ker((X'_{k'_∞})_Γ → A'_{k'})";
const A_WK1: &str = "WK₂(k){3} ≅ (A'_{K₁} ⊗ μ₉)_{Gal(K₁/k)} when K₂(o_k){3} has exponent dividing 9";
const A_L1: &str = "local index 1: WK₂(k){3} = K₂(o_k){3}";
const A_R0: &str = "WK₂(k){3} = 0 iff X'_{k'_∞} = 0, and with Ψ(k') = 0 iff A'_{k'} = 0";
const A_R1: &str = "Ψ(k') = 0 ⇒ the inclusion WK₂(k){3} ⊆ K₂(o_k){3} splits";
const A_R2: &str = "Ψ(k') ≠ 0 and A'_{k'} = 0 ⇒ X'_{k'_∞} ≠ 0 and the inclusion does not split";
const A_R3: &str = "Ψ(k') ≠ 0 and A'_{k'} ≠ 0: either case occurs; K₂ is compared with WK ⊕ Z/3";
const A_R4: &str = "Ψ(k') undetermined: K₂ is compared with WK ⊕ Z/3 where order, rank and data force it";

fn structure_of(g: Option<FiniteAbelianGroup>) -> Structure {
    g.map(Structure::Determined).unwrap_or(Structure::Undetermined)
}

fn min_assurance(ev: &[Evidence]) -> Assurance {
    ev.iter().map(|e| e.assurance).min().unwrap_or(Assurance::Pinned)
}

fn local_index_one_report(delta: i64, q: &QuadDiscriminant, src: &DataSources) -> Result<KernelReport> {
    let kp = k_prime_radicand(delta);
    let k_prime = if kp == 1 { None } else { Some(FieldRef::of(&fundamental_discriminant(kp)?)) };
    let mut evidence =
        vec![Evidence::new("LI", A_LI, Assurance::Pinned, &[("delta_mod_9", delta.rem_euclid(9).to_string()), ("local_index", "1".into())])];
    let (v3, source) = if q.is_real() {
        let a = birch_tate_v3(q)?;
        evidence.push(Evidence::new("BT", A_BT, Assurance::Pinned, &[("v3", a.to_string())]));
        (Some(a), Some("birch-tate"))
    } else {
        match ingested_h2(delta, src)? {
            Some((a, asr)) => {
                evidence.push(Evidence::new("H2", A_H2, asr, &[("v3", a.to_string())]));
                (Some(a), Some("ingested"))
            }
            None => (None, None),
        }
    };
    let k2 = match v3 {
        Some(0) => Some(FiniteAbelianGroup::trivial()),
        Some(1) => Some(FiniteAbelianGroup::cyclic(3)),
        _ => None,
    };
    let inputs = [("v3", v3.map(|a| a.to_string()).unwrap_or_else(|| "unknown".into()))];
    evidence.push(Evidence::new("L1", A_L1, min_assurance(&evidence), &inputs));
    Ok(KernelReport {
        delta: delta.to_string(),
        k: FieldRef::of(q),
        k_prime,
        local_index: "1".into(),
        v3_order: v3.map(|a| a.to_string()),
        v3_source: source.map(String::from),
        rank3: None,
        wk_structure: structure_of(k2.clone()),
        k2_structure: structure_of(k2),
        verdict: Verdict::TriviallySplit,
        assurance: min_assurance(&evidence),
        evidence,
        banner: BANNER.into(),
        diagnostics: vec![],
    })
}

fn ingested_h2(delta: i64, src: &DataSources) -> Result<Option<(u32, Assurance)>> {
    let Some(o) = src.library.order(&quadratic_label(delta)) else {
        return Ok(None);
    };
    if Assurance::IngestedTrusted < src.floor {
        return Ok(None);
    }
    let a = v3_of(&o.h2_order).ok_or_else(|| {
        Error::validation("H² order", format!("ingested order {} for {} is not a power of 3", o.h2_order, o.label))
    })?;
    Ok(Some((a, Assurance::IngestedTrusted)))
}

fn record_at_floor(label: &str, src: &DataSources) -> Option<ClassGroupRecord> {
    src.library.group(label).filter(|r| r.assurance >= src.floor)
}

/// The report for k = Q(√δ).
pub fn analyze(delta: i64, src: &DataSources) -> Result<KernelReport> {
    let q = fundamental_discriminant(delta)?;
    if local_mu_index(delta) == 1 {
        let r = local_index_one_report(delta, &q, src)?;
        r.check_invariants()?;
        return Ok(r);
    }
    let qp = fundamental_discriminant(k_prime_radicand(delta))?;
    let mut diagnostics = Vec::new();
    let mut evidence = vec![Evidence::new(
        "LI",
        A_LI,
        Assurance::Pinned,
        &[("delta_mod_9", delta.rem_euclid(9).to_string()), ("local_index", "3".into())],
    )];

    // order of K₂(o_k){3}
    let v3 = if q.is_real() {
        let a = k2_order_3part(delta)?;
        evidence.push(Evidence::new("BT", A_BT, Assurance::Pinned, &[("v3", a.to_string())]));
        Some((a, "birch-tate"))
    } else {
        match ingested_h2(delta, src)? {
            Some((a, asr)) => {
                evidence.push(Evidence::new("H2", A_H2, asr, &[("v3", a.to_string())]));
                Some((a, "ingested"))
            }
            None => {
                diagnostics.push(format!("no ingested order of H² for {}", quadratic_label(delta)));
                None
            }
        }
    };

    // 3-rank
    let a_kp = quadratic_level_zero(&qp)?.module.group().clone();
    let rank = a_kp.p_rank(3) + 1;
    evidence.push(Evidence::new(
        "KT",
        A_KT,
        Assurance::Pinned,
        &[("A'_k'", a_kp.to_string()), ("rank3", rank.to_string())],
    ));
    if let Some(rec) = record_at_floor(&cyclotomic_label(delta, 3), src) {
        let c = compositum_delta_part(&rec)?;
        if c.p_rank(3) + 1 != rank {
            return Err(Error::validation(
                "Keune–Tate cross-check",
                format!("(A'_K/3(1))_Δ = {c} from {} but A'_k'/3 has rank {}", rec.field.label, rank - 1),
            ));
        }
        evidence.push(Evidence::new("KTX", A_KTX, rec.assurance, &[("(A'_K/3(1))_Delta", c.to_string())]));
    }
    if let Some((a, _)) = v3 {
        if rank as u32 > a {
            return Err(Error::validation("rank bound", format!("3-rank {rank} exceeds v₃ = {a} for δ = {delta}")));
        }
    }

    // Ψ(k')
    let pf = find_psi(&qp, &a_kp, src)?;
    let mut psi_inputs = vec![
        ("status", format!("{:?}", pf.status).to_lowercase()),
        ("method", pf.method.to_string()),
    ];
    if let Some(g) = &pf.group {
        psi_inputs.push(("Psi", g.to_string()));
    }
    if let Some(n) = pf.level {
        psi_inputs.push(("level", n.to_string()));
    }
    if let Some(ck) = &pf.criterion_kernel {
        psi_inputs.push(("criterion_kernel_m1", ck.to_string()));
    }
    if let Some(n) = &pf.note {
        diagnostics.push(n.clone());
    }
    if pf.status != PsiStatus::Unknown {
        evidence.push(Evidence::new("PSI", A_PSI, pf.assurance, &psi_inputs));
    }

    // level-one coinvariants, only where K₂{3} has exponent dividing 9
    let mut wk1 = None;
    if let Some(rec) = record_at_floor(&cyclotomic_label(delta, 9), src) {
        let exp_ok = v3.is_some_and(|(a, _)| {
            candidates(a, rank, Constraint::None, None).iter().all(|(k2, _)| k2.exponent() <= BigInt::from(9))
        });
        if exp_ok {
            let w = wk_from_level_one(&rec)?;
            evidence.push(Evidence::new("WK1", A_WK1, rec.assurance, &[("WK", w.to_string())]));
            wk1 = Some(w);
        } else {
            diagnostics.push(format!("{} ignored: exponent of K₂(o_k){{3}} not known to divide 9", rec.field.label));
        }
    }

    let a_triv = a_kp.is_trivial();
    let (rule, anchor, constraint) = match (pf.status, a_triv) {
        (PsiStatus::Zero, true) => ("R0", A_R0, Constraint::WkTrivial),
        (PsiStatus::Zero, false) => ("R1", A_R1, Constraint::Split),
        (PsiStatus::NonZero, true) => ("R2", A_R2, Constraint::NonSplit),
        (PsiStatus::NonZero, false) => ("R3", A_R3, Constraint::None),
        (PsiStatus::Unknown, _) => ("R4", A_R4, Constraint::None),
    };
    let cands = v3.map(|(a, _)| candidates(a, rank, constraint, wk1.as_ref()));
    if let Some(c) = &cands {
        if c.is_empty() {
            return Err(Error::validation(
                "structure consistency",
                format!("no K₂/WK structures fit v₃ = {}, rank {rank} and rule {rule} for δ = {delta}", v3.unwrap().0),
            ));
        }
    }
    let k2 = cands.as_ref().and_then(|c| common(c.iter().map(|p| p.0.clone())));
    let wk = cands.as_ref().and_then(|c| common(c.iter().map(|p| p.1.clone()))).or_else(|| match constraint {
        Constraint::WkTrivial => Some(FiniteAbelianGroup::trivial()),
        _ => None,
    });
    let mut verdict = match constraint {
        Constraint::WkTrivial => Verdict::TriviallySplit,
        Constraint::Split => Verdict::Split,
        Constraint::NonSplit => Verdict::NonSplit,
        Constraint::None => {
            let z3 = FiniteAbelianGroup::cyclic(3);
            let agreed = cands.as_ref().and_then(|c| {
                common(c.iter().map(|(k, w)| {
                    if w.is_trivial() {
                        Verdict::TriviallySplit
                    } else {
                        abelian_split_decision(k, w, &z3).expect("orders match by construction")
                    }
                }))
            });
            match agreed {
                Some(v) => v,
                None if cands.is_none() => Verdict::Unknown,
                None if wk1.is_none() && !a_triv => Verdict::NeedsLevelOneData,
                None => Verdict::Unknown,
            }
        }
    };

    let mut rule_inputs = vec![("A'_k'", a_kp.to_string()), ("Psi_status", format!("{:?}", pf.status).to_lowercase())];
    if let Some((a, _)) = v3 {
        rule_inputs.push(("v3", a.to_string()));
    }
    rule_inputs.push(("rank3", rank.to_string()));
    if let Some(w) = &wk1 {
        rule_inputs.push(("WK_level_one", w.to_string()));
    }
    rule_inputs.push(("wild_triviality", format!("{:?}", wild_triviality(pf.status, &a_kp)).to_lowercase()));
    let used: Vec<Assurance> = evidence.iter().map(|e| e.assurance).collect();
    let rule_assurance = used.into_iter().min().unwrap_or(Assurance::Pinned);
    if verdict.is_decisive() && rule_assurance < Assurance::IngestedTrusted {
        diagnostics.push(format!("{verdict} withheld: evidence is only {rule_assurance}"));
        verdict = Verdict::Unknown;
    }
    evidence.push(Evidence::new(rule, anchor, rule_assurance, &rule_inputs));

    if verdict == Verdict::Split && pf.status == PsiStatus::NonZero {
        diagnostics.push("split with Ψ(k') ≠ 0: Ψ(k') = 0 is sufficient but not necessary".into());
    }
    if k2.as_ref().is_some_and(|g| g.is_elementary(3)) && !q.is_real() {
        diagnostics.push("H²_ét(o'_k, Z₃(2)) is elementary abelian, so the descent surjection onto the Γ-invariants splits".into());
    }
    if qp.is_real() && pf.status == PsiStatus::NonZero {
        diagnostics.push("k' is totally real: Ψ(k'_∞) = 0 under Greenberg's conjecture although Ψ(k') ≠ 0".into());
    }

    let report = KernelReport {
        delta: delta.to_string(),
        k: FieldRef::of(&q),
        k_prime: Some(FieldRef::of(&qp)),
        local_index: "3".into(),
        v3_order: v3.map(|(a, _)| a.to_string()),
        v3_source: v3.map(|(_, s)| s.to_string()),
        rank3: Some(rank.to_string()),
        wk_structure: structure_of(wk),
        k2_structure: structure_of(k2),
        verdict,
        assurance: min_assurance(&evidence),
        evidence,
        banner: BANNER.into(),
        diagnostics,
    };
    report.check_invariants()?;
    Ok(report)
}

/// Square-free δ ≡ −3 mod 9, δ ≠ −3, in [from, to].
pub fn eligible_deltas(from: i64, to: i64) -> Vec<i64> {
    if from > to {
        return vec![];
    }
    let start = from + (6 - from.rem_euclid(9)).rem_euclid(9);
    (start..=to).step_by(9).filter(|&d| d != -3 && is_squarefree(d)).collect()
}

/// A report standing in for a δ whose analysis failed.
pub fn failed_report(delta: i64, err: &Error) -> KernelReport {
    let label = quadratic_label(delta);
    let q = fundamental_discriminant(delta).ok();
    let kp = k_prime_radicand(delta);
    KernelReport {
        delta: delta.to_string(),
        k: FieldRef { label, discriminant: q.map(|q| q.d.to_string()).unwrap_or_default() },
        k_prime: fundamental_discriminant(kp).ok().map(|q| FieldRef::of(&q)),
        local_index: local_mu_index(delta).to_string(),
        v3_order: None,
        v3_source: None,
        rank3: None,
        wk_structure: Structure::Undetermined,
        k2_structure: Structure::Undetermined,
        verdict: Verdict::Unknown,
        evidence: vec![],
        assurance: Assurance::Heuristic,
        banner: BANNER.into(),
        diagnostics: vec![format!("error: {err}")],
    }
}

/// Reports for every eligible δ in [from, to], in increasing order; failures are embedded.
pub fn scan(from: i64, to: i64, src: &DataSources) -> Result<Vec<KernelReport>> {
    if from > to {
        return Err(Error::invalid(format!("empty range {from}..{to}")));
    }
    Ok(eligible_deltas(from, to).into_iter().map(|d| analyze(d, src).unwrap_or_else(|e| failed_report(d, &e))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfengine::parse_record;
    use crate::nfengine::ParsedRecord;

    fn g(f: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::from_u64(f).unwrap()
    }

    #[test]
    fn local_index_examples() {
        assert_eq!(local_mu_index(717), 3);
        assert_eq!(local_mu_index(-3), 1);
        assert_eq!(local_mu_index(5), 1);
    }

    #[test]
    fn keune_tate_examples() {
        assert_eq!(keune_tate_rank(717).unwrap(), 2);
        assert_eq!(keune_tate_rank(42).unwrap(), 1);
        assert_eq!(keune_tate_rank(-11217).unwrap(), 2);
        assert!(keune_tate_rank(5).is_err());
    }

    #[test]
    fn wild_triviality_table() {
        assert_eq!(wild_triviality(PsiStatus::Zero, &g(&[])), WildTriviality::Trivial);
        assert_eq!(wild_triviality(PsiStatus::Zero, &g(&[3])), WildTriviality::Nontrivial);
        assert_eq!(wild_triviality(PsiStatus::NonZero, &g(&[])), WildTriviality::Nontrivial);
        assert_eq!(wild_triviality(PsiStatus::Unknown, &g(&[])), WildTriviality::Unknown);
    }

    #[test]
    fn split_decisions() {
        let z3 = g(&[3]);
        assert_eq!(abelian_split_decision(&g(&[3, 9]), &g(&[3, 3]), &z3).unwrap(), Verdict::NonSplit);
        assert_eq!(abelian_split_decision(&g(&[3, 9]), &g(&[9]), &z3).unwrap(), Verdict::Split);
        assert_eq!(abelian_split_decision(&g(&[3, 3]), &g(&[3]), &z3).unwrap(), Verdict::Split);
        assert!(abelian_split_decision(&g(&[9]), &g(&[9]), &z3).is_err());
    }

    #[test]
    fn group_enumeration() {
        assert_eq!(three_groups_of_rank(3, 2), vec![g(&[3, 9])]);
        assert_eq!(three_groups_of_rank(4, 2).len(), 2);
        assert_eq!(three_groups_of_rank(0, 0), vec![g(&[])]);
        let mut t = index_three_subgroup_types(&g(&[3, 9]));
        t.sort_by_key(|h| h.invariant_factors().to_vec());
        assert_eq!(t, vec![g(&[3, 3]), g(&[9])]);
        assert_eq!(index_three_subgroup_types(&g(&[3, 3])), vec![g(&[3])]);
    }

    #[test]
    fn trivial_level_one_gives_trivial_wk() {
        let ParsedRecord::Group(r) =
            parse_record("WTREC 1\nfield Q(sqrt(4227))(zeta9) 12 5704183485954874521973 1915491555369684 -8096782804065230985 -1208416721330 4788728888601744 214410348 -1510520901657 0 268012935 -2 -25362 0 1\ngroup\nprovenance t\n").unwrap()
        else {
            unreachable!()
        };
        assert!(wk_from_level_one(&r).unwrap().is_trivial());
    }

    #[test]
    fn eligible_range() {
        assert_eq!(eligible_deltas(40, 45), vec![42]);
        assert!(eligible_deltas(43, 50).is_empty());
        assert!(eligible_deltas(5, 4).is_empty());
        assert!(!eligible_deltas(-10, 10).contains(&-3));
        assert!(eligible_deltas(0, 100).iter().all(|&d| in_delta_set(d) && is_squarefree(d)));
    }

    #[test]
    fn structure_serde() {
        let s = Structure::Determined(g(&[3, 9]));
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"["3","9"]"#);
        assert_eq!(serde_json::from_str::<Structure>(&j).unwrap(), s);
        assert_eq!(serde_json::to_string(&Structure::Undetermined).unwrap(), r#""undetermined""#);
        assert_eq!(serde_json::from_str::<Structure>("[]").unwrap(), Structure::Determined(g(&[])));
    }

    #[test]
    fn analyze_without_data() {
        let src = DataSources::default();
        let r = analyze(717, &src).unwrap();
        // no tower data: rank 2, v₃ = 2 forces K₂ ≅ (Z/3)², WK ≅ Z/3
        assert_eq!(r.verdict, Verdict::Split);
        assert_eq!(r.deciding_rule().unwrap().rule, "R4");
        let r = analyze(42, &src).unwrap();
        assert_eq!(r.verdict, Verdict::NonSplit);
        assert_eq!(r.k2_structure, Structure::Determined(g(&[27])));
        let r = analyze(5, &src).unwrap();
        assert_eq!(r.verdict, Verdict::TriviallySplit);
        assert_eq!(r.local_index, "1");
        assert!(analyze(0, &src).is_err());
        assert!(analyze(18, &src).is_err());
    }
}
