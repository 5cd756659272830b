//! Class groups along the cyclotomic Z₃-extension: stabilization, Ψ = ker((X')_Γ → A'),
//! its Δ-eigenspaces and the m = 1 criterion kernel.
//!
//! X' is approximated at a finite level. Ψ uses the first level n at which the norm induces an
//! isomorphism (A'_{n+1})_Γ → (A'_n)_Γ; then (X')_Γ ≅ (A'_n)_Γ.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{direct_sum_hom, FiniteAbelianGroup, GroupHom, IntMatrix};
use crate::galmod::{coinvariants, eigenspace, induced_map, tate_twist, CyclotomicCharacterTable, FiniteGaloisModule};
use crate::nfengine::{layer_label, Assurance, ClassGroupRecord, RecordLibrary};
use crate::quadclass::{radicand, s_class_group, splitting_symbol, QuadDiscriminant};

pub const GAMMA: &str = "gamma";
pub const DELTA: &str = "delta";

/// One layer: A'_n with its actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub label: String,
    pub module: FiniteGaloisModule,
    pub assurance: Assurance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerData {
    pub base_label: String,
    pub levels: Vec<Level>,
    /// `norms[n]`: A'_{n+1} → A'_n.
    pub norms: Vec<GroupHom>,
    /// All primes above 3 totally ramified from level 0 on.
    pub totally_ramified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "level")]
pub enum Stabilization {
    Stable(usize),
    /// No stabilization up to the given top level.
    NotStabilized(usize),
}

impl Stabilization {
    pub fn level(&self) -> Option<usize> {
        match self {
            Stabilization::Stable(n) => Some(*n),
            Stabilization::NotStabilized(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiResult {
    pub group: FiniteAbelianGroup,
    /// Ψ with the actions other than γ (e.g. Δ).
    pub module: FiniteGaloisModule,
    /// Level n with (X')_Γ ≅ (A'_n)_Γ.
    pub level: usize,
    pub coinvariants: FiniteAbelianGroup,
    pub module_stabilization: Stabilization,
    /// Whether the same Ψ was recomputed at the next level.
    pub next_level_checked: bool,
    pub assurance: Assurance,
}

fn identity_matrix(g: &FiniteAbelianGroup) -> IntMatrix {
    IntMatrix::identity(g.rank())
}

fn is_power_of_three_at_most(k: u64, n: usize) -> bool {
    let mut t = 1u64;
    for _ in 0..=n {
        if t == k {
            return true;
        }
        t = t.saturating_mul(3);
    }
    false
}

impl TowerData {
    /// Validates contiguity, γ-orders, norm shapes and equivariance. A missing γ acts trivially.
    pub fn new(base_label: impl Into<String>, levels: Vec<Level>, norms: Vec<GroupHom>, totally_ramified: bool) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::invalid("a tower needs at least level 0"));
        }
        if norms.len() + 1 != levels.len() {
            return Err(Error::invalid(format!("{} levels need {} norm maps", levels.len(), levels.len() - 1)));
        }
        let mut fixed = Vec::with_capacity(levels.len());
        for (n, mut lv) in levels.into_iter().enumerate() {
            if !lv.module.has_actor(GAMMA) {
                lv.module = lv.module.with_actor(GAMMA, identity_matrix(lv.module.group()))?;
            }
            let ord = lv.module.actor_order(GAMMA)?;
            if !is_power_of_three_at_most(ord, n) {
                return Err(Error::validation(
                    "γ order",
                    format!("γ has order {ord} on level {n} ({}), not dividing 3^{n}", lv.label),
                ));
            }
            fixed.push(lv);
        }
        for (n, f) in norms.iter().enumerate() {
            let (up, down) = (&fixed[n + 1].module, &fixed[n].module);
            if f.source() != up.group() || f.target() != down.group() {
                return Err(Error::validation("norm dimensions", format!("norm from level {} has the wrong shape", n + 1)));
            }
            if !up.is_equivariant(f, down)? {
                return Err(Error::validation("norm equivariance", format!("norm from level {} is not equivariant", n + 1)));
            }
        }
        Ok(TowerData { base_label: base_label.into(), levels: fixed, norms, totally_ramified })
    }

    /// From records whose `norm_to` entries point one level down.
    pub fn from_records(base_label: impl Into<String>, records: &[ClassGroupRecord], totally_ramified: bool) -> Result<Self> {
        let mut levels = Vec::new();
        let mut norms = Vec::new();
        for (n, r) in records.iter().enumerate() {
            if n > 0 {
                r.validate_against(&records[n - 1])?;
                norms.push(r.norm_hom(&records[n - 1])?);
            }
            levels.push(Level { label: r.field.label.clone(), module: r.module()?, assurance: r.assurance });
        }
        Self::new(base_label, levels, norms, totally_ramified)
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn module(&self, n: usize) -> Result<&FiniteGaloisModule> {
        self.levels
            .get(n)
            .map(|l| &l.module)
            .ok_or_else(|| Error::MissingData(format!("level {n} of the tower over {}", self.base_label)))
    }

    /// N: A'_n → A'_0.
    pub fn norm_to_base(&self, n: usize) -> Result<GroupHom> {
        let mut f = GroupHom::identity(self.module(n)?.group());
        for k in (0..n).rev() {
            f = self.norms[k].compose(&f)?;
        }
        Ok(f)
    }

    /// Minimum assurance of levels 0..=n.
    pub fn assurance_up_to(&self, n: usize) -> Assurance {
        self.levels[..=n.min(self.max_level())].iter().map(|l| l.assurance).min().unwrap_or(Assurance::Heuristic)
    }

    /// Levelwise direct sum; `delta` acts by +1 on `plus` and by −1 on `minus`.
    pub fn delta_sum(plus: &TowerData, minus: &TowerData) -> Result<TowerData> {
        let top = plus.max_level().min(minus.max_level());
        let mut levels = Vec::new();
        for n in 0..=top {
            let (a, b) = (&plus.levels[n].module, &minus.levels[n].module);
            let ga = a.actor_hom(GAMMA)?;
            let gb = b.actor_hom(GAMMA)?;
            let gamma = direct_sum_hom(&ga, &gb);
            let id = GroupHom::identity(a.group());
            let neg = GroupHom::identity(b.group()).scale(&BigInt::from(-1));
            let delta = direct_sum_hom(&id, &neg);
            let group = gamma.source().clone();
            let module = FiniteGaloisModule::new(
                group,
                vec![(GAMMA.into(), gamma.matrix().clone()), (DELTA.into(), delta.matrix().clone())],
                None,
            )?;
            levels.push(Level {
                label: format!("{} + {}", plus.levels[n].label, minus.levels[n].label),
                module,
                assurance: plus.levels[n].assurance.min(minus.levels[n].assurance),
            });
        }
        let norms = (0..top).map(|n| direct_sum_hom(&plus.norms[n], &minus.norms[n])).collect();
        TowerData::new(
            format!("{} + {}", plus.base_label, minus.base_label),
            levels,
            norms,
            plus.totally_ramified && minus.totally_ramified,
        )
    }
}

/// Smallest n with the norm A'_{n+1} → A'_n an equivariant isomorphism.
pub fn detect_stabilization(t: &TowerData) -> Stabilization {
    for (n, f) in t.norms.iter().enumerate() {
        if f.is_isomorphism() {
            return Stabilization::Stable(n);
        }
    }
    Stabilization::NotStabilized(t.max_level())
}

fn gamma_coinvariants(t: &TowerData, n: usize) -> Result<(FiniteAbelianGroup, GroupHom)> {
    coinvariants(t.module(n)?, &[GAMMA])
}

/// Smallest n with the induced norm (A'_{n+1})_Γ → (A'_n)_Γ an isomorphism.
pub fn detect_coinvariant_stabilization(t: &TowerData) -> Result<Stabilization> {
    let mut below = gamma_coinvariants(t, 0)?;
    for n in 0..t.norms.len() {
        let above = gamma_coinvariants(t, n + 1)?;
        let f = induced_map(&t.norms[n], &above.1, &below.1)?;
        if f.is_isomorphism() {
            return Ok(Stabilization::Stable(n));
        }
        below = above;
    }
    Ok(Stabilization::NotStabilized(t.max_level()))
}

/// A'_n as the finite-level stand-in for X', γ acting through Gal(k_n/k).
pub fn x_prime_finite_level(t: &TowerData, stab: Stabilization) -> Result<FiniteGaloisModule> {
    match stab {
        Stabilization::Stable(n) => Ok(t.module(n)?.clone()),
        Stabilization::NotStabilized(n) => Err(Error::NotStabilized(n)),
    }
}

/// 3 is inert or ramified in the quadratic field, so one prime lies above it.
pub fn one_prime_above_three(q: &QuadDiscriminant) -> bool {
    splitting_symbol(q.d, 3) != 1
}

/// Ψ computed from level n, with (A'_n)_Γ.
pub fn psi_at_level(t: &TowerData, n: usize) -> Result<(FiniteGaloisModule, FiniteAbelianGroup)> {
    let m = t.module(n)?;
    let (c, proj) = coinvariants(m, &[GAMMA])?;
    let cm = m.push_to_quotient(&proj, &c)?;
    let base = t.module(0)?.group().clone();
    let to_base = induced_map(&t.norm_to_base(n)?, &proj, &GroupHom::identity(&base))?;
    if !to_base.is_surjective() {
        return Err(Error::validation(
            "norm onto base level",
            format!("(A'_{n})_Γ → A'_0 is not surjective over {}", t.base_label),
        ));
    }
    let (_, incl) = to_base.kernel();
    Ok((cm.restrict_to(&incl)?, c))
}

/// Ψ = ker((X')_Γ → A'_0).
pub fn psi(t: &TowerData) -> Result<PsiResult> {
    if !t.totally_ramified {
        return Err(Error::Unsupported("n₀ > 0 unsupported: primes above 3 are not totally ramified".into()));
    }
    let stab = detect_coinvariant_stabilization(t)?;
    let n = stab.level().ok_or(Error::NotStabilized(t.max_level()))?;
    let (module, c) = psi_at_level(t, n)?;
    let mut next_level_checked = false;
    if n + 1 <= t.max_level() {
        let (m2, _) = psi_at_level(t, n + 1)?;
        if m2.group() != module.group() {
            return Err(Error::validation(
                "Ψ level independence",
                format!("Ψ is {} at level {n} but {} at level {}", module.group(), m2.group(), n + 1),
            ));
        }
        next_level_checked = true;
    }
    Ok(PsiResult {
        group: module.group().clone(),
        module,
        level: n,
        coinvariants: c,
        module_stabilization: detect_stabilization(t),
        next_level_checked,
        assurance: t.assurance_up_to((n + 1).min(t.max_level())),
    })
}

fn with_default_delta(m: &FiniteGaloisModule) -> Result<FiniteGaloisModule> {
    if m.has_actor(DELTA) {
        Ok(m.clone())
    } else {
        // a k'-tower alone is the δ = −1 part
        m.with_actor(DELTA, IntMatrix::identity(m.group().rank()).scale(&BigInt::from(-1)))
    }
}

/// Ψ(K)(j)^Δ: the part of Ψ on which δ acts by (−1)^j.
pub fn psi_twisted_delta(psi: &PsiResult, j: i64) -> Result<FiniteAbelianGroup> {
    if psi.group.is_trivial() {
        return Ok(FiniteAbelianGroup::trivial());
    }
    let m = with_default_delta(&psi.module)?;
    let sign = if j.rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(eigenspace(&m, DELTA, 2, &BigInt::from(sign))?.group().clone())
}

/// ker((X'/3(j))_{Γ×Δ} → (A'_0/3(j))_Δ), with X' taken at the coinvariant stabilization level.
pub fn criterion_kernel_m1(t: &TowerData, j: i64) -> Result<FiniteAbelianGroup> {
    if !t.totally_ramified {
        return Err(Error::Unsupported("n₀ > 0 unsupported: primes above 3 are not totally ramified".into()));
    }
    let n = detect_coinvariant_stabilization(t)?.level().ok_or(Error::NotStabilized(t.max_level()))?;
    let chi = CyclotomicCharacterTable::standard_3adic();
    let three = BigInt::from(3);
    let top = with_default_delta(t.module(n)?)?;
    let bottom = with_default_delta(t.module(0)?)?;
    let (top3, p_top) = top.reduce_mod(&three)?;
    let (bot3, p_bot) = bottom.reduce_mod(&three)?;
    let (ct, qt) = coinvariants(&tate_twist(&top3, j, &chi)?, &[GAMMA, DELTA])?;
    let (_, qb) = coinvariants(&tate_twist(&bot3, j, &chi)?, &[GAMMA, DELTA])?;
    let norm3 = induced_map(&t.norm_to_base(n)?, &p_top, &p_bot)?;
    let f = induced_map(&norm3, &qt, &qb)?;
    debug_assert_eq!(f.source(), &ct);
    Ok(f.kernel().0)
}

/// The level-0 record of a quadratic field from binary quadratic forms.
pub fn quadratic_level_zero(q: &QuadDiscriminant) -> Result<Level> {
    let (s, _) = s_class_group(q, 3)?;
    let a = s.sylow(3)?;
    Ok(Level {
        label: layer_label(radicand(q.d), 0),
        module: FiniteGaloisModule::new(a, vec![], None)?,
        assurance: Assurance::Pinned,
    })
}

/// Tower of a quadratic field: level 0 from forms (cross-checked with any record), higher levels
/// from records as long as they are contiguous.
pub fn assemble_tower(q: &QuadDiscriminant, max_level: usize, lib: &RecordLibrary) -> Result<TowerData> {
    let r = radicand(q.d);
    let computed = quadratic_level_zero(q)?;
    let mut records: Vec<ClassGroupRecord> = Vec::new();
    for n in 0..=max_level {
        match lib.group(&layer_label(r, n as u32)) {
            Some(rec) => records.push(rec),
            None => break,
        }
    }
    if let Some(r0) = records.first() {
        if r0.s_class_group != *computed.module.group() {
            return Err(Error::validation(
                "level-0 record",
                format!("record for {} has {} but forms give {}", r0.field.label, r0.s_class_group, computed.module.group()),
            ));
        }
    }
    let label = computed.label.clone();
    if records.is_empty() {
        return TowerData::new(label, vec![computed], vec![], true);
    }
    let mut t = TowerData::from_records(label, &records, true)?;
    // level 0 is exact from forms whatever the record says
    t.levels[0].assurance = Assurance::Pinned;
    Ok(t)
}
