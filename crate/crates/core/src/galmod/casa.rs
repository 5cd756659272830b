//! The 3×3 diagram check: with exact rows and columns and τ₂ an isomorphism,
//! (α₂ and π₂ split) ⇔ (β₂ and π₃ split).
//!
//! ```text
//!      0 → A1 -α1→ A2 -α2→ A3 → 0
//!          ι1↓     ι2↓     ι3↓
//!      0 → B1 -β1→ B2 -β2→ B3 → 0
//!                  π2↓     π3↓
//!               0 → T2 -τ2→ T3 → 0
//! ```

use super::module::FiniteGaloisModule;
use super::section::equivariant_section_exists;
use crate::error::{Error, Result};
use crate::exactalg::{FiniteAbelianGroup, GroupHom};

#[derive(Clone, Debug)]
pub struct CasaDiagram {
    pub alpha1: GroupHom,
    pub alpha2: GroupHom,
    pub beta1: GroupHom,
    pub beta2: GroupHom,
    pub iota1: GroupHom,
    pub iota2: GroupHom,
    pub iota3: GroupHom,
    pub pi2: GroupHom,
    pub pi3: GroupHom,
    pub tau2: GroupHom,
}

fn short_exact(f: &GroupHom, g: &GroupHom, name: &str) -> Result<()> {
    let ok = f.target() == g.source()
        && f.is_injective()
        && g.is_surjective()
        && g.compose(f)?.is_zero()
        && f.source().order() * g.target().order() == f.target().order();
    if ok {
        Ok(())
    } else {
        Err(Error::validation("exactness", format!("{name} is not short exact")))
    }
}

fn commutes(top_then_down: (&GroupHom, &GroupHom), down_then_side: (&GroupHom, &GroupHom), name: &str) -> Result<()> {
    let a = top_then_down.1.compose(top_then_down.0)?;
    let b = down_then_side.1.compose(down_then_side.0)?;
    if a == b {
        Ok(())
    } else {
        Err(Error::validation("commutativity", format!("square {name} does not commute")))
    }
}

fn splits(surj: &GroupHom) -> Result<bool> {
    let src = FiniteGaloisModule::new(surj.source().clone(), vec![], None)?;
    let tgt = FiniteGaloisModule::new(surj.target().clone(), vec![], None)?;
    Ok(equivariant_section_exists(surj, &src, &tgt)?.0)
}

/// Verifies the diagram hypotheses, then evaluates both splitting conditions.
pub fn casa_check(d: &CasaDiagram) -> Result<(bool, bool)> {
    short_exact(&d.alpha1, &d.alpha2, "top row")?;
    short_exact(&d.beta1, &d.beta2, "middle row")?;
    short_exact(&d.iota2, &d.pi2, "middle column")?;
    short_exact(&d.iota3, &d.pi3, "right column")?;
    if !d.iota1.is_isomorphism() {
        return Err(Error::validation("exactness", "left column: ι1 is not an isomorphism"));
    }
    if !d.tau2.is_isomorphism() {
        return Err(Error::validation("hypothesis", "τ2 is not an isomorphism"));
    }
    commutes((&d.alpha1, &d.iota2), (&d.iota1, &d.beta1), "A1-B2")?;
    commutes((&d.alpha2, &d.iota3), (&d.iota2, &d.beta2), "A2-B3")?;
    commutes((&d.beta2, &d.pi3), (&d.pi2, &d.tau2), "B2-T3")?;
    let cond_i = splits(&d.alpha2)? && splits(&d.pi2)?;
    let cond_ii = splits(&d.beta2)? && splits(&d.pi3)?;
    Ok((cond_i, cond_ii))
}

/// Builds the diagram attached to a chain B1 ⊆ A2 ⊆ B2 of subgroups (A1 = B1, A3 = A2/B1, B3 = B2/B1, T = B2/A2).
pub fn casa_from_chain(b2: &FiniteAbelianGroup, a2_incl: &GroupHom, b1_in_a2: &GroupHom) -> Result<CasaDiagram> {
    if a2_incl.target() != b2 || b1_in_a2.target() != a2_incl.source() {
        return Err(Error::invalid("chain maps do not compose"));
    }
    let beta1 = a2_incl.compose(b1_in_a2)?;
    let (_a3, alpha2) = b1_in_a2.cokernel();
    let (_b3, beta2) = beta1.cokernel();
    let (_t2, pi2) = a2_incl.cokernel();
    // ι3: A2/B1 → B2/B1 induced by the inclusion
    let iota3 = super::module::induced_map(a2_incl, &alpha2, &beta2)?;
    let (_t3, pi3) = iota3.cokernel();
    let tau2 = super::module::induced_map(&beta2, &pi2, &pi3)?;
    Ok(CasaDiagram {
        alpha1: b1_in_a2.clone(),
        alpha2,
        beta1,
        beta2,
        iota1: GroupHom::identity(b1_in_a2.source()),
        iota2: a2_incl.clone(),
        iota3,
        pi2,
        pi3,
        tau2,
    })
}
