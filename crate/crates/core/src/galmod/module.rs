use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::exactalg::{
    arith, hom_cokernel, hom_kernel, presentation_from_orders, subgroup_generated, FiniteAbelianGroup, GroupHom,
    IntMatrix,
};

/// A finite abelian group with named, pairwise commuting automorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGaloisModule {
    group: FiniteAbelianGroup,
    actors: BTreeMap<String, IntMatrix>,
    modulus: Option<BigInt>,
}

impl FiniteGaloisModule {
    pub fn new(
        group: FiniteAbelianGroup,
        actors: Vec<(String, IntMatrix)>,
        modulus: Option<BigInt>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (name, m) in actors {
            let hom = GroupHom::new(group.clone(), group.clone(), m)
                .map_err(|e| Error::validation("action respects orders", format!("{name}: {e}")))?;
            if !hom.is_isomorphism() {
                return Err(Error::validation("action invertible", format!("actor {name} is not invertible")));
            }
            if map.insert(name.clone(), hom.matrix().clone()).is_some() {
                return Err(Error::invalid(format!("duplicate actor {name}")));
            }
        }
        let names: Vec<&String> = map.keys().collect();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                let (ma, mb) = (&map[*a], &map[*b]);
                let mut ab = ma.mul(mb);
                let mut ba = mb.mul(ma);
                ab.reduce_rows_mod(group.invariant_factors());
                ba.reduce_rows_mod(group.invariant_factors());
                if ab != ba {
                    return Err(Error::validation("actions commute", format!("{a} and {b} do not commute")));
                }
            }
        }
        if let Some(q) = &modulus {
            if !q.is_positive() || !q.is_multiple_of(&group.exponent()) {
                return Err(Error::validation(
                    "modulus kills module",
                    format!("exponent {} does not divide modulus {q}", group.exponent()),
                ));
            }
        }
        Ok(FiniteGaloisModule {
            group,
            actors: map,
            modulus,
        })
    }

    /// The group with every named actor acting trivially.
    pub fn with_trivial_action(group: FiniteAbelianGroup, names: &[&str], modulus: Option<BigInt>) -> Result<Self> {
        let r = group.rank();
        Self::new(
            group,
            names.iter().map(|n| (n.to_string(), IntMatrix::identity(r))).collect(),
            modulus,
        )
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn modulus(&self) -> Option<&BigInt> {
        self.modulus.as_ref()
    }

    pub fn actor_names(&self) -> Vec<String> {
        self.actors.keys().cloned().collect()
    }

    pub fn actor(&self, name: &str) -> Option<&IntMatrix> {
        self.actors.get(name)
    }

    pub fn actor_hom(&self, name: &str) -> Result<GroupHom> {
        let m = self
            .actors
            .get(name)
            .ok_or_else(|| Error::invalid(format!("unknown actor {name}")))?;
        GroupHom::new(self.group.clone(), self.group.clone(), m.clone())
    }

    pub fn has_actor(&self, name: &str) -> bool {
        self.actors.contains_key(name)
    }

    /// Smallest k ≥ 1 with g^k = 1.
    pub fn actor_order(&self, name: &str) -> Result<u64> {
        let g = self.actor_hom(name)?;
        let id = GroupHom::identity(&self.group);
        let mut acc = g.clone();
        for k in 1..=1_000_000u64 {
            if acc == id {
                return Ok(k);
            }
            acc = g.compose(&acc)?;
        }
        Err(Error::Internal(format!("actor {name} has huge order")))
    }

    /// Adds or replaces an actor (validated).
    pub fn with_actor(&self, name: &str, m: IntMatrix) -> Result<Self> {
        let mut actors: Vec<(String, IntMatrix)> =
            self.actors.iter().filter(|(k, _)| k.as_str() != name).map(|(k, v)| (k.clone(), v.clone())).collect();
        actors.push((name.to_string(), m));
        Self::new(self.group.clone(), actors, self.modulus.clone())
    }

    /// Keeps only the named actors.
    pub fn restrict_actors(&self, names: &[&str]) -> Result<Self> {
        let mut actors = Vec::new();
        for n in names {
            let m = self.actor(n).ok_or_else(|| Error::invalid(format!("unknown actor {n}")))?;
            actors.push((n.to_string(), m.clone()));
        }
        Self::new(self.group.clone(), actors, self.modulus.clone())
    }

    /// M / q·M with the induced actions and modulus q.
    pub fn reduce_mod(&self, q: &BigInt) -> Result<(Self, GroupHom)> {
        let r = self.group.rank();
        let qm = IntMatrix::identity(r).scale(q);
        let f = GroupHom::new(self.group.clone(), self.group.clone(), qm)?;
        let (quot, proj) = hom_cokernel(&f);
        let module = self.push_to_quotient(&proj, &quot)?;
        let module = FiniteGaloisModule::new(module.group, module.actors.into_iter().collect(), Some(q.clone()))?;
        Ok((module, proj))
    }

    /// The induced module structure on a quotient through a surjection whose kernel is stable.
    pub fn push_to_quotient(&self, proj: &GroupHom, quot: &FiniteAbelianGroup) -> Result<Self> {
        let mut actors = Vec::new();
        for (name, m) in &self.actors {
            let g = GroupHom::new(self.group.clone(), self.group.clone(), m.clone())?;
            let induced = induced_map(&g, proj, proj)?;
            actors.push((name.clone(), induced.matrix().clone()));
        }
        FiniteGaloisModule::new(quot.clone(), actors, self.modulus.clone())
    }

    /// The induced structure on a stable subgroup given by an injective inclusion.
    pub fn restrict_to(&self, incl: &GroupHom) -> Result<Self> {
        let sub = incl.source().clone();
        let mut actors = Vec::new();
        for (name, m) in &self.actors {
            let g = GroupHom::new(self.group.clone(), self.group.clone(), m.clone())?;
            let mut cols = Vec::new();
            for i in 0..sub.rank() {
                let y = g.apply(&incl.apply(&sub.generator(i)));
                let x = incl
                    .preimage(&y)
                    .ok_or_else(|| Error::validation("submodule stable", format!("{name} leaves the subgroup")))?;
                cols.push(x);
            }
            actors.push((name.clone(), IntMatrix::from_columns(sub.rank(), &cols)));
        }
        let modulus = self.modulus.clone();
        FiniteGaloisModule::new(sub, actors, modulus)
    }

    /// Checks that f: self → other commutes with every common actor.
    pub fn is_equivariant(&self, f: &GroupHom, other: &FiniteGaloisModule) -> Result<bool> {
        for (name, m) in &self.actors {
            let Some(n) = other.actors.get(name) else { continue };
            let g1 = GroupHom::new(self.group.clone(), self.group.clone(), m.clone())?;
            let g2 = GroupHom::new(other.group.clone(), other.group.clone(), n.clone())?;
            if f.compose(&g1)? != g2.compose(f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The map Q1 → Q2 induced by f: M → N on quotients M → Q1, N → Q2 (f must respect the kernels).
pub fn induced_map(f: &GroupHom, p1: &GroupHom, p2: &GroupHom) -> Result<GroupHom> {
    let q1 = p1.target();
    let mut cols = Vec::new();
    for i in 0..q1.rank() {
        let x = p1
            .preimage(&q1.generator(i))
            .ok_or_else(|| Error::invalid("first projection is not surjective"))?;
        cols.push(p2.apply(&f.apply(&x)));
    }
    let m = IntMatrix::from_columns(p2.target().rank(), &cols);
    let g = GroupHom::new(q1.clone(), p2.target().clone(), m)?;
    // well-definedness: f(ker p1) ⊆ ker p2
    let (_, k1) = hom_kernel(p1);
    let check = p2.compose(&f.compose(&k1)?)?;
    if !check.is_zero() {
        return Err(Error::validation("induced map well defined", "f does not respect the kernels"));
    }
    Ok(g)
}

/// Values χ(g) of the cyclotomic character for each actor, as integers read modulo p^m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicCharacterTable {
    p: u64,
    values: BTreeMap<String, BigInt>,
}

impl CyclotomicCharacterTable {
    pub fn new(p: u64, values: Vec<(String, BigInt)>) -> Result<Self> {
        if !arith::is_prime_u64(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        let bp = BigInt::from(p);
        for (name, v) in &values {
            if v.is_multiple_of(&bp) {
                return Err(Error::invalid(format!("χ({name}) is not a unit mod {p}")));
            }
        }
        Ok(CyclotomicCharacterTable {
            p,
            values: values.into_iter().collect(),
        })
    }

    /// γ: ζ ↦ ζ⁴ (a topological generator of Gal(Q(μ_{3^∞})/Q(μ_3))) and δ: ζ ↦ ζ⁻¹.
    pub fn standard_3adic() -> Self {
        Self::new(3, vec![("gamma".into(), BigInt::from(4)), ("delta".into(), BigInt::from(-1))])
            .expect("valid table")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// χ(g) reduced into [0, p^m).
    pub fn value(&self, name: &str, m: u32) -> Result<BigInt> {
        let v = self
            .values
            .get(name)
            .ok_or_else(|| Error::invalid(format!("character undefined on {name}")))?;
        Ok(v.mod_floor(&arith::pow_u64(self.p, m)))
    }
}

fn modulus_level(q: &BigInt, p: u64) -> Result<u32> {
    let m = arith::valuation(q, p);
    if arith::pow_u64(p, m) != *q {
        return Err(Error::invalid(format!("modulus {q} is not a power of {p}")));
    }
    Ok(m)
}

/// M(j): the action of g is multiplied by χ(g)^j.
pub fn tate_twist(m: &FiniteGaloisModule, j: i64, chi: &CyclotomicCharacterTable) -> Result<FiniteGaloisModule> {
    let q = m
        .modulus
        .clone()
        .ok_or_else(|| Error::invalid("twisting requires a module with a modulus p^m"))?;
    let level = modulus_level(&q, chi.p)?;
    let mut actors = Vec::new();
    for (name, mat) in &m.actors {
        let c = chi.value(name, level)?;
        let f = if j >= 0 {
            c.modpow(&BigInt::from(j), &q)
        } else {
            let inv = arith::mod_inverse(&c, &q).ok_or_else(|| Error::invalid("character value not a unit"))?;
            inv.modpow(&BigInt::from(-j), &q)
        };
        actors.push((name.clone(), mat.scale(&f)));
    }
    FiniteGaloisModule::new(m.group.clone(), actors, Some(q))
}

/// M / Σ (g − 1)M over the named actors.
pub fn coinvariants(m: &FiniteGaloisModule, names: &[&str]) -> Result<(FiniteAbelianGroup, GroupHom)> {
    let r = m.group.rank();
    let mut cols = Vec::new();
    for n in names {
        let g = m.actor(n).ok_or_else(|| Error::invalid(format!("unknown actor {n}")))?;
        let d = g.sub(&IntMatrix::identity(r));
        for j in 0..r {
            cols.push(d.column(j));
        }
    }
    // cokernel of ⊕ M → M given by the stacked (g − 1)
    let rel = IntMatrix::diagonal(m.group.invariant_factors());
    let rel = if cols.is_empty() {
        rel
    } else {
        rel.vstack(&IntMatrix::from_columns(r, &cols).transpose())
    };
    let pg = crate::exactalg::group_from_relations(r, &rel)?;
    let proj = GroupHom::new(m.group.clone(), pg.group.clone(), pg.coordinates.clone())?;
    Ok((pg.group, proj))
}

/// Joint kernel of (g − 1) over the named actors.
pub fn invariants(m: &FiniteGaloisModule, names: &[&str]) -> Result<(FiniteAbelianGroup, GroupHom)> {
    let r = m.group.rank();
    if names.is_empty() || r == 0 {
        return Ok((m.group.clone(), GroupHom::identity(&m.group)));
    }
    let mut orders = Vec::new();
    let mut blocks = IntMatrix::zeros(0, r);
    for n in names {
        let g = m.actor(n).ok_or_else(|| Error::invalid(format!("unknown actor {n}")))?;
        blocks = blocks.vstack(&g.sub(&IntMatrix::identity(r)));
        orders.extend(m.group.invariant_factors().iter().cloned());
    }
    let pg = presentation_from_orders(&orders)?;
    let target_matrix = pg.coordinates.mul(&blocks);
    let f = GroupHom::new(m.group.clone(), pg.group.clone(), target_matrix)?;
    Ok(hom_kernel(&f))
}

/// Image of the idempotent (1/d)·Σ ζ^{-k} g^k for an actor of order d coprime to p.
pub fn eigenspace(m: &FiniteGaloisModule, actor: &str, d: u64, zeta: &BigInt) -> Result<FiniteGaloisModule> {
    let q = m.modulus.clone().unwrap_or_else(|| m.group.exponent());
    let bd = BigInt::from(d);
    if !bd.gcd(&q).is_one() {
        return Err(Error::invalid(format!("actor order {d} is not coprime to the module exponent")));
    }
    if !zeta.modpow(&bd, &q).is_one() && !q.is_one() {
        return Err(Error::invalid("character value is not a d-th root of unity"));
    }
    let g = m.actor_hom(actor)?;
    let r = m.group.rank();
    let id = GroupHom::identity(&m.group);
    let mut gk = id.clone();
    for _ in 0..d {
        gk = g.compose(&gk)?;
    }
    if gk != id {
        return Err(Error::invalid(format!("actor {actor} does not have order dividing {d}")));
    }
    let dinv = arith::mod_inverse(&bd, &q).expect("coprime");
    let zinv = arith::mod_inverse(zeta, &q).ok_or_else(|| Error::invalid("character value not a unit"))?;
    let mut e = IntMatrix::zeros(r, r);
    let mut power = IntMatrix::identity(r);
    let mut coeff = BigInt::one();
    for _ in 0..d {
        e = e.add(&power.scale(&coeff));
        power = g.matrix().mul(&power);
        power.reduce_rows_mod(m.group.invariant_factors());
        coeff = (coeff * &zinv).mod_floor(&q);
    }
    let e = e.scale(&dinv);
    let cols: Vec<Vec<BigInt>> = (0..r).map(|j| m.group.reduce(&e.column(j))).collect();
    let (_, incl) = subgroup_generated(&m.group, &cols);
    m.restrict_to(&incl)
}
