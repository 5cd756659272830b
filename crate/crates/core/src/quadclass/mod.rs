//! Class groups of quadratic fields via binary quadratic forms.
//!
//! Imaginary fields are handled by enumerating reduced forms. Real fields take the class number
//! from the finite sine-sum formula together with a continued-fraction fundamental unit, and the
//! structure from composing prime forms.

mod forms;
mod real;

use std::collections::HashMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::arith::{is_prime_u64, is_squarefree, isqrt_u128, kronecker};
use crate::exactalg::{group_from_relations, subgroup_generated, FiniteAbelianGroup, GroupHom, IntMatrix};

pub use forms::{
    compose, cycle, power, reduce, reduced_forms_definite, reduced_forms_indefinite, rho, BQF,
};
pub use real::{analytic_class_number, fundamental_unit, sine_sum, Bounded, FundamentalUnit};

/// Largest |D| accepted by the class group routines unless overridden.
pub const DEFAULT_DISCRIMINANT_BOUND: u64 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadDiscriminant {
    pub delta: i64,
    #[serde(rename = "D")]
    pub d: i64,
}

impl QuadDiscriminant {
    pub fn is_real(&self) -> bool {
        self.d > 0
    }

    /// Conductor of the Kronecker character, |D|.
    pub fn conductor(&self) -> u64 {
        self.d.unsigned_abs()
    }
}

pub fn fundamental_discriminant(delta: i64) -> Result<QuadDiscriminant> {
    if delta == 0 || delta == 1 {
        return Err(Error::invalid(format!("{delta} does not define a quadratic field")));
    }
    if !is_squarefree(delta) {
        return Err(Error::invalid(format!("{delta} is not square-free")));
    }
    let d = if delta.rem_euclid(4) == 1 { delta } else { 4 * delta };
    Ok(QuadDiscriminant { delta, d })
}

/// Square-free radicand of the field of fundamental discriminant D.
pub fn radicand(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        d / 4
    }
}

/// Class group of a quadratic order together with a discrete-log table on reduced forms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormClassGroup {
    pub discriminant: i64,
    pub group: FiniteAbelianGroup,
    pub generator_forms: Vec<BQF>,
    pub class_number: u64,
    /// Present for real fields.
    pub unit: Option<FundamentalUnit>,
    #[serde(skip)]
    table: HashMap<BQF, Vec<BigInt>>,
}

impl FormClassGroup {
    fn key(&self, f: &BQF) -> Result<BQF> {
        class_key(self.discriminant as i128, f)
    }

    /// Coordinates of the class of f in the invariant-factor basis.
    pub fn coordinates(&self, f: &BQF) -> Result<Vec<BigInt>> {
        if f.discriminant() != self.discriminant as i128 {
            return Err(Error::invalid(format!("{f} has the wrong discriminant")));
        }
        let k = self.key(f)?;
        self.table
            .get(&k)
            .cloned()
            .ok_or_else(|| Error::Internal(format!("class of {f} missing from table")))
    }

    /// Coordinates of the class of a prime ideal above p (one of the two if p splits).
    pub fn prime_class(&self, p: u64) -> Result<Option<Vec<BigInt>>> {
        match BQF::prime_form(self.discriminant as i128, p) {
            Some(f) => Ok(Some(self.coordinates(&f)?)),
            None => Ok(None),
        }
    }
}

/// Canonical representative of the ideal class of f: the reduced form for D < 0 and, for D > 0,
/// the smaller of the cycle representatives of f and of f composed with (−1, b, c).
pub fn class_key(d: i128, f: &BQF) -> Result<BQF> {
    let r = reduce(f)?;
    if d < 0 {
        return Ok(r);
    }
    let other = compose(&r, &BQF::negative_principal(d))?;
    Ok(r.min(other))
}

struct Builder {
    d: i128,
    elements: HashMap<BQF, Vec<i64>>,
    gens: Vec<BQF>,
    relations: Vec<Vec<i64>>,
}

impl Builder {
    fn new(d: i128) -> Result<Self> {
        let mut elements = HashMap::new();
        elements.insert(class_key(d, &BQF::principal(d))?, vec![]);
        Ok(Builder { d, elements, gens: vec![], relations: vec![] })
    }

    fn absorb(&mut self, g: &BQF) -> Result<()> {
        let mut pow = reduce(g)?;
        let mut k: i64 = 1;
        let hit = loop {
            if let Some(e) = self.elements.get(&class_key(self.d, &pow)?) {
                break e.clone();
            }
            pow = compose(&pow, g)?;
            k += 1;
        };
        if k == 1 {
            return Ok(());
        }
        let n = self.gens.len();
        let mut row = vec![0i64; n + 1];
        for (i, v) in hit.iter().enumerate() {
            row[i] = -v;
        }
        row[n] = k;
        for r in self.relations.iter_mut() {
            r.push(0);
        }
        self.relations.push(row);
        let old: Vec<(BQF, Vec<i64>)> = self.elements.drain().collect();
        for (key, mut exps) in old {
            exps.resize(n, 0);
            let mut cur = key;
            for i in 0..k {
                if i > 0 {
                    cur = compose(&cur, g)?;
                }
                let mut e = exps.clone();
                e.push(i);
                self.elements.insert(class_key(self.d, &cur)?, e);
            }
        }
        self.gens.push(*g);
        Ok(())
    }

    fn finish(self, h: u64, unit: Option<FundamentalUnit>) -> Result<FormClassGroup> {
        if self.elements.len() as u64 != h {
            return Err(Error::Internal(format!(
                "prime forms generate {} classes but h = {h} for D = {}",
                self.elements.len(),
                self.d
            )));
        }
        let n = self.gens.len();
        let rel = IntMatrix::from_rows(&self.relations);
        let rel = if n == 0 { IntMatrix::zeros(0, 0) } else { rel };
        let pg = group_from_relations(n, &rel)?;
        let mut table = HashMap::with_capacity(self.elements.len());
        for (key, mut exps) in self.elements {
            exps.resize(n, 0);
            let v: Vec<BigInt> = exps.iter().map(|&x| BigInt::from(x)).collect();
            table.insert(key, pg.to_invariant(&v));
        }
        if pg.group.order() != BigInt::from(h) {
            return Err(Error::validation("class group order", format!("structure order differs from h = {h}")));
        }
        Ok(FormClassGroup {
            discriminant: self.d as i64,
            group: pg.group,
            generator_forms: self.gens,
            class_number: h,
            unit,
            table,
        })
    }
}

fn check_fundamental(d: i64) -> Result<()> {
    let ok = match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    };
    if ok && d != 1 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{d} is not a fundamental discriminant")))
    }
}

fn check_bound(d: i64, bound: u64) -> Result<()> {
    if d.unsigned_abs() > bound {
        return Err(Error::TooLarge(format!("|D| = {} exceeds the configured bound {bound}", d.unsigned_abs())));
    }
    Ok(())
}

fn prime_candidates(d: i128, limit: u64) -> impl Iterator<Item = BQF> {
    (2..=limit.max(2))
        .filter(|&p| is_prime_u64(p))
        .filter_map(move |p| BQF::prime_form(d, p))
}

pub fn class_group_imaginary(d: i64) -> Result<FormClassGroup> {
    class_group_imaginary_bounded(d, DEFAULT_DISCRIMINANT_BOUND)
}

pub fn class_group_imaginary_bounded(d: i64, bound: u64) -> Result<FormClassGroup> {
    if d >= 0 {
        return Err(Error::invalid("imaginary class group needs D < 0"));
    }
    check_fundamental(d)?;
    check_bound(d, bound)?;
    let d128 = d as i128;
    let h = reduced_forms_definite(d128).len() as u64;
    let limit = isqrt_u128((-d128 / 3) as u128) as u64;
    let mut b = Builder::new(d128)?;
    for f in prime_candidates(d128, limit) {
        if b.elements.len() as u64 == h {
            break;
        }
        b.absorb(&f)?;
    }
    b.finish(h, None)
}

pub fn class_group_real(d: i64) -> Result<FormClassGroup> {
    class_group_real_bounded(d, DEFAULT_DISCRIMINANT_BOUND)
}

pub fn class_group_real_bounded(d: i64, bound: u64) -> Result<FormClassGroup> {
    if d <= 0 {
        return Err(Error::invalid("real class group needs D > 0"));
    }
    check_fundamental(d)?;
    check_bound(d, bound)?;
    let unit = fundamental_unit(d)?;
    let h = analytic_class_number(d, &unit)?;
    let d128 = d as i128;
    // Minkowski bound √D/2
    let limit = isqrt_u128(d as u128) as u64 / 2 + 1;
    let mut b = Builder::new(d128)?;
    for f in prime_candidates(d128, limit) {
        if b.elements.len() as u64 == h {
            break;
        }
        b.absorb(&f)?;
    }
    b.finish(h, Some(unit))
}

pub fn class_group(d: i64) -> Result<FormClassGroup> {
    if d < 0 {
        class_group_imaginary(d)
    } else {
        class_group_real(d)
    }
}

/// Narrow class number by counting ρ-cycles of reduced indefinite forms.
pub fn narrow_class_number_by_cycles(d: i64) -> Result<u64> {
    check_fundamental(d)?;
    if d < 0 {
        return Err(Error::invalid("cycle count needs D > 0"));
    }
    let forms = reduced_forms_indefinite(d as i128);
    let mut seen = std::collections::HashSet::new();
    let mut count = 0u64;
    for f in forms {
        if seen.contains(&f) {
            continue;
        }
        count += 1;
        for g in cycle(&f) {
            seen.insert(g);
        }
    }
    Ok(count)
}

/// Quotient of the class group by the classes of primes above p, with the projection.
pub fn s_class_group(q: &QuadDiscriminant, p: u64) -> Result<(FiniteAbelianGroup, GroupHom)> {
    let cg = class_group(q.d)?;
    s_class_group_of(&cg, p)
}

pub fn s_class_group_of(cg: &FormClassGroup, p: u64) -> Result<(FiniteAbelianGroup, GroupHom)> {
    if !is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let g = &cg.group;
    // the conjugate prime has the inverse class, so one generator suffices
    let col = match cg.prime_class(p)? {
        Some(c) => c,
        None => g.zero_element(),
    };
    let (_sub, inc) = subgroup_generated(g, &[col]);
    Ok(inc.cokernel())
}

/// Whether p splits, ramifies or stays inert: the Kronecker symbol (D|p).
pub fn splitting_symbol(d: i64, p: u64) -> i8 {
    kronecker(d, p as i64)
}
