//! Relation-search class groups for fields of degree ≤ 6 whose equation order is maximal.
//!
//! Prime ideals come from factoring f mod p (Kummer–Dedekind), valuations from an element
//! β with βP ⊆ pO. Relations are the rational primes and small elements with smooth norm.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::factor::{fp_divrem, fp_factor, fp_from_z, fp_gcd, fp_mul, fp_to_z, FpPoly};
use super::field::NumberFieldDesc;
use super::poly::ZPoly;
use super::record::{Assurance, ClassGroupRecord, Provenance};
use crate::error::{Error, Result};
use crate::exactalg::arith::{factor_u64, is_prime_u64};
use crate::exactalg::{group_from_relations, FiniteAbelianGroup, IntMatrix};
use crate::lvalues::DirichletCharacter;
use crate::quadclass::{analytic_class_number, fundamental_unit};

pub const MAX_ENGINE_DEGREE: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineParams {
    /// Factor base bound; the Minkowski bound is always included.
    pub fb_bound: Option<u64>,
    /// Largest coefficient in the element search box.
    pub max_coeff: i64,
    pub max_elements: usize,
    pub disc_bound: u64,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams { fb_bound: None, max_coeff: 80, max_elements: 400_000, disc_bound: 1_000_000_000_000 }
    }
}

impl EngineParams {
    /// Parameter string for cache lookups.
    pub fn cache_key(&self) -> String {
        format!("engine fb={:?} c={} e={} d={}", self.fb_bound, self.max_coeff, self.max_elements, self.disc_bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub p: u64,
    /// Lift of the irreducible factor of f mod p.
    pub generator: ZPoly,
    pub residue_degree: u32,
    pub ramification: u32,
    beta: ZPoly,
}

impl PrimeIdeal {
    pub fn label(&self) -> String {
        format!("({}, {})", self.p, self.generator)
    }
}

#[derive(Clone, Debug)]
pub struct EngineOutput {
    pub record: ClassGroupRecord,
    pub class_group: FiniteAbelianGroup,
    pub factor_base: Vec<PrimeIdeal>,
    pub relations: usize,
    pub elements_tried: usize,
    pub assurance: Assurance,
}

fn fp_pow(a: &FpPoly, e: u32, p: u64) -> FpPoly {
    (0..e).fold(vec![1], |acc, _| fp_mul(&acc, a, p))
}

/// Dedekind's criterion: Z[θ] is p-maximal iff gcd(F̄, ḡ, h̄) = 1 with g·h − f = p·F.
fn dedekind_maximal(f: &ZPoly, p: u64) -> bool {
    let fac = fp_factor(&fp_from_z(f, p), p);
    let g = fac.iter().fold(vec![1], |acc, (gi, _)| fp_mul(&acc, gi, p));
    let h = fac.iter().fold(vec![1], |acc, (gi, e)| fp_mul(&acc, &fp_pow(gi, e - 1, p), p));
    let diff = fp_to_z(&g).mul(&fp_to_z(&h)).sub(f);
    let pb = BigInt::from(p);
    let big_f = ZPoly::new(diff.coeffs().iter().map(|c| c.div_floor(&pb)).collect());
    let d = fp_gcd(&fp_gcd(&fp_from_z(&big_f, p), &g, p), &h, p);
    d.len() == 1
}

fn prime_ideals(f: &ZPoly, p: u64) -> Vec<PrimeIdeal> {
    let fbar = fp_from_z(f, p);
    let fac = fp_factor(&fbar, p);
    fac.iter()
        .map(|(g, e)| {
            let (q, _) = fp_divrem(&fbar, g, p);
            PrimeIdeal {
                p,
                generator: fp_to_z(g),
                residue_degree: (g.len() - 1) as u32,
                ramification: *e,
                beta: fp_to_z(&q),
            }
        })
        .collect()
}

fn minkowski_bound(field: &NumberFieldDesc, disc: &BigInt) -> f64 {
    let n = field.degree as i32;
    let fact: f64 = (1..=n).map(f64::from).product();
    let r2 = field.signature.1 as i32;
    fact / f64::from(n).powi(n) * (4.0 / std::f64::consts::PI).powi(r2) * disc.abs().to_f64().unwrap_or(f64::INFINITY).sqrt()
}

/// Exact class number of a quadratic field, from analytic formulas only.
fn quadratic_analytic_h(disc: i64) -> Result<u64> {
    if disc < 0 {
        let chi = DirichletCharacter::kronecker(disc);
        let n = disc.unsigned_abs() as i128;
        let s: i128 = (1..n).map(|a| chi.value(a as i64) as i128 * a).sum();
        let w: i128 = match disc {
            -3 => 6,
            -4 => 4,
            _ => 2,
        };
        let num = -w * s;
        if num <= 0 || num % (2 * n) != 0 {
            return Err(Error::Internal(format!("analytic class number not integral for {disc}")));
        }
        Ok((num / (2 * n)) as u64)
    } else {
        analytic_class_number(disc, &fundamental_unit(disc)?)
    }
}

struct Search<'a> {
    f: &'a ZPoly,
    n: usize,
    fb: Vec<PrimeIdeal>,
    by_prime: BTreeMap<u64, Vec<usize>>,
    rows: Vec<Vec<BigInt>>,
}

impl Search<'_> {
    fn norm(&self, a: &[i64]) -> BigInt {
        if self.n == 2 {
            let (c0, c1) = (self.f.coeff(0), self.f.coeff(1));
            let (x, y) = (BigInt::from(a[0]), BigInt::from(a[1]));
            return &x * &x - &c1 * &x * &y + &c0 * &y * &y;
        }
        super::poly::element_norm(self.f, &ZPoly::from_i64(a))
    }

    fn valuation(&self, alpha: &ZPoly, q: &PrimeIdeal, cap: u32) -> u32 {
        let pb = BigInt::from(q.p);
        let mut a = alpha.clone();
        let mut k = 0;
        while k < cap {
            let t = a.mul(&q.beta).rem_monic(self.f);
            if t.coeffs().iter().any(|c| !c.is_multiple_of(&pb)) {
                break;
            }
            a = ZPoly::new(t.coeffs().iter().map(|c| c / &pb).collect());
            k += 1;
        }
        k
    }

    /// Exponent vector of (α), if its norm is smooth over the factor base.
    fn factor(&self, a: &[i64]) -> Option<Vec<BigInt>> {
        let mut nrm = self.norm(a).abs();
        if nrm.is_zero() {
            return None;
        }
        let mut pv: Vec<(u64, u32)> = Vec::new();
        for &p in self.by_prime.keys() {
            let pb = BigInt::from(p);
            let mut e = 0;
            while (&nrm % &pb).is_zero() {
                nrm /= &pb;
                e += 1;
            }
            if e > 0 {
                pv.push((p, e));
            }
            if nrm.is_one() {
                break;
            }
        }
        if !nrm.is_one() {
            return None;
        }
        let alpha = ZPoly::from_i64(a);
        let mut row = vec![BigInt::zero(); self.fb.len()];
        for (p, e) in pv {
            let ids = &self.by_prime[&p];
            let mut rest = e;
            for (j, &i) in ids.iter().enumerate() {
                let q = &self.fb[i];
                let v = if j + 1 == ids.len() {
                    if rest % q.residue_degree != 0 {
                        return None;
                    }
                    rest / q.residue_degree
                } else {
                    self.valuation(&alpha, q, rest / q.residue_degree)
                };
                rest -= v * q.residue_degree;
                row[i] = BigInt::from(v);
            }
            if rest != 0 {
                return None;
            }
        }
        Some(row)
    }
}

/// Steps to the next vector of [−c, c]^n; false once the box is exhausted.
fn next_in_box(v: &mut [i64], c: i64) -> bool {
    for x in v.iter_mut() {
        if *x < c {
            *x += 1;
            return true;
        }
        *x = -c;
    }
    false
}

fn admissible(v: &[i64], c: i64) -> bool {
    if !v.iter().any(|x| x.abs() == c) || v[1..].iter().all(|&x| x == 0) {
        return false;
    }
    let last = v.iter().rev().find(|&&x| x != 0).copied().unwrap_or(0);
    last > 0 && v.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}

/// Class group of the field by relation search.
pub fn class_group_generic(field: &NumberFieldDesc, params: &EngineParams) -> Result<EngineOutput> {
    let n = field.degree;
    if n > MAX_ENGINE_DEGREE {
        return Err(Error::TooLarge(format!("degree {n} exceeds the engine limit {MAX_ENGINE_DEGREE}")));
    }
    let f = &field.poly;
    let disc = field.discriminant();
    let abs_disc = disc.abs().to_u64().filter(|&d| d <= params.disc_bound).ok_or_else(|| {
        Error::TooLarge(format!("|disc| = {} exceeds the engine bound {}", disc.abs(), params.disc_bound))
    })?;
    if n == 1 {
        return Ok(finish(field, FiniteAbelianGroup::trivial(), FiniteAbelianGroup::trivial(), vec![], 0, 0, Assurance::Pinned));
    }
    for (p, e) in factor_u64(abs_disc) {
        if e >= 2 && !dedekind_maximal(f, p) {
            return Err(Error::Unsupported(format!("the equation order of {} is not {p}-maximal", field.label)));
        }
    }
    let mink = minkowski_bound(field, &disc);
    let lnd = (abs_disc as f64).ln();
    let default_bound = (lnd * lnd).ceil().max(20.0) as u64;
    let bound = (mink.ceil() as u64).max(params.fb_bound.unwrap_or(default_bound)).max(3);
    let mut fb = Vec::new();
    let mut by_prime: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for p in (2..=bound).filter(|&p| is_prime_u64(p)) {
        for q in prime_ideals(f, p) {
            by_prime.entry(p).or_default().push(fb.len());
            fb.push(q);
        }
    }
    let mut search = Search { f, n, fb, by_prime, rows: Vec::new() };
    for ids in search.by_prime.values() {
        let mut row = vec![BigInt::zero(); search.fb.len()];
        for &i in ids {
            row[i] = BigInt::from(search.fb[i].ramification);
        }
        search.rows.push(row);
    }
    let quadratic_h = if n == 2 {
        let d = disc.to_i64().ok_or_else(|| Error::TooLarge("discriminant exceeds i64".into()))?;
        Some(quadratic_analytic_h(d)?)
    } else {
        None
    };
    let covers_minkowski = bound as f64 >= mink;
    let m = search.fb.len();
    let mut tried = 0usize;
    let mut last_check = 0usize;
    let mut stable_rounds = 0;
    let mut last_order: Option<BigInt> = None;
    let mut v = vec![0i64; n];
    'outer: for c in 1..=params.max_coeff {
        v.iter_mut().for_each(|x| *x = -c);
        loop {
            if admissible(&v, c) {
                tried += 1;
                if let Some(row) = search.factor(&v) {
                    search.rows.push(row);
                }
                if tried >= params.max_elements {
                    break 'outer;
                }
            }
            if !next_in_box(&mut v, c) {
                break;
            }
        }
        if search.rows.len() < m || search.rows.len() < last_check + m / 4 + 2 {
            continue;
        }
        last_check = search.rows.len();
        let rel = IntMatrix::from_big_rows(&search.rows, m);
        let Ok(pg) = group_from_relations(m, &rel) else { continue };
        let order = pg.group.order();
        if let Some(h) = quadratic_h {
            let h = BigInt::from(h);
            if order < h {
                return Err(Error::Internal(format!("relation lattice too large for {}", field.label)));
            }
            if order == h && covers_minkowski {
                let s = s_part(&search, &rel)?;
                return Ok(finish(field, pg.group, s, search.fb, search.rows.len(), tried, Assurance::Pinned));
            }
            continue;
        }
        if order.is_one() && covers_minkowski {
            return Ok(finish(field, pg.group, FiniteAbelianGroup::trivial(), search.fb, search.rows.len(), tried, Assurance::Pinned));
        }
        if last_order.as_ref() == Some(&order) {
            stable_rounds += 1;
        } else {
            stable_rounds = 0;
        }
        last_order = Some(order);
        if stable_rounds >= 3 && search.rows.len() >= 2 * m + 20 {
            let s = s_part(&search, &rel)?;
            return Ok(finish(field, pg.group, s, search.fb, search.rows.len(), tried, Assurance::Heuristic));
        }
    }
    Err(Error::InsufficientRelations(format!(
        "{}: {} relations on {} prime ideals after {tried} elements (box {}), lattice order {:?}",
        field.label,
        search.rows.len(),
        m,
        params.max_coeff,
        last_order.map(|o| o.to_string())
    )))
}

/// 3-part of the class group modulo the primes above 3.
fn s_part(search: &Search<'_>, rel: &IntMatrix) -> Result<FiniteAbelianGroup> {
    let m = search.fb.len();
    let mut rows: Vec<Vec<BigInt>> = (0..rel.rows()).map(|i| rel.row(i).to_vec()).collect();
    for &i in search.by_prime.get(&3).into_iter().flatten() {
        let mut r = vec![BigInt::zero(); m];
        r[i] = BigInt::one();
        rows.push(r);
    }
    group_from_relations(m, &IntMatrix::from_big_rows(&rows, m))?.group.sylow(3)
}

fn finish(
    field: &NumberFieldDesc,
    class_group: FiniteAbelianGroup,
    s_class_group: FiniteAbelianGroup,
    factor_base: Vec<PrimeIdeal>,
    relations: usize,
    elements_tried: usize,
    assurance: Assurance,
) -> EngineOutput {
    log::debug!("{}: class group {class_group} from {relations} relations ({assurance})", field.label);
    let record = ClassGroupRecord {
        field: field.clone(),
        s_class_group,
        generator_ideals: Vec::new(),
        galois_actions: BTreeMap::new(),
        norm_to: None,
        provenance: Provenance::Computed,
        provenance_note: "relation search".into(),
        assurance,
    };
    EngineOutput { record, class_group, factor_base, relations, elements_tried, assurance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfengine::field::{layer_field, polynomial_for_label};
    use crate::quadclass::fundamental_discriminant;

    #[test]
    fn cubic_of_conductor_nine() {
        let f = layer_field(None, 1).unwrap();
        let out = class_group_generic(&f, &EngineParams::default()).unwrap();
        assert!(out.class_group.is_trivial());
        assert_eq!(out.assurance, Assurance::Pinned);
    }

    #[test]
    fn minus_23_and_minus_239() {
        for (delta, factors) in [(-23i64, vec![3u64]), (-239, vec![15]), (-14, vec![4])] {
            let q = fundamental_discriminant(delta).unwrap();
            let f = layer_field(Some(&q), 0).unwrap();
            let out = class_group_generic(&f, &EngineParams::default()).unwrap();
            assert_eq!(out.class_group, FiniteAbelianGroup::from_u64(&factors).unwrap());
            assert_eq!(out.assurance, Assurance::Pinned);
        }
    }

    #[test]
    fn s_part_drops_primes_above_three() {
        // 3 splits in Q(√−239); its classes are killed in the S-class group
        let q = fundamental_discriminant(-239).unwrap();
        let f = layer_field(Some(&q), 0).unwrap();
        let out = class_group_generic(&f, &EngineParams::default()).unwrap();
        let (s, _) = crate::quadclass::s_class_group(&q, 3).unwrap();
        assert_eq!(out.record.s_class_group, s.sylow(3).unwrap());
    }

    #[test]
    fn dedekind_detects_non_maximal_order() {
        // x² + 3: Z[√−3] has index 2 in the maximal order
        assert!(!dedekind_maximal(&ZPoly::from_i64(&[3, 0, 1]), 2));
        assert!(dedekind_maximal(&ZPoly::from_i64(&[-1, -3, 0, 1]), 3));
        let f = NumberFieldDesc::new(ZPoly::from_i64(&[3, 0, 1]), "x").unwrap();
        assert!(matches!(class_group_generic(&f, &EngineParams::default()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn discriminant_guard() {
        let f = NumberFieldDesc::new(polynomial_for_label("Q(sqrt(-239))").unwrap(), "Q(sqrt(-239))").unwrap();
        let p = EngineParams { disc_bound: 100, ..EngineParams::default() };
        assert!(matches!(class_group_generic(&f, &p), Err(Error::TooLarge(_))));
    }
}
