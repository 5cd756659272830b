//! Factorization over F_p and over Z (Cantor–Zassenhaus, Hensel lifting, recombination).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{discriminant, ZPoly};
use crate::exactalg::arith::is_prime_u64;

/// Polynomial over F_p, coefficients low to high, trimmed.
pub type FpPoly = Vec<u64>;

fn trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

pub fn fp_from_z(f: &ZPoly, p: u64) -> FpPoly {
    let pb = BigInt::from(p);
    trim(f.coeffs().iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect())
}

pub fn fp_to_z(f: &FpPoly) -> ZPoly {
    ZPoly::new(f.iter().map(|&c| BigInt::from(c)).collect())
}

pub fn fp_add(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p).collect())
}

pub fn fp_sub(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p).collect())
}

pub fn fp_mul(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    trim(out)
}

/// (quotient, remainder); b nonzero.
pub fn fp_divrem(a: &FpPoly, b: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    let db = b.len() - 1;
    if a.len() <= db {
        return (vec![], a.clone());
    }
    let li = inv(*b.last().unwrap(), p);
    let mut r = a.clone();
    let mut q = vec![0u64; a.len() - db];
    for i in (db..r.len()).rev() {
        let c = mulmod(r[i], li, p);
        if c == 0 {
            continue;
        }
        q[i - db] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[i - db + j] = (r[i - db + j] + p - mulmod(c, bj, p)) % p;
        }
    }
    r.truncate(db);
    (trim(q), trim(r))
}

pub fn fp_rem(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    fp_divrem(a, b, p).1
}

pub fn fp_monic(a: &FpPoly, p: u64) -> FpPoly {
    match a.last() {
        None => vec![],
        Some(&l) => {
            let li = inv(l, p);
            a.iter().map(|&c| mulmod(c, li, p)).collect()
        }
    }
}

pub fn fp_gcd(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    fp_monic(&x, p)
}

/// Extended gcd: (g, s, t) with s·a + t·b = g monic.
pub fn fp_xgcd(a: &FpPoly, b: &FpPoly, p: u64) -> (FpPoly, FpPoly, FpPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![1u64], vec![]);
    let (mut t0, mut t1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        r0 = std::mem::replace(&mut r1, r);
        let ns = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        s0 = std::mem::replace(&mut s1, ns);
        let nt = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        t0 = std::mem::replace(&mut t1, nt);
    }
    let li = inv(*r0.last().unwrap(), p);
    let sc = |v: &FpPoly| trim(v.iter().map(|&c| mulmod(c, li, p)).collect());
    (sc(&r0), sc(&s0), sc(&t0))
}

fn fp_powmod(base: &FpPoly, mut e: u128, m: &FpPoly, p: u64) -> FpPoly {
    let mut r: FpPoly = vec![1];
    let mut b = fp_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = fp_rem(&fp_mul(&r, &b, p), m, p);
        }
        b = fp_rem(&fp_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    r
}

fn deg(a: &FpPoly) -> usize {
    a.len().saturating_sub(1)
}

/// Distinct-degree factorization of a monic squarefree polynomial: pairs (product, degree).
pub fn fp_ddf(f: &FpPoly, p: u64) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x: FpPoly = vec![0, 1];
    let mut h = x.clone();
    let mut d = 0;
    while deg(&rest) >= 2 * (d + 1) {
        d += 1;
        h = fp_powmod(&h, p as u128, &rest, p);
        let g = fp_gcd(&rest, &fp_sub(&h, &x, p), p);
        if deg(&g) > 0 {
            out.push((g.clone(), d));
            rest = fp_divrem(&rest, &g, p).0;
            h = fp_rem(&h, &rest, p);
        }
    }
    if deg(&rest) > 0 {
        let dd = deg(&rest);
        out.push((rest, dd));
    }
    out
}

/// Equal-degree splitting of a product of irreducibles of degree d.
pub fn fp_edf(f: &FpPoly, d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let n = deg(f);
    if n == d {
        return vec![fp_monic(f, p)];
    }
    let e: u128 = ((p as u128).pow(d as u32) - 1) / 2;
    loop {
        let a: FpPoly = trim((0..n).map(|_| rng.random_range(0..p)).collect());
        if deg(&a) < 1 {
            continue;
        }
        let b = if p == 2 {
            // trace a + a² + … + a^(2^(d−1))
            let mut t = a.clone();
            let mut cur = a.clone();
            for _ in 1..d {
                cur = fp_rem(&fp_mul(&cur, &cur, p), f, p);
                t = fp_add(&t, &cur, p);
            }
            t
        } else {
            fp_sub(&fp_powmod(&a, e, f, p), &vec![1], p)
        };
        let g = fp_gcd(f, &b, p);
        if deg(&g) > 0 && deg(&g) < n {
            let h = fp_divrem(f, &g, p).0;
            let mut out = fp_edf(&g, d, p, rng);
            out.extend(fp_edf(&h, d, p, rng));
            return out;
        }
    }
}

/// Monic irreducible factors of a monic squarefree polynomial over F_p, sorted.
pub fn fp_factor_squarefree(f: &FpPoly, p: u64) -> Vec<FpPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(p ^ (f.len() as u64) << 32);
    let mut out = Vec::new();
    for (g, d) in fp_ddf(&fp_monic(f, p), p) {
        out.extend(fp_edf(&g, d, p, &mut rng));
    }
    out.sort();
    out
}

/// Irreducible factors over F_p with multiplicities, sorted by factor.
pub fn fp_factor(f: &FpPoly, p: u64) -> Vec<(FpPoly, u32)> {
    // trial division by each squarefree factor's irreducibles
    let f = fp_monic(f, p);
    let mut out: Vec<(FpPoly, u32)> = Vec::new();
    let mut rest = f.clone();
    let mut rad = squarefree_part(&f, p);
    if rad.is_empty() {
        rad = f.clone();
    }
    for g in fp_factor_squarefree(&rad, p) {
        let mut e = 0;
        loop {
            let (q, r) = fp_divrem(&rest, &g, p);
            if !r.is_empty() {
                break;
            }
            rest = q;
            e += 1;
        }
        out.push((g, e));
    }
    out
}

fn fp_derivative(f: &FpPoly, p: u64) -> FpPoly {
    trim(f.iter().enumerate().skip(1).map(|(i, &c)| mulmod(c, i as u64 % p, p)).collect())
}

/// Product of the distinct irreducible factors.
fn squarefree_part(f: &FpPoly, p: u64) -> FpPoly {
    let d = fp_derivative(f, p);
    if d.is_empty() {
        // f = g(x^p) = g(x)^p over F_p
        let g: FpPoly = f.iter().step_by(p as usize).copied().collect();
        return squarefree_part(&g, p);
    }
    let g = fp_gcd(f, &d, p);
    let mut r = fp_divrem(f, &g, p).0;
    // factors of multiplicity divisible by p vanish from f/gcd; recover them from g
    let mut rest = g;
    loop {
        let common = fp_gcd(&rest, &r, p);
        if deg(&common) == 0 {
            break;
        }
        rest = fp_divrem(&rest, &common, p).0;
    }
    if deg(&rest) > 0 {
        let extra = squarefree_part(&rest, p);
        r = fp_mul(&r, &extra, p);
        r = fp_monic(&r, p);
    }
    fp_monic(&r, p)
}

/// Lift f ≡ g·h mod p^k from a factorization mod p (f, g, h monic, gcd(g, h) = 1 mod p).
fn hensel_two(f: &ZPoly, g: &FpPoly, h: &FpPoly, p: u64, k: u32) -> (ZPoly, ZPoly) {
    let (_, s, t) = fp_xgcd(g, h, p);
    let pb = BigInt::from(p);
    let mut gz = fp_to_z(g);
    let mut hz = fp_to_z(h);
    let mut pj = pb.clone();
    for _ in 1..k {
        // e = (f − g·h)/p^j mod p
        let diff = f.sub(&gz.mul(&hz));
        let e: ZPoly = ZPoly::new(diff.coeffs().iter().map(|c| c / &pj).collect());
        let e = fp_from_z(&e, p);
        let et = fp_mul(&e, &t, p);
        let (q, tau) = fp_divrem(&et, g, p);
        let sigma = fp_add(&fp_mul(&e, &s, p), &fp_mul(&q, h, p), p);
        gz = gz.add(&fp_to_z(&tau).scale(&pj));
        hz = hz.add(&fp_to_z(&sigma).scale(&pj));
        pj *= &pb;
    }
    (gz.reduce_coeffs(&pj), hz.reduce_coeffs(&pj))
}

/// Multifactor lifting by recursive splitting.
fn hensel_lift(f: &ZPoly, factors: &[FpPoly], p: u64, k: u32) -> Vec<ZPoly> {
    if factors.len() == 1 {
        let m = BigInt::from(p).pow(k);
        return vec![f.reduce_coeffs(&m)];
    }
    let mid = factors.len() / 2;
    let prod = |fs: &[FpPoly]| fs.iter().fold(vec![1u64], |acc, g| fp_mul(&acc, g, p));
    let g = prod(&factors[..mid]);
    let h = prod(&factors[mid..]);
    let (gz, hz) = hensel_two(f, &g, &h, p, k);
    let mut out = hensel_lift(&gz, &factors[..mid], p, k);
    out.extend(hensel_lift(&hz, &factors[mid..], p, k));
    out
}

fn small_primes_for(f: &ZPoly) -> impl Iterator<Item = u64> + '_ {
    let disc = discriminant(f);
    (3u64..).filter(|&p| is_prime_u64(p)).filter(move |&p| !disc.is_multiple_of(&BigInt::from(p)))
}

/// Factorization of a monic squarefree polynomial over Z into monic irreducibles.
pub fn factor_monic_squarefree(f: &ZPoly) -> Vec<ZPoly> {
    assert!(f.is_monic());
    if f.degree() <= 1 {
        return vec![f.clone()];
    }
    // choose the prime with fewest modular factors among the first few
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    for p in small_primes_for(f).take(8) {
        let fs = fp_factor_squarefree(&fp_from_z(f, p), p);
        if fs.len() == 1 {
            return vec![f.clone()];
        }
        if best.as_ref().is_none_or(|(_, b)| fs.len() < b.len()) {
            best = Some((p, fs));
        }
    }
    let (p, modular) = best.expect("some prime");
    // Mignotte-style bound: factor coefficients ≤ 2^n·‖f‖₂
    let bound = f.l2_norm_bound() << (f.degree() as usize);
    let mut k = 1u32;
    let pb = BigInt::from(p);
    while pb.pow(k) <= &bound * 2 {
        k += 1;
    }
    let modulus = pb.pow(k);
    let mut lifted = hensel_lift(f, &modular, p, k);
    let mut rest = f.clone();
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut found = None;
        for subset in combinations(lifted.len(), size) {
            let cand = subset
                .iter()
                .fold(ZPoly::one(), |acc, &i| acc.mul(&lifted[i]).reduce_coeffs(&modulus))
                .symmetric_mod(&modulus);
            if let Some(q) = rest.div_exact_monic(&cand) {
                found = Some((subset, cand, q));
                break;
            }
        }
        match found {
            Some((subset, cand, q)) => {
                out.push(cand);
                rest = q;
                lifted = lifted.into_iter().enumerate().filter(|(i, _)| !subset.contains(i)).map(|(_, g)| g).collect();
            }
            None => size += 1,
        }
    }
    out.push(rest);
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.coeffs().cmp(b.coeffs())));
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Deterministic irreducibility test over Q for monic integer polynomials.
pub fn is_irreducible(f: &ZPoly) -> bool {
    if f.degree() < 1 || !f.is_monic() {
        return false;
    }
    if discriminant(f).is_zero() {
        return f.degree() == 1;
    }
    factor_monic_squarefree(f).len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modular_factorization() {
        // x² + 1 splits mod 5, stays irreducible mod 7
        assert_eq!(fp_factor_squarefree(&vec![1, 0, 1], 5), vec![vec![2, 1], vec![3, 1]]);
        assert_eq!(fp_factor_squarefree(&vec![1, 0, 1], 7).len(), 1);
        // (x + 1)²·x mod 3
        let f = fp_mul(&fp_mul(&vec![1, 1], &vec![1, 1], 3), &vec![0, 1], 3);
        assert_eq!(fp_factor(&f, 3), vec![(vec![0, 1], 1), (vec![1, 1], 2)]);
    }

    #[test]
    fn integer_factorization() {
        let a = ZPoly::from_i64(&[-1, -3, 0, 1]);
        let b = ZPoly::from_i64(&[6, -1, 1]);
        let f = a.mul(&b);
        let fs = factor_monic_squarefree(&f);
        assert_eq!(fs, vec![b.clone(), a.clone()]);
        assert!(is_irreducible(&a));
        assert!(!is_irreducible(&f));
        // x⁴ + 1 is irreducible but splits modulo every prime
        assert!(is_irreducible(&ZPoly::from_i64(&[1, 0, 0, 0, 1])));
        // (x² − 2)(x² − 3)
        assert!(!is_irreducible(&ZPoly::from_i64(&[6, 0, -5, 0, 1])));
    }
}
