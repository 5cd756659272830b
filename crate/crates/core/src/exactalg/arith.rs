//! Small-integer number theory helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: &BigInt) -> bool {
    match n.to_u64() {
        Some(v) => is_prime_u64(v),
        None => {
            // only small primes ever reach this crate; fall back to trial division
            if n.is_negative() {
                return false;
            }
            let mut d = BigInt::from(2);
            while &d * &d <= *n {
                if n.is_multiple_of(&d) {
                    return false;
                }
                d += 1;
            }
            true
        }
    }
}

/// Prime factorization of |n| by trial division, ascending primes.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: i64) -> bool {
    if n == 0 {
        return false;
    }
    factor_u64(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// Exponent of p in n (n ≠ 0).
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while n.is_multiple_of(&p) {
        n /= &p;
        v += 1;
    }
    v
}

/// p-power part of n.
pub fn p_part(n: &BigInt, p: u64) -> BigInt {
    num_traits::pow(BigInt::from(p), valuation(n, p) as usize)
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "square root of a negative number");
    n.sqrt()
}

/// Extended gcd: (g, x, y) with a·x + b·y = g ≥ 0.
pub fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Inverse of a modulo m, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let (g, x, _) = xgcd(&a.mod_floor(m), m);
    if g.is_one() {
        Some(x.mod_floor(m))
    } else {
        None
    }
}

pub fn xgcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Kronecker symbol (a|n) for arbitrary integers a, n.
pub fn kronecker(a: i64, n: i64) -> i8 {
    let mut a = a as i128;
    let mut n = n as i128;
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let mut twos = 0;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // Jacobi symbol (a|n), n odd positive
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn pow_u64(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// True when every prime factor of |n| is at most `bound`.
pub fn is_smooth(n: &BigInt, bound: u64) -> bool {
    if n.is_zero() {
        return false;
    }
    let mut m = n.abs();
    let mut p = 2u64;
    while p <= bound {
        let bp = BigInt::from(p);
        while m.is_multiple_of(&bp) {
            m /= &bp;
        }
        if m.is_one() {
            return true;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    m.is_one()
}

pub fn one() -> BigInt {
    BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_brute(a: i64, p: i64) -> i8 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| (x * x) % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(3_215_031_751));
    }

    #[test]
    fn kronecker_matches_legendre_for_odd_primes() {
        for p in [3i64, 5, 7, 11, 13, 101] {
            for a in -30..30 {
                assert_eq!(kronecker(a, p), legendre_brute(a, p), "({a}|{p})");
            }
        }
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(17, 2), 1);
        assert_eq!(kronecker(12, 1), 1);
    }

    #[test]
    fn squarefree_and_factor() {
        assert!(is_squarefree(717));
        assert!(!is_squarefree(18));
        assert!(is_squarefree(-11217));
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(valuation(&BigInt::from(1440), 3), 2);
    }

    #[test]
    fn inverse_and_gcd() {
        assert_eq!(mod_inverse(&big(4), &big(9)), Some(big(7)));
        assert_eq!(mod_inverse(&big(3), &big(9)), None);
        let (g, x, y) = xgcd(&big(240), &big(46));
        assert_eq!(g, big(2));
        assert_eq!(big(240) * x + big(46) * y, big(2));
        assert_eq!(isqrt_u128(99), 9);
        assert!(is_smooth(&big(2 * 3 * 7 * 7), 7));
        assert!(!is_smooth(&big(2 * 11), 7));
    }
}
