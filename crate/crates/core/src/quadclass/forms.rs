use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::arith::{isqrt_u128, kronecker, xgcd_i128};

/// Binary quadratic form a·x² + b·xy + c·y².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BQF {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    xgcd_i128(a, b).0
}

impl BQF {
    pub fn new(a: i128, b: i128, c: i128) -> Self {
        BQF { a, b, c }
    }

    /// The form (a, b, ·) of discriminant d; `None` if 4a ∤ b² − d.
    pub fn from_ab(a: i128, b: i128, d: i128) -> Option<Self> {
        let num = b * b - d;
        if a == 0 || num % (4 * a) != 0 {
            return None;
        }
        Some(BQF { a, b, c: num / (4 * a) })
    }

    pub fn discriminant(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a, self.b), self.c) == 1
    }

    /// x² + bxy + cy² with b ∈ {0, 1}.
    pub fn principal(d: i128) -> Self {
        let b = d.rem_euclid(2);
        BQF::from_ab(1, b, d).expect("principal form exists")
    }

    /// -x² + bxy + cy², whose class is trivial in the wide group.
    pub fn negative_principal(d: i128) -> Self {
        let b = d.rem_euclid(2);
        BQF::from_ab(-1, b, d).expect("negative principal form exists")
    }

    pub fn inverse(&self) -> Self {
        BQF::new(self.a, -self.b, self.c)
    }

    /// A form of norm p representing a prime ideal above p, if p is not inert.
    pub fn prime_form(d: i128, p: u64) -> Option<Self> {
        let p128 = p as i128;
        if kronecker(d as i64, p as i64) == -1 {
            return None;
        }
        let m = 4 * p128;
        let mut b = d.rem_euclid(2);
        while b <= p128 {
            if (b * b - d).rem_euclid(m) == 0 {
                return BQF::from_ab(p128, b, d);
            }
            b += 2;
        }
        None
    }

    pub fn is_reduced(&self) -> bool {
        let d = self.discriminant();
        if d < 0 {
            let (a, b, c) = (self.a, self.b, self.c);
            a > 0 && b.abs() <= a && a <= c && !(b < 0 && (b.abs() == a || a == c))
        } else {
            let s = isqrt_u128(d as u128) as i128;
            let a2 = 2 * self.a.abs();
            self.b > 0 && self.b <= s && a2 + self.b > s && a2 - self.b <= s
        }
    }
}

impl fmt::Display for BQF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn check_form(f: &BQF) -> Result<i128> {
    let d = f.discriminant();
    if d == 0 || !f.is_primitive() {
        return Err(Error::invalid(format!("form {f} is not primitive of nonzero discriminant")));
    }
    if d > 0 {
        let s = isqrt_u128(d as u128) as i128;
        if s * s == d {
            return Err(Error::invalid("square discriminant"));
        }
    }
    Ok(d)
}

/// Reduction of a positive definite form to the unique reduced representative.
fn reduce_definite(f: &BQF) -> BQF {
    let BQF { mut a, mut b, mut c } = *f;
    let d = f.discriminant();
    if a < 0 {
        // negative definite forms are not used; normalize sign defensively
        a = -a;
        b = -b;
        c = -c;
    }
    loop {
        // b into (−a, a]
        let two_a = 2 * a;
        let mut nb = b.rem_euclid(two_a);
        if nb > a {
            nb -= two_a;
        }
        if nb != b {
            b = nb;
            c = (b * b - d) / (4 * a);
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        return BQF::new(a, b, c);
    }
}

/// One reduction operator step for indefinite forms: (a, b, c) ↦ (c, b', (b'² − D)/4c).
pub fn rho(f: &BQF) -> BQF {
    let d = f.discriminant();
    let s = isqrt_u128(d as u128) as i128;
    let c = f.c;
    let m = 2 * c.abs();
    let target = (-f.b).rem_euclid(m);
    let nb = if c.abs() > s {
        // representative in (−|c|, |c|]
        if target > c.abs() {
            target - m
        } else {
            target
        }
    } else {
        // largest value ≤ s congruent to −b
        s - (s - target).rem_euclid(m)
    };
    BQF::new(c, nb, (nb * nb - d) / (4 * c))
}

/// The ρ-cycle of a reduced indefinite form.
pub fn cycle(f: &BQF) -> Vec<BQF> {
    debug_assert!(f.is_reduced());
    let mut out = vec![*f];
    let mut g = rho(f);
    while g != *f {
        out.push(g);
        g = rho(&g);
        assert!(out.len() < 10_000_000, "runaway cycle");
    }
    out
}

fn reduce_indefinite(f: &BQF) -> BQF {
    let mut g = *f;
    let mut steps = 0;
    while !g.is_reduced() {
        g = rho(&g);
        steps += 1;
        assert!(steps < 100_000, "indefinite reduction did not terminate");
    }
    *cycle(&g).iter().min().expect("nonempty cycle")
}

/// Reduced representative: the unique reduced form for D < 0, the least form of the ρ-cycle for D > 0.
pub fn reduce(f: &BQF) -> Result<BQF> {
    let d = check_form(f)?;
    Ok(if d < 0 { reduce_definite(f) } else { reduce_indefinite(f) })
}

/// Dirichlet composition followed by reduction.
pub fn compose(f: &BQF, g: &BQF) -> Result<BQF> {
    let d = check_form(f)?;
    if g.discriminant() != d {
        return Err(Error::invalid(format!("discriminants differ: {f} and {g}")));
    }
    reduce(&compose_raw(f, g, d))
}

/// Unreduced Dirichlet composition.
pub(crate) fn compose_raw(f: &BQF, g: &BQF, d: i128) -> BQF {
    let (a1, b1) = (f.a, f.b);
    let (a2, b2) = (g.a, g.b);
    let beta = (b1 + b2) / 2;
    let (g1, x1, y1) = xgcd_i128(a1, a2);
    let (e, x2, y2) = xgcd_i128(g1, beta);
    let (u, v, w) = (x2 * x1, x2 * y1, y2);
    let aa = a1 * a2 / (e * e);
    let num = u * a1 * b2 + v * a2 * b1 + w * ((b1 * b2 + d) / 2);
    debug_assert_eq!(num % e, 0);
    let m = 2 * aa;
    let mut bb = (num / e).rem_euclid(m.abs());
    if bb > aa.abs() {
        bb -= m.abs();
    }
    let cc = (bb * bb - d) / (4 * aa);
    debug_assert_eq!(bb * bb - 4 * aa * cc, d);
    BQF::new(aa, bb, cc)
}

pub fn power(f: &BQF, mut k: u64) -> Result<BQF> {
    let d = check_form(f)?;
    let mut result = reduce(&BQF::principal(d))?;
    let mut base = reduce(f)?;
    while k > 0 {
        if k & 1 == 1 {
            result = compose(&result, &base)?;
        }
        base = compose(&base, &base)?;
        k >>= 1;
    }
    Ok(result)
}

/// All reduced forms of a negative discriminant.
pub fn reduced_forms_definite(d: i128) -> Vec<BQF> {
    let mut out = Vec::new();
    let amax = isqrt_u128((-d / 3) as u128) as i128;
    for a in 1..=amax {
        let mut b = -a + 1;
        while b <= a {
            if (b - d).rem_euclid(2) == 0 {
                if let Some(f) = BQF::from_ab(a, b, d) {
                    if f.is_reduced() && f.is_primitive() {
                        out.push(f);
                    }
                }
            }
            b += 1;
        }
    }
    out
}

/// All reduced indefinite forms of a positive non-square discriminant.
pub fn reduced_forms_indefinite(d: i128) -> Vec<BQF> {
    let s = isqrt_u128(d as u128) as i128;
    let mut out = Vec::new();
    let mut b = if (s - d).rem_euclid(2) == 0 { s } else { s - 1 };
    while b > 0 {
        let n = (d - b * b) / 4;
        let mut a = 1;
        while a * a <= n {
            if n % a == 0 {
                for x in [a, n / a] {
                    for sa in [x, -x] {
                        let f = BQF::new(sa, b, -n / sa);
                        if f.is_reduced() && f.is_primitive() && !out.contains(&f) {
                            out.push(f);
                        }
                    }
                }
            }
            a += 1;
        }
        b -= 2;
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_and_inverse() {
        let d = -23;
        let f = BQF::new(2, 1, 3);
        let e = BQF::principal(d);
        assert_eq!(compose(&e, &f).unwrap(), reduce(&f).unwrap());
        assert_eq!(compose(&f, &f.inverse()).unwrap(), reduce(&e).unwrap());
    }

    #[test]
    fn order_three_at_minus_23() {
        let f = BQF::new(2, 1, 3);
        assert_ne!(power(&f, 1).unwrap(), BQF::principal(-23));
        assert_ne!(power(&f, 2).unwrap(), BQF::principal(-23));
        assert_eq!(power(&f, 3).unwrap(), BQF::principal(-23));
        assert_eq!(reduced_forms_definite(-23).len(), 3);
        assert_eq!(reduced_forms_definite(-4), vec![BQF::new(1, 0, 1)]);
    }

    #[test]
    fn mismatched_discriminants() {
        assert!(compose(&BQF::new(2, 1, 3), &BQF::new(1, 0, 1)).is_err());
    }

    #[test]
    fn reduction_is_idempotent() {
        for f in [BQF::new(7, 9, 4), BQF::new(13, 27, 15), BQF::new(3, 11, -5), BQF::new(-7, 5, 3)] {
            let r = reduce(&f).unwrap();
            assert_eq!(reduce(&r).unwrap(), r);
            assert_eq!(r.discriminant(), f.discriminant());
        }
    }

    #[test]
    fn indefinite_cycles_partition() {
        // D = 5: one reduced cycle; D = 12: two narrow classes (N(ε) = +1)
        let forms = reduced_forms_indefinite(5);
        assert_eq!(cycle(&forms[0]).len(), forms.len());
        let forms12 = reduced_forms_indefinite(12);
        let mut reps: Vec<BQF> = forms12.iter().map(|f| *cycle(f).iter().min().unwrap()).collect();
        reps.sort();
        reps.dedup();
        assert_eq!(reps.len(), 2);
    }

    #[test]
    fn prime_forms() {
        let f = BQF::prime_form(-23, 2).unwrap();
        assert_eq!((f.a, f.discriminant()), (2, -23));
        assert!(BQF::prime_form(-23, 5).is_none());
        let g = BQF::prime_form(-14 * 4, 3).unwrap();
        assert_eq!(g.discriminant(), -56);
    }
}
