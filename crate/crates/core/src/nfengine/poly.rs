//! Dense univariate polynomials over Z.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactalg::IntMatrix;

/// Coefficients low to high; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZPoly {
    coeffs: Vec<BigInt>,
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        ZPoly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> Self {
        ZPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        ZPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        ZPoly::new(vec![c])
    }

    /// The polynomial x.
    pub fn x() -> Self {
        ZPoly::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with −1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn lead(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn add(&self, o: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, k: &BigInt) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ZPoly::new(out)
    }

    pub fn pow(&self, mut k: u32) -> ZPoly {
        let mut r = ZPoly::one();
        let mut b = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        r
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// self(g(x)).
    pub fn compose(&self, g: &ZPoly) -> ZPoly {
        let mut acc = ZPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&ZPoly::constant(c.clone()));
        }
        acc
    }

    pub fn derivative(&self) -> ZPoly {
        ZPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// p(−x).
    pub fn reflect(&self) -> ZPoly {
        ZPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// Division by a monic polynomial: (quotient, remainder).
    pub fn divrem_monic(&self, m: &ZPoly) -> (ZPoly, ZPoly) {
        assert!(m.is_monic(), "divisor must be monic");
        let dm = m.coeffs.len() - 1;
        if self.coeffs.len() <= dm {
            return (ZPoly::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len() - dm];
        for i in (dm..r.len()).rev() {
            let c = std::mem::take(&mut r[i]);
            if c.is_zero() {
                continue;
            }
            for (j, mc) in m.coeffs.iter().enumerate().take(dm) {
                r[i - dm + j] -= &c * mc;
            }
            q[i - dm] = c;
        }
        r.truncate(dm);
        (ZPoly::new(q), ZPoly::new(r))
    }

    pub fn rem_monic(&self, m: &ZPoly) -> ZPoly {
        self.divrem_monic(m).1
    }

    /// Exact division by a monic divisor, if it divides.
    pub fn div_exact_monic(&self, m: &ZPoly) -> Option<ZPoly> {
        let (q, r) = self.divrem_monic(m);
        r.is_zero().then_some(q)
    }

    pub fn reduce_coeffs(&self, m: &BigInt) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|c| c.mod_floor(m)).collect())
    }

    /// Coefficients reduced into (−m/2, m/2].
    pub fn symmetric_mod(&self, m: &BigInt) -> ZPoly {
        let half: BigInt = m >> 1;
        ZPoly::new(
            self.coeffs
                .iter()
                .map(|c| {
                    let r = c.mod_floor(m);
                    if r > half {
                        r - m
                    } else {
                        r
                    }
                })
                .collect(),
        )
    }

    pub fn l2_norm_bound(&self) -> BigInt {
        let s: BigInt = self.coeffs.iter().map(|c| c * c).sum();
        crate::exactalg::arith::isqrt(&s) + BigInt::one()
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Resultant via the Sylvester determinant.
pub fn resultant(f: &ZPoly, g: &ZPoly) -> BigInt {
    if f.is_zero() || g.is_zero() {
        return BigInt::zero();
    }
    let m = f.degree() as usize;
    let n = g.degree() as usize;
    if m == 0 {
        return f.lead().pow(n as u32);
    }
    if n == 0 {
        return g.lead().pow(m as u32);
    }
    let size = m + n;
    let mut s = IntMatrix::zeros(size, size);
    for i in 0..n {
        for (j, c) in f.coeffs().iter().rev().enumerate() {
            s[(i, i + j)] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.coeffs().iter().rev().enumerate() {
            s[(n + i, i + j)] = c.clone();
        }
    }
    s.det()
}

/// disc(f) = (−1)^{n(n−1)/2}·Res(f, f')/lc(f).
pub fn discriminant(f: &ZPoly) -> BigInt {
    let n = f.degree();
    if n < 1 {
        return BigInt::zero();
    }
    let r = resultant(f, &f.derivative());
    let sign = if (n * (n - 1) / 2) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    sign * r / f.lead()
}

/// Norm of a(θ) in Q[x]/(f) for monic f: Res(f, a).
pub fn element_norm(f: &ZPoly, a: &ZPoly) -> BigInt {
    resultant(f, a)
}

/// Number of distinct real roots of a squarefree polynomial, by a Sturm sequence over Q.
pub fn count_real_roots(f: &ZPoly) -> usize {
    use num_rational::BigRational;
    type Q = Vec<BigRational>;
    fn trim(mut v: Q) -> Q {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        v
    }
    fn rem(a: &Q, b: &Q) -> Q {
        let mut r = a.clone();
        let db = b.len() - 1;
        while r.len() > db {
            let c = r.last().unwrap().clone() / b.last().unwrap();
            let shift = r.len() - 1 - db;
            for (j, bc) in b.iter().enumerate() {
                r[shift + j] -= &c * bc;
            }
            r.pop();
            r = trim(r);
        }
        r
    }
    let to_q = |p: &ZPoly| -> Q { p.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect() };
    let mut seq: Vec<Q> = vec![to_q(f), to_q(&f.derivative())];
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            break;
        }
        let r = rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    let changes = |signs: Vec<i32>| -> usize {
        let s: Vec<i32> = signs.into_iter().filter(|&x| x != 0).collect();
        s.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let sign_of = |c: &BigRational| if c.is_positive() { 1 } else if c.is_negative() { -1 } else { 0 };
    let at_pos: Vec<i32> = seq.iter().map(|p| sign_of(p.last().unwrap())).collect();
    let at_neg: Vec<i32> = seq
        .iter()
        .map(|p| {
            let s = sign_of(p.last().unwrap());
            if (p.len() - 1) % 2 == 1 {
                -s
            } else {
                s
            }
        })
        .collect();
    changes(at_neg) - changes(at_pos)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let f = ZPoly::from_i64(&[-1, -3, 0, 1]);
        let g = ZPoly::from_i64(&[1, 1]);
        let (q, r) = f.divrem_monic(&g);
        assert_eq!(q.mul(&g).add(&r), f);
        assert_eq!(f.compose(&ZPoly::from_i64(&[0, -1])), f.reflect());
        assert_eq!(f.to_string(), "x^3 - 3*x - 1");
    }

    #[test]
    fn resultants_and_discriminants() {
        // disc(x³ − 3x − 1) = 81
        assert_eq!(discriminant(&ZPoly::from_i64(&[-1, -3, 0, 1])), BigInt::from(81));
        // disc(x² − x + 6) = 1 − 24 = −23
        assert_eq!(discriminant(&ZPoly::from_i64(&[6, -1, 1])), BigInt::from(-23));
        // Res(x² + 1, x − 2) = 5
        assert_eq!(resultant(&ZPoly::from_i64(&[1, 0, 1]), &ZPoly::from_i64(&[-2, 1])), BigInt::from(5));
    }

    #[test]
    fn sturm() {
        assert_eq!(count_real_roots(&ZPoly::from_i64(&[-1, -3, 0, 1])), 3);
        assert_eq!(count_real_roots(&ZPoly::from_i64(&[1, 0, 1])), 0);
        assert_eq!(count_real_roots(&ZPoly::from_i64(&[-2, 0, 0, 1])), 1);
    }
}
