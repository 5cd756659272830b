//! Kronecker characters, generalized Bernoulli numbers B₂,χ and ζ_k(−1) for real quadratic k.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::arith::{is_prime_u64, valuation};
use crate::quadclass::fundamental_discriminant;

/// Kronecker symbol (D|n), including n ≤ 0.
pub fn kronecker(d: i64, n: i64) -> i8 {
    crate::exactalg::arith::kronecker(d, n)
}

/// The quadratic character χ_D = (D|·) with its value table on [0, |D|).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    d: i64,
    values: Vec<i8>,
}

impl DirichletCharacter {
    pub fn kronecker(d: i64) -> Self {
        let f = d.unsigned_abs().max(1) as i64;
        let values = (0..f).map(|a| if f == 1 { 1 } else { kronecker(d, a) }).collect();
        DirichletCharacter { d, values }
    }

    pub fn trivial() -> Self {
        DirichletCharacter { d: 1, values: vec![1] }
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    pub fn conductor(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn value(&self, a: i64) -> i8 {
        self.values[a.rem_euclid(self.values.len() as i64) as usize]
    }

    pub fn is_even(&self) -> bool {
        self.value(-1) == 1
    }
}

/// Reduced rational with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(pub BigRational);

impl ExactRational {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        Ok(ExactRational(BigRational::new(num, den)))
    }

    pub fn from_integer(n: i64) -> Self {
        ExactRational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// p-adic valuation; `None` for zero.
    pub fn valuation(&self, p: u64) -> Option<i64> {
        if self.0.is_zero() {
            return None;
        }
        Some(valuation(self.numerator(), p) as i64 - valuation(self.denominator(), p) as i64)
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let (n, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(serde::de::Error::custom)?;
        let den: BigInt = den.parse().map_err(serde::de::Error::custom)?;
        ExactRational::new(n, den).map_err(serde::de::Error::custom)
    }
}

/// B₂,χ = f·Σ_{a=1}^{f} χ(a)·B₂(a/f) with B₂(x) = x² − x + 1/6.
pub fn bernoulli_b2_chi(chi: &DirichletCharacter) -> ExactRational {
    let f = BigInt::from(chi.conductor());
    let sixth = BigRational::new(BigInt::one(), BigInt::from(6));
    let mut acc = BigRational::zero();
    for a in 1..=chi.conductor() as i64 {
        let c = chi.value(a);
        if c == 0 {
            continue;
        }
        let x = BigRational::new(BigInt::from(a), f.clone());
        let b2 = &x * &x - &x + &sixth;
        let term = b2 * BigRational::from_integer(f.clone());
        if c > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    ExactRational(acc)
}

/// B₂,χ for nontrivial χ from the expansion (1/f)·Σχ(a)a² − Σχ(a)a.
pub fn bernoulli_b2_chi_expanded(chi: &DirichletCharacter) -> ExactRational {
    let f = chi.conductor() as i64;
    if f == 1 {
        return ExactRational(BigRational::new(BigInt::one(), BigInt::from(6)));
    }
    let (mut s2, mut s1) = (BigInt::zero(), BigInt::zero());
    for a in 1..f {
        let c = BigInt::from(chi.value(a));
        s2 += &c * BigInt::from(a) * BigInt::from(a);
        s1 += &c * BigInt::from(a);
    }
    ExactRational(BigRational::new(s2, BigInt::from(f)) - BigRational::from_integer(s1))
}

/// ζ_k(−1) = ζ(−1)·L(−1, χ_D) = B₂,χ_D / 24 for k = Q(√D), D > 0.
pub fn zeta_k_minus1(d: i64) -> Result<ExactRational> {
    if d <= 0 {
        return Err(Error::Unsupported(
            "Birch–Tate order path requires totally real k".into(),
        ));
    }
    let b = bernoulli_b2_chi(&DirichletCharacter::kronecker(d));
    Ok(ExactRational(b.0 / BigRational::from_integer(BigInt::from(24))))
}

/// δ ≡ −3 mod 9 and δ ≠ −3.
pub fn in_delta_set(delta: i64) -> bool {
    delta.rem_euclid(9) == 6 && delta != -3
}

/// v₃ of #K₂(o_k){3} for k = Q(√δ), δ > 0 in the admissible set, as v₃(24·ζ_k(−1)).
pub fn k2_order_3part(delta: i64) -> Result<u32> {
    if delta <= 0 || !in_delta_set(delta) {
        return Err(Error::invalid(format!("δ = {delta} is not a positive element of the admissible set")));
    }
    let q = fundamental_discriminant(delta)?;
    let z = zeta_k_minus1(q.d)?;
    let bt = ExactRational(z.0 * BigRational::from_integer(BigInt::from(24)));
    if bt.0.is_negative() || bt.is_zero() {
        return Err(Error::validation("Birch–Tate positivity", format!("24·ζ_k(−1) = {bt} for δ = {delta}")));
    }
    if bt.denominator().is_multiple_of(&BigInt::from(3)) {
        return Err(Error::validation("Birch–Tate denominator", format!("3 divides the denominator of {bt}")));
    }
    Ok(bt.valuation(3).expect("nonzero") as u32)
}

/// Truncated Euler product for ζ_k(2) over primes ≤ bound, with a relative error bound.
pub fn zeta_k_2_euler(d: i64, bound: u64) -> (f64, f64) {
    let mut prod = 1.0f64;
    for p in 2..=bound {
        if !is_prime_u64(p) {
            continue;
        }
        let pf = p as f64;
        let q = 1.0 / (pf * pf);
        let c = kronecker(d, p as i64) as f64;
        prod /= (1.0 - q) * (1.0 - c * q);
    }
    // tail: |Σ_{p>B} ln(local factor)| ≤ 3/B
    let rel = (3.0 / bound as f64).exp_m1() + 1e-12;
    (prod, rel)
}

/// ζ_k(−1) from ζ_k(2) by the functional equation: D^{3/2}·ζ_k(2)/(4π⁴).
pub fn zeta_k_minus1_from_euler(d: i64, bound: u64) -> (f64, f64) {
    let (z2, rel) = zeta_k_2_euler(d, bound);
    let pi4 = std::f64::consts::PI.powi(4);
    let v = (d as f64).powf(1.5) * z2 / (4.0 * pi4);
    (v, v * rel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(5, 1), 1);
        assert_eq!(kronecker(8, 3), -1);
        assert_eq!(kronecker(8, 7), 1);
    }

    #[test]
    fn trivial_and_odd() {
        assert_eq!(bernoulli_b2_chi(&DirichletCharacter::trivial()).to_string(), "1/6");
        for d in [-3, -4, -7, -8, -239] {
            let chi = DirichletCharacter::kronecker(d);
            assert!(!chi.is_even());
            assert!(bernoulli_b2_chi(&chi).is_zero());
        }
    }

    #[test]
    fn two_evaluations_agree() {
        for d in [5, 8, 12, 13, 717, 168] {
            let chi = DirichletCharacter::kronecker(d);
            assert_eq!(bernoulli_b2_chi(&chi), bernoulli_b2_chi_expanded(&chi));
        }
    }

    #[test]
    fn known_zeta_values() {
        // ζ_{Q(√5)}(−1) = 1/30, ζ_{Q(√2)}(−1) = 1/12
        assert_eq!(zeta_k_minus1(5).unwrap().to_string(), "1/30");
        assert_eq!(zeta_k_minus1(8).unwrap().to_string(), "1/12");
        assert!(zeta_k_minus1(-4).is_err());
    }

    #[test]
    fn birch_tate_three_parts() {
        assert_eq!(k2_order_3part(717).unwrap(), 2);
        assert_eq!(k2_order_3part(42).unwrap(), 3);
        assert_eq!(k2_order_3part(4227).unwrap(), 3);
        assert_eq!(k2_order_3part(4974).unwrap(), 3);
        assert!(k2_order_3part(5).is_err());
    }

    #[test]
    fn euler_product_sanity() {
        let (v, err) = zeta_k_minus1_from_euler(5, 20_000);
        assert!((v - 1.0 / 30.0).abs() <= err);
    }
}
