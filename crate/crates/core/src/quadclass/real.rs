//! Fundamental units and analytic class numbers of real quadratic fields.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::arith::{isqrt_u128, kronecker};

/// ε = (x + y√D)/2 with x, y > 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalUnit {
    pub x: BigInt,
    pub y: BigInt,
    /// N(ε) ∈ {−1, +1}.
    pub norm: i8,
}

impl FundamentalUnit {
    /// Natural log of ε, accurate to a few ulps.
    pub fn ln(&self) -> f64 {
        if self.x.bits() <= 50 {
            let x = self.x.to_f64().expect("small");
            let n = self.norm as f64;
            ((x + (x * x - 4.0 * n).sqrt()) / 2.0).ln()
        } else {
            // ε = x − ε̄ with |ε̄| < 2^-49
            big_ln(&self.x)
        }
    }
}

pub(crate) fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift as usize;
    top.to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Fundamental unit of the order of discriminant D > 0 by the continued fraction of ω.
pub fn fundamental_unit(d: i64) -> Result<FundamentalUnit> {
    if d <= 1 {
        return Err(Error::invalid("fundamental unit needs D > 1"));
    }
    let d128 = d as i128;
    let one_mod_four = d.rem_euclid(4) == 1;
    if !one_mod_four && d % 4 != 0 {
        return Err(Error::invalid(format!("{d} is not a discriminant")));
    }
    // ω = (P + √N)/Q
    let (n, mut pp, mut qq): (i128, i128, i128) = if one_mod_four { (d128, 1, 2) } else { (d128 / 4, 0, 1) };
    let s = isqrt_u128(n as u128) as i128;
    if s * s == n {
        return Err(Error::invalid("square discriminant"));
    }
    let (mut p_prev, mut p_cur) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q_cur) = (BigInt::one(), BigInt::zero());
    let c = BigInt::from((1 - d128) / 4);
    for _ in 0..10_000_000u64 {
        let a = if qq > 0 { (pp + s).div_euclid(qq) } else { -((pp + s).div_euclid(-qq) + 1) };
        let p_next = BigInt::from(a) * &p_cur + &p_prev;
        let q_next = BigInt::from(a) * &q_cur + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        let (p, q) = (&p_cur, &q_cur);
        let norm = if one_mod_four {
            // N(p − qω̄) = p² − pq + q²(1 − D)/4
            p * p - p * q + q * q * &c
        } else {
            p * p - BigInt::from(n) * q * q
        };
        if norm.abs().is_one() {
            let (x, y) = if one_mod_four { (BigInt::from(2) * p - q, q.clone()) } else { (BigInt::from(2) * p, q.clone()) };
            if x.is_positive() && y.is_positive() {
                let norm = if norm.is_positive() { 1 } else { -1 };
                return Ok(FundamentalUnit { x, y, norm });
            }
        }
        pp = a * qq - pp;
        qq = (n - pp * pp) / qq;
    }
    Err(Error::Internal(format!("continued fraction for D = {d} did not reach a unit")))
}

/// Estimate of a quantity with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounded {
    pub value: f64,
    pub error: f64,
}

/// Σ_{a=1}^{D−1} χ_D(a)·ln sin(πa/D) with a rigorous floating-point error bound.
pub fn sine_sum(d: i64) -> Bounded {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let df = d as f64;
    // even character: fold a and D − a
    for a in 1..=(d - 1) / 2 {
        let chi = kronecker(d, a);
        if chi == 0 {
            continue;
        }
        let t = 2.0 * chi as f64 * (std::f64::consts::PI * a as f64 / df).sin().ln();
        // Neumaier summation
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    let value = sum + comp;
    let eps = f64::EPSILON;
    let error = df * (df.ln() + 2.0) * 8.0 * eps + value.abs() * 4.0 * eps;
    Bounded { value, error }
}

/// Wide class number of Q(√D) for fundamental D > 0 from h·ln ε = −½·Σ χ(a) ln sin(πa/D).
pub fn analytic_class_number(d: i64, unit: &FundamentalUnit) -> Result<u64> {
    let s = sine_sum(d);
    let ln_eps = unit.ln();
    let h = -s.value / (2.0 * ln_eps);
    let err = (s.error + h.abs() * 2.0 * ln_eps * 8.0 * f64::EPSILON) / (2.0 * ln_eps);
    let rounded = h.round();
    if (h - rounded).abs() + err >= 0.5 || rounded < 1.0 {
        return Err(Error::RaisePrecision(format!(
            "class number estimate {h} ± {err} does not isolate an integer for D = {d}"
        )));
    }
    Ok(rounded as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(d: i64) -> (i64, i64, i8) {
        let u = fundamental_unit(d).unwrap();
        (u.x.try_into().unwrap(), u.y.try_into().unwrap(), u.norm)
    }

    #[test]
    fn small_units() {
        assert_eq!(unit(5), (1, 1, -1));
        assert_eq!(unit(8), (2, 1, -1));
        assert_eq!(unit(12), (4, 1, 1));
        assert_eq!(unit(13), (3, 1, -1));
        assert_eq!(unit(21), (5, 1, 1));
        // ε = 170 + 39√19
        assert_eq!(unit(76), (340, 39, 1));
    }

    #[test]
    fn unit_against_brute_force() {
        for d in [5i64, 8, 12, 13, 17, 21, 24, 28, 29, 33, 37, 40, 41, 44, 53, 56, 57, 60, 61, 65] {
            let (x, y, n) = unit(d);
            assert_eq!(x * x - d * y * y, 4 * n as i64, "D = {d}");
            // no smaller y gives a unit
            for yy in 1..y {
                for nn in [-4i64, 4] {
                    let x2 = d * yy * yy + nn;
                    if x2 > 0 {
                        let r = (x2 as f64).sqrt().round() as i64;
                        assert_ne!(r * r, x2, "D = {d} has smaller unit at y = {yy}");
                    }
                }
            }
        }
    }

    #[test]
    fn class_numbers() {
        for (d, h) in [(5, 1), (8, 1), (12, 1), (40, 2), (60, 2), (65, 2), (229, 3), (257, 3), (316, 3)] {
            let u = fundamental_unit(d).unwrap();
            assert_eq!(analytic_class_number(d, &u).unwrap(), h, "D = {d}");
        }
    }
}
