//! Number field descriptions and the canonical defining polynomials of tower layers.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::factor::is_irreducible;
use super::poly::{count_real_roots, discriminant, ZPoly};
use crate::error::{Error, Result};
use crate::quadclass::QuadDiscriminant;

pub const MAX_DEGREE: usize = 18;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NumberFieldDesc {
    pub poly: ZPoly,
    pub degree: usize,
    /// (r1, r2).
    pub signature: (usize, usize),
    pub label: String,
}

impl NumberFieldDesc {
    /// Validates monicity, degree and irreducibility, and computes the signature.
    pub fn new(poly: ZPoly, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if !poly.is_monic() || poly.degree() < 1 {
            return Err(Error::invalid(format!("defining polynomial of {label} must be monic of positive degree")));
        }
        let degree = poly.degree() as usize;
        if degree > MAX_DEGREE {
            return Err(Error::TooLarge(format!("degree {degree} exceeds {MAX_DEGREE}")));
        }
        if !is_irreducible(&poly) {
            return Err(Error::validation("irreducible", format!("{poly} is reducible ({label})")));
        }
        let r1 = count_real_roots(&poly);
        Ok(NumberFieldDesc { poly, degree, signature: (r1, (degree - r1) / 2), label })
    }

    pub fn discriminant(&self) -> BigInt {
        discriminant(&self.poly)
    }

    pub fn rationals() -> Self {
        NumberFieldDesc { poly: ZPoly::from_i64(&[0, 1]), degree: 1, signature: (1, 0), label: "Q".into() }
    }
}

/// x² − x − (d − 1)/4 for d ≡ 1 mod 4, else x² − d.
pub fn base_poly(radicand: i64) -> ZPoly {
    if radicand.rem_euclid(4) == 1 {
        ZPoly::from_i64(&[-(radicand - 1) / 4, -1, 1])
    } else {
        ZPoly::from_i64(&[-radicand, 0, 1])
    }
}

/// Minimal polynomial of 2cos(2π/3^{n+1}): g₀ = x + 1, gₙ = gₙ₋₁(x³ − 3x).
pub fn cos_poly(n: u32) -> ZPoly {
    let t = ZPoly::from_i64(&[0, -3, 0, 1]);
    let mut g = ZPoly::from_i64(&[1, 1]);
    for _ in 0..n {
        g = g.compose(&t);
    }
    g
}

/// Φ_{3^m}(x) = Φ₃(x^{3^{m−1}}).
pub fn cyclotomic_poly_3power(m: u32) -> ZPoly {
    assert!(m >= 1);
    let e = 3usize.pow(m - 1);
    let mut c = vec![BigInt::zero(); 2 * e + 1];
    c[0] = 1.into();
    c[e] = 1.into();
    c[2 * e] = 1.into();
    ZPoly::new(c)
}

pub fn quadratic_label(radicand: i64) -> String {
    format!("Q(sqrt({radicand}))")
}

pub fn layer_label(radicand: i64, n: u32) -> String {
    if n == 0 {
        quadratic_label(radicand)
    } else {
        format!("{}[n={n}]", quadratic_label(radicand))
    }
}

pub fn cyclotomic_label(radicand: i64, q: u64) -> String {
    format!("{}(zeta{q})", quadratic_label(radicand))
}

/// Res_y(b(y), g(x − y)) for monic quadratic b, as N(u + v·y) with g(x − y) ≡ u + v·y mod b.
fn quadratic_compositum_resultant(b: &ZPoly, g: &ZPoly) -> ZPoly {
    let b1 = ZPoly::constant(b.coeff(1));
    let b0 = ZPoly::constant(b.coeff(0));
    let x = ZPoly::x();
    let (mut u, mut v) = (ZPoly::zero(), ZPoly::zero());
    for c in g.coeffs().iter().rev() {
        // (u + v·y)(x − y) with y² = −b1·y − b0
        let nu = u.mul(&x).add(&v.mul(&b0));
        let nv = v.mul(&x).sub(&u).add(&v.mul(&b1));
        u = nu.add(&ZPoly::constant(c.clone()));
        v = nv;
    }
    u.mul(&u).sub(&b1.mul(&u).mul(&v)).add(&b0.mul(&v).mul(&v))
}

/// Sign normalization: if the first nonzero of a_{n−1}, a_{n−3}, … is positive, pass to (−1)^n·R(−x).
/// Returns the polynomial and ε with θ = ε·(α + β).
pub fn canonical_sign(r: &ZPoly) -> (ZPoly, i32) {
    let n = r.degree();
    let mut k = n - 1;
    while k >= 0 {
        let c = r.coeff(k as usize);
        if !c.is_zero() {
            if c.is_positive() {
                let mut m = r.reflect();
                if n % 2 == 1 {
                    m = m.neg();
                }
                return (m, -1);
            }
            break;
        }
        k -= 2;
    }
    (r.clone(), 1)
}

fn compositum(base: Option<&ZPoly>, g: &ZPoly) -> Result<ZPoly> {
    let r = match base {
        None => g.clone(),
        Some(b) => quadratic_compositum_resultant(b, g),
    };
    let lead = r.lead();
    if !lead.abs().is_one() {
        return Err(Error::Internal("compositum resultant is not monic up to sign".into()));
    }
    let r = if lead.is_negative() { r.neg() } else { r };
    Ok(canonical_sign(&r).0)
}

/// The n-th layer k·Bₙ of the cyclotomic Z₃-extension of a quadratic field (or of Q).
pub fn layer_field(base: Option<&QuadDiscriminant>, n: u32) -> Result<NumberFieldDesc> {
    layer_field_bounded(base, n, 2)
}

pub fn layer_field_bounded(base: Option<&QuadDiscriminant>, n: u32, max_level: u32) -> Result<NumberFieldDesc> {
    if n > max_level {
        return Err(Error::invalid(format!("layer {n} exceeds the configured maximum {max_level}")));
    }
    let (bpoly, label) = match base {
        None => (None, if n == 0 { "Q".to_string() } else { format!("Q[n={n}]") }),
        Some(q) => {
            let r = crate::quadclass::radicand(q.d);
            (Some(base_poly(r)), layer_label(r, n))
        }
    };
    if n == 0 {
        return match bpoly {
            None => Ok(NumberFieldDesc::rationals()),
            Some(b) => NumberFieldDesc::new(b, label),
        };
    }
    let poly = compositum(bpoly.as_ref(), &cos_poly(n))?;
    NumberFieldDesc::new(poly, label).map_err(|e| match e {
        Error::Validation { .. } => Error::validation("degenerate compositum", format!("layer {n} polynomial is reducible")),
        other => other,
    })
}

/// k(ζ_{3^m}) for quadratic k.
pub fn cyclotomic_compositum(base: &QuadDiscriminant, m: u32) -> Result<NumberFieldDesc> {
    let r = crate::quadclass::radicand(base.d);
    if r == -3 {
        return Err(Error::invalid("Q(√−3) already contains μ₃"));
    }
    let poly = compositum(Some(&base_poly(r)), &cyclotomic_poly_3power(m))?;
    NumberFieldDesc::new(poly, cyclotomic_label(r, 3u64.pow(m)))
}

/// Recomputes the canonical polynomial of a label of the shapes produced by this module.
pub fn polynomial_for_label(label: &str) -> Option<ZPoly> {
    let rest = label.strip_prefix("Q(sqrt(")?;
    let close = rest.find("))")?;
    let r: i64 = rest[..close].parse().ok()?;
    let tail = &rest[close + 2..];
    crate::quadclass::fundamental_discriminant(r).ok()?;
    if tail.is_empty() {
        return Some(base_poly(r));
    }
    if let Some(n) = tail.strip_prefix("[n=").and_then(|t| t.strip_suffix(']')) {
        let n: u32 = n.parse().ok()?;
        return compositum(Some(&base_poly(r)), &cos_poly(n)).ok();
    }
    if let Some(z) = tail.strip_prefix("(zeta").and_then(|t| t.strip_suffix(')')) {
        let qq: u64 = z.parse().ok()?;
        let m = match qq {
            3 => 1,
            9 => 2,
            27 => 3,
            _ => return None,
        };
        return compositum(Some(&base_poly(r)), &cyclotomic_poly_3power(m)).ok();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadclass::fundamental_discriminant;

    #[test]
    fn base_layers() {
        let f = layer_field(None, 1).unwrap();
        assert_eq!(f.poly, ZPoly::from_i64(&[-1, -3, 0, 1]));
        assert_eq!(f.signature, (3, 0));
        assert_eq!(layer_field(None, 0).unwrap().degree, 1);
        let q = fundamental_discriminant(-239).unwrap();
        assert_eq!(layer_field(Some(&q), 0).unwrap().poly, ZPoly::from_i64(&[60, -1, 1]));
        assert!(layer_field(Some(&q), 3).is_err());
    }

    #[test]
    fn layer_one_of_minus_14() {
        let q = fundamental_discriminant(-14).unwrap();
        let f = layer_field(Some(&q), 1).unwrap();
        assert_eq!(f.degree, 6);
        assert_eq!(f.signature, (0, 3));
        assert_eq!(f.poly, ZPoly::from_i64(&[4047, 90, 597, -2, 36, 0, 1]));
        // the polynomial discriminant is index² times the field discriminant
        let d = f.discriminant();
        assert!(d.is_negative());
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly_3power(1), ZPoly::from_i64(&[1, 1, 1]));
        assert_eq!(cyclotomic_poly_3power(2).degree(), 6);
        assert_eq!(cos_poly(0), ZPoly::from_i64(&[1, 1]));
    }

    #[test]
    fn labels_round_trip() {
        assert_eq!(polynomial_for_label("Q(sqrt(-14))"), Some(base_poly(-14)));
        assert!(polynomial_for_label("Q(sqrt(-14))[n=1]").is_some());
        assert!(polynomial_for_label("Q(sqrt(717))(zeta3)").is_some());
        assert!(polynomial_for_label("garbage").is_none());
    }
}
