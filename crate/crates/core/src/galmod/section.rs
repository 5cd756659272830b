//! Splitting questions at finite level: equivariant sections, purity, Hom-group obstructions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::module::{coinvariants, induced_map, FiniteGaloisModule};
use crate::error::{Error, Result};
use crate::exactalg::{
    arith, hom_kernel, presentation_from_orders, solve_congruences, FiniteAbelianGroup, GroupHom, IntMatrix,
    PresentedGroup,
};

/// Is there s: M3 → M2 with π∘s = id commuting with every actor of `source`?
///
/// `source` carries the actions on M2 (= π's source), `target` those on M3; actors are matched by name.
pub fn equivariant_section_exists(
    pi: &GroupHom,
    source: &FiniteGaloisModule,
    target: &FiniteGaloisModule,
) -> Result<(bool, Option<GroupHom>)> {
    if pi.source() != source.group() || pi.target() != target.group() {
        return Err(Error::invalid("modules do not match the map"));
    }
    if !pi.is_surjective() {
        return Err(Error::invalid("π is not surjective"));
    }
    if !source.is_equivariant(pi, target)? {
        return Err(Error::invalid("π is not equivariant"));
    }
    let d2 = source.group().invariant_factors().to_vec();
    let e3 = target.group().invariant_factors().to_vec();
    let (r2, r3) = (d2.len(), e3.len());
    if r3 == 0 {
        return Ok((true, Some(GroupHom::zero(target.group(), source.group()))));
    }
    // S[i][j] = c_ij · t_ij keeps e_j · S[:, j] ≡ 0 automatically
    let c: Vec<Vec<BigInt>> = (0..r2)
        .map(|i| (0..r3).map(|j| &d2[i] / d2[i].gcd(&e3[j])).collect())
        .collect();
    let var = |i: usize, j: usize| i * r3 + j;
    let nvars = r2 * r3;
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut moduli = Vec::new();
    let mut rhs = Vec::new();

    let pm = pi.matrix();
    for k in 0..r3 {
        for j in 0..r3 {
            let mut row = vec![BigInt::zero(); nvars];
            for i in 0..r2 {
                row[var(i, j)] += &pm[(k, i)] * &c[i][j];
            }
            rows.push(row);
            moduli.push(e3[k].clone());
            rhs.push(if k == j { BigInt::one() } else { BigInt::zero() });
        }
    }
    for name in source.actor_names() {
        let Some(g3) = target.actor(&name) else { continue };
        let g2 = source.actor(&name).expect("listed actor");
        // (S g3 − g2 S)[i][j] ≡ 0 mod d2_i
        for i in 0..r2 {
            for j in 0..r3 {
                let mut row = vec![BigInt::zero(); nvars];
                for l in 0..r3 {
                    row[var(i, l)] += &c[i][l] * &g3[(l, j)];
                }
                for l in 0..r2 {
                    row[var(l, j)] -= &g2[(i, l)] * &c[l][j];
                }
                rows.push(row);
                moduli.push(d2[i].clone());
                rhs.push(BigInt::zero());
            }
        }
    }
    let a = IntMatrix::from_big_rows(&rows, nvars);
    let Some(t) = solve_congruences(&a, &moduli, &rhs) else {
        return Ok((false, None));
    };
    let mut s = IntMatrix::zeros(r2, r3);
    for i in 0..r2 {
        for j in 0..r3 {
            s[(i, j)] = &c[i][j] * &t[var(i, j)];
        }
    }
    let sec = GroupHom::new(target.group().clone(), source.group().clone(), s)?;
    if pi.compose(&sec)? != GroupHom::identity(target.group()) || !target.is_equivariant(&sec, source)? {
        return Err(Error::Internal("section solver produced an invalid witness".into()));
    }
    Ok((true, Some(sec)))
}

/// The map H/q → G/q induced by a hom H → G, on normalized groups.
fn induced_mod(f: &GroupHom, q: &BigInt) -> Result<GroupHom> {
    let so: Vec<BigInt> = f.source().invariant_factors().iter().map(|d| d.gcd(q)).collect();
    let to: Vec<BigInt> = f.target().invariant_factors().iter().map(|d| d.gcd(q)).collect();
    let ps = presentation_from_orders(&so)?;
    let pt = presentation_from_orders(&to)?;
    let m = pt.coordinates.mul(f.matrix()).mul(&ps.generator_basis);
    GroupHom::new(ps.group, pt.group, m)
}

/// For an injective H → G: H is pure (equivalently a direct summand) iff H/p^m → G/p^m is injective
/// for every prime power p^m dividing the exponent of G.
pub fn purity_split_check(incl: &GroupHom) -> Result<bool> {
    if !incl.is_injective() {
        return Err(Error::invalid("inclusion is not injective"));
    }
    let exp = incl.target().exponent();
    let Some(e) = num_traits::ToPrimitive::to_u64(&exp) else {
        return Err(Error::Unsupported("exponent beyond 64 bits".into()));
    };
    for (p, v) in arith::factor_u64(e) {
        for m in 1..=v {
            let q = arith::pow_u64(p, m);
            if !induced_mod(incl, &q)?.is_injective() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Hom(A, B) presented by coordinates t_ij ∈ Z/gcd(a_j, b_i), the hom sending generator j to
/// Σ_i (b_i / gcd(a_j, b_i))·t_ij·e_i.
struct HomGroup {
    a: Vec<BigInt>,
    b: Vec<BigInt>,
    pres: PresentedGroup,
}

impl HomGroup {
    fn new(a: &FiniteAbelianGroup, b: &FiniteAbelianGroup) -> Result<Self> {
        let a = a.invariant_factors().to_vec();
        let b = b.invariant_factors().to_vec();
        let mut orders = Vec::new();
        for bi in &b {
            for aj in &a {
                orders.push(aj.gcd(bi));
            }
        }
        let pres = presentation_from_orders(&orders)?;
        Ok(HomGroup { a, b, pres })
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.a.len() + j
    }

    fn scale(&self, i: usize, j: usize) -> BigInt {
        &self.b[i] / self.a[j].gcd(&self.b[i])
    }

    /// Hom matrix of the basis element (i, j).
    fn basis_matrix(&self, i: usize, j: usize) -> IntMatrix {
        let mut f = IntMatrix::zeros(self.b.len(), self.a.len());
        f[(i, j)] = self.scale(i, j);
        f
    }

    /// Diagonal coordinates of a hom matrix.
    fn coords(&self, f: &IntMatrix) -> Vec<BigInt> {
        let mut t = vec![BigInt::zero(); self.a.len() * self.b.len()];
        for i in 0..self.b.len() {
            for j in 0..self.a.len() {
                let v = f[(i, j)].mod_floor(&self.b[i]);
                t[self.idx(i, j)] = v / self.scale(i, j);
            }
        }
        t
    }

    /// Matrix (in invariant coordinates) of the linear map f ↦ op(f).
    fn linear_map(&self, other: &HomGroup, op: impl Fn(&IntMatrix) -> IntMatrix) -> Result<GroupHom> {
        let n = self.a.len() * self.b.len();
        let mut cols = Vec::new();
        for i in 0..self.b.len() {
            for j in 0..self.a.len() {
                cols.push(other.coords(&op(&self.basis_matrix(i, j))));
            }
        }
        let diag = IntMatrix::from_columns(other.a.len() * other.b.len(), &cols);
        debug_assert_eq!(diag.cols(), n);
        let m = other.pres.coordinates.mul(&diag).mul(&self.pres.generator_basis);
        GroupHom::new(self.pres.group.clone(), other.pres.group.clone(), m)
    }
}

/// Obstruction to equivariant splitting of 0 → M1 → M2 → M3 → 0 under a single actor γ:
/// the kernel of Hom(M3, M1)_Γ → Hom(M3, M2)_Γ for the conjugation action (γf)(m) = γ f(γ⁻¹m).
pub fn lemma_pavia_obstruction(
    iota: &GroupHom,
    pi: &GroupHom,
    m1: &FiniteGaloisModule,
    m2: &FiniteGaloisModule,
    m3: &FiniteGaloisModule,
    actor: &str,
) -> Result<FiniteAbelianGroup> {
    if iota.source() != m1.group() || iota.target() != m2.group() || pi.source() != m2.group() || pi.target() != m3.group()
    {
        return Err(Error::invalid("modules do not match the maps"));
    }
    if !pi.compose(iota)?.is_zero() || !iota.is_injective() || !pi.is_surjective() {
        return Err(Error::invalid("sequence is not exact"));
    }
    if m1.group().order() * m3.group().order() != m2.group().order() {
        return Err(Error::invalid("sequence is not exact in the middle"));
    }
    if !m1.is_equivariant(iota, m2)? || !m2.is_equivariant(pi, m3)? {
        return Err(Error::invalid("maps are not equivariant"));
    }
    if !purity_split_check(iota)? {
        return Err(Error::invalid("sequence does not split as abelian groups"));
    }
    if m3.group().is_trivial() {
        return Ok(FiniteAbelianGroup::trivial());
    }
    let g1 = m1.actor_hom(actor)?;
    let g2 = m2.actor_hom(actor)?;
    let g3inv = m3.actor_hom(actor)?.inverse()?;

    let h31 = HomGroup::new(m3.group(), m1.group())?;
    let h32 = HomGroup::new(m3.group(), m2.group())?;
    let conj1 = h31.linear_map(&h31, |f| g1.matrix().mul(f).mul(g3inv.matrix()))?;
    let conj2 = h32.linear_map(&h32, |f| g2.matrix().mul(f).mul(g3inv.matrix()))?;
    let push = h31.linear_map(&h32, |f| iota.matrix().mul(f))?;

    let hm1 = FiniteGaloisModule::new(h31.pres.group.clone(), vec![(actor.to_string(), conj1.matrix().clone())], None)?;
    let hm2 = FiniteGaloisModule::new(h32.pres.group.clone(), vec![(actor.to_string(), conj2.matrix().clone())], None)?;
    let (_, p1) = coinvariants(&hm1, &[actor])?;
    let (_, p2) = coinvariants(&hm2, &[actor])?;
    let induced = induced_map(&push, &p1, &p2)?;
    Ok(hom_kernel(&induced).0)
}
