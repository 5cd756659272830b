//! Finite abelian groups in invariant-factor form and homomorphisms between them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::arith;
use super::matrix::IntMatrix;
use super::normal_form::{hnf, integer_kernel, smith, solve_congruences};
use crate::error::{Error, Result};

/// A finite abelian group Z/d_1 ⊕ ... ⊕ Z/d_r with d_1 | d_2 | ... and every d_i ≥ 2.
///
/// Elements are coordinate vectors against the invariant-factor generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    factors: Vec<BigInt>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        FiniteAbelianGroup { factors: Vec::new() }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_invariant_factors(vec![BigInt::from(n)]).expect("cyclic group order ≥ 1")
    }

    /// Accepts a divisibility chain; entries equal to 1 are dropped.
    pub fn from_invariant_factors(factors: Vec<BigInt>) -> Result<Self> {
        let factors: Vec<BigInt> = factors.into_iter().filter(|d| !d.is_one()).collect();
        for w in factors.windows(2) {
            if !w[1].is_multiple_of(&w[0]) {
                return Err(Error::invalid(format!(
                    "invariant factors must form a divisibility chain, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if factors.iter().any(|d| d < &BigInt::from(2)) {
            return Err(Error::invalid("invariant factors must be positive"));
        }
        Ok(FiniteAbelianGroup { factors })
    }

    /// Normalizes an arbitrary list of cyclic orders (e.g. [2, 3] becomes [6]).
    pub fn from_orders(orders: &[BigInt]) -> Result<Self> {
        Ok(presentation_from_orders(orders)?.group)
    }

    pub fn from_u64(factors: &[u64]) -> Result<Self> {
        Self::from_invariant_factors(factors.iter().map(|&d| BigInt::from(d)).collect())
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().fold(BigInt::one(), |acc, d| acc * d)
    }

    pub fn exponent(&self) -> BigInt {
        self.factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of invariant factors divisible by p.
    pub fn p_rank(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.factors.iter().filter(|d| d.is_multiple_of(&p)).count()
    }

    pub fn is_p_group(&self, p: u64) -> bool {
        self.factors.iter().all(|d| arith::p_part(d, p) == *d)
    }

    pub fn is_elementary(&self, p: u64) -> bool {
        let p = BigInt::from(p);
        self.factors.iter().all(|d| *d == p)
    }

    pub fn zero_element(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.rank()]
    }

    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.rank(), "element length mismatch");
        x.iter().zip(&self.factors).map(|(a, d)| a.mod_floor(d)).collect()
    }

    pub fn is_zero_element(&self, x: &[BigInt]) -> bool {
        self.reduce(x).iter().all(|a| a.is_zero())
    }

    pub fn add(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let s: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.reduce(&s)
    }

    pub fn neg(&self, x: &[BigInt]) -> Vec<BigInt> {
        let s: Vec<BigInt> = x.iter().map(|a| -a).collect();
        self.reduce(&s)
    }

    pub fn generator(&self, i: usize) -> Vec<BigInt> {
        let mut e = self.zero_element();
        e[i] = BigInt::one();
        e
    }

    /// Order of an element.
    pub fn element_order(&self, x: &[BigInt]) -> BigInt {
        x.iter().zip(&self.factors).fold(BigInt::one(), |acc, (a, d)| {
            let o = d / a.gcd(d);
            acc.lcm(&o)
        })
    }

    /// Every element, in lexicographic coordinate order (tests and small oracles only).
    pub fn elements(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![Vec::new()];
        for d in &self.factors {
            let mut next = Vec::new();
            for prefix in &out {
                let mut k = BigInt::zero();
                while &k < d {
                    let mut v = prefix.clone();
                    v.push(k.clone());
                    next.push(v);
                    k += 1;
                }
            }
            out = next;
        }
        out
    }

    /// The p-part: invariant factors replaced by their p-power parts.
    pub fn sylow(&self, p: u64) -> Result<FiniteAbelianGroup> {
        Ok(sylow_with_maps(self, p)?.0)
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A group computed from a presentation, with coordinate maps to and from the presentation generators.
#[derive(Clone, Debug)]
pub struct PresentedGroup {
    pub group: FiniteAbelianGroup,
    /// r × n: column j gives the invariant coordinates of presentation generator j.
    pub coordinates: IntMatrix,
    /// n × r: column i gives invariant generator i in presentation coordinates.
    pub generator_basis: IntMatrix,
}

impl PresentedGroup {
    /// Invariant coordinates of a vector in presentation coordinates.
    pub fn to_invariant(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.group.reduce(&self.coordinates.mul_vec(x))
    }

    pub fn from_invariant(&self, y: &[BigInt]) -> Vec<BigInt> {
        self.generator_basis.mul_vec(y)
    }
}

/// Z^n / rowspace(relations), in invariant-factor form.
pub fn group_from_relations(n_generators: usize, relations: &IntMatrix) -> Result<PresentedGroup> {
    if n_generators == 0 {
        return Ok(PresentedGroup {
            group: FiniteAbelianGroup::trivial(),
            coordinates: IntMatrix::zeros(0, 0),
            generator_basis: IntMatrix::zeros(0, 0),
        });
    }
    if relations.cols() != n_generators && relations.rows() > 0 {
        return Err(Error::invalid("relation matrix width differs from generator count"));
    }
    if relations.rows() < n_generators {
        return Err(Error::NotFinite);
    }
    let s = smith(relations);
    let diag = s.diagonal();
    if diag.iter().any(|d| d.is_zero()) {
        return Err(Error::NotFinite);
    }
    // Row vectors x map to x·V; relations land on rowspace(D).
    let keep: Vec<usize> = (0..n_generators).filter(|&i| !diag[i].is_one()).collect();
    let factors: Vec<BigInt> = keep.iter().map(|&i| diag[i].clone()).collect();
    let group = FiniteAbelianGroup { factors };
    let mut coordinates = IntMatrix::zeros(keep.len(), n_generators);
    let mut generator_basis = IntMatrix::zeros(n_generators, keep.len());
    for (a, &i) in keep.iter().enumerate() {
        for j in 0..n_generators {
            coordinates[(a, j)] = s.v[(j, i)].mod_floor(&diag[i]);
            generator_basis[(j, a)] = s.v_inv[(i, j)].clone();
        }
    }
    Ok(PresentedGroup {
        group,
        coordinates,
        generator_basis,
    })
}

/// Normalizes a diagonal presentation Z/o_1 ⊕ ... ⊕ Z/o_n.
pub fn presentation_from_orders(orders: &[BigInt]) -> Result<PresentedGroup> {
    if orders.iter().any(|o| !o.is_positive()) {
        return Err(Error::invalid("cyclic orders must be positive"));
    }
    group_from_relations(orders.len(), &IntMatrix::diagonal(orders))
}

pub fn iso_type_equal(g: &FiniteAbelianGroup, h: &FiniteAbelianGroup) -> bool {
    g.factors == h.factors
}

pub fn direct_sum(g: &FiniteAbelianGroup, h: &FiniteAbelianGroup) -> FiniteAbelianGroup {
    let mut orders = g.factors.clone();
    orders.extend(h.factors.iter().cloned());
    FiniteAbelianGroup::from_orders(&orders).expect("orders are positive")
}

/// Homomorphism between invariant-factor groups; column j is the image of source generator j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    source: FiniteAbelianGroup,
    target: FiniteAbelianGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    /// Checks that the matrix respects orders and reduces entries modulo target orders.
    pub fn new(source: FiniteAbelianGroup, target: FiniteAbelianGroup, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::invalid(format!(
                "hom matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        let mut m = matrix;
        m.reduce_rows_mod(target.invariant_factors());
        for j in 0..source.rank() {
            let d = &source.factors[j];
            for i in 0..target.rank() {
                if !(d * &m[(i, j)]).is_multiple_of(&target.factors[i]) {
                    return Err(Error::validation(
                        "hom respects orders",
                        format!("generator {j} of order {d} maps to an element of larger order"),
                    ));
                }
            }
        }
        Ok(GroupHom {
            source,
            target,
            matrix: m,
        })
    }

    pub fn identity(g: &FiniteAbelianGroup) -> Self {
        GroupHom::new(g.clone(), g.clone(), IntMatrix::identity(g.rank())).expect("identity is a hom")
    }

    pub fn zero(source: &FiniteAbelianGroup, target: &FiniteAbelianGroup) -> Self {
        GroupHom {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.rank(), source.rank()),
        }
    }

    pub fn source(&self) -> &FiniteAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.target.reduce(&self.matrix.mul_vec(x))
    }

    /// self ∘ first
    pub fn compose(&self, first: &GroupHom) -> Result<GroupHom> {
        if first.target != self.source {
            return Err(Error::invalid("composition of non-matching homs"));
        }
        GroupHom::new(first.source.clone(), self.target.clone(), self.matrix.mul(&first.matrix))
    }

    pub fn add(&self, other: &GroupHom) -> Result<GroupHom> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::invalid("sum of homs with different domains"));
        }
        GroupHom::new(self.source.clone(), self.target.clone(), self.matrix.add(&other.matrix))
    }

    pub fn sub(&self, other: &GroupHom) -> Result<GroupHom> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::invalid("difference of homs with different domains"));
        }
        GroupHom::new(self.source.clone(), self.target.clone(), self.matrix.sub(&other.matrix))
    }

    pub fn scale(&self, k: &BigInt) -> GroupHom {
        GroupHom::new(self.source.clone(), self.target.clone(), self.matrix.scale(k)).expect("multiple of a hom")
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn kernel(&self) -> (FiniteAbelianGroup, GroupHom) {
        hom_kernel(self)
    }

    pub fn cokernel(&self) -> (FiniteAbelianGroup, GroupHom) {
        hom_cokernel(self)
    }

    pub fn image(&self) -> (FiniteAbelianGroup, GroupHom) {
        hom_image(self)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().0.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().0.is_trivial()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// A preimage of y, if y lies in the image.
    pub fn preimage(&self, y: &[BigInt]) -> Option<Vec<BigInt>> {
        let x = solve_congruences(&self.matrix, &self.target.factors, y)?;
        Some(self.source.reduce(&x))
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Result<GroupHom> {
        if !self.is_isomorphism() {
            return Err(Error::invalid("inverse of a non-isomorphism"));
        }
        let cols: Vec<Vec<BigInt>> = (0..self.target.rank())
            .map(|i| self.preimage(&self.target.generator(i)).expect("surjective"))
            .collect();
        GroupHom::new(
            self.target.clone(),
            self.source.clone(),
            IntMatrix::from_columns(self.source.rank(), &cols),
        )
    }
}

/// Subgroup of `g` corresponding to a lattice L with diag(orders)·Z^r ⊆ L ⊆ Z^r (rows of `basis_rows` generate L).
pub fn subgroup_from_lattice(g: &FiniteAbelianGroup, lattice_rows: &IntMatrix) -> (FiniteAbelianGroup, GroupHom) {
    let r = g.rank();
    if r == 0 {
        let t = FiniteAbelianGroup::trivial();
        return (t.clone(), GroupHom::zero(&t, g));
    }
    let gens = lattice_rows.vstack(&IntMatrix::diagonal(&g.factors));
    let (h, _) = hnf(&gens);
    let basis_idx: Vec<usize> = (0..h.rows()).filter(|&i| !h.row(i).iter().all(|x| x.is_zero())).collect();
    let b = h.select_rows(&basis_idx);
    debug_assert_eq!(b.rows(), r, "lattice of full rank");
    // express each order relation d_j e_j in the basis b: solve bᵀ c = d_j e_j
    let bt = b.transpose();
    let mut rel = IntMatrix::zeros(r, r);
    for j in 0..r {
        let mut v = vec![BigInt::zero(); r];
        v[j] = g.factors[j].clone();
        let c = super::normal_form::solve_integer_system(&bt, &v).expect("order relation lies in the lattice");
        for (k, x) in c.into_iter().enumerate() {
            rel[(j, k)] = x;
        }
    }
    let pg = group_from_relations(r, &rel).expect("subgroup of a finite group is finite");
    let incl = bt.mul(&pg.generator_basis);
    let hom = GroupHom::new(pg.group.clone(), g.clone(), incl).expect("inclusion respects orders");
    (pg.group, hom)
}

pub fn hom_kernel(f: &GroupHom) -> (FiniteAbelianGroup, GroupHom) {
    let s = f.source.rank();
    let t = f.target.rank();
    if s == 0 {
        return (FiniteAbelianGroup::trivial(), GroupHom::zero(&FiniteAbelianGroup::trivial(), &f.source));
    }
    // {x : M x ∈ diag(t) Z^t}: kernel of [M | diag(t)] projected to the x part
    let big = f.matrix.hstack(&IntMatrix::diagonal(&f.target.factors));
    let k = integer_kernel(&big);
    let idx: Vec<usize> = (0..s).collect();
    let proj = if k.rows() == 0 { IntMatrix::zeros(0, s) } else { k.select_cols(&idx) };
    let _ = t;
    subgroup_from_lattice(&f.source, &proj)
}

pub fn hom_cokernel(f: &GroupHom) -> (FiniteAbelianGroup, GroupHom) {
    let t = f.target.rank();
    let rel = IntMatrix::diagonal(&f.target.factors).vstack(&f.matrix.transpose());
    let pg = group_from_relations(t, &rel).expect("quotient of a finite group is finite");
    let proj = GroupHom::new(f.target.clone(), pg.group.clone(), pg.coordinates.clone()).expect("projection");
    (pg.group, proj)
}

pub fn hom_image(f: &GroupHom) -> (FiniteAbelianGroup, GroupHom) {
    subgroup_generated(&f.target, &(0..f.source.rank()).map(|j| f.matrix.column(j)).collect::<Vec<_>>())
}

/// Subgroup generated by the given elements, with its inclusion.
pub fn subgroup_generated(g: &FiniteAbelianGroup, elements: &[Vec<BigInt>]) -> (FiniteAbelianGroup, GroupHom) {
    let r = g.rank();
    let n = elements.len();
    if r == 0 || n == 0 {
        let t = FiniteAbelianGroup::trivial();
        return (t.clone(), GroupHom::zero(&t, g));
    }
    // Z^n → G, then image ≅ Z^n / kernel lattice
    let m = IntMatrix::from_columns(r, elements);
    let big = m.hstack(&IntMatrix::diagonal(&g.factors));
    let k = integer_kernel(&big);
    let idx: Vec<usize> = (0..n).collect();
    let rel = k.select_cols(&idx);
    let pg = group_from_relations(n, &rel).expect("image is finite");
    let incl = m.mul(&pg.generator_basis);
    let hom = GroupHom::new(pg.group.clone(), g.clone(), incl).expect("inclusion respects orders");
    (pg.group, hom)
}

/// Sylow p-subgroup with the canonical projection G → G_p and inclusion G_p → G.
pub fn sylow_with_maps(g: &FiniteAbelianGroup, p: u64) -> Result<(FiniteAbelianGroup, GroupHom, GroupHom)> {
    if !arith::is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let mut keep = Vec::new();
    for (i, d) in g.factors.iter().enumerate() {
        let q = arith::p_part(d, p);
        if !q.is_one() {
            keep.push((i, q));
        }
    }
    let gp = FiniteAbelianGroup {
        factors: keep.iter().map(|(_, q)| q.clone()).collect(),
    };
    let mut proj = IntMatrix::zeros(gp.rank(), g.rank());
    let mut incl = IntMatrix::zeros(g.rank(), gp.rank());
    for (a, (i, q)) in keep.iter().enumerate() {
        proj[(a, *i)] = BigInt::one();
        // the idempotent lifting 1 mod q to an element of Z/d killed by q
        let m = &g.factors[*i] / q;
        let inv = arith::mod_inverse(&m, q).expect("coprime cofactor");
        incl[(*i, a)] = (m * inv).mod_floor(&g.factors[*i]);
    }
    let proj = GroupHom::new(g.clone(), gp.clone(), proj)?;
    let incl = GroupHom::new(gp.clone(), g.clone(), incl)?;
    Ok((gp, proj, incl))
}

/// Direct sum with the two inclusions into the renormalized group.
pub fn direct_sum_with_maps(g: &FiniteAbelianGroup, h: &FiniteAbelianGroup) -> (FiniteAbelianGroup, GroupHom, GroupHom) {
    let mut orders = g.factors.clone();
    orders.extend(h.factors.iter().cloned());
    let pg = presentation_from_orders(&orders).expect("positive orders");
    let ig: Vec<usize> = (0..g.rank()).collect();
    let ih: Vec<usize> = (g.rank()..orders.len()).collect();
    let a = GroupHom::new(g.clone(), pg.group.clone(), pg.coordinates.select_cols(&ig)).expect("inclusion");
    let b = GroupHom::new(h.clone(), pg.group.clone(), pg.coordinates.select_cols(&ih)).expect("inclusion");
    (pg.group, a, b)
}

/// f ⊕ g between the renormalized direct sums of sources and of targets.
pub fn direct_sum_hom(f: &GroupHom, g: &GroupHom) -> GroupHom {
    let cat = |a: &FiniteAbelianGroup, b: &FiniteAbelianGroup| {
        let mut o = a.factors.clone();
        o.extend(b.factors.iter().cloned());
        presentation_from_orders(&o).expect("positive orders")
    };
    let src = cat(&f.source, &g.source);
    let tgt = cat(&f.target, &g.target);
    let (r1, c1) = (f.target.rank(), f.source.rank());
    let mut block = IntMatrix::zeros(r1 + g.target.rank(), c1 + g.source.rank());
    for i in 0..r1 {
        for j in 0..c1 {
            block[(i, j)] = f.matrix[(i, j)].clone();
        }
    }
    for i in 0..g.target.rank() {
        for j in 0..g.source.rank() {
            block[(r1 + i, c1 + j)] = g.matrix[(i, j)].clone();
        }
    }
    let m = tgt.coordinates.mul(&block).mul(&src.generator_basis);
    GroupHom::new(src.group, tgt.group, m).expect("block sum of homomorphisms")
}

/// Order of the image of f.
pub fn image_order(f: &GroupHom) -> BigInt {
    f.source.order() / hom_kernel(f).0.order()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(f: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::from_u64(f).unwrap()
    }

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn relations_examples() {
        let z9 = group_from_relations(1, &IntMatrix::from_rows(&[vec![9]])).unwrap();
        assert_eq!(z9.group, g(&[9]));
        let z33 = group_from_relations(2, &IntMatrix::from_rows(&[vec![3, 0], vec![0, 3]])).unwrap();
        assert_eq!(z33.group, g(&[3, 3]));
        let z12 = group_from_relations(2, &IntMatrix::from_rows(&[vec![2, 1], vec![0, 6]])).unwrap();
        assert_eq!(z12.group, g(&[12]));
        assert_eq!(
            group_from_relations(2, &IntMatrix::from_rows(&[vec![2, 0]])).unwrap_err(),
            Error::NotFinite
        );
        assert_eq!(FiniteAbelianGroup::from_orders(&[b(2), b(3)]).unwrap(), g(&[6]));
    }

    #[test]
    fn relations_oracle_by_enumeration() {
        // Z^2/<(2,1),(0,6)>: brute-force count of classes in a box and element orders
        let pg = group_from_relations(2, &IntMatrix::from_rows(&[vec![2, 1], vec![0, 6]])).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for x in 0..12 {
            for y in 0..12 {
                seen.insert(pg.to_invariant(&[b(x), b(y)]));
            }
        }
        assert_eq!(seen.len(), 12);
        assert!(pg.to_invariant(&[b(2), b(1)]).iter().all(|c| c.is_zero()));
        assert!(pg.to_invariant(&[b(0), b(6)]).iter().all(|c| c.is_zero()));
        let back = pg.from_invariant(&[b(1)]);
        assert_eq!(pg.to_invariant(&back), vec![b(1)]);
    }

    #[test]
    fn kernel_cokernel_examples() {
        let z9 = g(&[9]);
        let f = GroupHom::new(z9.clone(), z9.clone(), IntMatrix::from_rows(&[vec![3]])).unwrap();
        assert_eq!(f.kernel().0, g(&[3]));
        assert_eq!(f.cokernel().0, g(&[3]));
        let id = GroupHom::identity(&g(&[3, 9]));
        assert!(id.kernel().0.is_trivial());
        assert!(id.cokernel().0.is_trivial());
        let s = GroupHom::new(g(&[3, 3]), g(&[3]), IntMatrix::from_rows(&[vec![1, 1]])).unwrap();
        let (k, incl) = s.kernel();
        assert_eq!(k, g(&[3]));
        assert!(s.compose(&incl).unwrap().is_zero());
        assert!(s.cokernel().0.is_trivial());
    }

    #[test]
    fn hom_validation() {
        assert!(GroupHom::new(g(&[3]), g(&[9]), IntMatrix::from_rows(&[vec![1]])).is_err());
        assert!(GroupHom::new(g(&[3]), g(&[9]), IntMatrix::from_rows(&[vec![3]])).is_ok());
    }

    #[test]
    fn sylow_examples() {
        assert_eq!(g(&[12]).sylow(3).unwrap(), g(&[3]));
        assert_eq!(g(&[6, 36]).sylow(3).unwrap(), g(&[3, 9]));
        assert_eq!(g(&[12, 36]).sylow(3).unwrap(), g(&[3, 9]));
        assert!(FiniteAbelianGroup::trivial().sylow(3).unwrap().is_trivial());
        assert!(g(&[12]).sylow(4).is_err());
        let (_, proj, incl) = sylow_with_maps(&g(&[6, 18]), 3).unwrap();
        assert_eq!(proj.compose(&incl).unwrap(), GroupHom::identity(&g(&[3, 9])));
    }

    #[test]
    fn sums_and_iso_types() {
        assert!(iso_type_equal(&direct_sum(&g(&[9]), &g(&[3])), &direct_sum(&g(&[3]), &g(&[9]))));
        assert_eq!(direct_sum(&g(&[3, 3]), &g(&[3])), g(&[3, 3, 3]));
        assert!(!iso_type_equal(&g(&[3, 3, 3]), &g(&[3, 9])));
        let (s, a, bb) = direct_sum_with_maps(&g(&[2]), &g(&[3]));
        assert_eq!(s, g(&[6]));
        assert!(a.is_injective() && bb.is_injective());
    }

    #[test]
    fn image_and_inverse() {
        let f = GroupHom::new(g(&[3, 9]), g(&[3, 9]), IntMatrix::from_rows(&[vec![1, 0], vec![0, 2]])).unwrap();
        let inv = f.inverse().unwrap();
        assert_eq!(f.compose(&inv).unwrap(), GroupHom::identity(&g(&[3, 9])));
        let h = GroupHom::new(g(&[9]), g(&[9]), IntMatrix::from_rows(&[vec![3]])).unwrap();
        assert_eq!(h.image().0, g(&[3]));
        assert_eq!(image_order(&h), b(3));
    }
}
