//! The Iwahori–Hecke algebra of `S_n` in its `T_w` basis.
//!
//! Defining relations: `(T_i - q)(T_i + 1) = 0` plus the braid relations. On
//! the right, `T_w T_i = T_{w r_i}` when the length goes up and
//! `q T_{w r_i} + (q - 1) T_w` otherwise.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coxeter::{r_ij, young_subgroup, Perm};
use crate::error::{Error, Result};
use crate::qlaurent::{CoeffRing, LaurentPoly};
use crate::tableaux::{Composition, Partition};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HeckeElt {
    n: usize,
    ring: CoeffRing,
    terms: BTreeMap<Perm, LaurentPoly>,
}

/// `(-q)^e` for any integer `e`.
pub fn neg_q_pow(ring: CoeffRing, e: i64) -> LaurentPoly {
    let sign = if e.rem_euclid(2) == 0 { 1 } else { -1 };
    LaurentPoly::monomial(ring, sign, e)
}

impl HeckeElt {
    pub fn zero(n: usize, ring: CoeffRing) -> Self {
        HeckeElt { n, ring, terms: BTreeMap::new() }
    }

    pub fn one(n: usize, ring: CoeffRing) -> Self {
        Self::basis(&Perm::identity(n), ring)
    }

    pub fn scalar(n: usize, c: LaurentPoly) -> Self {
        let ring = c.ring();
        let mut h = Self::zero(n, ring);
        h.add_term(Perm::identity(n), c);
        h
    }

    /// `T_w`.
    pub fn basis(w: &Perm, ring: CoeffRing) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w.clone(), LaurentPoly::one(ring));
        HeckeElt { n: w.degree(), ring, terms }
    }

    /// `T_i`.
    pub fn generator(n: usize, i: usize, ring: CoeffRing) -> Result<Self> {
        Ok(Self::basis(&Perm::simple(n, i)?, ring))
    }

    pub fn from_terms(n: usize, ring: CoeffRing, terms: impl IntoIterator<Item = (Perm, LaurentPoly)>) -> Self {
        let mut h = Self::zero(n, ring);
        for (w, c) in terms {
            assert_eq!(w.degree(), n, "degree mismatch");
            h.add_term(w, c);
        }
        h
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Perm, LaurentPoly> {
        &self.terms
    }

    pub fn coeff(&self, w: &Perm) -> LaurentPoly {
        self.terms.get(w).cloned().unwrap_or_else(|| LaurentPoly::zero(self.ring))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, w: Perm, c: LaurentPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DegreeMismatch(self.n, other.n));
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.tag(), other.ring.tag()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&LaurentPoly::constant(self.ring, -1)))
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        let mut out = Self::zero(self.n, self.ring);
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    /// `h T_i`.
    pub fn mul_gen_right(&self, i: usize) -> Result<Self> {
        if i == 0 || i >= self.n {
            return Err(Error::GeneratorOutOfRange { index: i, n: self.n });
        }
        let q = LaurentPoly::q(self.ring);
        let qm1 = &q - &LaurentPoly::one(self.ring);
        let mut out = Self::zero(self.n, self.ring);
        for (w, c) in &self.terms {
            let mut wr = w.clone();
            wr.mul_simple(i);
            if w.right_ascent(i) {
                out.add_term(wr, c.clone());
            } else {
                out.add_term(wr, c * &q);
                out.add_term(w.clone(), c * &qm1);
            }
        }
        Ok(out)
    }

    /// `T_i h`.
    pub fn mul_gen_left(&self, i: usize) -> Result<Self> {
        if i == 0 || i >= self.n {
            return Err(Error::GeneratorOutOfRange { index: i, n: self.n });
        }
        let q = LaurentPoly::q(self.ring);
        let qm1 = &q - &LaurentPoly::one(self.ring);
        let mut out = Self::zero(self.n, self.ring);
        for (w, c) in &self.terms {
            let mut rw = w.clone();
            rw.simple_mul(i);
            if w.left_ascent(i) {
                out.add_term(rw, c.clone());
            } else {
                out.add_term(rw, c * &q);
                out.add_term(w.clone(), c * &qm1);
            }
        }
        Ok(out)
    }

    /// `h T_w`, one generator at a time along a reduced word of `w`.
    pub fn mul_basis_right(&self, w: &Perm) -> Result<Self> {
        let mut out = self.clone();
        for &i in w.reduced_word().letters() {
            out = out.mul_gen_right(i)?;
        }
        Ok(out)
    }

    /// `self * other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.n, self.ring);
        for (w, c) in &other.terms {
            let part = self.mul_basis_right(w)?;
            for (v, a) in part.terms {
                out.add_term(v, a * c);
            }
        }
        Ok(out)
    }

    /// The anti-automorphism `T_w -> T_{w^-1}`.
    pub fn star(&self) -> Self {
        Self::from_terms(self.n, self.ring, self.terms.iter().map(|(w, c)| (w.inverse(), c.clone())))
    }

    /// The automorphism `T_w -> (-q)^len(w) T_{w^-1}^{-1}`.
    pub fn hash(&self) -> Self {
        let mut out = Self::zero(self.n, self.ring);
        for (w, c) in &self.terms {
            let img = invert_basis_element(&w.inverse(), self.ring).scale(&(c * &neg_q_pow(self.ring, w.length() as i64)));
            for (v, a) in img.terms {
                out.add_term(v, a);
            }
        }
        out
    }

    /// Coefficient ratio `self = c * other`, when it exists and is exact.
    pub fn ratio_to(&self, other: &Self) -> Option<LaurentPoly> {
        if self.n != other.n || self.ring != other.ring {
            return None;
        }
        if other.is_zero() {
            return self.is_zero().then(|| LaurentPoly::zero(self.ring));
        }
        let (w, b) = other.terms.iter().next().unwrap();
        let c = self.coeff(w).div_exact(b)?;
        (other.scale(&c) == *self).then_some(c)
    }
}

impl Serialize for HeckeElt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(&Perm, &LaurentPoly)> = self.terms.iter().collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HeckeElt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<(Perm, LaurentPoly)>::deserialize(d)?;
        let (n, ring) = match v.first() {
            Some((w, c)) => (w.degree(), c.ring()),
            None => return Err(serde::de::Error::custom("empty element has no degree")),
        };
        Ok(HeckeElt::from_terms(n, ring, v))
    }
}

/// `T_i^{-1} = q^{-1} T_i + (q^{-1} - 1)`.
pub fn inverse_generator(n: usize, i: usize, ring: CoeffRing) -> Result<HeckeElt> {
    let qi = LaurentPoly::monomial(ring, 1, -1);
    let t = HeckeElt::generator(n, i, ring)?.scale(&qi);
    t.add(&HeckeElt::scalar(n, &qi - &LaurentPoly::one(ring)))
}

/// `T_w^{-1}`, the product of the `T_i^{-1}` along a reversed reduced word.
pub fn invert_basis_element(w: &Perm, ring: CoeffRing) -> HeckeElt {
    let n = w.degree();
    let mut out = HeckeElt::one(n, ring);
    for &i in w.reduced_word().letters().iter().rev() {
        let inv = inverse_generator(n, i, ring).expect("letters are valid generators");
        out = out.multiply(&inv).expect("same degree and ring");
    }
    out
}

/// `x_mu = sum_{w in S_mu} T_w`.
pub fn x_mu(mu: &Composition, ring: CoeffRing) -> HeckeElt {
    HeckeElt::from_terms(mu.n(), ring, young_subgroup(mu).into_iter().map(|w| (w, LaurentPoly::one(ring))))
}

/// `y_mu = sum_{w in S_mu} (-q)^{-len(w)} T_w`.
pub fn y_mu(mu: &Composition, ring: CoeffRing) -> HeckeElt {
    HeckeElt::from_terms(
        mu.n(),
        ring,
        young_subgroup(mu).into_iter().map(|w| {
            let c = neg_q_pow(ring, -(w.length() as i64));
            (w, c)
        }),
    )
}

/// `z_lambda = x_lambda T_{w_lambda} y_{lambda'}`.
pub fn z_lambda(lambda: &Partition, ring: CoeffRing) -> HeckeElt {
    let x = x_mu(&lambda.as_composition(), ring);
    let y = y_mu(&lambda.conjugate().as_composition(), ring);
    let w = crate::coxeter::w_lambda(lambda);
    x.mul_basis_right(&w).and_then(|h| h.multiply(&y)).expect("consistent degrees")
}

/// `y'_{k+1} = 1 + sum_{j=1}^{k} (-q)^{j-k-1} T_{k,j}` in `H(S_n)`.
pub fn y_prime(k: usize, n: usize, ring: CoeffRing) -> Result<HeckeElt> {
    if k >= n {
        return Err(Error::InvalidShape(format!("y' needs k < n, got k = {k}, n = {n}")));
    }
    let mut out = HeckeElt::one(n, ring);
    for j in 1..=k {
        out.add_term(r_ij(k, j, n)?, neg_q_pow(ring, j as i64 - k as i64 - 1));
    }
    Ok(out)
}

/// `x_{n-k} = 1 + T_1 + T_{1,2} + ... + T_{1,n-k-1}`.
pub fn x_tail(k: usize, n: usize, ring: CoeffRing) -> Result<HeckeElt> {
    if k >= n {
        return Err(Error::InvalidShape(format!("x_(n-k) needs k < n, got k = {k}, n = {n}")));
    }
    let mut out = HeckeElt::zero(n, ring);
    for j in 0..n - k {
        out.add_term(r_ij(1, j, n)?, LaurentPoly::one(ring));
    }
    Ok(out)
}

/// `x_(k|n-k) = y_(k,1^{n-k}) x_(1^k,n-k)`.
pub fn x_pair(k: usize, n: usize, ring: CoeffRing) -> Result<HeckeElt> {
    if k >= n {
        return Err(Error::InvalidShape(format!("x_(k|n-k) needs k < n, got k = {k}, n = {n}")));
    }
    let mut sign = vec![k];
    sign.extend(std::iter::repeat(1).take(n - k));
    let mut triv = vec![1; k];
    triv.push(n - k);
    y_mu(&Composition::new(sign), ring).multiply(&x_mu(&Composition::new(triv), ring))
}

/// The structural elements attached to a composition `mu` and a partition
/// `lambda` (the hook pieces use `k = len(lambda) - 1`).
#[derive(Clone, Debug)]
pub struct StructuralElements {
    pub x_mu: HeckeElt,
    pub y_mu: HeckeElt,
    pub z_lambda: HeckeElt,
    pub y_prime: HeckeElt,
    pub x_tail: HeckeElt,
    pub x_pair: HeckeElt,
}

pub fn structural_elements(mu: &Composition, lambda: &Partition, ring: CoeffRing) -> Result<StructuralElements> {
    let n = lambda.n();
    if mu.n() != n {
        return Err(Error::InvalidShape(format!("{mu} and {lambda} have different sizes")));
    }
    let k = lambda.len() - 1;
    Ok(StructuralElements {
        x_mu: x_mu(mu, ring),
        y_mu: y_mu(mu, ring),
        z_lambda: z_lambda(lambda, ring),
        y_prime: y_prime(k, n, ring)?,
        x_tail: x_tail(k, n, ring)?,
        x_pair: x_pair(k, n, ring)?,
    })
}

/// Is `w` in the double coset `S_lambda w_lambda S_lambda'`? Brute force.
pub fn in_double_coset(lambda: &Partition, w: &Perm) -> bool {
    let left = young_subgroup(&lambda.as_composition());
    let right = young_subgroup(&lambda.conjugate().as_composition());
    let wl = crate::coxeter::w_lambda(lambda);
    left.iter().any(|a| right.iter().any(|b| &a.compose(&wl).compose(b) == w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::w_lambda;
    use crate::qlaurent::hook_polynomial;

    const Z: CoeffRing = CoeffRing::Integers;

    fn t(n: usize, i: usize) -> HeckeElt {
        HeckeElt::generator(n, i, Z).unwrap()
    }

    fn lp(low: i64, c: &[i64]) -> LaurentPoly {
        LaurentPoly::from_coeffs(Z, low, c)
    }

    #[test]
    fn quadratic_relation() {
        let ti = t(3, 1);
        let sq = ti.multiply(&ti).unwrap();
        let expect = ti.scale(&lp(0, &[-1, 1])).add(&HeckeElt::scalar(3, lp(1, &[1]))).unwrap();
        assert_eq!(sq, expect);
    }

    #[test]
    fn braid_and_commuting_relations() {
        for n in 2..=6 {
            for i in 1..n {
                for j in 1..n {
                    let (a, b) = (t(n, i), t(n, j));
                    if i.abs_diff(j) == 1 {
                        let l = a.multiply(&b).unwrap().multiply(&a).unwrap();
                        let r = b.multiply(&a).unwrap().multiply(&b).unwrap();
                        assert_eq!(l, r);
                    } else if i != j {
                        assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn length_increasing_products() {
        let p = t(3, 1).multiply(&t(3, 2)).unwrap();
        let r1r2 = Perm::simple(3, 1).unwrap().compose(&Perm::simple(3, 2).unwrap());
        assert_eq!(p, HeckeElt::basis(&r1r2, Z));
    }

    #[test]
    fn left_and_right_agree() {
        let x = x_mu(&Composition::new(vec![2, 2]), Z).add(&t(4, 3)).unwrap();
        for i in 1..4 {
            assert_eq!(x.mul_gen_left(i).unwrap(), t(4, i).multiply(&x).unwrap());
            assert_eq!(x.mul_gen_right(i).unwrap(), x.multiply(&t(4, i)).unwrap());
        }
    }

    #[test]
    fn inverses() {
        let inv = inverse_generator(3, 1, Z).unwrap();
        assert_eq!(inv.multiply(&t(3, 1)).unwrap(), HeckeElt::one(3, Z));
        for w in Perm::all(4) {
            let tw = HeckeElt::basis(&w, Z);
            let inv = invert_basis_element(&w, Z);
            assert_eq!(inv.multiply(&tw).unwrap(), HeckeElt::one(4, Z));
            assert_eq!(tw.multiply(&inv).unwrap(), HeckeElt::one(4, Z));
        }
    }

    #[test]
    fn inverse_leading_term() {
        for l in Partition::all(4) {
            let w = w_lambda(&l);
            let wc = w_lambda(&l.conjugate());
            let inv = invert_basis_element(&w, Z);
            assert_eq!(inv.coeff(&wc), LaurentPoly::monomial(Z, 1, -(w.length() as i64)), "{l}");
        }
    }

    #[test]
    fn involutions() {
        let ti = t(3, 2);
        let expect = HeckeElt::scalar(3, lp(0, &[-1, 1])).sub(&ti).unwrap();
        assert_eq!(ti.hash(), expect);
        let a = t(3, 1).multiply(&t(3, 2)).unwrap();
        assert_eq!(a.star(), t(3, 2).multiply(&t(3, 1)).unwrap());
        let y = y_mu(&Composition::new(vec![2, 1]), Z);
        assert_eq!(y.star(), y);
        let h = a.add(&HeckeElt::scalar(3, lp(-1, &[2, 0, 1]))).unwrap();
        assert_eq!(h.hash().hash(), h);
        assert_eq!(h.star().star(), h);
        assert_eq!(h.hash().star(), h.star().hash());
    }

    #[test]
    fn small_structural_elements() {
        let x2 = x_mu(&Composition::new(vec![2]), Z);
        assert_eq!(x2, HeckeElt::one(2, Z).add(&t(2, 1)).unwrap());
        let y2 = y_mu(&Composition::new(vec![2]), Z);
        assert_eq!(y2, HeckeElt::one(2, Z).sub(&t(2, 1).scale(&lp(-1, &[1]))).unwrap());
        for n in 1..=4 {
            let l = Partition::new(vec![n]).unwrap();
            assert_eq!(z_lambda(&l, Z), x_mu(&l.as_composition(), Z));
        }
    }

    #[test]
    fn y_prime_factorization() {
        for n in 2..=5 {
            for k in 0..n {
                let mut big = vec![k + 1];
                big.extend(std::iter::repeat(1).take(n - k - 1));
                let mut small = vec![k];
                small.extend(std::iter::repeat(1).take(n - k));
                let lhs = y_mu(&Composition::new(big), Z);
                let rhs = y_mu(&Composition::new(small), Z).multiply(&y_prime(k, n, Z).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn x_tail_factorization() {
        for n in 2..=5 {
            for k in 0..n {
                let mut mid = vec![1, n - k - 1];
                mid.extend(std::iter::repeat(1).take(k));
                let lhs = x_mu(&Partition::hook(n, k).as_composition(), Z);
                let rhs = x_mu(&Composition::new(mid), Z).multiply(&x_tail(k, n, Z).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn x_pair_expansion() {
        // sum over (u, v) of (-q)^{-len u} T_{uv}
        let (k, n) = (2, 4);
        let h = x_pair(k, n, Z).unwrap();
        let mut sign = vec![k];
        sign.extend([1, 1]);
        for (w, c) in h.terms() {
            let u_len = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).filter(|&(i, j)| w.apply(i + 1) > w.apply(j + 1)).count();
            assert_eq!(*c, neg_q_pow(Z, -(u_len as i64)));
        }
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn hash_of_x_lambda() {
        let l = Partition::new(vec![2]).unwrap();
        let x = x_mu(&l.as_composition(), Z);
        let y = y_mu(&l.as_composition(), Z);
        let a = l.conjugate().alpha() as i64;
        assert_eq!(x.hash(), y.scale(&LaurentPoly::monomial(Z, 1, a)));
    }

    #[test]
    fn sandwich_at_two() {
        // x_(2)^2 = (1 + q) x_(2)
        let l = Partition::new(vec![2]).unwrap();
        let z = z_lambda(&l, Z);
        let inv = invert_basis_element(&w_lambda(&l), Z);
        let lhs = z.multiply(&inv).unwrap().multiply(&z).unwrap();
        assert_eq!(lhs.ratio_to(&z), Some(hook_polynomial(&l, Z)));
    }

    #[test]
    fn json_roundtrip() {
        let h = y_mu(&Composition::new(vec![2, 1]), Z);
        let s = serde_json::to_string(&h).unwrap();
        assert!(s.starts_with("[[[1,2,3],"));
        let back: HeckeElt = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }
}
