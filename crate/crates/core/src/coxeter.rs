//! The symmetric group as a Coxeter group.
//!
//! Permutations act on the right: `i^(uv) = (i^u)^v`. In one-line notation
//! `w = [1^w, 2^w, ..., n^w]`, so `(uv)[i] = v[u[i]]`, and multiplying by
//! `r_i = (i, i+1)` on the right swaps the *values* `i` and `i + 1`. With this
//! convention `w_(2,1) = r_2 r_1 = [2, 3, 1]`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tableaux::{Composition, Partition, Tableau};

/// A permutation of `{1..n}`, stored 0-based in one-line form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        assert!(n < 256, "degree too large");
        Perm((0..n as u8).collect())
    }

    /// From 1-based one-line images.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in images {
            if x == 0 || x > n || seen[x - 1] {
                return Err(Error::Parse(format!("{images:?} is not a permutation")));
            }
            seen[x - 1] = true;
        }
        Ok(Perm(images.iter().map(|&x| (x - 1) as u8).collect()))
    }

    /// The simple reflection `r_i = (i, i+1)` in `S_n`.
    pub fn simple(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::GeneratorOutOfRange { index: i, n });
        }
        let mut p = Self::identity(n);
        p.0.swap(i - 1, i);
        Ok(p)
    }

    /// Product of simple reflections, left to right.
    pub fn from_word(n: usize, word: &[usize]) -> Result<Self> {
        let mut p = Self::identity(n);
        for &i in word {
            if i == 0 || i >= n {
                return Err(Error::GeneratorOutOfRange { index: i, n });
            }
            p.mul_simple(i);
        }
        Ok(p)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// 1-based one-line images.
    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x as usize + 1).collect()
    }

    /// `x^w` for 1-based `x`.
    pub fn apply(&self, x: usize) -> usize {
        self.0[x - 1] as usize + 1
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self * other`: first `self`, then `other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Perm(inv)
    }

    /// Position (0-based) of each value.
    fn positions(&self) -> Vec<usize> {
        self.inverse().0.iter().map(|&x| x as usize).collect()
    }

    /// Number of inversions.
    pub fn length(&self) -> usize {
        let v = &self.0;
        let mut c = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    c += 1;
                }
            }
        }
        c
    }

    /// Does `len(w r_i) > len(w)` hold? True when value `i` precedes `i + 1`.
    pub fn right_ascent(&self, i: usize) -> bool {
        let pos = |v: usize| self.0.iter().position(|&x| x as usize == v).unwrap();
        pos(i - 1) < pos(i)
    }

    /// Does `len(r_i w) > len(w)` hold?
    pub fn left_ascent(&self, i: usize) -> bool {
        self.0[i - 1] < self.0[i]
    }

    /// In place `w <- w r_i`.
    pub fn mul_simple(&mut self, i: usize) {
        for x in self.0.iter_mut() {
            if *x as usize == i - 1 {
                *x = i as u8;
            } else if *x as usize == i {
                *x = (i - 1) as u8;
            }
        }
    }

    /// In place `w <- r_i w`.
    pub fn simple_mul(&mut self, i: usize) {
        self.0.swap(i - 1, i);
    }

    /// Length and a reduced word, found by stripping the smallest right
    /// descent repeatedly.
    pub fn length_and_reduced_word(&self) -> (usize, Word) {
        let mut w = self.clone();
        let mut rev = Vec::new();
        loop {
            let pos = w.positions();
            match (1..w.degree()).find(|&i| pos[i - 1] > pos[i]) {
                Some(i) => {
                    rev.push(i);
                    w.mul_simple(i);
                }
                None => break,
            }
        }
        rev.reverse();
        (rev.len(), Word(rev))
    }

    pub fn reduced_word(&self) -> Word {
        self.length_and_reduced_word().1
    }

    /// All permutations of degree `n` in lexicographic one-line order.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (0..n as u8).collect();
        loop {
            out.push(Perm(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images())
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.images().iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.images().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Perm::from_images(&v).map_err(serde::de::Error::custom)
    }
}

/// A word in the simple reflections `r_1 .. r_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self, n: usize) -> Result<Perm> {
        Perm::from_word(n, &self.0)
    }

    pub fn is_reduced(&self, n: usize) -> bool {
        self.product(n).map(|p| p.length() == self.len()).unwrap_or(false)
    }
}

/// Elements of the Young subgroup `S_mu` (permutations preserving each block).
pub fn young_subgroup(mu: &Composition) -> Vec<Perm> {
    let n = mu.n();
    let blocks = mu.blocks();
    Perm::all(n)
        .into_iter()
        .filter(|w| {
            blocks.iter().all(|b| b.clone().all(|x| b.contains(&(w.apply(x)))))
        })
        .collect()
}

/// Minimal length right coset representatives of `S_mu`, i.e. the
/// permutations `d` with `len(r_i d) > len(d)` for every `r_i` in `S_mu`.
///
/// These are the `d(t)` of row standard `mu`-tableaux `t`; `d(t)` is the row
/// reading word of `t`, and the list is sorted lexicographically on it.
pub fn distinguished_reps(mu: &Composition) -> Vec<Perm> {
    let n = mu.n();
    let blocks = mu.blocks();
    let mut out: Vec<Perm> = Perm::all(n)
        .into_iter()
        .filter(|d| {
            blocks.iter().all(|b| {
                let (s, e) = (b.start, b.end);
                (s..e.saturating_sub(1)).all(|x| d.apply(x) < d.apply(x + 1))
            })
        })
        .collect();
    out.sort();
    out
}

/// `r_{i,j}`: `r_i r_{i+1} ... r_j` when `i <= j`, `r_i r_{i-1} ... r_j` when
/// `i > j`, and 1 when either index is zero.
pub fn r_ij(i: usize, j: usize, n: usize) -> Result<Perm> {
    if i == 0 || j == 0 {
        return Ok(Perm::identity(n));
    }
    let word: Vec<usize> = if i <= j { (i..=j).collect() } else { (j..=i).rev().collect() };
    Perm::from_word(n, &word)
}

/// The block swap sending `1..a` to `b+1..a+b` and `a+1..a+b` to `1..b`,
/// fixing everything above `a + b`.
pub fn w_ab(a: usize, b: usize, n: usize) -> Result<Perm> {
    if a + b > n {
        return Err(Error::BlockSwapTooLarge { a, b, n });
    }
    let mut img: Vec<usize> = (1..=a).map(|x| x + b).collect();
    img.extend(1..=b);
    img.extend(a + b + 1..=n);
    Perm::from_images(&img)
}

/// `w_lambda = d(t_lambda)`: carries the row-filled tableau to the
/// column-filled one.
pub fn w_lambda(lambda: &Partition) -> Perm {
    Tableau::final_tableau(lambda).d()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Perm {
        Perm::from_images(v).unwrap()
    }

    #[test]
    fn composition_convention() {
        let r1 = Perm::simple(3, 1).unwrap();
        let r2 = Perm::simple(3, 2).unwrap();
        assert_eq!(r2.compose(&r1), p(&[2, 3, 1]));
        assert_eq!(w_ab(2, 1, 3).unwrap(), p(&[2, 3, 1]));
        let mut w = r2.clone();
        w.mul_simple(1);
        assert_eq!(w, p(&[2, 3, 1]));
        let mut v = r2.clone();
        v.simple_mul(1);
        assert_eq!(v, r1.compose(&r2));
    }

    #[test]
    fn lengths_and_words() {
        let (l, w) = Perm::identity(4).length_and_reduced_word();
        assert_eq!((l, w.len()), (0, 0));
        let w0 = p(&[3, 2, 1]);
        let (l, w) = w0.length_and_reduced_word();
        assert_eq!(l, 3);
        assert!(w.0 == vec![1, 2, 1] || w.0 == vec![2, 1, 2]);
        assert_eq!(w.product(3).unwrap(), w0);
        for perm in Perm::all(5) {
            let (l, w) = perm.length_and_reduced_word();
            assert_eq!(l, perm.length());
            assert_eq!(w.product(5).unwrap(), perm);
        }
    }

    #[test]
    fn ascents_match_lengths() {
        for w in Perm::all(4) {
            for i in 1..4 {
                let mut v = w.clone();
                v.mul_simple(i);
                assert_eq!(w.right_ascent(i), v.length() > w.length());
                let mut u = w.clone();
                u.simple_mul(i);
                assert_eq!(w.left_ascent(i), u.length() > w.length());
            }
        }
    }

    #[test]
    fn distinguished_reps_small() {
        let one = Composition::new(vec![4]);
        assert_eq!(distinguished_reps(&one), vec![Perm::identity(4)]);
        let mu = Composition::new(vec![2, 1]);
        let reps = distinguished_reps(&mu);
        let r2 = Perm::simple(3, 2).unwrap();
        let r2r1 = r2.compose(&Perm::simple(3, 1).unwrap());
        assert_eq!(reps, vec![Perm::identity(3), r2, r2r1]);
        assert_eq!(distinguished_reps(&Composition::new(vec![2, 2])).len(), 6);
    }

    #[test]
    fn block_swaps() {
        assert!(w_ab(3, 0, 4).unwrap().is_identity());
        assert!(w_ab(0, 2, 4).unwrap().is_identity());
        assert!(w_ab(3, 2, 4).is_err());
        for n in 1..=7 {
            for a in 0..=n {
                for b in 0..=n - a {
                    let w = w_ab(a, b, n).unwrap();
                    assert_eq!(w.length(), a * b);
                    assert_eq!(w_ab(b, a, n).unwrap(), w.inverse());
                    if a > 0 && b > 0 {
                        let power = (0..b).fold(Perm::identity(n), |acc, _| acc.compose(&r_ij(a + b - 1, 1, n).unwrap()));
                        assert_eq!(power, w);
                    }
                }
            }
        }
    }

    #[test]
    fn w_lambda_examples() {
        assert!(w_lambda(&Partition::new(vec![4]).unwrap()).is_identity());
        assert_eq!(w_lambda(&Partition::new(vec![2, 1]).unwrap()), Perm::simple(3, 2).unwrap());
        // hooks: 1 fixed, 2..n-k -> k+2..n, n-k+1..n -> 2..k+1
        let (n, k) = (6, 2);
        let w = w_lambda(&Partition::hook(n, k));
        assert_eq!(w.images(), vec![1, 4, 5, 6, 2, 3]);
    }
}
