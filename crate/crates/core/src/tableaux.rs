//! Partitions, compositions, tableaux and pair tableaux.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coxeter::Perm;
use crate::error::{Error, Result};

fn parse_parts(s: &str) -> Result<Vec<usize>> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    if s.is_empty() {
        return Err(Error::InvalidShape("empty".into()));
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::InvalidShape(s.to_string())))
        .collect()
}

fn join_parts(parts: &[usize]) -> String {
    parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

/// A finite sequence of non-negative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Self {
        Composition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// 1-based value ranges of the blocks `{1..mu_1}, {mu_1+1..mu_1+mu_2}, ...`.
    pub fn blocks(&self) -> Vec<Range<usize>> {
        let mut start = 1;
        self.parts
            .iter()
            .map(|&p| {
                let r = start..start + p;
                start += p;
                r
            })
            .collect()
    }

    /// The block (0-based row) containing 1-based position `x`.
    pub fn block_of(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.n());
        for (r, &p) in self.parts.iter().enumerate() {
            out.extend(std::iter::repeat(r as u8).take(p));
        }
        out
    }
}

impl FromStr for Composition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(Composition::new(parse_parts(s)?))
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_parts(&self.parts))
    }
}

/// A partition: weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Trailing zeros are dropped; anything else out of order is an error.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.is_empty() {
            return Err(Error::InvalidShape("empty partition".into()));
        }
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidShape(join_parts(&parts)));
        }
        Ok(Partition { parts })
    }

    /// The hook `(n-k, 1^k)`.
    pub fn hook(n: usize, k: usize) -> Self {
        assert!(k < n, "hook needs 0 <= k < n");
        let mut parts = vec![n - k];
        parts.extend(std::iter::repeat(1).take(k));
        Partition { parts }
    }

    /// All partitions of `n`, in reverse lexicographic order (starting at `(n)`).
    pub fn all(n: usize) -> Vec<Partition> {
        fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=rem.min(max)).rev() {
                cur.push(p);
                rec(rem - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, n, &mut Vec::new(), &mut out);
        }
        out
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn as_composition(&self) -> Composition {
        Composition::new(self.parts.clone())
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.parts[0];
        let parts = (1..=cols).map(|j| self.parts.iter().filter(|&&p| p >= j).count()).collect();
        Partition { parts }
    }

    /// `Some(k)` when this is the hook `(n-k, 1^k)`.
    pub fn hook_k(&self) -> Option<usize> {
        self.parts[1..].iter().all(|&p| p == 1).then(|| self.parts.len() - 1)
    }

    /// Hook lengths keyed by 1-based `(row, column)`.
    pub fn hook_lengths(&self) -> BTreeMap<(usize, usize), usize> {
        let conj = self.conjugate();
        let mut out = BTreeMap::new();
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                out.insert((i + 1, j + 1), (row - j - 1) + (conj.parts[j] - i - 1) + 1);
            }
        }
        out
    }

    /// `alpha(lambda) = sum (i-1) lambda_i`.
    pub fn alpha(&self) -> usize {
        self.parts.iter().enumerate().map(|(i, &p)| i * p).sum()
    }

    /// Number of standard tableaux, by the hook length formula.
    pub fn num_standard(&self) -> u128 {
        let num: u128 = (1..=self.n() as u128).product();
        let den: u128 = self.hook_lengths().values().map(|&h| h as u128).product();
        num / den
    }
}

impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Partition::new(parse_parts(s)?)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_parts(&self.parts))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `alpha(lambda)`.
pub fn alpha(lambda: &Partition) -> usize {
    lambda.alpha()
}

pub fn conjugate(lambda: &Partition) -> Partition {
    lambda.conjugate()
}

pub fn hook_lengths(lambda: &Partition) -> BTreeMap<(usize, usize), usize> {
    lambda.hook_lengths()
}

/// A filling of a Young diagram by `1..n`, stored row by row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct Tableau {
    rows: Vec<Vec<usize>>,
}

impl TryFrom<Vec<Vec<usize>>> for Tableau {
    type Error = Error;
    fn try_from(rows: Vec<Vec<usize>>) -> Result<Self> {
        Tableau::from_rows(rows)
    }
}

impl From<Tableau> for Vec<Vec<usize>> {
    fn from(t: Tableau) -> Self {
        t.rows
    }
}

impl Tableau {
    /// Rows must have partition shape and contain `1..n` once each.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self> {
        Partition::new(rows.iter().map(|r| r.len()).collect())?;
        let n: usize = rows.iter().map(|r| r.len()).sum();
        let mut seen = vec![false; n + 1];
        for &x in rows.iter().flatten() {
            if x == 0 || x > n || seen[x] {
                return Err(Error::InvalidShape(format!("{rows:?} is not a filling by 1..{n}")));
            }
            seen[x] = true;
        }
        Ok(Tableau { rows })
    }

    /// `t^lambda`: `1..n` entered along the rows.
    pub fn initial_tableau(lambda: &Partition) -> Self {
        let mut next = 1;
        let rows = lambda
            .parts()
            .iter()
            .map(|&p| {
                let r: Vec<usize> = (next..next + p).collect();
                next += p;
                r
            })
            .collect();
        Tableau { rows }
    }

    /// `t_lambda`: `1..n` entered down the columns.
    pub fn final_tableau(lambda: &Partition) -> Self {
        Tableau::initial_tableau(&lambda.conjugate()).transpose()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn shape(&self) -> Partition {
        Partition { parts: self.rows.iter().map(|r| r.len()).collect() }
    }

    pub fn n(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn first_column(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    /// 0-based row containing each value `1..n` (index 0 unused).
    pub fn row_of(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.n() + 1];
        for (i, r) in self.rows.iter().enumerate() {
            for &x in r {
                out[x] = i;
            }
        }
        out
    }

    pub fn is_row_standard(&self) -> bool {
        self.rows.iter().all(|r| r.windows(2).all(|w| w[0] < w[1]))
    }

    pub fn is_standard(&self) -> bool {
        self.is_row_standard() && self.transpose().is_row_standard()
    }

    /// The conjugate tableau `t'`.
    pub fn transpose(&self) -> Self {
        let cols = self.rows[0].len();
        let rows = (0..cols)
            .map(|j| self.rows.iter().take_while(|r| r.len() > j).map(|r| r[j]).collect())
            .collect();
        Tableau { rows }
    }

    /// Row reading word.
    pub fn reading_word(&self) -> Vec<usize> {
        self.rows.iter().flatten().copied().collect()
    }

    /// `d(t)`, the permutation with `t = t^lambda d(t)`; its one-line form is
    /// the row reading word of `t`.
    pub fn d(&self) -> Perm {
        Perm::from_images(&self.reading_word()).expect("tableau is a bijection")
    }

    /// `t w`: every entry `x` replaced by `x^w`.
    pub fn act(&self, w: &Perm) -> Self {
        Tableau { rows: self.rows.iter().map(|r| r.iter().map(|&x| w.apply(x)).collect()).collect() }
    }

    /// `t (a, b)`: entries `a` and `b` exchanged.
    pub fn swap_entries(&self, a: usize, b: usize) -> Self {
        let f = |x: usize| if x == a { b } else if x == b { a } else { x };
        Tableau { rows: self.rows.iter().map(|r| r.iter().map(|&x| f(x)).collect()).collect() }
    }

    /// Does `n` lie in the first row?
    pub fn n_in_first_row(&self) -> bool {
        self.rows[0].contains(&self.n())
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows.iter().map(|r| join_parts(r)).collect();
        write!(f, "[{}]", rows.join("|"))
    }
}

fn all_standard(lambda: &Partition) -> Vec<Tableau> {
    // place n, n-1, ... at removable corners
    fn rec(shape: &mut Vec<usize>, k: usize, rows: &mut Vec<Vec<usize>>, out: &mut Vec<Tableau>) {
        if k == 0 {
            let t: Vec<Vec<usize>> = rows.iter().map(|r| r.iter().rev().copied().collect()).collect();
            out.push(Tableau { rows: t });
            return;
        }
        for i in 0..shape.len() {
            let removable = shape[i] > 0 && (i + 1 == shape.len() || shape[i + 1] < shape[i]);
            if removable {
                shape[i] -= 1;
                rows[i].push(k);
                rec(shape, k - 1, rows, out);
                rows[i].pop();
                shape[i] += 1;
            }
        }
    }
    let mut shape = lambda.parts().to_vec();
    let mut rows = vec![Vec::new(); shape.len()];
    let mut out = Vec::new();
    rec(&mut shape, lambda.n(), &mut rows, &mut out);
    out
}

/// `Std(lambda)` in the fixed basis order.
///
/// Hooks: tableaux with `n` in the first row come first; within each group
/// the order is lexicographic in the first column. Other shapes:
/// lexicographic in the row reading word, i.e. in `d(t)`.
pub fn standard_tableaux(lambda: &Partition) -> Vec<Tableau> {
    let mut ts = all_standard(lambda);
    if lambda.hook_k().is_some() {
        ts.sort_by_key(|t| (!t.n_in_first_row(), t.first_column()));
    } else {
        ts.sort_by_key(|t| t.reading_word());
    }
    ts
}

pub fn d_of_tableau(t: &Tableau) -> Perm {
    t.d()
}

/// An ordered pair `(a|b)` of disjoint sets with union `{1..n}`, `|a| = k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairTableau {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

impl PairTableau {
    pub fn new(first: Vec<usize>, second: Vec<usize>) -> Result<Self> {
        let n = first.len() + second.len();
        let mut seen = vec![false; n + 1];
        for &x in first.iter().chain(&second) {
            if x == 0 || x > n || seen[x] {
                return Err(Error::InvalidShape(format!("({first:?}|{second:?})")));
            }
            seen[x] = true;
        }
        Ok(PairTableau { first, second })
    }

    /// The standard pair with the given first component.
    pub fn from_first(n: usize, first: &[usize]) -> Self {
        let mut a = first.to_vec();
        a.sort_unstable();
        let b = (1..=n).filter(|x| !a.contains(x)).collect();
        PairTableau { first: a, second: b }
    }

    /// `t^(k|n-k) = (1..k | k+1..n)`.
    pub fn initial(k: usize, n: usize) -> Self {
        PairTableau { first: (1..=k).collect(), second: (k + 1..=n).collect() }
    }

    pub fn k(&self) -> usize {
        self.first.len()
    }

    pub fn n(&self) -> usize {
        self.first.len() + self.second.len()
    }

    pub fn is_standard(&self) -> bool {
        self.first.windows(2).all(|w| w[0] < w[1]) && self.second.windows(2).all(|w| w[0] < w[1])
    }

    /// `d(a|b)` with `(a|b) = t^(k|n-k) d(a|b)`.
    pub fn d(&self) -> Perm {
        let img: Vec<usize> = self.first.iter().chain(&self.second).copied().collect();
        Perm::from_images(&img).expect("pair tableau is a bijection")
    }

    /// `#{(i, j) : i in a, j in b, i > j}`.
    pub fn length(&self) -> usize {
        self.first.iter().map(|&i| self.second.iter().filter(|&&j| i > j).count()).sum()
    }
}

impl fmt::Display for PairTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: String = self.first.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let b: String = self.second.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "({a}|{b})")
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            if n - x + 1 < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// All standard `(k|n-k)`-tableaux with `d(a|b)` and its length, ordered
/// lexicographically by the first component.
pub fn pair_standard_tableaux(k: usize, n: usize) -> Vec<(PairTableau, Perm, usize)> {
    k_subsets(n, k)
        .into_iter()
        .map(|a| {
            let t = PairTableau::from_first(n, &a);
            let d = t.d();
            let l = t.length();
            (t, d, l)
        })
        .collect()
}

/// Relation of a pair tableau to a hook tableau `t` of shape `(n-k, 1^k)`
/// (which need not be standard).
///
/// Returns `Some((I, n_flag))` when every entry of `a` lies in the first
/// column of `t`; `I` is the row of the one first-column entry missing from
/// `a`, and `n_flag` says whether additionally `n` lies in `b`.
pub fn precedes_and_index(ab: &PairTableau, t: &Tableau) -> Option<(usize, bool)> {
    let col = t.first_column();
    if ab.first.len() + 1 != col.len() || !ab.first.iter().all(|x| col.contains(x)) {
        return None;
    }
    let i = col.iter().position(|x| !ab.first.contains(x)).unwrap() + 1;
    Some((i, ab.second.contains(&ab.n())))
}

/// Pair tableaux attached to a hook `lambda = (n-k, 1^k)` and a tableau `t`:
/// `(a+|b+)` with `a+ = {n-k+1..n}`, the tableau `t* = t(1,n)`, and the
/// unique standard `(a*|b*)` with `(a*|b*)` preceding `t*` and `n` in `b*`
/// (`None` if there is no such pair or it is not unique).
pub fn distinguished_pairs(lambda: &Partition, t: &Tableau) -> Result<(PairTableau, Tableau, Option<PairTableau>)> {
    let k = lambda.hook_k().ok_or_else(|| Error::NotAHook(lambda.to_string()))?;
    let n = lambda.n();
    let plus = PairTableau::from_first(n, &((n - k + 1)..=n).collect::<Vec<_>>());
    let star = t.swap_entries(1, n);
    let cands: Vec<PairTableau> = pair_standard_tableaux(k, n)
        .into_iter()
        .map(|(p, _, _)| p)
        .filter(|p| matches!(precedes_and_index(p, &star), Some((_, true))))
        .collect();
    let unique = (cands.len() == 1).then(|| cands[0].clone());
    Ok((plus, star, unique))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn conjugates() {
        assert_eq!(part("4").conjugate(), part("1,1,1,1"));
        assert_eq!(part("4,3,2").conjugate(), part("3,3,2,1"));
        for n in 1..=8 {
            for l in Partition::all(n) {
                assert_eq!(l.conjugate().conjugate(), l);
            }
        }
    }

    #[test]
    fn parsing() {
        assert_eq!(part("3,3,2").parts(), &[3, 3, 2]);
        assert_eq!(part("(2,1)").to_string(), "2,1");
        assert!("2,3".parse::<Partition>().is_err());
        assert!("".parse::<Partition>().is_err());
        assert!("a,1".parse::<Partition>().is_err());
        assert_eq!(Partition::all(5).len(), 7);
        assert_eq!(Partition::all(9).len(), 30);
    }

    #[test]
    fn hooks_and_alpha() {
        let h: Vec<usize> = part("1").hook_lengths().values().copied().collect();
        assert_eq!(h, vec![1]);
        let h: Vec<usize> = part("3,2").hook_lengths().values().copied().collect();
        assert_eq!(h, vec![4, 3, 1, 2, 1]);
        let h: Vec<usize> = part("2,2").hook_lengths().values().copied().collect();
        assert_eq!(h, vec![3, 2, 2, 1]);
        assert_eq!(part("5").alpha(), 0);
        assert_eq!(part("4,3,2").alpha(), 7);
        assert_eq!(part("1,1,1,1,1").alpha(), 10);
        for n in 1..=8 {
            for l in Partition::all(n) {
                let by_cols: usize = l.conjugate().parts().iter().map(|&c| c * (c - 1) / 2).sum();
                assert_eq!(l.alpha(), by_cols);
            }
        }
    }

    #[test]
    fn standard_counts() {
        assert_eq!(standard_tableaux(&part("5")).len(), 1);
        assert_eq!(standard_tableaux(&part("3,2")).len(), 5);
        assert_eq!(standard_tableaux(&part("3,3,2")).len(), 42);
        for t in standard_tableaux(&part("3,2,1")) {
            assert!(t.is_standard());
        }
    }

    #[test]
    fn special_tableaux() {
        let l = part("2,1");
        let ti = Tableau::initial_tableau(&l);
        let tf = Tableau::final_tableau(&l);
        assert_eq!(ti.rows(), &[vec![1, 2], vec![3]]);
        assert_eq!(tf.rows(), &[vec![1, 3], vec![2]]);
        assert!(ti.d().is_identity());
        assert_eq!(tf.d(), Perm::simple(3, 2).unwrap());
        let l = part("4,3,2");
        assert_eq!(Tableau::initial_tableau(&l).transpose(), Tableau::final_tableau(&l.conjugate()));
        assert_eq!(Tableau::final_tableau(&l).transpose(), Tableau::initial_tableau(&l.conjugate()));
    }

    #[test]
    fn hook_order() {
        let ts = standard_tableaux(&part("2,1"));
        assert_eq!(ts[0], Tableau::final_tableau(&part("2,1")));
        assert_eq!(ts[1], Tableau::initial_tableau(&part("2,1")));
        let ts = standard_tableaux(&part("3,1,1"));
        let split = ts.iter().position(|t| !t.n_in_first_row()).unwrap();
        assert_eq!(split, 3);
        assert!(ts[split..].iter().all(|t| !t.n_in_first_row()));
    }

    #[test]
    fn pair_tableaux() {
        let ps = pair_standard_tableaux(1, 4);
        let firsts: Vec<Vec<usize>> = ps.iter().map(|(p, _, _)| p.first.clone()).collect();
        assert_eq!(firsts, vec![vec![1], vec![2], vec![3], vec![4]]);
        assert_eq!(ps[3].2, 3);
        assert_eq!(ps[3].1.length(), 3);
        assert_eq!(pair_standard_tableaux(3, 7).len(), 35);
        for (p, d, l) in pair_standard_tableaux(2, 6) {
            assert_eq!(d.length(), l);
            assert_eq!(p.d(), d);
        }
    }

    #[test]
    fn precedence() {
        let l = part("2,1");
        let t = Tableau::final_tableau(&l);
        assert_eq!(precedes_and_index(&PairTableau::from_first(3, &[2]), &t), Some((1, true)));
        assert_eq!(precedes_and_index(&PairTableau::from_first(3, &[1]), &t), Some((2, true)));
        assert_eq!(precedes_and_index(&PairTableau::from_first(3, &[3]), &t), None);
    }

    #[test]
    fn distinguished() {
        let l = part("2,1");
        let t = Tableau::final_tableau(&l);
        let (plus, star, s) = distinguished_pairs(&l, &t).unwrap();
        assert_eq!(plus, PairTableau::from_first(3, &[3]));
        assert_eq!(star.rows(), &[vec![3, 1], vec![2]]);
        assert_eq!(s, Some(PairTableau::from_first(3, &[2])));
        for n in 2..=8 {
            for k in 0..n {
                let (plus, _, _) = distinguished_pairs(&Partition::hook(n, k), &Tableau::initial_tableau(&Partition::hook(n, k))).unwrap();
                assert_eq!(plus.length(), k * (n - k));
            }
        }
        assert!(distinguished_pairs(&part("2,2"), &Tableau::initial_tableau(&part("2,2"))).is_err());
    }
}
