//! Minor gcds by evaluation and interpolation over a large finite field.
//!
//! `det(P M(x) Q)` for random scalar `P`, `Q` is evaluated at enough points
//! to recover it, and the interpolated samples are combined by gcd. Over a
//! field of size `s` a spurious factor survives one sample with probability
//! at most `2k / s`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Smallest field size used for sampling.
const MIN_FIELD: u64 = 1 << 16;

/// A finite field with elements stored as `u64`.
pub(crate) enum Field {
    /// `Z/P` for a prime `P`.
    Prime(u64),
    /// `GF(p^m)` in Zech logarithm form: `a != zero` stands for `g^a`.
    Zech { p: u64, order: u64, zech: Vec<u64>, base: Vec<u64> },
}

impl Field {
    /// A field containing `F_p` with at least [`MIN_FIELD`] elements.
    pub(crate) fn containing(p: u64) -> Field {
        if p >= MIN_FIELD {
            return Field::Prime(p);
        }
        let mut m = 1;
        while p.pow(m) < MIN_FIELD {
            m += 1;
        }
        zech_field(p, m)
    }

    pub(crate) fn size(&self) -> u64 {
        match self {
            Field::Prime(p) => *p,
            Field::Zech { order, .. } => order + 1,
        }
    }

    pub(crate) fn zero(&self) -> u64 {
        match self {
            Field::Prime(_) => 0,
            Field::Zech { order, .. } => *order,
        }
    }

    pub(crate) fn one(&self) -> u64 {
        match self {
            Field::Prime(_) => 1,
            Field::Zech { .. } => 0,
        }
    }

    /// The image of `c` in `F_p`.
    pub(crate) fn embed(&self, c: u64) -> u64 {
        match self {
            Field::Prime(p) => c % p,
            Field::Zech { p, base, .. } => base[(c % p) as usize],
        }
    }

    /// The `i`-th of `size()` distinct elements.
    pub(crate) fn point(&self, i: u64) -> u64 {
        i
    }

    pub(crate) fn random(&self, rng: &mut ChaCha8Rng) -> u64 {
        rng.gen_range(0..self.size())
    }

    #[inline]
    pub(crate) fn add(&self, a: u64, b: u64) -> u64 {
        match self {
            Field::Prime(p) => {
                let s = a + b;
                if s >= *p {
                    s - p
                } else {
                    s
                }
            }
            Field::Zech { order, zech, .. } => {
                if a == *order {
                    return b;
                }
                if b == *order {
                    return a;
                }
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                let z = zech[(b - a) as usize];
                if z == *order {
                    *order
                } else {
                    (a + z) % order
                }
            }
        }
    }

    #[inline]
    pub(crate) fn neg(&self, a: u64) -> u64 {
        match self {
            Field::Prime(p) => {
                if a == 0 {
                    0
                } else {
                    p - a
                }
            }
            Field::Zech { p, order, .. } => {
                if a == *order || *p == 2 {
                    a
                } else {
                    (a + order / 2) % order
                }
            }
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        match self {
            Field::Prime(p) => {
                if *p <= 1 << 32 {
                    a * b % p
                } else {
                    ((a as u128 * b as u128) % *p as u128) as u64
                }
            }
            Field::Zech { order, .. } => {
                if a == *order || b == *order {
                    *order
                } else {
                    (a + b) % order
                }
            }
        }
    }

    pub(crate) fn inv(&self, a: u64) -> u64 {
        assert!(a != self.zero(), "inverse of zero");
        match self {
            Field::Prime(p) => {
                let mut r = 1u64;
                let (mut b, mut e) = (a, p - 2);
                while e > 0 {
                    if e & 1 == 1 {
                        r = self.mul(r, b);
                    }
                    b = self.mul(b, b);
                    e >>= 1;
                }
                r
            }
            Field::Zech { order, .. } => (order - a) % order,
        }
    }
}

/// `GF(p^m)` from a primitive polynomial found by search. Elements are
/// first built as base-`p` digit strings, then converted to logarithms.
fn zech_field(p: u64, m: u32) -> Field {
    let size = p.pow(m);
    let order = size - 1;
    let digits = |mut x: u64| -> Vec<u64> {
        (0..m)
            .map(|_| {
                let d = x % p;
                x /= p;
                d
            })
            .collect()
    };
    let undigits = |d: &[u64]| d.iter().rev().fold(0u64, |acc, &x| acc * p + x);
    // tails of monic x^m + f_{m-1} x^{m-1} + ... + f_0 with f_0 != 0
    for tail in 1..size {
        let f = digits(tail);
        if f[0] == 0 {
            continue;
        }
        let mut exp = Vec::with_capacity(order as usize);
        let mut cur = vec![0u64; m as usize];
        cur[0] = 1;
        let mut primitive = true;
        for i in 0..order {
            if i > 0 && cur[0] == 1 && cur[1..].iter().all(|&d| d == 0) {
                primitive = false;
                break;
            }
            exp.push(undigits(&cur));
            let top = cur[m as usize - 1];
            for j in (1..m as usize).rev() {
                cur[j] = cur[j - 1];
            }
            cur[0] = 0;
            for j in 0..m as usize {
                cur[j] = (cur[j] + (p - top) * f[j]) % p;
            }
        }
        if !primitive || !(cur[0] == 1 && cur[1..].iter().all(|&d| d == 0)) {
            continue;
        }
        let mut log = vec![order; size as usize];
        for (i, &e) in exp.iter().enumerate() {
            log[e as usize] = i as u64;
        }
        let plus_one = |e: u64| {
            let mut d = digits(e);
            d[0] = (d[0] + 1) % p;
            undigits(&d)
        };
        let zech = exp.iter().map(|&e| log[plus_one(e) as usize]).collect();
        let base = (0..p).map(|c| log[c as usize]).collect();
        return Field::Zech { p, order, zech, base };
    }
    unreachable!("GF({p}^{m}) has a primitive polynomial")
}

/// Polynomials over a [`Field`], constant term first, no trailing zeros.
pub(crate) mod fpoly {
    use super::Field;

    pub(crate) fn trim(f: &Field, a: &mut Vec<u64>) {
        while a.last() == Some(&f.zero()) {
            a.pop();
        }
    }

    pub(crate) fn monic(f: &Field, a: &[u64]) -> Vec<u64> {
        match a.last() {
            None => Vec::new(),
            Some(&l) => {
                let li = f.inv(l);
                a.iter().map(|&x| f.mul(x, li)).collect()
            }
        }
    }

    /// Drops factors of `x`.
    pub(crate) fn strip_x(f: &Field, a: &[u64]) -> Vec<u64> {
        let z = f.zero();
        let start = a.iter().position(|&c| c != z).unwrap_or(a.len());
        a[start..].to_vec()
    }

    pub(crate) fn rem(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut r = a.to_vec();
        let lb = f.inv(*b.last().expect("nonzero divisor"));
        while r.len() >= b.len() {
            let c = f.mul(*r.last().unwrap(), lb);
            let shift = r.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = f.sub(r[shift + i], f.mul(c, bi));
            }
            r.pop();
            trim(f, &mut r);
        }
        r
    }

    pub(crate) fn gcd(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        while !b.is_empty() {
            let r = rem(f, &a, &b);
            a = b;
            b = r;
        }
        monic(f, &a)
    }
}

/// Reduces an integer polynomial modulo a prime.
pub(crate) fn reduce_int(a: &[BigInt], p: u64) -> Vec<u64> {
    let bp = BigInt::from(p);
    a.iter().map(|c| c.mod_floor(&bp).to_u64().expect("reduced below p")).collect()
}

/// `num / den mod p`, or `None` when `p | den`.
pub(crate) fn reduce_ratio(num: &BigInt, den: &BigInt, p: u64) -> Option<u64> {
    let bp = BigInt::from(p);
    let d = den.mod_floor(&bp);
    if d.is_zero() {
        return None;
    }
    let f = Field::Prime(p);
    let n = num.mod_floor(&bp).to_u64()?;
    Some(f.mul(n, f.inv(d.to_u64()?)))
}

fn degree(a: &[u64], zero: u64) -> Option<usize> {
    a.iter().rposition(|&c| c != zero)
}

fn sum_of_largest(mut v: Vec<usize>, k: usize) -> usize {
    v.sort_unstable_by(|a, b| b.cmp(a));
    v.into_iter().take(k).sum()
}

fn det(f: &Field, mut a: Vec<Vec<u64>>) -> u64 {
    let n = a.len();
    let mut d = f.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r][col] != f.zero()) else {
            return f.zero();
        };
        if piv != col {
            a.swap(piv, col);
            d = f.neg(d);
        }
        d = f.mul(d, a[col][col]);
        let inv = f.inv(a[col][col]);
        for r in col + 1..n {
            if a[r][col] == f.zero() {
                continue;
            }
            let c = f.mul(a[r][col], inv);
            for j in col..n {
                a[r][j] = f.sub(a[r][j], f.mul(c, a[col][j]));
            }
        }
    }
    d
}

/// `lm[k - 1]` is the leading `k x k` minor of the square matrix `b`.
fn leading_minors(f: &Field, b: &[Vec<u64>]) -> Vec<u64> {
    let n = b.len();
    let mut a = b.to_vec();
    let mut out = Vec::with_capacity(n);
    let mut d = f.one();
    for col in 0..n {
        if a[col][col] == f.zero() {
            // rare: fall back to one determinant per remaining size
            for k in col + 1..=n {
                out.push(det(f, b[..k].iter().map(|row| row[..k].to_vec()).collect()));
            }
            return out;
        }
        d = f.mul(d, a[col][col]);
        out.push(d);
        let inv = f.inv(a[col][col]);
        for r in col + 1..n {
            if a[r][col] == f.zero() {
                continue;
            }
            let c = f.mul(a[r][col], inv);
            for j in col..n {
                a[r][j] = f.sub(a[r][j], f.mul(c, a[col][j]));
            }
        }
    }
    out
}

/// Newton interpolation through `(xs[i], ys[i])` for the first `ys.len()`
/// points, with `inv_diff[i][j - 1] = 1 / (xs[i] - xs[i - j])`.
fn newton(f: &Field, xs: &[u64], ys: &[u64], inv_diff: &[Vec<u64>]) -> Vec<u64> {
    let n = ys.len();
    let mut c = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            c[i] = f.mul(f.sub(c[i], c[i - 1]), inv_diff[i][j - 1]);
        }
    }
    let z = f.zero();
    let mut out: Vec<u64> = Vec::with_capacity(n);
    for i in (0..n).rev() {
        // out = out * (x - xs[i]) + c[i]
        out.insert(0, z);
        for k in 0..out.len() - 1 {
            let t = f.mul(out[k + 1], xs[i]);
            out[k] = f.sub(out[k], t);
        }
        out[0] = f.add(out[0], c[i]);
    }
    fpoly::trim(f, &mut out);
    out
}

/// For each `k` in `ks`, the monic gcd (factors of `x` removed) of the
/// `k x k` minors of the polynomial matrix `m` over `f`. Each gcd must
/// survive `streak` consecutive unchanged samples.
///
/// One sample draws random `P` (`K x r`) and `Q` (`c x K`) with `K` the
/// largest requested size; the leading `k x k` minor of `P M(x) Q` is then
/// a random `k`-compression for every `k` at once.
pub(crate) fn sampled_minor_gcds(
    f: &Field,
    m: &[Vec<Vec<u64>>],
    ks: &[usize],
    streak: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<u64>> {
    let (r, c) = (m.len(), m[0].len());
    let big_k = ks.iter().copied().max().unwrap_or(0);
    assert!(big_k >= 1 && big_k <= r.min(c), "minor size {big_k} for a {r} x {c} matrix");
    let z = f.zero();
    let row_deg: Vec<usize> = m.iter().map(|row| row.iter().filter_map(|e| degree(e, z)).max().unwrap_or(0)).collect();
    let col_deg: Vec<usize> = (0..c).map(|j| m.iter().filter_map(|row| degree(&row[j], z)).max().unwrap_or(0)).collect();
    let points: Vec<usize> =
        ks.iter().map(|&k| sum_of_largest(row_deg.clone(), k).min(sum_of_largest(col_deg.clone(), k)) + 1).collect();
    let n_points = points.iter().copied().max().unwrap_or(1);
    assert!((n_points as u64) * 4 < f.size(), "field too small for {n_points} points");
    // random distinct points make a zero pivot unlikely
    let mut seen = std::collections::HashSet::new();
    let mut xs = Vec::with_capacity(n_points);
    while xs.len() < n_points {
        let x = f.point(f.random(rng));
        if seen.insert(x) {
            xs.push(x);
        }
    }
    let inv_diff: Vec<Vec<u64>> = (0..n_points).map(|i| (1..=i).map(|j| f.inv(f.sub(xs[i], xs[i - j]))).collect()).collect();
    let at: Vec<Vec<Vec<u64>>> = xs
        .iter()
        .map(|&x| {
            m.iter()
                .map(|row| row.iter().map(|e| e.iter().rev().fold(z, |acc, &co| f.add(f.mul(acc, x), co))).collect())
                .collect()
        })
        .collect();
    let mut gcds: Vec<Option<Vec<u64>>> = vec![None; ks.len()];
    let mut stable = vec![0usize; ks.len()];
    let done = |g: &Option<Vec<u64>>, s: usize| s >= streak || g.as_deref() == Some(&[f.one()][..]);
    while (0..ks.len()).any(|i| !done(&gcds[i], stable[i])) {
        let p: Vec<Vec<u64>> = (0..big_k).map(|_| (0..r).map(|_| f.random(rng)).collect()).collect();
        let q: Vec<Vec<u64>> = (0..c).map(|_| (0..big_k).map(|_| f.random(rng)).collect()).collect();
        // minors[t][k - 1] at point t
        let minors: Vec<Vec<u64>> = at
            .iter()
            .map(|mx| {
                let pm: Vec<Vec<u64>> = p
                    .iter()
                    .map(|prow| {
                        let mut out = vec![z; c];
                        for (l, &pl) in prow.iter().enumerate() {
                            if pl == z {
                                continue;
                            }
                            for (o, &v) in out.iter_mut().zip(&mx[l]) {
                                *o = f.add(*o, f.mul(pl, v));
                            }
                        }
                        out
                    })
                    .collect();
                let pmq: Vec<Vec<u64>> = pm
                    .iter()
                    .map(|row| {
                        let mut out = vec![z; big_k];
                        for (l, &v) in row.iter().enumerate() {
                            if v == z {
                                continue;
                            }
                            for (o, &ql) in out.iter_mut().zip(&q[l]) {
                                *o = f.add(*o, f.mul(v, ql));
                            }
                        }
                        out
                    })
                    .collect();
                leading_minors(f, &pmq)
            })
            .collect();
        for (i, &k) in ks.iter().enumerate() {
            if done(&gcds[i], stable[i]) {
                continue;
            }
            let ys: Vec<u64> = minors[..points[i]].iter().map(|lm| lm[k - 1]).collect();
            let d = fpoly::strip_x(f, &newton(f, &xs, &ys, &inv_diff));
            let before = gcds[i].clone();
            gcds[i] = Some(match gcds[i].take() {
                None => fpoly::monic(f, &d),
                Some(prev) => fpoly::strip_x(f, &fpoly::gcd(f, &prev, &d)),
            });
            stable[i] = if before == gcds[i] { stable[i] + 1 } else { 0 };
        }
    }
    gcds.into_iter().map(|g| g.expect("at least one sample")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn fields() -> Vec<Field> {
        vec![Field::Prime(1_000_003), Field::containing(2), Field::containing(3), Field::containing(5)]
    }

    #[test]
    fn field_axioms_hold_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in fields() {
            assert!(f.size() >= MIN_FIELD);
            for _ in 0..2000 {
                let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                assert_eq!(f.sub(f.add(a, b), b), a);
                if a != f.zero() {
                    assert_eq!(f.mul(a, f.inv(a)), f.one());
                }
            }
        }
    }

    #[test]
    fn prime_subfield_embeds() {
        for p in [2u64, 3, 5] {
            let f = Field::containing(p);
            for a in 0..p {
                for b in 0..p {
                    assert_eq!(f.add(f.embed(a), f.embed(b)), f.embed((a + b) % p));
                    assert_eq!(f.mul(f.embed(a), f.embed(b)), f.embed(a * b % p));
                }
            }
        }
    }

    #[test]
    fn interpolation_recovers_a_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for f in fields() {
            let mut poly: Vec<u64> = (0..9).map(|_| f.random(&mut rng)).collect();
            poly.push(f.one());
            let xs: Vec<u64> = (0..10).map(|i| f.point(i)).collect();
            let ys: Vec<u64> = xs.iter().map(|&x| poly.iter().rev().fold(f.zero(), |a, &c| f.add(f.mul(a, x), c))).collect();
            let inv_diff: Vec<Vec<u64>> = (0..10).map(|i| (1..=i).map(|j| f.inv(f.sub(xs[i], xs[i - j]))).collect()).collect();
            assert_eq!(newton(&f, &xs, &ys, &inv_diff), poly);
        }
    }
}
