use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::local::smith_by_localization;
use super::EDList;
use crate::error::{Error, Result};
use crate::poly::{fp, zp};
use crate::qlaurent::{normalize_and_gcd, CoeffRing, LaurentPoly};

/// Euclidean-style domain used by the elimination kernels.
pub(crate) trait Domain {
    type P: Clone;
    fn is_zero(&self, a: &Self::P) -> bool;
    /// Strict size order used for pivot choice; remainders are smaller.
    fn less(&self, a: &Self::P, b: &Self::P) -> bool;
    fn mul(&self, a: &Self::P, b: &Self::P) -> Self::P;
    fn sub(&self, a: &Self::P, b: &Self::P) -> Self::P;
    /// `(s, quo)` with `s` a unit such that `s*a - quo*b` is smaller than `b`.
    fn divstep(&self, a: &Self::P, b: &Self::P) -> (Self::P, Self::P);
    fn div_exact(&self, a: &Self::P, b: &Self::P) -> Self::P;
    /// Optional content removal on a row or column.
    fn tidy(&self, _line: &mut [&mut Self::P]) {}
}

pub(crate) struct QPoly;
pub(crate) struct FpPoly(pub u64);
pub(crate) struct Ints;

/// Laurent polynomial as `(low, coeffs)` with a nonzero constant term
/// (`coeffs` empty for zero), so that `q^k` is visibly a unit.
pub(crate) type Lz = (i64, Vec<BigInt>);
pub(crate) type Lf = (i64, Vec<u64>);

fn norm<T: Zero + Clone>(low: i64, mut v: Vec<T>) -> (i64, Vec<T>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    let lead = v.iter().take_while(|c| c.is_zero()).count();
    if lead == v.len() {
        return (0, Vec::new());
    }
    (low + lead as i64, v[lead..].to_vec())
}

fn align<T: Zero + Clone>(a: &(i64, Vec<T>), b: &(i64, Vec<T>)) -> (i64, Vec<T>, Vec<T>) {
    let low = a.0.min(b.0);
    let pad = |x: &(i64, Vec<T>)| {
        let mut v = vec![T::zero(); (x.0 - low) as usize];
        v.extend_from_slice(&x.1);
        v
    };
    (low, pad(a), pad(b))
}

/// Rough size of the coefficients, for tie-breaking between pivots.
fn weight(v: &[BigInt]) -> u64 {
    v.iter().map(|c| c.bits()).sum()
}

impl Domain for QPoly {
    type P = Lz;
    fn is_zero(&self, a: &Lz) -> bool {
        a.1.is_empty()
    }
    fn less(&self, a: &Lz, b: &Lz) -> bool {
        (a.1.len(), weight(&a.1)) < (b.1.len(), weight(&b.1))
    }
    fn mul(&self, a: &Lz, b: &Lz) -> Lz {
        if a.1.is_empty() || b.1.is_empty() {
            return (0, Vec::new());
        }
        (a.0 + b.0, zp::mul(&a.1, &b.1))
    }
    fn sub(&self, a: &Lz, b: &Lz) -> Lz {
        if b.1.is_empty() {
            return a.clone();
        }
        let (low, x, y) = align(a, b);
        norm(low, zp::sub(&x, &y))
    }
    fn divstep(&self, a: &Lz, b: &Lz) -> (Lz, Lz) {
        let (e, quo, _) = zp::pseudo_divrem(&a.1, &b.1);
        let mut s = b.1.last().unwrap().pow(e);
        let g = zp::content(&quo).gcd(&s);
        let quo = if g.is_one() || g.is_zero() {
            quo
        } else {
            s = &s / &g;
            quo.iter().map(|c| c / &g).collect()
        };
        ((0, vec![s]), norm(a.0 - b.0, quo))
    }
    fn div_exact(&self, a: &Lz, b: &Lz) -> Lz {
        if a.1.is_empty() {
            return (0, Vec::new());
        }
        (a.0 - b.0, zp::div_exact(&a.1, &b.1).expect("exact division in Bareiss"))
    }
    fn tidy(&self, line: &mut [&mut Lz]) {
        let mut g = BigInt::zero();
        for x in line.iter() {
            for c in x.1.iter() {
                g = g.gcd(c);
                if g.is_one() {
                    return;
                }
            }
        }
        if g.is_zero() {
            return;
        }
        for x in line.iter_mut() {
            for c in x.1.iter_mut() {
                *c = &*c / &g;
            }
        }
    }
}

impl Domain for FpPoly {
    type P = Lf;
    fn is_zero(&self, a: &Lf) -> bool {
        a.1.is_empty()
    }
    fn less(&self, a: &Lf, b: &Lf) -> bool {
        a.1.len() < b.1.len()
    }
    fn mul(&self, a: &Lf, b: &Lf) -> Lf {
        if a.1.is_empty() || b.1.is_empty() {
            return (0, Vec::new());
        }
        (a.0 + b.0, fp::mul(&a.1, &b.1, self.0))
    }
    fn sub(&self, a: &Lf, b: &Lf) -> Lf {
        if b.1.is_empty() {
            return a.clone();
        }
        let (low, x, y) = align(a, b);
        norm(low, fp::sub(&x, &y, self.0))
    }
    fn divstep(&self, a: &Lf, b: &Lf) -> (Lf, Lf) {
        ((0, vec![1]), norm(a.0 - b.0, fp::divrem(&a.1, &b.1, self.0).0))
    }
    fn div_exact(&self, a: &Lf, b: &Lf) -> Lf {
        if a.1.is_empty() {
            return (0, Vec::new());
        }
        let (q, r) = fp::divrem(&a.1, &b.1, self.0);
        debug_assert!(r.is_empty());
        (a.0 - b.0, q)
    }
}

pub(crate) fn lz(v: Vec<BigInt>) -> Lz {
    norm(0, v)
}

pub(crate) fn lf(v: Vec<u64>) -> Lf {
    norm(0, v)
}

impl Domain for Ints {
    type P = BigInt;
    fn is_zero(&self, a: &Self::P) -> bool {
        a.is_zero()
    }
    fn less(&self, a: &Self::P, b: &Self::P) -> bool {
        a.abs() < b.abs()
    }
    fn mul(&self, a: &Self::P, b: &Self::P) -> Self::P {
        a * b
    }
    fn sub(&self, a: &Self::P, b: &Self::P) -> Self::P {
        a - b
    }
    fn divstep(&self, a: &Self::P, b: &Self::P) -> (Self::P, Self::P) {
        (BigInt::one(), a.div_floor(b))
    }
    fn div_exact(&self, a: &Self::P, b: &Self::P) -> Self::P {
        a / b
    }
}

/// Diagonalizes by unimodular row and column operations (the diagonal is not
/// yet a divisibility chain). Returns `min(rows, cols)` entries.
pub(crate) fn diagonalize<D: Domain>(d: &D, mut a: Vec<Vec<D::P>>) -> Vec<D::P> {
    let r = a.len();
    let c = a.first().map_or(0, |row| row.len());
    let m = r.min(c);
    let mut diag = Vec::with_capacity(m);
    for t in 0..m {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    if d.is_zero(x) {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| d.less(x, &a[bi][bj])) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                // the rest of the matrix is zero
                diag.extend((t..m).map(|_| a[t][t].clone()));
                return diag;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..r {
                if d.is_zero(&a[i][t]) {
                    continue;
                }
                let (s, quo) = d.divstep(&a[i][t], &a[t][t]);
                let (top, rest) = a.split_at_mut(i);
                let prow = &top[t];
                let row = &mut rest[0];
                for j in t..c {
                    row[j] = d.sub(&d.mul(&s, &row[j]), &d.mul(&quo, &prow[j]));
                }
                d.tidy(&mut row[t..].iter_mut().collect::<Vec<_>>());
                if !d.is_zero(&row[t]) {
                    clean = false;
                }
            }
            for j in t + 1..c {
                if d.is_zero(&a[t][j]) {
                    continue;
                }
                let (s, quo) = d.divstep(&a[t][j], &a[t][t]);
                for row in a.iter_mut().skip(t) {
                    row[j] = d.sub(&d.mul(&s, &row[j]), &d.mul(&quo, &row[t]));
                }
                d.tidy(&mut a.iter_mut().skip(t).map(|row| &mut row[j]).collect::<Vec<_>>());
                if !d.is_zero(&a[t][j]) {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        diag.push(a[t][t].clone());
    }
    diag
}

/// Turns a diagonal into a divisibility chain by gcd/lcm exchanges.
fn chain_laurent(mut diag: Vec<LaurentPoly>) -> Vec<LaurentPoly> {
    let m = diag.len();
    for i in 0..m {
        for j in i + 1..m {
            if diag[i].is_zero() && diag[j].is_zero() {
                continue;
            }
            if !diag[i].is_zero() && diag[i].divides(&diag[j]) {
                continue;
            }
            let g = normalize_and_gcd(&diag[i], &diag[j]).expect("not both zero");
            let l = if diag[i].is_zero() || diag[j].is_zero() {
                LaurentPoly::zero(g.ring())
            } else {
                (&diag[i] * &diag[j]).div_exact(&g).expect("gcd divides the product")
            };
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag
}

/// Dense polynomial rows over the entry ring, each row shifted (and over Q
/// cleared of denominators) so every entry is a polynomial.
pub(crate) enum DenseRows {
    Q(Vec<Vec<Vec<BigInt>>>),
    Fp(u64, Vec<Vec<Vec<u64>>>),
}

pub(crate) fn dense_rows(m: &[Vec<LaurentPoly>]) -> Result<(CoeffRing, DenseRows)> {
    let ring = m
        .iter()
        .flatten()
        .next()
        .map(|x| x.ring())
        .ok_or_else(|| Error::Dimension("empty matrix".into()))?;
    let cols = m[0].len();
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("ragged matrix".into()));
    }
    if let Some(x) = m.iter().flatten().find(|x| x.ring() != ring) {
        return Err(Error::RingMismatch(ring.tag(), x.ring().tag()));
    }
    match ring {
        CoeffRing::Integers => Err(Error::NotAField(ring.tag())),
        CoeffRing::Rationals => {
            let rows = m
                .iter()
                .map(|row| {
                    let low = row.iter().filter_map(|x| x.low_exp()).min().unwrap_or(0);
                    let mut den = BigInt::one();
                    for x in row {
                        for (_, c) in x.terms() {
                            den = den.lcm(c.denom());
                        }
                    }
                    row.iter()
                        .map(|x| {
                            let mut v: Vec<BigInt> = Vec::new();
                            for (e, c) in x.terms() {
                                let i = (e - low) as usize;
                                if v.len() <= i {
                                    v.resize(i + 1, BigInt::zero());
                                }
                                v[i] = (c * BigRational::from_integer(den.clone())).to_integer();
                            }
                            v
                        })
                        .collect()
                })
                .collect();
            Ok((ring, DenseRows::Q(rows)))
        }
        CoeffRing::PrimeField(p) => {
            let rows = m
                .iter()
                .map(|row| {
                    let low = row.iter().filter_map(|x| x.low_exp()).min().unwrap_or(0);
                    row.iter()
                        .map(|x| {
                            if x.is_zero() {
                                return Vec::new();
                            }
                            let (l, mut v) = x.to_fp_dense();
                            let mut out = vec![0; (l - low) as usize];
                            out.append(&mut v);
                            out
                        })
                        .collect()
                })
                .collect();
            Ok((ring, DenseRows::Fp(p, rows)))
        }
    }
}

/// Elementary divisors of a matrix over `F[q, q^-1]`, `F = Q` or `F_p`.
///
/// The list has `min(rows, cols)` entries; trailing zeros record a rank drop.
pub fn smith_field_laurent(m: &[Vec<LaurentPoly>]) -> Result<EDList> {
    let (ring, dense) = dense_rows(m)?;
    if m.len() > LOCALIZE_ABOVE {
        if let Some(diag) = smith_by_localization(ring, &dense) {
            return Ok(EDList::new(ring, diag));
        }
    }
    Ok(EDList::new(ring, chain_laurent(smith_euclid(ring, dense))))
}

/// Larger square matrices go through [`smith_by_localization`].
const LOCALIZE_ABOVE: usize = 8;

pub(crate) fn smith_euclid(ring: CoeffRing, dense: DenseRows) -> Vec<LaurentPoly> {
    let diag: Vec<LaurentPoly> = match dense {
        DenseRows::Q(rows) => {
            let rows = rows.into_iter().map(|r| r.into_iter().map(lz).collect()).collect();
            diagonalize(&QPoly, rows).into_iter().map(|(l, v)| LaurentPoly::from_bigint_coeffs(ring, l, v)).collect()
        }
        DenseRows::Fp(p, rows) => {
            let rows = rows.into_iter().map(|r| r.into_iter().map(lf).collect()).collect();
            diagonalize(&FpPoly(p), rows).into_iter().map(|(l, v)| LaurentPoly::from_fp_dense(p, l, v)).collect()
        }
    };
    diag
}

/// Elementary divisors of an integer matrix, as nonnegative integers.
pub fn smith_integer(m: &[Vec<BigInt>]) -> Result<EDList> {
    let cols = m.first().map_or(0, |r| r.len());
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("ragged matrix".into()));
    }
    let mut diag: Vec<BigInt> = diagonalize(&Ints, m.to_vec()).into_iter().map(|x| x.abs()).collect();
    let k = diag.len();
    for i in 0..k {
        for j in i + 1..k {
            let g = diag[i].gcd(&diag[j]);
            if g == diag[i] {
                continue;
            }
            let l = diag[i].lcm(&diag[j]);
            diag[i] = g;
            diag[j] = l;
        }
    }
    Ok(EDList::from_integers(diag))
}

/// Rank over F_p of a matrix of residues.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pi) = (rank..rows.len()).find(|&i| rows[i][c] % p != 0) else {
            continue;
        };
        rows.swap(rank, pi);
        let inv = fp::inv_scalar(rows[rank][c] % p, p);
        let pivot: Vec<u64> = rows[rank].iter().map(|x| (x % p) as u128 as u64).collect();
        for i in rank + 1..rows.len() {
            let f = ((rows[i][c] % p) as u128 * inv as u128 % p as u128) as u64;
            if f == 0 {
                continue;
            }
            for j in c..cols {
                let sub = (f as u128 * pivot[j] as u128 % p as u128) as u64;
                rows[i][j] = (rows[i][j] % p + p - sub) % p;
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over Q.
pub fn rank_rational(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pi) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pi);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot[c];
            for j in c..cols {
                let t = &f * &pivot[j];
                row[j] -= t;
            }
        }
        rank += 1;
    }
    rank
}

/// Fraction-free determinant (Bareiss).
pub(crate) fn bareiss<D: Domain>(d: &D, mut a: Vec<Vec<D::P>>, one: D::P) -> D::P {
    let n = a.len();
    if n == 0 {
        return one;
    }
    let mut prev = one;
    for k in 0..n - 1 {
        if d.is_zero(&a[k][k]) {
            let Some(s) = (k + 1..n).find(|&i| !d.is_zero(&a[i][k])) else {
                return a[k][k].clone();
            };
            a.swap(k, s);
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = d.sub(&d.mul(&a[k][k], &a[i][j]), &d.mul(&a[i][k], &a[k][j]));
                a[i][j] = d.div_exact(&x, &prev);
            }
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].clone()
}
