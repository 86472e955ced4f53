//! Elementary divisors one irreducible at a time.
//!
//! Over the local ring `F[q]_(f)` a square matrix is equivalent to
//! `diag(f^a_1, ..., f^a_m)`, and eliminating with a pivot of least
//! `f`-valuation finds the `a_i` in increasing order. Working modulo `f^N`
//! keeps every polynomial below degree `N deg f`. The global divisors are the
//! products of the local ones once the valuations found account for the whole
//! span of the determinant.
//!
//! Over `F_p` the local rings are those of the irreducible factors of the
//! cyclotomic polynomials. Over `Q` the valuation at `Phi_m` is read off at
//! one root `z` of `Phi_m` modulo a large prime `P = 1 mod m`, where the
//! local ring is a truncated power series ring in `q - z`. This agrees with
//! the rational answer unless `P` divides one of finitely many nonzero
//! integers attached to the matrix; two independent primes must agree.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::max_index_for_degree;
use super::smith::DenseRows;
use crate::poly::fp::{self, Poly};
use crate::qlaurent::{cyclotomic, cyclotomic_in, totient, CoeffRing, LaurentPoly};

type Matrix = Vec<Vec<Poly>>;

pub(crate) enum LocalOutcome {
    /// The sorted valuations, one per row.
    Valuations(Vec<u32>),
    /// A block vanished modulo `(q - z)^N`: either singular or `N` too small.
    Vanished,
}

/// The residue field `K = F_p[x]/(g)` of a monic irreducible `g`, with
/// elements stored as `d` coefficients.
struct Residue {
    p: u64,
    g: Poly,
    d: usize,
}

impl Residue {
    fn new(p: u64, g: &[u64]) -> Self {
        Residue { p, g: g.to_vec(), d: g.len() - 1 }
    }

    #[inline]
    fn mulmod(&self, a: u64, b: u64) -> u64 {
        if self.p < 1 << 32 {
            a * b % self.p
        } else {
            (a as u128 * b as u128 % self.p as u128) as u64
        }
    }

    /// The class of `x`, a root of `g` in `K`.
    fn root(&self) -> Poly {
        if self.d == 1 {
            vec![(self.p - self.g[0]) % self.p]
        } else {
            let mut z = vec![0; self.d];
            z[1] = 1;
            z
        }
    }

    /// `acc -= a * b` in `K`.
    fn sub_mul(&self, acc: &mut [u64], a: &[u64], b: &[u64], scratch: &mut [u64]) {
        let p = self.p;
        if self.d == 1 {
            acc[0] = (acc[0] + p - self.mulmod(a[0], b[0])) % p;
            return;
        }
        let d = self.d;
        scratch[..2 * d - 1].fill(0);
        for (i, x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (j, y) in b.iter().enumerate() {
                scratch[i + j] = (scratch[i + j] + self.mulmod(*x, *y)) % p;
            }
        }
        for k in (d..2 * d - 1).rev() {
            let c = scratch[k];
            if c != 0 {
                for j in 0..d {
                    scratch[k - d + j] = (scratch[k - d + j] + p - self.mulmod(c, self.g[j])) % p;
                }
            }
        }
        for (t, s) in acc.iter_mut().zip(scratch.iter()) {
            *t = (*t + p - s) % p;
        }
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Poly {
        let mut out = vec![0; self.d];
        let mut scratch = vec![0; 2 * self.d];
        self.sub_mul(&mut out, a, b, &mut scratch);
        out.iter_mut().for_each(|c| *c = (self.p - *c) % self.p);
        out
    }

    fn inv(&self, a: &[u64]) -> Poly {
        let mut a = a.to_vec();
        fp::trim(&mut a);
        let mut out = inv_mod(&a, &self.g, self.p);
        out.resize(self.d, 0);
        out
    }

    /// Coefficients `0..n` of the expansion of `x in F_p[q]` in powers of
    /// `q - z`, as `n * d` values.
    fn taylor(&self, x: &[u64], n: usize) -> Vec<u64> {
        let d = self.d;
        let z = self.root();
        let mut cur: Vec<u64> = vec![0; x.len() * d];
        for (i, c) in x.iter().enumerate() {
            cur[i * d] = *c;
        }
        let mut out = vec![0; n * d];
        let mut len = x.len();
        let mut scratch = vec![0; 2 * d];
        for k in 0..n.min(len) {
            // synthetic division by q - z
            let mut carry = vec![0; d];
            for i in (0..len).rev() {
                let mut next = cur[i * d..(i + 1) * d].to_vec();
                let mut neg = vec![0; d];
                self.sub_mul(&mut neg, &carry, &z, &mut scratch);
                for (t, s) in next.iter_mut().zip(&neg) {
                    *t = (*t + self.p - s) % self.p;
                }
                cur[i * d..(i + 1) * d].copy_from_slice(&carry);
                carry = next;
            }
            out[k * d..(k + 1) * d].copy_from_slice(&carry);
            len -= 1;
        }
        out
    }
}

/// Inverse of `u` modulo `m` over `F_p`, assuming they are coprime.
fn inv_mod(u: &[u64], m: &[u64], p: u64) -> Poly {
    let (mut r0, mut r1) = (m.to_vec(), fp::rem(u, m, p));
    let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = fp::divrem(&r0, &r1, p);
        let s = fp::sub(&s0, &fp::mul(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    debug_assert_eq!(r0.len(), 1, "not coprime");
    fp::rem(&fp::scale(&s0, fp::inv_scalar(r0[0], p), p), m, p)
}

/// Valuations at `g` of the elementary divisors of a square matrix over
/// `F_p[q]`, computed in `K[[q - z]]` modulo `(q - z)^n_pow`.
pub(crate) fn local_valuations(p: u64, a: &[Vec<Poly>], g: &[u64], n_pow: u32) -> LocalOutcome {
    let k = Residue::new(p, g);
    let (m, d, big) = (a.len(), k.d, n_pow as usize);
    let stride = big * d;
    // flat storage; rows and columns are permuted through index maps
    let mut w: Vec<u64> = Vec::with_capacity(m * m * stride);
    for row in a {
        for x in row {
            w.extend(k.taylor(x, big));
        }
    }
    let val = |e: &[u64]| -> u32 { (0..big).find(|&t| e[t * d..(t + 1) * d].iter().any(|c| *c != 0)).unwrap_or(big) as u32 };
    let mut vals: Vec<u32> = (0..m * m).map(|i| val(&w[i * stride..(i + 1) * stride])).collect();
    let mut rows: Vec<usize> = (0..m).collect();
    let mut cols: Vec<usize> = (0..m).collect();
    let mut out = Vec::with_capacity(m);
    let mut floor = 0;
    let mut scratch = vec![0; 2 * d];
    let mut pivot_row = vec![0; m * stride];
    for t in 0..m {
        // least valuation in the trailing block, never below the last pivot's
        let mut best = None;
        'scan: for v in floor..n_pow {
            for ri in t..m {
                let base = rows[ri] * m;
                if let Some(ci) = (t..m).find(|&ci| vals[base + cols[ci]] == v) {
                    best = Some((ri, ci, v));
                    break 'scan;
                }
            }
        }
        let Some((ri, ci, v)) = best else {
            return LocalOutcome::Vanished;
        };
        floor = v;
        rows.swap(t, ri);
        cols.swap(t, ci);
        let v = v as usize;
        let short = big - v;
        let (pr, pc) = (rows[t], cols[t]);
        // inverse of the unit part of the pivot, as a series mod (q - z)^short
        let piv = &w[(pr * m + pc) * stride..(pr * m + pc + 1) * stride];
        let u = |i: usize| &piv[(i + v) * d..(i + v + 1) * d];
        let u0 = k.inv(u(0));
        let mut uinv = vec![0; short * d];
        uinv[..d].copy_from_slice(&u0);
        for i in 1..short {
            let mut acc = vec![0; d];
            for l in 1..=i {
                k.sub_mul(&mut acc, u(l), &uinv[(i - l) * d..(i - l + 1) * d], &mut scratch);
            }
            uinv[i * d..(i + 1) * d].copy_from_slice(&k.mul(&acc, &u0));
        }
        for ci in t + 1..m {
            let j = cols[ci];
            pivot_row[j * stride..(j + 1) * stride].copy_from_slice(&w[(pr * m + j) * stride..(pr * m + j + 1) * stride]);
        }
        for ri in t + 1..m {
            let i = rows[ri];
            let yv = vals[i * m + pc] as usize;
            if yv >= big {
                continue;
            }
            // c = (a_it / (q - z)^v) * uinv, mod (q - z)^short
            let y = &w[(i * m + pc) * stride..(i * m + pc + 1) * stride];
            let mut neg = vec![0; short * d];
            for e in (yv - v)..short {
                for l in 0..=(e - (yv - v)) {
                    let yi = e - l + v;
                    k.sub_mul(&mut neg[e * d..(e + 1) * d], &y[yi * d..(yi + 1) * d], &uinv[l * d..(l + 1) * d], &mut scratch);
                }
            }
            let c = &mut neg;
            c.iter_mut().for_each(|x| *x = (p - *x) % p);
            for ci in t + 1..m {
                let j = cols[ci];
                let bv = vals[pr * m + j] as usize;
                if bv >= big {
                    continue;
                }
                let b = &pivot_row[j * stride..(j + 1) * stride];
                let e0 = (i * m + j) * stride;
                let x = &mut w[e0..e0 + stride];
                for l in (yv - v)..short {
                    let cl = &c[l * d..(l + 1) * d];
                    if cl.iter().all(|z| *z == 0) {
                        continue;
                    }
                    for r in bv..big - l {
                        k.sub_mul(&mut x[(l + r) * d..(l + r + 1) * d], cl, &b[r * d..(r + 1) * d], &mut scratch);
                    }
                }
                vals[i * m + j] = val(x);
            }
            vals[i * m + pc] = n_pow;
        }
        out.push(v as u32);
    }
    LocalOutcome::Valuations(out)
}

/// Valuations whose sum is at most `cap`, doubling the precision as needed;
/// `None` if the matrix is singular or the sum exceeds `cap`.
fn valuations_upto(p: u64, a: &[Vec<Poly>], g: &[u64], cap: u32) -> Option<Vec<u32>> {
    let mut n_pow = cap.min(1) + 1;
    loop {
        match local_valuations(p, a, g, n_pow) {
            LocalOutcome::Valuations(v) if v.iter().sum::<u32>() <= cap => return Some(v),
            LocalOutcome::Valuations(_) => return None,
            LocalOutcome::Vanished if n_pow > cap => return None,
            LocalOutcome::Vanished => n_pow = (2 * n_pow).min(cap + 1),
        }
    }
}

/// Row-wise reversal `q^top_i a_ij(1/q)`, together with the sum of the row
/// degrees (a bound on the degree of the determinant).
fn reversal<T: Clone + Default + PartialEq>(a: &[Vec<Vec<T>>]) -> Option<(Vec<Vec<Vec<T>>>, usize)> {
    let mut span = 0;
    let mut out = Vec::with_capacity(a.len());
    for row in a {
        let top = row.iter().map(|x| x.len()).max().unwrap_or(0);
        if top == 0 {
            return None;
        }
        span += top - 1;
        out.push(
            row.iter()
                .map(|x| {
                    let mut v = x.clone();
                    v.resize(top, T::default());
                    v.reverse();
                    while v.last() == Some(&T::default()) {
                        v.pop();
                    }
                    v
                })
                .collect(),
        );
    }
    Some((out, span))
}

/// Local data for every factor of the determinant: `(m, factor, valuations)`.
type Local = Vec<(usize, Poly, Vec<u32>)>;

/// Walks `m = 1, 2, ...` until the local valuations account for `total`.
fn account(total: usize, mut at: impl FnMut(usize, usize) -> Option<Local>) -> Option<Local> {
    let mut out = Vec::new();
    let mut found = 0;
    let mut m = 1;
    let limit = max_index_for_degree(total);
    while found < total {
        if m > limit {
            return None;
        }
        for (m, f, v) in at(m, total - found)? {
            let s: u32 = v.iter().sum();
            if s > 0 {
                found += (f.len() - 1) * s as usize;
                out.push((m, f, v));
            }
        }
        m += 1;
    }
    (found == total).then_some(out)
}

fn local_fp(p: u64, a: &[Vec<Poly>]) -> Option<Local> {
    let (rev, span) = reversal(a)?;
    let q = [0, 1];
    let v0: u32 = valuations_upto(p, a, &q, span as u32)?.iter().sum();
    let vinf: u32 = valuations_upto(p, &rev, &q, span as u32)?.iter().sum();
    let total = span.checked_sub((v0 + vinf) as usize)?;
    account(total, |m, room| {
        if m as u64 % p == 0 {
            // Phi_m is then a power of Phi_{m/p}
            return Some(Vec::new());
        }
        let mut phi: Poly = Vec::new();
        for (e, c) in cyclotomic(m).terms() {
            let e = e as usize;
            phi.resize(phi.len().max(e + 1), 0);
            phi[e] = c.to_integer().mod_floor(&BigInt::from(p)).to_u64().expect("reduced");
        }
        let mut out = Vec::new();
        for g in fp::factor_squarefree(&phi, p) {
            let room = room / (g.len() - 1);
            if room > 0 {
                let v = valuations_upto(p, a, &g, room as u32)?;
                out.push((m, g, v));
            }
        }
        Some(out)
    })
}

/// Taylor coefficients of `x` at `z`.
fn taylor(x: &[u64], z: u64, p: u64) -> Poly {
    let mut cur = x.to_vec();
    let mut out = Vec::with_capacity(cur.len());
    while !cur.is_empty() {
        // synthetic division by q - z
        let mut carry = 0u64;
        for c in cur.iter_mut().rev() {
            let next = ((carry as u128 * z as u128 + *c as u128) % p as u128) as u64;
            *c = carry;
            carry = next;
        }
        out.push(carry);
        cur.pop();
        fp::trim(&mut cur);
    }
    fp::trim(&mut out);
    out
}

/// A prime `P = 1 mod m` below `2^61` and an element of order exactly `m`.
fn prime_with_root(m: usize, rng: &mut ChaCha8Rng) -> (u64, u64) {
    use num_prime::nt_funcs::is_prime64;
    let m = m as u64;
    let mut p = rng.gen_range(1u64 << 59..1 << 60) / m * m + 1;
    while !is_prime64(p) {
        p += m;
    }
    let primes: Vec<u64> = (2..=m).filter(|r| m % r == 0 && is_prime64(*r)).collect();
    let z = (2..p)
        .map(|g| fp::pow_scalar(g, (p - 1) / m, p))
        .find(|z| primes.iter().all(|r| fp::pow_scalar(*z, m / r, p) != 1))
        .expect("F_P has elements of every order dividing P - 1");
    (p, z)
}

/// Valuations at `Phi_m` of an integer polynomial matrix, or at `q` when
/// `m == 0`, computed at a root modulo large primes until two agree.
fn rational_site(ints: &[Vec<Vec<BigInt>>], m: usize, cap: u32, rng: &mut ChaCha8Rng) -> Option<Vec<u32>> {
    let mut seen: Vec<Option<Vec<u32>>> = Vec::new();
    for _ in 0..4 {
        let (p, z) = if m == 0 { (prime_with_root(1, rng).0, 0) } else { prime_with_root(m, rng) };
        let bp = BigInt::from(p);
        let a: Matrix = ints
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        let mut v: Poly = x.iter().map(|c| c.mod_floor(&bp).to_u64().expect("reduced")).collect();
                        fp::trim(&mut v);
                        taylor(&v, z, p)
                    })
                    .collect()
            })
            .collect();
        let v = valuations_upto(p, &a, &[0, 1], cap);
        if seen.contains(&v) {
            return v;
        }
        seen.push(v);
    }
    None
}

fn local_rational(ints: &[Vec<Vec<BigInt>>]) -> Option<Local> {
    let (rev, span) = reversal(ints)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c6f_6361_6c);
    let v0: u32 = rational_site(ints, 0, span as u32, &mut rng)?.iter().sum();
    let vinf: u32 = rational_site(&rev, 0, span as u32, &mut rng)?.iter().sum();
    let total = span.checked_sub((v0 + vinf) as usize)?;
    account(total, |m, room| {
        let d = totient(m);
        let room = room / d;
        if room == 0 {
            return Some(Vec::new());
        }
        let v = rational_site(ints, m, room as u32, &mut rng)?;
        // only the degree of the factor matters from here on
        Some(vec![(m, vec![0; d + 1], v)])
    })
}

/// Elementary divisors of a square nonsingular matrix assembled from its
/// local Smith forms; `None` when that does not apply.
pub(crate) fn smith_by_localization(ring: CoeffRing, dense: &DenseRows) -> Option<Vec<LaurentPoly>> {
    let (n, square) = match dense {
        DenseRows::Q(rows) => (rows.len(), rows.iter().all(|r| r.len() == rows.len())),
        DenseRows::Fp(_, rows) => (rows.len(), rows.iter().all(|r| r.len() == rows.len())),
    };
    if n == 0 || !square {
        return None;
    }
    let factors: Vec<(LaurentPoly, Vec<u32>)> = match dense {
        DenseRows::Q(rows) => local_rational(rows)?.into_iter().map(|(m, _, v)| (cyclotomic_in(m, ring), v)).collect(),
        DenseRows::Fp(p, rows) => {
            local_fp(*p, rows)?.into_iter().map(|(_, f, v)| (LaurentPoly::from_fp_dense(*p, 0, f), v)).collect()
        }
    };
    let mut out = vec![LaurentPoly::one(ring); n];
    for (f, vals) in factors {
        for (d, v) in out.iter_mut().zip(vals) {
            for _ in 0..v {
                *d = &*d * &f;
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_at_q_plus_one_mod_3() {
        // rows (q+1, 0) and (q+1, (q+1)^2 (q+2))
        let a = vec![vec![vec![1, 1], vec![]], vec![vec![1, 1], vec![2, 2, 1, 1]]];
        match local_valuations(3, &a, &[1, 1], 4) {
            LocalOutcome::Valuations(v) => assert_eq!(v, vec![1, 2]),
            LocalOutcome::Vanished => panic!("nonsingular"),
        }
    }

    #[test]
    fn inverse_modulo_a_power() {
        let m = fp::mul(&[1, 1], &[1, 1], 7);
        let u = [2, 0, 1];
        assert_eq!(fp::rem(&fp::mul(&u, &inv_mod(&u, &m, 7), 7), &m, 7), vec![1]);
    }

    #[test]
    fn vanishing_block() {
        let a = vec![vec![vec![0u64, 0, 1]]];
        assert!(matches!(local_valuations(5, &a, &[0, 1], 2), LocalOutcome::Vanished));
        assert!(matches!(local_valuations(5, &a, &[0, 1], 3), LocalOutcome::Valuations(v) if v == vec![2]));
    }

    #[test]
    fn taylor_expansion() {
        // q^2 at z = 3 mod 11: 9 + 6 (q - 3) + (q - 3)^2
        assert_eq!(taylor(&[0, 0, 1], 3, 11), vec![9, 6, 1]);
    }

    #[test]
    fn root_has_exact_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in [1, 2, 6, 12] {
            let (p, z) = prime_with_root(m, &mut rng);
            assert_eq!((p - 1) % m as u64, 0);
            let order = (1..=m as u64).find(|k| fp::pow_scalar(z, *k, p) == 1).unwrap();
            assert_eq!(order, m as u64);
        }
    }

    fn scrambled(ring: CoeffRing, diag: &[LaurentPoly], seed: u64) -> Vec<Vec<LaurentPoly>> {
        let n = diag.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rand_poly = |rng: &mut ChaCha8Rng| {
            let c: Vec<i64> = (0..3).map(|_| rng.gen_range(-2..=2)).collect();
            LaurentPoly::from_coeffs(ring, rng.gen_range(-1..=1), &c)
        };
        let unit = LaurentPoly::one(ring);
        let zero = LaurentPoly::zero(ring);
        let lower: Vec<Vec<LaurentPoly>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { unit.clone() } else if j < i { rand_poly(&mut rng) } else { zero.clone() }).collect())
            .collect();
        let upper: Vec<Vec<LaurentPoly>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { unit.clone() } else if j > i { rand_poly(&mut rng) } else { zero.clone() }).collect())
            .collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(zero.clone(), |acc, k| &acc + &(&(&lower[i][k] * &diag[k]) * &upper[k][j])))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn recovers_a_scrambled_diagonal() {
        for ring in [CoeffRing::Rationals, CoeffRing::prime_field(2).unwrap(), CoeffRing::prime_field(3).unwrap()] {
            let c = |m| cyclotomic_in(m, ring);
            let chain = [
                LaurentPoly::one(ring),
                LaurentPoly::one(ring),
                c(2),
                c(2),
                &c(2) * &c(3),
                &c(2) * &c(3),
                &(&c(2) * &c(2)) * &c(3),
                &(&(&c(2) * &c(2)) * &c(3)) * &c(5),
                &(&(&c(2) * &c(2)) * &c(3)) * &(&c(5) * &c(4)),
                &(&(&(&c(2) * &c(2)) * &c(3)) * &(&c(5) * &c(4))) * &c(7),
            ];
            let m = scrambled(ring, &chain, 11);
            let (_, dense) = super::super::smith::dense_rows(&m).unwrap();
            let got = smith_by_localization(ring, &dense).expect("cyclotomic determinant");
            let want: Vec<LaurentPoly> = chain.iter().map(|d| d.canonical()).collect();
            let got: Vec<LaurentPoly> = got.iter().map(|d| d.canonical()).collect();
            assert_eq!(got, want, "{ring:?}");
        }
    }

    #[test]
    fn declines_a_singular_matrix() {
        let ring = CoeffRing::prime_field(5).unwrap();
        let mut chain: Vec<LaurentPoly> = (0..9).map(|_| LaurentPoly::one(ring)).collect();
        chain.push(LaurentPoly::zero(ring));
        let m = scrambled(ring, &chain, 3);
        let (_, dense) = super::super::smith::dense_rows(&m).unwrap();
        assert!(smith_by_localization(ring, &dense).is_none());
    }
}
