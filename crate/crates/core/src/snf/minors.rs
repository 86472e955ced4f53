use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::{fpoly, reduce_int, reduce_ratio, sampled_minor_gcds, Field};
use super::smith::{bareiss, dense_rows, lf, lz, DenseRows, FpPoly, QPoly};
use super::EDList;
use crate::error::{Error, Result};
use crate::poly::{fp, zp};
use crate::qlaurent::{normalize_and_gcd, CoeffRing, LaurentPoly};

/// Above this many `k x k` minors the gcd is estimated from random
/// compressions `det(P M Q)` instead of enumerated.
const EXHAUSTIVE_LIMIT: u128 = 64;

/// Consecutive samples that must leave the gcd unchanged before it is
/// accepted. A sample stays divisible by a spurious irreducible factor `f`
/// with probability about `1/|F[q]/(f)|`, which is `1/2` for `q + 1` over
/// F_2, so small fields need long streaks.
fn required_streak(ring: CoeffRing) -> usize {
    match ring {
        CoeffRing::PrimeField(p) => (48.0 / (p as f64).log2()).ceil() as usize,
        _ => 12,
    }
}

/// The gcd of the `k x k` minors, and whether every minor was computed.
///
/// A sampled gcd is always a multiple of the true one (each `det(P M Q)`
/// lies in the minor ideal); it is exact with high probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorGcd {
    pub gcd: LaurentPoly,
    pub exhaustive: bool,
}

fn binom(n: usize, k: usize) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        r = r * (n as u128 - i) / (i + 1);
        if r > u128::MAX / 1024 {
            return u128::MAX;
        }
    }
    r
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + n - k) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

enum Work {
    Q(Vec<Vec<Vec<BigInt>>>),
    Fp(u64, Vec<Vec<Vec<u64>>>),
}

impl Work {
    fn det_sub(&self, rows: &[usize], cols: &[usize]) -> Vec<BigInt> {
        match self {
            Work::Q(a) => {
                let sub = rows.iter().map(|&i| cols.iter().map(|&j| lz(a[i][j].clone())).collect()).collect();
                bareiss(&QPoly, sub, (0, vec![BigInt::one()])).1
            }
            Work::Fp(p, a) => {
                let sub = rows.iter().map(|&i| cols.iter().map(|&j| lf(a[i][j].clone())).collect()).collect();
                bareiss(&FpPoly(*p), sub, (0, vec![1])).1.into_iter().map(BigInt::from).collect()
            }
        }
    }

    /// `det(P M Q)` for random `P` (`k x r`) and `Q` (`c x k`).
    fn det_compressed(&self, k: usize, rng: &mut ChaCha8Rng) -> Vec<BigInt> {
        match self {
            Work::Q(a) => {
                let (r, c) = (a.len(), a[0].len());
                let p: Vec<Vec<BigInt>> =
                    (0..k).map(|_| (0..r).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect()).collect();
                let q: Vec<Vec<BigInt>> =
                    (0..c).map(|_| (0..k).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect()).collect();
                let pm: Vec<Vec<Vec<BigInt>>> = (0..k)
                    .map(|i| {
                        (0..c)
                            .map(|j| (0..r).fold(Vec::new(), |acc, l| zp::add(&acc, &zp::scale(&a[l][j], &p[i][l]))))
                            .collect()
                    })
                    .collect();
                let pmq: Vec<Vec<Vec<BigInt>>> = (0..k)
                    .map(|i| {
                        (0..k)
                            .map(|j| (0..c).fold(Vec::new(), |acc, l| zp::add(&acc, &zp::scale(&pm[i][l], &q[l][j]))))
                            .collect()
                    })
                    .collect();
                let pmq = pmq.into_iter().map(|r: Vec<Vec<BigInt>>| r.into_iter().map(lz).collect()).collect();
                bareiss(&QPoly, pmq, (0, vec![BigInt::one()])).1
            }
            Work::Fp(pr, a) => {
                let pr = *pr;
                let (r, c) = (a.len(), a[0].len());
                // random polynomial multipliers make up for small fields
                let rand_poly = |rng: &mut ChaCha8Rng| {
                    let mut v: Vec<u64> = (0..3).map(|_| rng.gen_range(0..pr)).collect();
                    fp::trim(&mut v);
                    v
                };
                let p: Vec<Vec<Vec<u64>>> = (0..k).map(|_| (0..r).map(|_| rand_poly(rng)).collect()).collect();
                let q: Vec<Vec<Vec<u64>>> = (0..c).map(|_| (0..k).map(|_| rand_poly(rng)).collect()).collect();
                let pm: Vec<Vec<Vec<u64>>> = (0..k)
                    .map(|i| {
                        (0..c)
                            .map(|j| (0..r).fold(Vec::new(), |acc, l| fp::add(&acc, &fp::mul(&a[l][j], &p[i][l], pr), pr)))
                            .collect()
                    })
                    .collect();
                let pmq: Vec<Vec<Vec<u64>>> = (0..k)
                    .map(|i| {
                        (0..k)
                            .map(|j| (0..c).fold(Vec::new(), |acc, l| fp::add(&acc, &fp::mul(&pm[i][l], &q[l][j], pr), pr)))
                            .collect()
                    })
                    .collect();
                let pmq = pmq.into_iter().map(|r: Vec<Vec<u64>>| r.into_iter().map(lf).collect()).collect();
                bareiss(&FpPoly(pr), pmq, (0, vec![1])).1.into_iter().map(BigInt::from).collect()
            }
        }
    }
}

fn accumulate(ring: CoeffRing, g: &mut Option<LaurentPoly>, d: Vec<BigInt>) {
    let d = LaurentPoly::from_bigint_coeffs(ring, 0, d);
    *g = Some(match g.take() {
        None => d.canonical(),
        Some(prev) if prev.is_zero() && d.is_zero() => prev,
        Some(prev) => normalize_and_gcd(&prev, &d).expect("not both zero"),
    });
}

/// gcd of all `k x k` minors of `m` over `Q` or `F_p` (canonical form).
pub fn minor_gcd(m: &[Vec<LaurentPoly>], k: usize, seed: u64) -> Result<MinorGcd> {
    let (ring, dense) = dense_rows(m)?;
    let (r, c) = (m.len(), m[0].len());
    if k == 0 || k > r.min(c) {
        return Err(Error::Dimension(format!("minor size {k} for a {r} x {c} matrix")));
    }
    let work = match dense {
        DenseRows::Q(a) => Work::Q(a),
        DenseRows::Fp(p, a) => Work::Fp(p, a),
    };
    let count = binom(r, k).saturating_mul(binom(c, k));
    let mut g: Option<LaurentPoly> = None;
    if count <= EXHAUSTIVE_LIMIT {
        let rs = combinations(r, k);
        let cs = combinations(c, k);
        for rows in &rs {
            for cols in &cs {
                accumulate(ring, &mut g, work.det_sub(rows, cols));
                if g.as_ref().is_some_and(|x| x.is_one()) {
                    return Ok(MinorGcd { gcd: g.unwrap(), exhaustive: true });
                }
            }
        }
        return Ok(MinorGcd { gcd: g.expect("at least one minor"), exhaustive: true });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let streak = required_streak(ring);
    let mut stable = 0;
    while stable < streak {
        let before = g.clone();
        accumulate(ring, &mut g, work.det_compressed(k, &mut rng));
        if g.as_ref().is_some_and(|x| x.is_one()) {
            break;
        }
        stable = if before == g { stable + 1 } else { 0 };
    }
    Ok(MinorGcd { gcd: g.expect("at least one sample"), exhaustive: false })
}

/// Larger minors are too costly to expand exactly over `Q[q]`.
const EXACT_MAX_SIZE: usize = 6;

/// Consecutive unchanged samples required by the evaluation sampler, whose
/// fields have at least `2^16` elements.
const FIELD_STREAK: usize = 3;

/// Does the gcd of the `k x k` minors equal `d_1 d_2 ... d_k`?
///
/// Small cases enumerate every minor. Otherwise the gcd is sampled by
/// evaluation in a large field: an extension of `F_p`, or over `Q` two
/// random primes near `2^31`, both of which must agree.
pub fn minor_ideal_check(m: &[Vec<LaurentPoly>], e: &EDList, k: usize) -> Result<bool> {
    Ok(check_sizes(m, e, &[k])?[0])
}

/// [`minor_ideal_check`] for every `k` from 1 to the number of divisors,
/// sharing the samples between sizes.
pub fn minor_ideal_checks(m: &[Vec<LaurentPoly>], e: &EDList) -> Result<Vec<bool>> {
    let ks: Vec<usize> = (1..=e.len()).collect();
    check_sizes(m, e, &ks)
}

fn check_sizes(m: &[Vec<LaurentPoly>], e: &EDList, ks: &[usize]) -> Result<Vec<bool>> {
    let (r, c) = (m.len(), m.first().map_or(0, |row| row.len()));
    for &k in ks {
        if k > e.len() {
            return Err(Error::Dimension(format!("only {} divisors, asked for k = {k}", e.len())));
        }
        if k == 0 || k > r.min(c) {
            return Err(Error::Dimension(format!("minor size {k} for a {r} x {c} matrix")));
        }
    }
    let prods: Vec<LaurentPoly> = ks
        .iter()
        .map(|&k| e.divisors()[..k].iter().fold(LaurentPoly::one(e.ring()), |acc, d| &acc * d))
        .collect();
    let mut out: Vec<Option<bool>> = vec![None; ks.len()];
    let mut sampled = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        if k <= EXACT_MAX_SIZE && binom(r, k).saturating_mul(binom(c, k)) <= EXHAUSTIVE_LIMIT {
            out[i] = Some(prods[i].canonical() == minor_gcd(m, k, 0x6d69_6e6f_7273 ^ k as u64)?.gcd);
        } else {
            sampled.push(i);
        }
    }
    if !sampled.is_empty() {
        let (ring, dense) = dense_rows(m)?;
        if ring != e.ring() {
            return Err(Error::RingMismatch(ring.tag(), e.ring().tag()));
        }
        let sizes: Vec<usize> = sampled.iter().map(|&i| ks[i]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x6d69_6e6f_7273 ^ sizes.len() as u64);
        match dense {
            DenseRows::Fp(p, a) => {
                let f = Field::containing(p);
                let a: Vec<Vec<Vec<u64>>> = a.iter().map(|row| row.iter().map(|x| embed_poly(&f, x)).collect()).collect();
                let gcds = sampled_minor_gcds(&f, &a, &sizes, FIELD_STREAK, &mut rng);
                for (&i, g) in sampled.iter().zip(gcds) {
                    let expected = if prods[i].is_zero() { Vec::new() } else { embed_poly(&f, &prods[i].to_fp_dense().1) };
                    out[i] = Some(g == fpoly::monic(&f, &fpoly::strip_x(&f, &expected)));
                }
            }
            DenseRows::Q(a) => {
                for &i in &sampled {
                    out[i] = Some(true);
                }
                let mut agreed = 0;
                while agreed < 2 {
                    let p = random_prime(&mut rng);
                    let Some(expected) = prods.iter().map(|x| reduce_laurent(x, p)).collect::<Option<Vec<_>>>() else {
                        continue;
                    };
                    let f = Field::Prime(p);
                    let a: Vec<Vec<Vec<u64>>> = a.iter().map(|row| row.iter().map(|x| reduce_int(x, p)).collect()).collect();
                    let gcds = sampled_minor_gcds(&f, &a, &sizes, FIELD_STREAK, &mut rng);
                    for (&i, g) in sampled.iter().zip(gcds) {
                        if g != fpoly::monic(&f, &fpoly::strip_x(&f, &expected[i])) {
                            out[i] = Some(false);
                        }
                    }
                    agreed += 1;
                }
            }
        }
    }
    Ok(out.into_iter().map(|x| x.expect("every size decided")).collect())
}

fn embed_poly(f: &Field, a: &[u64]) -> Vec<u64> {
    let mut v: Vec<u64> = a.iter().map(|&c| f.embed(c)).collect();
    fpoly::trim(f, &mut v);
    v
}

fn random_prime(rng: &mut ChaCha8Rng) -> u64 {
    loop {
        let p = rng.gen_range(1u64 << 30..1 << 31) | 1;
        if num_prime::nt_funcs::is_prime64(p) {
            return p;
        }
    }
}

/// Coefficients from the lowest term up, reduced mod `p`, or `None` when
/// `p` divides a denominator.
fn reduce_laurent(a: &LaurentPoly, p: u64) -> Option<Vec<u64>> {
    let Some(low) = a.low_exp() else {
        return Some(Vec::new());
    };
    let mut v = Vec::new();
    for (e, c) in a.terms() {
        let i = (e - low) as usize;
        if v.len() <= i {
            v.resize(i + 1, 0);
        }
        v[i] = reduce_ratio(c.numer(), c.denom(), p)?;
    }
    fpoly::trim(&Field::Prime(p), &mut v);
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snf::smith_field_laurent;

    #[test]
    fn combos() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(binom(16, 8), 12870);
    }

    #[test]
    fn minors_match_divisors() {
        let ring = CoeffRing::Rationals;
        let f = |c: &[i64]| LaurentPoly::from_coeffs(ring, 0, c);
        let m = vec![
            vec![f(&[1, 1]), f(&[0, 1]), f(&[1])],
            vec![f(&[1, 0, 1]), f(&[2]), f(&[0, 0, 1])],
            vec![f(&[1, 1]), f(&[0, 1]), f(&[1])],
        ];
        let e = smith_field_laurent(&m).unwrap();
        for k in 1..=3 {
            assert!(minor_ideal_check(&m, &e, k).unwrap(), "k = {k}");
        }
        assert!(e.divisors()[2].is_zero());
    }

    #[test]
    fn sampled_agrees_with_exhaustive() {
        let ring = CoeffRing::prime_field(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m: Vec<Vec<LaurentPoly>> = (0..9)
            .map(|_| {
                (0..9)
                    .map(|_| {
                        let c: Vec<i64> = (0..3).map(|_| rng.gen_range(0..3)).collect();
                        LaurentPoly::from_coeffs(ring, 0, &c)
                    })
                    .collect()
            })
            .collect();
        let e = smith_field_laurent(&m).unwrap();
        let k = 5;
        let g = minor_gcd(&m, k, 1).unwrap();
        assert!(!g.exhaustive);
        let prod = e.divisors()[..k].iter().fold(LaurentPoly::one(ring), |a, d| &a * d);
        assert_eq!(g.gcd, prod.canonical());
    }

    /// `d_j` replaced by `d_j (q + 2)` for every `j >= at`.
    fn perturbed(e: &EDList, at: usize) -> EDList {
        let ring = e.ring();
        let f = LaurentPoly::from_coeffs(ring, 0, &[2, 1]);
        let ds = e.divisors().iter().enumerate().map(|(j, d)| if j >= at { d * &f } else { d.clone() }).collect();
        EDList::new(ring, ds)
    }

    #[test]
    fn sampled_checks_accept_and_reject() {
        let lambda: crate::Partition = "3,2,1".parse().unwrap();
        let g = crate::gram_matrix(&lambda);
        for ring in [CoeffRing::Rationals, CoeffRing::prime_field(3).unwrap(), CoeffRing::prime_field(5).unwrap()] {
            let m = g.to_ring(ring).unwrap();
            let e = smith_field_laurent(&m).unwrap();
            assert!(minor_ideal_checks(&m, &e).unwrap().iter().all(|&ok| ok), "{ring}");
            let bad = minor_ideal_checks(&m, &perturbed(&e, 9)).unwrap();
            assert!(bad[..9].iter().all(|&ok| ok), "{ring}");
            assert!(bad[9..].iter().all(|&ok| !ok), "{ring}");
            assert_eq!(minor_ideal_check(&m, &e, 12).unwrap(), true);
        }
    }

    #[test]
    fn sampled_checks_see_a_missing_factor_over_f2() {
        // d_1 = q + 1 with q + 1 absent from the list: the sampled gcd must
        // keep the factor, which survives a random F_2 combination half the time
        let ring = CoeffRing::prime_field(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = LaurentPoly::from_coeffs(ring, 0, &[1, 1]);
        let m: Vec<Vec<LaurentPoly>> = (0..12)
            .map(|_| {
                (0..12)
                    .map(|_| {
                        let c: Vec<i64> = (0..3).map(|_| rng.gen_range(0..2)).collect();
                        &LaurentPoly::from_coeffs(ring, 0, &c) * &f
                    })
                    .collect()
            })
            .collect();
        let e = smith_field_laurent(&m).unwrap();
        assert!(minor_ideal_checks(&m, &e).unwrap().iter().all(|&ok| ok));
        let ds: Vec<LaurentPoly> = e.divisors().iter().map(|d| d.div_exact(&f).unwrap()).collect();
        let stripped = EDList::new(ring, ds);
        assert!(minor_ideal_checks(&m, &stripped).unwrap().iter().all(|&ok| !ok));
    }
}
