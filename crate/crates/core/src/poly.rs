//! Dense univariate polynomial kernels used by the Laurent layer and by the
//! Smith normal form code. Coefficients are stored from the constant term
//! upwards with no trailing zeros; the zero polynomial is the empty vector.

pub(crate) mod fp {
    use num_bigint::BigUint;
    use num_traits::{One, Zero};
    use rand::Rng;

    pub(crate) type Poly = Vec<u64>;

    #[inline]
    fn mulmod(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    pub(crate) fn trim(a: &mut Poly) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub(crate) fn deg(a: &[u64]) -> Option<usize> {
        if a.is_empty() {
            None
        } else {
            Some(a.len() - 1)
        }
    }

    pub(crate) fn pow_scalar(mut b: u64, mut e: u64, p: u64) -> u64 {
        let mut r = 1 % p;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b, p);
            }
            b = mulmod(b, b, p);
            e >>= 1;
        }
        r
    }

    pub(crate) fn inv_scalar(a: u64, p: u64) -> u64 {
        debug_assert!(a % p != 0);
        pow_scalar(a, p - 2, p)
    }

    pub(crate) fn add(a: &[u64], b: &[u64], p: u64) -> Poly {
        let mut r = vec![0; a.len().max(b.len())];
        for (i, x) in a.iter().enumerate() {
            r[i] = *x;
        }
        for (i, x) in b.iter().enumerate() {
            r[i] = (r[i] + x) % p;
        }
        trim(&mut r);
        r
    }

    pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
        let mut r = vec![0; a.len().max(b.len())];
        for (i, x) in a.iter().enumerate() {
            r[i] = *x;
        }
        for (i, x) in b.iter().enumerate() {
            r[i] = (r[i] + p - x) % p;
        }
        trim(&mut r);
        r
    }

    pub(crate) fn scale(a: &[u64], c: u64, p: u64) -> Poly {
        let c = c % p;
        if c == 0 {
            return Vec::new();
        }
        a.iter().map(|x| mulmod(*x, c, p)).collect()
    }

    pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut acc = vec![0u128; a.len() + b.len() - 1];
        let pp = p as u128;
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let t = &mut acc[i + j];
                *t += *x as u128 * *y as u128;
                if *t >= pp * pp * 4 {
                    *t %= pp;
                }
            }
        }
        let mut r: Poly = acc.into_iter().map(|x| (x % pp) as u64).collect();
        trim(&mut r);
        r
    }

    pub(crate) fn monic(a: &[u64], p: u64) -> Poly {
        match a.last() {
            None => Vec::new(),
            Some(&lc) => scale(a, inv_scalar(lc, p), p),
        }
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub(crate) fn divrem(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
        assert!(!b.is_empty(), "division by the zero polynomial");
        if a.len() < b.len() {
            return (Vec::new(), a.to_vec());
        }
        let mut r = a.to_vec();
        let db = b.len() - 1;
        let inv = if b[db] == 1 { 1 } else { inv_scalar(b[db], p) };
        let mut q = vec![0; a.len() - db];
        for i in (0..q.len()).rev() {
            let c = mulmod(r[i + db], inv, p);
            if c == 0 {
                continue;
            }
            q[i] = c;
            for (j, y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + p - mulmod(c, *y, p)) % p;
            }
        }
        trim(&mut q);
        trim(&mut r);
        (q, r)
    }

    pub(crate) fn rem(a: &[u64], b: &[u64], p: u64) -> Poly {
        divrem(a, b, p).1
    }

    pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        monic(&x, p)
    }

    pub(crate) fn powmod(base: &[u64], exp: &BigUint, modulus: &[u64], p: u64) -> Poly {
        let mut result: Poly = rem(&[1 % p], modulus, p);
        let mut b = rem(base, modulus, p);
        let bits = exp.bits();
        for i in 0..bits {
            if exp.bit(i) {
                result = rem(&mul(&result, &b, p), modulus, p);
            }
            if i + 1 < bits {
                b = rem(&mul(&b, &b, p), modulus, p);
            }
        }
        result
    }


    /// Distinct-degree split of a squarefree monic polynomial: pairs `(d, g)`
    /// where `g` is the product of all irreducible factors of degree `d`.
    fn distinct_degree(f: &[u64], p: u64) -> Vec<(usize, Poly)> {
        let mut out = Vec::new();
        let mut rest = f.to_vec();
        let x: Poly = vec![0, 1];
        let mut h = x.clone();
        let pb = BigUint::from(p);
        let mut d = 0;
        while deg(&rest).unwrap_or(0) > 0 {
            d += 1;
            if 2 * d > deg(&rest).unwrap() {
                let dd = deg(&rest).unwrap();
                out.push((dd, monic(&rest, p)));
                break;
            }
            h = powmod(&h, &pb, &rest, p);
            let g = gcd(&rest, &sub(&h, &x, p), p);
            if deg(&g).unwrap_or(0) > 0 {
                rest = divrem(&rest, &g, p).0;
                h = rem(&h, &rest, p);
                out.push((d, g));
            }
        }
        out
    }

    /// Splits a monic squarefree `f` whose irreducible factors all have degree `d`.
    fn equal_degree<R: Rng>(f: &[u64], d: usize, p: u64, rng: &mut R) -> Vec<Poly> {
        let n = deg(f).unwrap();
        if n == d {
            return vec![f.to_vec()];
        }
        loop {
            let mut a: Poly = (0..n).map(|_| rng.gen_range(0..p)).collect();
            trim(&mut a);
            if deg(&a).unwrap_or(0) == 0 {
                continue;
            }
            let g = gcd(&a, f, p);
            let candidate = if deg(&g).unwrap_or(0) > 0 {
                g
            } else if p == 2 {
                // trace map into F_2
                let mut t = a.clone();
                let mut acc = a.clone();
                for _ in 1..d {
                    t = rem(&mul(&t, &t, p), f, p);
                    acc = add(&acc, &t, p);
                }
                gcd(&acc, f, p)
            } else {
                let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) >> 1;
                let b = powmod(&a, &e, f, p);
                gcd(&sub(&b, &[1], p), f, p)
            };
            let dc = deg(&candidate).unwrap_or(0);
            if dc > 0 && dc < n {
                let other = monic(&divrem(f, &candidate, p).0, p);
                let mut out = equal_degree(&candidate, d, p, rng);
                out.extend(equal_degree(&other, d, p, rng));
                return out;
            }
        }
    }

    /// Monic irreducible factors (without multiplicity) of a squarefree polynomial.
    pub(crate) fn factor_squarefree(f: &[u64], p: u64) -> Vec<Poly> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed ^ p);
        let f = monic(f, p);
        assert!(!f.is_empty());
        let mut out = Vec::new();
        for (d, g) in distinct_degree(&f, p) {
            out.extend(equal_degree(&g, d, p, &mut rng));
        }
        out.sort();
        out
    }


    #[allow(dead_code)]
    pub(crate) fn is_zero(a: &[u64]) -> bool {
        a.iter().all(|c| c.is_zero())
    }
}

pub(crate) mod zp {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, Signed, Zero};

    pub(crate) type Poly = Vec<BigInt>;

    pub(crate) fn trim(a: &mut Poly) {
        while a.last().is_some_and(|c| c.is_zero()) {
            a.pop();
        }
    }

    pub(crate) fn content(a: &[BigInt]) -> BigInt {
        let mut g = BigInt::zero();
        for c in a {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the integer content and makes the leading coefficient positive.
    pub(crate) fn primitive(a: &[BigInt]) -> Poly {
        if a.is_empty() {
            return Vec::new();
        }
        let mut g = content(a);
        if a.last().unwrap().is_negative() {
            g = -g;
        }
        a.iter().map(|c| c / &g).collect()
    }

    pub(crate) fn add(a: &[BigInt], b: &[BigInt]) -> Poly {
        let mut r: Poly = vec![BigInt::zero(); a.len().max(b.len())];
        for (i, x) in a.iter().enumerate() {
            r[i] += x;
        }
        for (i, x) in b.iter().enumerate() {
            r[i] += x;
        }
        trim(&mut r);
        r
    }

    pub(crate) fn sub(a: &[BigInt], b: &[BigInt]) -> Poly {
        let mut r: Poly = vec![BigInt::zero(); a.len().max(b.len())];
        for (i, x) in a.iter().enumerate() {
            r[i] += x;
        }
        for (i, x) in b.iter().enumerate() {
            r[i] -= x;
        }
        trim(&mut r);
        r
    }

    pub(crate) fn scale(a: &[BigInt], c: &BigInt) -> Poly {
        if c.is_zero() {
            return Vec::new();
        }
        a.iter().map(|x| x * c).collect()
    }

    pub(crate) fn mul(a: &[BigInt], b: &[BigInt]) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r: Poly = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    r[i + j] += x * y;
                }
            }
        }
        trim(&mut r);
        r
    }

    /// Pseudo-division: returns `(e, q, r)` with `lc(b)^e * a = q * b + r` and
    /// `deg r < deg b`. Only the powers of `lc(b)` that are actually needed are
    /// applied.
    pub(crate) fn pseudo_divrem(a: &[BigInt], b: &[BigInt]) -> (u32, Poly, Poly) {
        assert!(!b.is_empty(), "division by the zero polynomial");
        let db = b.len() - 1;
        let lc = b.last().unwrap();
        if a.len() < b.len() {
            return (0, Vec::new(), a.to_vec());
        }
        let mut r = a.to_vec();
        let mut q: Poly = vec![BigInt::zero(); a.len() - db];
        let mut e = 0;
        let mut top = r.len() - 1;
        loop {
            if top < db {
                break;
            }
            if r[top].is_zero() {
                if top == 0 {
                    break;
                }
                top -= 1;
                continue;
            }
            let shift = top - db;
            let (qq, rr) = r[top].div_rem(lc);
            if rr.is_zero() {
                q[shift] += &qq;
                for (j, y) in b.iter().enumerate() {
                    r[shift + j] -= &qq * y;
                }
            } else {
                // scale everything by lc, then the leading term divides
                e += 1;
                for c in r.iter_mut() {
                    *c *= lc;
                }
                for c in q.iter_mut() {
                    *c *= lc;
                }
                let c = &r[top] / lc;
                q[shift] += &c;
                for (j, y) in b.iter().enumerate() {
                    r[shift + j] -= &c * y;
                }
            }
            debug_assert!(r[top].is_zero());
            if top == 0 {
                break;
            }
            top -= 1;
        }
        trim(&mut q);
        trim(&mut r);
        (e, q, r)
    }

    /// Exact division in Z[x]; `None` unless `b` divides `a` with integer quotient.
    pub(crate) fn div_exact(a: &[BigInt], b: &[BigInt]) -> Option<Poly> {
        assert!(!b.is_empty());
        if a.is_empty() {
            return Some(Vec::new());
        }
        if a.len() < b.len() {
            return None;
        }
        let db = b.len() - 1;
        let lc = b.last().unwrap();
        let mut r = a.to_vec();
        let mut q: Poly = vec![BigInt::zero(); a.len() - db];
        for i in (0..q.len()).rev() {
            let top = &r[i + db];
            if top.is_zero() {
                continue;
            }
            let (c, rr) = top.div_rem(lc);
            if !rr.is_zero() {
                return None;
            }
            for (j, y) in b.iter().enumerate() {
                r[i + j] -= &c * y;
            }
            q[i] = c;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        trim(&mut q);
        Some(q)
    }


    /// Primitive gcd over Z[x] (the gcd over Q[x] up to a rational unit).
    pub(crate) fn gcd_primitive(a: &[BigInt], b: &[BigInt]) -> Poly {
        let mut x = primitive(a);
        let mut y = primitive(b);
        if x.len() < y.len() {
            std::mem::swap(&mut x, &mut y);
        }
        while !y.is_empty() {
            let (_, _, r) = pseudo_divrem(&x, &y);
            x = y;
            y = primitive(&r);
        }
        x
    }

    #[cfg(test)]
    pub(crate) fn from_i64(c: &[i64]) -> Poly {
        let mut v: Poly = c.iter().map(|x| BigInt::from(*x)).collect();
        trim(&mut v);
        v
    }

    #[allow(dead_code)]
    pub(crate) fn is_monic_like(a: &[BigInt]) -> bool {
        a.last().is_some_and(|c| c.abs().is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn fp_divrem_and_gcd() {
        // (x+1)^2 = x^2 + 1 over F_2
        let a = fp::mul(&[1, 1], &[1, 1], 2);
        assert_eq!(a, vec![1, 0, 1]);
        // x^3 + x^2 + x + 1 = (x+1)^3 over F_2
        let g = fp::gcd(&[1, 0, 1], &[1, 1, 1, 1], 2);
        assert_eq!(g, vec![1, 0, 1]);
        assert_eq!(fp::gcd(&[1, 1, 1], &[1, 1], 2), vec![1]);
        let (q, r) = fp::divrem(&[1, 0, 0, 1], &[1, 1], 3);
        assert!(r.is_empty() || fp::deg(&r) == Some(0));
        assert_eq!(fp::add(&fp::mul(&q, &[1, 1], 3), &r, 3), vec![1, 0, 0, 1]);
    }

    #[test]
    fn fp_factor_cyclotomic_seven_mod_two() {
        // Phi_7 = 1 + x + ... + x^6 splits into two cubics over F_2
        let phi7 = vec![1u64; 7];
        let f = fp::factor_squarefree(&phi7, 2);
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|g| g.len() == 4));
        let prod = fp::mul(&f[0], &f[1], 2);
        assert_eq!(prod, phi7);
    }

    #[test]
    fn fp_factor_mod_odd_prime() {
        // x^4 - 1 over F_5 splits completely
        let f = fp::factor_squarefree(&[4, 0, 0, 0, 1], 5);
        assert_eq!(f.len(), 4);
        // Phi_4 = x^2 + 1 stays irreducible mod 3
        assert_eq!(fp::factor_squarefree(&[1, 0, 1], 3).len(), 1);
    }

    #[test]
    fn z_pseudo_division_identity() {
        let a = zp::from_i64(&[3, 0, 2, 5]);
        let b = zp::from_i64(&[1, 2]);
        let (e, q, r) = zp::pseudo_divrem(&a, &b);
        let lhs = zp::scale(&a, &BigInt::from(2).pow(e));
        assert_eq!(lhs, zp::add(&zp::mul(&q, &b), &r));
        assert!(r.len() < b.len());
    }

    #[test]
    fn z_gcd_primitive() {
        let a = zp::mul(&zp::from_i64(&[1, 1]), &zp::from_i64(&[-1, 0, 2]));
        let b = zp::mul(&zp::from_i64(&[2, 2]), &zp::from_i64(&[1, 0, 1]));
        assert_eq!(zp::gcd_primitive(&a, &b), zp::from_i64(&[1, 1]));
        assert_eq!(zp::div_exact(&a, &zp::from_i64(&[1, 1])), Some(zp::from_i64(&[-1, 0, 2])));
        assert_eq!(zp::div_exact(&a, &zp::from_i64(&[2, 1])), None);
    }
}
