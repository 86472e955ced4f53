//! Permutation modules, Specht vectors and Gram matrices.
//!
//! A basis vector `x_mu T_d` of `M(mu)` is labelled by its *row word*: the
//! row (0-based) of the row standard tableau `t^mu d` holding each of the
//! values `1..n`. `T_i` only looks at the rows of `i` and `i + 1`, which makes
//! the action a swap in the word. The same labels serve `M(k|n-k)` with row 0
//! holding `a` and row 1 holding `b`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coxeter::Perm;
use crate::error::{Error, Result};
use crate::qlaurent::{binomial, quantum_factorial, quantum_integer, CoeffRing, LaurentPoly};
use crate::snf::EDList;
use crate::tableaux::{precedes_and_index, standard_tableaux, Composition, PairTableau, Partition, Tableau};

/// Which module a vector lives in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModuleShape {
    /// `M(mu)`: every row carries the trivial representation.
    Perm(Composition),
    /// `M(k|n-k)`: the first row is a sign row.
    Signed { k: usize, n: usize },
}

impl ModuleShape {
    pub fn n(&self) -> usize {
        match self {
            ModuleShape::Perm(mu) => mu.n(),
            ModuleShape::Signed { n, .. } => *n,
        }
    }

    fn sign_row(&self) -> bool {
        matches!(self, ModuleShape::Signed { .. })
    }

    /// Row word of the generator `x_mu` (resp. `x_(k|n-k)`).
    pub fn initial_word(&self) -> Vec<u8> {
        match self {
            ModuleShape::Perm(mu) => mu.block_of(),
            ModuleShape::Signed { k, n } => (0..*n).map(|x| u8::from(x >= *k)).collect(),
        }
    }
}

/// `len(d)` for the coset representative with this row word:
/// `#{(x, y) : x > y, row(x) < row(y)}`.
pub fn word_length(word: &[u8]) -> usize {
    let mut c = 0;
    for y in 0..word.len() {
        for x in y + 1..word.len() {
            if word[x] < word[y] {
                c += 1;
            }
        }
    }
    c
}

/// The coset representative `d` of a row word: the row reading word of the
/// row standard tableau it describes.
pub fn word_to_perm(word: &[u8]) -> Perm {
    let rows = word.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut img = Vec::with_capacity(word.len());
    for r in 0..rows {
        img.extend((1..=word.len()).filter(|&x| word[x - 1] as usize == r));
    }
    Perm::from_images(&img).expect("row word describes a bijection")
}

/// Row word of `x_mu T_d` for `d` in `D_mu`.
pub fn perm_to_word(mu: &Composition, d: &Perm) -> Vec<u8> {
    let mut word = vec![0u8; mu.n()];
    for (r, block) in mu.blocks().into_iter().enumerate() {
        for pos in block {
            word[d.apply(pos) - 1] = r as u8;
        }
    }
    word
}

pub fn pair_to_word(p: &PairTableau) -> Vec<u8> {
    let mut word = vec![1u8; p.n()];
    for &x in &p.first {
        word[x - 1] = 0;
    }
    word
}

pub fn word_to_pair(word: &[u8]) -> PairTableau {
    let first = (1..=word.len()).filter(|&x| word[x - 1] == 0).collect();
    let second = (1..=word.len()).filter(|&x| word[x - 1] == 1).collect();
    PairTableau { first, second }
}

/// An element of `M(mu)` or `M(k|n-k)` in its standard basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleVector {
    shape: ModuleShape,
    ring: CoeffRing,
    coords: BTreeMap<Vec<u8>, LaurentPoly>,
}

impl ModuleVector {
    pub fn zero(shape: ModuleShape, ring: CoeffRing) -> Self {
        ModuleVector { shape, ring, coords: BTreeMap::new() }
    }

    /// The generator `x_mu` (resp. `x_(k|n-k)`).
    pub fn generator(shape: ModuleShape, ring: CoeffRing) -> Self {
        let w = shape.initial_word();
        Self::basis(shape, w, ring)
    }

    pub fn basis(shape: ModuleShape, word: Vec<u8>, ring: CoeffRing) -> Self {
        let mut v = Self::zero(shape, ring);
        v.add_term(word, LaurentPoly::one(ring));
        v
    }

    pub fn shape(&self) -> &ModuleShape {
        &self.shape
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn coords(&self) -> &BTreeMap<Vec<u8>, LaurentPoly> {
        &self.coords
    }

    pub fn coeff(&self, word: &[u8]) -> LaurentPoly {
        self.coords.get(word).cloned().unwrap_or_else(|| LaurentPoly::zero(self.ring))
    }

    /// Coefficient of `x_(a|b)` in a vector of `M(k|n-k)`.
    pub fn pair_coeff(&self, p: &PairTableau) -> LaurentPoly {
        self.coeff(&pair_to_word(p))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.coords.len()
    }

    fn add_term(&mut self, w: Vec<u8>, c: LaurentPoly) {
        if c.is_zero() {
            return;
        }
        match self.coords.entry(w) {
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

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape || self.ring != other.ring {
            return Err(Error::ShapeMismatch);
        }
        let mut out = self.clone();
        for (w, c) in &other.coords {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        let mut out = Self::zero(self.shape.clone(), self.ring);
        for (w, a) in &self.coords {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    /// `v T_i`.
    ///
    /// With `a` the row of `i` and `b` the row of `i + 1`: equal trivial rows
    /// give `q v`, an equal sign row gives `-v`, `a < b` swaps, and `a > b`
    /// gives `q * swap + (q - 1) * v`.
    pub fn apply_gen(&self, i: usize) -> Result<Self> {
        let n = self.shape.n();
        if i == 0 || i >= n {
            return Err(Error::GeneratorOutOfRange { index: i, n });
        }
        let q = LaurentPoly::q(self.ring);
        let qm1 = &q - &LaurentPoly::one(self.ring);
        let signed = self.shape.sign_row();
        let mut out = Self::zero(self.shape.clone(), self.ring);
        for (w, c) in &self.coords {
            let (a, b) = (w[i - 1], w[i]);
            if a == b {
                if signed && a == 0 {
                    out.add_term(w.clone(), -c);
                } else {
                    out.add_term(w.clone(), c * &q);
                }
            } else {
                let mut s = w.clone();
                s.swap(i - 1, i);
                if a < b {
                    out.add_term(s, c.clone());
                } else {
                    out.add_term(s, c * &q);
                    out.add_term(w.clone(), c * &qm1);
                }
            }
        }
        Ok(out)
    }

    /// `v T_w` along a reduced word of `w`.
    pub fn apply_perm(&self, w: &Perm) -> Result<Self> {
        self.apply_word(w.reduced_word().letters())
    }

    pub fn apply_word(&self, letters: &[usize]) -> Result<Self> {
        let mut v = self.clone();
        for &i in letters {
            v = v.apply_gen(i)?;
        }
        Ok(v)
    }

    /// `v h` for an element of the Hecke algebra.
    pub fn apply_hecke(&self, h: &crate::hecke::HeckeElt) -> Result<Self> {
        let mut out = Self::zero(self.shape.clone(), self.ring);
        for (w, c) in h.terms() {
            let part = self.apply_perm(w)?;
            for (u, a) in part.coords {
                out.add_term(u, a * c);
            }
        }
        Ok(out)
    }

    /// `v y'` with `y'_t = 1 + sum_{j<t} (-q)^{-(t-j)} T_{t-1} ... T_j`,
    /// all indices shifted up by `offset`.
    fn apply_y_prime(&self, t: usize, offset: usize) -> Result<Self> {
        let mut acc = self.clone();
        let mut u = self.clone();
        for j in (1..t).rev() {
            u = u.apply_gen(j + offset)?;
            let e = -((t - j) as i64);
            let c = crate::hecke::neg_q_pow(self.ring, e);
            acc = acc.add(&u.scale(&c))?;
        }
        Ok(acc)
    }

    /// `v y_nu`, factorized block by block as `y'_2 y'_3 ... y'_m`.
    pub fn apply_y(&self, nu: &Composition) -> Result<Self> {
        let mut v = self.clone();
        for block in nu.blocks() {
            let offset = block.start - 1;
            for t in 2..=block.len() {
                v = v.apply_y_prime(t, offset)?;
            }
        }
        Ok(v)
    }
}

/// `<u, v> = sum_d u_d v_d q^len(d)`.
pub fn form(u: &ModuleVector, v: &ModuleVector) -> Result<LaurentPoly> {
    if u.shape != v.shape || u.ring != v.ring {
        return Err(Error::ShapeMismatch);
    }
    let mut acc = LaurentPoly::zero(u.ring);
    let (small, big) = if u.coords.len() <= v.coords.len() { (u, v) } else { (v, u) };
    for (w, a) in &small.coords {
        if let Some(b) = big.coords.get(w) {
            acc += &(a * b).shift(word_length(w) as i64);
        }
    }
    Ok(acc)
}

/// `z_lambda` inside `M(lambda)`: `x_lambda T_{w_lambda} y_{lambda'}`.
pub fn z_vector(lambda: &Partition, ring: CoeffRing) -> ModuleVector {
    let shape = ModuleShape::Perm(lambda.as_composition());
    let x = ModuleVector::generator(shape, ring);
    let wl = crate::coxeter::w_lambda(lambda);
    x.apply_perm(&wl)
        .and_then(|v| v.apply_y(&lambda.conjugate().as_composition()))
        .expect("generators in range")
}

/// `v_t = z_lambda T_{d(t')}`.
pub fn specht_vector(lambda: &Partition, t: &Tableau, ring: CoeffRing) -> Result<ModuleVector> {
    if t.shape() != *lambda || !t.is_standard() {
        return Err(Error::NotStandard(t.to_string()));
    }
    z_vector(lambda, ring).apply_perm(&t.transpose().d())
}

/// All `v_t` in the order of [`standard_tableaux`], sharing one `z_lambda`.
pub fn specht_basis(lambda: &Partition, ring: CoeffRing) -> Vec<(Tableau, ModuleVector)> {
    let z = z_vector(lambda, ring);
    standard_tableaux(lambda)
        .into_iter()
        .map(|t| {
            let v = z.apply_perm(&t.transpose().d()).expect("generators in range");
            (t, v)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GramKind {
    Plain,
    Mixed,
}

/// A Gram matrix with its row and column labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub partition: Partition,
    pub order: Vec<Tableau>,
    pub kind: GramKind,
    pub entries: Vec<Vec<LaurentPoly>>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.order.len()
    }

    pub fn is_symmetric(&self) -> bool {
        let m = self.size();
        (0..m).all(|i| (0..i).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    /// Entries mapped into another coefficient ring.
    pub fn to_ring(&self, ring: CoeffRing) -> Result<Vec<Vec<LaurentPoly>>> {
        self.entries.iter().map(|r| r.iter().map(|e| e.to_ring(ring)).collect()).collect()
    }

    /// Entries at `q = 1`, as integers.
    pub fn at_one(&self) -> Result<Vec<Vec<BigInt>>> {
        self.entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| {
                        let v = e.at_one()?;
                        if v.is_integer() {
                            Ok(v.to_integer())
                        } else {
                            Err(Error::NotRepresentable { value: e.to_string(), ring: "Z".into() })
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

fn gram_of(vs: &[ModuleVector], ws: &[ModuleVector]) -> Vec<Vec<LaurentPoly>> {
    ws.iter().map(|w| vs.iter().map(|v| form(w, v).expect("same module")).collect()).collect()
}

/// `G(lambda) = (<v_s, v_t>)` over Z[q, q^-1].
pub fn gram_matrix(lambda: &Partition) -> GramMatrix {
    let basis = specht_basis(lambda, CoeffRing::Integers);
    let (order, vs): (Vec<_>, Vec<_>) = basis.into_iter().unzip();
    let m = vs.len();
    let mut entries = vec![vec![LaurentPoly::zero(CoeffRing::Integers); m]; m];
    for i in 0..m {
        for j in i..m {
            let e = form(&vs[i], &vs[j]).expect("same module");
            entries[j][i] = e.clone();
            entries[i][j] = e;
        }
    }
    GramMatrix { partition: lambda.clone(), order, kind: GramKind::Plain, entries }
}

fn hook_k(lambda: &Partition) -> Result<usize> {
    lambda.hook_k().ok_or_else(|| Error::NotAHook(lambda.to_string()))
}

/// `v'_t = x_(k|n-k) y'_{k+1} T_{d(t')}` computed by acting. `t` may be any
/// filling of the hook diagram.
pub fn v_prime_recursive(lambda: &Partition, t: &Tableau, ring: CoeffRing) -> Result<ModuleVector> {
    let k = hook_k(lambda)?;
    if t.shape() != *lambda {
        return Err(Error::ShapeMismatch);
    }
    let n = lambda.n();
    let x = ModuleVector::generator(ModuleShape::Signed { k, n }, ring);
    x.apply_y_prime(k + 1, 0)?.apply_perm(&t.transpose().d())
}

/// `v'_t` from its closed form
/// `sum_{(a|b) < t} (-1)^{k+1-I} q^{len d(t') - len d(a|b)} x_(a|b)`.
pub fn v_prime(lambda: &Partition, t: &Tableau, ring: CoeffRing) -> Result<ModuleVector> {
    let k = hook_k(lambda)?;
    if t.shape() != *lambda || !t.is_standard() {
        return Err(Error::NotStandard(t.to_string()));
    }
    let n = lambda.n();
    let lt = t.transpose().d().length() as i64;
    let col = t.first_column();
    let mut v = ModuleVector::zero(ModuleShape::Signed { k, n }, ring);
    for skip in 0..col.len() {
        let a: Vec<usize> = col.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
        let p = PairTableau::from_first(n, &a);
        let (idx, _) = precedes_and_index(&p, t).expect("built from the first column");
        let sign = if (k + 1 - idx) % 2 == 0 { 1 } else { -1 };
        v.add_term(pair_to_word(&p), LaurentPoly::monomial(ring, sign, lt - p.length() as i64));
    }
    Ok(v)
}

/// `w'_t`: `v'_{t(1,n)}` when `n` is in the first row of `t`, otherwise
/// `v'_{t^lambda} x_{n-k} T_{d(t)}`.
pub fn w_prime(lambda: &Partition, t: &Tableau, ring: CoeffRing) -> Result<ModuleVector> {
    let k = hook_k(lambda)?;
    let n = lambda.n();
    if t.n_in_first_row() {
        return v_prime_recursive(lambda, &t.swap_entries(1, n), ring);
    }
    let base = v_prime(lambda, &Tableau::initial_tableau(lambda), ring)?;
    // x_{n-k} = sum_{j=0}^{n-k-1} T_1 T_2 ... T_j
    let mut acc = base.clone();
    let mut u = base;
    for j in 1..n - k {
        u = u.apply_gen(j)?;
        acc = acc.add(&u)?;
    }
    acc.apply_perm(&t.d())
}

/// `(<w'_s, v'_t>)` with rows indexed by `s` and columns by `t`.
pub fn mixed_gram(lambda: &Partition) -> Result<GramMatrix> {
    hook_k(lambda)?;
    let ring = CoeffRing::Integers;
    let order = standard_tableaux(lambda);
    let vs: Vec<_> = order.iter().map(|t| v_prime(lambda, t, ring)).collect::<Result<_>>()?;
    let ws: Vec<_> = order.iter().map(|t| w_prime(lambda, t, ring)).collect::<Result<_>>()?;
    Ok(GramMatrix { partition: lambda.clone(), order, kind: GramKind::Mixed, entries: gram_of(&vs, &ws) })
}

/// `(<v'_s, v'_t>)`.
pub fn v_prime_gram(lambda: &Partition) -> Result<Vec<Vec<LaurentPoly>>> {
    let ring = CoeffRing::Integers;
    let vs: Vec<_> = standard_tableaux(lambda).iter().map(|t| v_prime(lambda, t, ring)).collect::<Result<_>>()?;
    Ok(gram_of(&vs, &vs))
}

/// Result of comparing `G(lambda)` with the Gram matrix of the `v'_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiScaling {
    /// `G = c G'`.
    pub c: LaurentPoly,
    /// `c = sign * q^a * [k]!`.
    pub sign: i64,
    pub exponent: i64,
}

/// Finds `c` with `G(lambda) = c (<v'_s, v'_t>)` and splits it as
/// `+-q^a [k]_q^!`.
pub fn pi_scaling_check(lambda: &Partition) -> Result<PiScaling> {
    let k = hook_k(lambda)?;
    let g = gram_matrix(lambda);
    let gp = v_prime_gram(lambda)?;
    let m = g.size();
    let mut c: Option<LaurentPoly> = None;
    for i in 0..m {
        for j in 0..m {
            let (a, b) = (&g.entries[i][j], &gp[i][j]);
            if b.is_zero() {
                if !a.is_zero() {
                    return Err(Error::NotProportional(i, j));
                }
                continue;
            }
            let r = a.div_exact(b).ok_or(Error::NotProportional(i, j))?;
            match &c {
                None => c = Some(r),
                Some(c0) if *c0 != r => return Err(Error::NotProportional(i, j)),
                _ => {}
            }
        }
    }
    let c = c.ok_or(Error::NotProportional(0, 0))?;
    let unit = c.div_exact(&quantum_factorial(k, CoeffRing::Integers)).ok_or(Error::NotProportional(0, 0))?;
    if !unit.is_unit() {
        return Err(Error::NotProportional(0, 0));
    }
    let (exponent, coeff) = unit.terms().next().expect("unit is a monomial");
    let sign = if coeff.is_one() { 1 } else { -1 };
    Ok(PiScaling { c, sign, exponent })
}

/// Predicted elementary divisors of `G((n-k, 1^k))`:
/// `binom(n-2, k)` copies of `[k]!` and `binom(n-2, k-1)` of `[k]! [n]`.
pub fn hook_elementary_divisors(n: usize, k: usize) -> Result<EDList> {
    if k >= n {
        return Err(Error::InvalidShape(format!("hook needs 0 <= k < n, got k = {k}, n = {n}")));
    }
    let ring = CoeffRing::Integers;
    let kf = quantum_factorial(k, ring);
    let big = &kf * &quantum_integer(n, ring);
    let (n, k) = (n as i64, k as i64);
    let a = binomial(n - 2, k);
    let b = binomial(n - 2, k - 1);
    let mut divisors = vec![kf.canonical(); a as usize];
    divisors.extend(std::iter::repeat(big.canonical()).take(b as usize));
    Ok(EDList::new(ring, divisors))
}

/// The mixed Gram matrix of a hook, its divisibility certificate and the
/// comparison with [`hook_elementary_divisors`].
#[derive(Clone, Debug, Serialize)]
pub struct HookReport {
    pub n: usize,
    pub k: usize,
    pub mixed: GramMatrix,
    /// Diagonal of the certified mixed Gram matrix, or why it was refused.
    pub certificate: std::result::Result<EDList, String>,
    /// Certified divisors times `[k]!`, in canonical form.
    pub scaled: Option<EDList>,
    pub predicted: EDList,
}

impl HookReport {
    pub fn matches(&self) -> bool {
        self.scaled.as_ref() == Some(&self.predicted)
    }
}

pub fn hook_report(n: usize, k: usize) -> Result<HookReport> {
    let predicted = hook_elementary_divisors(n, k)?;
    let mixed = mixed_gram(&Partition::hook(n, k))?;
    let certificate = crate::snf::divisible_diag_certificate(&mixed.entries).map_err(|e| e.to_string());
    let scaled = certificate.as_ref().ok().map(|e| {
        let kf = quantum_factorial(k, CoeffRing::Integers);
        EDList::new(CoeffRing::Integers, e.divisors().iter().map(|d| (d * &kf).canonical()).collect())
    });
    Ok(HookReport { n, k, mixed, certificate, scaled, predicted })
}

/// Where to evaluate `q` for [`gram_rank_at`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QPoint {
    /// Keep `q` as an indeterminate: the rank over the fraction field.
    Symbolic,
    /// An integer value, reduced into the field.
    Value(i64),
}

/// Rank of `G(lambda)` over a field after specializing `q`.
pub fn gram_rank_at(lambda: &Partition, field: CoeffRing, q0: &QPoint) -> Result<usize> {
    if !field.is_field() {
        return Err(Error::NotAField(field.tag()));
    }
    let g = gram_matrix(lambda);
    match q0 {
        QPoint::Symbolic => {
            let m = g.to_ring(field)?;
            let ed = crate::snf::smith_field_laurent(&m)?;
            Ok(ed.rank())
        }
        QPoint::Value(v) => match field {
            CoeffRing::PrimeField(p) => {
                let x = v.rem_euclid(p as i64) as u64;
                let rows: Vec<Vec<u64>> = g
                    .to_ring(field)?
                    .iter()
                    .map(|r| r.iter().map(|e| e.eval_mod_p(x)).collect::<Result<_>>())
                    .collect::<Result<_>>()?;
                Ok(crate::snf::rank_mod_p(rows, p))
            }
            _ => {
                let rows: Vec<Vec<num_rational::BigRational>> = g
                    .entries
                    .iter()
                    .map(|r| r.iter().map(|e| eval_rational(e, *v)).collect::<Result<_>>())
                    .collect::<Result<_>>()?;
                Ok(crate::snf::rank_rational(rows))
            }
        },
    }
}

fn eval_rational(f: &LaurentPoly, v: i64) -> Result<num_rational::BigRational> {
    use num_rational::BigRational;
    if v == 0 && f.low_exp().is_some_and(|e| e < 0) {
        return Err(Error::NotRepresentable { value: f.to_string(), ring: "q = 0".into() });
    }
    let x = BigRational::from_integer(BigInt::from(v));
    let mut acc = BigRational::zero();
    for (e, c) in f.terms() {
        let p = if e >= 0 { num_traits::pow(x.clone(), e as usize) } else { num_traits::pow(x.recip(), (-e) as usize) };
        acc += c * p;
    }
    Ok(acc)
}
