//! The algebra identity suite: brute-force checks of the relations and
//! closed forms the rest of the crate relies on.

use num_traits::One;
use serde::Serialize;

use crate::coxeter::{w_lambda, Perm};
use crate::error::Result;
use crate::hecke::{in_double_coset, invert_basis_element, x_mu, y_mu, z_lambda, HeckeElt};
use crate::qlaurent::{hook_polynomial, quantum_integer, CoeffRing, LaurentPoly};
use crate::specht::{
    mixed_gram, perm_to_word, specht_basis, v_prime, v_prime_recursive, z_vector, ModuleShape, ModuleVector,
};
use crate::tableaux::{standard_tableaux, Partition};

const Z: CoeffRing = CoeffRing::Integers;

/// Largest `n` each check runs at when the suite is given no tighter bound.
pub const BRAID_N: usize = 6;
pub const HASH_N: usize = 5;
pub const VANISHING_N: usize = 5;
pub const SANDWICH_N: usize = 5;
pub const EMBEDDING_N: usize = 7;
pub const V_PRIME_N: usize = 8;
pub const MIXED_DIAG_N: usize = 9;

/// Outcome of one family of identities.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub n_max: usize,
    pub cases: usize,
    pub failures: Vec<String>,
    /// Values found by brute force that are recorded rather than asserted.
    pub log: Vec<String>,
}

impl IdentityCheck {
    fn new(name: &'static str, n_max: usize) -> Self {
        IdentityCheck { name, n_max, cases: 0, failures: Vec::new(), log: Vec::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }
}

/// Runs every check up to `min(n_max, default bound)`.
pub fn identity_suite(n_max: usize) -> Result<IdentityReport> {
    Ok(IdentityReport {
        checks: vec![
            braid_relations(n_max.min(BRAID_N))?,
            hash_of_x(n_max.min(HASH_N)),
            vanishing(n_max.min(VANISHING_N))?,
            sandwich(n_max.min(SANDWICH_N))?,
            embedding(n_max.min(EMBEDDING_N)),
            v_prime_closed_form(n_max.min(V_PRIME_N))?,
            mixed_diagonal(n_max.min(MIXED_DIAG_N))?,
        ],
    })
}

fn partitions(n_max: usize) -> impl Iterator<Item = Partition> {
    (1..=n_max).flat_map(Partition::all)
}

fn hooks(n_max: usize) -> impl Iterator<Item = Partition> {
    (1..=n_max).flat_map(|n| (0..n).map(move |k| Partition::hook(n, k)))
}

/// `+-q^a` as `(sign, a)`.
fn unit_parts(u: &LaurentPoly) -> Option<(i64, i64)> {
    if !u.is_unit() {
        return None;
    }
    let (e, c) = u.terms().next()?;
    Some((if c.is_one() { 1 } else { -1 }, e))
}

/// `c` with `a = c b`, if the coordinates are proportional.
fn module_ratio(a: &ModuleVector, b: &ModuleVector) -> Option<LaurentPoly> {
    if a.coords().len() != b.coords().len() {
        return None;
    }
    let mut c: Option<LaurentPoly> = None;
    for (w, y) in b.coords() {
        let r = a.coords().get(w)?.div_exact(y)?;
        match &c {
            Some(c0) if *c0 != r => return None,
            None => c = Some(r),
            _ => {}
        }
    }
    c
}

/// Quadratic, braid and commuting relations between the `T_i`.
pub fn braid_relations(n_max: usize) -> Result<IdentityCheck> {
    let mut out = IdentityCheck::new("braid and quadratic relations", n_max);
    for n in 2..=n_max {
        let q = LaurentPoly::monomial(Z, 1, 1);
        let t: Vec<HeckeElt> = (1..n).map(|i| HeckeElt::generator(n, i, Z)).collect::<Result<_>>()?;
        for (a, ti) in t.iter().enumerate() {
            let sq = ti.multiply(ti)?;
            let expect = ti.scale(&(&q - &LaurentPoly::one(Z))).add(&HeckeElt::scalar(n, q.clone()))?;
            out.record(sq == expect, || format!("T_{}^2 in H(S_{n})", a + 1));
            for (b, tj) in t.iter().enumerate().skip(a + 1) {
                let (i, j) = (a + 1, b + 1);
                let ok = if j == i + 1 {
                    ti.multiply(tj)?.multiply(ti)? == tj.multiply(ti)?.multiply(tj)?
                } else {
                    ti.multiply(tj)? == tj.multiply(ti)?
                };
                out.record(ok, || format!("T_{i}, T_{j} in H(S_{n})"));
            }
        }
    }
    Ok(out)
}

/// `x_lambda^# = q^{alpha(lambda')} y_lambda`.
pub fn hash_of_x(n_max: usize) -> IdentityCheck {
    let mut out = IdentityCheck::new("x_lambda^# = q^alpha(lambda') y_lambda", n_max);
    for l in partitions(n_max) {
        let mu = l.as_composition();
        let a = l.conjugate().alpha() as i64;
        let ok = x_mu(&mu, Z).hash() == y_mu(&mu, Z).scale(&LaurentPoly::monomial(Z, 1, a));
        out.record(ok, || format!("lambda = {l}"));
    }
    out
}

/// `x_lambda T_w y_lambda'` vanishes exactly off the double coset
/// `S_lambda w_lambda S_lambda'`, where it is `+-q^a z_lambda`.
pub fn vanishing(n_max: usize) -> Result<IdentityCheck> {
    let mut out = IdentityCheck::new("x_lambda T_w y_lambda' against the double coset", n_max);
    for l in partitions(n_max) {
        let n = l.n();
        let x = ModuleVector::generator(ModuleShape::Perm(l.as_composition()), Z);
        let conj = l.conjugate().as_composition();
        let z = z_vector(&l, Z);
        for w in Perm::all(n) {
            let v = x.apply_perm(&w)?.apply_y(&conj)?;
            let ok = if in_double_coset(&l, &w) {
                module_ratio(&v, &z).is_some_and(|c| c.is_unit())
            } else {
                v.is_zero()
            };
            out.record(ok, || format!("lambda = {l}, w = {w}"));
        }
    }
    Ok(out)
}

/// `z_lambda T_{w_lambda}^{-1} z_lambda = +-q^a h_lambda(q) z_lambda`; the
/// unit is found by brute force and logged.
pub fn sandwich(n_max: usize) -> Result<IdentityCheck> {
    let mut out = IdentityCheck::new("z_lambda T_w_lambda^-1 z_lambda ~ h_lambda z_lambda", n_max);
    for l in partitions(n_max) {
        let z = z_vector(&l, Z);
        let h = invert_basis_element(&w_lambda(&l), Z).multiply(&z_lambda(&l, Z))?;
        let lhs = z.apply_hecke(&h)?;
        let unit = module_ratio(&lhs, &z).and_then(|c| c.div_exact(&hook_polynomial(&l, Z)));
        match unit.as_ref().and_then(unit_parts) {
            Some((s, a)) => {
                out.record(true, String::new);
                let sign = if s < 0 { "-" } else { "" };
                out.log.push(format!("{l}: unit {sign}q^{a}, alpha(lambda') = {}", l.conjugate().alpha()));
            }
            None => out.record(false, || format!("lambda = {l}")),
        }
    }
    Ok(out)
}

/// The coordinates of the `v_t` on the basis vectors `x_lambda T_{d(t)}`
/// form a matrix that becomes unitriangular after reordering.
pub fn embedding(n_max: usize) -> IdentityCheck {
    let mut out = IdentityCheck::new("unitriangular Specht embedding", n_max);
    for l in partitions(n_max) {
        let mu = l.as_composition();
        let basis = specht_basis(&l, Z);
        let cols: Vec<Vec<u8>> = basis.iter().map(|(t, _)| perm_to_word(&mu, &t.d())).collect();
        let ok = unitriangular(&basis.iter().map(|(_, v)| v).collect::<Vec<_>>(), &cols);
        out.record(ok, || format!("lambda = {l}"));
    }
    out
}

/// Peels off a row whose diagonal entry is a unit and is the only nonzero
/// entry left in its column, until nothing remains.
fn unitriangular(rows: &[&ModuleVector], cols: &[Vec<u8>]) -> bool {
    let mut alive: Vec<usize> = (0..rows.len()).collect();
    while !alive.is_empty() {
        let pick = alive.iter().position(|&i| {
            rows[i].coeff(&cols[i]).is_unit() && alive.iter().all(|&j| j == i || rows[j].coeff(&cols[i]).is_zero())
        });
        match pick {
            Some(p) => {
                alive.swap_remove(p);
            }
            None => return false,
        }
    }
    true
}

/// The closed form for `v'_t` against the defining product.
pub fn v_prime_closed_form(n_max: usize) -> Result<IdentityCheck> {
    let mut out = IdentityCheck::new("v'_t closed form = recursive", n_max);
    for l in hooks(n_max) {
        for t in standard_tableaux(&l) {
            let ok = v_prime(&l, &t, Z)? == v_prime_recursive(&l, &t, Z)?;
            out.record(ok, || format!("lambda = {l}, t = {t}"));
        }
    }
    Ok(out)
}

/// Diagonal of the mixed Gram matrix: `q^{2n-2k-3+len d(t')}` when `n` is in
/// the first row of `t`, `q^{k(n-k-2)} [n]` otherwise; the row of `t^lambda`
/// has no other nonzero entry.
pub fn mixed_diagonal(n_max: usize) -> Result<IdentityCheck> {
    let mut out = IdentityCheck::new("mixed Gram diagonal", n_max);
    // for n = 1 the exponent 2n - 3 is negative; the formula starts at n = 2
    for l in hooks(n_max).filter(|l| l.n() >= 2) {
        let (n, k) = (l.n() as i64, l.hook_k().expect("hook") as i64);
        let g = mixed_gram(&l)?;
        let top = crate::tableaux::Tableau::initial_tableau(&l);
        for (i, t) in g.order.iter().enumerate() {
            let expect = if t.n_in_first_row() {
                LaurentPoly::monomial(Z, 1, 2 * n - 2 * k - 3 + t.transpose().d().length() as i64)
            } else {
                quantum_integer(l.n(), Z).shift(k * (n - k - 2))
            };
            out.record(g.entries[i][i] == expect, || format!("lambda = {l}, t = {t}"));
            if *t == top {
                let zeros = (0..g.size()).all(|j| j == i || g.entries[i][j].is_zero());
                out.record(zeros, || format!("lambda = {l}: row of t^lambda"));
            }
        }
    }
    Ok(out)
}
