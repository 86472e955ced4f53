//! Tests that no diagonal matrix over `Z_(p)[q, q^-1]` can have the given
//! elementary divisors over both `Q` and `F_p` (or over `Q` and, at `q = 1`,
//! over `Z`).
//!
//! A diagonal `diag(d_1, ..., d_m)` has, for every irreducible `f`, the
//! multiset of `f`-valuations of its entries as the `f`-valuations of its
//! elementary divisors. Reduction mod p (or evaluation at 1) sends each
//! rational cyclotomic factor to a known product of irreducibles, so the
//! per-entry valuation vectors must satisfy a family of multiset equations.
//! The search looks for such vectors.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::{max_index_for_degree, EDList};
use crate::error::{Error, Result};
use crate::poly::fp;
use crate::qlaurent::{cyclo_display, cyclotomic_in, totient, CoeffRing, LaurentPoly};

pub const DEFAULT_BUDGET: Duration = Duration::from_secs(10);

/// Above this many candidate row types the search gives up.
const MAX_TYPES: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructionStatus {
    Obstructed,
    NoObstructionFound,
    Inconclusive,
}

impl fmt::Display for ObstructionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObstructionStatus::Obstructed => "obstructed",
            ObstructionStatus::NoObstructionFound => "no obstruction found by this test",
            ObstructionStatus::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructionTest {
    /// Compare divisors over `Q` with those over `F_p`.
    Reduction,
    /// Compare divisors over `Q` with the integer divisors at `q = 1`.
    AtOne,
}

/// One derived multiset constraint: `sum_f weights[f] * x_i[f]` over the
/// rows `i` must equal `target` as a multiset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationImage {
    pub label: String,
    pub weights: Vec<u32>,
    pub target: Vec<u32>,
}

/// Find `rows` vectors `x_i` with `{x_i[f]} = targets[f]` for every factor
/// `f` and every image constraint satisfied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationSystem {
    pub rows: usize,
    pub factors: Vec<String>,
    pub targets: Vec<Vec<u32>>,
    pub images: Vec<ValuationImage>,
}

/// A solution: distinct row vectors with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub rows: Vec<(Vec<u32>, usize)>,
}

enum Outcome {
    Feasible(Assignment),
    Infeasible(String),
    GaveUp(String),
}

fn multiset(v: impl IntoIterator<Item = u32>) -> BTreeMap<u32, usize> {
    let mut m = BTreeMap::new();
    for x in v {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

impl ValuationSystem {
    fn image_of(&self, img: &ValuationImage, x: &[u32]) -> u32 {
        img.weights.iter().zip(x).map(|(w, v)| w * v).sum()
    }

    /// Checks a proposed assignment against every constraint.
    pub fn verify(&self, a: &Assignment) -> bool {
        let expand = || a.rows.iter().flat_map(|(x, c)| std::iter::repeat_n(x, *c));
        if expand().count() != self.rows || a.rows.iter().any(|(x, _)| x.len() != self.factors.len()) {
            return false;
        }
        for (f, t) in self.targets.iter().enumerate() {
            if multiset(expand().map(|x| x[f])) != multiset(t.iter().copied()) {
                return false;
            }
        }
        self.images
            .iter()
            .all(|img| multiset(expand().map(|x| self.image_of(img, x))) == multiset(img.target.iter().copied()))
    }

    fn solve(&self, budget: Duration) -> Outcome {
        let deadline = Instant::now() + budget;
        let nf = self.factors.len();
        let fvals: Vec<Vec<(u32, usize)>> =
            self.targets.iter().map(|t| multiset(t.iter().copied()).into_iter().collect()).collect();
        let ivals: Vec<Vec<(u32, usize)>> =
            self.images.iter().map(|g| multiset(g.target.iter().copied()).into_iter().collect()).collect();
        if self.targets.iter().chain(self.images.iter().map(|g| &g.target)).any(|t| t.len() != self.rows) {
            return Outcome::Infeasible("multisets of different sizes".into());
        }

        // slot layout: factor value slots first, then image value slots
        let mut fslot = Vec::new();
        let mut next = 0;
        for v in &fvals {
            fslot.push(next);
            next += v.len();
        }
        let mut islot = Vec::new();
        for v in &ivals {
            islot.push(next);
            next += v.len();
        }
        let mut state = vec![0usize; next];
        for (f, v) in fvals.iter().enumerate() {
            for (j, (_, c)) in v.iter().enumerate() {
                state[fslot[f] + j] = *c;
            }
        }
        for (g, v) in ivals.iter().enumerate() {
            for (j, (_, c)) in v.iter().enumerate() {
                state[islot[g] + j] = *c;
            }
        }

        // candidate row types: every combination of attested factor values
        // whose images are attested too
        let total: usize = fvals.iter().map(|v| v.len()).try_fold(1usize, |a, b| a.checked_mul(b)).unwrap_or(usize::MAX);
        if total > MAX_TYPES {
            return Outcome::GaveUp(format!("{total} candidate row types"));
        }
        let mut types: Vec<(Vec<u32>, Vec<usize>)> = Vec::new();
        let mut idx = vec![0usize; nf];
        'outer: loop {
            let x: Vec<u32> = (0..nf).map(|f| fvals[f][idx[f]].0).collect();
            let mut slots: Vec<usize> = (0..nf).map(|f| fslot[f] + idx[f]).collect();
            let mut ok = true;
            for (g, img) in self.images.iter().enumerate() {
                let y = self.image_of(img, &x);
                match ivals[g].iter().position(|(v, _)| *v == y) {
                    Some(j) => slots.push(islot[g] + j),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                types.push((x, slots));
            }
            for f in (0..nf).rev() {
                idx[f] += 1;
                if idx[f] < fvals[f].len() {
                    continue 'outer;
                }
                idx[f] = 0;
            }
            break;
        }

        // every attested value must be carried by some type
        let mut last_cover = vec![None::<usize>; next];
        for (t, (_, slots)) in types.iter().enumerate() {
            for &s in slots {
                last_cover[s] = Some(t);
            }
        }
        for (g, img) in self.images.iter().enumerate() {
            for (j, (v, _)) in ivals[g].iter().enumerate() {
                if last_cover[islot[g] + j].is_none() {
                    return Outcome::Infeasible(format!(
                        "valuation {v} at {} is not reachable from the rational valuations",
                        img.label
                    ));
                }
            }
        }
        for (f, name) in self.factors.iter().enumerate() {
            for (j, (v, _)) in fvals[f].iter().enumerate() {
                if last_cover[fslot[f] + j].is_none() {
                    return Outcome::Infeasible(format!("no consistent row carries valuation {v} at {name}"));
                }
            }
        }

        let mut search = Search {
            types: &types,
            last_cover: &last_cover,
            failed: HashSet::new(),
            chosen: vec![0; types.len()],
            deadline,
            nodes: 0,
            timed_out: false,
        };
        if search.dfs(0, &mut state, self.rows) {
            let rows = types.iter().zip(&search.chosen).filter(|(_, c)| **c > 0).map(|((x, _), c)| (x.clone(), *c)).collect();
            Outcome::Feasible(Assignment { rows })
        } else if search.timed_out {
            Outcome::GaveUp(format!("time budget of {:?} exhausted", budget))
        } else {
            Outcome::Infeasible("no choice of per-row valuations matches every multiset".into())
        }
    }
}

struct Search<'a> {
    types: &'a [(Vec<u32>, Vec<usize>)],
    last_cover: &'a [Option<usize>],
    failed: HashSet<(usize, Vec<usize>)>,
    chosen: Vec<usize>,
    deadline: Instant,
    nodes: u64,
    timed_out: bool,
}

impl Search<'_> {
    fn dfs(&mut self, t: usize, state: &mut Vec<usize>, left: usize) -> bool {
        if left == 0 {
            return true;
        }
        if t == self.types.len() || self.timed_out {
            return false;
        }
        self.nodes += 1;
        if self.nodes % 4096 == 0 && Instant::now() > self.deadline {
            self.timed_out = true;
            return false;
        }
        if state.iter().enumerate().any(|(s, &c)| c > 0 && self.last_cover[s].is_none_or(|l| l < t)) {
            return false;
        }
        let key = (t, state.clone());
        if self.failed.contains(&key) {
            return false;
        }
        let slots = &self.types[t].1;
        let max = slots.iter().map(|&s| state[s]).min().unwrap_or(left).min(left);
        for c in (0..=max).rev() {
            for &s in slots {
                state[s] -= c;
            }
            self.chosen[t] = c;
            let ok = self.dfs(t + 1, state, left - c);
            for &s in slots {
                state[s] += c;
            }
            if ok {
                return true;
            }
            if self.timed_out {
                return false;
            }
        }
        self.chosen[t] = 0;
        self.failed.insert(key);
        false
    }
}

/// Result of an obstruction test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub test: ObstructionTest,
    pub p: u64,
    pub status: ObstructionStatus,
    pub detail: String,
    /// The constraints searched; present unless the input could not be set up.
    pub system: Option<ValuationSystem>,
    /// A consistent assignment when no obstruction was found.
    pub assignment: Option<Assignment>,
}

impl ObstructionReport {
    fn inconclusive(test: ObstructionTest, p: u64, detail: impl Into<String>) -> Self {
        ObstructionReport { test, p, status: ObstructionStatus::Inconclusive, detail: detail.into(), system: None, assignment: None }
    }

    fn from_system(test: ObstructionTest, p: u64, system: ValuationSystem, budget: Duration) -> Self {
        let (status, detail, assignment) = match system.solve(budget) {
            Outcome::Feasible(a) => (
                ObstructionStatus::NoObstructionFound,
                "a consistent choice of per-row valuations exists".to_string(),
                Some(a),
            ),
            Outcome::Infeasible(why) => (ObstructionStatus::Obstructed, why, None),
            Outcome::GaveUp(why) => (ObstructionStatus::Inconclusive, why, None),
        };
        ObstructionReport { test, p, status, detail, system: Some(system), assignment }
    }

    /// Re-derives the verdict from the recorded constraints alone. `None` for
    /// inconclusive reports.
    pub fn recheck(&self) -> Option<bool> {
        let system = self.system.as_ref()?;
        match self.status {
            ObstructionStatus::Inconclusive => None,
            ObstructionStatus::NoObstructionFound => Some(self.assignment.as_ref().is_some_and(|a| system.verify(a))),
            ObstructionStatus::Obstructed => Some(matches!(system.solve(DEFAULT_BUDGET), Outcome::Infeasible(_))),
        }
    }
}

/// Cyclotomic indices and per-divisor valuations of a rational divisor list.
fn rational_valuations(ed_q: &EDList) -> std::result::Result<(Vec<usize>, Vec<Vec<u32>>), String> {
    let mut per_row: Vec<BTreeMap<usize, u32>> = Vec::new();
    for (i, d) in ed_q.divisors().iter().enumerate() {
        if d.is_zero() {
            return Err(format!("rational divisor {} is zero", i + 1));
        }
        let span = d.span().unwrap_or(0);
        let c = cyclo_display(d, max_index_for_degree(span));
        if !c.is_fully_factored() {
            return Err(format!("rational divisor {} is not a product of cyclotomic polynomials", i + 1));
        }
        per_row.push(c.factors.into_iter().collect());
    }
    let ms: Vec<usize> = per_row.iter().flat_map(|r| r.keys().copied()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let vals = ms.iter().map(|m| per_row.iter().map(|r| r.get(m).copied().unwrap_or(0)).collect()).collect();
    Ok((ms, vals))
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

/// Splits `m = p^a m'` with `p` not dividing `m'`.
fn split_p(mut m: usize, p: usize) -> (u32, usize) {
    let mut a = 0;
    while m % p == 0 {
        m /= p;
        a += 1;
    }
    (a, m)
}

/// Test against the elementary divisors over `F_p`.
pub fn nondiag_obstruction(ed_q: &EDList, ed_p: &EDList) -> Result<ObstructionReport> {
    nondiag_obstruction_with_budget(ed_q, ed_p, DEFAULT_BUDGET)
}

pub fn nondiag_obstruction_with_budget(ed_q: &EDList, ed_p: &EDList, budget: Duration) -> Result<ObstructionReport> {
    if ed_q.ring() != CoeffRing::Rationals {
        return Err(Error::RingMismatch("Q".into(), ed_q.ring().tag()));
    }
    let CoeffRing::PrimeField(p) = ed_p.ring() else {
        return Err(Error::RingMismatch("Fp".into(), ed_p.ring().tag()));
    };
    if ed_q.len() != ed_p.len() {
        return Err(Error::Dimension(format!("{} rational vs {} modular divisors", ed_q.len(), ed_p.len())));
    }
    let test = ObstructionTest::Reduction;
    let (ms, vals) = match rational_valuations(ed_q) {
        Ok(x) => x,
        Err(why) => return Ok(ObstructionReport::inconclusive(test, p, why)),
    };
    if ed_p.divisors().iter().any(|d| d.is_zero()) {
        return Ok(ObstructionReport::inconclusive(test, p, "a divisor over F_p is zero"));
    }
    let fp_ring = ed_p.ring();

    // irreducible factors mod p of each rational factor, with multiplicity
    let mut weights: BTreeMap<Vec<u64>, Vec<u32>> = BTreeMap::new();
    for (f, &m) in ms.iter().enumerate() {
        let (a, m0) = split_p(m, p as usize);
        let e = if a == 0 { 1 } else { totient((p as usize).pow(a)) as u32 };
        let (_, phi) = cyclotomic_in(m0, fp_ring).to_fp_dense();
        for g in fp::factor_squarefree(&phi, p) {
            weights.entry(g).or_insert_with(|| vec![0; ms.len()])[f] += e;
        }
    }

    // valuations of the F_p divisors at each of those irreducibles
    let mut images = Vec::new();
    let mut residual: Vec<Vec<u64>> = ed_p.divisors().iter().map(|d| d.to_fp_dense().1).collect();
    for (g, w) in &weights {
        let mut target = Vec::with_capacity(residual.len());
        for r in residual.iter_mut() {
            let mut v = 0;
            loop {
                let (quo, rem) = fp::divrem(r, g, p);
                if !rem.is_empty() {
                    break;
                }
                *r = quo;
                v += 1;
            }
            target.push(v);
        }
        let label = LaurentPoly::from_fp_dense(p, 0, g.clone()).to_string();
        images.push(ValuationImage { label, weights: w.clone(), target: sorted(target) });
    }
    let factors: Vec<String> = ms.iter().map(|m| format!("Φ{m}")).collect();
    let system = ValuationSystem { rows: ed_q.len(), factors, targets: vals.into_iter().map(sorted).collect(), images };
    if let Some(i) = residual.iter().position(|r| fp::deg(r).unwrap_or(0) > 0) {
        return Ok(ObstructionReport {
            test,
            p,
            status: ObstructionStatus::Obstructed,
            detail: format!("divisor {} over F_p has a factor that no rational factor reduces to", i + 1),
            system: Some(system),
            assignment: None,
        });
    }
    Ok(ObstructionReport::from_system(test, p, system, budget))
}

/// Test against the integer elementary divisors of the matrix at `q = 1`.
pub fn q1_obstruction(ed_q: &EDList, ed_z: &EDList, p: u64) -> Result<ObstructionReport> {
    q1_obstruction_with_budget(ed_q, ed_z, p, DEFAULT_BUDGET)
}

pub fn q1_obstruction_with_budget(ed_q: &EDList, ed_z: &EDList, p: u64, budget: Duration) -> Result<ObstructionReport> {
    CoeffRing::prime_field(p)?;
    if ed_q.ring() != CoeffRing::Rationals {
        return Err(Error::RingMismatch("Q".into(), ed_q.ring().tag()));
    }
    let ints = ed_z.integers().ok_or_else(|| Error::RingMismatch("Z".into(), ed_z.ring().tag()))?;
    if ed_q.len() != ints.len() {
        return Err(Error::Dimension(format!("{} rational vs {} integer divisors", ed_q.len(), ints.len())));
    }
    let test = ObstructionTest::AtOne;
    let (ms, vals) = match rational_valuations(ed_q) {
        Ok(x) => x,
        Err(why) => return Ok(ObstructionReport::inconclusive(test, p, why)),
    };
    if ms.contains(&1) {
        return Ok(ObstructionReport::inconclusive(test, p, "Φ1 vanishes at q = 1"));
    }
    if ints.iter().any(|d| d.is_zero()) {
        return Ok(ObstructionReport::inconclusive(test, p, "an integer divisor is zero"));
    }
    // Phi_m(1) = l if m is a power of the prime l, and 1 otherwise
    let weights: Vec<u32> = ms.iter().map(|&m| u32::from(split_p(m, p as usize).1 == 1)).collect();
    let pb = BigInt::from(p);
    let target = ints
        .iter()
        .map(|d| {
            let mut d = d.clone();
            let mut v = 0;
            while (&d % &pb).is_zero() {
                d /= &pb;
                v += 1;
            }
            v
        })
        .collect();
    let images = vec![ValuationImage { label: p.to_string(), weights, target: sorted(target) }];
    let factors = ms.iter().map(|m| format!("Φ{m}")).collect();
    let system = ValuationSystem { rows: ed_q.len(), factors, targets: vals.into_iter().map(sorted).collect(), images };
    Ok(ObstructionReport::from_system(test, p, system, budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlaurent::quantum_integer;

    const Q: CoeffRing = CoeffRing::Rationals;

    fn ed(ring: CoeffRing, ds: Vec<LaurentPoly>) -> EDList {
        EDList::new(ring, ds)
    }

    #[test]
    fn hook_31_has_no_obstruction_at_2() {
        let f2 = CoeffRing::prime_field(2).unwrap();
        let one = |r| LaurentPoly::one(r);
        let eq = ed(Q, vec![one(Q), one(Q), quantum_integer(4, Q)]);
        let ep = ed(f2, vec![one(f2), one(f2), quantum_integer(4, f2)]);
        let r = nondiag_obstruction(&eq, &ep).unwrap();
        assert_eq!(r.status, ObstructionStatus::NoObstructionFound);
        assert_eq!(r.recheck(), Some(true));
        assert_eq!(r.status.to_string(), "no obstruction found by this test");
    }

    #[test]
    fn parity_mismatch_is_obstructed() {
        // over Q: Phi2 and Phi2 Phi4; over F_2: (q+1) and (q+1)^2 would need
        // valuations {1, 3}
        let f2 = CoeffRing::prime_field(2).unwrap();
        let p2 = cyclotomic_in(2, Q);
        let p24 = &p2 * &cyclotomic_in(4, Q);
        let eq = ed(Q, vec![p2.clone(), p24]);
        let g = cyclotomic_in(2, f2);
        let ep = ed(f2, vec![g.pow(2), g.pow(2)]);
        let r = nondiag_obstruction(&eq, &ep).unwrap();
        assert_eq!(r.status, ObstructionStatus::Obstructed);
        assert_eq!(r.recheck(), Some(true));
    }

    #[test]
    fn foreign_factor_is_obstructed() {
        let f3 = CoeffRing::prime_field(3).unwrap();
        let eq = ed(Q, vec![cyclotomic_in(2, Q)]);
        let ep = ed(f3, vec![LaurentPoly::from_coeffs(f3, 0, &[1, 0, 1])]);
        assert_eq!(nondiag_obstruction(&eq, &ep).unwrap().status, ObstructionStatus::Obstructed);
    }

    #[test]
    fn non_cyclotomic_is_inconclusive() {
        let f3 = CoeffRing::prime_field(3).unwrap();
        let eq = ed(Q, vec![LaurentPoly::from_coeffs(Q, 0, &[2, 0, 1])]);
        let ep = ed(f3, vec![LaurentPoly::from_coeffs(f3, 0, &[2, 0, 1])]);
        assert_eq!(nondiag_obstruction(&eq, &ep).unwrap().status, ObstructionStatus::Inconclusive);
    }

    #[test]
    fn q1_simple() {
        // Phi2 at q = 1 is 2: divisors (2, 2) over Z match (Phi2, Phi2)
        let p2 = cyclotomic_in(2, Q);
        let eq = ed(Q, vec![p2.clone(), p2.clone()]);
        let ez = EDList::from_integers(vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(q1_obstruction(&eq, &ez, 2).unwrap().status, ObstructionStatus::NoObstructionFound);
        let ez = EDList::from_integers(vec![BigInt::from(1), BigInt::from(4)]);
        assert_eq!(q1_obstruction(&eq, &ez, 2).unwrap().status, ObstructionStatus::Obstructed);
    }

    #[test]
    fn split() {
        assert_eq!(split_p(12, 2), (2, 3));
        assert_eq!(split_p(9, 3), (2, 1));
    }
}
