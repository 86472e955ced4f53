//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use specht_core::qlaurent::binomial;
use specht_core::snf::{nondiag_obstruction, q1_obstruction, smith_field_laurent, smith_integer, ObstructionReport};
use specht_core::specht::{gram_rank_at, hook_report, QPoint};
use specht_core::*;

const GOLDEN: &str = include_str!("../../../golden/table.txt");
const Q: CoeffRing = CoeffRing::Rationals;

/// Prime used by the determinant oracle.
const P: u64 = (1 << 61) - 1;

fn fp(p: u64) -> CoeffRing {
    CoeffRing::prime_field(p).unwrap()
}

fn part(s: &str) -> Partition {
    s.trim_matches(|c| c == '(' || c == ')').parse().unwrap()
}

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn inv(a: u64) -> u64 {
    powmod(a, P - 2)
}

fn big_mod(x: &BigInt) -> u64 {
    let m = BigInt::from(P);
    let r = ((x % &m) + &m) % &m;
    r.to_u64().unwrap()
}

/// `f(q0) mod P` straight from the rational coefficients.
fn eval(f: &LaurentPoly, q0: u64) -> u64 {
    let qi = inv(q0);
    f.terms().fold(0, |acc, (e, c)| {
        let c = mulmod(big_mod(c.numer()), inv(big_mod(c.denom())));
        let x = if e >= 0 { powmod(q0, e as u64) } else { powmod(qi, (-e) as u64) };
        (acc + mulmod(c, x)) % P
    })
}

/// Determinant of a numeric matrix mod `P` by Gaussian elimination.
fn det_mod(mut a: Vec<Vec<u64>>) -> u64 {
    let n = a.len();
    let mut det = 1u64;
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| a[r][c] != 0) else {
            return 0;
        };
        if r != c {
            a.swap(r, c);
            det = (P - det) % P;
        }
        det = mulmod(det, a[c][c]);
        let pinv = inv(a[c][c]);
        for r in c + 1..n {
            let f = mulmod(a[r][c], pinv);
            if f == 0 {
                continue;
            }
            for j in c..n {
                a[r][j] = (a[r][j] + P - mulmod(f, a[c][j])) % P;
            }
        }
    }
    det
}

/// `det G = +-q^a prod d_i`, tested at two points mod `P`; returns `a`.
fn det_matches(g: &GramMatrix, ed: &EDList) -> Option<i64> {
    let bound: i64 = g.entries.iter().flatten().filter_map(|e| e.high_exp()).map(|e| e.abs()).sum::<i64>() + 64;
    let mut found = None;
    for q0 in [3_141_592_653u64, 2_718_281_828] {
        let num = det_mod(g.entries.iter().map(|r| r.iter().map(|e| eval(e, q0)).collect()).collect());
        let den = ed.divisors().iter().fold(1, |acc, d| mulmod(acc, eval(d, q0)));
        if den == 0 {
            return None;
        }
        let ratio = mulmod(num, inv(den));
        let a = (0..=bound).find_map(|a| {
            for (e, x) in [(a, powmod(q0, a as u64)), (-a, powmod(inv(q0), a as u64))] {
                if ratio == x || ratio == (P - x) % P {
                    return Some(e);
                }
            }
            None
        })?;
        match found {
            Some(b) if b != a => return None,
            _ => found = Some(a),
        }
    }
    found
}

/// Elementary divisors over `Q` specialised at `q = 1` against the integer
/// Smith form of `G(1)`: same rank, and same `|det|` when no divisor vanishes.
fn q1_consistent(g: &GramMatrix, ed_q: &EDList, ed_z: &EDList) -> bool {
    let vals: Vec<BigInt> = ed_q
        .divisors()
        .iter()
        .map(|d| {
            let v = d.at_one().unwrap();
            assert!(v.is_integer(), "canonical rational divisors are integral here");
            v.to_integer()
        })
        .collect();
    let ints = ed_z.integers().unwrap();
    let rank_z = ints.iter().filter(|x| !x.is_zero()).count();
    let rank_q1 = specht_core::snf::rank_rational(
        g.at_one().unwrap().into_iter().map(|r| r.into_iter().map(num_rational::BigRational::from_integer).collect()).collect(),
    );
    if rank_z != rank_q1 {
        return false;
    }
    if vals.iter().any(|v| v.is_zero()) {
        return true;
    }
    let prod_q: BigInt = vals.iter().product::<BigInt>().abs();
    let prod_z: BigInt = ints.iter().product::<BigInt>().abs();
    rank_z == ints.len() && prod_q == prod_z
}

struct Checked {
    lambda: Partition,
    gram: GramMatrix,
    ed_q: EDList,
}

struct Run {
    lines: Vec<(bool, String)>,
    matrices: Vec<Checked>,
}

impl Run {
    fn report(&mut self, ok: bool, line: String) {
        println!("{} {line}", if ok { "PASS" } else { "FAIL" });
        self.lines.push((ok, line));
    }
}

fn jumps(e: &EDList) -> String {
    e.jumps().map(|j| j.to_string()).unwrap_or_else(|err| format!("<{err}>"))
}

fn rechecks(r: &ObstructionReport) -> bool {
    r.recheck() == Some(true)
}

fn criterion_1(run: &mut Run) {
    let t = Instant::now();
    let mut bad = Vec::new();
    for line in GOLDEN.lines().filter(|l| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split('\t').collect();
        let l = part(cols[1]);
        let g = gram_matrix(&l);
        let ed = smith_field_laurent(&g.to_ring(Q).unwrap()).unwrap();
        let got = jumps(&ed);
        if got != cols[2] {
            bad.push(format!("{l}: got {got}, expected {}", cols[2]));
        }
        run.matrices.push(Checked { lambda: l, gram: g, ed_q: ed });
    }
    let n = GOLDEN.lines().filter(|l| !l.trim().is_empty()).count();
    run.report(bad.is_empty(), format!("1 table over Q: {n} rows, {} mismatches {bad:?} ({:.1?})", bad.len(), t.elapsed()));
}

/// Divisors over `Q`, the listed primes and `Z` at `q = 1`.
fn example(run: &mut Run, lambda: &str, primes: &[u64]) -> (EDList, BTreeMap<u64, EDList>, EDList, Vec<String>) {
    let l = part(lambda);
    let g = gram_matrix(&l);
    let ed_q = smith_field_laurent(&g.to_ring(Q).unwrap()).unwrap();
    let mut out = vec![format!("Q {}", jumps(&ed_q))];
    let mut ed_p = BTreeMap::new();
    for &p in primes {
        let e = smith_field_laurent(&g.to_ring(fp(p)).unwrap()).unwrap();
        out.push(format!("F{p} {}", jumps(&e)));
        ed_p.insert(p, e);
    }
    let ed_z = smith_integer(&g.at_one().unwrap()).unwrap();
    out.push(format!("Z {}", jumps(&ed_z)));
    run.matrices.push(Checked { lambda: l, gram: g, ed_q: ed_q.clone() });
    (ed_q, ed_p, ed_z, out)
}

fn criterion_2(run: &mut Run) {
    let t = Instant::now();
    let (ed_q, ed_p, ed_z, got) = example(run, "3,3,2", &[2]);
    let expect = [
        "Q →Φ2²→ 1 →Φ4→ 20 →Φ3Φ5→ 20 →Φ4→ 1",
        "F2 →Φ2³→ 1 →Φ2→ 20 →Φ3Φ5→ 20 →Φ2→ 1",
        "Z →2³→ 21 →3·5→ 21",
    ];
    let nd = nondiag_obstruction(&ed_q, &ed_p[&2]).unwrap();
    let q1 = q1_obstruction(&ed_q, &ed_z, 2).unwrap();
    let ok = got == expect
        && nd.status == ObstructionStatus::Obstructed
        && q1.status == ObstructionStatus::Obstructed
        && rechecks(&nd)
        && rechecks(&q1);
    run.report(
        ok,
        format!("2 example (3,3,2): {got:?}; p = 2: F_p test {}, q = 1 test {} ({:.1?})", nd.status, q1.status, t.elapsed()),
    );
}

fn criterion_3(run: &mut Run) {
    let t = Instant::now();
    let (ed_q, ed_p, ed_z, got) = example(run, "4,2,1,1", &[2, 3]);
    let expect = [
        "Q →Φ2→ 14 →Φ2→ 1 →Φ4→ 30 →Φ7→ 30 →Φ4→ 1 →Φ2→ 14",
        "F2 →Φ2→ 14 →Φ2²→ 1 →Φ2→ 30 →Φ7→ 30 →Φ2→ 1 →Φ2²→ 14",
        "F3 →Φ2→ 13 →Φ2→ 2 →Φ4→ 30 →Φ7→ 30 →Φ4→ 2 →Φ2→ 13",
        "Z →2→ 14 →2²→ 31 →7→ 31 →2²→ 14",
    ];
    let nd2 = nondiag_obstruction(&ed_q, &ed_p[&2]).unwrap();
    let nd3 = nondiag_obstruction(&ed_q, &ed_p[&3]).unwrap();
    // the q = 1 comparison is claimed at p = 2 only; p = 3 is reported
    let q2 = q1_obstruction(&ed_q, &ed_z, 2).unwrap();
    let q3 = q1_obstruction(&ed_q, &ed_z, 3).unwrap();
    let ok = got == expect
        && [&nd2, &nd3, &q2].iter().all(|r| r.status == ObstructionStatus::Obstructed && rechecks(r))
        && q3.recheck() != Some(false);
    run.report(
        ok,
        format!(
            "3 example (4,2,1,1): {got:?}; F_p test p = 2 {}, p = 3 {}; q = 1 test p = 2 {}, p = 3 {} ({:.1?})",
            nd2.status,
            nd3.status,
            q2.status,
            q3.status,
            t.elapsed()
        ),
    );
}

fn criterion_4(run: &mut Run) {
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut count = 0;
    for n in 1..=9 {
        for k in 0..n {
            count += 1;
            let r = hook_report(n, k).unwrap();
            if !r.matches() {
                bad.push(format!("({n},{k}) certificate {:?}", r.certificate.as_ref().err()));
            }
            let l = Partition::hook(n, k);
            let g = gram_matrix(&l);
            for ring in [Q, fp(2), fp(3)] {
                let ed = smith_field_laurent(&g.to_ring(ring).unwrap()).unwrap();
                if ed != r.predicted.to_ring(ring).unwrap() {
                    bad.push(format!("({n},{k}) over {}", ring.tag()));
                }
                if ring == Q {
                    run.matrices.push(Checked { lambda: l.clone(), gram: g.clone(), ed_q: ed });
                }
            }
        }
    }
    run.report(bad.is_empty(), format!("4 hooks n <= 9: {count} shapes, certificate and Q/F2/F3 divisors; failures {bad:?} ({:.1?})", t.elapsed()));
}

fn criterion_5(run: &mut Run) {
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut count = 0;
    for n in 1..=7 {
        for l in Partition::all(n) {
            count += 1;
            let r = specht_core::snf::conjugate_duality_check(&l).unwrap();
            if !r.holds() {
                bad.push(format!("{l} at {:?}", r.failing_index));
            }
        }
    }
    run.report(bad.is_empty(), format!("5 conjugate duality n <= 7: {count} partitions, failures {bad:?} ({:.1?})", t.elapsed()));
}

fn criterion_6(run: &mut Run) {
    let t = Instant::now();
    let r = specht_core::verify::identity_suite(9).unwrap();
    let summary: Vec<String> = r
        .checks
        .iter()
        .map(|c| format!("{} (n <= {}): {}/{}", c.name, c.n_max, c.cases - c.failures.len(), c.cases))
        .collect();
    for c in &r.checks {
        for l in &c.log {
            println!("    {}: {l}", c.name);
        }
    }
    run.report(r.passed(), format!("6 identity suite: {} ({:.1?})", summary.join("; "), t.elapsed()));
}

fn criterion_7(run: &mut Run) {
    let t = Instant::now();
    let mut bad = Vec::new();
    for c in &run.matrices {
        if det_matches(&c.gram, &c.ed_q).is_none() {
            bad.push(format!("{}: det", c.lambda));
        }
        let ed_z = smith_integer(&c.gram.at_one().unwrap()).unwrap();
        if !q1_consistent(&c.gram, &c.ed_q, &ed_z) {
            bad.push(format!("{}: q = 1", c.lambda));
        }
    }
    let count = run.matrices.len();
    run.report(bad.is_empty(), format!("7 det and q = 1 consistency: {count} matrices, failures {bad:?} ({:.1?})", t.elapsed()));
}

fn criterion_8(run: &mut Run) {
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut seen = Vec::new();
    for (n, p) in [(3usize, 3u64), (4, 2), (5, 5), (6, 3)] {
        for k in (0..n).filter(|&k| (k as u64) < p) {
            let rank = gram_rank_at(&Partition::hook(n, k), fp(p), &QPoint::Value(1)).unwrap();
            let expect = binomial(n as i64 - 2, k as i64) as usize;
            seen.push(format!("({n},{k},p={p}):{rank}"));
            if rank != expect {
                bad.push(format!("n = {n}, k = {k}, p = {p}: rank {rank}, expected {expect}"));
            }
        }
    }
    run.report(bad.is_empty(), format!("8 ranks at q = 1: {} failures {bad:?} [{}] ({:.1?})", bad.len(), seen.join(" "), t.elapsed()));
}

fn main() {
    let mut run = Run { lines: Vec::new(), matrices: Vec::new() };
    criterion_1(&mut run);
    criterion_2(&mut run);
    criterion_3(&mut run);
    criterion_4(&mut run);
    criterion_5(&mut run);
    criterion_6(&mut run);
    criterion_7(&mut run);
    criterion_8(&mut run);
    let failed = run.lines.iter().filter(|(ok, _)| !ok).count();
    println!("{} of {} criteria passed", run.lines.len() - failed, run.lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
