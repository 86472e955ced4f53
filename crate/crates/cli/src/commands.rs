use std::fmt::Write as _;
use std::time::Duration;

use anyhow::Result;
use serde_json::{json, Value};

use specht_core::qlaurent::CoeffRing;
use specht_core::snf::{
    conjugate_duality_check, nondiag_obstruction_with_budget, q1_obstruction_with_budget, smith_field_laurent, smith_integer,
    EDList, ObstructionReport,
};
use specht_core::specht::hook_report;
use specht_core::verify::identity_suite;
use specht_core::{gram_matrix, GramMatrix, Partition};

use crate::cache::Cache;

/// The table of elementary divisors over `Q[q, q^-1]`, one row per line:
/// `n`, the partition, the jump notation, separated by tabs.
pub const GOLDEN_TABLE: &str = include_str!("../../../golden/table.txt");

/// Rendered result of one subcommand.
pub struct Output {
    pub text: String,
    pub json: Value,
    /// 0 on success or match, 1 on mismatch.
    pub status: i32,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output { text, json, status: 0 }
    }
}

pub struct Ctx {
    pub cache: Option<Cache>,
    pub budget: Duration,
}

impl Ctx {
    fn cached<T, F>(&self, key: &str, f: F) -> Result<T>
    where
        T: serde::Serialize + serde::de::DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        match &self.cache {
            Some(c) => c.get_or_compute(key, f),
            None => f(),
        }
    }

    pub fn gram(&self, lambda: &Partition) -> Result<GramMatrix> {
        self.cached(&format!("gram-{lambda}"), || Ok(gram_matrix(lambda)))
    }

    /// Elementary divisors over `ring`; `Z` means the integer Smith form at `q = 1`.
    pub fn divisors(&self, lambda: &Partition, ring: CoeffRing) -> Result<EDList> {
        self.cached(&format!("ed-{}-{lambda}", ring.tag()), || {
            let g = self.gram(lambda)?;
            Ok(match ring {
                CoeffRing::Integers => smith_integer(&g.at_one()?)?,
                _ => smith_field_laurent(&g.to_ring(ring)?)?,
            })
        })
    }
}

fn jump_text(e: &EDList) -> String {
    match e.jumps() {
        Ok(j) => j.to_string(),
        Err(_) => format!("singular, rank {}", e.rank()),
    }
}

fn matrix_text(out: &mut String, g: &GramMatrix) {
    for (i, t) in g.order.iter().enumerate() {
        let _ = writeln!(out, "  t{} = {t}", i + 1);
    }
    for row in &g.entries {
        let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(out, "  {}", cells.join("\t"));
    }
}

pub fn gram(ctx: &Ctx, lambda: &Partition) -> Result<Output> {
    let g = ctx.gram(lambda)?;
    let mut text = format!("G({lambda}): {0} x {0}\n", g.size());
    matrix_text(&mut text, &g);
    Ok(Output::ok(text, serde_json::to_value(&g)?))
}

pub fn snf(ctx: &Ctx, lambda: &Partition, ring: CoeffRing) -> Result<Output> {
    let e = ctx.divisors(lambda, ring)?;
    let jumps = jump_text(&e);
    let mut text = format!("{jumps}\n");
    for (i, d) in e.divisors().iter().enumerate() {
        let _ = writeln!(text, "  d{} = {d}", i + 1);
    }
    let json = json!({ "partition": lambda, "ring": ring, "ed": e, "jumps": jumps });
    Ok(Output::ok(text, json))
}

/// Golden rows with `n <= n_max` as `(n, partition, jumps)`.
pub fn golden_rows(n_max: usize) -> Result<Vec<(usize, Partition, String)>> {
    let mut out = Vec::new();
    for line in GOLDEN_TABLE.lines().filter(|l| !l.trim().is_empty()) {
        let mut cols = line.split('\t');
        let (Some(n), Some(l), Some(j)) = (cols.next(), cols.next(), cols.next()) else {
            anyhow::bail!("malformed golden row `{line}`");
        };
        let n: usize = n.trim().parse()?;
        if n <= n_max {
            out.push((n, l.parse()?, normalize(j)));
        }
    }
    Ok(out)
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn table(ctx: &Ctx, n_max: usize) -> Result<Output> {
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut status = 0;
    for (n, l, expected) in golden_rows(n_max)? {
        let got = jump_text(&ctx.divisors(&l, CoeffRing::Rationals)?);
        let matches = normalize(&got) == expected;
        if !matches {
            status = 1;
            eprintln!("mismatch for ({l}): expected {expected}");
        }
        let _ = writeln!(text, "{n}\t({l})\t{got}");
        rows.push(json!({ "n": n, "partition": l, "jumps": got, "expected": expected, "matches": matches }));
    }
    Ok(Output { text, json: json!({ "rows": rows }), status })
}

pub fn hooks(n: usize, k: usize) -> Result<Output> {
    let r = hook_report(n, k)?;
    let lambda = Partition::hook(n, k);
    let mut text = format!("mixed Gram matrix of ({lambda}): {0} x {0}\n", r.mixed.size());
    matrix_text(&mut text, &r.mixed);
    match &r.certificate {
        Ok(e) => {
            let diag: Vec<String> = e.divisors().iter().map(|d| d.to_string()).collect();
            let _ = writeln!(text, "certificate accepted, diagonal ({})", diag.join(", "));
        }
        Err(why) => {
            let _ = writeln!(text, "certificate refused: {why}");
        }
    }
    let pred: Vec<String> = r.predicted.divisors().iter().map(|d| d.to_string()).collect();
    let _ = writeln!(text, "predicted elementary divisors ({})", pred.join(", "));
    let _ = writeln!(text, "predicted jumps {}", jump_text(&r.predicted));
    let _ = writeln!(text, "{}", if r.matches() { "match" } else { "MISMATCH" });
    let status = if r.matches() { 0 } else { 1 };
    Ok(Output { text, json: serde_json::to_value(&r)?, status })
}

pub fn dual(lambda: &Partition) -> Result<Output> {
    let r = conjugate_duality_check(lambda)?;
    let mut text = format!("({}) and ({})\n", r.partition, r.conjugate);
    let _ = writeln!(text, "  h = {}", r.hook_polynomial);
    let _ = writeln!(text, "  ({}): {}", r.partition, jump_text(&r.ed));
    let _ = writeln!(text, "  ({}): {}", r.conjugate, jump_text(&r.ed_conjugate));
    match r.failing_index {
        None => text.push_str("d_i(lambda) d_(m+1-i)(lambda') ~ h for every i\n"),
        Some(i) => {
            let _ = writeln!(text, "duality fails at i = {i}");
        }
    }
    let status = if r.holds() { 0 } else { 1 };
    Ok(Output { text, json: serde_json::to_value(&r)?, status })
}

fn report_text(out: &mut String, title: &str, r: &ObstructionReport) {
    let _ = writeln!(out, "{title}: {}", r.status);
    let _ = writeln!(out, "  {}", r.detail);
}

pub fn obstruct(ctx: &Ctx, lambda: &Partition, p: u64) -> Result<Output> {
    let ed_q = ctx.divisors(lambda, CoeffRing::Rationals)?;
    let ed_p = ctx.divisors(lambda, CoeffRing::prime_field(p)?)?;
    let ed_z = ctx.divisors(lambda, CoeffRing::Integers)?;
    let nd = nondiag_obstruction_with_budget(&ed_q, &ed_p, ctx.budget)?;
    let q1 = q1_obstruction_with_budget(&ed_q, &ed_z, p, ctx.budget)?;
    let mut text = format!("({lambda}) at p = {p}\n");
    for (label, e) in [("Q".to_string(), &ed_q), (format!("F{p}"), &ed_p), ("Z".to_string(), &ed_z)] {
        let _ = writeln!(text, "  {:<6}{}", format!("{label}:"), jump_text(e));
    }
    report_text(&mut text, "against F_p", &nd);
    report_text(&mut text, "against Z at q = 1", &q1);
    let json = json!({ "partition": lambda, "p": p, "nondiag": nd, "q1": q1 });
    Ok(Output::ok(text, json))
}

pub fn verify(n_max: usize) -> Result<Output> {
    let r = identity_suite(n_max)?;
    let mut text = String::new();
    for c in &r.checks {
        let mark = if c.passed() { "ok" } else { "FAIL" };
        let _ = writeln!(text, "{mark}\t{} (n <= {}): {} cases", c.name, c.n_max, c.cases);
        for f in &c.failures {
            let _ = writeln!(text, "\t  failed: {f}");
        }
        for l in &c.log {
            let _ = writeln!(text, "\t  {l}");
        }
    }
    let status = if r.passed() { 0 } else { 1 };
    Ok(Output { text, json: serde_json::to_value(&r)?, status })
}
