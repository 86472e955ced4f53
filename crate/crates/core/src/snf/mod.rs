//! Smith normal forms, elementary divisor lists and diagonalizability tests.

mod eval;
mod local;
mod minors;
mod obstruction;
mod smith;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlaurent::{cyclo_display, hook_polynomial, superscript, CoeffRing, LaurentPoly};
use crate::specht::gram_matrix;
use crate::tableaux::Partition;

pub use minors::{minor_gcd, minor_ideal_check, minor_ideal_checks, MinorGcd};
pub use obstruction::{
    nondiag_obstruction, nondiag_obstruction_with_budget, q1_obstruction, q1_obstruction_with_budget, Assignment,
    ObstructionReport, ObstructionStatus, ObstructionTest, ValuationImage, ValuationSystem, DEFAULT_BUDGET,
};
pub use smith::{rank_mod_p, rank_rational, smith_field_laurent, smith_integer};

/// Elementary divisors `d_1 | d_2 | ... | d_m` in canonical form.
///
/// Over `Z` with constant entries this is the integer Smith form; otherwise
/// the entries are Laurent polynomials with lowest exponent 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EDList {
    ring: CoeffRing,
    divisors: Vec<LaurentPoly>,
}

impl EDList {
    /// Canonicalizes each divisor. The list is not checked for the chain
    /// property; see [`EDList::check_chain`].
    pub fn new(ring: CoeffRing, divisors: Vec<LaurentPoly>) -> Self {
        let divisors = divisors
            .into_iter()
            .map(|d| {
                assert_eq!(d.ring(), ring, "divisor in the wrong ring");
                d.canonical()
            })
            .collect();
        EDList { ring, divisors }
    }

    pub fn from_integers(ds: Vec<BigInt>) -> Self {
        let ring = CoeffRing::Integers;
        EDList { ring, divisors: ds.into_iter().map(|d| LaurentPoly::constant(ring, d.abs())).collect() }
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn divisors(&self) -> &[LaurentPoly] {
        &self.divisors
    }

    pub fn len(&self) -> usize {
        self.divisors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.divisors.is_empty()
    }

    /// Number of nonzero divisors.
    pub fn rank(&self) -> usize {
        self.divisors.iter().filter(|d| !d.is_zero()).count()
    }

    pub fn product(&self) -> LaurentPoly {
        self.divisors.iter().fold(LaurentPoly::one(self.ring), |acc, d| &acc * d)
    }

    /// Every divisor is a constant (an integer Smith form).
    pub fn is_integral(&self) -> bool {
        self.divisors.iter().all(|d| d.span().is_none_or(|s| s == 0))
    }

    pub fn integers(&self) -> Option<Vec<BigInt>> {
        if !self.is_integral() || self.ring != CoeffRing::Integers {
            return None;
        }
        Some(self.divisors.iter().map(|d| d.coeff(0).to_integer()).collect())
    }

    pub fn check_chain(&self) -> Result<()> {
        for i in 1..self.divisors.len() {
            let (a, b) = (&self.divisors[i - 1], &self.divisors[i]);
            if b.is_zero() {
                continue;
            }
            if a.is_zero() || !a.divides(b) {
                return Err(Error::BrokenChain(i));
            }
        }
        Ok(())
    }

    pub fn to_ring(&self, ring: CoeffRing) -> Result<EDList> {
        Ok(EDList::new(ring, self.divisors.iter().map(|d| d.to_ring(ring)).collect::<Result<_>>()?))
    }

    /// Quotients of consecutive distinct divisors with their run lengths.
    pub fn jumps(&self) -> Result<JumpNotation> {
        self.check_chain()?;
        let mut steps: Vec<JumpStep> = Vec::new();
        let mut prev = LaurentPoly::one(self.ring);
        for (i, d) in self.divisors.iter().enumerate() {
            if d.is_zero() {
                return Err(Error::Dimension(format!("divisor {} is zero", i + 1)));
            }
            if i > 0 && *d == prev {
                steps.last_mut().expect("a step exists after the first divisor").count += 1;
                continue;
            }
            let factor = d.div_exact(&prev).ok_or(Error::BrokenChain(i))?.canonical();
            steps.push(JumpStep { factor, count: 1 });
            prev = d.clone();
        }
        Ok(JumpNotation { ring: self.ring, steps })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DivisorRepr {
    Int(String),
    Poly(LaurentPoly),
}

#[derive(Serialize, Deserialize)]
struct EDListRepr {
    ring: CoeffRing,
    divisors: Vec<DivisorRepr>,
}

impl Serialize for EDList {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let ints = self.integers();
        let divisors = match ints {
            Some(v) => v.into_iter().map(|x| DivisorRepr::Int(x.to_string())).collect(),
            None => self.divisors.iter().cloned().map(DivisorRepr::Poly).collect(),
        };
        EDListRepr { ring: self.ring, divisors }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for EDList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = EDListRepr::deserialize(d)?;
        let divisors = r
            .divisors
            .into_iter()
            .map(|x| match x {
                DivisorRepr::Int(s) => {
                    let v: BigInt = s.parse().map_err(D::Error::custom)?;
                    Ok(LaurentPoly::constant(r.ring, v))
                }
                DivisorRepr::Poly(p) => p.to_ring(r.ring).map_err(D::Error::custom),
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        Ok(EDList::new(r.ring, divisors))
    }
}

/// One step `→f→ count`: `count` further divisors equal to the previous one
/// times `f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JumpStep {
    pub factor: LaurentPoly,
    pub count: usize,
}

/// Compact form of an [`EDList`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JumpNotation {
    pub ring: CoeffRing,
    pub steps: Vec<JumpStep>,
}

impl JumpNotation {
    /// Renders as `→1→ 1 →Φ3→ 3`, factoring Laurent jumps into cyclotomics
    /// `Φ_m` with `m <= max_m` and integer jumps into primes.
    pub fn render(&self, max_m: usize) -> String {
        self.steps
            .iter()
            .map(|s| format!("→{}→ {}", render_factor(&s.factor, max_m), s.count))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Expands back into the full divisor list.
    pub fn divisors(&self) -> Vec<LaurentPoly> {
        let mut out = Vec::new();
        let mut cur = LaurentPoly::one(self.ring);
        for s in &self.steps {
            cur = &cur * &s.factor;
            out.extend(std::iter::repeat_n(cur.clone(), s.count));
        }
        out
    }
}

impl fmt::Display for JumpNotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let deg = self.steps.iter().filter_map(|s| s.factor.span()).max().unwrap_or(0);
        f.write_str(&self.render(max_index_for_degree(deg)))
    }
}

/// Largest `m` with `phi(m) <= deg` (every cyclotomic factor of a degree-`deg`
/// polynomial has index at most this).
pub fn max_index_for_degree(deg: usize) -> usize {
    // phi(m) >= sqrt(m / 2), so m <= 2 deg^2 suffices as a search bound
    let top = 2 * deg * deg + 2;
    let mut phi: Vec<usize> = (0..=top).collect();
    for i in 2..=top {
        if phi[i] == i {
            for j in (i..=top).step_by(i) {
                phi[j] -= phi[j] / i;
            }
        }
    }
    (1..=top).rev().find(|&m| phi[m] <= deg).unwrap_or(1)
}

fn render_factor(f: &LaurentPoly, max_m: usize) -> String {
    if f.span() == Some(0) && f.ring() == CoeffRing::Integers {
        return render_integer(&f.coeff(0).to_integer());
    }
    cyclo_display(f, max_m).to_string()
}

fn render_integer(n: &BigInt) -> String {
    let Some(mut n) = n.abs().to_u64() else {
        return n.to_string();
    };
    if n <= 1 {
        return n.to_string();
    }
    let mut parts = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            parts.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        parts.push((n, 1));
    }
    parts
        .into_iter()
        .map(|(p, e)| if e == 1 { p.to_string() } else { format!("{p}{}", superscript(e)) })
        .collect::<Vec<_>>()
        .join("·")
}

/// Checks that a square matrix is upper-triangular with a diagonal chain
/// `d_1 | d_2 | ...` and each `d_i` dividing its whole row. When it is, the
/// diagonal is the list of elementary divisors.
pub fn divisible_diag_certificate(t: &[Vec<LaurentPoly>]) -> Result<EDList> {
    let n = t.len();
    if t.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("certificate needs a square matrix".into()));
    }
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let ring = t[0][0].ring();
    for (i, row) in t.iter().enumerate() {
        for (j, x) in row.iter().enumerate().take(i) {
            if !x.is_zero() {
                return Err(Error::CertificateRefused { row: i, col: j, reason: "nonzero below the diagonal".into() });
            }
        }
        let d = &row[i];
        if d.is_zero() {
            return Err(Error::CertificateRefused { row: i, col: i, reason: "zero on the diagonal".into() });
        }
        if i > 0 && !t[i - 1][i - 1].divides(d) {
            return Err(Error::CertificateRefused {
                row: i,
                col: i,
                reason: "diagonal entry not divisible by its predecessor".into(),
            });
        }
        for (j, x) in row.iter().enumerate().skip(i + 1) {
            if !d.divides(x) {
                return Err(Error::CertificateRefused { row: i, col: j, reason: "entry not divisible by the diagonal".into() });
            }
        }
    }
    Ok(EDList::new(ring, t.iter().enumerate().map(|(i, r)| r[i].clone()).collect()))
}

/// Outcome of comparing the divisors of `G(lambda)` with those of the
/// conjugate partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub partition: Partition,
    pub conjugate: Partition,
    pub hook_polynomial: LaurentPoly,
    pub ed: EDList,
    pub ed_conjugate: EDList,
    /// First `i` (1-based) where `d_i(lambda) d_{m+1-i}(lambda')` is not `h_lambda` up to a unit.
    pub failing_index: Option<usize>,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.failing_index.is_none()
    }
}

/// Over `Q[q, q^-1]`: `d_i(lambda) * d_{m+1-i}(lambda') ~ h_lambda` for all `i`.
pub fn conjugate_duality_check(lambda: &Partition) -> Result<DualityReport> {
    let ring = CoeffRing::Rationals;
    let conj = lambda.conjugate();
    let ed = smith_field_laurent(&gram_matrix(lambda).to_ring(ring)?)?;
    let ed_conjugate = smith_field_laurent(&gram_matrix(&conj).to_ring(ring)?)?;
    let h = hook_polynomial(lambda, ring);
    let m = ed.len();
    if ed_conjugate.len() != m {
        return Err(Error::Dimension(format!("{} vs {} divisors", m, ed_conjugate.len())));
    }
    let failing_index = (0..m)
        .find(|&i| {
            let prod = &ed.divisors()[i] * &ed_conjugate.divisors()[m - 1 - i];
            prod.is_zero() || !prod.associate_of(&h)
        })
        .map(|i| i + 1);
    Ok(DualityReport { partition: lambda.clone(), conjugate: conj, hook_polynomial: h, ed, ed_conjugate, failing_index })
}

/// Number of divisors equal to 1.
pub fn count_units(e: &EDList) -> usize {
    e.divisors().iter().filter(|d| d.is_one()).count()
}
