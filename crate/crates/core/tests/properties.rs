use proptest::prelude::*;

use specht_core::coxeter::Word;
use specht_core::hecke::{inverse_generator, HeckeElt};
use specht_core::qlaurent::{quantum_factorial, CoeffRing, LaurentPoly};
use specht_core::snf::{smith_field_laurent, EDList};
use specht_core::Perm;

const Z: CoeffRing = CoeffRing::Integers;
const Q: CoeffRing = CoeffRing::Rationals;

fn laurent(ring: CoeffRing) -> impl Strategy<Value = LaurentPoly> {
    (-2i64..=2, prop::collection::vec(-3i64..=3, 0..4)).prop_map(move |(low, c)| LaurentPoly::from_coeffs(ring, low, &c))
}

fn matrix(ring: CoeffRing, n: usize) -> impl Strategy<Value = Vec<Vec<LaurentPoly>>> {
    prop::collection::vec(prop::collection::vec(laurent(ring), n), n)
}

#[derive(Clone, Debug)]
enum Op {
    Swap(usize, usize),
    /// row/col `a` += `f` times row/col `b`
    AddMul(usize, usize, Vec<i64>, i64),
    /// scale by `+-q^e`
    Unit(usize, bool, i64),
}

fn ops(n: usize) -> impl Strategy<Value = Vec<Op>> {
    let op = prop_oneof![
        (0..n, 0..n).prop_map(|(a, b)| Op::Swap(a, b)),
        (0..n, 0..n, prop::collection::vec(-2i64..=2, 1..3), -1i64..=1).prop_map(|(a, b, c, e)| Op::AddMul(a, b, c, e)),
        (0..n, any::<bool>(), -2i64..=2).prop_map(|(a, s, e)| Op::Unit(a, s, e)),
    ];
    prop::collection::vec(op, 0..12)
}

fn apply_rows(m: &mut [Vec<LaurentPoly>], ring: CoeffRing, op: &Op) {
    match op {
        Op::Swap(a, b) => m.swap(*a, *b),
        Op::AddMul(a, b, c, e) if a != b => {
            let f = LaurentPoly::from_coeffs(ring, *e, c);
            let add: Vec<LaurentPoly> = m[*b].iter().map(|x| &f * x).collect();
            for (x, y) in m[*a].iter_mut().zip(&add) {
                *x += y;
            }
        }
        Op::AddMul(..) => {}
        Op::Unit(a, s, e) => {
            let u = LaurentPoly::monomial(ring, if *s { 1 } else { -1 }, *e);
            for x in m[*a].iter_mut() {
                *x = &*x * &u;
            }
        }
    }
}

fn transpose(m: &[Vec<LaurentPoly>]) -> Vec<Vec<LaurentPoly>> {
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// `S M T` with `S`, `T` products of elementary unimodular moves.
fn scramble(m: &[Vec<LaurentPoly>], ring: CoeffRing, rows: &[Op], cols: &[Op]) -> Vec<Vec<LaurentPoly>> {
    let mut a = m.to_vec();
    for op in rows {
        apply_rows(&mut a, ring, op);
    }
    let mut t = transpose(&a);
    for op in cols {
        apply_rows(&mut t, ring, op);
    }
    transpose(&t)
}

fn diag(e: &EDList) -> Vec<Vec<LaurentPoly>> {
    let n = e.len();
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { e.divisors()[i].clone() } else { LaurentPoly::zero(e.ring()) }).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in laurent(Z), b in laurent(Z), c in laurent(Z)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&(&a + &b) - &b - &a).is_zero());
        prop_assert_eq!(&a * &LaurentPoly::one(Z), a.clone());
        if !b.is_zero() {
            prop_assert_eq!((&a * &b).div_exact(&b), Some(a.clone()));
        }
    }

    #[test]
    fn canonical_is_an_associate(a in laurent(Q)) {
        prop_assume!(!a.is_zero());
        let c = a.canonical();
        prop_assert!(c.associate_of(&a));
        prop_assert_eq!(c.low_exp(), Some(0));
        prop_assert_eq!(c.canonical(), c.clone());
    }

    #[test]
    fn reduced_words_give_the_same_element(n in 2usize..=5, word in prop::collection::vec(1usize..5, 0..10)) {
        let word: Vec<usize> = word.into_iter().filter(|&i| i < n).collect();
        let w = Word(word.clone());
        prop_assume!(w.is_reduced(n));
        let mut h = HeckeElt::one(n, Z);
        for &i in &word {
            h = h.mul_gen_right(i).unwrap();
        }
        let p = Perm::from_word(n, &word).unwrap();
        prop_assert_eq!(h, HeckeElt::basis(&p, Z));
        prop_assert_eq!(p.reduced_word().len(), word.len());
    }

    #[test]
    fn generators_invert(n in 2usize..=5, i in 1usize..5) {
        prop_assume!(i < n);
        let t = HeckeElt::generator(n, i, Z).unwrap();
        let inv = inverse_generator(n, i, Z).unwrap();
        prop_assert_eq!(t.multiply(&inv).unwrap(), HeckeElt::one(n, Z));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn smith_is_unimodular_invariant(m in matrix(Q, 6), rows in ops(6), cols in ops(6)) {
        let e = smith_field_laurent(&m).unwrap();
        let e2 = smith_field_laurent(&scramble(&m, Q, &rows, &cols)).unwrap();
        prop_assert_eq!(e, e2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn smith_is_unimodular_invariant_mod_2(m in matrix(CoeffRing::prime_field(2).unwrap(), 6), rows in ops(6), cols in ops(6)) {
        let f2 = CoeffRing::prime_field(2).unwrap();
        let e = smith_field_laurent(&m).unwrap();
        prop_assert_eq!(e, smith_field_laurent(&scramble(&m, f2, &rows, &cols)).unwrap());
    }

    #[test]
    fn smith_is_idempotent(m in matrix(Q, 5)) {
        let e = smith_field_laurent(&m).unwrap();
        prop_assert_eq!(smith_field_laurent(&diag(&e)).unwrap(), e.clone());
        e.check_chain().unwrap();
    }

    #[test]
    fn jumps_round_trip(m in matrix(Q, 5)) {
        let e = smith_field_laurent(&m).unwrap();
        prop_assume!(e.divisors().iter().all(|d| !d.is_zero()));
        let j = e.jumps().unwrap();
        prop_assert_eq!(j.divisors(), e.divisors().to_vec());
    }
}

#[test]
fn poincare_polynomial_is_the_quantum_factorial() {
    for n in 1..=6 {
        let mut p = LaurentPoly::zero(Z);
        for w in Perm::all(n) {
            p += &LaurentPoly::monomial(Z, 1, w.length() as i64);
        }
        assert_eq!(p, quantum_factorial(n, Z), "n = {n}");
    }
}
