use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use super::*;
use crate::ainfinity::{AlgebraSpec, BimoduleSpec};
use crate::examples::{build, NAMES};
use crate::linfinity::{lmodule_from_bimodule, symmetrize_algebra};
use crate::novikov::{exp_int, q_int, Valuation};
use crate::window::{all_words, BarSpace};
use crate::words::full_symmetrize;

fn alg(name: &str) -> AlgebraSpec {
    build(name).unwrap()
}

fn lie(a: &AlgebraSpec) -> LInfinitySpec {
    symmetrize_algebra(a, a.max_arity().max(1))
}

fn module(a: &AlgebraSpec) -> LModuleSpec {
    lmodule_from_bimodule(&BimoduleSpec::diagonal(a), a.max_arity().max(1)).unwrap()
}

/// Graded-symmetric monomials of length `1..=lmax` per degree, counted as
/// multisets of letters with odd letters used at most once.
fn free_counts(alpha: &Alphabet, lmax: usize) -> BTreeMap<i64, usize> {
    let mut seen = BTreeSet::new();
    let mut out = BTreeMap::new();
    for w in all_words(alpha.names.len(), lmax).into_iter().filter(|w| !w.is_empty()) {
        let mut m = w.clone();
        m.sort();
        let odd_repeat = m.windows(2).any(|p| p[0] == p[1] && alpha.sdeg[p[0] as usize] % 2 != 0);
        if !odd_repeat && seen.insert(m.clone()) {
            *out.entry(m.iter().map(|&l| alpha.sdeg[l as usize]).sum()).or_insert(0) += 1;
        }
    }
    out
}

fn nonzero(m: BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
    m.into_iter().filter(|(_, n)| *n > 0).collect()
}

#[test]
fn zero_brackets_count_symmetric_words() {
    let a = alg("E-zero");
    let r = cyclic_ce_homology(&lie(&a), &Window::new(3, exp_int(1))).unwrap();
    assert_eq!(nonzero(r.dims()), free_counts(&a.alphabet, 3));
}

#[test]
fn zero_module_maps_count_cells() {
    let a = alg("E-zero");
    let r = ce_chain_homology(&module(&a), &Window::new(2, exp_int(1))).unwrap();
    let cells: usize = (0..=2).map(|k| CeSpace::new(&module(&a)).keys(k).len()).sum();
    assert_eq!(r.total(), cells);
}

#[test]
fn symmetric_chains_agree_with_bar_route() {
    let w = Window::new(3, exp_int(2));
    for n in NAMES {
        let a = alg(n);
        let ours = cyclic_ce_homology(&lie(&a), &w).unwrap();
        let bar = assemble(&BarSpace::new(&a, Flavor::Symmetric, 1), &w).unwrap().homology();
        assert_eq!(nonzero(ours.dims()), nonzero(bar.dims()), "{}", n);
    }
}

#[test]
fn module_differential_squares_to_zero() {
    for n in NAMES {
        let a = alg(n);
        let ce = CeSpace::new(&module(&a));
        let e = Some(exp_int(3));
        for k in 0..=3 {
            for (_, w) in ce.keys(k) {
                let mut once = SignedVector::new(Flavor::MarkedSymmetric, e);
                ce.differential(&w, &Nov::one(e), &mut once);
                let mut twice = SignedVector::new(Flavor::MarkedSymmetric, e);
                for (u, c) in once.iter() {
                    ce.differential(u, c, &mut twice);
                }
                assert!(twice.is_zero(), "{} {}: {}", n, ce.m.alphabet.render(&w), twice.render(&ce.m.alphabet));
            }
        }
    }
}

#[test]
fn empty_module_is_void() {
    let a = alg("E2");
    let m = lmodule_from_bimodule(&BimoduleSpec::empty(&a), 2).unwrap();
    let r = ce_chain_homology(&m, &Window::new(3, exp_int(3))).unwrap();
    assert_eq!(r.total(), 0);
}

#[test]
fn unit_curvature_unit_symmetrizes_to_zero() {
    let a = alg("E2");
    let e = Some(exp_int(3));
    let mut v = SignedVector::new(Flavor::Plain, e);
    let (i, x) = (a.letter("I"), a.letter("v"));
    v.add_term(Word::plain(vec![i, x, i]), &Nov::one(e));
    assert!(full_symmetrize(&a.alphabet, &v).unwrap().is_zero());
}

#[test]
fn free_case_has_no_quantum_contribution() {
    let a = alg("E-free");
    let r = cyclic_ce_homology(&lie(&a), &Window::new(4, exp_int(1))).unwrap();
    assert_eq!(nonzero(r.dims()), free_counts(&a.alphabet, 4));
}

fn gen(i: Letter, c: i64, e: i64, lmax: usize) -> DualSeries {
    DualSeries::monomial(Word::plain(vec![i]), q_int(c), &Slot::new(exp_int(e), 0), exp_int(4), lmax)
}

#[test]
fn unit_and_generators() {
    let a = alg("E2");
    let l = lie(&a);
    let win = DualWindow::algebra(&l);
    let one = DualSeries::one(exp_int(4), 3);
    assert!(win.differential(&one).unwrap().is_zero());
    let v = a.letter("v");
    let dx = win.differential(&gen(v, 1, 0, 3)).unwrap();
    assert_eq!(dx.value(&Word::empty()), Nov::monomial(q_int(1), exp_int(1), 0, Some(exp_int(4))));
    let f = gen(v, 3, 1, 3).plus(&gen(a.letter("I"), 1, 0, 3));
    assert_eq!(one.times(&a.alphabet, &f), f);
}

#[test]
fn generators_commute_with_sign() {
    let a = alg("E-free");
    let alpha = &a.alphabet;
    for i in 0..a.size() as Letter {
        for j in 0..a.size() as Letter {
            let (x, y) = (gen(i, 1, 0, 3), gen(j, 1, 0, 3));
            let s = if alpha.sdeg[i as usize] * alpha.sdeg[j as usize] % 2 != 0 { -1 } else { 1 };
            assert_eq!(x.times(alpha, &y), y.times(alpha, &x).scaled(&q_int(s)));
            if i == j && alpha.sdeg[i as usize] % 2 != 0 {
                assert!(x.times(alpha, &x).is_zero());
            }
        }
    }
}

/// `(fg)(w) = Σ_S ε(S) f(w_S) g(w_rest)` over unshuffles of a chain.
fn coproduct_product(alpha: &Alphabet, f: &DualSeries, g: &DualSeries, w: &Word, ceiling: Exp) -> Nov {
    let mut out = Nov::zero(Some(ceiling));
    for (chosen, rest, s) in unshuffles(alpha, w) {
        let (u, su) = canonical(alpha, &Word::plain(pick(w, &chosen))).unwrap();
        let (r, sr) = canonical(alpha, &Word::plain(pick(w, &rest))).unwrap();
        out += &(&f.value(&u) * &g.value(&r)).scale(&(s * su * sr));
    }
    out
}

fn series(alpha: &Alphabet, lmax: usize, terms: &[(Vec<u8>, i64, i64)]) -> DualSeries {
    let n = alpha.names.len() as u8;
    let mut f = DualSeries::zero(exp_int(4), lmax);
    for (w, c, e) in terms {
        let letters: Vec<Letter> = w.iter().map(|l| (l % n) as Letter).collect();
        if let Some((rep, s)) = canonical(alpha, &Word::plain(letters)) {
            f.add_term(rep, &Nov::monomial(q_int(*c) * s, exp_int(*e), 0, Some(exp_int(4))));
        }
    }
    f
}

fn term_strategy() -> impl Strategy<Value = Vec<(Vec<u8>, i64, i64)>> {
    proptest::collection::vec((proptest::collection::vec(0u8..4, 0..3), -2i64..3, 0i64..3), 0..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn product_is_dual_to_the_coproduct(f in term_strategy(), g in term_strategy()) {
        let a = alg("E-free");
        let alpha = &a.alphabet;
        let (f, g) = (series(alpha, 4, &f), series(alpha, 4, &g));
        let fg = f.times(alpha, &g);
        for k in 0..=4 {
            for (_, w) in (SymSpace { l: lie(&a), min_len: 0 }).keys(k) {
                prop_assert_eq!(fg.value(&w), coproduct_product(alpha, &f, &g, &w, exp_int(4)));
            }
        }
    }

    #[test]
    fn product_is_associative_and_graded_commutative(f in term_strategy(), g in term_strategy(), h in term_strategy()) {
        let a = alg("E-free");
        let alpha = &a.alphabet;
        let (f, g, h) = (series(alpha, 4, &f), series(alpha, 4, &g), series(alpha, 4, &h));
        prop_assert_eq!(f.times(alpha, &g).times(alpha, &h), f.times(alpha, &g.times(alpha, &h)));
        // Split g by parity: g = g₀ + g₁ and f likewise.
        let even = |s: &DualSeries| s.plus(&s.parity_twist(alpha)).scaled(&q_frac(1, 2));
        let odd = |s: &DualSeries| s.minus(&s.parity_twist(alpha)).scaled(&q_frac(1, 2));
        let swapped = g.times(alpha, &even(&f)).plus(&g.parity_twist(alpha).times(alpha, &odd(&f)));
        prop_assert_eq!(f.times(alpha, &g), swapped);
    }

    #[test]
    fn dual_differential_is_a_derivation(f in term_strategy(), g in term_strategy(), name in 0usize..3) {
        let a = alg(["E-free", "E2", "E3"][name]);
        let alpha = &a.alphabet;
        let l = lie(&a);
        let win = DualWindow::algebra(&l);
        let (f, g) = (series(alpha, 3, &f), series(alpha, 3, &g));
        let lhs = win.differential(&f.times(alpha, &g)).unwrap();
        let rhs = win.differential(&f).unwrap().times(alpha, &g)
            .plus(&f.parity_twist(alpha).times(alpha, &win.differential(&g).unwrap()));
        prop_assert!(lhs.agrees_below(&rhs, exp_int(4), 2));
        let twice = win.differential(&win.differential(&f).unwrap()).unwrap();
        prop_assert!(twice.is_zero());
    }
}

use crate::novikov::q_frac;

#[test]
fn e2_obstruction_is_certified() {
    let a = alg("E2");
    let r = obstruction_extract(&a, 3, exp_int(4)).unwrap();
    assert_eq!(r.obstructions.len(), 1);
    assert!(r.obstructions[0].closed && !r.obstructions[0].exact);
    let y = r.candidate.clone().unwrap();
    let v = a.letter("v");
    assert_eq!(y.terms.len(), 1);
    assert_eq!(y.value(&Word::plain(vec![v])), Nov::monomial(q_int(1), exp_int(-1), 0, Some(exp_int(5))));
    let cert = r.certificate.expect(&r.message);
    assert!(cert.h.is_zero());
    let l = lie(&a);
    let win = DualWindow::algebra(&l);
    let samples = sample_cocycles(&win, 3, exp_int(4), 20, 7).unwrap();
    assert_eq!(samples.len(), 20);
    for z in &samples {
        assert!(win.differential(z).unwrap().is_zero());
        assert!(cert.check(&win, z).unwrap(), "{}", z.render());
    }
}

#[test]
fn exact_obstruction_gives_no_certificate() {
    let r = obstruction_extract(&alg("E3"), 3, exp_int(4)).unwrap();
    assert!(r.obstructions.iter().all(|o| o.closed && o.exact));
    assert!(r.certificate.is_none() && r.candidate.is_none());
    assert!(r.message.contains("all primary obstructions exact"));
    for n in ["E-zero", "E1", "E-free"] {
        assert!(obstruction_extract(&alg(n), 3, exp_int(4)).unwrap().message.starts_with("no obstruction"));
    }
}

#[test]
fn negative_valuation_is_rejected() {
    let a = alg("E3");
    let l = lie(&a);
    let win = DualWindow::algebra(&l);
    let y = DualSeries::monomial(Word::plain(vec![a.letter("v")]), q_int(1), &Slot::new(exp_int(-1), 0), exp_int(5), 4);
    let why = vanishing_certificate(&win, &y).unwrap().unwrap_err();
    assert!(why.contains("negative valuation"), "{}", why);
    let half = DualSeries::monomial(Word::plain(vec![a.letter("v")]), q_frac(1, 2), &Slot::new(exp_int(-1), 0), exp_int(5), 4);
    assert!(vanishing_certificate(&DualWindow::algebra(&lie(&alg("E2"))), &half).unwrap().unwrap_err().contains("length-zero"));
}

#[test]
fn exact_unit_is_certified_with_trivial_h() {
    let a = alg("E2");
    let win = DualWindow::algebra(&lie(&a));
    let y = DualSeries::monomial(Word::plain(vec![a.letter("v")]), q_int(1), &Slot::new(exp_int(-1), 0), exp_int(5), 4);
    let cert = vanishing_certificate(&win, &y).unwrap().unwrap();
    assert!(cert.h.is_zero());
    assert_eq!(cert.h_inv, DualSeries::one(cert.h.ceiling, cert.h.lmax));
    assert_eq!(cert.h.valuation(), Valuation::Infinite);
}

#[test]
fn module_cocycles_are_coboundaries_on_e2() {
    let a = alg("E2");
    let cert = obstruction_extract(&a, 3, exp_int(4)).unwrap().certificate.unwrap();
    let r = ce_module_vanishing(&module(&a), Some(&cert), 3, exp_int(4), 20, 11).unwrap();
    assert_eq!(r.sampled, 20);
    assert!(r.passed(), "{:?}", r.failures.first());
    let empty = lmodule_from_bimodule(&BimoduleSpec::empty(&a), 2).unwrap();
    let r = ce_module_vanishing(&empty, Some(&cert), 3, exp_int(4), 20, 11).unwrap();
    assert!(r.passed() && r.sampled == 0);
    let e3 = alg("E3");
    let none = obstruction_extract(&e3, 3, exp_int(4)).unwrap().certificate;
    assert!(ce_module_vanishing(&module(&e3), none.as_ref(), 3, exp_int(4), 20, 11).is_err());
}

#[test]
fn dual_dims_match_chain_dims() {
    let w = Window::new(3, exp_int(2)).with_halo(0);
    for n in NAMES {
        let a = alg(n);
        let spaces: Vec<Box<dyn Space>> = vec![Box::new(SymSpace { l: lie(&a), min_len: 1 }), Box::new(CeSpace::new(&module(&a)))];
        for s in spaces {
            let dims = duality_dims(s.as_ref(), &w).unwrap();
            assert!(!dims.is_empty());
            for (d, (h, c)) in dims {
                assert_eq!(h, c, "{} {} degree {}", n, s.label(), d);
            }
        }
    }
}
