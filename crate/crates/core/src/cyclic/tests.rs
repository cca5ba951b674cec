use std::collections::BTreeMap;

use proptest::prelude::*;

use super::cycles::*;
use super::stilde::*;
use super::*;
use crate::examples::{build, NAMES};
use crate::hochschild::Hochschild;
use crate::novikov::exp_int;
use crate::window::Verdict;
use crate::words::{cyclic_rep, Letter};

fn alg(name: &str) -> AlgebraSpec {
    build(name).unwrap()
}

fn nonzero(r: &HomologyReport) -> BTreeMap<i64, usize> {
    r.dims().into_iter().filter(|(_, n)| *n > 0).collect()
}

#[test]
fn zero_algebra_counts_cyclic_orbits() {
    let a = alg("E-zero");
    let w = Window::new(3, exp_int(1));
    let r = cyclic_homology(&a, &w).unwrap();
    let mut want: BTreeMap<i64, usize> = BTreeMap::new();
    for l in all_words(3, 3).into_iter().filter(|l| !l.is_empty()) {
        let word = Word::plain(l);
        if cyclic_rep(&a.alphabet, &word).map_or(false, |o| o.rep == word) {
            *want.entry(a.alphabet.word_deg(&word)).or_default() += 1;
        }
    }
    assert_eq!(r.dims(), want);
}

#[test]
fn bicomplex_identities_hold_on_examples() {
    let w = Window::new(3, exp_int(3));
    for n in NAMES {
        let ops = CyclicOps::new(&alg(n));
        for r in ops.identities(&w).iter().chain(ops.square_defects(&w).iter()) {
            assert!(r.is_empty(), "{} {}: {:?}", n, r.label, r.entries.first());
        }
        assert!(ops.resolution_defect(&w).is_empty(), "{}", n);
    }
}

#[test]
fn planted_twists_are_all_caught() {
    let algs: Vec<AlgebraSpec> = NAMES.iter().map(|n| alg(n)).collect();
    let suite = mutation_suite(&algs, &Window::new(3, exp_int(2)));
    assert_eq!(suite.len(), MUTATIONS.len());
    for m in &suite {
        assert!(m.caught.is_some(), "{:?} not caught", m.twist);
    }
}

#[test]
fn quotient_convention_matches_invariants() {
    let w = Window::new(3, exp_int(3));
    for n in ["E-zero", "E-free", "E1", "E2", "E3"] {
        let a = alg(n);
        let inv = cyclic_homology(&a, &w).unwrap();
        let quo = connes_quotient_homology(&a, &w).unwrap();
        assert!(inv.refused.is_empty() && quo.refused.is_empty(), "{}", n);
        assert_eq!(inv.dims(), quo.dims(), "{}", n);
    }
}

#[test]
fn one_column_is_hochschild() {
    for n in ["E-zero", "E1", "E2"] {
        let a = alg(n);
        let t = tsygan_total_homology(&a, &Window::new(3, exp_int(2)), 1).unwrap();
        let h = Hochschild::new(&crate::ainfinity::BimoduleSpec::diagonal(&a)).unwrap().homology(&Window::new(2, exp_int(2))).unwrap();
        assert_eq!(nonzero(&t), nonzero(&h), "{}", n);
    }
}

#[test]
fn tsygan_columns_stabilize_to_cyclic() {
    let a = alg("E2");
    let w = Window::new(3, exp_int(2));
    let cyc = cyclic_homology(&a, &w).unwrap();
    let top = *cyc.dims().keys().max().unwrap();
    for p in [2u32, 4, 6] {
        let t = tsygan_total_homology(&a, &w, p).unwrap();
        for (d, n) in t.dims() {
            if d >= stable_from(top, p) {
                assert_eq!(n, cyc.dim(d).unwrap_or(0), "P={} degree {}", p, d);
            }
        }
    }
}

#[test]
fn stilde_contracts_on_e2() {
    let a = alg("E2");
    let w = Window::new(2, exp_int(2)).with_slope(2);
    let st = Stilde::build(&a, &w).unwrap();
    let r = st.identity_report(&w).unwrap();
    assert!(r.is_empty(), "{:?}", r.entries.first());
    assert!(r.checked > 0);
}

#[test]
fn plain_homotopy_misses_by_curvature_term() {
    let a = alg("E2");
    let e = Some(exp_int(3));
    for x in 0..a.size() as Letter {
        let cell = SignedVector::basis(Flavor::Plain, Word::plain(vec![x]), &Slot::zero(), e);
        let st = Stilde::build(&a, &Window::new(1, exp_int(3)).with_slope(2)).unwrap();
        assert_eq!(plain_s_residual(&a, &cell).unwrap(), st.curvature_shift(&cell));
        assert!(!st.curvature_shift(&cell).is_zero());
    }
}

#[test]
fn flat_curvature_keeps_plain_homotopy() {
    let a = alg("E1");
    let w = Window::new(3, exp_int(1));
    let st = Stilde::build(&a, &w).unwrap();
    assert!(st.identity_report(&w).unwrap().is_empty());
    let ops = CyclicOps::new(&a);
    for (word, slot) in st.window_cells(&w) {
        let x = SignedVector::basis(Flavor::Plain, word, &slot, Some(w.emax));
        assert_eq!(st.connes_b(&ops, &x).unwrap(), st.classical_b(&ops, &x));
    }
}

#[test]
fn connes_operator_identities_on_e2() {
    let a = alg("E2");
    let w = Window::new(2, exp_int(2)).with_slope(2);
    let st = Stilde::build(&a, &w).unwrap();
    let ops = CyclicOps::new(&a);
    for r in st.b_identities(&ops, &w).unwrap().iter() {
        assert!(r.is_empty(), "{}: {:?}", r.label, r.entries.first());
    }
    let mut extra = 0;
    for (word, slot) in st.window_cells(&w) {
        let x = SignedVector::basis(Flavor::Plain, word, &slot, Some(w.emax));
        let diff = st.connes_b(&ops, &x).unwrap().minus(&st.classical_b(&ops, &x));
        if !diff.is_zero() {
            extra += 1;
        }
        if !st.degenerate(&x.iter().next().unwrap().0) {
            assert!(st.normalize(&diff).is_zero());
        }
    }
    assert!(extra > 0);
}

#[test]
fn bb_complex_matches_cyclic_on_e2() {
    let a = alg("E2");
    let w = Window::new(2, exp_int(2)).with_slope(2);
    let cyc = stilde::cyclic_homology_bb_window(&a, &w).unwrap();
    let top = *cyc.dims().keys().max().unwrap();
    for p in [2u32, 3] {
        let from = top - 2 * p as i64 + 3;
        for normalized in [false, true] {
            let bb = bb_total_homology(&a, &w, p, normalized).unwrap();
            let refused: Vec<i64> = bb.refused.iter().map(|(d, _)| *d).collect();
            let mut compared = 0;
            for (d, n) in bb.dims() {
                if d >= from && !refused.contains(&d) {
                    assert_eq!(n, cyc.dim(d).unwrap_or(0), "P={} normalized={} degree {}", p, normalized, d);
                    compared += 1;
                }
            }
            assert!(compared > 0);
        }
    }
}

#[test]
fn connes_sequence_is_exact() {
    for a in [alg("E-zero"), alg("E2"), AlgebraSpec::new("empty", &[])] {
        let r = connes_sequence_check(&a, &Window::new(2, exp_int(2)), 4).unwrap();
        assert!(r.is_exact(), "{}: {:?}", a.name, r.nodes.iter().find(|n| !n.is_exact()));
    }
}

#[test]
fn gamma_on_e2() {
    let a = alg("E2");
    let w = Window::new(1, exp_int(5)).with_slope(2);
    let r = unit_cycle_report(&a, &w).unwrap();
    assert!(r.holds(), "{}", r.boundary.render(&a.alphabet));
    assert!(r.certified());
    assert_eq!(r.steps.len(), 5);
}

#[test]
fn alpha_on_e4() {
    let a = alg("E4");
    let w = Window::new(1, exp_int(4)).with_slope(2);
    let r = alpha_build(&a, exp_int(4), Some(&w)).unwrap();
    assert_eq!(r.kmax, 3);
    assert!(r.holds(), "{:?}", r.lemma);
    assert!(matches!(r.verdict, Some(Verdict::NotBoundary(_))));
    assert!(r.certified());
}

proptest! {
    #[test]
    fn norm_kills_one_minus_t(degs in proptest::collection::vec(-1i64..3, 1..4)) {
        let basis: Vec<(String, i64)> = degs.iter().enumerate().map(|(i, d)| (format!("z{}", i), *d)).collect();
        let refs: Vec<(&str, i64)> = basis.iter().map(|(n, d)| (n.as_str(), *d)).collect();
        let a = AlgebraSpec::new("random", &refs);
        let ops = CyclicOps::new(&a);
        prop_assert!(ops.resolution_defect(&Window::new(3, exp_int(1))).is_empty());
    }
}
