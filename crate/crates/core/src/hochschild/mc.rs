//! Bounding cochains: the Maurer-Cartan residual, an order-by-order solver,
//! the deformed operations `m^b`, the inclusion `i^b`, and `γ_b = I ⊗ e^b`.
//!
//! `e^b = 1 + b + b⊗b + ⋯` without factorials; it is finite below a ceiling
//! because `b` has positive valuation.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::ainfinity::{add_op_term, class_labels, AlgebraSpec, BimoduleSpec, HomomorphismSpec, OpTable, OpTerm};
use crate::error::{Error, Result};
use crate::novikov::{Exp, Nov, Slot, Valuation, Q};
use crate::window::linalg::{solve, SparseQ};
use crate::window::{all_words, monoid_slots, Window};
use crate::words::{Flavor, Letter, SignedVector, Word};

/// Check that `b` is a combination of single letters of shifted degree 0.
fn check_cochain(a: &AlgebraSpec, b: &SignedVector) -> Result<()> {
    for (w, c) in b.iter() {
        if w.len() != 1 || b.flavor != Flavor::Plain {
            return Err(Error::Invalid(format!("cochain term {} is not a single letter", a.alphabet.render(w))));
        }
        for t in c.terms() {
            let d = a.cell_degree(w, &t.slot());
            if (a.z2 && d.rem_euclid(2) != 0) || (!a.z2 && d != 0) {
                return Err(Error::Invalid(format!("cochain term {} has odd shifted degree", a.alphabet.render(w))));
            }
        }
    }
    match b.valuation() {
        Valuation::Finite(v) if v <= Exp::zero() => {
            Err(Error::Invalid("e^b diverges: the cochain has valuation 0".into()))
        }
        _ => Ok(()),
    }
}

/// Tensor product of plain vectors (concatenation, no signs).
fn tensor(x: &SignedVector, y: &SignedVector, ceiling: Option<Exp>) -> SignedVector {
    let mut out = SignedVector::new(Flavor::Plain, ceiling);
    for (u, c) in x.iter() {
        for (w, d) in y.iter() {
            let mut letters = u.letters.clone();
            letters.extend_from_slice(&w.letters);
            out.add_term(Word::plain(letters), &(c * d));
        }
    }
    out
}

fn unit_vector(ceiling: Option<Exp>) -> SignedVector {
    SignedVector::basis(Flavor::Plain, Word::empty(), &Slot::zero(), ceiling)
}

/// `e^b` below the ceiling.
pub fn exp_vector(a: &AlgebraSpec, b: &SignedVector, ceiling: Exp) -> Result<SignedVector> {
    check_cochain(a, b)?;
    let e = Some(ceiling);
    let b = b.truncated(e);
    let mut total = unit_vector(e);
    let mut power = unit_vector(e);
    loop {
        power = tensor(&power, &b, e);
        if power.is_zero() {
            return Ok(total);
        }
        total = total.plus(&power);
    }
}

/// Apply the operations to whole words: `Σ m_k(w)` for each word `w`.
fn m_of(a: &AlgebraSpec, x: &SignedVector) -> SignedVector {
    let mut out = SignedVector::new(Flavor::Plain, x.ceiling);
    for (w, c) in x.iter() {
        for t in a.op(&w.letters) {
            out.add_term(Word::plain(vec![t.out]), &c.mul_monomial(&t.coeff, &t.slot));
        }
    }
    out
}

/// `Σ_k m_k(b, …, b)`; zero exactly when `b` is a bounding cochain below the ceiling.
pub fn mc_residual(a: &AlgebraSpec, b: &SignedVector, ceiling: Exp) -> Result<SignedVector> {
    Ok(m_of(a, &exp_vector(a, b, ceiling)?))
}

/// `d̂(e^b)` below the window ceiling.
pub fn mc_defect(a: &AlgebraSpec, b: &SignedVector, w: &Window) -> Result<SignedVector> {
    let e = exp_vector(a, b, w.emax)?;
    a.dhat(&e, w.arity())
}

/// Solve the Maurer-Cartan equation energy level by level: at each level the
/// new part of `b` must cancel the residual through the energy-zero `m₁`.
pub fn solve_mc(a: &AlgebraSpec, ceiling: Exp) -> Result<SignedVector> {
    let e = Some(ceiling);
    let slots = monoid_slots(&a.op_slots(), ceiling);
    let energies: BTreeSet<Exp> = slots.iter().map(|s| s.energy).filter(|x| *x > Exp::zero()).collect();
    let m1: Vec<(Letter, &[OpTerm])> = (0..a.size() as Letter).map(|x| (x, a.op(&[x]))).collect();
    let mut b = SignedVector::new(Flavor::Plain, e);
    for level in energies {
        let residual = mc_residual(a, &b, ceiling)?;
        let mut rows: Vec<(Letter, Slot)> = Vec::new();
        let mut target = SparseQ::new();
        let row = |rows: &mut Vec<(Letter, Slot)>, key: (Letter, Slot)| match rows.iter().position(|r| *r == key) {
            Some(i) => i,
            None => {
                rows.push(key);
                rows.len() - 1
            }
        };
        for (w, c) in residual.iter() {
            for t in c.terms().iter().filter(|t| t.energy == level) {
                let i = row(&mut rows, (w.letters[0], t.slot()));
                target.insert(i, -t.coeff.clone());
            }
        }
        if target.is_empty() {
            continue;
        }
        let mut unknowns = Vec::new();
        let mut cols = Vec::new();
        for s in slots.iter().filter(|s| s.energy == level) {
            for &(x, terms) in &m1 {
                if a.cell_degree(&Word::plain(vec![x]), s) != 0 {
                    continue;
                }
                let mut col = SparseQ::new();
                for t in terms.iter().filter(|t| t.slot.energy.is_zero()) {
                    let i = row(&mut rows, (t.out, s.shift(&t.slot)));
                    *col.entry(i).or_insert_with(Q::zero) += &t.coeff;
                }
                col.retain(|_, q| !q.is_zero());
                unknowns.push((x, s.clone()));
                cols.push(col);
            }
        }
        let coeffs = solve(&cols, &target).ok_or_else(|| {
            Error::Refused(format!("obstructed at energy {}: the residual is not exact", crate::novikov::fmt_exp(&level)))
        })?;
        for (k, q) in coeffs {
            let (x, s) = &unknowns[k];
            b.add_monomial(Word::plain(vec![*x]), &q, s);
        }
    }
    Ok(b)
}

/// `e^b ⊗ x₁ ⊗ e^b ⊗ ⋯ ⊗ x_k ⊗ e^b`.
pub fn interleave(eb: &SignedVector, inputs: &[Letter]) -> SignedVector {
    let e = eb.ceiling;
    let mut acc = eb.clone();
    for &x in inputs {
        let letter = SignedVector::basis(Flavor::Plain, Word::plain(vec![x]), &Slot::zero(), e);
        acc = tensor(&tensor(&acc, &letter, e), eb, e);
    }
    acc
}

/// The deformed algebra `m^b_k(x̄) = m(e^b x₁ e^b ⋯ x_k e^b)`, materialized
/// for arities up to `lmax`.
pub fn deform(a: &AlgebraSpec, b: &SignedVector, lmax: usize, ceiling: Exp) -> Result<AlgebraSpec> {
    let residual = mc_residual(a, b, ceiling)?;
    if !residual.is_zero() {
        return Err(Error::Invalid(format!("not a bounding cochain: residual {}", residual.render(&a.alphabet))));
    }
    let eb = exp_vector(a, b, ceiling)?;
    let mut ops = OpTable::new();
    for word in all_words(a.size(), lmax) {
        let out = m_of(a, &interleave(&eb, &word));
        for (u, c) in out.iter() {
            for t in c.terms() {
                add_op_term(&mut ops, word.clone(), OpTerm { slot: t.slot(), out: u.letters[0], coeff: t.coeff.clone() });
            }
        }
    }
    let mut d = a.clone();
    d.name = format!("{}^b", a.name);
    class_labels(&mut d.classes, ops.values().flatten().map(|t| t.slot.clone()));
    d.ops = ops;
    Ok(d)
}

/// `i^b: (C, m^b) → (C, m)` with `i^b₀(1) = b`, `i^b₁ = id`.
pub fn inclusion(a: &AlgebraSpec, deformed: &AlgebraSpec, b: &SignedVector) -> Result<HomomorphismSpec> {
    check_cochain(a, b)?;
    let mut f = HomomorphismSpec::identity(a);
    f.name = format!("i^b_{}", a.name);
    f.source = deformed.clone();
    for (w, c) in b.iter() {
        for t in c.terms() {
            add_op_term(&mut f.ops, Vec::new(), OpTerm { slot: t.slot(), out: w.letters[0], coeff: t.coeff.clone() });
        }
    }
    Ok(f)
}

/// `γ_b = I ⊗ e^b` as a chain of the diagonal bimodule.
pub fn gamma_b(m: &BimoduleSpec, b: &SignedVector, ceiling: Exp) -> Result<SignedVector> {
    let a = &m.left;
    let unit = a.unit.ok_or_else(|| Error::Spec(format!("{} has no unit", a.name)))?;
    let eb = exp_vector(a, b, ceiling)?;
    let mut out = SignedVector::new(Flavor::Marked, Some(ceiling));
    for (w, c) in eb.iter() {
        out.add_term(super::chain_word(unit, &w.letters), c);
    }
    Ok(out)
}

/// The augmentation applied to `d̂^* f` for the coordinate functional `f` of
/// a bar word: the coefficient of that word in `d̂(e^b)`.
pub fn augmentation_eval(a: &AlgebraSpec, b: &SignedVector, word: &Word, w: &Window) -> Result<Nov> {
    let d = mc_defect(a, b, w)?;
    Ok(d.get(word).cloned().unwrap_or_else(|| Nov::zero(Some(w.emax))))
}

/// Coordinate functionals on window words with a nonzero augmentation value.
pub fn augmentation_failures(a: &AlgebraSpec, b: &SignedVector, w: &Window) -> Result<Vec<(String, Nov)>> {
    let d = mc_defect(a, b, w)?;
    let mut out = Vec::new();
    for word in all_words(a.size(), w.lmax) {
        let word = Word::plain(word);
        if let Some(c) = d.get(&word) {
            out.push((a.alphabet.render(&word), c.clone()));
        }
    }
    Ok(out)
}
