//! Series of dual variables: functionals on symmetric chains.
//!
//! A monomial `x^w` is stored on the sorted word `w`; its value on the
//! chain `w` is `∏ m!` over letter multiplicities. The product is dual to
//! the unshuffle coproduct, `(fg)(w) = Σ f(w₍₁₎) g(w₍₂₎)`, with no Koszul
//! sign, so `d̂*f = f∘d̂` is a derivation of degree one on the nose.

use std::collections::BTreeMap;
use std::fmt::Write;

use num_traits::Zero;

use crate::error::Result;
use crate::linfinity::{LInfinitySpec, LModuleSpec};
use crate::novikov::{Exp, Nov, Slot, Valuation, Q};
use crate::window::{Key, Space};
use crate::words::{Alphabet, Word};

use super::{canonical, weight, CeSpace, SymSpace};

/// A truncated dual series. Values are known on monomials whose unmarked
/// length is at most `lmax`, for energies below `ceiling`; no energy lies
/// below `floor`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualSeries {
    pub terms: BTreeMap<Word, Nov>,
    pub floor: Exp,
    pub ceiling: Exp,
    pub lmax: usize,
}

fn unmarked_len(w: &Word) -> usize {
    (0..w.len()).filter(|&i| !w.is_marked(i)).count()
}

impl DualSeries {
    pub fn zero(ceiling: Exp, lmax: usize) -> DualSeries {
        DualSeries { terms: BTreeMap::new(), floor: Exp::zero(), ceiling, lmax }
    }

    /// The unit: evaluation on the length-zero part.
    pub fn one(ceiling: Exp, lmax: usize) -> DualSeries {
        let mut s = DualSeries::zero(ceiling, lmax);
        s.add_term(Word::empty(), &Nov::one(Some(ceiling)));
        s
    }

    /// `c T^slot` times the monomial on a canonical word.
    pub fn monomial(w: Word, c: Q, slot: &Slot, ceiling: Exp, lmax: usize) -> DualSeries {
        let mut s = DualSeries::zero(ceiling, lmax);
        s.floor = slot.energy.min(Exp::zero());
        s.add_term(w, &Nov::monomial(c, slot.energy, slot.maslov, Some(ceiling)));
        s
    }

    pub fn add_term(&mut self, w: Word, c: &Nov) {
        if unmarked_len(&w) > self.lmax {
            return;
        }
        if let Valuation::Finite(v) = c.valuation() {
            self.floor = self.floor.min(v);
        }
        let c = c.clone().with_ceiling(Some(self.ceiling));
        let entry = self.terms.entry(w.clone()).or_insert_with(|| Nov::zero(Some(self.ceiling)));
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    /// The value on the chain `w` (a canonical word).
    pub fn value(&self, w: &Word) -> Nov {
        match self.terms.get(w) {
            Some(c) => c.scale(&weight(w)),
            None => Nov::zero(Some(self.ceiling)),
        }
    }

    /// Store a value on a chain as a monomial coefficient.
    pub fn add_value(&mut self, w: Word, v: &Nov) {
        let c = v.scale(&(Q::from_integer(1.into()) / weight(&w)));
        self.add_term(w, &c);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn valuation(&self) -> Valuation {
        self.terms.values().map(|c| c.valuation()).min().unwrap_or(Valuation::Infinite)
    }

    pub fn scaled(&self, c: &Q) -> DualSeries {
        let mut out = DualSeries { terms: BTreeMap::new(), ..self.clone() };
        for (w, n) in &self.terms {
            out.add_term(w.clone(), &n.scale(c));
        }
        out
    }

    /// Restrict to a smaller ceiling and length bound.
    pub fn truncated(&self, ceiling: Exp, lmax: usize) -> DualSeries {
        let mut out = DualSeries::zero(ceiling.min(self.ceiling), lmax.min(self.lmax));
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c);
        }
        out.floor = out.floor.min(self.floor);
        out
    }

    pub fn plus(&self, other: &DualSeries) -> DualSeries {
        let mut out = DualSeries::zero(self.ceiling.min(other.ceiling), self.lmax.min(other.lmax));
        out.floor = self.floor.min(other.floor);
        for (w, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn minus(&self, other: &DualSeries) -> DualSeries {
        self.plus(&other.scaled(&-Q::from_integer(1.into())))
    }

    /// The product, or the right action of an algebra series on a module
    /// series when `self` is marked.
    pub fn times(&self, alpha: &Alphabet, other: &DualSeries) -> DualSeries {
        let ceiling = (self.ceiling + other.floor).min(other.ceiling + self.floor);
        let mut out = DualSeries::zero(ceiling, self.lmax.min(other.lmax));
        out.floor = self.floor + other.floor;
        for (u, a) in &self.terms {
            for (w, b) in &other.terms {
                let mut letters = u.letters.clone();
                letters.extend_from_slice(&w.letters);
                let joined = Word { letters, mark: u.mark };
                if unmarked_len(&joined) > out.lmax {
                    continue;
                }
                if let Some((rep, s)) = canonical(alpha, &joined) {
                    out.add_term(rep, &(a * b).scale(&s));
                }
            }
        }
        out
    }

    /// `Σ (−1)^{|w|} c_w x^w`: the sign a derivation picks up passing a
    /// series of mixed degree.
    pub fn parity_twist(&self, alpha: &Alphabet) -> DualSeries {
        let mut out = DualSeries { terms: BTreeMap::new(), ..self.clone() };
        for (w, c) in &self.terms {
            let odd = alpha.word_deg(w).rem_euclid(2) == 1;
            out.add_term(w.clone(), &if odd { -c.clone() } else { c.clone() });
        }
        out
    }

    /// Agreement below `ceiling` on monomials of length at most `lmax`.
    pub fn agrees_below(&self, other: &DualSeries, ceiling: Exp, lmax: usize) -> bool {
        self.truncated(ceiling, lmax).minus(&other.truncated(ceiling, lmax)).is_zero()
    }

    /// Polynomial text `(c)*x1*x2 + …`, module variables as `xi0`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let _ = write!(out, "({})", c);
            for j in 0..w.len() {
                let _ = write!(out, "*{}{}", if w.is_marked(j) { "xi" } else { "x" }, w.letters[j]);
            }
        }
        out
    }
}

/// The chains a dual series is evaluated on.
pub struct DualWindow {
    pub space: Box<dyn Space>,
    pub alphabet: Alphabet,
}

impl DualWindow {
    /// Functionals on all symmetric chains, the length-zero one included.
    pub fn algebra(l: &LInfinitySpec) -> DualWindow {
        DualWindow { space: Box::new(SymSpace { l: l.clone(), min_len: 0 }), alphabet: l.alphabet.clone() }
    }

    /// Functionals on symmetric chains of positive length.
    pub fn positive(l: &LInfinitySpec) -> DualWindow {
        DualWindow { space: Box::new(SymSpace { l: l.clone(), min_len: 1 }), alphabet: l.alphabet.clone() }
    }

    /// Functionals on module chains.
    pub fn module(m: &LModuleSpec) -> DualWindow {
        DualWindow { space: Box::new(CeSpace::new(m)), alphabet: m.alphabet.clone() }
    }

    pub fn chains(&self, size: usize) -> Vec<Key> {
        self.space.keys(size)
    }

    /// `d̂*f = f∘d̂`, known one length below `f`.
    pub fn differential(&self, f: &DualSeries) -> Result<DualSeries> {
        let lmax = f.lmax.saturating_sub(1);
        let mut out = DualSeries::zero(f.ceiling, lmax);
        out.floor = f.floor;
        if f.lmax == 0 {
            return Ok(out);
        }
        let work = f.ceiling - f.floor;
        for size in 0..=lmax {
            for key in self.space.keys(size) {
                let mut v = Nov::zero(Some(f.ceiling));
                for (k, c) in self.space.apply(&key, work)? {
                    if f.terms.contains_key(&k.1) {
                        v += &(&c * &f.value(&k.1));
                    }
                }
                if !v.is_zero() {
                    out.add_value(key.1, &v.with_ceiling(Some(f.ceiling)));
                }
            }
        }
        Ok(out)
    }
}
