//! Chevalley-Eilenberg chains and their topological dual.
//!
//! Chains live on graded-symmetric monomials, stored as sorted words. The
//! differential is the unshuffle formula
//! `d(x₁⋯x_k) = Σ_S ε(S) l_{|S|}(x_S)·x_rest` with full-group brackets, and
//! for a module `d([v]x) = Σ_S ε(S) (η(v; x_S)·x_rest + (−1)^{|v|'}[v] l(x_S)·x_rest)`.

pub mod dual;
pub mod vanish;

use std::collections::BTreeMap;

use num_traits::One;

use crate::error::{Error, Result};
use crate::linfinity::{pick, unshuffles, LInfinitySpec, LModuleSpec};
use crate::novikov::{Exp, Nov, Slot, Q};
use crate::window::linalg::rank;
use crate::window::spaces::vector_keys;
use crate::window::{assemble, words_of_len, HomologyReport, Key, Space, Window};
use crate::words::{sign_q, symmetric_rep, Alphabet, Flavor, Letter, SignedVector, Word};

use crate::cyclic::finite::Finite;

pub use dual::{DualSeries, DualWindow};
pub use vanish::{
    ce_module_vanishing, obstruction_extract, sample_cocycles, vanishing_certificate, Certificate, ModuleVanishing, Obstruction,
    ObstructionReport,
};

/// `sign · w` in canonical sorted form; `None` when `w` vanishes.
pub(crate) fn canonical(alpha: &Alphabet, w: &Word) -> Option<(Word, Q)> {
    symmetric_rep(alpha, w).map(|o| (o.rep, sign_q(o.sign)))
}

fn add_canonical(alpha: &Alphabet, w: Word, c: &Nov, out: &mut SignedVector) {
    if let Some((rep, s)) = canonical(alpha, &w) {
        out.add_term(rep, &c.scale(&s));
    }
}

/// Sorted words of one length; odd letters at most once.
fn sorted_words(alpha: &Alphabet, n: usize, len: usize) -> Vec<Vec<Letter>> {
    words_of_len(n, len)
        .into_iter()
        .filter(|l| l.windows(2).all(|p| p[0] < p[1] || (p[0] == p[1] && alpha.sdeg[p[0] as usize].rem_euclid(2) == 0)))
        .collect()
}

/// `Σ_S ε(S) l(x_S)·x_rest` on a sorted word.
fn sym_differential(l: &LInfinitySpec, x: &Word, c: &Nov, out: &mut SignedVector) {
    for (chosen, rest, s) in unshuffles(&l.alphabet, x) {
        let mut inner = SignedVector::new(Flavor::Plain, c.ceiling());
        l.eval(&pick(x, &chosen), &c.scale(&s), &mut inner);
        let tail = pick(x, &rest);
        for (y, d) in inner.iter() {
            let mut letters = y.letters.clone();
            letters.extend_from_slice(&tail);
            add_canonical(&l.alphabet, Word::plain(letters), d, out);
        }
    }
}

/// Graded-symmetric words of length at least `min_len` under the bracket
/// differential.
pub struct SymSpace {
    pub l: LInfinitySpec,
    pub min_len: usize,
}

impl Space for SymSpace {
    fn label(&self) -> String {
        format!("cce:{}", self.l.name)
    }

    fn keys(&self, size: usize) -> Vec<Key> {
        if size < self.min_len {
            return Vec::new();
        }
        sorted_words(&self.l.alphabet, self.l.alphabet.names.len(), size).into_iter().map(|w| (0, Word::plain(w))).collect()
    }

    fn key_degree(&self, key: &Key) -> i64 {
        self.l.alphabet.word_deg(&key.1)
    }

    fn apply(&self, key: &Key, ceiling: Exp) -> Result<Vec<(Key, Nov)>> {
        let mut out = SignedVector::new(Flavor::Symmetric, Some(ceiling));
        sym_differential(&self.l, &key.1, &Nov::one(Some(ceiling)), &mut out);
        Ok(vector_keys(&out, 0).into_iter().filter(|(k, _)| k.1.len() >= self.min_len).collect())
    }

    fn render(&self, key: &Key) -> String {
        format!("sym:{}", self.l.alphabet.render(&key.1))
    }

    fn slot_gens(&self) -> Vec<Slot> {
        self.l.op_slots()
    }

    fn lambda0(&self) -> Exp {
        self.l.lambda0()
    }

    fn z2(&self) -> bool {
        self.l.z2
    }
}

/// Module-marked chains `[v] x₁⋯x_k`; the key size is `k`.
pub struct CeSpace {
    pub m: LModuleSpec,
}

impl CeSpace {
    pub fn new(m: &LModuleSpec) -> CeSpace {
        CeSpace { m: m.clone() }
    }

    /// `d^CE` on a marked sorted word.
    pub fn differential(&self, w: &Word, c: &Nov, out: &mut SignedVector) {
        let alpha = &self.m.alphabet;
        let v = w.letters[0];
        let x = Word::plain(w.letters[1..].to_vec());
        let vsign = sign_q(if alpha.module_sdeg[v as usize].rem_euclid(2) == 1 { -1 } else { 1 });
        for (chosen, rest, s) in unshuffles(alpha, &x) {
            let inside = pick(&x, &chosen);
            let tail = pick(&x, &rest);
            let mut eta = SignedVector::new(Flavor::Marked, c.ceiling());
            self.m.eval_into(v, &inside, &c.scale(&s), &mut eta);
            for (u, d) in eta.iter() {
                let mut letters = u.letters.clone();
                letters.extend_from_slice(&tail);
                add_canonical(alpha, Word::marked(letters, 0), d, out);
            }
            let mut bracket = SignedVector::new(Flavor::Plain, c.ceiling());
            self.m.algebra.eval(&inside, &c.scale(&(&s * &vsign)), &mut bracket);
            for (y, d) in bracket.iter() {
                let mut letters = vec![v];
                letters.extend_from_slice(&y.letters);
                letters.extend_from_slice(&tail);
                add_canonical(alpha, Word::marked(letters, 0), d, out);
            }
        }
    }
}

impl Space for CeSpace {
    fn label(&self) -> String {
        format!("ce:{}", self.m.name)
    }

    fn keys(&self, size: usize) -> Vec<Key> {
        let alpha = &self.m.alphabet;
        let mut out = Vec::new();
        for v in 0..alpha.module_names.len() as Letter {
            for x in sorted_words(alpha, alpha.names.len(), size) {
                let mut letters = vec![v];
                letters.extend(x);
                out.push((0, Word::marked(letters, 0)));
            }
        }
        out
    }

    fn key_degree(&self, key: &Key) -> i64 {
        self.m.alphabet.word_deg(&key.1)
    }

    fn apply(&self, key: &Key, ceiling: Exp) -> Result<Vec<(Key, Nov)>> {
        let mut out = SignedVector::new(Flavor::MarkedSymmetric, Some(ceiling));
        self.differential(&key.1, &Nov::one(Some(ceiling)), &mut out);
        Ok(vector_keys(&out, 0))
    }

    fn render(&self, key: &Key) -> String {
        self.m.alphabet.render(&key.1)
    }

    fn slot_gens(&self) -> Vec<Slot> {
        self.m.op_slots()
    }

    fn lambda0(&self) -> Exp {
        self.m.lambda0()
    }

    fn z2(&self) -> bool {
        self.m.algebra.z2
    }
}

fn clean_homology(space: &dyn Space, w: &Window) -> Result<HomologyReport> {
    let wc = assemble(space, w)?;
    if !wc.is_clean() {
        return Err(Error::Refused(format!("dirty ledger at {}: {}", wc.ledger[0].cell, wc.ledger[0].residual)));
    }
    Ok(wc.homology())
}

/// Homology of the module Chevalley-Eilenberg complex.
pub fn ce_chain_homology(m: &LModuleSpec, w: &Window) -> Result<HomologyReport> {
    clean_homology(&CeSpace::new(m), w)
}

/// Homology of the graded-symmetric bar complex of positive length.
pub fn cyclic_ce_homology(l: &LInfinitySpec, w: &Window) -> Result<HomologyReport> {
    clean_homology(&SymSpace { l: l.clone(), min_len: 1 }, w)
}

/// Per degree: homology of a finite window and cohomology of its dual,
/// the latter from ranks of the transposed differential.
pub fn duality_dims(space: &dyn Space, w: &Window) -> Result<BTreeMap<i64, (usize, usize)>> {
    let f = Finite::build(space, w)?;
    let wc = &f.wc;
    // Row vectors of the block from degree `d` to the next one.
    let transpose_rank = |d: i64| {
        let src = f.of_degree(d);
        let mut rows: BTreeMap<usize, crate::window::linalg::SparseQ> = BTreeMap::new();
        for (j, &i) in src.iter().enumerate() {
            for (r, q) in &wc.images[i] {
                rows.entry(*r).or_default().insert(j, q.clone());
            }
        }
        rank(&rows.into_values().collect::<Vec<_>>())
    };
    let mut out = BTreeMap::new();
    for d in f.degrees() {
        let n = f.of_degree(d).len();
        let coh = n - transpose_rank(d) - transpose_rank(f.prev(d));
        out.insert(d, (f.dim(d), coh));
    }
    Ok(out)
}

/// `∏ m!` over the multiplicities of the unmarked letters of a sorted word:
/// the value of the monomial `x^w` on the chain `w`.
pub(crate) fn weight(w: &Word) -> Q {
    let mut out = Q::one();
    let mut run = 0i64;
    for i in 0..w.len() {
        if w.is_marked(i) {
            continue;
        }
        if i > 0 && !w.is_marked(i - 1) && w.letters[i - 1] == w.letters[i] {
            run += 1;
        } else {
            run = 1;
        }
        out *= Q::from_integer(run.into());
    }
    out
}

#[cfg(test)]
mod tests;
