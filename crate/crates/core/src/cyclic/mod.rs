//! Cyclic homology of a filtered A∞ algebra: the cyclic bar complex, the
//! coinvariant complex, the two-column-periodic bicomplex, the corrected
//! contracting homotopy and Connes operator, and the curvature cycles.
//!
//! Hochschild chains of the algebra with itself are plain words of length at
//! least one; the first letter sits in the module slot.

pub mod cycles;
pub(crate) mod finite;
pub mod stilde;

use num_traits::One;

use crate::ainfinity::{AlgebraSpec, BimoduleSpec, DefectReport};
use crate::error::Result;
use crate::hochschild::{chain_word, Hochschild};
use crate::novikov::{fmt_monomial, Exp, Nov, Slot, Q};
use crate::window::spaces::{flavored_words, vector_keys};
use crate::window::{all_words, assemble, words_of_len, BarSpace, HomologyReport, Key, Space, Window};
use crate::words::{cyclic_rep, rotate, sign_q, Alphabet, Flavor, SignedVector, Word};

pub use finite::{connes_sequence_check, ConnesReport, ExactNode};
pub use stilde::{bb_total_homology, plain_s_residual, Stilde};

/// Sign rule for the cyclic generator. Only `Koszul` is correct; the others
/// are planted errors for the mutation suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Twist {
    Koszul,
    /// No sign at all.
    Unsigned,
    /// `(−1)^{|x_n|'}`.
    LastOnly,
    /// `(−1)^{|x_n|'|x_0|'}`.
    EndsOnly,
    /// Minus the Koszul sign on words of length at least two.
    Negated,
}

pub const MUTATIONS: [Twist; 4] = [Twist::Unsigned, Twist::LastOnly, Twist::EndsOnly, Twist::Negated];

/// `b`, `b′`, `t` and `N` on plain chains.
#[derive(Clone, Debug)]
pub struct CyclicOps {
    pub alg: AlgebraSpec,
    hoch: Hochschild,
    pub twist: Twist,
    pub kmax: usize,
}

impl CyclicOps {
    pub fn new(a: &AlgebraSpec) -> CyclicOps {
        let hoch = Hochschild::new(&BimoduleSpec::diagonal(a)).expect("diagonal bimodule has one algebra");
        CyclicOps { alg: a.clone(), hoch, twist: Twist::Koszul, kmax: usize::MAX }
    }

    pub fn with_twist(mut self, twist: Twist) -> CyclicOps {
        self.twist = twist;
        self
    }

    pub fn with_kmax(mut self, k: Option<usize>) -> CyclicOps {
        self.kmax = k.unwrap_or(usize::MAX);
        self.hoch = self.hoch.with_kmax(k);
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alg.alphabet
    }

    /// The Hochschild differential with coefficients in the algebra.
    pub fn b(&self, x: &SignedVector) -> SignedVector {
        let mut marked = SignedVector::new(Flavor::Marked, x.ceiling);
        for (w, c) in x.iter().filter(|(w, _)| !w.is_empty()) {
            marked.add_term(chain_word(w.letters[0], &w.letters[1..]), c);
        }
        let mut out = SignedVector::new(Flavor::Plain, x.ceiling);
        for (w, c) in self.hoch.apply(&marked).iter() {
            out.add_term(Word::plain(w.letters.clone()), c);
        }
        out
    }

    /// The bar differential on words of length at least one.
    pub fn bprime(&self, x: &SignedVector) -> SignedVector {
        let mut out = SignedVector::new(Flavor::Plain, x.ceiling);
        for (w, c) in x.iter().filter(|(w, _)| !w.is_empty()) {
            self.alg.dhat_word_into(&w.letters, c, self.kmax, &mut out);
        }
        out
    }

    fn rotate_once(&self, w: &Word) -> (Word, Q) {
        let (u, s) = rotate(self.alphabet(), w, 1);
        if w.len() < 2 {
            return (u, Q::one());
        }
        let sd = |i: usize| self.alphabet().sdeg[w.letters[i] as usize];
        let last = sd(w.len() - 1);
        let parity = match self.twist {
            Twist::Koszul => return (u, sign_q(s)),
            Twist::Negated => return (u, -sign_q(s)),
            Twist::Unsigned => 0,
            Twist::LastOnly => last,
            Twist::EndsOnly => last * sd(0),
        };
        (u, sign_q(if parity.rem_euclid(2) == 1 { -1 } else { 1 }))
    }

    /// The cyclic generator, lengthwise.
    pub fn t(&self, x: &SignedVector) -> SignedVector {
        let mut out = SignedVector::new(x.flavor, x.ceiling);
        for (w, c) in x.iter() {
            let (u, s) = self.rotate_once(w);
            out.add_term(u, &c.scale(&s));
        }
        out
    }

    pub fn one_minus_t(&self, x: &SignedVector) -> SignedVector {
        x.minus(&self.t(x))
    }

    /// `N = 1 + t + ⋯ + t^n` on each length.
    pub fn norm(&self, x: &SignedVector) -> SignedVector {
        let mut out = SignedVector::new(x.flavor, x.ceiling);
        for (w, c) in x.iter() {
            let mut u = w.clone();
            let mut s = Q::one();
            for _ in 0..w.len().max(1) {
                out.add_term(u.clone(), &c.scale(&s));
                let (v, r) = self.rotate_once(&u);
                u = v;
                s *= r;
            }
        }
        out
    }

    /// Plain chains of one cell per window word of length `1..=lmax`.
    fn cells(&self, w: &Window) -> Vec<Word> {
        all_words(self.alg.size(), w.lmax).into_iter().filter(|l| !l.is_empty()).map(Word::plain).collect()
    }

    fn cell(&self, word: &Word, w: &Window) -> SignedVector {
        SignedVector::basis(Flavor::Plain, word.clone(), &Slot::zero(), Some(w.emax))
    }

    /// Residuals of `b(1−t) = (1−t)b′` and `b′N = Nb` on window words, in
    /// order of increasing length.
    pub fn identities(&self, w: &Window) -> [DefectReport; 2] {
        let mut first = DefectReport::new("b(1-t) - (1-t)b'");
        let mut second = DefectReport::new("b'N - Nb");
        for word in self.cells(w) {
            let x = self.cell(&word, w);
            first.record(self.alphabet(), &word, &self.b(&self.one_minus_t(&x)).minus(&self.one_minus_t(&self.bprime(&x))));
            second.record(self.alphabet(), &word, &self.bprime(&self.norm(&x)).minus(&self.norm(&self.b(&x))));
        }
        [first, second]
    }

    /// Residuals of `(1−t)N = 0` and `N(1−t) = 0`.
    pub fn resolution_defect(&self, w: &Window) -> DefectReport {
        let mut r = DefectReport::new("(1-t)N and N(1-t)");
        for word in self.cells(w) {
            let x = self.cell(&word, w);
            let name = self.alphabet().render(&word);
            r.record_named(self.alphabet(), format!("(1-t)N {}", name), &self.one_minus_t(&self.norm(&x)));
            r.record_named(self.alphabet(), format!("N(1-t) {}", name), &self.norm(&self.one_minus_t(&x)));
        }
        r
    }

    /// `b² = 0` and `b′² = 0` on window words.
    pub fn square_defects(&self, w: &Window) -> [DefectReport; 2] {
        let mut b = DefectReport::new("b squared");
        let mut bp = DefectReport::new("b' squared");
        for word in self.cells(w) {
            let x = self.cell(&word, w);
            b.record(self.alphabet(), &word, &self.b(&self.b(&x)));
            bp.record(self.alphabet(), &word, &self.bprime(&self.bprime(&x)));
        }
        [b, bp]
    }
}

/// `b(1−t) = (1−t)b′` and `b′N = Nb` on the window.
pub fn bicomplex_identities(a: &AlgebraSpec, w: &Window) -> [DefectReport; 2] {
    CyclicOps::new(a).with_kmax(w.kmax).identities(w)
}

/// Outcome of one planted sign error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mutation {
    pub twist: Twist,
    /// The first example that exposes the error, with its shortest failing
    /// word and residual.
    pub caught: Option<(String, String, String)>,
}

/// Run every planted sign error of the cyclic generator against the given
/// algebras.
pub fn mutation_suite(algs: &[AlgebraSpec], w: &Window) -> Vec<Mutation> {
    MUTATIONS
        .iter()
        .map(|&twist| {
            let caught = algs.iter().find_map(|a| {
                let ops = CyclicOps::new(a).with_kmax(w.kmax).with_twist(twist);
                ops.identities(w)
                    .iter()
                    .find_map(|r| r.entries.first().cloned())
                    .map(|e| (a.name.clone(), e.cell, e.residual))
            });
            Mutation { twist, caught }
        })
        .collect()
}

/// The cyclic bar complex on words of length at least one.
pub fn cyclic_space(a: &AlgebraSpec, w: &Window) -> BarSpace {
    BarSpace::new(a, Flavor::Cyclic, 1).with_kmax(w.kmax)
}

pub fn cyclic_homology(a: &AlgebraSpec, w: &Window) -> Result<HomologyReport> {
    Ok(assemble(&cyclic_space(a, w), w)?.homology())
}

/// Coinvariants `C / im(1−t)` under `b`, stored on orbit representatives.
pub struct ConnesSpace {
    pub ops: CyclicOps,
}

impl Space for ConnesSpace {
    fn label(&self) -> String {
        format!("lambda:{}", self.ops.alg.name)
    }

    fn keys(&self, size: usize) -> Vec<Key> {
        if size == 0 {
            return Vec::new();
        }
        flavored_words(&self.ops.alg, Flavor::Cyclic, size).into_iter().map(|w| (0, w)).collect()
    }

    fn key_degree(&self, key: &Key) -> i64 {
        self.ops.alphabet().word_deg(&key.1)
    }

    fn apply(&self, key: &Key, ceiling: Exp) -> Result<Vec<(Key, Nov)>> {
        let x = SignedVector::basis(Flavor::Plain, key.1.clone(), &Slot::zero(), Some(ceiling));
        let mut out = SignedVector::new(Flavor::Plain, Some(ceiling));
        for (u, c) in self.ops.b(&x).iter() {
            if let Some(o) = cyclic_rep(self.ops.alphabet(), u) {
                out.add_term(o.rep, &c.scale(&sign_q(o.sign)));
            }
        }
        Ok(vector_keys(&out, 0))
    }

    fn render(&self, key: &Key) -> String {
        format!("lam:{}", self.ops.alphabet().render(&key.1))
    }

    fn slot_gens(&self) -> Vec<Slot> {
        self.ops.alg.op_slots()
    }

    fn lambda0(&self) -> Exp {
        self.ops.alg.lambda0()
    }

    fn z2(&self) -> bool {
        self.ops.alg.z2
    }
}

/// Homology of the coinvariant complex.
pub fn connes_quotient_homology(a: &AlgebraSpec, w: &Window) -> Result<HomologyReport> {
    let space = ConnesSpace { ops: CyclicOps::new(a).with_kmax(w.kmax) };
    Ok(assemble(&space, w)?.homology())
}

/// Columns `first..columns` of the bicomplex: even columns carry `b`, odd
/// columns `−b′`, and the horizontal maps are `1−t` out of odd columns and
/// `N` out of even ones. Total degree is word degree minus column.
pub struct TsyganSpace {
    pub ops: CyclicOps,
    pub columns: u32,
    pub first: u32,
}

impl TsyganSpace {
    pub fn new(a: &AlgebraSpec, w: &Window, columns: u32) -> TsyganSpace {
        TsyganSpace { ops: CyclicOps::new(a).with_kmax(w.kmax), columns, first: 0 }
    }

    /// Apply the total differential to a chain in one column.
    pub fn total(&self, column: u32, x: &SignedVector) -> Vec<(Key, Nov)> {
        let mut out = if column % 2 == 0 {
            vector_keys(&self.ops.b(x), column)
        } else {
            vector_keys(&self.ops.bprime(x).scaled(&-Q::one()), column)
        };
        if column > self.first {
            let h = if column % 2 == 1 { self.ops.one_minus_t(x) } else { self.ops.norm(x) };
            out.extend(vector_keys(&h, column - 1));
        }
        out
    }
}

impl Space for TsyganSpace {
    fn label(&self) -> String {
        let q = if self.first > 0 { "/col0" } else { "" };
        format!("tsygan{}{}:{}", self.columns, q, self.ops.alg.name)
    }

    fn keys(&self, size: usize) -> Vec<Key> {
        if size == 0 {
            return Vec::new();
        }
        let words = words_of_len(self.ops.alg.size(), size);
        (self.first..self.columns).flat_map(|c| words.iter().map(move |l| (c, Word::plain(l.clone())))).collect()
    }

    fn key_degree(&self, key: &Key) -> i64 {
        self.ops.alphabet().word_deg(&key.1) - key.0 as i64
    }

    fn apply(&self, key: &Key, ceiling: Exp) -> Result<Vec<(Key, Nov)>> {
        let x = SignedVector::basis(Flavor::Plain, key.1.clone(), &Slot::zero(), Some(ceiling));
        Ok(self.total(key.0, &x))
    }

    fn render(&self, key: &Key) -> String {
        format!("c{}:{}", key.0, self.ops.alphabet().render(&key.1))
    }

    fn slot_gens(&self) -> Vec<Slot> {
        self.ops.alg.op_slots()
    }

    fn lambda0(&self) -> Exp {
        self.ops.alg.lambda0()
    }

    fn z2(&self) -> bool {
        self.ops.alg.z2
    }
}

/// Homology of the first `columns` columns of the bicomplex.
pub fn tsygan_total_homology(a: &AlgebraSpec, w: &Window, columns: u32) -> Result<HomologyReport> {
    Ok(assemble(&TsyganSpace::new(a, w, columns), w)?.homology())
}

/// Degrees where a `columns`-column truncation of a bicomplex agrees with
/// the untruncated one: the last column can only disturb degrees up to
/// `top − columns + 2`, where `top` is the largest word degree present.
pub fn stable_from(top: i64, columns: u32) -> i64 {
    top - columns as i64 + 3
}

/// Render a cell `T^λ e^q · w` the way reports name it.
pub(crate) fn cell_name(alpha: &Alphabet, w: &Word, slot: &Slot) -> String {
    if *slot == Slot::zero() {
        alpha.render(w)
    } else {
        format!("{}*{}", fmt_monomial(slot), alpha.render(w))
    }
}

#[cfg(test)]
mod tests;
