//! The corrected contracting homotopy of `(C, b′)`, the Connes operator
//! built from it, and the `(b, B)` complex.
//!
//! `ker b′` is split off over the Q-linearized cells of an enlarged window:
//! cells are ordered by their excess over the window bound, so each kernel
//! vector lives on cells no larger than its pivot. On a chain `y` with kernel
//! part `k`, `s̃(y) = I⊗y − m₀⊗I⊗q` where `q` is the unique preimage of `k`
//! among the independent cells.

use std::collections::HashMap;

use num_traits::Zero;

use crate::ainfinity::{AlgebraSpec, DefectReport};
use crate::error::{Error, Result};
use crate::novikov::{Exp, Nov, Slot, Q};
use crate::window::linalg::{SparseQ, Splitting};
use crate::window::spaces::vector_keys;
use crate::window::{assemble, cell_cap, monoid_slots, words_of_len, HomologyReport, Key, Space, Window};
use crate::words::{Flavor, Letter, SignedVector, Word};

use super::{cell_name, cyclic_space, CyclicOps};

pub struct Stilde {
    pub alg: AlgebraSpec,
    pub unit: Letter,
    pub ceiling: Exp,
    /// The enlarged window the splitting lives on.
    pub outer: Window,
    cells: Vec<(Word, Slot)>,
    index: HashMap<(Word, Slot), usize>,
    rows: HashMap<(Word, Slot), usize>,
    /// Kernel vector of each dependent cell.
    kernel: HashMap<usize, SparseQ>,
    split: Splitting,
    m0: SignedVector,
}

fn excess(len: usize, energy: Exp, lambda0: Exp, slope: usize) -> i64 {
    let steps = (energy / lambda0).floor().to_integer().max(0);
    len as i64 - slope as i64 * steps
}

impl Stilde {
    /// Split `ker b′` on a window large enough to contract every chain of
    /// `w` (halo included).
    pub fn build(a: &AlgebraSpec, w: &Window) -> Result<Stilde> {
        let unit = a.unit.ok_or_else(|| Error::Spec(format!("{} has no strict unit", a.name)))?;
        let inner = assemble(&crate::window::BarSpace::new(a, Flavor::Plain, 1).with_kmax(w.kmax), w)?;
        if !inner.is_clean() {
            return Err(Error::Refused(format!("dirty ledger at {}", inner.ledger[0].cell)));
        }
        let mut outer = Window::new(w.lmax + w.halo + 1, w.emax).with_slope(w.slope.max(2)).with_halo(0);
        outer.kmax = w.kmax;
        let lambda0 = a.lambda0();
        let mut cells = Vec::new();
        for s in monoid_slots(&a.op_slots(), w.emax) {
            for len in 1..=outer.size_bound(s.energy, lambda0) {
                for l in words_of_len(a.size(), len) {
                    cells.push((Word::plain(l), s.clone()));
                    if cells.len() > cell_cap() {
                        return Err(Error::Resource { cells: cells.len(), cap: cell_cap() });
                    }
                }
            }
        }
        cells.sort_by(|(u, s), (v, t)| {
            let e = |w: &Word, s: &Slot| excess(w.len(), s.energy, lambda0, outer.slope);
            (e(u, s), u.len(), s, u).cmp(&(e(v, t), v.len(), t, v))
        });
        let index: HashMap<(Word, Slot), usize> = cells.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut rows = HashMap::new();
        let kmax = w.arity();
        let mut images = Vec::with_capacity(cells.len());
        for (word, slot) in &cells {
            let mut out = SignedVector::new(Flavor::Plain, Some(w.emax));
            a.dhat_word_into(&word.letters, &Nov::monomial(Q::from_integer(1.into()), slot.energy, slot.maslov, Some(w.emax)), kmax, &mut out);
            images.push(to_rows(&out, &mut rows));
        }
        let split = Splitting::new(&images);
        let kernel = split.kernel.iter().cloned().collect();
        Ok(Stilde { alg: a.clone(), unit, ceiling: w.emax, outer, cells, index, rows, kernel, split, m0: a.m0(Some(w.emax)) })
    }

    fn coords(&self, x: &SignedVector) -> Result<SparseQ> {
        let mut out = SparseQ::new();
        for ((w, s), q) in x.flat() {
            let i = *self.index.get(&(w.clone(), s.clone())).ok_or_else(|| {
                Error::Refused(format!("{} lies outside the splitting window {}", cell_name(&self.alg.alphabet, &w, &s), self.outer))
            })?;
            out.insert(i, q);
        }
        Ok(out)
    }

    fn vector(&self, v: &SparseQ) -> SignedVector {
        let mut out = SignedVector::new(Flavor::Plain, Some(self.ceiling));
        for (i, q) in v {
            let (w, s) = &self.cells[*i];
            out.add_monomial(w.clone(), q, s);
        }
        out
    }

    /// The kernel part of a chain under the splitting.
    pub fn kernel_part(&self, x: &SignedVector) -> Result<SignedVector> {
        let y = self.coords(x)?;
        let mut k = SparseQ::new();
        for (i, q) in &y {
            if let Some(v) = self.kernel.get(i) {
                for (j, p) in v {
                    *k.entry(*j).or_insert_with(Q::zero) += q * p;
                }
            }
        }
        k.retain(|_, q| !q.is_zero());
        Ok(self.vector(&k))
    }

    /// The preimage of a `b′`-cycle among the independent cells.
    pub fn preimage(&self, k: &SignedVector) -> Result<SignedVector> {
        let mut y = SparseQ::new();
        for ((w, s), q) in k.flat() {
            match self.rows.get(&(w.clone(), s.clone())) {
                Some(&r) => {
                    y.insert(r, q);
                }
                None => return Err(self.no_preimage(k)),
            }
        }
        let x = self.split.preimage(&y).ok_or_else(|| self.no_preimage(k))?;
        Ok(self.vector(&x))
    }

    fn no_preimage(&self, k: &SignedVector) -> Error {
        Error::Refused(format!("cycle {} has no preimage in {}", k.render(&self.alg.alphabet), self.outer))
    }

    /// `I ⊗ x`.
    pub fn s(&self, x: &SignedVector) -> SignedVector {
        let mut out = SignedVector::new(Flavor::Plain, x.ceiling);
        for (w, c) in x.iter() {
            let mut l = vec![self.unit];
            l.extend_from_slice(&w.letters);
            out.add_term(Word::plain(l), c);
        }
        out
    }

    /// `m₀ ⊗ I ⊗ q`.
    pub fn curvature_shift(&self, q: &SignedVector) -> SignedVector {
        let mut out = SignedVector::new(Flavor::Plain, Some(self.ceiling));
        for (m, c) in self.m0.iter() {
            for (w, d) in q.iter() {
                let mut l = vec![m.letters[0], self.unit];
                l.extend_from_slice(&w.letters);
                out.add_term(Word::plain(l), &(c * d));
            }
        }
        out
    }

    pub fn apply(&self, x: &SignedVector) -> Result<SignedVector> {
        if x.is_zero() {
            return Ok(SignedVector::new(Flavor::Plain, x.ceiling));
        }
        let k = self.kernel_part(x)?;
        if k.is_zero() {
            return Ok(self.s(x));
        }
        Ok(self.s(x).minus(&self.curvature_shift(&self.preimage(&k)?)))
    }

    fn bprime(&self, x: &SignedVector) -> SignedVector {
        let mut out = SignedVector::new(Flavor::Plain, x.ceiling);
        for (w, c) in x.iter() {
            self.alg.dhat_word_into(&w.letters, c, self.outer.arity(), &mut out);
        }
        out
    }

    /// Cells of a window, every monomial slot included, length at least one.
    pub fn window_cells(&self, w: &Window) -> Vec<(Word, Slot)> {
        let lambda0 = self.alg.lambda0();
        let mut out = Vec::new();
        for s in monoid_slots(&self.alg.op_slots(), w.emax) {
            for len in 1..=w.size_bound(s.energy, lambda0) {
                out.extend(words_of_len(self.alg.size(), len).into_iter().map(|l| (Word::plain(l), s.clone())));
            }
        }
        out
    }

    fn basis(&self, w: &Word, s: &Slot) -> SignedVector {
        SignedVector::basis(Flavor::Plain, w.clone(), s, Some(self.ceiling))
    }

    /// `s̃b′ + b′s̃ − id` on every cell of `w`.
    pub fn identity_report(&self, w: &Window) -> Result<DefectReport> {
        let mut r = DefectReport::new("s~b' + b's~ - id");
        for (word, slot) in self.window_cells(w) {
            let x = self.basis(&word, &slot);
            let lhs = self.apply(&self.bprime(&x))?.plus(&self.bprime(&self.apply(&x)?));
            r.record_named(&self.alg.alphabet, cell_name(&self.alg.alphabet, &word, &slot), &lhs.minus(&x));
        }
        Ok(r)
    }

    /// `B = (1−t)s̃N`.
    pub fn connes_b(&self, ops: &CyclicOps, x: &SignedVector) -> Result<SignedVector> {
        Ok(ops.one_minus_t(&self.apply(&ops.norm(x))?))
    }

    /// The uncorrected `(1−t)sN`.
    pub fn classical_b(&self, ops: &CyclicOps, x: &SignedVector) -> SignedVector {
        ops.one_minus_t(&self.s(&ops.norm(x)))
    }

    /// `B²` and `bB + Bb` on every cell of `w`.
    pub fn b_identities(&self, ops: &CyclicOps, w: &Window) -> Result<[DefectReport; 2]> {
        let mut sq = DefectReport::new("B squared");
        let mut anti = DefectReport::new("bB + Bb");
        for (word, slot) in self.window_cells(w) {
            let x = self.basis(&word, &slot);
            let name = cell_name(&self.alg.alphabet, &word, &slot);
            let bx = self.connes_b(ops, &x)?;
            sq.record_named(&self.alg.alphabet, name.clone(), &self.connes_b(ops, &bx)?);
            anti.record_named(&self.alg.alphabet, name, &ops.b(&bx).plus(&self.connes_b(ops, &ops.b(&x))?));
        }
        Ok([sq, anti])
    }

    /// Words with the unit past the first slot.
    pub fn degenerate(&self, w: &Word) -> bool {
        w.letters.iter().skip(1).any(|&x| x == self.unit)
    }

    pub fn normalize(&self, x: &SignedVector) -> SignedVector {
        let mut out = SignedVector::new(x.flavor, x.ceiling);
        for (w, c) in x.iter().filter(|(w, _)| !self.degenerate(w)) {
            out.add_term(w.clone(), c);
        }
        out
    }
}

fn to_rows(v: &SignedVector, rows: &mut HashMap<(Word, Slot), usize>) -> SparseQ {
    let mut col = SparseQ::new();
    for ((w, s), q) in v.flat() {
        let n = rows.len();
        let r = *rows.entry((w, s)).or_insert(n);
        col.insert(r, q);
    }
    col
}

/// `s b′ + b′ s − id` for the uncorrected homotopy on one chain.
pub fn plain_s_residual(a: &AlgebraSpec, x: &SignedVector) -> Result<SignedVector> {
    let unit = a.unit.ok_or_else(|| Error::Spec(format!("{} has no strict unit", a.name)))?;
    let ops = CyclicOps::new(a);
    let s = |v: &SignedVector| {
        let mut out = SignedVector::new(Flavor::Plain, v.ceiling);
        for (w, c) in v.iter() {
            let mut l = vec![unit];
            l.extend_from_slice(&w.letters);
            out.add_term(Word::plain(l), c);
        }
        out
    };
    Ok(s(&ops.bprime(x)).plus(&ops.bprime(&s(x))).minus(x))
}

/// The `(b, B)` bicomplex on `diagonals` columns. Column `c` holds chains of
/// length `size − c`; total degree is word degree minus `2c`.
pub struct BBSpace {
    pub ops: CyclicOps,
    pub stilde: Stilde,
    pub diagonals: u32,
    pub normalized: bool,
}

impl BBSpace {
    pub fn new(a: &AlgebraSpec, w: &Window, diagonals: u32, normalized: bool) -> Result<BBSpace> {
        // Keys are evaluated at slot zero, so the splitting must cover the
        // longest word any slot of the window admits.
        let mut sw = w.clone();
        sw.lmax = w.size_bound(w.emax, a.lambda0());
        Ok(BBSpace { ops: CyclicOps::new(a).with_kmax(w.kmax), stilde: Stilde::build(a, &sw)?, diagonals, normalized })
    }

    fn finish(&self, v: SignedVector) -> SignedVector {
        if self.normalized {
            self.stilde.normalize(&v)
        } else {
            v
        }
    }
}

impl Space for BBSpace {
    fn label(&self) -> String {
        format!("{}{}:{}", if self.normalized { "nbB" } else { "bB" }, self.diagonals, self.ops.alg.name)
    }

    fn keys(&self, size: usize) -> Vec<Key> {
        let mut out = Vec::new();
        for c in 0..self.diagonals {
            let Some(len) = size.checked_sub(c as usize).filter(|l| *l >= 1) else { continue };
            for l in words_of_len(self.ops.alg.size(), len) {
                let w = Word::plain(l);
                if !(self.normalized && self.stilde.degenerate(&w)) {
                    out.push((c, w));
                }
            }
        }
        out
    }

    fn key_degree(&self, key: &Key) -> i64 {
        self.ops.alphabet().word_deg(&key.1) - 2 * key.0 as i64
    }

    fn apply(&self, key: &Key, ceiling: Exp) -> Result<Vec<(Key, Nov)>> {
        let x = SignedVector::basis(Flavor::Plain, key.1.clone(), &Slot::zero(), Some(ceiling));
        let mut out = vector_keys(&self.finish(self.ops.b(&x)), key.0);
        if key.0 > 0 {
            out.extend(vector_keys(&self.finish(self.stilde.connes_b(&self.ops, &x)?), key.0 - 1));
        }
        Ok(out)
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

/// Homology of the `(b, B)` complex truncated to `diagonals` columns; the
/// window slope is raised to 2 because `s̃` adds two letters per energy step.
pub fn bb_total_homology(a: &AlgebraSpec, w: &Window, diagonals: u32, normalized: bool) -> Result<HomologyReport> {
    let w = w.clone().with_slope(w.slope.max(2));
    let space = BBSpace::new(a, &w, diagonals, normalized)?;
    Ok(assemble(&space, &w)?.homology())
}

/// Cyclic homology on the same raised-slope window, for comparisons.
pub fn cyclic_homology_bb_window(a: &AlgebraSpec, w: &Window) -> Result<HomologyReport> {
    let w = w.clone().with_slope(w.slope.max(2));
    Ok(assemble(&cyclic_space(a, &w), &w)?.homology())
}
