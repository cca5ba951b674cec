//! Hochschild chains `M[1] ⊗ C[1]^{⊗k}` of a bimodule, the wrap-around
//! differential, the reduced quotient, and chain maps of bimodule
//! homomorphisms.
//!
//! A chain word is a marked word with the module letter first, `[v]·x₁⋯x_k`.
//! Its window size is the tail length `k`.

pub mod mc;

use crate::ainfinity::bimodule::BimoduleHom;
use crate::ainfinity::{koszul_q, AlgebraSpec, BimoduleSpec, DefectReport};
use crate::error::{Error, Result};
use crate::novikov::{exp_int, Exp, Nov, Slot};
use crate::window::spaces::vector_keys;
use crate::window::{assemble, words_of_len, HomologyReport, Key, Space, Window, WindowedComplex};
use crate::words::{Alphabet, Flavor, Letter, SignedVector, Word};

/// Which tail letters the wrapped block is moved past.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WrapSign {
    /// Past the module letter and every letter left in the tail.
    Full,
    /// Past the module letter and only the letters fed to the operation.
    Partial,
}

/// The Hochschild complex of a bimodule over one algebra.
#[derive(Clone, Debug)]
pub struct Hochschild {
    pub module: BimoduleSpec,
    pub alpha: Alphabet,
    pub reduced: bool,
    pub wrap: WrapSign,
    pub kmax: usize,
}

pub fn chain_word(v: Letter, tail: &[Letter]) -> Word {
    let mut letters = Vec::with_capacity(tail.len() + 1);
    letters.push(v);
    letters.extend_from_slice(tail);
    Word::marked(letters, 0)
}

impl Hochschild {
    pub fn new(m: &BimoduleSpec) -> Result<Hochschild> {
        if m.left != m.right {
            return Err(Error::Spec("Hochschild chains need the same algebra on both sides".into()));
        }
        Ok(Hochschild { module: m.clone(), alpha: m.alphabet(), reduced: false, wrap: WrapSign::Full, kmax: usize::MAX })
    }

    /// The quotient by chains with the unit in a tail slot.
    pub fn reduced(m: &BimoduleSpec) -> Result<Hochschild> {
        let mut h = Hochschild::new(m)?;
        if m.left.unit.is_none() {
            return Err(Error::Spec(format!("reduced chains need a strict unit; {} has none", m.left.name)));
        }
        h.reduced = true;
        Ok(h)
    }

    pub fn with_wrap(mut self, wrap: WrapSign) -> Hochschild {
        self.wrap = wrap;
        self
    }

    pub fn with_kmax(mut self, k: Option<usize>) -> Hochschild {
        self.kmax = k.unwrap_or(usize::MAX);
        self
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        &self.module.right
    }

    fn degenerate(&self, w: &Word) -> bool {
        match self.algebra().unit {
            Some(u) => w.letters[1..].contains(&u),
            None => false,
        }
    }

    /// Tail operations including `m₀` insertions, each signed by the letters
    /// before its block.
    fn tail_into(&self, w: &Word, c: &Nov, arities: impl Iterator<Item = usize> + Clone, out: &mut SignedVector) {
        let a = self.algebra();
        let v = w.letters[0];
        let tail = &w.letters[1..];
        let k = tail.len();
        let mut prefix = self.alpha.module_sdeg[v as usize];
        for i in 0..=k {
            let sign = koszul_q(prefix);
            for j in arities.clone() {
                if i + j > k {
                    continue;
                }
                for t in a.op(&tail[i..i + j]) {
                    let mut letters = Vec::with_capacity(k + 2 - j);
                    letters.push(v);
                    letters.extend_from_slice(&tail[..i]);
                    letters.push(t.out);
                    letters.extend_from_slice(&tail[i + j..]);
                    out.add_term(Word::marked(letters, 0), &c.mul_monomial(&(&sign * &t.coeff), &t.slot));
                }
            }
            if i < k {
                prefix += self.alpha.sdeg[tail[i] as usize];
            }
        }
    }

    /// Sign of moving the last `i` tail letters in front of the module letter.
    fn wrap_sign(&self, v: Letter, tail: &[Letter], i: usize, j: usize) -> i64 {
        let k = tail.len();
        let sd = |x: &Letter| self.alpha.sdeg[*x as usize];
        let moved: i64 = tail[k - i..].iter().map(sd).sum();
        let passed: i64 = match self.wrap {
            WrapSign::Full => tail[..k - i].iter().map(sd).sum(),
            WrapSign::Partial => tail[..j].iter().map(sd).sum(),
        };
        moved * (self.alpha.module_sdeg[v as usize] + passed)
    }

    /// Add `d^Hoch(c · w)` to `out`.
    pub fn apply_word_into(&self, w: &Word, c: &Nov, out: &mut SignedVector) {
        let kmax = self.kmax;
        let k = w.len() - 1;
        self.tail_into(w, c, 0..=kmax.min(k), out);
        let v = w.letters[0];
        let tail = &w.letters[1..];
        for i in 0..=k {
            for j in 0..=k - i {
                if i + j > kmax {
                    continue;
                }
                let mut key = tail[k - i..].to_vec();
                key.push(v);
                key.extend_from_slice(&tail[..j]);
                let terms = self.module.op(&Word::marked(key, i));
                if terms.is_empty() {
                    continue;
                }
                let sign = koszul_q(self.wrap_sign(v, tail, i, j));
                for t in terms {
                    out.add_term(chain_word(t.out, &tail[j..k - i]), &c.mul_monomial(&(&sign * &t.coeff), &t.slot));
                }
            }
        }
    }

    /// `d^Hoch` on a marked vector; in the reduced complex degenerate words
    /// are dropped from the result.
    pub fn apply(&self, x: &SignedVector) -> SignedVector {
        let mut out = SignedVector::new(Flavor::Marked, x.ceiling);
        for (w, c) in x.iter() {
            self.apply_word_into(w, c, &mut out);
        }
        if self.reduced {
            self.project(&out)
        } else {
            out
        }
    }

    /// Drop the words with the unit in a tail slot.
    pub fn project(&self, x: &SignedVector) -> SignedVector {
        let mut out = SignedVector::new(Flavor::Marked, x.ceiling);
        for (w, c) in x.iter() {
            if !self.degenerate(w) {
                out.add_term(w.clone(), c);
            }
        }
        out
    }

    /// Only the `m₀` insertions.
    pub fn curvature_part(&self, x: &SignedVector) -> SignedVector {
        let mut out = SignedVector::new(Flavor::Marked, x.ceiling);
        for (w, c) in x.iter() {
            self.tail_into(w, c, 0..=0, &mut out);
        }
        out
    }

    /// Chain words with tails of length at most `lmax`.
    pub fn words(&self, lmax: usize) -> Vec<Word> {
        (0..=lmax).flat_map(|k| self.keys(k)).map(|(_, w)| w).collect()
    }

    /// `d^Hoch ∘ d^Hoch` on every chain word of the window.
    pub fn square_defect(&self, w: &Window) -> DefectReport {
        let mut report = DefectReport::new("d-hoch squared");
        for word in self.words(w.lmax) {
            let cell = SignedVector::basis(Flavor::Marked, word.clone(), &Slot::zero(), Some(w.emax));
            report.record(&self.alpha, &word, &self.apply(&self.apply(&cell)));
        }
        report
    }

    pub fn assemble(&self, w: &Window) -> Result<WindowedComplex> {
        assemble(self, w)
    }

    pub fn homology(&self, w: &Window) -> Result<HomologyReport> {
        Ok(self.assemble(w)?.homology())
    }

    /// `φ_*(v ⊗ x₁ ⋯ x_k) = Σ ± φ_{i,j}(x_{k−i+1..k}, v, x_{1..j}) ⊗ x_{j+1..k−i}`.
    pub fn chainmap_apply(phi: &BimoduleHom, x: &SignedVector) -> SignedVector {
        let alpha = phi.source.alphabet();
        let mut out = SignedVector::new(Flavor::Marked, x.ceiling);
        for (w, c) in x.iter() {
            let v = w.letters[0];
            let tail = &w.letters[1..];
            let k = tail.len();
            for i in 0..=k {
                let moved: i64 = tail[k - i..].iter().map(|x| alpha.sdeg[*x as usize]).sum();
                let passed: i64 = alpha.module_sdeg[v as usize] + tail[..k - i].iter().map(|x| alpha.sdeg[*x as usize]).sum::<i64>();
                let sign = koszul_q(moved * passed);
                for j in 0..=k - i {
                    let mut key = tail[k - i..].to_vec();
                    key.push(v);
                    key.extend_from_slice(&tail[..j]);
                    for t in phi.op(&Word::marked(key, i)) {
                        out.add_term(chain_word(t.out, &tail[j..k - i]), &c.mul_monomial(&(&sign * &t.coeff), &t.slot));
                    }
                }
            }
        }
        out
    }

    /// `d_N ∘ φ_* − φ_* ∘ d_M` on every chain word of the window.
    pub fn chainmap_defect(phi: &BimoduleHom, w: &Window) -> Result<DefectReport> {
        let src = Hochschild::new(&phi.source)?.with_kmax(w.kmax);
        let dst = Hochschild::new(&phi.target)?.with_kmax(w.kmax);
        let mut report = DefectReport::new("hochschild chain map");
        for word in src.words(w.lmax) {
            let cell = SignedVector::basis(Flavor::Marked, word.clone(), &Slot::zero(), Some(w.emax));
            let lhs = dst.apply(&Hochschild::chainmap_apply(phi, &cell));
            let rhs = Hochschild::chainmap_apply(phi, &src.apply(&cell));
            report.record(&src.alpha, &word, &lhs.minus(&rhs));
        }
        Ok(report)
    }
}

impl Space for Hochschild {
    fn label(&self) -> String {
        format!("{}:{}", if self.reduced { "rhoch" } else { "hoch" }, self.module.name)
    }

    fn keys(&self, size: usize) -> Vec<Key> {
        let n = self.algebra().size();
        let unit = if self.reduced { self.algebra().unit } else { None };
        let mut out = Vec::new();
        for v in 0..self.module.size() as Letter {
            for tail in words_of_len(n, size) {
                if unit.map_or(false, |u| tail.contains(&u)) {
                    continue;
                }
                out.push((0, chain_word(v, &tail)));
            }
        }
        out
    }

    fn key_degree(&self, key: &Key) -> i64 {
        self.alpha.word_deg(&key.1)
    }

    fn apply(&self, key: &Key, ceiling: Exp) -> Result<Vec<(Key, Nov)>> {
        let cell = SignedVector::basis(Flavor::Marked, key.1.clone(), &Slot::zero(), Some(ceiling));
        Ok(vector_keys(&Hochschild::apply(self, &cell), 0))
    }

    fn render(&self, key: &Key) -> String {
        self.alpha.render(&key.1)
    }

    fn slot_gens(&self) -> Vec<Slot> {
        let mut s = self.algebra().op_slots();
        s.extend(self.module.ops.values().flatten().map(|t| t.slot.clone()));
        s.sort();
        s.dedup();
        s
    }

    fn lambda0(&self) -> Exp {
        self.slot_gens().iter().map(|s| s.energy).filter(|e| *e > Exp::from_integer(0)).min().unwrap_or_else(|| exp_int(1))
    }

    fn z2(&self) -> bool {
        self.algebra().z2
    }
}
