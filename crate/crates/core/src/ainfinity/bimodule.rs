//! Filtered A∞-bimodules over a pair of algebras sharing one graded basis.
//!
//! A bar word of the bimodule is a marked word `x̄ ⊗ [v] ⊗ ȳ`. The extended
//! differential applies left operations to blocks left of the mark, right
//! operations to blocks right of it, and `n` to blocks containing it; each
//! block carries the sign `(−1)^{|letters before it|'}`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::hom::HomomorphismSpec;
use super::schema::{BasisEntry, ClassEntry, SpecFile};
use super::{add_op_term, class_labels, koszul_q, ops_to_entries, parse_classes, parse_ops, AlgebraSpec, DefectReport};
use super::{OpTable, OpTerm, Violation};
use crate::error::{Error, Result};
use crate::novikov::{Exp, Nov, Slot, Q};
use crate::window::Window;
use crate::words::{Alphabet, Flavor, Letter, SignedVector, Word};

/// `n_{k₁,k₀}` keyed by marked input words; outputs are module letters.
pub type ModuleTable = BTreeMap<Word, Vec<OpTerm>>;

fn add_module_term(table: &mut ModuleTable, inputs: Word, term: OpTerm) {
    let mut flat = OpTable::new();
    if let Some(existing) = table.remove(&inputs) {
        flat.insert(Vec::new(), existing);
    }
    add_op_term(&mut flat, Vec::new(), term);
    if let Some(v) = flat.remove(&Vec::new()) {
        table.insert(inputs, v);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BimoduleSpec {
    pub name: String,
    pub left: AlgebraSpec,
    pub right: AlgebraSpec,
    pub module_names: Vec<String>,
    /// Unshifted module degrees.
    pub module_degrees: Vec<i64>,
    pub ops: ModuleTable,
}

impl BimoduleSpec {
    pub fn new(name: &str, left: &AlgebraSpec, right: &AlgebraSpec, basis: &[(&str, i64)]) -> Result<BimoduleSpec> {
        if left.alphabet != right.alphabet {
            return Err(Error::Spec("left and right algebras must share one graded basis".into()));
        }
        Ok(BimoduleSpec {
            name: name.to_string(),
            left: left.clone(),
            right: right.clone(),
            module_names: basis.iter().map(|(n, _)| n.to_string()).collect(),
            module_degrees: basis.iter().map(|(_, d)| *d).collect(),
            ops: ModuleTable::new(),
        })
    }

    /// `n_{i,j} = m_{i+j+1}` on the algebra itself.
    pub fn diagonal(a: &AlgebraSpec) -> BimoduleSpec {
        let mut ops = ModuleTable::new();
        for (inputs, terms) in &a.ops {
            for p in 0..inputs.len() {
                ops.insert(Word::marked(inputs.clone(), p), terms.clone());
            }
        }
        BimoduleSpec {
            name: format!("diag_{}", a.name),
            left: a.clone(),
            right: a.clone(),
            module_names: a.alphabet.names.clone(),
            module_degrees: a.degrees.clone(),
            ops,
        }
    }

    /// The bimodule with no module elements.
    pub fn empty(a: &AlgebraSpec) -> BimoduleSpec {
        BimoduleSpec::new(&format!("empty_{}", a.name), a, a, &[]).expect("same algebra")
    }

    pub fn size(&self) -> usize {
        self.module_names.len()
    }

    pub fn alphabet(&self) -> Alphabet {
        let sdeg = self.module_degrees.iter().map(|d| d - 1).collect();
        self.left.alphabet.clone().with_module(self.module_names.clone(), sdeg)
    }

    pub fn set_op(&mut self, inputs: Word, out: Letter, coeff: Q, slot: Slot) {
        add_module_term(&mut self.ops, inputs, OpTerm { slot, out, coeff });
    }

    pub fn from_file(f: &SpecFile) -> Result<BimoduleSpec> {
        let a = AlgebraSpec::from_file(f)?;
        let basis = f.module_basis.as_ref().ok_or_else(|| Error::Spec("bimodule without module_basis".into()))?;
        let mut m = BimoduleSpec {
            name: f.name.clone(),
            left: a.clone(),
            right: a.clone(),
            module_names: basis.iter().map(|b| b.id.clone()).collect(),
            module_degrees: basis.iter().map(|b| b.degree).collect(),
            ops: ModuleTable::new(),
        };
        // Inputs list algebra ids with exactly one module id written `[v]`.
        let classes = parse_classes(&f.classes)?;
        let mut in_names = m.left.alphabet.names.clone();
        let offset = in_names.len();
        in_names.extend(m.module_names.iter().map(|n| format!("[{}]", n)));
        let flat = parse_ops(&f.n_ops, &classes, &in_names, &m.module_names, "n_ops")?;
        for (inputs, terms) in flat {
            let marks: Vec<usize> = (0..inputs.len()).filter(|&i| inputs[i] as usize >= offset).collect();
            if marks.len() != 1 {
                return Err(Error::Spec("each n_ops input needs exactly one module element".into()));
            }
            let p = marks[0];
            let mut letters = inputs.clone();
            letters[p] -= offset as Letter;
            for t in terms {
                add_module_term(&mut m.ops, Word::marked(letters.clone(), p), t);
            }
        }
        Ok(m)
    }

    pub fn to_file(&self) -> SpecFile {
        let mut f = self.left.to_file();
        f.name = self.name.clone();
        let mut classes = self.left.classes.clone();
        let labels = class_labels(&mut classes, self.ops.values().flatten().map(|t| t.slot.clone()));
        f.classes = classes
            .iter()
            .map(|c| ClassEntry { label: c.label.clone(), energy: super::energy_text(&c.energy), maslov: c.maslov })
            .collect();
        f.module_basis = Some(
            self.module_names
                .iter()
                .zip(&self.module_degrees)
                .map(|(n, d)| BasisEntry { id: n.clone(), degree: *d, unit: false })
                .collect(),
        );
        // Encode each marked key as a flat key over an extended alphabet.
        let k = self.left.size() as Letter;
        let mut flat = OpTable::new();
        let mut marks = BTreeMap::new();
        for (w, terms) in &self.ops {
            let mut key = w.letters.clone();
            let p = w.mark.unwrap_or(0) as usize;
            key[p] += k;
            marks.insert(key.clone(), p);
            flat.insert(key, terms.clone());
        }
        let alg = self.left.alphabet.names.clone();
        let md = self.module_names.clone();
        let in_name = |w: &[Letter], i: usize| {
            if w[i] >= k {
                format!("[{}]", md[(w[i] - k) as usize])
            } else {
                alg[w[i] as usize].clone()
            }
        };
        f.n_ops = ops_to_entries(&flat, &labels, &in_name, &self.module_names, false);
        f
    }

    pub fn op(&self, inputs: &Word) -> &[OpTerm] {
        self.ops.get(inputs).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn validate(&self) -> Vec<Violation> {
        let alpha = self.alphabet();
        let mut out = Vec::new();
        for (w, terms) in &self.ops {
            if w.mark.map_or(true, |p| p as usize >= w.len()) {
                out.push(Violation::new("module", format!("n input {} has no module element", alpha.render(w))));
                continue;
            }
            for t in terms {
                if t.slot.energy.is_zero() && t.slot.maslov != 0 {
                    out.push(Violation::new("gapped", format!("n({}) has energy 0 with nonzero Maslov index", alpha.render(w))));
                }
                let lhs = alpha.word_deg(w) + 1 - 2 * t.slot.maslov;
                if lhs != alpha.module_sdeg[t.out as usize] {
                    out.push(Violation::new(
                        "degree",
                        format!("n({}) -> {} shifts degree wrongly", alpha.render(w), self.module_names[t.out as usize]),
                    ));
                }
            }
        }
        out
    }

    /// Add the extended differential of `c · w` to `out` (marked words).
    pub fn dhat_word_into(&self, alpha: &Alphabet, w: &Word, c: &Nov, kmax: usize, out: &mut SignedVector) {
        let n = w.len();
        let p = w.mark.expect("marked word") as usize;
        let mut prefix = 0i64;
        for i in 0..=n {
            let sign = koszul_q(prefix);
            for k in 0..=(n - i).min(kmax) {
                let (terms, marked): (&[OpTerm], bool) = if i + k <= p {
                    (self.left.op(&w.letters[i..i + k]), false)
                } else if i > p {
                    (self.right.op(&w.letters[i..i + k]), false)
                } else {
                    let key = Word::marked(w.letters[i..i + k].to_vec(), p - i);
                    (self.op(&key), true)
                };
                for t in terms {
                    let mut letters = Vec::with_capacity(n + 1 - k);
                    letters.extend_from_slice(&w.letters[..i]);
                    letters.push(t.out);
                    letters.extend_from_slice(&w.letters[i + k..]);
                    let mark = if marked {
                        i
                    } else if i + k <= p {
                        p + 1 - k
                    } else {
                        p
                    };
                    out.add_term(Word::marked(letters, mark), &c.mul_monomial(&(&sign * &t.coeff), &t.slot));
                }
            }
            if i < n {
                prefix += alpha.letter_deg(w, i);
            }
        }
    }

    pub fn dhat(&self, v: &SignedVector, kmax: usize) -> SignedVector {
        let alpha = self.alphabet();
        let mut out = SignedVector::new(Flavor::Marked, v.ceiling);
        for (w, c) in v.iter() {
            self.dhat_word_into(&alpha, w, c, kmax, &mut out);
        }
        out
    }

    /// Every marked word with at most `lmax` algebra letters.
    pub fn window_words(&self, lmax: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for v in 0..self.size() as Letter {
            for tail in crate::window::all_words(self.left.size(), lmax) {
                for p in 0..=tail.len() {
                    let mut letters = tail[..p].to_vec();
                    letters.push(v);
                    letters.extend_from_slice(&tail[p..]);
                    out.push(Word::marked(letters, p));
                }
            }
        }
        out
    }

    /// Extended differential squared on every window word.
    pub fn defect(&self, w: &Window) -> DefectReport {
        let alpha = self.alphabet();
        let mut report = DefectReport::new("bimodule d-hat squared");
        let kmax = w.kmax.unwrap_or(usize::MAX);
        for word in self.window_words(w.lmax) {
            let cell = SignedVector::basis(Flavor::Marked, word.clone(), &Slot::zero(), Some(w.emax));
            let twice = self.dhat(&self.dhat(&cell, kmax), kmax);
            report.record(&alpha, &word, &twice);
        }
        report
    }

    /// `(f¹, f⁰)^* n (x̄, y, z̄) = Σ n(f̂¹ x̄, y, f̂⁰ z̄)`, materialized on marked
    /// words with at most `lmax` algebra letters.
    pub fn pullback(&self, f1: &HomomorphismSpec, f0: &HomomorphismSpec, lmax: usize, ceiling: Exp) -> Result<BimoduleSpec> {
        if f1.target != self.left || f0.target != self.right {
            return Err(Error::Spec("pullback along homomorphisms with the wrong targets".into()));
        }
        let mut m = BimoduleSpec::new(&format!("pullback_{}", self.name), &f1.source, &f0.source, &[])?;
        m.module_names = self.module_names.clone();
        m.module_degrees = self.module_degrees.clone();
        let e = Some(ceiling);
        for word in self.window_words(lmax) {
            let p = word.mark.unwrap() as usize;
            let left = f1.apply(&SignedVector::basis(Flavor::Plain, Word::plain(word.letters[..p].to_vec()), &Slot::zero(), e))?;
            let right = f0.apply(&SignedVector::basis(Flavor::Plain, Word::plain(word.letters[p + 1..].to_vec()), &Slot::zero(), e))?;
            for (lw, lc) in left.iter() {
                for (rw, rc) in right.iter() {
                    let mut letters = lw.letters.clone();
                    letters.push(word.letters[p]);
                    letters.extend_from_slice(&rw.letters);
                    let key = Word::marked(letters, lw.len());
                    let coeff = (lc * rc).with_ceiling(e);
                    for t in self.op(&key) {
                        for s in coeff.terms() {
                            let slot = t.slot.shift(&s.slot());
                            if slot.energy < ceiling {
                                m.set_op(word.clone(), t.out, &t.coeff * &s.coeff, slot);
                            }
                        }
                    }
                }
            }
        }
        Ok(m)
    }

    /// Marked words `[v] ⊗ x̄` of a Hochschild chain, mark first.
    pub fn is_mark_first(w: &Word) -> bool {
        w.mark == Some(0)
    }
}

/// A bimodule homomorphism `φ: M → N` over the identity on the algebras.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BimoduleHom {
    pub source: BimoduleSpec,
    pub target: BimoduleSpec,
    pub ops: ModuleTable,
}

impl BimoduleHom {
    pub fn identity(m: &BimoduleSpec) -> BimoduleHom {
        let mut ops = ModuleTable::new();
        for v in 0..m.size() as Letter {
            add_module_term(&mut ops, Word::marked(vec![v], 0), OpTerm { slot: Slot::zero(), out: v, coeff: Q::one() });
        }
        BimoduleHom { source: m.clone(), target: m.clone(), ops }
    }

    pub fn set_op(&mut self, inputs: Word, out: Letter, coeff: Q, slot: Slot) {
        add_module_term(&mut self.ops, inputs, OpTerm { slot, out, coeff });
    }

    pub fn op(&self, inputs: &Word) -> &[OpTerm] {
        self.ops.get(inputs).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn validate(&self) -> Vec<Violation> {
        let alpha = self.source.alphabet();
        let mut out = Vec::new();
        for (w, terms) in &self.ops {
            for t in terms {
                if alpha.word_deg(w) - 2 * t.slot.maslov != self.target.module_degrees[t.out as usize] - 1 {
                    out.push(Violation::new("degree", format!("phi({}) is not of degree 0", alpha.render(w))));
                }
            }
        }
        out
    }
}
