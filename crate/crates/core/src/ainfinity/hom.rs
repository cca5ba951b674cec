//! Filtered A∞-homomorphisms `f = {f_k}` and their coalgebra extension `f̂`.

use num_traits::{One, Zero};

use super::{add_op_term, class_labels, ops_to_entries, parse_classes, parse_ops, AlgebraSpec, DefectReport};
use super::{OpTable, OpTerm, Violation};
use crate::error::{Error, Result};
use crate::novikov::{Exp, Nov, Slot, Q};
use crate::window::Window;
use crate::words::{Flavor, Letter, SignedVector, Word};

use super::schema::{ClassEntry, SpecFile};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomomorphismSpec {
    pub name: String,
    pub source: AlgebraSpec,
    pub target: AlgebraSpec,
    /// `f_k`, keyed by source words, outputs are target letters.
    pub ops: OpTable,
}

impl HomomorphismSpec {
    pub fn identity(a: &AlgebraSpec) -> HomomorphismSpec {
        let mut ops = OpTable::new();
        for x in 0..a.size() as Letter {
            add_op_term(&mut ops, vec![x], OpTerm { slot: Slot::zero(), out: x, coeff: Q::one() });
        }
        HomomorphismSpec { name: format!("id_{}", a.name), source: a.clone(), target: a.clone(), ops }
    }

    pub fn from_file(f: &SpecFile) -> Result<HomomorphismSpec> {
        let source = AlgebraSpec::from_file(f.source.as_deref().ok_or_else(|| Error::Spec("homomorphism without source".into()))?)?;
        let target = AlgebraSpec::from_file(f.target.as_deref().ok_or_else(|| Error::Spec("homomorphism without target".into()))?)?;
        let classes = parse_classes(&f.classes)?;
        let ops = parse_ops(&f.f_ops, &classes, &source.alphabet.names, &target.alphabet.names, "f_ops")?;
        Ok(HomomorphismSpec { name: f.name.clone(), source, target, ops })
    }

    pub fn to_file(&self) -> SpecFile {
        let mut classes = self.target.classes.clone();
        let labels = class_labels(&mut classes, self.ops.values().flatten().map(|t| t.slot.clone()));
        let names = self.source.alphabet.names.clone();
        let in_name = |w: &[Letter], i: usize| names[w[i] as usize].clone();
        SpecFile {
            name: self.name.clone(),
            basis: Vec::new(),
            classes: classes
                .iter()
                .map(|c| ClassEntry { label: c.label.clone(), energy: super::energy_text(&c.energy), maslov: c.maslov })
                .collect(),
            ops: Vec::new(),
            module_basis: None,
            n_ops: Vec::new(),
            source: Some(Box::new(self.source.to_file())),
            target: Some(Box::new(self.target.to_file())),
            f_ops: ops_to_entries(&self.ops, &labels, &in_name, &self.target.alphabet.names, true),
        }
    }

    pub fn op(&self, inputs: &[Letter]) -> &[OpTerm] {
        self.ops.get(inputs).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Degree zero after shift, and `f₀(1)` of positive energy.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let sa = &self.source.alphabet;
        let ta = &self.target.alphabet;
        for (inputs, terms) in &self.ops {
            let shown = format!("f{}({})", inputs.len(), sa.render(&Word::plain(inputs.clone())));
            let lhs: i64 = inputs.iter().map(|&x| sa.sdeg[x as usize]).sum();
            for t in terms {
                if inputs.is_empty() && t.slot.energy <= Exp::zero() {
                    out.push(Violation::new("energy", format!("f0 must have positive energy (term {})", ta.names[t.out as usize])));
                }
                if t.slot.energy.is_zero() && t.slot.maslov != 0 {
                    out.push(Violation::new("gapped", format!("{} has energy 0 with nonzero Maslov index", shown)));
                }
                if lhs - 2 * t.slot.maslov != ta.sdeg[t.out as usize] {
                    out.push(Violation::new("degree", format!("{} -> {} is not of degree 0", shown, ta.names[t.out as usize])));
                }
            }
        }
        out
    }

    /// `f̂(c · w)` added to `out`. Runs of `f₀` insertions are bounded by the ceiling.
    pub fn apply_word_into(&self, w: &[Letter], c: &Nov, out: &mut SignedVector) -> Result<()> {
        let f0 = self.op(&[]);
        if !f0.is_empty() && out.ceiling.is_none() {
            return Err(Error::Refused("f-hat with nonzero f0 needs an energy ceiling".into()));
        }
        let mut letters = Vec::new();
        self.expand(w, 0, c, &mut letters, out);
        Ok(())
    }

    fn expand(&self, w: &[Letter], i: usize, c: &Nov, letters: &mut Vec<Letter>, out: &mut SignedVector) {
        if c.is_zero() {
            return;
        }
        if i == w.len() {
            out.add_term(Word::plain(letters.clone()), c);
        }
        for k in 0..=(w.len() - i) {
            for t in self.op(&w[i..i + k]) {
                let next = c.mul_monomial(&t.coeff, &t.slot);
                letters.push(t.out);
                self.expand(w, i + k, &next, letters, out);
                letters.pop();
            }
        }
    }

    pub fn apply(&self, v: &SignedVector) -> Result<SignedVector> {
        if v.flavor != Flavor::Plain {
            return Err(Error::Spec("f-hat acts on plain vectors".into()));
        }
        let mut out = SignedVector::new(Flavor::Plain, v.ceiling);
        for (w, c) in v.iter() {
            self.apply_word_into(&w.letters, c, &mut out)?;
        }
        Ok(out)
    }

    /// `d̂' ∘ f̂ − f̂ ∘ d̂` on every window word of the source.
    pub fn chainmap_defect(&self, w: &Window) -> Result<DefectReport> {
        let mut report = DefectReport::new("chain map");
        let ceiling = Some(w.emax);
        let kmax = w.kmax.unwrap_or(usize::MAX);
        for word in crate::window::all_words(self.source.size(), w.lmax) {
            let cell = SignedVector::basis(Flavor::Plain, Word::plain(word.clone()), &Slot::zero(), ceiling);
            let lhs = self.target.dhat(&self.apply(&cell)?, kmax)?;
            let rhs = self.apply(&self.source.dhat(&cell, kmax)?)?;
            report.record(&self.source.alphabet, &Word::plain(word), &lhs.minus(&rhs));
        }
        Ok(report)
    }

    /// `g ∘ f`, materialized on source words of length at most `lmax`.
    pub fn then(&self, g: &HomomorphismSpec, lmax: usize, ceiling: Exp) -> Result<HomomorphismSpec> {
        if self.target.alphabet != g.source.alphabet {
            return Err(Error::Spec("composition of incompatible homomorphisms".into()));
        }
        let mut ops = OpTable::new();
        for word in crate::window::all_words(self.source.size(), lmax) {
            let cell = SignedVector::basis(Flavor::Plain, Word::plain(word.clone()), &Slot::zero(), Some(ceiling));
            let image = g.apply(&self.apply(&cell)?)?;
            for (u, c) in image.iter() {
                if u.len() == 1 {
                    for t in c.terms() {
                        add_op_term(&mut ops, word.clone(), OpTerm { slot: t.slot(), out: u.letters[0], coeff: t.coeff.clone() });
                    }
                }
            }
        }
        Ok(HomomorphismSpec {
            name: format!("{}.{}", g.name, self.name),
            source: self.source.clone(),
            target: g.target.clone(),
            ops,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novikov::{exp_int, q_int};

    fn alg() -> AlgebraSpec {
        let mut a = AlgebraSpec::new("a", &[("I", 0), ("x", 1)]);
        a.add_unit("I");
        a
    }

    #[test]
    fn identity_fixes_words() {
        let a = alg();
        let id = HomomorphismSpec::identity(&a);
        let v = SignedVector::basis(Flavor::Plain, Word::plain(vec![0, 1, 1]), &Slot::zero(), Some(exp_int(2)));
        assert_eq!(id.apply(&v).unwrap(), v);
    }

    #[test]
    fn f_hat_of_one_is_exponential() {
        let a = alg();
        let mut f = HomomorphismSpec::identity(&a);
        add_op_term(&mut f.ops, vec![], OpTerm { slot: Slot::new(exp_int(1), 0), out: 1, coeff: q_int(1) });
        let e = Some(exp_int(3));
        let one = SignedVector::basis(Flavor::Plain, Word::empty(), &Slot::zero(), e);
        let got = f.apply(&one).unwrap();
        let mut want = SignedVector::new(Flavor::Plain, e);
        for k in 0..3 {
            want.add_monomial(Word::plain(vec![1; k]), &q_int(1), &Slot::new(exp_int(k as i64), 0));
        }
        assert_eq!(got, want);
    }
}
