//! L∞ brackets and L∞-modules obtained by symmetrizing A∞ data.
//!
//! Brackets use the full-group normalization with no `1/k!`:
//! `l_k(x₁,…,x_k) = Σ_{σ∈S_k} ±m_k(x_{σ(1)},…,x_{σ(k)})`, and likewise
//! `η_k(v; x₁,…,x_k) = Σ_{τ∈S_{k+1}} ±n(τ·(v,x₁,…,x_k))`. Mixing this with
//! the averaged convention breaks the Chevalley-Eilenberg differential.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::ainfinity::bimodule::ModuleTable;
use crate::ainfinity::{add_op_term, koszul_q, AlgebraSpec, BimoduleSpec, DefectReport, OpTable, OpTerm, Violation};
use crate::error::{Error, Result};
use crate::novikov::{exp_int, Exp, Nov, Slot, Q};
use crate::window::{all_words, words_of_len, Window};
use crate::words::{all_perms, permute, Alphabet, Flavor, Letter, SignedVector, Word};

/// Brackets `l_k` tabulated on every word up to the arity bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LInfinitySpec {
    pub name: String,
    pub alphabet: Alphabet,
    pub z2: bool,
    pub brackets: OpTable,
    pub kmax: usize,
}

/// Add `Σ_{σ} ε(σ) · table(σ·w)` for a lookup `table`.
fn symmetrized<'a>(alpha: &Alphabet, w: &Word, lookup: impl Fn(&Word) -> &'a [OpTerm], out: &mut Vec<OpTerm>) {
    let mut table = OpTable::new();
    for sigma in all_perms(w.len()) {
        let (u, s) = permute(alpha, w, &sigma);
        for t in lookup(&u) {
            add_op_term(&mut table, Vec::new(), OpTerm { slot: t.slot.clone(), out: t.out, coeff: &t.coeff * koszul_q((s < 0) as i64) });
        }
    }
    out.extend(table.remove(&Vec::new()).unwrap_or_default());
}

/// Positions split into a chosen subset and the rest, with the Koszul sign
/// of moving the subset to the front.
pub(crate) fn unshuffles(alpha: &Alphabet, w: &Word) -> Vec<(Vec<usize>, Vec<usize>, Q)> {
    let k = w.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << k) {
        let chosen: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let rest: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 0).collect();
        let sigma: Vec<usize> = chosen.iter().chain(rest.iter()).copied().collect();
        let (_, s) = permute(alpha, w, &sigma);
        out.push((chosen, rest, koszul_q((s < 0) as i64)));
    }
    out
}

pub(crate) fn pick(w: &Word, idx: &[usize]) -> Vec<Letter> {
    idx.iter().map(|&i| w.letters[i]).collect()
}

/// Symmetrize an algebra: `l_k` on every word of length at most `kmax`.
pub fn symmetrize_algebra(a: &AlgebraSpec, kmax: usize) -> LInfinitySpec {
    let mut brackets = OpTable::new();
    for w in all_words(a.size(), kmax) {
        let word = Word::plain(w.clone());
        let mut terms = Vec::new();
        symmetrized(&a.alphabet, &word, |u| a.op(&u.letters), &mut terms);
        for t in terms {
            add_op_term(&mut brackets, w.clone(), t);
        }
    }
    LInfinitySpec { name: format!("sym_{}", a.name), alphabet: a.alphabet.clone(), z2: a.z2, brackets, kmax }
}

fn slots_and_gap<'a>(terms: impl Iterator<Item = &'a OpTerm>) -> (Vec<Slot>, Exp) {
    let mut s: BTreeSet<Slot> = BTreeSet::new();
    s.insert(Slot::zero());
    s.extend(terms.map(|t| t.slot.clone()));
    let gap = s.iter().map(|s| s.energy).filter(|e| *e > Exp::zero()).min().unwrap_or_else(|| exp_int(1));
    (s.into_iter().collect(), gap)
}

impl LInfinitySpec {
    /// Slots carried by the brackets.
    pub fn op_slots(&self) -> Vec<Slot> {
        slots_and_gap(self.brackets.values().flatten()).0
    }

    /// Smallest positive bracket energy, or 1.
    pub fn lambda0(&self) -> Exp {
        slots_and_gap(self.brackets.values().flatten()).1
    }

    pub fn bracket(&self, inputs: &[Letter]) -> &[OpTerm] {
        self.brackets.get(inputs).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// `l_{|x|}(x)` as a vector of single letters.
    pub fn eval(&self, inputs: &[Letter], c: &Nov, out: &mut SignedVector) {
        for t in self.bracket(inputs) {
            out.add_term(Word::plain(vec![t.out]), &c.mul_monomial(&t.coeff, &t.slot));
        }
    }

    /// `l_k(τ·w) = ε l_k(w)` for adjacent transpositions `τ`.
    pub fn symmetry_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.alphabet.names.len();
        for k in 2..=self.kmax {
            for w in words_of_len(n, k) {
                let word = Word::plain(w.clone());
                for i in 0..k - 1 {
                    let mut sigma: Vec<usize> = (0..k).collect();
                    sigma.swap(i, i + 1);
                    let (u, s) = permute(&self.alphabet, &word, &sigma);
                    let sign = koszul_q((s < 0) as i64);
                    let mut lhs: Vec<OpTerm> = self.bracket(&u.letters).to_vec();
                    lhs.sort();
                    let mut rhs: Vec<OpTerm> = self
                        .bracket(&w)
                        .iter()
                        .map(|t| OpTerm { slot: t.slot.clone(), out: t.out, coeff: &t.coeff * &sign })
                        .collect();
                    rhs.sort();
                    if lhs != rhs {
                        out.push(Violation::new(
                            "symmetry",
                            format!("l{}({}) is not graded symmetric", k, self.alphabet.render(&word)),
                        ));
                    }
                }
            }
        }
        out
    }

    /// `Σ_{k₁+k₂=k+1} Σ_unshuffles ± l_{k₁}(l_{k₂}(x_S), x_rest)` on a word.
    pub fn relation(&self, w: &Word, ceiling: Option<Exp>) -> SignedVector {
        let mut out = SignedVector::new(Flavor::Plain, ceiling);
        let one = Nov::one(ceiling);
        for (chosen, rest, sign) in unshuffles(&self.alphabet, w) {
            let mut inner = SignedVector::new(Flavor::Plain, ceiling);
            self.eval(&pick(w, &chosen), &one.scale(&sign), &mut inner);
            let tail = pick(w, &rest);
            for (y, c) in inner.iter() {
                let mut inputs = y.letters.clone();
                inputs.extend_from_slice(&tail);
                self.eval(&inputs, c, &mut out);
            }
        }
        out
    }

    /// Symmetry first; when the brackets are symmetric, the shuffle relation
    /// on every window word whose brackets are tabulated.
    pub fn defect(&self, w: &Window) -> DefectReport {
        let symmetry = self.symmetry_violations();
        if !symmetry.is_empty() {
            let mut r = DefectReport::new("bracket symmetry");
            for v in symmetry {
                r.checked += 1;
                r.entries.push(crate::ainfinity::DefectEntry {
                    cell: v.detail.clone(),
                    residual: v.kind.clone(),
                    valuation: crate::novikov::Valuation::Finite(Exp::zero()),
                });
            }
            return r;
        }
        let mut r = DefectReport::new("l-infinity relation");
        let len = w.lmax.min(self.kmax.saturating_sub(1));
        for word in all_words(self.alphabet.names.len(), len) {
            let word = Word::plain(word);
            r.record(&self.alphabet, &word, &self.relation(&word, Some(w.emax)));
        }
        r
    }
}

/// Which letters the bracket of the algebra passes in the module relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleSign {
    /// The algebra bracket moves past the module letter: `(−1)^{|v|'}`.
    Koszul,
    /// Only the unshuffle of the algebra letters is signed.
    AlgebraOnly,
}

/// `η_k(v; x₁,…,x_k)` tabulated on mark-first words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LModuleSpec {
    pub name: String,
    pub alphabet: Alphabet,
    pub algebra: LInfinitySpec,
    pub eta: ModuleTable,
    pub kmax: usize,
}

/// Symmetrize a bimodule over one algebra into an L∞-module.
pub fn lmodule_from_bimodule(m: &BimoduleSpec, kmax: usize) -> Result<LModuleSpec> {
    if m.left != m.right {
        return Err(Error::Spec("L-infinity modules need the same algebra on both sides".into()));
    }
    let alpha = m.alphabet();
    let mut eta = ModuleTable::new();
    for v in 0..m.size() as Letter {
        for x in all_words(m.left.size(), kmax) {
            let mut letters = vec![v];
            letters.extend_from_slice(&x);
            let word = Word::marked(letters, 0);
            let mut terms = Vec::new();
            symmetrized(&alpha, &word, |u| m.op(u), &mut terms);
            if !terms.is_empty() {
                eta.insert(word, terms);
            }
        }
    }
    Ok(LModuleSpec {
        name: format!("sym_{}", m.name),
        alphabet: alpha,
        algebra: symmetrize_algebra(&m.left, kmax + 1),
        eta,
        kmax,
    })
}

impl LModuleSpec {
    /// Slots of the brackets and of the module maps together.
    pub fn op_slots(&self) -> Vec<Slot> {
        slots_and_gap(self.algebra.brackets.values().flatten().chain(self.eta.values().flatten())).0
    }

    pub fn lambda0(&self) -> Exp {
        slots_and_gap(self.algebra.brackets.values().flatten().chain(self.eta.values().flatten())).1
    }

    pub fn eta(&self, w: &Word) -> &[OpTerm] {
        self.eta.get(w).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub(crate) fn eval_into(&self, v: Letter, xs: &[Letter], c: &Nov, out: &mut SignedVector) {
        let mut letters = vec![v];
        letters.extend_from_slice(xs);
        for t in self.eta(&Word::marked(letters, 0)) {
            out.add_term(Word::marked(vec![t.out], 0), &c.mul_monomial(&t.coeff, &t.slot));
        }
    }

    /// The module relation on `[v] x₁ ⋯ x_k`.
    pub fn relation(&self, w: &Word, sign: ModuleSign, ceiling: Option<Exp>) -> SignedVector {
        let v = w.letters[0];
        let xs = Word::plain(w.letters[1..].to_vec());
        let vdeg = self.alphabet.module_sdeg[v as usize];
        let one = Nov::one(ceiling);
        let mut out = SignedVector::new(Flavor::Marked, ceiling);
        for (chosen, rest, s) in unshuffles(&self.alphabet, &xs) {
            let inside = pick(&xs, &chosen);
            let outside = pick(&xs, &rest);
            let mut inner = SignedVector::new(Flavor::Marked, ceiling);
            self.eval_into(v, &inside, &one.scale(&s), &mut inner);
            for (u, c) in inner.iter() {
                self.eval_into(u.letters[0], &outside, c, &mut out);
            }
            let extra = match sign {
                ModuleSign::Koszul => koszul_q(vdeg),
                ModuleSign::AlgebraOnly => Q::from_integer(1.into()),
            };
            let mut bracket = SignedVector::new(Flavor::Plain, ceiling);
            self.algebra.eval(&inside, &one.scale(&(&s * &extra)), &mut bracket);
            for (y, c) in bracket.iter() {
                let mut args = y.letters.clone();
                args.extend_from_slice(&outside);
                self.eval_into(v, &args, c, &mut out);
            }
        }
        out
    }

    pub fn defect(&self, w: &Window, sign: ModuleSign) -> DefectReport {
        let mut r = DefectReport::new("l-infinity module relation");
        let len = w.lmax.min(self.kmax.saturating_sub(1));
        for v in 0..self.alphabet.module_names.len() as Letter {
            for x in all_words(self.alphabet.names.len(), len) {
                let mut letters = vec![v];
                letters.extend_from_slice(&x);
                let word = Word::marked(letters, 0);
                r.record(&self.alphabet, &word, &self.relation(&word, sign, Some(w.emax)));
            }
        }
        r
    }
}

/// Length-one part of `d̂` on the full symmetric sum of a word; the second
/// route to `l_k`.
pub fn bracket_via_bar(a: &AlgebraSpec, w: &[Letter], ceiling: Exp) -> Result<SignedVector> {
    let mut sum = SignedVector::new(Flavor::Plain, Some(ceiling));
    for sigma in all_perms(w.len()) {
        let (u, s) = permute(&a.alphabet, &Word::plain(w.to_vec()), &sigma);
        sum.add_term(u, &Nov::constant(koszul_q((s < 0) as i64), Some(ceiling)));
    }
    let image = a.dhat(&sum, w.len())?;
    let mut out = SignedVector::new(Flavor::Plain, Some(ceiling));
    for (u, c) in image.iter() {
        if u.len() == 1 {
            out.add_term(u.clone(), c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{build, NAMES};
    use crate::novikov::{exp_int, q_int};
    use crate::words::Alphabet;
    use proptest::prelude::*;

    fn window() -> Window {
        Window::new(3, exp_int(3))
    }

    #[test]
    fn l1_is_m1() {
        let a = build("E1").unwrap();
        let l = symmetrize_algebra(&a, 3);
        for x in 0..a.size() as Letter {
            assert_eq!(l.bracket(&[x]), a.op(&[x]));
        }
    }

    #[test]
    fn graded_commutative_product_has_no_higher_brackets() {
        // x, y of degree 1 (shifted 0): x·y = −y·x is graded commutative.
        let l = symmetrize_algebra(&build("E-free").unwrap(), 3);
        assert!(l.brackets.keys().all(|k| k.len() < 2));
    }

    #[test]
    fn commutator_of_noncommutative_product() {
        let mut a = AlgebraSpec::new("nc", &[("x", 1), ("y", 1), ("w", 1)]);
        a.set_op(&["x", "y"], "b0", "w", q_int(1));
        let l = symmetrize_algebra(&a, 2);
        let x = a.letter("x");
        let y = a.letter("y");
        // Shifted degrees are 0, so l₂(x, y) = m₂(x, y) + m₂(y, x).
        assert_eq!(l.bracket(&[x, y]), &[OpTerm { slot: crate::novikov::Slot::zero(), out: 2, coeff: q_int(1) }]);
        assert_eq!(l.bracket(&[y, x]), l.bracket(&[x, y]));
    }

    #[test]
    fn examples_satisfy_the_relation() {
        for n in NAMES {
            let l = symmetrize_algebra(&build(n).unwrap(), 4);
            let r = l.defect(&window());
            assert!(r.is_empty(), "{}: {:?}", n, r.worst());
        }
    }

    #[test]
    fn zero_brackets_are_fine() {
        let l = symmetrize_algebra(&build("E-zero").unwrap(), 3);
        assert!(l.brackets.is_empty());
        assert!(l.defect(&window()).is_empty());
    }

    #[test]
    fn asymmetric_bracket_is_reported_first() {
        let mut l = symmetrize_algebra(&build("E-free").unwrap(), 3);
        add_op_term(&mut l.brackets, vec![1, 2], OpTerm { slot: crate::novikov::Slot::zero(), out: 3, coeff: q_int(1) });
        let r = l.defect(&window());
        assert_eq!(r.label, "bracket symmetry");
        assert!(!r.is_empty());
    }

    #[test]
    fn planted_bracket_breaks_the_relation() {
        let a = build("E1").unwrap();
        let mut l = symmetrize_algebra(&a, 3);
        let b = a.letter("b");
        add_op_term(&mut l.brackets, vec![b], OpTerm { slot: crate::novikov::Slot::zero(), out: b, coeff: q_int(1) });
        assert!(!l.defect(&window()).is_empty());
    }

    #[test]
    fn module_of_zero_algebra_is_zero() {
        let m = lmodule_from_bimodule(&BimoduleSpec::diagonal(&build("E-zero").unwrap()), 3).unwrap();
        assert!(m.eta.is_empty());
    }

    #[test]
    fn eta0_is_n00() {
        for n in NAMES {
            let b = BimoduleSpec::diagonal(&build(n).unwrap());
            let m = lmodule_from_bimodule(&b, 2).unwrap();
            for v in 0..b.size() as Letter {
                let w = Word::marked(vec![v], 0);
                assert_eq!(m.eta(&w), b.op(&w));
            }
        }
    }

    #[test]
    fn diagonal_modules_satisfy_the_module_relation() {
        for n in NAMES {
            let m = lmodule_from_bimodule(&BimoduleSpec::diagonal(&build(n).unwrap()), 3).unwrap();
            let r = m.defect(&window(), ModuleSign::Koszul);
            assert!(r.is_empty(), "{}: {:?}", n, r.worst());
        }
    }

    #[test]
    fn module_relation_needs_the_module_sign() {
        // A left idempotent `e` of odd shifted degree with `m₁(a) = b`.
        let mut a = AlgebraSpec::new("left", &[("e", 0), ("a", 1), ("b", 2)]);
        a.set_op(&["a"], "b0", "b", q_int(1));
        a.set_op(&["e", "e"], "b0", "e", q_int(1));
        a.set_op(&["e", "a"], "b0", "a", q_int(1));
        a.set_op(&["e", "b"], "b0", "b", q_int(1));
        assert!(a.validate().is_empty());
        assert!(a.ainfty_defect(&window()).is_empty());
        let m = lmodule_from_bimodule(&BimoduleSpec::diagonal(&a), 3).unwrap();
        assert!(m.defect(&window(), ModuleSign::Koszul).is_empty());
        assert!(!m.defect(&window(), ModuleSign::AlgebraOnly).is_empty());
    }

    fn random_algebra(ops: Vec<(Vec<u8>, u8, i64)>) -> AlgebraSpec {
        let mut a = AlgebraSpec::new("r", &[("p", 1), ("q", 2), ("r", 1), ("s", 0)]);
        a.alphabet = Alphabet::new(a.alphabet.names.clone(), vec![0, 1, 0, -1]);
        for (ins, out, c) in ops {
            let names: Vec<String> = ins.iter().map(|i| a.alphabet.names[*i as usize % 4].clone()).collect();
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let o = a.alphabet.names[out as usize % 4].clone();
            a.set_op(&refs, "b0", &o, q_int(c));
        }
        a
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn brackets_match_bar_route(ops in proptest::collection::vec((proptest::collection::vec(0u8..4, 1..4), 0u8..4, -2i64..3), 0..5),
                                    w in proptest::collection::vec(0u16..4, 0..4)) {
            let a = random_algebra(ops);
            let l = symmetrize_algebra(&a, 3);
            let mut direct = SignedVector::new(Flavor::Plain, Some(exp_int(2)));
            l.eval(&w, &Nov::one(Some(exp_int(2))), &mut direct);
            prop_assert_eq!(direct, bracket_via_bar(&a, &w, exp_int(2)).unwrap());
        }

        #[test]
        fn brackets_are_symmetric(ops in proptest::collection::vec((proptest::collection::vec(0u8..4, 1..4), 0u8..4, -2i64..3), 0..5)) {
            let l = symmetrize_algebra(&random_algebra(ops), 3);
            prop_assert!(l.symmetry_violations().is_empty());
        }
    }
}
