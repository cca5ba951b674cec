//! Gapped filtered A∞-algebras: specs, the bar coderivation `d̂`, and the
//! structure-equation, unit and gappedness checks.
//!
//! An operation table maps an input word to terms `c T^λ e^q · out`, where
//! `(λ, 2q)` is the (energy, Maslov) class of the contribution. A cell
//! `T^λ e^q · w` has degree `Σ|w_i|' + 2q`; every operation raises it by one.

pub mod bimodule;
pub mod hom;
pub mod schema;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::novikov::{exp_int, fmt_exp, parse_exp, parse_q, Exp, Nov, Slot, Valuation, Q};
use crate::window::Window;
use crate::words::{canonicalize, expand, Alphabet, Flavor, Letter, SignedVector, Word};

pub use bimodule::BimoduleSpec;
pub use hom::HomomorphismSpec;
use schema::{BasisEntry, ClassEntry, OpEntry, OutEntry, RatText, SpecFile, TermEntry};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Class {
    pub label: String,
    pub energy: Exp,
    pub maslov: i64,
}

impl Class {
    pub fn slot(&self) -> Slot {
        Slot::new(self.energy, self.maslov.div_euclid(2))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OpTerm {
    pub slot: Slot,
    pub out: Letter,
    pub coeff: Q,
}

/// Sparse operation table keyed by the exact input word.
pub type OpTable = BTreeMap<Vec<Letter>, Vec<OpTerm>>;

/// Add a term, merging with an equal `(slot, out)` and dropping zeros.
pub fn add_op_term(table: &mut OpTable, inputs: Vec<Letter>, term: OpTerm) {
    if term.coeff.is_zero() {
        return;
    }
    let entry = table.entry(inputs.clone()).or_default();
    match entry.iter_mut().find(|t| t.slot == term.slot && t.out == term.out) {
        Some(t) => t.coeff += term.coeff,
        None => entry.push(term),
    }
    entry.retain(|t| !t.coeff.is_zero());
    entry.sort();
    if entry.is_empty() {
        table.remove(&inputs);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: String,
    pub detail: String,
}

impl Violation {
    pub fn new(kind: &str, detail: String) -> Violation {
        Violation { kind: kind.to_string(), detail }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectEntry {
    pub cell: String,
    pub residual: String,
    pub valuation: Valuation,
}

/// Residuals of an identity evaluated on window cells; empty means it holds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DefectReport {
    pub label: String,
    pub checked: usize,
    pub entries: Vec<DefectEntry>,
}

impl DefectReport {
    pub fn new(label: &str) -> DefectReport {
        DefectReport { label: label.to_string(), checked: 0, entries: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn record(&mut self, alpha: &Alphabet, cell: &Word, residual: &SignedVector) {
        self.checked += 1;
        if !residual.is_zero() {
            self.entries.push(DefectEntry {
                cell: alpha.render(cell),
                residual: residual.render(alpha),
                valuation: residual.valuation(),
            });
        }
    }

    /// Like `record`, with a caller-chosen cell name.
    pub fn record_named(&mut self, alpha: &Alphabet, cell: String, residual: &SignedVector) {
        self.checked += 1;
        if !residual.is_zero() {
            self.entries.push(DefectEntry { cell, residual: residual.render(alpha), valuation: residual.valuation() });
        }
    }

    /// The entry of smallest valuation.
    pub fn worst(&self) -> Option<&DefectEntry> {
        self.entries.iter().min_by_key(|e| e.valuation)
    }
}

pub(crate) fn parse_rational(r: &RatText, what: &str) -> Result<Q> {
    parse_q(&r.as_text()).ok_or_else(|| Error::Spec(format!("bad rational `{}` in {}", r.as_text(), what)))
}

pub(crate) fn parse_energy(r: &RatText, what: &str) -> Result<Exp> {
    parse_exp(&r.as_text()).ok_or_else(|| Error::Spec(format!("bad energy `{}` in {}", r.as_text(), what)))
}

pub(crate) fn rat_text(q: &Q) -> RatText {
    if q.is_integer() {
        if let Ok(n) = i64::try_from(q.numer()) {
            return RatText::Int(n);
        }
    }
    RatText::Text(crate::novikov::fmt_q(q))
}

pub(crate) fn energy_text(e: &Exp) -> RatText {
    if e.is_integer() {
        RatText::Int(*e.numer())
    } else {
        RatText::Text(fmt_exp(e))
    }
}

fn lookup(names: &[String], id: &str, what: &str) -> Result<Letter> {
    names
        .iter()
        .position(|n| n == id)
        .map(|i| i as Letter)
        .ok_or_else(|| Error::Spec(format!("unknown id `{}` in {}", id, what)))
}

pub(crate) fn parse_classes(entries: &[ClassEntry]) -> Result<Vec<Class>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for c in entries {
        if !seen.insert(c.label.clone()) {
            return Err(Error::Spec(format!("duplicate class label `{}`", c.label)));
        }
        out.push(Class { label: c.label.clone(), energy: parse_energy(&c.energy, &c.label)?, maslov: c.maslov });
    }
    Ok(out)
}

pub(crate) fn class_slot(classes: &[Class], label: &str) -> Result<Slot> {
    classes
        .iter()
        .find(|c| c.label == label)
        .map(|c| c.slot())
        .ok_or_else(|| Error::Spec(format!("unknown class `{}`", label)))
}

/// Parse op entries whose inputs and outputs are plain ids.
pub(crate) fn parse_ops(
    entries: &[OpEntry],
    classes: &[Class],
    in_names: &[String],
    out_names: &[String],
    what: &str,
) -> Result<OpTable> {
    let mut table = OpTable::new();
    for op in entries {
        let slot = class_slot(classes, &op.class)?;
        for t in &op.terms {
            let inputs = t
                .inputs
                .iter()
                .map(|id| lookup(in_names, id, what))
                .collect::<Result<Vec<_>>>()?;
            if let Some(a) = op.arity {
                if a != inputs.len() {
                    return Err(Error::Spec(format!(
                        "{}: term with {} inputs listed under arity {}",
                        what,
                        inputs.len(),
                        a
                    )));
                }
            }
            for o in &t.out {
                let out = lookup(out_names, &o.id, what)?;
                let coeff = parse_rational(&o.coeff, what)?;
                add_op_term(&mut table, inputs.clone(), OpTerm { slot: slot.clone(), out, coeff });
            }
        }
    }
    Ok(table)
}

/// Make sure every slot used by a table has a class; returns the label map.
pub(crate) fn class_labels(classes: &mut Vec<Class>, slots: impl Iterator<Item = Slot>) -> BTreeMap<Slot, String> {
    let mut map = BTreeMap::new();
    for c in classes.iter() {
        map.entry(c.slot()).or_insert_with(|| c.label.clone());
    }
    for s in slots {
        if !map.contains_key(&s) {
            let label = format!("b{}_{}", fmt_exp(&s.energy).replace('/', "_"), 2 * s.maslov);
            classes.push(Class { label: label.clone(), energy: s.energy, maslov: 2 * s.maslov });
            map.insert(s, label);
        }
    }
    map
}

/// Serialize a table grouped by (arity, class).
pub(crate) fn ops_to_entries(
    table: &OpTable,
    labels: &BTreeMap<Slot, String>,
    in_name: &dyn Fn(&[Letter], usize) -> String,
    out_names: &[String],
    with_arity: bool,
) -> Vec<OpEntry> {
    let mut grouped: BTreeMap<(usize, Slot), Vec<TermEntry>> = BTreeMap::new();
    for (inputs, terms) in table {
        let mut by_slot: BTreeMap<Slot, Vec<OutEntry>> = BTreeMap::new();
        for t in terms {
            by_slot
                .entry(t.slot.clone())
                .or_default()
                .push(OutEntry { id: out_names[t.out as usize].clone(), coeff: rat_text(&t.coeff) });
        }
        for (slot, out) in by_slot {
            let names = (0..inputs.len()).map(|i| in_name(inputs, i)).collect();
            grouped.entry((inputs.len(), slot)).or_default().push(TermEntry { inputs: names, out });
        }
    }
    grouped
        .into_iter()
        .map(|((arity, slot), terms)| OpEntry {
            arity: if with_arity { Some(arity) } else { None },
            class: labels[&slot].clone(),
            terms,
        })
        .collect()
}

fn sign_of(parity: i64) -> Q {
    if parity.rem_euclid(2) == 1 {
        -Q::one()
    } else {
        Q::one()
    }
}

pub(crate) fn koszul_q(parity: i64) -> Q {
    sign_of(parity)
}

/// A gapped filtered A∞-algebra given by sparse operation tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSpec {
    pub name: String,
    pub alphabet: Alphabet,
    /// Unshifted degrees.
    pub degrees: Vec<i64>,
    pub unit: Option<Letter>,
    pub classes: Vec<Class>,
    pub ops: OpTable,
    /// Z/2-graded mode: Maslov exponents erased, degrees mod 2.
    pub z2: bool,
}

impl AlgebraSpec {
    pub fn new(name: &str, basis: &[(&str, i64)]) -> AlgebraSpec {
        let names = basis.iter().map(|(n, _)| n.to_string()).collect();
        let degrees: Vec<i64> = basis.iter().map(|(_, d)| *d).collect();
        let sdeg = degrees.iter().map(|d| d - 1).collect();
        AlgebraSpec {
            name: name.to_string(),
            alphabet: Alphabet::new(names, sdeg),
            degrees,
            unit: None,
            classes: vec![Class { label: "b0".into(), energy: Exp::zero(), maslov: 0 }],
            ops: OpTable::new(),
            z2: false,
        }
    }

    pub fn size(&self) -> usize {
        self.degrees.len()
    }

    pub fn letter(&self, id: &str) -> Letter {
        self.alphabet.names.iter().position(|n| n == id).unwrap_or_else(|| panic!("no basis element {}", id)) as Letter
    }

    pub fn add_class(&mut self, label: &str, energy: Exp, maslov: i64) {
        self.classes.push(Class { label: label.to_string(), energy, maslov });
    }

    /// Add `coeff · class · out` to `m_k(inputs)`.
    pub fn set_op(&mut self, inputs: &[&str], class: &str, out: &str, coeff: Q) {
        let slot = class_slot(&self.classes, class).expect("known class");
        let inputs = inputs.iter().map(|i| self.letter(i)).collect();
        let out = self.letter(out);
        add_op_term(&mut self.ops, inputs, OpTerm { slot, out, coeff });
    }

    /// Flag `id` as the strict unit and add `m₂(I,x) = x`, `m₂(x,I) = (−1)^{deg x} x`.
    pub fn add_unit(&mut self, id: &str) {
        let u = self.letter(id);
        self.unit = Some(u);
        for x in 0..self.size() as Letter {
            let sx = if self.degrees[x as usize].rem_euclid(2) == 1 { -Q::one() } else { Q::one() };
            add_op_term(&mut self.ops, vec![u, x], OpTerm { slot: Slot::zero(), out: x, coeff: Q::one() });
            if x != u {
                add_op_term(&mut self.ops, vec![x, u], OpTerm { slot: Slot::zero(), out: x, coeff: sx });
            }
        }
    }

    pub fn from_file(f: &SpecFile) -> Result<AlgebraSpec> {
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        let mut unit = None;
        for (i, b) in f.basis.iter().enumerate() {
            if names.contains(&b.id) {
                return Err(Error::Spec(format!("duplicate basis id `{}`", b.id)));
            }
            names.push(b.id.clone());
            degrees.push(b.degree);
            if b.unit {
                if unit.is_some() {
                    return Err(Error::Spec("more than one basis element flagged as unit".into()));
                }
                unit = Some(i as Letter);
            }
        }
        let classes = parse_classes(&f.classes)?;
        let ops = parse_ops(&f.ops, &classes, &names, &names, "ops")?;
        let sdeg = degrees.iter().map(|d| d - 1).collect();
        Ok(AlgebraSpec {
            name: f.name.clone(),
            alphabet: Alphabet::new(names, sdeg),
            degrees,
            unit,
            classes,
            ops,
            z2: false,
        })
    }

    pub fn basis_entries(&self) -> Vec<BasisEntry> {
        self.alphabet
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| BasisEntry { id: n.clone(), degree: self.degrees[i], unit: self.unit == Some(i as Letter) })
            .collect()
    }

    pub fn to_file(&self) -> SpecFile {
        let mut classes = self.classes.clone();
        let labels = class_labels(&mut classes, self.ops.values().flatten().map(|t| t.slot.clone()));
        let names = self.alphabet.names.clone();
        let in_name = |w: &[Letter], i: usize| names[w[i] as usize].clone();
        let ops = ops_to_entries(&self.ops, &labels, &in_name, &self.alphabet.names, true);
        SpecFile {
            name: self.name.clone(),
            basis: self.basis_entries(),
            classes: classes
                .iter()
                .map(|c| ClassEntry { label: c.label.clone(), energy: energy_text(&c.energy), maslov: c.maslov })
                .collect(),
            ops,
            module_basis: None,
            n_ops: Vec::new(),
            source: None,
            target: None,
            f_ops: Vec::new(),
        }
    }

    pub fn op(&self, inputs: &[Letter]) -> &[OpTerm] {
        self.ops.get(inputs).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn max_arity(&self) -> usize {
        self.ops.keys().map(|k| k.len()).max().unwrap_or(0)
    }

    pub fn has_m0(&self) -> bool {
        !self.op(&[]).is_empty()
    }

    /// Slots carried by the operations (the generators of the energy monoid).
    pub fn op_slots(&self) -> Vec<Slot> {
        let mut s: BTreeSet<Slot> = self.classes.iter().map(|c| c.slot()).collect();
        s.extend(self.ops.values().flatten().map(|t| t.slot.clone()));
        s.into_iter().collect()
    }

    /// Smallest positive energy, or 1 when everything has energy zero.
    pub fn lambda0(&self) -> Exp {
        self.op_slots()
            .iter()
            .map(|s| s.energy)
            .filter(|e| *e > Exp::zero())
            .min()
            .unwrap_or_else(|| exp_int(1))
    }

    /// `m₀(1)` as a vector of length-one words.
    pub fn m0(&self, ceiling: Option<Exp>) -> SignedVector {
        let mut v = SignedVector::new(Flavor::Plain, ceiling);
        for t in self.op(&[]) {
            v.add_monomial(Word::plain(vec![t.out]), &t.coeff, &t.slot);
        }
        v
    }

    /// Degree of the cell `T^λ e^q · w`.
    pub fn cell_degree(&self, w: &Word, slot: &Slot) -> i64 {
        let d = self.alphabet.word_deg(w) + 2 * slot.maslov;
        if self.z2 {
            d.rem_euclid(2)
        } else {
            d
        }
    }

    /// The Z/2-graded variant: Maslov exponents erased, degrees mod 2.
    pub fn to_z2(&self) -> AlgebraSpec {
        let mut a = self.clone();
        a.z2 = true;
        a.degrees = a.degrees.iter().map(|d| d.rem_euclid(2)).collect();
        a.alphabet.sdeg = a.alphabet.sdeg.iter().map(|d| d.rem_euclid(2)).collect();
        for c in &mut a.classes {
            c.maslov = 0;
        }
        let mut ops = OpTable::new();
        for (k, terms) in &self.ops {
            for t in terms {
                let slot = Slot::new(t.slot.energy, 0);
                add_op_term(&mut ops, k.clone(), OpTerm { slot, out: t.out, coeff: t.coeff.clone() });
            }
        }
        a.ops = ops;
        a
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut zero_classes = 0;
        for c in &self.classes {
            if c.maslov.rem_euclid(2) != 0 {
                out.push(Violation::new("maslov", format!("class {} has odd Maslov index {}", c.label, c.maslov)));
            }
            if c.energy < Exp::zero() {
                out.push(Violation::new("energy", format!("class {} has negative energy", c.label)));
            }
            if c.energy.is_zero() {
                if c.maslov != 0 {
                    out.push(Violation::new(
                        "gapped",
                        format!("class {} has energy 0 but Maslov index {}", c.label, c.maslov),
                    ));
                } else {
                    zero_classes += 1;
                }
            }
        }
        if zero_classes > 1 {
            out.push(Violation::new("gapped", "more than one class of energy 0".into()));
        }
        let declared: BTreeSet<Slot> = self.classes.iter().map(|c| c.slot()).collect();
        let alpha = &self.alphabet;
        for (inputs, terms) in &self.ops {
            let word = Word::plain(inputs.clone());
            let shown = format!("m{}({})", inputs.len(), alpha.render(&word));
            for t in terms {
                if !declared.contains(&t.slot) {
                    out.push(Violation::new("class", format!("{} uses an undeclared class", shown)));
                }
                if t.slot.energy.is_zero() && t.slot.maslov != 0 {
                    out.push(Violation::new("gapped", format!("{} has energy 0 with nonzero Maslov index", shown)));
                }
                if inputs.is_empty() && t.slot.energy <= Exp::zero() {
                    out.push(Violation::new("energy", format!("m0 must have positive energy (term {})", alpha.names[t.out as usize])));
                }
                let lhs = alpha.word_deg(&word) + 1 - 2 * t.slot.maslov;
                let rhs = alpha.sdeg[t.out as usize];
                let bad = if self.z2 { (lhs - rhs).rem_euclid(2) != 0 } else { lhs != rhs };
                if bad {
                    out.push(Violation::new(
                        "degree",
                        format!("{} -> {} shifts degree by {} instead of 1", shown, alpha.names[t.out as usize], rhs - lhs + 1),
                    ));
                }
            }
        }
        out
    }

    /// Check the strict unit relations; errors when no unit is flagged.
    pub fn unit_check(&self) -> Result<Vec<Violation>> {
        let u = self.unit.ok_or_else(|| Error::Spec(format!("{} has no unit", self.name)))?;
        let mut out = Vec::new();
        let alpha = &self.alphabet;
        for (inputs, terms) in &self.ops {
            if !inputs.contains(&u) || terms.is_empty() {
                continue;
            }
            if inputs.len() != 2 {
                out.push(Violation::new(
                    "unit",
                    format!("m{}({}) must vanish", inputs.len(), alpha.render(&Word::plain(inputs.clone()))),
                ));
            }
        }
        for x in 0..self.size() as Letter {
            let name = &alpha.names[x as usize];
            let expect = |c: Q| vec![OpTerm { slot: Slot::zero(), out: x, coeff: c }];
            if self.op(&[u, x]) != expect(Q::one()).as_slice() {
                out.push(Violation::new("unit", format!("m2(I,{}) != {}", name, name)));
            }
            let s = if self.degrees[x as usize].rem_euclid(2) == 1 { -Q::one() } else { Q::one() };
            if self.op(&[x, u]) != expect(s).as_slice() {
                out.push(Violation::new("unit", format!("m2({},I) != (-1)^deg {}", name, name)));
            }
        }
        Ok(out)
    }

    /// Add `d̂(c · w)` to `out`, using operations of arity at most `kmax`.
    pub fn dhat_word_into(&self, w: &[Letter], c: &Nov, kmax: usize, out: &mut SignedVector) {
        self.mhat_word_into(w, c, 0..=kmax.min(w.len()), out)
    }

    /// Add `Σ_{k ∈ arities} m̂_k(c · w)` to `out`.
    pub fn mhat_word_into(
        &self,
        w: &[Letter],
        c: &Nov,
        arities: impl Iterator<Item = usize> + Clone,
        out: &mut SignedVector,
    ) {
        let n = w.len();
        let mut prefix = 0i64;
        for i in 0..=n {
            let sign = sign_of(prefix);
            for k in arities.clone() {
                if i + k > n {
                    continue;
                }
                for t in self.op(&w[i..i + k]) {
                    let mut letters = Vec::with_capacity(n + 1 - k);
                    letters.extend_from_slice(&w[..i]);
                    letters.push(t.out);
                    letters.extend_from_slice(&w[i + k..]);
                    out.add_term(Word::plain(letters), &c.mul_monomial(&(&sign * &t.coeff), &t.slot));
                }
            }
            if i < n {
                prefix += self.alphabet.sdeg[w[i] as usize];
            }
        }
    }

    /// `d̂` on a plain, cyclic or symmetric vector; invariant flavors are
    /// expanded, hit with `d̂`, and read back onto representatives.
    pub fn dhat(&self, v: &SignedVector, kmax: usize) -> Result<SignedVector> {
        let longest = v.iter().map(|(w, _)| w.len()).max().unwrap_or(0);
        self.mhat(v, 0..=kmax.min(longest.max(self.max_arity())))
    }

    pub fn mhat(&self, v: &SignedVector, arities: impl Iterator<Item = usize> + Clone) -> Result<SignedVector> {
        match v.flavor {
            Flavor::Plain => {
                let mut out = SignedVector::new(Flavor::Plain, v.ceiling);
                for (w, c) in v.iter() {
                    self.mhat_word_into(&w.letters, c, arities.clone(), &mut out);
                }
                Ok(out)
            }
            Flavor::Cyclic | Flavor::Symmetric => {
                let plain = expand(&self.alphabet, v);
                let image = self.mhat(&plain, arities)?;
                Ok(canonicalize(&self.alphabet, &image, v.flavor, false)?)
            }
            f => Err(Error::Spec(format!("d-hat is not defined on {} vectors", f))),
        }
    }

    /// `d̂ ∘ d̂` on every window word; empty iff the A∞ relations hold there.
    pub fn ainfty_defect(&self, w: &Window) -> DefectReport {
        let mut report = DefectReport::new("d-hat squared");
        let ceiling = Some(w.emax);
        let kmax = w.kmax.unwrap_or(usize::MAX);
        for word in crate::window::all_words(self.size(), w.lmax) {
            let word = Word::plain(word);
            let mut once = SignedVector::new(Flavor::Plain, ceiling);
            self.dhat_word_into(&word.letters, &Nov::one(ceiling), kmax, &mut once);
            let mut twice = SignedVector::new(Flavor::Plain, ceiling);
            for (u, c) in once.iter() {
                self.dhat_word_into(&u.letters, c, kmax, &mut twice);
            }
            report.record(&self.alphabet, &word, &twice);
        }
        report
    }
}
