//! Tensor words, Koszul signs, and signed vectors over words.
//!
//! A word is a sequence of letter indices. Module-marked words carry one
//! underlined position whose letter indexes the module basis instead of the
//! algebra basis. Every sign uses shifted degrees `|x|' = deg x − 1`.
//!
//! Cyclic and symmetric invariant vectors are stored on canonical orbit
//! representatives: the coefficient at a representative `r` stands for the
//! orbit sum `O(r) = Σ ε_u u` over the distinct words `u` of the orbit, with
//! `ε_u` the sign relating `u` to `r`. Orbits that contain a word together
//! with its negative have no invariant vector and are dropped.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use thiserror::Error;

use crate::novikov::{Exp, Nov, Q, Slot, Valuation};

pub type Letter = u16;

/// A permutation of `0..k`; `sigma[i]` is the old position of the letter that
/// lands at position `i`.
pub type Perm = Vec<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordsError {
    #[error("permutation of size {perm} applied to {degrees} letters")]
    LengthMismatch { perm: usize, degrees: usize },
    #[error("vector is not invariant: {0}")]
    NotInvariant(String),
    #[error("flavor mismatch: expected {expected:?}, found {found:?}")]
    Flavor { expected: Flavor, found: Flavor },
    #[error("cannot parse word `{0}`")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Plain,
    Cyclic,
    Symmetric,
    Marked,
    MarkedSymmetric,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub letters: Vec<Letter>,
    pub mark: Option<u8>,
}

impl Word {
    pub fn empty() -> Word {
        Word { letters: Vec::new(), mark: None }
    }

    pub fn plain(letters: Vec<Letter>) -> Word {
        Word { letters, mark: None }
    }

    pub fn marked(letters: Vec<Letter>, mark: usize) -> Word {
        Word { letters, mark: Some(mark as u8) }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_marked(&self, i: usize) -> bool {
        self.mark == Some(i as u8)
    }
}

/// Names and shifted degrees of the algebra and module letters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    pub names: Vec<String>,
    pub sdeg: Vec<i64>,
    pub module_names: Vec<String>,
    pub module_sdeg: Vec<i64>,
}

impl Alphabet {
    pub fn new(names: Vec<String>, sdeg: Vec<i64>) -> Alphabet {
        Alphabet { names, sdeg, module_names: Vec::new(), module_sdeg: Vec::new() }
    }

    pub fn with_module(mut self, names: Vec<String>, sdeg: Vec<i64>) -> Alphabet {
        self.module_names = names;
        self.module_sdeg = sdeg;
        self
    }

    /// Alphabet whose letters carry the given shifted degrees, named `x0, x1, …`.
    pub fn from_degrees(sdeg: &[i64]) -> Alphabet {
        Alphabet::new((0..sdeg.len()).map(|i| format!("x{}", i)).collect(), sdeg.to_vec())
    }

    pub fn letter_deg(&self, w: &Word, i: usize) -> i64 {
        if w.is_marked(i) {
            self.module_sdeg[w.letters[i] as usize]
        } else {
            self.sdeg[w.letters[i] as usize]
        }
    }

    pub fn degrees(&self, w: &Word) -> Vec<i64> {
        (0..w.len()).map(|i| self.letter_deg(w, i)).collect()
    }

    /// Total shifted degree of a word.
    pub fn word_deg(&self, w: &Word) -> i64 {
        (0..w.len()).map(|i| self.letter_deg(w, i)).sum()
    }

    pub fn letter_name(&self, w: &Word, i: usize) -> &str {
        if w.is_marked(i) {
            &self.module_names[w.letters[i] as usize]
        } else {
            &self.names[w.letters[i] as usize]
        }
    }

    /// Word literal: `x1*x2`, module letter as `[v]`, empty word as `1`.
    pub fn render(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        (0..w.len())
            .map(|i| {
                if w.is_marked(i) {
                    format!("[{}]", self.letter_name(w, i))
                } else {
                    self.letter_name(w, i).to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Parse a word literal, with optional `cyc:` or `sym:` prefix.
    pub fn parse(&self, text: &str) -> Result<(Flavor, Word), WordsError> {
        let text = text.trim();
        let (flavor, body) = if let Some(rest) = text.strip_prefix("cyc:") {
            (Flavor::Cyclic, rest)
        } else if let Some(rest) = text.strip_prefix("sym:") {
            (Flavor::Symmetric, rest)
        } else {
            (Flavor::Plain, text)
        };
        let body = body.trim();
        if body == "1" || body.is_empty() {
            return Ok((flavor, Word::empty()));
        }
        let mut letters = Vec::new();
        let mut mark = None;
        for (i, tok) in body.split('*').enumerate() {
            let tok = tok.trim();
            if let Some(inner) = tok.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
                let idx = self
                    .module_names
                    .iter()
                    .position(|n| n == inner)
                    .ok_or_else(|| WordsError::Parse(text.to_string()))?;
                if mark.is_some() {
                    return Err(WordsError::Parse(text.to_string()));
                }
                mark = Some(i as u8);
                letters.push(idx as Letter);
            } else {
                let idx = self
                    .names
                    .iter()
                    .position(|n| n == tok)
                    .ok_or_else(|| WordsError::Parse(text.to_string()))?;
                letters.push(idx as Letter);
            }
        }
        let flavor = match (flavor, mark.is_some()) {
            (Flavor::Plain, true) => Flavor::Marked,
            (Flavor::Symmetric, true) => Flavor::MarkedSymmetric,
            (f, _) => f,
        };
        Ok((flavor, Word { letters, mark }))
    }
}

/// `(−1)^ε` for the action of `sigma`: the sum over inverted pairs of the
/// product of the shifted degrees of the two letters that cross.
pub fn koszul_sign(sigma: &[usize], sdeg: &[i64]) -> Result<i32, WordsError> {
    if sigma.len() != sdeg.len() {
        return Err(WordsError::LengthMismatch { perm: sigma.len(), degrees: sdeg.len() });
    }
    Ok(koszul_parity(sigma, sdeg))
}

fn koszul_parity(sigma: &[usize], sdeg: &[i64]) -> i32 {
    let mut odd = false;
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] && (sdeg[sigma[i]] * sdeg[sigma[j]]).rem_euclid(2) == 1 {
                odd = !odd;
            }
        }
    }
    if odd {
        -1
    } else {
        1
    }
}

/// The permutation `ρ` with `act(ρ, w) = act(σ, act(τ, w))`.
pub fn compose(sigma: &[usize], tau: &[usize]) -> Perm {
    sigma.iter().map(|&i| tau[i]).collect()
}

pub fn identity(k: usize) -> Perm {
    (0..k).collect()
}

/// The cyclic generator `t(x_0, …, x_n) = ±(x_n, x_0, …, x_{n−1})`.
pub fn rotation(k: usize) -> Perm {
    if k == 0 {
        return Vec::new();
    }
    let mut p = vec![k - 1];
    p.extend(0..k - 1);
    p
}

/// All permutations of `0..k` in lexicographic order.
pub fn all_perms(k: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    let mut used = vec![false; k];
    fn go(k: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Perm>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(k, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    go(k, &mut cur, &mut used, &mut out);
    out
}

/// Reorder a word by `sigma`, returning the Koszul sign.
pub fn permute(alpha: &Alphabet, w: &Word, sigma: &[usize]) -> (Word, i32) {
    let degs = alpha.degrees(w);
    let sign = koszul_parity(sigma, &degs);
    let letters = sigma.iter().map(|&i| w.letters[i]).collect();
    let mark = w.mark.map(|m| sigma.iter().position(|&i| i == m as usize).unwrap() as u8);
    (Word { letters, mark }, sign)
}

/// Apply `t^j` to a word.
pub fn rotate(alpha: &Alphabet, w: &Word, j: usize) -> (Word, i32) {
    let n = w.len();
    if n == 0 {
        return (w.clone(), 1);
    }
    let j = j % n;
    let sigma: Perm = (0..n).map(|i| (i + n - j) % n).collect();
    permute(alpha, w, &sigma)
}

/// Canonical orbit data of a word: representative `r`, the coefficient `ε`
/// of the word inside `O(r)`, and the orbit size. `None` for
/// self-cancelling orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRep {
    pub rep: Word,
    pub sign: i32,
    pub orbit: usize,
    /// Size of the acting group (`n` for cyclic, `n!` for symmetric).
    pub group: usize,
}

impl OrbitRep {
    /// `N(w) = mult · ε · O(r)` where `mult = group / orbit`.
    pub fn multiplicity(&self) -> usize {
        self.group / self.orbit
    }
}

pub fn cyclic_rep(alpha: &Alphabet, w: &Word) -> Option<OrbitRep> {
    let n = w.len();
    if n == 0 {
        return Some(OrbitRep { rep: w.clone(), sign: 1, orbit: 1, group: 1 });
    }
    let mut best: Option<(Word, i32)> = None;
    let mut period = n;
    for j in 0..n {
        let (u, s) = rotate(alpha, w, j);
        if j > 0 && u == *w {
            if s == -1 {
                return None;
            }
            period = period.min(j);
        }
        match &best {
            Some((b, _)) if *b <= u => {}
            _ => best = Some((u, s)),
        }
    }
    let (rep, sign) = best.unwrap();
    Some(OrbitRep { rep, sign, orbit: period, group: n })
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn sort_key(w: &Word, i: usize) -> (u8, Letter) {
    (if w.is_marked(i) { 0 } else { 1 }, w.letters[i])
}

pub fn symmetric_rep(alpha: &Alphabet, w: &Word) -> Option<OrbitRep> {
    let n = w.len();
    let mut sigma: Perm = (0..n).collect();
    sigma.sort_by_key(|&i| sort_key(w, i));
    let (rep, sign) = permute(alpha, w, &sigma);
    let mut stab = 1usize;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && sort_key(&rep, j) == sort_key(&rep, i) {
            j += 1;
        }
        let run = j - i;
        if run > 1 && alpha.letter_deg(&rep, i).rem_euclid(2) == 1 {
            return None;
        }
        stab *= factorial(run);
        i = j;
    }
    let group = factorial(n);
    Some(OrbitRep { rep, sign, orbit: group / stab, group })
}

/// Distinct words of the cyclic orbit of a representative with their signs.
pub fn cyclic_orbit(alpha: &Alphabet, rep: &Word) -> Vec<(Word, i32)> {
    let n = rep.len().max(1);
    let mut out: Vec<(Word, i32)> = Vec::new();
    for j in 0..n {
        let (u, s) = rotate(alpha, rep, j);
        if !out.iter().any(|(v, _)| *v == u) {
            out.push((u, s));
        }
    }
    out
}

/// Distinct rearrangements of a representative with their Koszul signs.
pub fn symmetric_orbit(alpha: &Alphabet, rep: &Word) -> Vec<(Word, i32)> {
    let n = rep.len();
    let mut out = Vec::new();
    let mut cur: Perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn go(
        alpha: &Alphabet,
        rep: &Word,
        cur: &mut Perm,
        used: &mut Vec<bool>,
        out: &mut Vec<(Word, i32)>,
    ) {
        let n = rep.len();
        if cur.len() == n {
            let (u, s) = permute(alpha, rep, cur);
            out.push((u, s));
            return;
        }
        let mut seen: Vec<(u8, Letter)> = Vec::new();
        for i in 0..n {
            if used[i] {
                continue;
            }
            let key = sort_key(rep, i);
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            used[i] = true;
            cur.push(i);
            go(alpha, rep, cur, used, out);
            cur.pop();
            used[i] = false;
        }
    }
    go(alpha, rep, &mut cur, &mut used, &mut out);
    out
}

/// Sparse Novikov-linear combination of words of one flavor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedVector {
    pub flavor: Flavor,
    pub ceiling: Option<Exp>,
    terms: BTreeMap<Word, Nov>,
}

impl SignedVector {
    pub fn new(flavor: Flavor, ceiling: Option<Exp>) -> SignedVector {
        SignedVector { flavor, ceiling, terms: BTreeMap::new() }
    }

    pub fn single(flavor: Flavor, w: Word, c: Nov) -> SignedVector {
        let mut v = SignedVector::new(flavor, c.ceiling());
        v.add_term(w, &c);
        v
    }

    /// The word with coefficient `T^λ e^q`.
    pub fn basis(flavor: Flavor, w: Word, slot: &Slot, ceiling: Option<Exp>) -> SignedVector {
        let mut v = SignedVector::new(flavor, ceiling);
        v.add_monomial(w, &Q::one(), slot);
        v
    }

    pub fn add_term(&mut self, w: Word, c: &Nov) {
        if c.is_zero() {
            return;
        }
        let c = c.clone().with_ceiling(self.ceiling);
        match self.terms.get_mut(&w) {
            Some(existing) => {
                *existing += &c;
                if existing.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(w, c);
                }
            }
        }
    }

    /// Add `c T^λ e^q · w`.
    pub fn add_monomial(&mut self, w: Word, c: &Q, slot: &Slot) {
        if c.is_zero() || self.ceiling.map_or(false, |e| slot.energy >= e) {
            return;
        }
        let n = Nov::monomial(c.clone(), slot.energy, slot.maslov, self.ceiling);
        self.add_term(w, &n);
    }

    pub fn add_vector(&mut self, other: &SignedVector, c: &Q) {
        for (w, n) in &other.terms {
            self.add_term(w.clone(), &n.scale(c));
        }
    }

    pub fn add_vector_shifted(&mut self, other: &SignedVector, c: &Q, slot: &Slot) {
        for (w, n) in &other.terms {
            self.add_term(w.clone(), &n.mul_monomial(c, slot));
        }
    }

    pub fn get(&self, w: &Word) -> Option<&Nov> {
        self.terms.get(w)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Nov)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, c: &Q) -> SignedVector {
        let mut out = SignedVector::new(self.flavor, self.ceiling);
        out.add_vector(self, c);
        out
    }

    pub fn minus(&self, other: &SignedVector) -> SignedVector {
        let mut out = self.clone();
        out.add_vector(other, &-Q::one());
        out
    }

    pub fn plus(&self, other: &SignedVector) -> SignedVector {
        let mut out = self.clone();
        out.add_vector(other, &Q::one());
        out
    }

    pub fn valuation(&self) -> Valuation {
        self.terms.values().map(|n| n.valuation()).min().unwrap_or(Valuation::Infinite)
    }

    /// Multiply every coefficient by a scalar.
    pub fn times(&self, c: &Nov) -> SignedVector {
        let mut out = SignedVector::new(self.flavor, self.ceiling);
        for (w, n) in &self.terms {
            out.add_term(w.clone(), &(n * c));
        }
        out
    }

    /// Part of minimal energy.
    pub fn leading_part(&self) -> SignedVector {
        let mut out = SignedVector::new(self.flavor, self.ceiling);
        if let Valuation::Finite(v) = self.valuation() {
            for (w, n) in &self.terms {
                for t in n.terms().iter().filter(|t| t.energy == v) {
                    out.add_monomial(w.clone(), &t.coeff, &t.slot());
                }
            }
        }
        out
    }

    pub fn truncated(&self, ceiling: Option<Exp>) -> SignedVector {
        let mut out = SignedVector::new(self.flavor, ceiling);
        for (w, n) in &self.terms {
            out.add_term(w.clone(), n);
        }
        out
    }

    pub fn with_flavor(mut self, flavor: Flavor) -> SignedVector {
        self.flavor = flavor;
        self
    }

    /// Q-linear coordinates `(word, slot) → coefficient`.
    pub fn flat(&self) -> Vec<((Word, Slot), Q)> {
        let mut out = Vec::new();
        for (w, n) in &self.terms {
            for t in n.terms() {
                out.push(((w.clone(), t.slot()), t.coeff.clone()));
            }
        }
        out
    }

    pub fn render(&self, alpha: &Alphabet) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let prefix = match self.flavor {
            Flavor::Cyclic => "cyc:",
            Flavor::Symmetric | Flavor::MarkedSymmetric => "sym:",
            _ => "",
        };
        self.terms
            .iter()
            .map(|(w, n)| format!("({}){}{}", n, prefix, alpha.render(w)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Flavor::Plain => "plain",
            Flavor::Cyclic => "cyclic",
            Flavor::Symmetric => "symmetric",
            Flavor::Marked => "marked",
            Flavor::MarkedSymmetric => "marked-symmetric",
        };
        write!(f, "{}", s)
    }
}

fn expect_flavor(v: &SignedVector, allowed: &[Flavor]) -> Result<(), WordsError> {
    if allowed.contains(&v.flavor) {
        Ok(())
    } else {
        Err(WordsError::Flavor { expected: allowed[0], found: v.flavor })
    }
}

/// `σ · v` on a plain or marked vector; words of other lengths are left alone.
pub fn act(alpha: &Alphabet, sigma: &[usize], v: &SignedVector) -> SignedVector {
    let mut out = SignedVector::new(v.flavor, v.ceiling);
    for (w, c) in v.iter() {
        if w.len() == sigma.len() {
            let (u, s) = permute(alpha, w, sigma);
            out.add_term(u, &c.scale(&Q::from_integer(s.into())));
        } else {
            out.add_term(w.clone(), c);
        }
    }
    out
}

/// Apply `N = 1 + t + … + t^n` lengthwise and store on orbit representatives.
pub fn cyclic_symmetrize(alpha: &Alphabet, v: &SignedVector) -> Result<SignedVector, WordsError> {
    expect_flavor(v, &[Flavor::Plain])?;
    let mut out = SignedVector::new(Flavor::Cyclic, v.ceiling);
    for (w, c) in v.iter() {
        if let Some(o) = cyclic_rep(alpha, w) {
            let k = Q::from_integer((o.sign as i64 * o.multiplicity() as i64).into());
            out.add_term(o.rep, &c.scale(&k));
        }
    }
    Ok(out)
}

/// Apply `Σ_{τ∈S_k} τ` lengthwise and store on orbit representatives.
pub fn full_symmetrize(alpha: &Alphabet, v: &SignedVector) -> Result<SignedVector, WordsError> {
    expect_flavor(v, &[Flavor::Plain, Flavor::Marked])?;
    let flavor = if v.flavor == Flavor::Marked { Flavor::MarkedSymmetric } else { Flavor::Symmetric };
    let mut out = SignedVector::new(flavor, v.ceiling);
    for (w, c) in v.iter() {
        if let Some(o) = symmetric_rep(alpha, w) {
            let k = Q::from_integer((o.sign as i64 * o.multiplicity() as i64).into());
            out.add_term(o.rep, &c.scale(&k));
        }
    }
    Ok(out)
}

/// Plain (or marked) vector of an invariant vector: each representative
/// becomes its orbit sum.
pub fn expand(alpha: &Alphabet, v: &SignedVector) -> SignedVector {
    let flavor = match v.flavor {
        Flavor::MarkedSymmetric | Flavor::Marked => Flavor::Marked,
        _ => Flavor::Plain,
    };
    let mut out = SignedVector::new(flavor, v.ceiling);
    for (r, c) in v.iter() {
        let orbit = match v.flavor {
            Flavor::Cyclic => cyclic_orbit(alpha, r),
            Flavor::Symmetric | Flavor::MarkedSymmetric => symmetric_orbit(alpha, r),
            _ => vec![(r.clone(), 1)],
        };
        for (u, s) in orbit {
            out.add_term(u, &c.scale(&Q::from_integer(s.into())));
        }
    }
    out
}

/// Read an invariant plain vector back onto orbit representatives. With
/// `check`, verify invariance and report the first offending word.
pub fn canonicalize(
    alpha: &Alphabet,
    v: &SignedVector,
    flavor: Flavor,
    check: bool,
) -> Result<SignedVector, WordsError> {
    let mut out = SignedVector::new(flavor, v.ceiling);
    for (w, c) in v.iter() {
        let rep = match flavor {
            Flavor::Cyclic => cyclic_rep(alpha, w),
            Flavor::Symmetric | Flavor::MarkedSymmetric => symmetric_rep(alpha, w),
            _ => Some(OrbitRep { rep: w.clone(), sign: 1, orbit: 1, group: 1 }),
        };
        match rep {
            None => {
                if check {
                    return Err(WordsError::NotInvariant(alpha.render(w)));
                }
            }
            Some(o) if o.rep == *w => out.add_term(w.clone(), c),
            Some(o) => {
                if check {
                    let r = v.get(&o.rep).map(|n| n.scale(&Q::from_integer(o.sign.into())));
                    if r.as_ref() != Some(c) {
                        return Err(WordsError::NotInvariant(alpha.render(w)));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Rotate marked words by `t^j`, carrying the underline along.
pub fn module_cycle_action(alpha: &Alphabet, j: usize, v: &SignedVector) -> SignedVector {
    let mut out = SignedVector::new(v.flavor, v.ceiling);
    for (w, c) in v.iter() {
        let (u, s) = rotate(alpha, w, j);
        out.add_term(u, &c.scale(&Q::from_integer(s.into())));
    }
    out
}

pub fn sign_q(s: i32) -> Q {
    if s >= 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novikov::exp_int;

    fn alpha(degs: &[i64]) -> Alphabet {
        Alphabet::from_degrees(degs)
    }

    fn vec_of(flavor: Flavor, words: &[(&[Letter], i64)]) -> SignedVector {
        let mut v = SignedVector::new(flavor, Some(exp_int(4)));
        for (w, c) in words {
            v.add_monomial(Word::plain(w.to_vec()), &Q::from_integer((*c).into()), &Slot::zero());
        }
        v
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 0, 3]).unwrap(), 1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&[1, 2, 0], &[1, 1, 1]).unwrap(), 1);
        assert!(koszul_sign(&[1, 0], &[1]).is_err());
    }

    #[test]
    fn rotation_sign_matches_moving_last_letter() {
        // t(x0, x1, x2) = (−1)^{|x2|'(|x0|'+|x1|')} (x2, x0, x1)
        let a = alpha(&[1, 2, 1]);
        let (u, s) = permute(&a, &Word::plain(vec![0, 1, 2]), &rotation(3));
        assert_eq!(u.letters, vec![2, 0, 1]);
        assert_eq!(s, -1);
    }

    #[test]
    fn swap_of_odd_letters() {
        let a = alpha(&[1, 1]);
        let v = vec_of(Flavor::Plain, &[(&[0, 1], 1)]);
        assert_eq!(act(&a, &[1, 0], &v), vec_of(Flavor::Plain, &[(&[1, 0], -1)]));
        assert_eq!(act(&a, &[0, 1], &v), v);
    }

    #[test]
    fn cyclic_symmetrization_examples() {
        let a = alpha(&[1, 0, 0, 0]);
        let ll = vec_of(Flavor::Plain, &[(&[0, 0], 1)]);
        assert!(cyclic_symmetrize(&a, &ll).unwrap().is_zero());
        let x = vec_of(Flavor::Plain, &[(&[1], 1)]);
        assert_eq!(expand(&a, &cyclic_symmetrize(&a, &x).unwrap()), x);
        let abc = vec_of(Flavor::Plain, &[(&[1, 2, 3], 1)]);
        let n = expand(&a, &cyclic_symmetrize(&a, &abc).unwrap());
        assert_eq!(n, vec_of(Flavor::Plain, &[(&[1, 2, 3], 1), (&[2, 3, 1], 1), (&[3, 1, 2], 1)]));
    }

    #[test]
    fn full_symmetrization_examples() {
        let a = alpha(&[1, 0, 0]);
        assert!(full_symmetrize(&a, &vec_of(Flavor::Plain, &[(&[0, 0], 1)])).unwrap().is_zero());
        let x = vec_of(Flavor::Plain, &[(&[1], 1)]);
        assert_eq!(expand(&a, &full_symmetrize(&a, &x).unwrap()), x);
        let ab = vec_of(Flavor::Plain, &[(&[1, 2], 1)]);
        let s = expand(&a, &full_symmetrize(&a, &ab).unwrap());
        assert_eq!(s, vec_of(Flavor::Plain, &[(&[1, 2], 1), (&[2, 1], 1)]));
        // repeated even letter: [x, x] = 2 x⊗x
        let xx = vec_of(Flavor::Plain, &[(&[1, 1], 1)]);
        let s = full_symmetrize(&a, &xx).unwrap();
        assert_eq!(expand(&a, &s), vec_of(Flavor::Plain, &[(&[1, 1], 2)]));
    }

    #[test]
    fn module_rotation() {
        let a = alpha(&[0, 0]).with_module(vec!["v".into()], vec![0]);
        let w = Word::marked(vec![0, 1], 0);
        let mut v = SignedVector::new(Flavor::Marked, None);
        v.add_monomial(w.clone(), &Q::one(), &Slot::zero());
        let r = module_cycle_action(&a, 1, &v);
        let (u, _) = r.iter().next().unwrap();
        assert_eq!(u, &Word::marked(vec![1, 0], 1));
        assert_eq!(module_cycle_action(&a, 0, &v), v);
        assert_eq!(module_cycle_action(&a, 1, &r), v);
    }

    #[test]
    fn parse_and_render() {
        let a = alpha(&[0, 1]).with_module(vec!["v".into()], vec![1]);
        let (f, w) = a.parse("x0*[v]*x1").unwrap();
        assert_eq!(f, Flavor::Marked);
        assert_eq!(a.render(&w), "x0*[v]*x1");
        assert_eq!(a.parse("cyc:x0*x1").unwrap().0, Flavor::Cyclic);
        assert!(a.parse("x9").is_err());
    }
}
