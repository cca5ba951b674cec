//! Cycles built from the unit and the curvature: the bar cycle
//! `γ = Σ (−1)^k (I⊗m₀)^{⊗k}` and the cyclic cycle
//! `α = Σ (−1)^k N(I⊗m₀⊗I⊗⋯⊗m₀⊗I)`.

use num_traits::{One, Zero};

use crate::ainfinity::AlgebraSpec;
use crate::error::{Error, Result};
use crate::novikov::{Exp, Nov, Slot, Q};
use crate::window::{assemble, flat_from, BarSpace, FlatChain, Verdict, Window};
use crate::words::{cyclic_symmetrize, expand, Flavor, Letter, SignedVector, Word};

use super::{cyclic_space, CyclicOps};

fn tensor(x: &SignedVector, y: &SignedVector) -> SignedVector {
    let mut out = SignedVector::new(Flavor::Plain, x.ceiling);
    for (u, c) in x.iter() {
        for (w, d) in y.iter() {
            let mut l = u.letters.clone();
            l.extend_from_slice(&w.letters);
            out.add_term(Word::plain(l), &(c * d));
        }
    }
    out
}

fn letter(x: Letter, ceiling: Exp) -> SignedVector {
    SignedVector::basis(Flavor::Plain, Word::plain(vec![x]), &Slot::zero(), Some(ceiling))
}

fn ingredients(a: &AlgebraSpec, ceiling: Exp) -> Result<(SignedVector, SignedVector)> {
    let unit = a.unit.ok_or_else(|| Error::Spec(format!("{} has no strict unit", a.name)))?;
    let m0 = a.m0(Some(ceiling));
    if m0.is_zero() {
        return Err(Error::Spec(format!("{} has no curvature below the ceiling", a.name)));
    }
    if m0.valuation().finite().map_or(false, |v| v <= Exp::zero()) {
        return Err(Error::Invalid("the curvature has valuation 0; the series diverges".into()));
    }
    Ok((letter(unit, ceiling), m0))
}

fn flat(v: &SignedVector) -> FlatChain {
    flat_from(&v.iter().map(|(w, c)| ((0, w.clone()), c.clone())).collect::<Vec<_>>())
}

fn mhat(a: &AlgebraSpec, x: &SignedVector, arity: usize) -> SignedVector {
    let mut out = SignedVector::new(Flavor::Plain, x.ceiling);
    for (w, c) in x.iter() {
        a.mhat_word_into(&w.letters, c, arity..=arity, &mut out);
    }
    out
}

/// A cycle with its certificate data.
#[derive(Clone, Debug)]
pub struct CycleReport {
    pub cycle: SignedVector,
    /// `d̂` of the cycle below the ceiling; zero for a cycle.
    pub boundary: SignedVector,
    /// Per-`k` residuals of the step identity that makes the sum a cycle.
    pub steps: Vec<(usize, SignedVector)>,
    pub verdict: Option<Verdict>,
    pub verified: bool,
}

impl CycleReport {
    pub fn holds(&self) -> bool {
        self.boundary.is_zero() && self.steps.iter().all(|(_, r)| r.is_zero())
    }

    pub fn certified(&self) -> bool {
        matches!(self.verdict, Some(Verdict::NotBoundary(_))) && self.verified
    }
}

/// `(I⊗m₀)^{⊗k}` for `k = 0, 1, …` until it vanishes below the ceiling.
pub fn unit_powers(a: &AlgebraSpec, ceiling: Exp) -> Result<Vec<SignedVector>> {
    let (unit, m0) = ingredients(a, ceiling)?;
    let block = tensor(&unit, &m0);
    let mut out = vec![SignedVector::basis(Flavor::Plain, Word::empty(), &Slot::zero(), Some(ceiling))];
    loop {
        let next = tensor(out.last().unwrap(), &block);
        if next.is_zero() {
            return Ok(out);
        }
        out.push(next);
    }
}

/// `γ` truncated at the ceiling.
pub fn unit_cycle(a: &AlgebraSpec, ceiling: Exp) -> Result<SignedVector> {
    let mut g = SignedVector::new(Flavor::Plain, Some(ceiling));
    for (k, p) in unit_powers(a, ceiling)?.iter().enumerate() {
        g.add_vector(p, &alternating(k));
    }
    Ok(g)
}

fn alternating(k: usize) -> Q {
    if k % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// How `d̂` acts on the powers `X_k = (I⊗m₀)^{⊗k}`: `m̂₀(X_k) − m̂₂(X_{k+1})`
/// per `k`, which is what cancels in `d̂γ`. The second list holds
/// `d̂(X_k) − (m₀⊗X_k − m₀⊗X_{k−1})`, the displayed form taken literally.
pub fn unit_cycle_steps(a: &AlgebraSpec, ceiling: Exp) -> Result<(Vec<(usize, SignedVector)>, Vec<(usize, SignedVector)>)> {
    let powers = unit_powers(a, ceiling)?;
    let m0 = a.m0(Some(ceiling));
    let zero = SignedVector::new(Flavor::Plain, Some(ceiling));
    let mut actual = Vec::new();
    let mut literal = Vec::new();
    for k in 0..powers.len() {
        let next = powers.get(k + 1).unwrap_or(&zero);
        actual.push((k, mhat(a, &powers[k], 0).minus(&mhat(a, next, 2))));
        if k > 0 {
            let printed = tensor(&m0, &powers[k]).minus(&tensor(&m0, &powers[k - 1]));
            literal.push((k, a.dhat(&powers[k], usize::MAX)?.minus(&printed)));
        }
    }
    Ok((actual, literal))
}

/// `γ` on the bar complex including length zero: `d̂γ` below the ceiling,
/// the step residuals, and a certificate that its leading term `1` is not
/// a boundary.
pub fn unit_cycle_report(a: &AlgebraSpec, w: &Window) -> Result<CycleReport> {
    let cycle = unit_cycle(a, w.emax)?;
    let boundary = a.dhat(&cycle, w.arity())?;
    let (steps, _) = unit_cycle_steps(a, w.emax)?;
    let wc = assemble(&BarSpace::new(a, Flavor::Plain, 0).with_kmax(w.kmax), w)?;
    let z = flat(&cycle);
    let verdict = wc.nonboundary_certificate(&z)?;
    let verified = match &verdict {
        Verdict::NotBoundary(c) => wc.verify_certificate(c, &z),
        Verdict::Boundary(_) => false,
    };
    Ok(CycleReport { cycle, boundary, steps, verdict: Some(verdict), verified })
}

/// `I⊗m₀⊗I⊗⋯⊗m₀⊗I` with `k` curvature slots.
fn alternating_word(unit: &SignedVector, m0: &SignedVector, k: usize) -> SignedVector {
    let mut x = unit.clone();
    for _ in 0..k {
        x = tensor(&tensor(&x, m0), unit);
    }
    x
}

#[derive(Clone, Debug)]
pub struct AlphaReport {
    /// `α` on cyclic orbit representatives.
    pub alpha: SignedVector,
    /// Largest `k` with `α_{2k+1}` nonzero below the ceiling.
    pub kmax: usize,
    /// `m̂₀(α_{2k−1}) − m̂₂(α_{2k+1})` for `k ≥ 1`.
    pub lemma: Vec<(usize, SignedVector)>,
    /// `m̂₀(N(a₁⋯a_{2k+1})) − N(m̂₀(a₁⋯a_{2k}) ⊗ a_{2k+1})` on the alternating words.
    pub shift: Vec<(usize, SignedVector)>,
    /// `d̂α` below the ceiling, computed on the plain expansion.
    pub boundary: SignedVector,
    /// `N(I⊗I)`.
    pub unit_square: SignedVector,
    pub verdict: Option<Verdict>,
    pub verified: bool,
}

impl AlphaReport {
    pub fn holds(&self) -> bool {
        self.boundary.is_zero()
            && self.unit_square.is_zero()
            && self.lemma.iter().all(|(_, r)| r.is_zero())
            && self.shift.iter().all(|(_, r)| r.is_zero())
    }

    pub fn certified(&self) -> bool {
        matches!(self.verdict, Some(Verdict::NotBoundary(_))) && self.verified
    }
}

/// Build `α` below the ceiling and check its identities. With a window, also
/// certify that the leading term is not a boundary of the cyclic complex.
pub fn alpha_build(a: &AlgebraSpec, ceiling: Exp, window: Option<&Window>) -> Result<AlphaReport> {
    let (unit, m0) = ingredients(a, ceiling)?;
    let ops = CyclicOps::new(a);
    let mut words = Vec::new();
    loop {
        let x = alternating_word(&unit, &m0, words.len());
        if x.is_zero() {
            break;
        }
        words.push(x);
    }
    let orbits: Vec<SignedVector> = words.iter().map(|x| ops.norm(x)).collect();
    let mut plain = SignedVector::new(Flavor::Plain, Some(ceiling));
    let mut alpha = SignedVector::new(Flavor::Cyclic, Some(ceiling));
    for (k, x) in words.iter().enumerate() {
        plain.add_vector(&orbits[k], &alternating(k));
        alpha.add_vector(&cyclic_symmetrize(&a.alphabet, x)?, &alternating(k));
    }
    let lemma = (1..orbits.len()).map(|k| (k, mhat(a, &orbits[k - 1], 0).minus(&mhat(a, &orbits[k], 2)))).collect();
    let mut shift = Vec::new();
    for (k, x) in words.iter().enumerate().skip(1) {
        let (head, tail) = split_last(x);
        let rhs = ops.norm(&tensor(&mhat(a, &head, 0), &tail));
        shift.push((k, mhat(a, &orbits[k], 0).minus(&rhs)));
    }
    debug_assert_eq!(expand(&a.alphabet, &alpha), plain);
    let boundary = a.dhat(&plain, usize::MAX)?;
    let unit_square = ops.norm(&tensor(&unit, &unit));
    let (verdict, verified) = match window {
        Some(w) => {
            let wc = assemble(&cyclic_space(a, w), w)?;
            let z = flat(&alpha);
            let v = wc.nonboundary_certificate(&z)?;
            let ok = match &v {
                Verdict::NotBoundary(c) => wc.verify_certificate(c, &z),
                Verdict::Boundary(_) => false,
            };
            (Some(v), ok)
        }
        None => (None, false),
    };
    Ok(AlphaReport { alpha, kmax: words.len().saturating_sub(1), lemma, shift, boundary, unit_square, verdict, verified })
}

/// Split each word of a plain vector into everything but the last letter
/// and the last letter; the vectors here are sums of words sharing their
/// last letter, so the tail is that letter with coefficient one.
fn split_last(x: &SignedVector) -> (SignedVector, SignedVector) {
    let mut head = SignedVector::new(Flavor::Plain, x.ceiling);
    let mut last = None;
    for (w, c) in x.iter() {
        let n = w.len();
        head.add_term(Word::plain(w.letters[..n - 1].to_vec()), c);
        last = Some(w.letters[n - 1]);
    }
    let mut tail = SignedVector::new(Flavor::Plain, x.ceiling);
    if let Some(l) = last {
        tail.add_term(Word::plain(vec![l]), &Nov::one(x.ceiling));
    }
    (head, tail)
}
