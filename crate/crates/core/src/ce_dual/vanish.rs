//! Primary obstructions, vanishing certificates `d̂*x = 1 + h`, and their
//! use as contractions of the dual complexes.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ainfinity::AlgebraSpec;
use crate::error::{Error, Result};
use crate::linfinity::{symmetrize_algebra, LModuleSpec};
use crate::novikov::{Exp, Nov, Slot, Valuation, Q};
use crate::window::linalg::{solve, SparseQ, Splitting};
use crate::window::monoid_slots;
use crate::words::{Alphabet, Letter, Word};

use super::dual::{DualSeries, DualWindow};
use super::weight;

/// Contraction data for a dual complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub x: DualSeries,
    /// `d̂*x − 1`.
    pub h: DualSeries,
    /// `Σ_j (−1)^j h^j` up to the length bound.
    pub h_inv: DualSeries,
    pub alphabet: Alphabet,
}

impl Certificate {
    /// `x·h′`, whose differential is `1`.
    pub fn contraction(&self) -> DualSeries {
        self.x.times(&self.alphabet, &self.h_inv)
    }

    /// `x·h′·z`; its differential is `z` when `z` is a cocycle.
    pub fn witness(&self, z: &DualSeries) -> DualSeries {
        self.contraction().times(&self.alphabet, z)
    }

    /// Recompute `d̂*` of the witness from scratch and compare with `z`
    /// where both are known.
    pub fn check(&self, win: &DualWindow, z: &DualSeries) -> Result<bool> {
        let d = win.differential(&self.witness(z))?;
        Ok(d.agrees_below(z, d.ceiling, d.lmax))
    }
}

/// Check `d̂*x = 1 + h` with `h` of positive length and nonnegative
/// valuation; the error string names the failed hypothesis.
pub fn vanishing_certificate(win: &DualWindow, x: &DualSeries) -> Result<std::result::Result<Certificate, String>> {
    let dx = win.differential(x)?;
    let one = DualSeries::one(dx.ceiling, dx.lmax);
    let h = dx.minus(&one);
    if let Some(c) = h.terms.get(&Word::empty()) {
        return Ok(Err(format!("d*x has length-zero part 1 + ({}), not 1", c)));
    }
    if let Valuation::Finite(v) = h.valuation() {
        if v < Exp::zero() {
            let (w, c) = h.terms.iter().find(|(_, c)| c.valuation() == Valuation::Finite(v)).unwrap();
            let single = DualSeries { terms: [(w.clone(), c.clone())].into(), ..h.clone() };
            return Ok(Err(format!("h has negative valuation {} at {}", v, single.render())));
        }
    }
    let mut h_inv = DualSeries::one(h.ceiling, h.lmax);
    let mut power = DualSeries::one(h.ceiling, h.lmax);
    for j in 1..=h.lmax {
        power = power.times(&win.alphabet, &h);
        if power.is_zero() {
            break;
        }
        let sign = if j % 2 == 0 { Q::one() } else { -Q::one() };
        h_inv = h_inv.plus(&power.scaled(&sign));
    }
    Ok(Ok(Certificate { x: x.clone(), h, h_inv, alphabet: win.alphabet.clone() }))
}

/// One primary obstruction class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub slot: Slot,
    /// Coefficients of `O_s` in the basis.
    pub cycle: Vec<Q>,
    /// `m̄₁(O_s) = 0`.
    pub closed: bool,
    /// `O_s ∈ im m̄₁`.
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub obstructions: Vec<Obstruction>,
    pub candidate: Option<DualSeries>,
    pub certificate: Option<Certificate>,
    pub message: String,
}

fn basis_vector(n: usize, terms: impl Iterator<Item = (Letter, Q)>) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    for (i, q) in terms {
        v[i as usize] += q;
    }
    v
}

fn sparse(v: &[Q]) -> SparseQ {
    v.iter().enumerate().filter(|(_, q)| !q.is_zero()).map(|(i, q)| (i, q.clone())).collect()
}

/// Energy-zero part of `m₁` as columns.
fn bar_m1(a: &AlgebraSpec) -> Vec<Vec<Q>> {
    (0..a.size() as Letter)
        .map(|u| basis_vector(a.size(), a.op(&[u]).iter().filter(|t| t.slot.energy.is_zero()).map(|t| (t.out, t.coeff.clone()))))
        .collect()
}

/// Find the minimal-energy pieces of `m₀`, test them against `m̄₁`, and when
/// one is not exact build `y = T^{−λ}e^{−q} φ` with `φ(O_s) = 1`,
/// `φ(O_t) = 0` for the others and `φ∘m̄₁ = 0`, then certify it on the
/// dual of the symmetric bar complex with length bound `lmax`.
pub fn obstruction_extract(a: &AlgebraSpec, lmax: usize, ceiling: Exp) -> Result<ObstructionReport> {
    let m0 = a.op(&[]);
    let Some(lambda) = m0.iter().map(|t| t.slot.energy).min() else {
        return Ok(ObstructionReport {
            obstructions: Vec::new(),
            candidate: None,
            certificate: None,
            message: "no obstruction: m0 = 0".into(),
        });
    };
    let n = a.size();
    let m1 = bar_m1(a);
    let image: Vec<SparseQ> = m1.iter().map(|c| sparse(c)).collect();
    let mut slots: Vec<Slot> = m0.iter().filter(|t| t.slot.energy == lambda).map(|t| t.slot.clone()).collect();
    slots.sort();
    slots.dedup();
    let mut obstructions = Vec::new();
    for s in &slots {
        let cycle = basis_vector(n, m0.iter().filter(|t| t.slot == *s).map(|t| (t.out, t.coeff.clone())));
        let mut d = vec![Q::zero(); n];
        for (i, q) in cycle.iter().enumerate() {
            for (j, p) in m1[i].iter().enumerate() {
                d[j] += q * p;
            }
        }
        let closed = d.iter().all(Q::is_zero);
        let exact = solve(&image, &sparse(&cycle)).is_some();
        obstructions.push(Obstruction { slot: s.clone(), cycle, closed, exact });
    }
    let Some(s) = obstructions.iter().position(|o| !o.exact) else {
        return Ok(ObstructionReport {
            obstructions,
            candidate: None,
            certificate: None,
            message: "no certificate: all primary obstructions exact".into(),
        });
    };
    // Constraint rows: φ(O_s), φ(O_t), φ(m̄₁ e_u); unknowns are φ's coordinates.
    let mut rows: Vec<&Vec<Q>> = vec![&obstructions[s].cycle];
    rows.extend(obstructions.iter().enumerate().filter(|(t, _)| *t != s).map(|(_, o)| &o.cycle));
    rows.extend(m1.iter());
    let cols: Vec<SparseQ> = (0..n).map(|i| rows.iter().enumerate().filter(|(_, r)| !r[i].is_zero()).map(|(j, r)| (j, r[i].clone())).collect()).collect();
    let target: SparseQ = [(0usize, Q::one())].into();
    let Some(phi) = solve(&cols, &target) else {
        return Ok(ObstructionReport {
            obstructions,
            candidate: None,
            certificate: None,
            message: "no certificate: no functional separates the obstruction from the others and from im m1".into(),
        });
    };
    let slot = &obstructions[s].slot;
    let shift = Slot::new(-slot.energy, -slot.maslov);
    let mut y = DualSeries::zero(ceiling + lambda, lmax + 1);
    for (i, q) in phi {
        y = y.plus(&DualSeries::monomial(Word::plain(vec![i as Letter]), q, &shift, ceiling + lambda, lmax + 1));
    }
    let l = symmetrize_algebra(a, a.max_arity().max(1));
    let win = DualWindow::algebra(&l);
    let (certificate, message) = match vanishing_certificate(&win, &y)? {
        Ok(c) => (Some(c), format!("certificate from y = {}", y.render())),
        Err(why) => (None, format!("candidate y = {} rejected: {}", y.render(), why)),
    };
    Ok(ObstructionReport { obstructions, candidate: Some(y), certificate, message })
}

/// A basis of the dual cocycles on chains of length at most `lmax` below
/// `ceiling`: the kernel of `z ↦ d̂*z` over the energy slots.
pub fn cocycle_basis(win: &DualWindow, lmax: usize, ceiling: Exp) -> Result<Vec<DualSeries>> {
    let slots: Vec<Slot> = monoid_slots(&win.space.slot_gens(), ceiling);
    let mut vars: Vec<(Word, Slot)> = Vec::new();
    let mut var_index: HashMap<(Word, Slot), usize> = HashMap::new();
    for size in 0..=lmax {
        for (_, w) in win.chains(size) {
            for s in &slots {
                var_index.insert((w.clone(), s.clone()), vars.len());
                vars.push((w.clone(), s.clone()));
            }
        }
    }
    let mut cols: Vec<SparseQ> = vec![SparseQ::new(); vars.len()];
    let mut rows: HashMap<(Word, Slot), usize> = HashMap::new();
    for size in 0..lmax {
        for key in win.chains(size) {
            for (k, c) in win.space.apply(&key, ceiling)? {
                for t in c.terms() {
                    for s in &slots {
                        let target = t.slot().shift(s);
                        if target.energy >= ceiling {
                            continue;
                        }
                        let Some(&col) = var_index.get(&(k.1.clone(), s.clone())) else { continue };
                        let n = rows.len();
                        let row = *rows.entry((key.1.clone(), target)).or_insert(n);
                        *cols[col].entry(row).or_insert_with(Q::zero) += &t.coeff * weight(&k.1);
                    }
                }
            }
        }
    }
    for c in &mut cols {
        c.retain(|_, q| !q.is_zero());
    }
    let split = Splitting::new(&cols);
    Ok(split
        .kernel
        .into_iter()
        .map(|(_, v)| {
            let mut z = DualSeries::zero(ceiling, lmax);
            for (i, q) in v {
                let (w, s) = &vars[i];
                z.add_value(w.clone(), &Nov::monomial(q, s.energy, s.maslov, Some(ceiling)));
            }
            z
        })
        .collect())
}

/// Random nonzero integer combinations of the cocycle basis, from a seed.
pub fn sample_cocycles(win: &DualWindow, lmax: usize, ceiling: Exp, count: usize, seed: u64) -> Result<Vec<DualSeries>> {
    let basis = cocycle_basis(win, lmax, ceiling)?;
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut z = DualSeries::zero(ceiling, lmax);
        for b in &basis {
            let c: i64 = rng.gen_range(-2..=2);
            if c != 0 {
                z = z.plus(&b.scaled(&Q::from_integer(c.into())));
            }
        }
        if !z.is_zero() {
            out.push(z);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleVanishing {
    pub sampled: usize,
    pub verified: usize,
    /// Cocycles whose witness failed, rendered.
    pub failures: Vec<String>,
}

impl ModuleVanishing {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.verified == self.sampled
    }
}

/// For sampled module cocycles `ζ`, the witness `ζ̃·x·h′` (with `ζ̃` the
/// parity twist) has differential `ζ`; each one is rechecked.
pub fn ce_module_vanishing(
    m: &LModuleSpec,
    certificate: Option<&Certificate>,
    lmax: usize,
    ceiling: Exp,
    samples: usize,
    seed: u64,
) -> Result<ModuleVanishing> {
    let cert = certificate.ok_or_else(|| Error::Refused("no vanishing certificate for the algebra".into()))?;
    let win = DualWindow::module(m);
    let k = cert.contraction();
    let mut report = ModuleVanishing { sampled: 0, verified: 0, failures: Vec::new() };
    for z in sample_cocycles(&win, lmax, ceiling, samples, seed)? {
        report.sampled += 1;
        let witness = z.parity_twist(&m.alphabet).times(&m.alphabet, &k);
        let d = win.differential(&witness)?;
        if d.agrees_below(&z, d.ceiling, d.lmax) {
            report.verified += 1;
        } else {
            report.failures.push(z.render());
        }
    }
    Ok(report)
}
