//! Finite windows of completed complexes: cell enumeration, exact assembly
//! with a clipping ledger, homology, energy pages and leading-term
//! certificates.
//!
//! A window admits a cell `T^λ e^q · w` when `size(w) ≤ lmax + slope·⌊λ/λ₀⌋`
//! and `λ < emax`. With `slope ≥ 1` every differential here keeps
//! `size − slope·λ/λ₀` from growing, so the window is a subcomplex.
//! `slope = 0` is the plain length bound; clipping then shows up in the
//! ledger.
//!
//! Homology in degree `d` is `(Z ∩ W_d) / (B ∩ W_d)`: cycles are tested with
//! the exact differential, boundaries come from window cells of degree
//! `d − 1` plus a halo of `halo` extra length.

pub mod linalg;
pub mod spaces;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::novikov::{fmt_exp, fmt_monomial, fmt_q, Exp, Nov, Slot, Q};
use crate::words::{Letter, Word};
use linalg::{dot, rank, rank_restricted, separating_functional, solve, SparseQ, Splitting};

pub use spaces::BarSpace;

pub const DEFAULT_CAP: usize = 400_000;

/// Hard cap on window cells; `OBSTRUCTA_CAP` overrides it.
pub fn cell_cap() -> usize {
    std::env::var("OBSTRUCTA_CAP").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_CAP)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub lmax: usize,
    pub emax: Exp,
    pub degrees: Option<(i64, i64)>,
    pub kmax: Option<usize>,
    pub slope: usize,
    pub halo: usize,
}

impl Window {
    pub fn new(lmax: usize, emax: Exp) -> Window {
        Window { lmax, emax, degrees: None, kmax: None, slope: 1, halo: 1 }
    }

    pub fn with_slope(mut self, slope: usize) -> Window {
        self.slope = slope;
        self
    }

    pub fn with_degrees(mut self, lo: i64, hi: i64) -> Window {
        self.degrees = Some((lo, hi));
        self
    }

    pub fn with_kmax(mut self, k: usize) -> Window {
        self.kmax = Some(k);
        self
    }

    pub fn with_halo(mut self, h: usize) -> Window {
        self.halo = h;
        self
    }

    pub fn arity(&self) -> usize {
        self.kmax.unwrap_or(usize::MAX)
    }

    /// Largest admitted size at energy `λ`.
    pub fn size_bound(&self, energy: Exp, lambda0: Exp) -> usize {
        let steps = (energy / lambda0).floor().to_integer().max(0) as usize;
        self.lmax + self.slope * steps
    }

    pub fn in_degrees(&self, d: i64) -> bool {
        self.degrees.map_or(true, |(lo, hi)| lo <= d && d <= hi)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lmax={} emax={} slope={} halo={}", self.lmax, fmt_exp(&self.emax), self.slope, self.halo)?;
        if let Some((lo, hi)) = self.degrees {
            write!(f, " degrees={}..{}", lo, hi)?;
        }
        if let Some(k) = self.kmax {
            write!(f, " kmax={}", k)?;
        }
        Ok(())
    }
}

/// Words of length exactly `len` over `n` letters, lexicographic.
pub fn words_of_len(n: usize, len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * n);
        for w in &out {
            for x in 0..n as Letter {
                let mut u = w.clone();
                u.push(x);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// Words of length at most `max_len`, shortest first.
pub fn all_words(n: usize, max_len: usize) -> Vec<Vec<Letter>> {
    (0..=max_len).flat_map(|l| words_of_len(n, l)).collect()
}

/// Slots of the monoid generated by `gens` with energy below `emax`.
pub fn monoid_slots(gens: &[Slot], emax: Exp) -> Vec<Slot> {
    let mut seen: BTreeSet<Slot> = BTreeSet::new();
    let mut frontier = vec![Slot::zero()];
    seen.insert(Slot::zero());
    let positive: Vec<&Slot> = gens.iter().filter(|g| g.energy > Exp::zero()).collect();
    while let Some(s) = frontier.pop() {
        for g in &positive {
            let t = s.shift(g);
            if t.energy < emax && seen.insert(t.clone()) {
                frontier.push(t);
            }
        }
    }
    seen.into_iter().collect()
}

/// A cell label: a bicomplex column (0 when unused) and a word.
pub type Key = (u32, Word);

/// A graded space of words with a Novikov-linear differential.
pub trait Space {
    fn label(&self) -> String;
    /// Keys of exactly this size (length plus any column offset).
    fn keys(&self, size: usize) -> Vec<Key>;
    /// Degree of the key with trivial coefficient.
    fn key_degree(&self, key: &Key) -> i64;
    /// The differential on a key, truncated at `ceiling`.
    fn apply(&self, key: &Key, ceiling: Exp) -> Result<Vec<(Key, Nov)>>;
    fn render(&self, key: &Key) -> String;
    /// Slots generating the coefficient monoid.
    fn slot_gens(&self) -> Vec<Slot>;
    fn lambda0(&self) -> Exp;
    fn z2(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub key: Key,
    pub slot: Slot,
    pub degree: i64,
    pub in_window: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub cell: String,
    pub degree: i64,
    pub residual: String,
}

/// An assembled window: cells, exact images, and the clipping ledger.
pub struct WindowedComplex {
    pub label: String,
    pub window: Window,
    pub lambda0: Exp,
    pub z2: bool,
    pub cells: Vec<Cell>,
    /// Row labels; the first `cells.len()` rows are the cells themselves.
    pub rows: Vec<(Key, Slot)>,
    pub row_index: HashMap<(Key, Slot), usize>,
    /// Exact image of each cell over `rows`.
    pub images: Vec<SparseQ>,
    pub ledger: Vec<LedgerEntry>,
    renders: HashMap<Key, String>,
}

fn cell_text(render: &str, slot: &Slot) -> String {
    if *slot == Slot::zero() {
        render.to_string()
    } else {
        format!("{}*{}", fmt_monomial(slot), render)
    }
}

/// Enumerate and assemble the window complex of a space.
pub fn assemble(space: &dyn Space, w: &Window) -> Result<WindowedComplex> {
    let lambda0 = space.lambda0();
    let z2 = space.z2();
    let slots = monoid_slots(&space.slot_gens(), w.emax);
    let mut key_cache: BTreeMap<usize, Vec<Key>> = BTreeMap::new();
    let mut cells = Vec::new();
    let cap = cell_cap();
    let reduce = |d: i64| if z2 { d.rem_euclid(2) } else { d };
    let degree_ok = |d: i64| match w.degrees {
        Some((lo, hi)) => z2 || (lo - 1 <= d && d <= hi + 1),
        None => true,
    };
    for s in &slots {
        let bound = w.size_bound(s.energy, lambda0);
        for size in 0..=bound + w.halo {
            let keys = key_cache.entry(size).or_insert_with(|| space.keys(size));
            for k in keys.iter() {
                let degree = reduce(space.key_degree(k) + 2 * s.maslov);
                if !degree_ok(degree) {
                    continue;
                }
                cells.push(Cell { key: k.clone(), slot: s.clone(), degree, in_window: size <= bound });
                if cells.len() > cap {
                    return Err(Error::Resource { cells: cells.len(), cap });
                }
            }
        }
    }
    let mut rows: Vec<(Key, Slot)> = cells.iter().map(|c| (c.key.clone(), c.slot.clone())).collect();
    let mut row_index: HashMap<(Key, Slot), usize> = rows.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    let mut image_cache: HashMap<Key, Vec<(Key, Nov)>> = HashMap::new();
    let mut images = Vec::with_capacity(cells.len());
    let mut renders = HashMap::new();
    for c in &cells {
        if !image_cache.contains_key(&c.key) {
            image_cache.insert(c.key.clone(), space.apply(&c.key, w.emax)?);
            renders.insert(c.key.clone(), space.render(&c.key));
        }
        let mut col = SparseQ::new();
        for (k, n) in &image_cache[&c.key] {
            for t in n.mul_monomial(&Q::one(), &c.slot).terms() {
                let r = (k.clone(), t.slot());
                let i = match row_index.get(&r) {
                    Some(&i) => i,
                    None => {
                        rows.push(r.clone());
                        row_index.insert(r, rows.len() - 1);
                        rows.len() - 1
                    }
                };
                let e = col.entry(i).or_insert_with(Q::zero);
                *e += &t.coeff;
                if e.is_zero() {
                    col.remove(&i);
                }
            }
        }
        images.push(col);
    }
    for (k, _) in &rows {
        if !renders.contains_key(k) {
            renders.insert(k.clone(), space.render(k));
        }
    }
    let mut wc = WindowedComplex {
        label: space.label(),
        window: w.clone(),
        lambda0,
        z2,
        cells,
        rows,
        row_index,
        images,
        ledger: Vec::new(),
        renders,
    };
    wc.ledger = wc.compute_ledger();
    Ok(wc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeRow {
    pub degree: i64,
    pub cells: usize,
    pub kernel: usize,
    pub image: usize,
    pub homology: usize,
    /// Rank of the differential leaving this degree.
    pub outgoing: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedRow {
    pub degree: i64,
    pub level: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyReport {
    pub label: String,
    pub window: String,
    pub rows: Vec<DegreeRow>,
    /// Degrees left out because of ledger entries, with the first entry.
    pub refused: Vec<(i64, String)>,
    /// Page-one dims, when the energies sit on a lattice.
    pub graded: Vec<GradedRow>,
    pub certificates: Vec<String>,
}

impl HomologyReport {
    pub fn dim(&self, degree: i64) -> Option<usize> {
        self.rows.iter().find(|r| r.degree == degree).map(|r| r.homology)
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.rows.iter().map(|r| (r.degree, r.homology)).collect()
    }

    pub fn total(&self) -> usize {
        self.rows.iter().map(|r| r.homology).sum()
    }

    pub fn records(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            out.push(format!(
                "homology\tspace={}\t{}\tdegree={}\tcells={}\tkernel={}\timage={}\tdim={}",
                self.label, self.window, r.degree, r.cells, r.kernel, r.image, r.homology
            ));
        }
        for (d, why) in &self.refused {
            out.push(format!("refused\tspace={}\t{}\tdegree={}\tcell={}", self.label, self.window, d, why));
        }
        for g in &self.graded {
            out.push(format!(
                "page1\tspace={}\t{}\tdegree={}\tlevel={}\tdim={}",
                self.label, self.window, g.degree, g.level, g.dim
            ));
        }
        for c in &self.certificates {
            out.push(format!("certificate\tspace={}\t{}\t{}", self.label, self.window, c));
        }
        out
    }
}

/// Leading-term certificate: a functional that kills every boundary
/// reaching the leading level but not the leading part itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub level: i64,
    pub degree: i64,
    pub leading: String,
    pub functional: Vec<(String, Q)>,
    pub sources: usize,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let phi: Vec<String> = self.functional.iter().map(|(c, q)| format!("{}:{}", c, fmt_q(q))).collect();
        write!(
            f,
            "nonboundary degree={} level={} leading={} sources={} functional={}",
            self.degree,
            self.level,
            self.leading,
            self.sources,
            phi.join(",")
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    NotBoundary(Certificate),
    /// The leading part is hit; the preimage is listed.
    Boundary(Vec<(String, Q)>),
}

/// A chain given by its Q-coordinates on `(key, slot)` cells.
pub type FlatChain = BTreeMap<(Key, Slot), Q>;

pub fn flat_from(vec: &[(Key, Nov)]) -> FlatChain {
    let mut out = FlatChain::new();
    for (k, n) in vec {
        for t in n.terms() {
            let e = out.entry((k.clone(), t.slot())).or_insert_with(Q::zero);
            *e += &t.coeff;
        }
    }
    out.retain(|_, q| !q.is_zero());
    out
}

impl WindowedComplex {
    pub fn window_cells(&self) -> impl Iterator<Item = (usize, &Cell)> {
        self.cells.iter().enumerate().filter(|(_, c)| c.in_window)
    }

    pub fn render_row(&self, i: usize) -> String {
        let (k, s) = &self.rows[i];
        cell_text(&self.renders[k], s)
    }

    pub fn degrees(&self) -> Vec<i64> {
        let set: BTreeSet<i64> = self.window_cells().map(|(_, c)| c.degree).filter(|d| self.window.in_degrees(*d)).collect();
        set.into_iter().collect()
    }

    fn is_window_row(&self, i: usize) -> bool {
        i < self.cells.len() && self.cells[i].in_window
    }

    fn compute_ledger(&self) -> Vec<LedgerEntry> {
        let mut out = Vec::new();
        for (i, c) in self.window_cells() {
            let mut acc = SparseQ::new();
            for (&j, q) in &self.images[i] {
                if !self.is_window_row(j) {
                    continue;
                }
                for (&r, p) in &self.images[j] {
                    if self.is_window_row(r) {
                        let e = acc.entry(r).or_insert_with(Q::zero);
                        *e += q * p;
                    }
                }
            }
            acc.retain(|_, q| !q.is_zero());
            if !acc.is_empty() {
                let residual: Vec<String> =
                    acc.iter().take(4).map(|(r, q)| format!("({}){}", fmt_q(q), self.render_row(*r))).collect();
                out.push(LedgerEntry { cell: self.render_row(i), degree: c.degree, residual: residual.join(" + ") });
            }
        }
        out
    }

    pub fn is_clean(&self) -> bool {
        self.ledger.is_empty()
    }

    fn dirty(&self, d: i64) -> Option<&LedgerEntry> {
        self.ledger.iter().find(|e| (d - 2..=d).contains(&e.degree))
    }

    fn cells_of(&self, degree: i64, window_only: bool) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&i| self.cells[i].degree == degree && (!window_only || self.cells[i].in_window))
            .collect()
    }

    /// Energy level of a row as a multiple of `λ₀`.
    pub fn level(&self, i: usize) -> Option<i64> {
        let q = self.rows[i].1.energy / self.lambda0;
        q.is_integer().then(|| q.to_integer())
    }

    /// Homology dims on every degree of the window.
    pub fn homology(&self) -> HomologyReport {
        let mut report = HomologyReport {
            label: self.label.clone(),
            window: self.window.to_string(),
            rows: Vec::new(),
            refused: Vec::new(),
            graded: Vec::new(),
            certificates: Vec::new(),
        };
        for d in self.degrees() {
            if let Some(e) = self.dirty(d) {
                report.refused.push((d, e.cell.clone()));
                continue;
            }
            report.rows.push(self.degree_row(d));
        }
        if let Ok(page) = self.spectral_page(1) {
            report.graded = page;
        }
        report
    }

    pub fn degree_row(&self, d: i64) -> DegreeRow {
        let own = self.cells_of(d, true);
        let cols: Vec<SparseQ> = own.iter().map(|&i| self.images[i].clone()).collect();
        let outgoing = rank(&cols);
        let kernel = own.len() - outgoing;
        let image = self.boundary_dim(d);
        DegreeRow { degree: d, cells: own.len(), kernel, image, homology: kernel - image, outgoing }
    }

    /// `dim (B ∩ W_d)`.
    fn boundary_dim(&self, d: i64) -> usize {
        let src: Vec<SparseQ> = self.cells_of(self.prev(d), false).iter().map(|&i| self.images[i].clone()).collect();
        let target = |r: usize| self.is_window_row(r) && self.cells[r].degree == d;
        rank(&src) - rank_restricted(&src, |r| !target(r))
    }

    fn prev(&self, d: i64) -> i64 {
        if self.z2 {
            (d - 1).rem_euclid(2)
        } else {
            d - 1
        }
    }

    /// Exact differential of a flat chain, keyed by row labels.
    pub fn differential(&self, z: &FlatChain) -> Result<FlatChain> {
        let mut out = FlatChain::new();
        for (k, q) in z {
            let i = *self
                .row_index
                .get(k)
                .filter(|&&i| i < self.cells.len())
                .ok_or_else(|| Error::Refused(format!("chain leaves the window at {}", cell_text(&self.renders.get(&k.0).cloned().unwrap_or_default(), &k.1))))?;
            for (r, p) in &self.images[i] {
                let e = out.entry(self.rows[*r].clone()).or_insert_with(Q::zero);
                *e += q * p;
            }
        }
        out.retain(|_, q| !q.is_zero());
        Ok(out)
    }

    /// Is the flat chain a boundary of window and halo cells?
    pub fn is_boundary(&self, z: &FlatChain) -> Result<bool> {
        let Some(d) = self.chain_degree(z)? else { return Ok(true) };
        let src: Vec<SparseQ> = self.cells_of(self.prev(d), false).iter().map(|&i| self.images[i].clone()).collect();
        let y = self.to_sparse(z)?;
        Ok(solve(&src, &y).is_some())
    }

    fn to_sparse(&self, z: &FlatChain) -> Result<SparseQ> {
        let mut y = SparseQ::new();
        for (k, q) in z {
            let i = *self.row_index.get(k).ok_or_else(|| Error::Refused("chain has cells outside the window".into()))?;
            y.insert(i, q.clone());
        }
        Ok(y)
    }

    fn chain_degree(&self, z: &FlatChain) -> Result<Option<i64>> {
        let mut deg = None;
        for k in z.keys() {
            let i = *self.row_index.get(k).filter(|&&i| i < self.cells.len()).ok_or_else(|| Error::Refused("chain has cells outside the window".into()))?;
            let d = self.cells[i].degree;
            if deg.map_or(false, |e| e != d) {
                return Err(Error::Refused("chain is not homogeneous".into()));
            }
            deg = Some(d);
        }
        Ok(deg)
    }

    /// Decide whether the leading part of a cycle is hit by a boundary
    /// landing at its energy level.
    pub fn nonboundary_certificate(&self, z: &FlatChain) -> Result<Verdict> {
        if !self.is_clean() {
            return Err(Error::Refused(format!("dirty ledger at {}", self.ledger[0].cell)));
        }
        if !self.differential(z)?.is_empty() {
            return Err(Error::Refused("chain is not a cycle".into()));
        }
        let Some(d) = self.chain_degree(z)? else { return Ok(Verdict::Boundary(Vec::new())) };
        let y = self.to_sparse(z)?;
        let lead_level = y.keys().map(|&i| self.level(i)).collect::<Option<Vec<_>>>().ok_or_else(|| {
            Error::Refused("energies are not multiples of the minimal energy".into())
        })?;
        let q0 = *lead_level.iter().min().unwrap();
        let lead: SparseQ = y.iter().filter(|(i, _)| self.level(**i) == Some(q0)).map(|(i, q)| (*i, q.clone())).collect();
        let low = |r: usize| self.level(r).map_or(false, |l| l <= q0);
        let src_idx: Vec<usize> = self.cells_of(self.prev(d), false).into_iter().filter(|&i| self.level(i).map_or(false, |l| l <= q0)).collect();
        let src: Vec<SparseQ> = src_idx
            .iter()
            .map(|&i| self.images[i].iter().filter(|(r, _)| low(**r)).map(|(r, q)| (*r, q.clone())).collect())
            .collect();
        match separating_functional(&src, &lead) {
            Some(phi) => Ok(Verdict::NotBoundary(Certificate {
                level: q0,
                degree: d,
                leading: lead.iter().map(|(i, q)| format!("({}){}", fmt_q(q), self.render_row(*i))).collect::<Vec<_>>().join(" + "),
                functional: phi.iter().map(|(i, q)| (self.render_row(*i), q.clone())).collect(),
                sources: src.len(),
            })),
            None => {
                let x = solve(&src, &lead).unwrap_or_default();
                Ok(Verdict::Boundary(x.iter().map(|(k, q)| (self.render_row(src_idx[*k]), q.clone())).collect()))
            }
        }
    }

    /// Re-check a certificate against freshly recomputed boundaries.
    pub fn verify_certificate(&self, c: &Certificate, z: &FlatChain) -> bool {
        let by_name: HashMap<String, usize> = (0..self.rows.len()).map(|i| (self.render_row(i), i)).collect();
        let mut phi = SparseQ::new();
        for (name, q) in &c.functional {
            match by_name.get(name) {
                Some(&i) => {
                    phi.insert(i, q.clone());
                }
                None => return false,
            }
        }
        let Ok(y) = self.to_sparse(z) else { return false };
        let lead: SparseQ = y.iter().filter(|(i, _)| self.level(**i) == Some(c.level)).map(|(i, q)| (*i, q.clone())).collect();
        if dot(&phi, &lead).is_zero() {
            return false;
        }
        let low = |r: usize| self.level(r).map_or(false, |l| l <= c.level);
        self.cells_of(self.prev(c.degree), false)
            .into_iter()
            .filter(|&i| self.level(i).map_or(false, |l| l <= c.level))
            .all(|i| {
                let col: SparseQ = self.images[i].iter().filter(|(r, _)| low(**r)).map(|(r, q)| (*r, q.clone())).collect();
                dot(&phi, &col).is_zero()
            })
    }

    /// Page `r ∈ {1, 2}` of the energy spectral sequence. Page 1 is the
    /// homology of the energy-preserving part of the differential.
    pub fn spectral_page(&self, r: usize) -> Result<Vec<GradedRow>> {
        if !(1..=2).contains(&r) {
            return Err(Error::Usage("only pages 1 and 2 are available".into()));
        }
        if !self.is_clean() {
            return Err(Error::Refused(format!("dirty ledger at {}", self.ledger[0].cell)));
        }
        let mut levels = Vec::with_capacity(self.rows.len());
        for i in 0..self.rows.len() {
            levels.push(self.level(i).ok_or_else(|| {
                Error::Refused(format!("energy of {} is not a multiple of the minimal energy", self.render_row(i)))
            })?);
        }
        // Literal Z/B with index r + 1: x ∈ F^q with δx ∈ F^{q+r}.
        let span = r as i64;
        let mut out = Vec::new();
        let mut groups: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
        for (i, c) in self.window_cells() {
            if self.window.in_degrees(c.degree) {
                groups.entry((c.degree, levels[i])).or_default().push(i);
            }
        }
        for (&(p, q), _) in &groups {
            let vars: Vec<usize> = self
                .cells_of(p, true)
                .into_iter()
                .filter(|&i| levels[i] >= q && levels[i] < q + span)
                .collect();
            let rows_ok = |row: usize| levels[row] >= q && levels[row] < q + span;
            let restrict = |i: usize| -> SparseQ {
                self.images[i].iter().filter(|(r, _)| rows_ok(**r)).map(|(r, x)| (*r, x.clone())).collect()
            };
            let all: Vec<SparseQ> = vars.iter().map(|&i| restrict(i)).collect();
            // Leading parts of cycles, as vectors on level-q cells.
            let zs: Vec<SparseQ> = Splitting::new(&all)
                .kernel
                .into_iter()
                .map(|(_, v)| v.into_iter().map(|(k, x)| (vars[k], x)).filter(|(i, _)| levels[*i] == q).collect::<SparseQ>())
                .filter(|v| !v.is_empty())
                .collect();
            let lo = (q - span + 1).max(0);
            let src: Vec<SparseQ> = self
                .cells_of(self.prev(p), false)
                .into_iter()
                .filter(|&i| levels[i] >= lo && levels[i] <= q)
                .map(|i| self.images[i].iter().filter(|(r, _)| levels[**r] <= q).map(|(r, x)| (*r, x.clone())).collect())
                .collect();
            let target = |row: usize| levels[row] == q && self.is_window_row(row) && self.cells[row].degree == p;
            // Boundaries supported on the target rows alone.
            let off: Vec<SparseQ> =
                src.iter().map(|c| c.iter().filter(|(r, _)| !target(**r)).map(|(r, x)| (*r, x.clone())).collect()).collect();
            let bs: Vec<SparseQ> = Splitting::new(&off)
                .kernel
                .into_iter()
                .map(|(_, combo)| {
                    let mut v = SparseQ::new();
                    for (k, c) in combo {
                        for (r, x) in &src[k] {
                            let e = v.entry(*r).or_insert_with(Q::zero);
                            *e += &c * x;
                        }
                    }
                    v.retain(|_, x| !x.is_zero());
                    v
                })
                .collect();
            let b = rank(&bs);
            let both: Vec<SparseQ> = zs.iter().chain(bs.iter()).cloned().collect();
            out.push(GradedRow { degree: p, level: q, dim: rank(&both) - b });
        }
        Ok(out)
    }

    /// Cells of degree `d` in the window, rendered.
    pub fn cell_names(&self, d: i64) -> Vec<String> {
        self.cells_of(d, true).into_iter().map(|i| self.render_row(i)).collect()
    }

    pub fn ledger_records(&self) -> Vec<String> {
        self.ledger
            .iter()
            .map(|e| format!("ledger\tspace={}\t{}\tdegree={}\tcell={}\tresidual={}", self.label, self.window, e.degree, e.cell, e.residual))
            .collect()
    }
}
