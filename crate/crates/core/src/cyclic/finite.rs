//! Homology of finite windows that are honest subcomplexes, and ranks of the
//! maps they induce; used to audit the Connes long exact sequence.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::ainfinity::AlgebraSpec;
use crate::error::{Error, Result};
use crate::novikov::{Exp, Nov, Q};
use crate::window::linalg::{rank, SparseQ, Splitting};
use crate::window::spaces::vector_keys;
use crate::window::{assemble, FlatChain, Key, Space, Window, WindowedComplex};
use crate::words::{Flavor, SignedVector};

use super::{CyclicOps, TsyganSpace};

/// A window with no halo whose differential never leaves it.
pub(crate) struct Finite {
    pub(crate) wc: WindowedComplex,
}

impl Finite {
    pub(crate) fn build(space: &dyn Space, w: &Window) -> Result<Finite> {
        let mut w = w.clone().with_halo(0);
        w.degrees = None;
        let wc = assemble(space, &w)?;
        if !wc.is_clean() {
            return Err(Error::Refused(format!("dirty ledger at {}", wc.ledger[0].cell)));
        }
        let n = wc.cells.len();
        if let Some(i) = (0..n).find(|&i| wc.images[i].keys().any(|&r| r >= n)) {
            return Err(Error::Refused(format!("{} leaves the window", wc.render_row(i))));
        }
        Ok(Finite { wc })
    }

    pub(crate) fn degrees(&self) -> BTreeSet<i64> {
        self.wc.cells.iter().map(|c| c.degree).collect()
    }

    pub(crate) fn prev(&self, d: i64) -> i64 {
        if self.wc.z2 {
            (d - 1).rem_euclid(2)
        } else {
            d - 1
        }
    }

    pub(crate) fn of_degree(&self, d: i64) -> Vec<usize> {
        (0..self.wc.cells.len()).filter(|&i| self.wc.cells[i].degree == d).collect()
    }

    fn cycles(&self, d: i64) -> Vec<FlatChain> {
        let idx = self.of_degree(d);
        let cols: Vec<SparseQ> = idx.iter().map(|&i| self.wc.images[i].clone()).collect();
        Splitting::new(&cols)
            .kernel
            .into_iter()
            .map(|(_, v)| v.into_iter().map(|(j, q)| (self.wc.rows[idx[j]].clone(), q)).collect())
            .collect()
    }

    fn boundaries(&self, d: i64) -> Vec<SparseQ> {
        self.of_degree(self.prev(d)).into_iter().map(|i| self.wc.images[i].clone()).collect()
    }

    pub(crate) fn dim(&self, d: i64) -> usize {
        self.cycles(d).len() - rank(&self.boundaries(d))
    }

    fn sparse(&self, z: &FlatChain) -> Result<SparseQ> {
        let mut out = SparseQ::new();
        for (k, q) in z {
            let i = *self.wc.row_index.get(k).ok_or_else(|| Error::Refused("map leaves the target window".into()))?;
            out.insert(i, q.clone());
        }
        Ok(out)
    }
}

type KeyMap<'a> = dyn Fn(&Key, Exp) -> Vec<(Key, Nov)> + 'a;

/// Rank of the map induced on homology from degree `d` of `src` to degree
/// `e` of `dst`.
fn induced_rank(src: &Finite, dst: &Finite, d: i64, e: i64, f: &KeyMap) -> Result<usize> {
    let emax = src.wc.window.emax;
    let mut cols = dst.boundaries(e);
    let base = rank(&cols);
    for z in src.cycles(d) {
        let mut image = FlatChain::new();
        for ((k, s), q) in &z {
            for (k2, n) in f(k, emax) {
                for t in n.mul_monomial(q, s).terms() {
                    *image.entry((k2.clone(), t.slot())).or_insert_with(Q::zero) += &t.coeff;
                }
            }
        }
        image.retain(|_, q| !q.is_zero());
        cols.push(dst.sparse(&image)?);
    }
    Ok(rank(&cols) - base)
}

/// One node of the long exact sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactNode {
    pub name: String,
    pub degree: i64,
    pub dim: usize,
    /// Rank of the incoming map.
    pub rank_in: usize,
    /// Rank of the outgoing map.
    pub rank_out: usize,
}

impl ExactNode {
    pub fn is_exact(&self) -> bool {
        self.rank_in + self.rank_out == self.dim
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnesReport {
    pub columns: u32,
    pub window: String,
    pub nodes: Vec<ExactNode>,
}

impl ConnesReport {
    pub fn is_exact(&self) -> bool {
        self.nodes.iter().all(ExactNode::is_exact)
    }

    pub fn records(&self) -> Vec<String> {
        self.nodes
            .iter()
            .map(|n| {
                format!(
                    "connes\tcolumns={}\t{}\tnode={}\tdegree={}\tdim={}\trank_in={}\trank_out={}\texact={}",
                    self.columns,
                    self.window,
                    n.name,
                    n.degree,
                    n.dim,
                    n.rank_in,
                    n.rank_out,
                    n.is_exact()
                )
            })
            .collect()
    }
}

/// The sequence `H(A,A) → HC → HC[2] → H(A,A)[1]` coming from column zero
/// inside the `columns`-column bicomplex, with ranks of all three maps in
/// every degree of the window.
pub fn connes_sequence_check(a: &AlgebraSpec, w: &Window, columns: u32) -> Result<ConnesReport> {
    if columns < 2 {
        return Err(Error::Usage("the Connes sequence needs at least two columns".into()));
    }
    let hoch = TsyganSpace::new(a, w, 1);
    let total = TsyganSpace::new(a, w, columns);
    let mut quotient = TsyganSpace::new(a, w, columns);
    quotient.first = 1;
    let h = Finite::build(&hoch, w)?;
    let t = Finite::build(&total, w)?;
    let q = Finite::build(&quotient, w)?;
    let ops: CyclicOps = CyclicOps::new(a).with_kmax(w.kmax);
    let same = |k: &Key, emax: Exp| vec![(k.clone(), Nov::one(Some(emax)))];
    let drop0 = |k: &Key, emax: Exp| if k.0 == 0 { Vec::new() } else { vec![(k.clone(), Nov::one(Some(emax)))] };
    let connect = |k: &Key, emax: Exp| {
        if k.0 != 1 {
            return Vec::new();
        }
        let x = SignedVector::basis(Flavor::Plain, k.1.clone(), &crate::novikov::Slot::zero(), Some(emax));
        vector_keys(&ops.one_minus_t(&x), 0)
    };
    let next = |d: i64| if a.z2 { (d + 1).rem_euclid(2) } else { d + 1 };
    let prev = |d: i64| if a.z2 { (d - 1).rem_euclid(2) } else { d - 1 };
    let mut degrees: BTreeSet<i64> = h.degrees();
    degrees.extend(t.degrees());
    degrees.extend(q.degrees());
    let mut nodes = Vec::new();
    for &d in &degrees {
        let incl = induced_rank(&h, &t, d, d, &same)?;
        let proj = induced_rank(&t, &q, d, d, &drop0)?;
        let into_h = induced_rank(&q, &h, prev(d), d, &connect)?;
        let out_q = induced_rank(&q, &h, d, next(d), &connect)?;
        nodes.push(ExactNode { name: "hochschild".into(), degree: d, dim: h.dim(d), rank_in: into_h, rank_out: incl });
        nodes.push(ExactNode { name: "cyclic".into(), degree: d, dim: t.dim(d), rank_in: incl, rank_out: proj });
        nodes.push(ExactNode { name: "cyclic-shifted".into(), degree: d, dim: q.dim(d), rank_in: proj, rank_out: out_q });
    }
    Ok(ConnesReport { columns, window: t.wc.window.to_string(), nodes })
}
