//! Exact sparse elimination over Q.
//!
//! Columns are cleared of denominators and reduced fraction-free over the
//! integers; each reduced column keeps its leading entry at its largest row
//! index and remembers the combination of input columns it came from.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::novikov::Q;

pub type SparseQ = BTreeMap<usize, Q>;
type SparseZ = BTreeMap<usize, BigInt>;

fn clear_denominators(v: &SparseQ) -> (SparseZ, BigInt) {
    let mut l = BigInt::one();
    for q in v.values() {
        l = l.lcm(q.denom());
    }
    let z = v
        .iter()
        .filter(|(_, q)| !q.is_zero())
        .map(|(&i, q)| (i, q.numer() * (&l / q.denom())))
        .collect();
    (z, l)
}

fn content(v: &SparseZ, t: &SparseZ) -> BigInt {
    let mut g = BigInt::zero();
    for x in v.values().chain(t.values()) {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    g
}

fn divide(v: &mut SparseZ, g: &BigInt) {
    for x in v.values_mut() {
        *x /= g;
    }
}

/// `a·x − b·y`, dropping zeros.
fn combine(a: &BigInt, x: &SparseZ, b: &BigInt, y: &SparseZ) -> SparseZ {
    let mut out = SparseZ::new();
    for (&i, v) in x {
        out.insert(i, a * v);
    }
    for (&i, v) in y {
        let e = out.entry(i).or_insert_with(BigInt::zero);
        *e -= b * v;
        if e.is_zero() {
            out.remove(&i);
        }
    }
    out
}

struct Reduced {
    vec: SparseZ,
    combo: SparseZ,
}

/// Incremental column echelon form with optional combination tracking.
pub struct Reducer {
    track: bool,
    pivots: HashMap<usize, usize>,
    basis: Vec<Reduced>,
    scales: Vec<BigInt>,
    inserted: usize,
}

/// Outcome of reducing a vector against the current span.
pub enum Reduction {
    /// The vector is `Σ c_k · column_k`.
    InSpan(SparseQ),
    /// It is not; the residual is given together with its leading row.
    Outside(usize),
}

impl Reducer {
    pub fn new(track: bool) -> Reducer {
        Reducer { track, pivots: HashMap::new(), basis: Vec::new(), scales: Vec::new(), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Rows holding a pivot.
    pub fn pivot_rows(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.pivots.keys().copied().collect();
        r.sort_unstable();
        r
    }

    fn reduce(&self, mut v: SparseZ, mut a: BigInt, mut t: SparseZ) -> (SparseZ, BigInt, SparseZ) {
        while let Some((&row, lead)) = v.iter().next_back() {
            let Some(&j) = self.pivots.get(&row) else { break };
            let p = &self.basis[j];
            let plead = &p.vec[&row];
            let g = lead.gcd(plead);
            let alpha = plead / &g;
            let beta = lead / &g;
            let nv = combine(&alpha, &v, &beta, &p.vec);
            if self.track {
                a *= &alpha;
                t = combine(&alpha, &t, &(-&beta), &p.combo);
            }
            v = nv;
            if !self.track {
                let g = content(&v, &SparseZ::new());
                if !g.is_zero() && !g.is_one() {
                    divide(&mut v, &g);
                }
            } else {
                let mut g = content(&v, &t);
                g = g.gcd(&a);
                if !g.is_zero() && !g.is_one() {
                    divide(&mut v, &g);
                    divide(&mut t, &g);
                    a /= &g;
                }
            }
        }
        (v, a, t)
    }

    /// Insert the next column; returns whether it raised the rank.
    pub fn insert(&mut self, col: &SparseQ) -> bool {
        let k = self.inserted;
        self.inserted += 1;
        let (z, scale) = clear_denominators(col);
        self.scales.push(scale);
        let (v, a, t) = self.reduce(z, BigInt::one(), SparseZ::new());
        if v.is_empty() {
            return false;
        }
        // The stored vector is `a·col_k − Σ t_j col_j`.
        let combo = if self.track {
            let unit: SparseZ = [(k, BigInt::one())].into_iter().collect();
            combine(&a, &unit, &BigInt::one(), &t)
        } else {
            SparseZ::new()
        };
        let row = *v.keys().next_back().unwrap();
        self.pivots.insert(row, self.basis.len());
        self.basis.push(Reduced { vec: v, combo });
        true
    }

    /// Express `y` through the inserted columns, if possible.
    pub fn solve(&self, y: &SparseQ) -> Reduction {
        let (z, scale) = clear_denominators(y);
        let (v, a, t) = self.reduce(z, BigInt::one(), SparseZ::new());
        if let Some((&row, _)) = v.iter().next_back() {
            return Reduction::Outside(row);
        }
        // a·(scale·y) − t·(scaled columns) = 0 with t read through combos.
        let mut out = SparseQ::new();
        if self.track {
            for (&k, c) in &t {
                let q = Q::new(c * &self.scales[k], &a * &scale);
                if !q.is_zero() {
                    out.insert(k, q);
                }
            }
        }
        Reduction::InSpan(out)
    }

    pub fn contains(&self, y: &SparseQ) -> bool {
        matches!(self.solve(y), Reduction::InSpan(_))
    }
}

/// Rank of a family of sparse columns.
pub fn rank(cols: &[SparseQ]) -> usize {
    let mut r = Reducer::new(false);
    for c in cols {
        r.insert(c);
    }
    r.rank()
}

/// Rank after discarding the rows rejected by `keep`.
pub fn rank_restricted(cols: &[SparseQ], keep: impl Fn(usize) -> bool) -> usize {
    let mut r = Reducer::new(false);
    for c in cols {
        let c: SparseQ = c.iter().filter(|(i, _)| keep(**i)).map(|(i, q)| (*i, q.clone())).collect();
        r.insert(&c);
    }
    r.rank()
}

/// Solve `Σ c_k cols_k = y`.
pub fn solve(cols: &[SparseQ], y: &SparseQ) -> Option<SparseQ> {
    let mut r = Reducer::new(true);
    for c in cols {
        r.insert(c);
    }
    match r.solve(y) {
        Reduction::InSpan(x) => Some(x),
        Reduction::Outside(_) => None,
    }
}

/// A column family split into a kernel part and independent columns.
///
/// Each kernel vector belongs to a column that depends on earlier ones; it
/// has coefficient 1 there and is otherwise supported on earlier
/// independent columns.
pub struct Splitting {
    pub kernel: Vec<(usize, SparseQ)>,
    pub independent: Vec<usize>,
    reducer: Reducer,
}

impl Splitting {
    pub fn new(cols: &[SparseQ]) -> Splitting {
        let mut reducer = Reducer::new(true);
        let mut independent = Vec::new();
        let mut kernel = Vec::new();
        for (k, c) in cols.iter().enumerate() {
            match reducer.solve(c) {
                Reduction::InSpan(x) => {
                    let mut v: SparseQ = x.into_iter().map(|(j, q)| (independent[j], -q)).collect();
                    v.insert(k, Q::one());
                    kernel.push((k, v));
                }
                Reduction::Outside(_) => {
                    reducer.insert(c);
                    independent.push(k);
                }
            }
        }
        Splitting { kernel, independent, reducer }
    }

    /// The unique combination of independent columns equal to `y`.
    pub fn preimage(&self, y: &SparseQ) -> Option<SparseQ> {
        match self.reducer.solve(y) {
            Reduction::InSpan(x) => Some(x.into_iter().map(|(j, q)| (self.independent[j], q)).collect()),
            Reduction::Outside(_) => None,
        }
    }
}

/// A functional vanishing on every column but not on `y`, or `None` when
/// `y` lies in their span.
pub fn separating_functional(cols: &[SparseQ], y: &SparseQ) -> Option<SparseQ> {
    // Rows of the transposed system are indexed by columns, plus one for y.
    let n = cols.len();
    let mut transposed: BTreeMap<usize, SparseQ> = BTreeMap::new();
    for (k, c) in cols.iter().enumerate() {
        for (&i, q) in c {
            transposed.entry(i).or_default().insert(k, q.clone());
        }
    }
    for (&i, q) in y {
        transposed.entry(i).or_default().insert(n, q.clone());
    }
    let rows: Vec<usize> = transposed.keys().copied().collect();
    let tcols: Vec<SparseQ> = rows.iter().map(|i| transposed[i].clone()).collect();
    let target: SparseQ = [(n, Q::one())].into_iter().collect();
    let phi = solve(&tcols, &target)?;
    Some(phi.into_iter().map(|(k, q)| (rows[k], q)).collect())
}

pub fn dot(a: &SparseQ, b: &SparseQ) -> Q {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut s = Q::zero();
    for (i, x) in small {
        if let Some(y) = large.get(i) {
            s += x * y;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novikov::{q_frac, q_int};
    use proptest::prelude::*;

    fn col(entries: &[(usize, i64)]) -> SparseQ {
        entries.iter().map(|&(i, v)| (i, q_int(v))).filter(|(_, q)| !q.is_zero()).collect()
    }

    #[test]
    fn rank_of_dependent_columns() {
        let cols = vec![col(&[(0, 1), (1, 2)]), col(&[(0, 2), (1, 4)]), col(&[(2, 1)])];
        assert_eq!(rank(&cols), 2);
    }

    #[test]
    fn solve_recovers_combination() {
        let cols = vec![col(&[(0, 1), (1, 1)]), col(&[(1, 3)])];
        let y: SparseQ = [(0, q_int(2)), (1, q_frac(7, 2))].into_iter().collect();
        let x = solve(&cols, &y).unwrap();
        assert_eq!(x[&0], q_int(2));
        assert_eq!(x[&1], q_frac(1, 2));
    }

    #[test]
    fn functional_separates() {
        let cols = vec![col(&[(0, 1), (1, 1)])];
        let y = col(&[(0, 1)]);
        let phi = separating_functional(&cols, &y).unwrap();
        assert!(dot(&phi, &cols[0]).is_zero());
        assert!(!dot(&phi, &y).is_zero());
        assert!(separating_functional(&cols, &col(&[(0, 3), (1, 3)])).is_none());
    }

    #[test]
    fn kernel_vectors_vanish() {
        let cols = vec![col(&[(0, 1)]), col(&[(1, 2)]), col(&[(0, 3), (1, 4)]), SparseQ::new()];
        let split = Splitting::new(&cols);
        let (ker, indep) = (&split.kernel, &split.independent);
        assert_eq!(indep, &vec![0, 1]);
        assert_eq!(split.preimage(&col(&[(0, 2), (1, 2)])).unwrap(), [(0, q_int(2)), (1, q_int(1))].into_iter().collect());
        assert_eq!(ker.len(), 2);
        for (k, v) in ker {
            assert_eq!(v[k], Q::one());
            let mut s = SparseQ::new();
            for (j, c) in v {
                for (i, q) in &cols[*j] {
                    *s.entry(*i).or_insert_with(Q::zero) += c * q;
                }
            }
            s.retain(|_, q| !q.is_zero());
            assert!(s.is_empty());
        }
    }

    proptest! {
        #[test]
        fn solutions_verify(entries in proptest::collection::vec((0usize..5, 0usize..5, -3i64..4), 0..14),
                            target in proptest::collection::vec(-2i64..3, 5)) {
            let mut cols = vec![SparseQ::new(); 5];
            for (c, r, v) in entries {
                if v != 0 { cols[c].insert(r, q_int(v)); }
            }
            let y: SparseQ = target.iter().enumerate().filter(|(_, v)| **v != 0).map(|(i, v)| (i, q_int(*v))).collect();
            match solve(&cols, &y) {
                Some(x) => {
                    let mut s = SparseQ::new();
                    for (k, c) in &x {
                        for (i, q) in &cols[*k] {
                            *s.entry(*i).or_insert_with(Q::zero) += c * q;
                        }
                    }
                    s.retain(|_, q| !q.is_zero());
                    prop_assert_eq!(s, y);
                }
                None => {
                    let phi = separating_functional(&cols, &y).unwrap();
                    for c in &cols { prop_assert!(dot(&phi, c).is_zero()); }
                    prop_assert!(!dot(&phi, &y).is_zero());
                }
            }
        }

        #[test]
        fn rank_is_order_independent(entries in proptest::collection::vec((0usize..6, 0usize..6, -2i64..3), 0..20)) {
            let mut cols = vec![SparseQ::new(); 6];
            for (c, r, v) in entries {
                if v != 0 { cols[c].insert(r, q_int(v)); }
            }
            let mut rev = cols.clone();
            rev.reverse();
            prop_assert_eq!(rank(&cols), rank(&rev));
        }
    }
}
