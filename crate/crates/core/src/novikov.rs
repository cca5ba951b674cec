//! Truncated Novikov scalars.
//!
//! A scalar is a finite sum `Σ a_i T^{λ_i} e^{q_i}` with exact rational
//! coefficients, rational energies `λ_i` and integer Maslov exponents `q_i`.
//! Terms at or above the energy ceiling are dropped; terms below the floor
//! are a domain error.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational coefficient.
pub type Q = BigRational;
/// Exact rational energy exponent.
pub type Exp = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NovikovError {
    #[error("term with energy {energy} lies below the floor {floor}")]
    BelowFloor { energy: Exp, floor: Exp },
    #[error("division by the zero scalar")]
    DivisionByZero,
    #[error("scalar {0} is not monomial-invertible (several leading terms)")]
    NotMonomialInvertible(String),
    #[error("geometric series of {0} diverges (valuation not positive and not nilpotent)")]
    Divergent(String),
    #[error("an untruncated series needs an energy ceiling")]
    NoCeiling,
    #[error("energy ceilings differ: {0:?} vs {1:?}")]
    CeilingMismatch(Option<Exp>, Option<Exp>),
    #[error("cannot parse scalar `{text}`: {msg}")]
    Parse { text: String, msg: String },
}

/// Exponent pair `(λ, q)` of a monomial `T^λ e^q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub energy: Exp,
    pub maslov: i64,
}

impl Slot {
    pub fn zero() -> Slot {
        Slot { energy: Exp::zero(), maslov: 0 }
    }

    pub fn new(energy: Exp, maslov: i64) -> Slot {
        Slot { energy, maslov }
    }

    pub fn shift(&self, other: &Slot) -> Slot {
        Slot { energy: self.energy + other.energy, maslov: self.maslov + other.maslov }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: Q,
    pub energy: Exp,
    pub maslov: i64,
}

impl Term {
    pub fn new(coeff: Q, energy: Exp, maslov: i64) -> Term {
        Term { coeff, energy, maslov }
    }

    pub fn slot(&self) -> Slot {
        Slot { energy: self.energy, maslov: self.maslov }
    }

    fn key_cmp(&self, other: &Term) -> Ordering {
        (self.energy, self.maslov).cmp(&(other.energy, other.maslov))
    }
}

/// Valuation of a scalar: the minimal energy, `+∞` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Exp),
    Infinite,
}

impl Valuation {
    pub fn finite(&self) -> Option<Exp> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{}", v),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// A truncated Novikov scalar in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Nov {
    terms: Vec<Term>,
    ceiling: Option<Exp>,
    floor: Exp,
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn exp_int(n: i64) -> Exp {
    Exp::from_integer(n)
}

fn min_ceiling(a: Option<Exp>, b: Option<Exp>) -> Option<Exp> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl Nov {
    /// Canonicalize raw terms: merge like terms, drop zeros and terms at or
    /// above the ceiling, sort by `(λ, q)`.
    pub fn normalize(raw: Vec<Term>, ceiling: Option<Exp>, floor: Exp) -> Result<Nov, NovikovError> {
        if let Some(t) = raw.iter().find(|t| t.energy < floor) {
            return Err(NovikovError::BelowFloor { energy: t.energy, floor });
        }
        Ok(Nov::from_unchecked(raw, ceiling, floor))
    }

    fn from_unchecked(mut raw: Vec<Term>, ceiling: Option<Exp>, floor: Exp) -> Nov {
        if let Some(c) = ceiling {
            raw.retain(|t| t.energy < c);
        }
        raw.sort_by(|a, b| a.key_cmp(b));
        let mut terms: Vec<Term> = Vec::with_capacity(raw.len());
        for t in raw {
            match terms.last_mut() {
                Some(last) if last.key_cmp(&t) == Ordering::Equal => last.coeff += t.coeff,
                _ => terms.push(t),
            }
        }
        terms.retain(|t| !t.coeff.is_zero());
        Nov { terms, ceiling, floor }
    }

    pub fn zero(ceiling: Option<Exp>) -> Nov {
        Nov { terms: Vec::new(), ceiling, floor: Exp::zero() }
    }

    pub fn one(ceiling: Option<Exp>) -> Nov {
        Nov::monomial(Q::one(), Exp::zero(), 0, ceiling)
    }

    pub fn constant(c: Q, ceiling: Option<Exp>) -> Nov {
        Nov::monomial(c, Exp::zero(), 0, ceiling)
    }

    /// `c T^λ e^q`; the floor is lowered to `λ` when `λ` is negative.
    pub fn monomial(coeff: Q, energy: Exp, maslov: i64, ceiling: Option<Exp>) -> Nov {
        let floor = energy.min(Exp::zero());
        Nov::from_unchecked(vec![Term::new(coeff, energy, maslov)], ceiling, floor)
    }

    pub fn with_floor(mut self, floor: Exp) -> Result<Nov, NovikovError> {
        if let Some(t) = self.terms.iter().find(|t| t.energy < floor) {
            return Err(NovikovError::BelowFloor { energy: t.energy, floor });
        }
        self.floor = floor;
        Ok(self)
    }

    pub fn with_ceiling(self, ceiling: Option<Exp>) -> Nov {
        Nov::from_unchecked(self.terms, ceiling, self.floor)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    pub fn ceiling(&self) -> Option<Exp> {
        self.ceiling
    }

    pub fn floor(&self) -> Exp {
        self.floor
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].coeff.is_one() && self.terms[0].slot() == Slot::zero()
    }

    pub fn valuation(&self) -> Valuation {
        match self.terms.first() {
            Some(t) => Valuation::Finite(t.energy),
            None => Valuation::Infinite,
        }
    }

    /// Coefficient of `T^λ e^q`.
    pub fn coeff_at(&self, slot: &Slot) -> Q {
        self.terms
            .iter()
            .find(|t| t.energy == slot.energy && t.maslov == slot.maslov)
            .map(|t| t.coeff.clone())
            .unwrap_or_else(Q::zero)
    }

    /// Terms of minimal energy.
    pub fn leading(&self) -> &[Term] {
        match self.terms.first() {
            None => &[],
            Some(first) => {
                let n = self.terms.iter().take_while(|t| t.energy == first.energy).count();
                &self.terms[..n]
            }
        }
    }

    /// Terms with energy strictly below `level`.
    pub fn below(&self, level: Exp) -> Nov {
        let terms = self.terms.iter().filter(|t| t.energy < level).cloned().collect();
        Nov { terms, ceiling: self.ceiling, floor: self.floor }
    }

    pub fn scale(&self, c: &Q) -> Nov {
        if c.is_zero() {
            return Nov { terms: Vec::new(), ceiling: self.ceiling, floor: self.floor };
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term::new(&t.coeff * c, t.energy, t.maslov))
            .collect();
        Nov { terms, ceiling: self.ceiling, floor: self.floor }
    }

    /// Multiply by `c T^λ e^q`.
    pub fn mul_monomial(&self, c: &Q, slot: &Slot) -> Nov {
        let raw = self
            .terms
            .iter()
            .map(|t| Term::new(&t.coeff * c, t.energy + slot.energy, t.maslov + slot.maslov))
            .collect();
        let floor = self.floor.min(self.floor + slot.energy);
        Nov::from_unchecked(raw, self.ceiling, floor)
    }

    /// Checked product: ceilings must agree.
    pub fn try_mul(&self, other: &Nov) -> Result<Nov, NovikovError> {
        if self.ceiling != other.ceiling {
            return Err(NovikovError::CeilingMismatch(self.ceiling, other.ceiling));
        }
        Ok(self * other)
    }

    /// Checked sum: ceilings must agree.
    pub fn try_add(&self, other: &Nov) -> Result<Nov, NovikovError> {
        if self.ceiling != other.ceiling {
            return Err(NovikovError::CeilingMismatch(self.ceiling, other.ceiling));
        }
        Ok(self + other)
    }

    /// Forget Maslov exponents (the Z/2-graded coefficient mode).
    pub fn erase_maslov(&self) -> Nov {
        let raw = self.terms.iter().map(|t| Term::new(t.coeff.clone(), t.energy, 0)).collect();
        Nov::from_unchecked(raw, self.ceiling, self.floor)
    }

    pub fn pow(&self, n: u32) -> Nov {
        let mut acc = Nov::one(self.ceiling);
        acc.floor = self.floor;
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `Σ_j (−1)^j h^j` truncated at the ceiling.
    pub fn geometric_alt(&self) -> Result<Nov, NovikovError> {
        let mut acc = Nov::one(self.ceiling);
        acc.floor = self.floor;
        if self.is_zero() {
            return Ok(acc);
        }
        let v = self.valuation().finite().unwrap_or_else(Exp::zero);
        if v <= Exp::zero() {
            return Err(NovikovError::Divergent(self.to_string()));
        }
        if self.ceiling.is_none() {
            return Err(NovikovError::NoCeiling);
        }
        let minus_h = -self.clone();
        let mut power = acc.clone();
        loop {
            power = &power * &minus_h;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Ok(acc)
    }

    /// Inverse of a monomial-invertible scalar `c T^λ e^q (1 + h)`.
    ///
    /// The result is known modulo `T^{ceiling − λ}`, which becomes its ceiling;
    /// the floor drops to `−λ` when needed.
    pub fn invert(&self) -> Result<Nov, NovikovError> {
        if self.is_zero() {
            return Err(NovikovError::DivisionByZero);
        }
        let lead = self.leading();
        if lead.len() != 1 {
            return Err(NovikovError::NotMonomialInvertible(self.to_string()));
        }
        let lead = lead[0].clone();
        let c_inv = lead.coeff.recip();
        let unshift = Slot::new(-lead.energy, -lead.maslov);
        let mut normalized = self.mul_monomial(&c_inv, &unshift);
        normalized.floor = Exp::zero();
        let h = &normalized - &Nov::one(self.ceiling);
        let g = if h.is_zero() { Nov::one(self.ceiling) } else { h.geometric_alt()? };
        let mut out = g.mul_monomial(&c_inv, &unshift);
        out.floor = self.floor.min(-lead.energy);
        let ceiling = self.ceiling.map(|c| c - lead.energy);
        Ok(out.with_ceiling(ceiling))
    }
}

impl Add for &Nov {
    type Output = Nov;
    fn add(self, other: &Nov) -> Nov {
        let mut raw = self.terms.clone();
        raw.extend(other.terms.iter().cloned());
        Nov::from_unchecked(raw, min_ceiling(self.ceiling, other.ceiling), self.floor.min(other.floor))
    }
}

impl Add for Nov {
    type Output = Nov;
    fn add(self, other: Nov) -> Nov {
        &self + &other
    }
}

impl AddAssign<&Nov> for Nov {
    fn add_assign(&mut self, other: &Nov) {
        *self = &*self + other;
    }
}

impl Neg for Nov {
    type Output = Nov;
    fn neg(mut self) -> Nov {
        for t in &mut self.terms {
            t.coeff = -t.coeff.clone();
        }
        self
    }
}

impl Sub for &Nov {
    type Output = Nov;
    fn sub(self, other: &Nov) -> Nov {
        self + &(-other.clone())
    }
}

impl Mul for &Nov {
    type Output = Nov;
    fn mul(self, other: &Nov) -> Nov {
        let ceiling = min_ceiling(self.ceiling, other.ceiling);
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let energy = a.energy + b.energy;
                if ceiling.map_or(true, |c| energy < c) {
                    raw.push(Term::new(&a.coeff * &b.coeff, energy, a.maslov + b.maslov));
                }
            }
        }
        let floor = self.floor.min(other.floor).min(self.floor + other.floor);
        Nov::from_unchecked(raw, ceiling, floor)
    }
}

impl Mul for Nov {
    type Output = Nov;
    fn mul(self, other: Nov) -> Nov {
        &self * &other
    }
}

pub fn fmt_exp(e: &Exp) -> String {
    if e.is_integer() {
        format!("{}", e.numer())
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

pub fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Text of `T^λ e^q` without coefficient, empty for the unit monomial.
pub fn fmt_monomial(slot: &Slot) -> String {
    let mut parts = Vec::new();
    if !slot.energy.is_zero() {
        if slot.energy.is_one() {
            parts.push("T".to_string());
        } else {
            parts.push(format!("T^{}", fmt_exp(&slot.energy)));
        }
    }
    if slot.maslov != 0 {
        if slot.maslov == 1 {
            parts.push("e".to_string());
        } else {
            parts.push(format!("e^{}", slot.maslov));
        }
    }
    parts.join("*")
}

impl fmt::Display for Nov {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            let mag = t.coeff.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mono = fmt_monomial(&t.slot());
            if mono.is_empty() {
                write!(f, "{}", fmt_q(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}*{}", fmt_q(&mag), mono)?;
            }
        }
        Ok(())
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            None
        } else {
            std::str::from_utf8(&self.s[start..self.pos]).ok()
        }
    }

    /// `[-]digits[/digits]`, optionally wrapped in parentheses.
    fn signed_fraction(&mut self) -> Option<(BigInt, BigInt)> {
        if self.eat(b'(') {
            let r = self.signed_fraction()?;
            return if self.eat(b')') { Some(r) } else { None };
        }
        let neg = self.eat(b'-');
        let n: BigInt = self.digits()?.parse().ok()?;
        let mut d = BigInt::one();
        let save = self.pos;
        if self.eat(b'/') {
            match self.digits() {
                Some(ds) => d = ds.parse().ok()?,
                None => self.pos = save,
            }
        }
        if d.is_zero() {
            return None;
        }
        Some((if neg { -n } else { n }, d))
    }
}

fn to_i64(b: &BigInt) -> Option<i64> {
    i64::try_from(b).ok()
}

/// Parse one rational number `p` or `p/q`.
pub fn parse_q(text: &str) -> Option<Q> {
    let mut c = Cursor { s: text.as_bytes(), pos: 0 };
    let (n, d) = c.signed_fraction()?;
    c.skip_ws();
    if c.pos != c.s.len() {
        return None;
    }
    Some(Q::new(n, d))
}

/// Parse one exponent `p` or `p/q` into an [`Exp`].
pub fn parse_exp(text: &str) -> Option<Exp> {
    let q = parse_q(text)?;
    Some(Exp::new(to_i64(q.numer())?, to_i64(q.denom())?))
}

impl FromStr for Nov {
    type Err = NovikovError;

    fn from_str(text: &str) -> Result<Nov, NovikovError> {
        let err = |msg: &str| NovikovError::Parse { text: text.to_string(), msg: msg.to_string() };
        let mut c = Cursor { s: text.as_bytes(), pos: 0 };
        let mut raw = Vec::new();
        let mut first = true;
        loop {
            let mut sign = 1;
            match c.peek() {
                None if first => return Err(err("empty input")),
                None => break,
                Some(b'+') if !first => c.pos += 1,
                Some(b'-') => {
                    c.pos += 1;
                    sign = -1;
                }
                Some(_) if first => {}
                Some(ch) => return Err(err(&format!("unexpected `{}`", ch as char))),
            }
            first = false;
            let mut coeff = q_int(sign);
            let mut energy = Exp::zero();
            let mut maslov = 0i64;
            loop {
                match c.peek() {
                    Some(b'T') => {
                        c.pos += 1;
                        if c.eat(b'^') {
                            let (n, d) = c.signed_fraction().ok_or_else(|| err("bad T exponent"))?;
                            let e = Exp::new(
                                to_i64(&n).ok_or_else(|| err("exponent too large"))?,
                                to_i64(&d).ok_or_else(|| err("exponent too large"))?,
                            );
                            energy += e;
                        } else {
                            energy += Exp::one();
                        }
                    }
                    Some(b'e') => {
                        c.pos += 1;
                        if c.eat(b'^') {
                            let (n, d) = c.signed_fraction().ok_or_else(|| err("bad e exponent"))?;
                            if !d.is_one() {
                                return Err(err("e exponent must be an integer"));
                            }
                            maslov += to_i64(&n).ok_or_else(|| err("exponent too large"))?;
                        } else {
                            maslov += 1;
                        }
                    }
                    Some(ch) if ch.is_ascii_digit() || ch == b'(' => {
                        let (n, d) = c.signed_fraction().ok_or_else(|| err("bad coefficient"))?;
                        coeff *= Q::new(n, d);
                    }
                    _ => return Err(err("expected a factor")),
                }
                if !c.eat(b'*') {
                    break;
                }
            }
            raw.push(Term::new(coeff, energy, maslov));
        }
        let floor = raw.iter().map(|t| t.energy).fold(Exp::zero(), |a, b| a.min(b));
        Nov::normalize(raw, None, floor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nov(s: &str, ceiling: i64) -> Nov {
        s.parse::<Nov>().unwrap().with_ceiling(Some(exp_int(ceiling)))
    }

    #[test]
    fn merges_like_terms() {
        let half = Exp::new(1, 2);
        let raw = vec![Term::new(q_int(1), half, 0), Term::new(q_int(1), half, 0)];
        let n = Nov::normalize(raw, Some(exp_int(2)), Exp::zero()).unwrap();
        assert_eq!(n.terms(), &[Term::new(q_int(2), half, 0)]);
    }

    #[test]
    fn drops_above_ceiling_and_cancels() {
        let n = Nov::normalize(vec![Term::new(q_int(1), exp_int(3), 0)], Some(exp_int(2)), Exp::zero()).unwrap();
        assert!(n.is_zero());
        let raw = vec![Term::new(q_int(1), exp_int(0), 0), Term::new(q_int(-1), exp_int(0), 0)];
        assert!(Nov::normalize(raw, None, Exp::zero()).unwrap().is_zero());
    }

    #[test]
    fn rejects_below_floor() {
        let r = Nov::normalize(vec![Term::new(q_int(1), exp_int(-1), 0)], None, Exp::zero());
        assert!(matches!(r, Err(NovikovError::BelowFloor { .. })));
    }

    #[test]
    fn products() {
        assert_eq!(&nov("1 + T", 3) * &nov("1 - T", 3), nov("1 - T^2", 3));
        assert_eq!(&nov("T^1/2*e^2", 3) * &nov("T^1/2*e^-2", 3), nov("T", 3));
        assert!((&nov("1 + T", 3) * &Nov::zero(Some(exp_int(3)))).is_zero());
    }

    #[test]
    fn checked_product_rejects_mismatched_ceilings() {
        assert!(nov("1", 3).try_mul(&nov("1", 4)).is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(nov("2*T^1/2*e^2 + T", 3).valuation(), Valuation::Finite(Exp::new(1, 2)));
        assert_eq!(Nov::zero(None).valuation(), Valuation::Infinite);
        assert_eq!(nov("3*e^-4", 3).valuation(), Valuation::Finite(Exp::zero()));
    }

    #[test]
    fn inverses() {
        assert_eq!(nov("1", 3).invert().unwrap(), nov("1", 3));
        assert_eq!(nov("1 + T", 3).invert().unwrap(), nov("1 - T + T^2", 3));
        assert!(matches!(nov("1 + e", 3).invert(), Err(NovikovError::NotMonomialInvertible(_))));
        assert!(matches!(Nov::zero(None).invert(), Err(NovikovError::DivisionByZero)));
    }

    #[test]
    fn shifted_inverse_has_negative_floor() {
        let a = nov("2*T + T^2", 4);
        let b = a.invert().unwrap();
        assert_eq!(b.valuation(), Valuation::Finite(exp_int(-1)));
        let prod = &a * &b;
        assert_eq!(prod, Nov::one(Some(exp_int(3))).with_floor(exp_int(-1)).unwrap());
    }

    #[test]
    fn geometric_series() {
        assert_eq!(Nov::zero(Some(exp_int(3))).geometric_alt().unwrap(), nov("1", 3));
        assert_eq!(nov("T", 3).geometric_alt().unwrap(), nov("1 - T + T^2", 3));
        let h = "T^1/2*e^2".parse::<Nov>().unwrap().with_ceiling(Some(Exp::new(6, 5)));
        let expect = "1 - T^1/2*e^2 + T*e^4".parse::<Nov>().unwrap().with_ceiling(Some(Exp::new(6, 5)));
        assert_eq!(h.geometric_alt().unwrap(), expect);
        assert!(matches!(nov("1 + T", 3).geometric_alt(), Err(NovikovError::Divergent(_))));
    }

    #[test]
    fn text_round_trip() {
        for s in ["1 - 2*T^1/2*e^2", "0", "-T", "3/4*e^-1 + T^2", "-1/2"] {
            let n: Nov = s.parse().unwrap();
            assert_eq!(n.to_string(), s);
        }
        assert!("1 + * T".parse::<Nov>().is_err());
    }
}
