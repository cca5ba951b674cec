//! Bar-type spaces: plain, cyclic and symmetric words under `d̂`.

use crate::ainfinity::AlgebraSpec;
use crate::error::Result;
use crate::novikov::{Exp, Nov, Slot};
use crate::words::{cyclic_rep, symmetric_rep, Flavor, SignedVector, Word};

use super::{words_of_len, Key, Space};

pub struct BarSpace {
    pub alg: AlgebraSpec,
    pub flavor: Flavor,
    pub min_len: usize,
    pub kmax: usize,
}

impl BarSpace {
    pub fn new(alg: &AlgebraSpec, flavor: Flavor, min_len: usize) -> BarSpace {
        BarSpace { alg: alg.clone(), flavor, min_len, kmax: usize::MAX }
    }

    pub fn with_kmax(mut self, k: Option<usize>) -> BarSpace {
        self.kmax = k.unwrap_or(usize::MAX);
        self
    }
}

/// Canonical words of one length in a flavor; self-cancelling orbits skipped.
pub fn flavored_words(alg: &AlgebraSpec, flavor: Flavor, len: usize) -> Vec<Word> {
    let alpha = &alg.alphabet;
    words_of_len(alg.size(), len)
        .into_iter()
        .map(Word::plain)
        .filter(|w| match flavor {
            Flavor::Cyclic => cyclic_rep(alpha, w).map_or(false, |o| o.rep == *w),
            Flavor::Symmetric => symmetric_rep(alpha, w).map_or(false, |o| o.rep == *w),
            _ => true,
        })
        .collect()
}

pub fn vector_keys(v: &SignedVector, column: u32) -> Vec<(Key, Nov)> {
    v.iter().map(|(w, c)| ((column, w.clone()), c.clone())).collect()
}

impl Space for BarSpace {
    fn label(&self) -> String {
        let f = match self.flavor {
            Flavor::Cyclic => "cyc",
            Flavor::Symmetric => "sym",
            _ => "bar",
        };
        format!("{}:{}", f, self.alg.name)
    }

    fn keys(&self, size: usize) -> Vec<Key> {
        if size < self.min_len {
            return Vec::new();
        }
        flavored_words(&self.alg, self.flavor, size).into_iter().map(|w| (0, w)).collect()
    }

    fn key_degree(&self, key: &Key) -> i64 {
        self.alg.alphabet.word_deg(&key.1)
    }

    fn apply(&self, key: &Key, ceiling: Exp) -> Result<Vec<(Key, Nov)>> {
        let v = SignedVector::basis(self.flavor, key.1.clone(), &Slot::zero(), Some(ceiling));
        let out = self.alg.dhat(&v, self.kmax)?;
        Ok(vector_keys(&out, 0))
    }

    fn render(&self, key: &Key) -> String {
        let prefix = match self.flavor {
            Flavor::Cyclic => "cyc:",
            Flavor::Symmetric => "sym:",
            _ => "",
        };
        format!("{}{}", prefix, self.alg.alphabet.render(&key.1))
    }

    fn slot_gens(&self) -> Vec<Slot> {
        self.alg.op_slots()
    }

    fn lambda0(&self) -> Exp {
        self.alg.lambda0()
    }

    fn z2(&self) -> bool {
        self.alg.z2
    }
}
