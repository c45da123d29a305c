//! Finite and ultimately periodic words.

use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

/// Anything that can label an automaton transition.
pub trait Symbol: Clone + Ord + Hash + fmt::Debug + fmt::Display {}

impl<T> Symbol for T where T: Clone + Ord + Hash + fmt::Debug + fmt::Display {}

/// A word of the form `prefix · period^ω`.
///
/// An empty period denotes the finite word `prefix`. The representation is
/// kept exactly as produced; two different `(prefix, period)` pairs may denote
/// the same ω-word, use [`LassoWord::same_word`] to compare languages.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LassoWord<L> {
    pub prefix: Vec<L>,
    pub period: Vec<L>,
}

impl<L> LassoWord<L> {
    pub fn new(prefix: Vec<L>, period: Vec<L>) -> Self {
        LassoWord { prefix, period }
    }

    pub fn finite(word: Vec<L>) -> Self {
        LassoWord {
            prefix: word,
            period: Vec::new(),
        }
    }

    pub fn empty() -> Self {
        LassoWord::finite(Vec::new())
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    pub fn is_infinite(&self) -> bool {
        !self.period.is_empty()
    }

    /// Number of positions in the unrolling `prefix · period` (one period).
    pub fn span(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    /// Position following `i` in the folded representation: the last period
    /// position wraps to the first one. `None` past the end of a finite word.
    pub fn successor(&self, i: usize) -> Option<usize> {
        let n = self.span();
        if i + 1 < n {
            Some(i + 1)
        } else if self.is_infinite() {
            Some(self.prefix.len())
        } else {
            None
        }
    }

    /// Letter at the folded position `i < span()`.
    pub fn folded(&self, i: usize) -> &L {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.period[i - self.prefix.len()]
        }
    }

    /// Letter at absolute position `i` of the (possibly infinite) word.
    pub fn at(&self, i: usize) -> Option<&L> {
        if i < self.prefix.len() {
            Some(&self.prefix[i])
        } else if self.period.is_empty() {
            None
        } else {
            Some(&self.period[(i - self.prefix.len()) % self.period.len()])
        }
    }

    /// All letters of the folded representation, prefix first.
    pub fn letters(&self) -> impl Iterator<Item = &L> {
        self.prefix.iter().chain(self.period.iter())
    }

    pub fn map<M>(&self, mut f: impl FnMut(&L) -> M) -> LassoWord<M> {
        LassoWord {
            prefix: self.prefix.iter().map(&mut f).collect(),
            period: self.period.iter().map(&mut f).collect(),
        }
    }
}

impl<L: Clone> LassoWord<L> {
    /// Erases letters rejected by `keep`. If no period letter survives, the
    /// result is the finite word made of the surviving prefix letters.
    pub fn project(&self, mut keep: impl FnMut(&L) -> bool) -> LassoWord<L> {
        let prefix: Vec<L> = self.prefix.iter().filter(|l| keep(l)).cloned().collect();
        let period: Vec<L> = self.period.iter().filter(|l| keep(l)).cloned().collect();
        LassoWord { prefix, period }
    }

    /// The first `n` letters (fewer if the word is finite and shorter).
    pub fn unroll(&self, n: usize) -> Vec<L> {
        (0..n).map_while(|i| self.at(i).cloned()).collect()
    }
}

impl<L: Clone + PartialEq> LassoWord<L> {
    /// ω-word equality, independent of the chosen representation.
    pub fn same_word(&self, other: &LassoWord<L>) -> bool {
        match (self.is_finite(), other.is_finite()) {
            (true, true) => self.prefix == other.prefix,
            (false, false) => {
                let horizon = self.prefix.len().max(other.prefix.len())
                    + lcm(self.period.len(), other.period.len());
                (0..horizon).all(|i| self.at(i) == other.at(i))
            }
            _ => false,
        }
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        a.max(b)
    } else {
        a / gcd(a, b) * b
    }
}

impl<L: fmt::Display> fmt::Display for LassoWord<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[L]| -> fmt::Result {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        };
        join(f, &self.prefix)?;
        if !self.period.is_empty() {
            if !self.prefix.is_empty() {
                f.write_str(" ")?;
            }
            f.write_str("(")?;
            join(f, &self.period)?;
            f.write_str(")^w")?;
        }
        Ok(())
    }
}
