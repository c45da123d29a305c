//! Direct LTL semantics on lasso words.
//!
//! Independent of any automaton construction; the translation tests use it as
//! their reference.

use thiserror::Error;

use super::{Ltl, Property};
use crate::word::LassoWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("LTL is evaluated on infinite words only; got a finite word")]
    FiniteWord,
}

/// Truth of `w ⊨ f` for an ultimately periodic `w`.
///
/// Each subformula is tabulated over the `|u| + |v|` folded positions; the
/// position after the last one wraps to the start of the period.
pub fn eval_on_lasso(f: &Ltl, w: &LassoWord<Property>) -> Result<bool, EvalError> {
    if w.is_finite() {
        return Err(EvalError::FiniteWord);
    }
    let table = Table { w };
    Ok(table.truth(f)[0])
}

struct Table<'a> {
    w: &'a LassoWord<Property>,
}

impl Table<'_> {
    fn n(&self) -> usize {
        self.w.span()
    }

    fn next(&self, i: usize) -> usize {
        self.w.successor(i).expect("infinite word")
    }

    fn truth(&self, f: &Ltl) -> Vec<bool> {
        let n = self.n();
        match f {
            Ltl::True => vec![true; n],
            Ltl::False => vec![false; n],
            Ltl::Atom(p) => (0..n).map(|i| self.w.folded(i) == p).collect(),
            Ltl::Not(a) => self.truth(a).into_iter().map(|x| !x).collect(),
            Ltl::And(a, b) => zip(self.truth(a), self.truth(b), |x, y| x && y),
            Ltl::Or(a, b) => zip(self.truth(a), self.truth(b), |x, y| x || y),
            Ltl::Implies(a, b) => zip(self.truth(a), self.truth(b), |x, y| !x || y),
            Ltl::Next(a) => {
                let ta = self.truth(a);
                (0..n).map(|i| ta[self.next(i)]).collect()
            }
            Ltl::Until(a, b) => self.until(&self.truth(a), &self.truth(b)),
            Ltl::Release(a, b) => self.release(&self.truth(a), &self.truth(b)),
            Ltl::Eventually(a) => self.until(&vec![true; n], &self.truth(a)),
            Ltl::Always(a) => self.release(&vec![false; n], &self.truth(a)),
        }
    }

    /// Least fixpoint of `x = b ∨ (a ∧ X x)`.
    fn until(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        let mut val = b.to_vec();
        loop {
            let mut changed = false;
            for i in (0..self.n()).rev() {
                if !val[i] && a[i] && val[self.next(i)] {
                    val[i] = true;
                    changed = true;
                }
            }
            if !changed {
                return val;
            }
        }
    }

    /// Greatest fixpoint of `x = b ∧ (a ∨ X x)`.
    fn release(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        let mut val = b.to_vec();
        loop {
            let mut changed = false;
            for i in (0..self.n()).rev() {
                if val[i] && !a[i] && !val[self.next(i)] {
                    val[i] = false;
                    changed = true;
                }
            }
            if !changed {
                return val;
            }
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}
