//! LTL syntax over single-property letters.
//!
//! Every position of a word carries exactly one property, so an atom `p`
//! holds at position `i` iff the letter there *is* `p`.

mod eval;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use eval::{eval_on_lasso, EvalError};
pub use parser::{parse_ltl, ParseError};

/// A property name, e.g. `H1`, `I3_1` or `varpi_1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Property(String);

impl Property {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "property names must be nonempty");
        Property(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Property {
    fn from(s: &str) -> Self {
        Property::new(s)
    }
}

/// Builds a property set from names.
pub fn alphabet<I, S>(names: I) -> BTreeSet<Property>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    names.into_iter().map(Property::new).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ltl {
    True,
    False,
    Atom(Property),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    /// Dual of `Until`; only produced by [`Ltl::to_nnf`].
    Release(Box<Ltl>, Box<Ltl>),
    Eventually(Box<Ltl>),
    Always(Box<Ltl>),
}

impl Ltl {
    pub fn atom(name: &str) -> Ltl {
        Ltl::Atom(Property::new(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Ltl {
        Ltl::Not(Box::new(self))
    }

    pub fn and(self, rhs: Ltl) -> Ltl {
        Ltl::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Ltl) -> Ltl {
        Ltl::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Ltl) -> Ltl {
        Ltl::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn next(self) -> Ltl {
        Ltl::Next(Box::new(self))
    }

    pub fn until(self, rhs: Ltl) -> Ltl {
        Ltl::Until(Box::new(self), Box::new(rhs))
    }

    pub fn release(self, rhs: Ltl) -> Ltl {
        Ltl::Release(Box::new(self), Box::new(rhs))
    }

    pub fn eventually(self) -> Ltl {
        Ltl::Eventually(Box::new(self))
    }

    pub fn always(self) -> Ltl {
        Ltl::Always(Box::new(self))
    }

    /// Properties mentioned by the formula.
    pub fn atoms(&self) -> BTreeSet<Property> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Property>) {
        match self {
            Ltl::True | Ltl::False => {}
            Ltl::Atom(p) => {
                out.insert(p.clone());
            }
            Ltl::Not(a) | Ltl::Next(a) | Ltl::Eventually(a) | Ltl::Always(a) => {
                a.collect_atoms(out)
            }
            Ltl::And(a, b)
            | Ltl::Or(a, b)
            | Ltl::Implies(a, b)
            | Ltl::Until(a, b)
            | Ltl::Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => 0,
            Ltl::Not(a) | Ltl::Next(a) | Ltl::Eventually(a) | Ltl::Always(a) => 1 + a.depth(),
            Ltl::And(a, b)
            | Ltl::Or(a, b)
            | Ltl::Implies(a, b)
            | Ltl::Until(a, b)
            | Ltl::Release(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Negation normal form: negations only on atoms, `F`/`G`/`->` rewritten
    /// into `U`/`R`/`|`.
    pub fn to_nnf(&self) -> Ltl {
        nnf(self, false)
    }

    /// True when the formula is in the shape produced by [`Ltl::to_nnf`].
    pub fn is_nnf(&self) -> bool {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => true,
            Ltl::Not(a) => matches!(**a, Ltl::Atom(_)),
            Ltl::Next(a) => a.is_nnf(),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                a.is_nnf() && b.is_nnf()
            }
            Ltl::Implies(..) | Ltl::Eventually(_) | Ltl::Always(_) => false,
        }
    }
}

/// Pushes a pending negation (`neg`) down to the atoms.
fn nnf(f: &Ltl, neg: bool) -> Ltl {
    let bx = Box::new;
    match (f, neg) {
        (Ltl::True, false) | (Ltl::False, true) => Ltl::True,
        (Ltl::True, true) | (Ltl::False, false) => Ltl::False,
        (Ltl::Atom(p), false) => Ltl::Atom(p.clone()),
        (Ltl::Atom(p), true) => Ltl::Not(bx(Ltl::Atom(p.clone()))),
        (Ltl::Not(a), _) => nnf(a, !neg),
        (Ltl::And(a, b), false) => Ltl::And(bx(nnf(a, false)), bx(nnf(b, false))),
        (Ltl::And(a, b), true) => Ltl::Or(bx(nnf(a, true)), bx(nnf(b, true))),
        (Ltl::Or(a, b), false) => Ltl::Or(bx(nnf(a, false)), bx(nnf(b, false))),
        (Ltl::Or(a, b), true) => Ltl::And(bx(nnf(a, true)), bx(nnf(b, true))),
        (Ltl::Implies(a, b), false) => Ltl::Or(bx(nnf(a, true)), bx(nnf(b, false))),
        (Ltl::Implies(a, b), true) => Ltl::And(bx(nnf(a, false)), bx(nnf(b, true))),
        (Ltl::Next(a), _) => Ltl::Next(bx(nnf(a, neg))),
        (Ltl::Until(a, b), false) => Ltl::Until(bx(nnf(a, false)), bx(nnf(b, false))),
        (Ltl::Until(a, b), true) => Ltl::Release(bx(nnf(a, true)), bx(nnf(b, true))),
        (Ltl::Release(a, b), false) => Ltl::Release(bx(nnf(a, false)), bx(nnf(b, false))),
        (Ltl::Release(a, b), true) => Ltl::Until(bx(nnf(a, true)), bx(nnf(b, true))),
        (Ltl::Eventually(a), false) => Ltl::Until(bx(Ltl::True), bx(nnf(a, false))),
        (Ltl::Eventually(a), true) => Ltl::Release(bx(Ltl::False), bx(nnf(a, true))),
        (Ltl::Always(a), false) => Ltl::Release(bx(Ltl::False), bx(nnf(a, false))),
        (Ltl::Always(a), true) => Ltl::Until(bx(Ltl::True), bx(nnf(a, true))),
    }
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ltl::True => f.write_str("true"),
            Ltl::False => f.write_str("false"),
            Ltl::Atom(p) => write!(f, "{p}"),
            Ltl::Not(a) => write!(f, "!{a}"),
            Ltl::Next(a) => write!(f, "X {a}"),
            Ltl::Eventually(a) => write!(f, "F {a}"),
            Ltl::Always(a) => write!(f, "G {a}"),
            Ltl::And(a, b) => write!(f, "({a} & {b})"),
            Ltl::Or(a, b) => write!(f, "({a} | {b})"),
            Ltl::Implies(a, b) => write!(f, "({a} -> {b})"),
            Ltl::Until(a, b) => write!(f, "({a} U {b})"),
            // no concrete syntax for release: print its dual
            Ltl::Release(a, b) => write!(f, "!(!{a} U !{b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Ltl {
        Ltl::atom("a")
    }

    #[test]
    fn nnf_of_negated_eventually_is_release() {
        let f = a().eventually().not().to_nnf();
        assert_eq!(f, Ltl::False.release(a().not()));
        assert!(f.is_nnf());
    }

    #[test]
    fn nnf_drops_double_negation() {
        assert_eq!(a().not().not().to_nnf(), a());
    }

    #[test]
    fn nnf_dualizes_until() {
        let b = Ltl::atom("b");
        let f = a().until(b.clone()).not().to_nnf();
        assert_eq!(f, a().not().release(b.not()));
    }

    #[test]
    fn nnf_removes_implication() {
        let b = Ltl::atom("b");
        let f = a().implies(b.clone()).to_nnf();
        assert_eq!(f, a().not().or(b));
    }

    #[test]
    fn atoms_are_collected() {
        let f = a().until(Ltl::atom("b").next()).always();
        assert_eq!(f.atoms(), alphabet(["a", "b"]));
        assert_eq!(f.depth(), 3);
    }
}
