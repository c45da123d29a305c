//! Distributions of the property alphabet over agents, the independence
//! relation they induce, and the decision procedure for trace closure.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{intersect, BuchiAutomaton, Builder};
use crate::formula::Property;
use crate::word::LassoWord;

/// Name of an agent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(String);

impl AgentId {
    pub fn new(name: impl Into<String>) -> Self {
        AgentId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AgentId {
    fn from(s: &str) -> Self {
        AgentId::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistributionError {
    #[error("a distribution needs at least one agent")]
    NoAgents,
    #[error("agent `{0}` appears twice")]
    DuplicateAgent(AgentId),
    #[error("agent `{0}` has an empty alphabet")]
    EmptyAlphabet(AgentId),
    #[error("the agent alphabets do not cover property `{0}`")]
    Uncovered(Property),
    #[error("agent alphabet mentions `{0}`, which is not in the global alphabet")]
    Foreign(Property),
}

/// Per-agent alphabets `Σ_i` whose union is the global alphabet `Σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    agents: Vec<AgentId>,
    alphabets: Vec<BTreeSet<Property>>,
    global: BTreeSet<Property>,
}

impl Distribution {
    /// The global alphabet is the union of the agent alphabets.
    pub fn new(
        entries: impl IntoIterator<Item = (AgentId, BTreeSet<Property>)>,
    ) -> Result<Self, DistributionError> {
        let entries: Vec<_> = entries.into_iter().collect();
        let global = entries.iter().flat_map(|(_, s)| s.iter().cloned()).collect();
        Self::with_global(entries, global)
    }

    /// Checks that the agent alphabets cover exactly `global`.
    pub fn with_global(
        entries: impl IntoIterator<Item = (AgentId, BTreeSet<Property>)>,
        global: BTreeSet<Property>,
    ) -> Result<Self, DistributionError> {
        let mut agents = Vec::new();
        let mut alphabets = Vec::new();
        for (id, sigma) in entries {
            if agents.contains(&id) {
                return Err(DistributionError::DuplicateAgent(id));
            }
            if sigma.is_empty() {
                return Err(DistributionError::EmptyAlphabet(id));
            }
            if let Some(p) = sigma.iter().find(|p| !global.contains(*p)) {
                return Err(DistributionError::Foreign(p.clone()));
            }
            agents.push(id);
            alphabets.push(sigma);
        }
        if agents.is_empty() {
            return Err(DistributionError::NoAgents);
        }
        if let Some(p) = global.iter().find(|p| !alphabets.iter().any(|s| s.contains(*p))) {
            return Err(DistributionError::Uncovered(p.clone()));
        }
        Ok(Distribution {
            agents,
            alphabets,
            global,
        })
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn global(&self) -> &BTreeSet<Property> {
        &self.global
    }

    pub fn index_of(&self, agent: &AgentId) -> Option<usize> {
        self.agents.iter().position(|a| a == agent)
    }

    /// Alphabet of the agent at position `i`.
    pub fn alphabet(&self, i: usize) -> &BTreeSet<Property> {
        &self.alphabets[i]
    }

    pub fn alphabets(&self) -> &[BTreeSet<Property>] {
        &self.alphabets
    }

    /// Indices of the agents owning `p`.
    pub fn owners(&self, p: &Property) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.alphabets[i].contains(p)).collect()
    }

    /// Whether `p` belongs to at least two agents.
    pub fn is_shared(&self, p: &Property) -> bool {
        self.owners(p).len() >= 2
    }

    /// Whether some agent owns both properties.
    pub fn co_located(&self, a: &Property, b: &Property) -> bool {
        self.alphabets.iter().any(|s| s.contains(a) && s.contains(b))
    }
}

/// An ordered pair of properties; letters of the trace-closure automata.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropertyPair(pub Property, pub Property);

impl fmt::Display for PropertyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// Pairs of properties that no single agent owns together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceRelation {
    pairs: BTreeSet<(Property, Property)>,
}

impl IndependenceRelation {
    pub fn pairs(&self) -> &BTreeSet<(Property, Property)> {
        &self.pairs
    }

    pub fn contains(&self, a: &Property, b: &Property) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn independence(d: &Distribution) -> IndependenceRelation {
    let mut pairs = BTreeSet::new();
    for a in d.global() {
        for b in d.global() {
            if !d.co_located(a, b) {
                pairs.insert((a.clone(), b.clone()));
            }
        }
    }
    IndependenceRelation { pairs }
}

/// Automaton over pair letters whose accepted words are pairs of tracks that
/// differ by swaps of adjacent independent letters.
///
/// State 0 is initial and accepting and loops on every `(σ, σ)`; each
/// independent pair `(σ, σ')` gets its own state, entered on `(σ, σ')` and left
/// back to state 0 on `(σ', σ)`. There are `|I| + 1` states.
pub fn commutation_automaton(d: &Distribution) -> BuchiAutomaton<PropertyPair> {
    let indep = independence(d);
    let diagonal = d.global().iter().map(|s| PropertyPair(s.clone(), s.clone()));
    let swaps = indep.pairs.iter().map(|(a, b)| PropertyPair(a.clone(), b.clone()));
    let mut b = Builder::new(diagonal.clone().chain(swaps));
    let q0 = b.add_state(true);
    b.set_initial(q0);
    for letter in diagonal {
        b.add_edge(q0, &letter, q0).expect("diagonal letter");
    }
    for (s, t) in &indep.pairs {
        let q = b.add_state(false);
        b.add_edge(q0, &PropertyPair(s.clone(), t.clone()), q)
            .expect("swap letter");
        b.add_edge(q, &PropertyPair(t.clone(), s.clone()), q0)
            .expect("swap letter");
    }
    b.build()
}

/// Lifts `b` to pair letters of `pairs`, reading the first component.
pub fn lift_first(b: &BuchiAutomaton<Property>, pairs: &[PropertyPair]) -> BuchiAutomaton<PropertyPair> {
    lift(b, pairs, |p| &p.0)
}

/// Lifts `b` to pair letters of `pairs`, reading the second component.
pub fn lift_second(b: &BuchiAutomaton<Property>, pairs: &[PropertyPair]) -> BuchiAutomaton<PropertyPair> {
    lift(b, pairs, |p| &p.1)
}

fn lift(
    b: &BuchiAutomaton<Property>,
    pairs: &[PropertyPair],
    track: impl Fn(&PropertyPair) -> &Property,
) -> BuchiAutomaton<PropertyPair> {
    b.relabel(pairs.iter().cloned(), |sigma| {
        pairs.iter().filter(|p| track(p) == sigma).cloned().collect()
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("the automata and the distribution do not share one alphabet")]
    AlphabetMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureVerdict {
    Closed,
    /// `inside` is accepted, `outside` is not, and the two are trace
    /// equivalent.
    NotClosed {
        inside: LassoWord<Property>,
        outside: LassoWord<Property>,
    },
}

impl ClosureVerdict {
    pub fn is_closed(&self) -> bool {
        matches!(self, ClosureVerdict::Closed)
    }
}

/// Decides whether `L(b_phi)` is closed under trace equivalence.
///
/// `b_not_phi` must accept the complement of `L(b_phi)`. The language is
/// closed iff no pair-word is accepted by the commutation automaton while its
/// first track is in `L(b_phi)` and its second track in `L(b_not_phi)`.
pub fn is_trace_closed(
    b_phi: &BuchiAutomaton<Property>,
    b_not_phi: &BuchiAutomaton<Property>,
    d: &Distribution,
) -> Result<ClosureVerdict, ClosureError> {
    let sigma: Vec<Property> = d.global().iter().cloned().collect();
    if b_phi.alphabet() != sigma.as_slice() || b_not_phi.alphabet() != sigma.as_slice() {
        return Err(ClosureError::AlphabetMismatch);
    }
    let c = commutation_automaton(d);
    let pairs = c.alphabet().to_vec();
    let first = lift_first(b_phi, &pairs);
    let second = lift_second(b_not_phi, &pairs);
    let product = intersect(&[&c, &first, &second]).expect("shared pair alphabet");
    Ok(match product.accepting_lasso() {
        None => ClosureVerdict::Closed,
        Some(w) => ClosureVerdict::NotClosed {
            inside: w.map(|p| p.0.clone()),
            outside: w.map(|p| p.1.clone()),
        },
    })
}

/// Projection of `w` onto the properties in `sigma`.
pub fn project(w: &LassoWord<Property>, sigma: &BTreeSet<Property>) -> LassoWord<Property> {
    w.project(|p| sigma.contains(p))
}

/// Whether `w1` and `w2` have the same projection onto every agent alphabet.
pub fn trace_equivalent(w1: &LassoWord<Property>, w2: &LassoWord<Property>, d: &Distribution) -> bool {
    d.alphabets()
        .iter()
        .all(|s| project(w1, s).same_word(&project(w2, s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::alphabet;

    fn dist(parts: &[(&str, &[&str])]) -> Distribution {
        Distribution::new(
            parts
                .iter()
                .map(|(id, s)| (AgentId::new(*id), alphabet(s.iter().copied()))),
        )
        .unwrap()
    }

    fn fig3() -> Distribution {
        dist(&[("1", &["a", "b"]), ("2", &["a", "c"])])
    }

    fn word(u: &str, v: &str) -> LassoWord<Property> {
        let f = |s: &str| s.chars().map(|c| Property::new(c.to_string())).collect();
        LassoWord::new(f(u), f(v))
    }

    #[test]
    fn independence_examples() {
        let i = independence(&fig3());
        let expected: BTreeSet<_> = [("b", "c"), ("c", "b")]
            .iter()
            .map(|(x, y)| (Property::new(*x), Property::new(*y)))
            .collect();
        assert_eq!(i.pairs(), &expected);

        let same = dist(&[("1", &["a", "b"]), ("2", &["a", "b"])]);
        assert!(independence(&same).is_empty());

        let split = dist(&[("1", &["a"]), ("2", &["b"])]);
        let i = independence(&split);
        assert_eq!(i.len(), 2);
        assert!(i.contains(&"a".into(), &"b".into()));
        assert!(i.contains(&"b".into(), &"a".into()));
    }

    #[test]
    fn relation_is_symmetric_and_irreflexive() {
        let d = dist(&[("1", &["a", "b"]), ("2", &["c"]), ("3", &["c", "d"])]);
        let i = independence(&d);
        for (x, y) in i.pairs() {
            assert_ne!(x, y);
            assert!(i.contains(y, x));
            assert!(!d.co_located(x, y));
        }
    }

    #[test]
    fn commutation_automaton_of_single_alphabet() {
        let d = dist(&[("1", &["a", "b", "c"])]);
        let c = commutation_automaton(&d);
        assert_eq!(c.num_states(), 1);
        assert_eq!(c.num_transitions(), 3);
    }

    #[test]
    fn distribution_validation() {
        let sigma = alphabet(["a", "b"]);
        assert_eq!(
            Distribution::with_global([(AgentId::new("1"), alphabet(["a"]))], sigma.clone()),
            Err(DistributionError::Uncovered("b".into()))
        );
        assert_eq!(
            Distribution::with_global([(AgentId::new("1"), BTreeSet::new())], sigma.clone()),
            Err(DistributionError::EmptyAlphabet("1".into()))
        );
        assert_eq!(
            Distribution::with_global(
                [
                    (AgentId::new("1"), sigma.clone()),
                    (AgentId::new("1"), sigma.clone())
                ],
                sigma.clone()
            ),
            Err(DistributionError::DuplicateAgent("1".into()))
        );
        assert_eq!(Distribution::new([]), Err(DistributionError::NoAgents));
        assert_eq!(
            Distribution::with_global([(AgentId::new("1"), alphabet(["a", "z"]))], sigma),
            Err(DistributionError::Foreign("z".into()))
        );
    }

    #[test]
    fn trace_equivalence_examples() {
        let d = fig3();
        assert!(trace_equivalent(&word("abc", ""), &word("acb", ""), &d));
        assert!(trace_equivalent(&word("ab", "c"), &word("ab", "c"), &d));
        assert!(!trace_equivalent(&word("ab", ""), &word("ba", ""), &d));
        assert!(trace_equivalent(&word("", "bc"), &word("", "cb"), &d));
        assert!(!trace_equivalent(&word("a", ""), &word("", "a"), &d));
    }

    #[test]
    fn mismatched_alphabets_are_rejected() {
        let d = fig3();
        let other = Builder::new([Property::new("a")]).build();
        assert_eq!(
            is_trace_closed(&other, &other, &d),
            Err(ClosureError::AlphabetMismatch)
        );
    }
}
