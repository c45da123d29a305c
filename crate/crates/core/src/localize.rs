//! Per-agent localization: transition systems, projection of a specification
//! automaton onto an agent alphabet, and the implementable local
//! specification obtained as a product with the agent's transition system.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::automata::{BuchiAutomaton, Builder, MixedBuchiAutomaton, StateId};
use crate::formula::Property;
use crate::graph::{self, LabeledGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("transition system has no states")]
    NoStates,
    #[error("state `{0}` is declared twice")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{0}` has no label")]
    MissingLabel(String),
    #[error("state `{state}` is labelled `{property}`, which is outside the agent alphabet")]
    LabelOutsideAlphabet { state: String, property: Property },
}

/// A finite transition system whose states each carry exactly one property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    names: Vec<String>,
    index: HashMap<String, usize>,
    initial: usize,
    succ: Vec<Vec<usize>>,
    alphabet: BTreeSet<Property>,
    labels: Vec<Property>,
}

impl TransitionSystem {
    pub fn new(
        states: impl IntoIterator<Item = impl Into<String>>,
        initial: &str,
        transitions: impl IntoIterator<Item = (impl AsRef<str>, impl AsRef<str>)>,
        alphabet: BTreeSet<Property>,
        labels: &BTreeMap<String, Property>,
    ) -> Result<Self, ModelError> {
        let names: Vec<String> = states.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ModelError::NoStates);
        }
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(name.clone()));
            }
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| ModelError::UnknownState(name.to_string()))
        };
        let initial = lookup(initial)?;
        let mut succ = vec![Vec::new(); names.len()];
        for (from, to) in transitions {
            let (a, b) = (lookup(from.as_ref())?, lookup(to.as_ref())?);
            succ[a].push(b);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        if let Some(extra) = labels.keys().find(|k| !index.contains_key(*k)) {
            return Err(ModelError::UnknownState(extra.clone()));
        }
        let mut h = Vec::with_capacity(names.len());
        for name in &names {
            let p = labels
                .get(name)
                .ok_or_else(|| ModelError::MissingLabel(name.clone()))?;
            if !alphabet.contains(p) {
                return Err(ModelError::LabelOutsideAlphabet {
                    state: name.clone(),
                    property: p.clone(),
                });
            }
            h.push(p.clone());
        }
        Ok(TransitionSystem {
            names,
            index,
            initial,
            succ,
            alphabet,
            labels: h,
        })
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn successors(&self, s: usize) -> &[usize] {
        &self.succ[s]
    }

    pub fn has_transition(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }

    pub fn label(&self, s: usize) -> &Property {
        &self.labels[s]
    }

    pub fn alphabet(&self) -> &BTreeSet<Property> {
        &self.alphabet
    }

    /// All `(from, to)` transitions by state name, in id order.
    pub fn transitions(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.succ.iter().enumerate().flat_map(move |(a, out)| {
            out.iter()
                .map(move |&b| (self.names[a].as_str(), self.names[b].as_str()))
        })
    }
}

/// A transition system with a fresh `Start` state whose only transition
/// leads to the original initial state. `Start` carries no property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedTransitionSystem {
    ts: TransitionSystem,
    start_succ: [usize; 1],
}

/// Display name of the added start state.
pub const START: &str = "Start";

impl ExtendedTransitionSystem {
    pub fn inner(&self) -> &TransitionSystem {
        &self.ts
    }

    /// Id of `Start`; original states keep their ids.
    pub fn start(&self) -> usize {
        self.ts.num_states()
    }

    pub fn num_states(&self) -> usize {
        self.ts.num_states() + 1
    }

    pub fn num_transitions(&self) -> usize {
        self.ts.num_transitions() + 1
    }

    pub fn successors(&self, s: usize) -> &[usize] {
        if s == self.start() {
            &self.start_succ
        } else {
            self.ts.successors(s)
        }
    }

    /// `None` for `Start`.
    pub fn label(&self, s: usize) -> Option<&Property> {
        (s != self.start()).then(|| self.ts.label(s))
    }

    pub fn name(&self, s: usize) -> &str {
        if s == self.start() {
            START
        } else {
            self.ts.name(s)
        }
    }

    pub fn in_degree(&self, s: usize) -> usize {
        (0..self.num_states())
            .filter(|&a| self.successors(a).contains(&s))
            .count()
    }
}

pub fn extend_with_start(t: &TransitionSystem) -> ExtendedTransitionSystem {
    ExtendedTransitionSystem {
        start_succ: [t.initial()],
        ts: t.clone(),
    }
}

/// Projection of `L(b)` onto `sigma_i`: infinite projections are accepted by
/// the Büchi condition, finite ones by terminal finitary states.
///
/// Letters outside `sigma_i` become silent. A state `(q, f)` records the
/// automaton state `q` reached after the last visible letter and whether an
/// accepting state was entered on the silent-then-visible segment leading to
/// it; `(q, true)` is accepting. A visible step into `q` also leads to a
/// finitary twin of `q` when `q` can silently reach a silent cycle through an
/// accepting state. One more finitary initial state stands for the empty
/// projection when an initial state has that property.
pub fn project_spec(b: &BuchiAutomaton<Property>, sigma_i: &BTreeSet<Property>) -> MixedBuchiAutomaton<Property> {
    let visible: Vec<bool> = b.alphabet().iter().map(|p| sigma_i.contains(p)).collect();
    let silent = SilentGraph::new(b, &visible);
    let tail_accepting = silent.reaches_accepting_cycle(b);

    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    enum Node {
        Seg(StateId, bool),
        Twin(StateId),
        Empty,
    }

    let mut builder = Builder::new(sigma_i.iter().cloned());
    let mut ids: HashMap<Node, StateId> = HashMap::new();
    let mut finitary = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |node: Node, builder: &mut Builder<Property>, queue: &mut VecDeque<(StateId, StateId)>| {
        *ids.entry(node).or_insert_with(|| {
            let id = builder.add_state(matches!(node, Node::Seg(_, true)));
            match node {
                Node::Seg(q, _) => queue.push_back((q, id)),
                _ => finitary.push(id),
            }
            id
        })
    };

    for &q in b.initial() {
        let id = intern(Node::Seg(q, b.is_accepting(q)), &mut builder, &mut queue);
        builder.set_initial(id);
    }
    if b.initial().iter().any(|&q| tail_accepting[q]) {
        let id = intern(Node::Empty, &mut builder, &mut queue);
        builder.set_initial(id);
    }
    while let Some((q, from)) = queue.pop_front() {
        for (p, seen) in silent.closure(b, q) {
            for &(li, r) in b.edges(p) {
                if !visible[li] {
                    continue;
                }
                let letter = builder
                    .letter_index(b.letter(li))
                    .expect("visible letters are in sigma_i");
                let to = intern(Node::Seg(r, seen || b.is_accepting(r)), &mut builder, &mut queue);
                builder.add_edge_index(from, letter, to);
                if tail_accepting[r] {
                    let twin = intern(Node::Twin(r), &mut builder, &mut queue);
                    builder.add_edge_index(from, letter, twin);
                }
            }
        }
    }
    let mixed = MixedBuchiAutomaton::new(builder.build(), finitary).expect("twins have no outgoing edges");
    mixed.trim().0
}

/// The silent-letter subgraph of a Büchi automaton.
struct SilentGraph {
    edges: Vec<Vec<(usize, usize)>>,
}

impl LabeledGraph for SilentGraph {
    fn node_count(&self) -> usize {
        self.edges.len()
    }
    fn out_edges(&self, node: usize) -> &[(usize, usize)] {
        &self.edges[node]
    }
}

impl SilentGraph {
    fn new(b: &BuchiAutomaton<Property>, visible: &[bool]) -> Self {
        let edges = (0..b.num_states())
            .map(|q| {
                b.edges(q)
                    .iter()
                    .copied()
                    .filter(|&(li, _)| !visible[li])
                    .collect()
            })
            .collect();
        SilentGraph { edges }
    }

    /// Pairs `(p, f)` silently reachable from `q`, where `f` tells whether an
    /// accepting state was entered on the way. `q` itself is not counted.
    fn closure(&self, b: &BuchiAutomaton<Property>, q: StateId) -> Vec<(StateId, bool)> {
        let mut seen = vec![[false; 2]; self.edges.len()];
        let mut out = vec![(q, false)];
        seen[q][0] = true;
        let mut i = 0;
        while i < out.len() {
            let (p, f) = out[i];
            i += 1;
            for &(_, r) in &self.edges[p] {
                let g = f || b.is_accepting(r);
                if !seen[r][g as usize] {
                    seen[r][g as usize] = true;
                    out.push((r, g));
                }
            }
        }
        out
    }

    /// States that can silently reach a silent cycle through an accepting
    /// state.
    fn reaches_accepting_cycle(&self, b: &BuchiAutomaton<Property>) -> Vec<bool> {
        let n = self.edges.len();
        let roots: Vec<usize> = (0..n).collect();
        let mut good = vec![false; n];
        for scc in graph::tarjan(self, &roots) {
            if graph::is_nontrivial(self, &scc) && scc.iter().any(|&q| b.is_accepting(q)) {
                for q in scc {
                    good[q] = true;
                }
            }
        }
        let mut preds = vec![Vec::new(); n];
        for (q, out) in self.edges.iter().enumerate() {
            for &(_, r) in out {
                preds[r].push(q);
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&q| good[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &preds[q] {
                if !good[p] {
                    good[p] = true;
                    stack.push(p);
                }
            }
        }
        good
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalizeError {
    #[error("the transition system and the local specification use different alphabets")]
    AlphabetMismatch,
}

/// The product of an extended transition system with a local specification,
/// together with the pair each product state stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSpec {
    pub automaton: MixedBuchiAutomaton<Property>,
    /// `(extended TS state, specification state)` per product state.
    pub origin: Vec<(usize, StateId)>,
}

impl LocalSpec {
    /// Transition-system state of a product state; `None` for `Start`.
    pub fn ts_state(&self, t_hat: &ExtendedTransitionSystem, q: StateId) -> Option<usize> {
        let s = self.origin[q].0;
        (s != t_hat.start()).then_some(s)
    }
}

/// Words of `b_i` that some trajectory of the transition system generates.
///
/// A step from `(s, q)` to `(s', q')` reads `h(s')` and needs `s → s'` and
/// `q' ∈ δ(q, h(s'))`. Acceptance follows the specification component.
/// States that are unreachable or cannot reach acceptance are removed.
pub fn implementable_local(
    t_hat: &ExtendedTransitionSystem,
    b_i: &MixedBuchiAutomaton<Property>,
) -> Result<LocalSpec, LocalizeError> {
    if !b_i.alphabet().iter().eq(t_hat.inner().alphabet().iter()) {
        return Err(LocalizeError::AlphabetMismatch);
    }
    let letter_of: Vec<usize> = (0..t_hat.inner().num_states())
        .map(|s| {
            b_i.letter_index(t_hat.inner().label(s))
                .expect("labels lie in the alphabet")
        })
        .collect();

    let mut builder = Builder::new(b_i.alphabet().iter().cloned());
    let mut ids: HashMap<(usize, StateId), StateId> = HashMap::new();
    let mut origin = Vec::new();
    let mut finitary = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |key: (usize, StateId), builder: &mut Builder<Property>, queue: &mut VecDeque<_>| {
        *ids.entry(key).or_insert_with(|| {
            let id = builder.add_state(b_i.is_accepting(key.1));
            if b_i.is_finitary(key.1) {
                finitary.push(id);
            }
            origin.push(key);
            queue.push_back((key, id));
            id
        })
    };
    for &q in b_i.initial() {
        let id = intern((t_hat.start(), q), &mut builder, &mut queue);
        builder.set_initial(id);
    }
    while let Some(((s, q), from)) = queue.pop_front() {
        for &s2 in t_hat.successors(s) {
            let li = letter_of[s2];
            for q2 in b_i.successors(q, li) {
                let to = intern((s2, q2), &mut builder, &mut queue);
                builder.add_edge_index(from, li, to);
            }
        }
    }
    debug_assert!(origin.len() <= t_hat.num_states() * b_i.num_states());
    let full = MixedBuchiAutomaton::new(builder.build(), finitary).expect("finitary states stay terminal");
    let (automaton, map) = full.trim();
    let mut pruned_origin = vec![(0, 0); automaton.num_states()];
    for (old, new) in map.iter().enumerate() {
        if let Some(new) = new {
            pruned_origin[*new] = origin[old];
        }
    }
    Ok(LocalSpec {
        automaton,
        origin: pruned_origin,
    })
}
