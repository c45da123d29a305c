//! Büchi and mixed Büchi automata over an arbitrary letter type.
//!
//! States are dense integers assigned in construction order, and every
//! traversal visits them in id order, so all derived objects (products,
//! witnesses, DOT text) are reproducible.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write as _};
use std::ops::Deref;

use thiserror::Error;

use crate::graph::{self, LabeledGraph};
use crate::word::{LassoWord, Symbol};

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("letter `{0}` is not in the automaton alphabet")]
    UnknownLetter(String),
    #[error("automata do not share one alphabet")]
    AlphabetMismatch,
    #[error("cannot intersect an empty list of automata")]
    NothingToIntersect,
    #[error("finitary accepting state {0} has outgoing transitions")]
    NonTerminalFinitary(StateId),
    #[error("state {0} is out of range")]
    NoSuchState(StateId),
}

/// A Büchi automaton `(Q, Q_in, Σ, δ, F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuchiAutomaton<L> {
    alphabet: Vec<L>,
    initial: Vec<StateId>,
    accepting: Vec<bool>,
    /// Per state, `(letter index, target)` sorted and deduplicated.
    edges: Vec<Vec<(usize, StateId)>>,
}

/// Incremental construction of a [`BuchiAutomaton`].
#[derive(Clone, Debug)]
pub struct Builder<L> {
    alphabet: Vec<L>,
    initial: BTreeSet<StateId>,
    accepting: Vec<bool>,
    edges: Vec<Vec<(usize, StateId)>>,
}

impl<L: Symbol> Builder<L> {
    pub fn new(alphabet: impl IntoIterator<Item = L>) -> Self {
        let alphabet: BTreeSet<L> = alphabet.into_iter().collect();
        Builder {
            alphabet: alphabet.into_iter().collect(),
            initial: BTreeSet::new(),
            accepting: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &[L] {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn add_state(&mut self, accepting: bool) -> StateId {
        self.accepting.push(accepting);
        self.edges.push(Vec::new());
        self.accepting.len() - 1
    }

    pub fn set_initial(&mut self, q: StateId) {
        assert!(q < self.num_states(), "state {q} out of range");
        self.initial.insert(q);
    }

    pub fn set_accepting(&mut self, q: StateId, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn letter_index(&self, letter: &L) -> Option<usize> {
        self.alphabet.binary_search(letter).ok()
    }

    pub fn add_edge(&mut self, from: StateId, letter: &L, to: StateId) -> Result<(), AutomatonError> {
        let li = self
            .letter_index(letter)
            .ok_or_else(|| AutomatonError::UnknownLetter(letter.to_string()))?;
        self.add_edge_index(from, li, to);
        Ok(())
    }

    /// Adds an edge by letter index into [`Builder::alphabet`].
    pub fn add_edge_index(&mut self, from: StateId, letter: usize, to: StateId) {
        assert!(from < self.num_states() && to < self.num_states());
        assert!(letter < self.alphabet.len());
        self.edges[from].push((letter, to));
    }

    pub fn build(mut self) -> BuchiAutomaton<L> {
        for e in &mut self.edges {
            e.sort_unstable();
            e.dedup();
        }
        BuchiAutomaton {
            alphabet: self.alphabet,
            initial: self.initial.into_iter().collect(),
            accepting: self.accepting,
            edges: self.edges,
        }
    }
}

impl<L: Symbol> BuchiAutomaton<L> {
    pub fn alphabet(&self) -> &[L] {
        &self.alphabet
    }

    pub fn letter(&self, index: usize) -> &L {
        &self.alphabet[index]
    }

    pub fn letter_index(&self, letter: &L) -> Option<usize> {
        self.alphabet.binary_search(letter).ok()
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.num_states()).filter(|&q| self.accepting[q])
    }

    /// Out-edges of `q` as `(letter index, target)`, sorted.
    pub fn edges(&self, q: StateId) -> &[(usize, StateId)] {
        &self.edges[q]
    }

    /// Targets of `q` on the letter with index `letter`.
    pub fn successors(&self, q: StateId, letter: usize) -> impl Iterator<Item = StateId> + '_ {
        let e = &self.edges[q];
        let lo = e.partition_point(|&(l, _)| l < letter);
        let hi = e.partition_point(|&(l, _)| l <= letter);
        e[lo..hi].iter().map(|&(_, t)| t)
    }

    /// Targets of `q` on `letter`; empty for letters outside the alphabet.
    pub fn successors_on(&self, q: StateId, letter: &L) -> Vec<StateId> {
        match self.letter_index(letter) {
            Some(li) => self.successors(q, li).collect(),
            None => Vec::new(),
        }
    }

    /// Rebuilds the automaton over a different letter type, or a different
    /// alphabet. Each edge is copied once per letter returned by `map`.
    pub fn relabel<M: Symbol>(
        &self,
        alphabet: impl IntoIterator<Item = M>,
        mut map: impl FnMut(&L) -> Vec<M>,
    ) -> BuchiAutomaton<M> {
        let mut b = Builder::new(alphabet);
        for q in 0..self.num_states() {
            b.add_state(self.accepting[q]);
        }
        for &q in &self.initial {
            b.set_initial(q);
        }
        for q in 0..self.num_states() {
            for &(li, t) in &self.edges[q] {
                for m in map(&self.alphabet[li]) {
                    let mi = b.letter_index(&m).expect("relabelled letter outside alphabet");
                    b.add_edge_index(q, mi, t);
                }
            }
        }
        b.build()
    }

    /// An accepted lasso, or `None` when the language is empty.
    ///
    /// Among reachable nontrivial SCCs containing an accepting state, the
    /// accepting state with the smallest id is chosen; the prefix is a
    /// shortest path to it and the period a shortest cycle through it.
    pub fn accepting_lasso(&self) -> Option<LassoWord<L>> {
        let sccs = graph::tarjan(self, &self.initial);
        let mut best: Option<(StateId, usize)> = None;
        for (k, scc) in sccs.iter().enumerate() {
            if !graph::is_nontrivial(self, scc) {
                continue;
            }
            if let Some(&q) = scc.iter().find(|&&q| self.accepting[q]) {
                if best.is_none_or(|(b, _)| q < b) {
                    best = Some((q, k));
                }
            }
        }
        let (target, k) = best?;
        let mut in_scc = vec![false; self.num_states()];
        for &q in &sccs[k] {
            in_scc[q] = true;
        }
        let (_, prefix) = graph::bfs_path(self, &self.initial, false, |q| q == target, |_| true)?;
        let (_, cycle) = graph::bfs_path(self, &[target], true, |q| q == target, |q| in_scc[q])?;
        Some(LassoWord::new(
            prefix.iter().map(|&(l, _)| self.alphabet[l].clone()).collect(),
            cycle.iter().map(|&(l, _)| self.alphabet[l].clone()).collect(),
        ))
    }

    pub fn is_empty(&self) -> bool {
        self.accepting_lasso().is_none()
    }

    /// Membership of a lasso or finite word; finite words are never accepted
    /// by a plain Büchi automaton.
    pub fn accepts(&self, w: &LassoWord<L>) -> bool {
        accepts_infinite(self, w)
    }

    /// States that are reachable and can still reach an accepting cycle,
    /// or one of the `extra_targets`.
    fn useful(&self, extra_targets: &[bool]) -> Vec<bool> {
        let n = self.num_states();
        let reach = graph::reachable(self, &self.initial);
        let mut good = vec![false; n];
        for scc in graph::tarjan(self, &self.initial) {
            if graph::is_nontrivial(self, &scc) && scc.iter().any(|&q| self.accepting[q]) {
                for q in scc {
                    good[q] = true;
                }
            }
        }
        for q in 0..n {
            if extra_targets.get(q).copied().unwrap_or(false) {
                good[q] = true;
            }
        }
        // backward closure
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for q in 0..n {
            for &(_, t) in &self.edges[q] {
                preds[t].push(q);
            }
        }
        let mut stack: Vec<StateId> = (0..n).filter(|&q| good[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &preds[q] {
                if !good[p] {
                    good[p] = true;
                    stack.push(p);
                }
            }
        }
        (0..n).map(|q| good[q] && reach[q]).collect()
    }

    /// Removes unreachable states and states that cannot reach an accepting
    /// cycle. Survivors are renumbered in breadth-first discovery order.
    /// Returns the new automaton and the old-to-new id map.
    pub fn trim(&self) -> (BuchiAutomaton<L>, Vec<Option<StateId>>) {
        let keep = self.useful(&[]);
        self.restrict(&keep)
    }

    fn restrict(&self, keep: &[bool]) -> (BuchiAutomaton<L>, Vec<Option<StateId>>) {
        let n = self.num_states();
        let mut map: Vec<Option<StateId>> = vec![None; n];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        for &q in &self.initial {
            if keep[q] && map[q].is_none() {
                map[q] = Some(order.len());
                order.push(q);
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            for &(_, t) in &self.edges[q] {
                if keep[t] && map[t].is_none() {
                    map[t] = Some(order.len());
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        let mut b = Builder::new(self.alphabet.iter().cloned());
        for &q in &order {
            b.add_state(self.accepting[q]);
        }
        for &q in &self.initial {
            if let Some(nq) = map[q] {
                b.set_initial(nq);
            }
        }
        for &q in &order {
            let nq = map[q].expect("kept");
            for &(l, t) in &self.edges[q] {
                if let Some(nt) = map[t] {
                    b.add_edge_index(nq, l, nt);
                }
            }
        }
        (b.build(), map)
    }

    pub fn to_dot(&self) -> String {
        dot(self, &vec![false; self.num_states()])
    }
}

impl<L> LabeledGraph for BuchiAutomaton<L> {
    fn node_count(&self) -> usize {
        self.accepting.len()
    }
    fn out_edges(&self, node: usize) -> &[(usize, usize)] {
        &self.edges[node]
    }
}

fn accepts_infinite<L: Symbol>(b: &BuchiAutomaton<L>, w: &LassoWord<L>) -> bool {
    if w.is_finite() || w.letters().any(|l| b.letter_index(l).is_none()) {
        return false;
    }
    let word = word_automaton(w, b.alphabet().iter().cloned()).expect("letters checked");
    let product = intersect(&[b, &word.buchi]).expect("same alphabet");
    !product.is_empty()
}

/// A Büchi automaton with an extra set of terminal finitary accepting states,
/// accepting finite words whose run ends in `F_fin`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedBuchiAutomaton<L> {
    buchi: BuchiAutomaton<L>,
    finitary: Vec<bool>,
}

impl<L: Symbol> MixedBuchiAutomaton<L> {
    /// Fails if a finitary state has outgoing transitions.
    pub fn new(
        buchi: BuchiAutomaton<L>,
        finitary: impl IntoIterator<Item = StateId>,
    ) -> Result<Self, AutomatonError> {
        let mut mask = vec![false; buchi.num_states()];
        for q in finitary {
            if q >= mask.len() {
                return Err(AutomatonError::NoSuchState(q));
            }
            if !buchi.edges(q).is_empty() {
                return Err(AutomatonError::NonTerminalFinitary(q));
            }
            mask[q] = true;
        }
        Ok(MixedBuchiAutomaton {
            buchi,
            finitary: mask,
        })
    }

    pub fn buchi(&self) -> &BuchiAutomaton<L> {
        &self.buchi
    }

    pub fn into_buchi(self) -> BuchiAutomaton<L> {
        self.buchi
    }

    pub fn is_finitary(&self, q: StateId) -> bool {
        self.finitary[q]
    }

    pub fn finitary_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.num_states()).filter(|&q| self.finitary[q])
    }

    /// Membership: infinite words by the Büchi condition, finite words by a
    /// run ending in a finitary accepting state.
    pub fn accepts(&self, w: &LassoWord<L>) -> bool {
        if w.is_infinite() {
            return accepts_infinite(&self.buchi, w);
        }
        let mut current: BTreeSet<StateId> = self.initial().iter().copied().collect();
        for l in &w.prefix {
            let Some(li) = self.letter_index(l) else {
                return false;
            };
            current = current.iter().flat_map(|&q| self.successors(q, li)).collect();
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|&q| self.finitary[q])
    }

    /// Like [`BuchiAutomaton::trim`], also keeping states that can reach a
    /// finitary accepting state.
    pub fn trim(&self) -> (MixedBuchiAutomaton<L>, Vec<Option<StateId>>) {
        let keep = self.buchi.useful(&self.finitary);
        let (buchi, map) = self.buchi.restrict(&keep);
        let finitary = (0..self.num_states())
            .filter(|&q| self.finitary[q])
            .filter_map(|q| map[q]);
        let mixed = MixedBuchiAutomaton::new(buchi, finitary).expect("terminality is preserved");
        (mixed, map)
    }

    pub fn to_dot(&self) -> String {
        dot(&self.buchi, &self.finitary)
    }
    /// A language-equivalent automaton, usually smaller.
    ///
    /// States are merged when they simulate each other directly, an edge is
    /// dropped when a sibling edge on the same letter leads to a state that
    /// strictly simulates its target, and the result is trimmed. `p`
    /// simulates `q` when `p` is accepting (finitary) whenever `q` is and
    /// every move of `q` is matched by a move of `p` on the same letter into
    /// a state simulating the target.
    pub fn reduce(&self) -> MixedBuchiAutomaton<L> {
        let n = self.num_states();
        let sim = self.simulation();
        let le = |q: usize, p: usize| sim[q * n + p];
        let mut class = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for q in 0..n {
            if class[q] == usize::MAX {
                for p in q..n {
                    if class[p] == usize::MAX && le(q, p) && le(p, q) {
                        class[p] = reps.len();
                    }
                }
                reps.push(q);
            }
        }
        // among same-letter targets keep only those not strictly simulated
        let maximal = |targets: &mut Vec<usize>| {
            let all = targets.clone();
            targets.retain(|&t| !all.iter().any(|&u| u != t && le(reps[t], reps[u]) && !le(reps[u], reps[t])));
        };
        let mut b = Builder::new(self.alphabet().iter().cloned());
        for &r in &reps {
            b.add_state(self.is_accepting(r));
        }
        let mut init: Vec<usize> = self.initial().iter().map(|&q| class[q]).collect();
        init.sort_unstable();
        init.dedup();
        maximal(&mut init);
        for c in init {
            b.set_initial(c);
        }
        for q in 0..n {
            let edges = self.edges(q);
            let mut i = 0;
            while i < edges.len() {
                let letter = edges[i].0;
                let mut targets = Vec::new();
                while i < edges.len() && edges[i].0 == letter {
                    targets.push(class[edges[i].1]);
                    i += 1;
                }
                targets.sort_unstable();
                targets.dedup();
                maximal(&mut targets);
                for t in targets {
                    b.add_edge_index(class[q], letter, t);
                }
            }
        }
        let finitary = (0..reps.len()).filter(|&c| self.finitary[reps[c]]);
        let quotient = MixedBuchiAutomaton::new(b.build(), finitary).expect("finitary classes stay terminal");
        quotient.trim().0
    }

    /// Direct simulation as an `n × n` row-major matrix: entry `q * n + p`
    /// tells whether `p` simulates `q`.
    fn simulation(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut sim = vec![false; n * n];
        for q in 0..n {
            for p in 0..n {
                sim[q * n + p] = (!self.is_accepting(q) || self.is_accepting(p))
                    && (!self.finitary[q] || self.finitary[p]);
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..n {
                for p in 0..n {
                    if !sim[q * n + p] || p == q {
                        continue;
                    }
                    let matched = self.edges(q).iter().all(|&(l, q2)| {
                        self.successors(p, l).any(|p2| sim[q2 * n + p2])
                    });
                    if !matched {
                        sim[q * n + p] = false;
                        changed = true;
                    }
                }
            }
        }
        sim
    }
}

impl<L> Deref for MixedBuchiAutomaton<L> {
    type Target = BuchiAutomaton<L>;
    fn deref(&self) -> &BuchiAutomaton<L> {
        &self.buchi
    }
}

impl<L> From<BuchiAutomaton<L>> for MixedBuchiAutomaton<L> {
    fn from(buchi: BuchiAutomaton<L>) -> Self {
        let finitary = vec![false; buchi.accepting.len()];
        MixedBuchiAutomaton { buchi, finitary }
    }
}

/// Product accepting the intersection of the input languages.
///
/// States are `(q_1, …, q_n, c)`; the counter `c` advances past component `c`
/// whenever that component is in an accepting state, and a product state is
/// accepting when `c = 0` and component 0 accepts. Only reachable states are
/// built, in breadth-first order.
pub fn intersect<L: Symbol>(automata: &[&BuchiAutomaton<L>]) -> Result<BuchiAutomaton<L>, AutomatonError> {
    let first = automata.first().ok_or(AutomatonError::NothingToIntersect)?;
    if automata.iter().any(|a| a.alphabet != first.alphabet) {
        return Err(AutomatonError::AlphabetMismatch);
    }
    let n = automata.len();
    let mut ids: HashMap<(Vec<StateId>, usize), StateId> = HashMap::new();
    let mut states: Vec<(Vec<StateId>, usize)> = Vec::new();
    let mut b = Builder::new(first.alphabet.iter().cloned());
    let mut queue = VecDeque::new();

    let mut intern = |key: (Vec<StateId>, usize),
                      b: &mut Builder<L>,
                      states: &mut Vec<(Vec<StateId>, usize)>,
                      queue: &mut VecDeque<StateId>|
     -> StateId {
        if let Some(&id) = ids.get(&key) {
            return id;
        }
        let acc = key.1 == 0 && automata[0].accepting[key.0[0]];
        let id = b.add_state(acc);
        ids.insert(key.clone(), id);
        states.push(key);
        queue.push_back(id);
        id
    };

    for tuple in cartesian(&automata.iter().map(|a| a.initial.clone()).collect::<Vec<_>>()) {
        let id = intern((tuple, 0), &mut b, &mut states, &mut queue);
        b.set_initial(id);
    }

    while let Some(id) = queue.pop_front() {
        let (tuple, c) = states[id].clone();
        let next_c = if automata[c].accepting[tuple[c]] { (c + 1) % n } else { c };
        let head = &automata[0].edges[tuple[0]];
        let mut i = 0;
        while i < head.len() {
            let letter = head[i].0;
            while i < head.len() && head[i].0 == letter {
                i += 1;
            }
            let mut options: Vec<Vec<StateId>> = Vec::with_capacity(n);
            options.push(automata[0].successors(tuple[0], letter).collect());
            for (k, a) in automata.iter().enumerate().skip(1) {
                options.push(a.successors(tuple[k], letter).collect());
            }
            if options.iter().any(Vec::is_empty) {
                continue;
            }
            for next in cartesian(&options) {
                let to = intern((next, next_c), &mut b, &mut states, &mut queue);
                b.add_edge_index(id, letter, to);
            }
        }
    }
    Ok(b.build())
}

/// All tuples picking one element from each list, in lexicographic order.
pub(crate) fn cartesian(lists: &[Vec<StateId>]) -> Vec<Vec<StateId>> {
    let mut out: Vec<Vec<StateId>> = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for &x in list {
                let mut t = prefix.clone();
                t.push(x);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// The automaton accepting exactly `w` over `alphabet`.
///
/// A lasso `u·v^ω` gives `|u| + |v|` chained states with the last one looping
/// back to the start of the period, which is accepting. A finite word `u`
/// gives `|u| + 1` states, the last one terminal and finitary accepting.
pub fn word_automaton<L: Symbol>(
    w: &LassoWord<L>,
    alphabet: impl IntoIterator<Item = L>,
) -> Result<MixedBuchiAutomaton<L>, AutomatonError> {
    let mut b = Builder::new(alphabet);
    let n = w.span();
    let states = if w.is_finite() { n + 1 } else { n };
    for i in 0..states {
        let acc = w.is_infinite() && i == w.prefix.len();
        b.add_state(acc);
    }
    b.set_initial(0);
    for i in 0..n {
        let to = if i + 1 < states { i + 1 } else { w.prefix.len() };
        b.add_edge(i, w.folded(i), to)?;
    }
    let finitary = if w.is_finite() { vec![n] } else { vec![] };
    MixedBuchiAutomaton::new(b.build(), finitary)
}

fn dot<L: fmt::Display>(b: &BuchiAutomaton<L>, finitary: &[bool]) -> String {
    let mut s = String::new();
    s.push_str("digraph automaton {\n");
    s.push_str("  rankdir=LR;\n");
    s.push_str("  node [shape=circle];\n");
    for q in 0..b.accepting.len() {
        let shape = if finitary[q] {
            "diamond"
        } else if b.accepting[q] {
            "doublecircle"
        } else {
            "circle"
        };
        let _ = writeln!(s, "  q{q} [shape={shape}];");
    }
    for (k, &q) in b.initial.iter().enumerate() {
        let _ = writeln!(s, "  init{k} [shape=point];");
        let _ = writeln!(s, "  init{k} -> q{q};");
    }
    for q in 0..b.accepting.len() {
        // group parallel edges into one arrow
        let mut by_target: Vec<(StateId, Vec<String>)> = Vec::new();
        for &(l, t) in &b.edges[q] {
            match by_target.iter_mut().find(|(x, _)| *x == t) {
                Some((_, labels)) => labels.push(b.alphabet[l].to_string()),
                None => by_target.push((t, vec![b.alphabet[l].to_string()])),
            }
        }
        by_target.sort_by_key(|(t, _)| *t);
        for (t, labels) in by_target {
            let label = labels.join(", ").replace('"', "\\\"");
            let _ = writeln!(s, "  q{q} -> q{t} [label=\"{label}\"];");
        }
    }
    s.push_str("}\n");
    s
}
