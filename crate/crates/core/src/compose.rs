//! Synchronous products of mixed Büchi automata and accepted-word search
//! under per-component mixed acceptance.
//!
//! On a letter `σ`, every component whose alphabet contains `σ` moves and the
//! others stay put. A word is accepted when each component accepts its own
//! projection: infinitely often through an accepting state if that
//! projection is infinite, or parked in a terminal finitary state if it is
//! finite.

use std::collections::{BTreeSet, HashMap};
use std::env;
use std::fmt::Write as _;

use thiserror::Error;

use crate::automata::{cartesian, word_automaton, MixedBuchiAutomaton, StateId};
use crate::graph::{self, LabeledGraph, Step};
use crate::word::{LassoWord, Symbol};

/// Default cap on materialized product states.
pub const DEFAULT_MAX_PRODUCT_STATES: usize = 5_000_000;

/// Environment variable overriding [`DEFAULT_MAX_PRODUCT_STATES`].
pub const MAX_PRODUCT_STATES_ENV: &str = "CCSYNTH_MAX_PRODUCT_STATES";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("a synchronous product needs at least one component")]
    NoComponents,
    #[error(
        "product exceeds {limit} states ({explored} built, {pending} still queued; component sizes {sizes:?})"
    )]
    TooLarge {
        limit: usize,
        explored: usize,
        pending: usize,
        sizes: Vec<usize>,
    },
}

/// The state cap from [`MAX_PRODUCT_STATES_ENV`], or the default.
pub fn max_product_states_from_env() -> usize {
    env::var(MAX_PRODUCT_STATES_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_PRODUCT_STATES)
}

/// An ordered list of components read synchronously.
#[derive(Clone, Debug)]
pub struct SyncProduct<L> {
    components: Vec<MixedBuchiAutomaton<L>>,
    alphabet: Vec<L>,
    /// `local[c][g]`: index in component `c` of global letter `g`.
    local: Vec<Vec<Option<usize>>>,
}

pub fn sync_product<L: Symbol>(components: Vec<MixedBuchiAutomaton<L>>) -> Result<SyncProduct<L>, ComposeError> {
    if components.is_empty() {
        return Err(ComposeError::NoComponents);
    }
    let alphabet: Vec<L> = components
        .iter()
        .flat_map(|c| c.alphabet().iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let local = components
        .iter()
        .map(|c| alphabet.iter().map(|l| c.letter_index(l)).collect())
        .collect();
    Ok(SyncProduct {
        components,
        alphabet,
        local,
    })
}

/// A product whose language is the intersection of both languages.
pub fn intersect_products<L: Symbol>(p1: &SyncProduct<L>, p2: &SyncProduct<L>) -> SyncProduct<L> {
    let components = p1.components.iter().chain(&p2.components).cloned().collect();
    sync_product(components).expect("both products are nonempty")
}

/// How a component takes part in an accepted word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentStatus {
    /// Its projection is infinite and visits its accepting states infinitely
    /// often.
    Infinitary,
    /// Its projection is finite and it rests in a finitary accepting state.
    Finished,
}

/// An accepted word together with the run that accepts it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness<L> {
    pub word: LassoWord<L>,
    /// Initial product state as a component tuple.
    pub initial: Vec<StateId>,
    /// Product state entered by each letter, aligned with `word`.
    pub entered: LassoWord<Vec<StateId>>,
    /// Projection of `word` onto each component alphabet.
    pub projections: Vec<LassoWord<L>>,
    pub statuses: Vec<ComponentStatus>,
    alphabets: Vec<BTreeSet<L>>,
}

impl<L: Symbol> Witness<L> {
    /// States component `c` enters on its own letters, aligned with
    /// `projections[c]`.
    pub fn component_run(&self, c: usize) -> LassoWord<StateId> {
        let pick = |range: std::ops::Range<usize>| -> Vec<StateId> {
            range
                .filter(|&k| self.alphabets[c].contains(self.word.folded(k)))
                .map(|k| self.entered.folded(k)[c])
                .collect()
        };
        let u = self.word.prefix.len();
        LassoWord::new(pick(0..u), pick(u..self.word.span()))
    }
}

/// Result of [`SyncProduct::explore`].
#[derive(Clone, Debug)]
pub struct Exploration<L> {
    pub witness: Option<Witness<L>>,
    pub states: usize,
    pub transitions: usize,
}

/// Explicit reachable part of a synchronous product.
#[derive(Clone, Debug)]
pub struct ProductGraph {
    width: usize,
    /// Component tuples, `width` entries per state.
    tuples: Vec<u32>,
    edges: Vec<Vec<(usize, usize)>>,
    initial: Vec<usize>,
}

impl ProductGraph {
    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn tuple(&self, p: usize) -> Vec<StateId> {
        self.tuples[p * self.width..(p + 1) * self.width]
            .iter()
            .map(|&q| q as StateId)
            .collect()
    }

    fn component(&self, p: usize, c: usize) -> StateId {
        self.tuples[p * self.width + c] as StateId
    }
}

impl LabeledGraph for ProductGraph {
    fn node_count(&self) -> usize {
        self.edges.len()
    }
    fn out_edges(&self, node: usize) -> &[(usize, usize)] {
        &self.edges[node]
    }
}

impl<L: Symbol> SyncProduct<L> {
    pub fn components(&self) -> &[MixedBuchiAutomaton<L>] {
        &self.components
    }

    pub fn alphabet(&self) -> &[L] {
        &self.alphabet
    }

    /// Upper bound `∏ |Q_i|` on the number of product states.
    pub fn state_bound(&self) -> u128 {
        self.components
            .iter()
            .fold(1u128, |acc, c| acc.saturating_mul(c.num_states() as u128))
    }

    /// Builds the reachable product breadth-first, failing once more than
    /// `limit` states exist.
    pub fn materialize(&self, limit: usize) -> Result<ProductGraph, ComposeError> {
        let width = self.components.len();
        let owners: Vec<Vec<(usize, usize)>> = (0..self.alphabet.len())
            .map(|g| {
                (0..width)
                    .filter_map(|c| self.local[c][g].map(|li| (c, li)))
                    .collect()
            })
            .collect();
        let mut ids: HashMap<Box<[u32]>, usize> = HashMap::new();
        let mut out = ProductGraph {
            width,
            tuples: Vec::new(),
            edges: Vec::new(),
            initial: Vec::new(),
        };
        let too_large = |explored: usize, pending: usize| ComposeError::TooLarge {
            limit,
            explored,
            pending,
            sizes: self.components.iter().map(|c| c.num_states()).collect(),
        };
        let mut intern = |tuple: Vec<u32>, out: &mut ProductGraph| -> Result<usize, ComposeError> {
            if let Some(&id) = ids.get(tuple.as_slice()) {
                return Ok(id);
            }
            let id = out.edges.len();
            if id >= limit {
                return Err(too_large(id, 0));
            }
            out.tuples.extend_from_slice(&tuple);
            out.edges.push(Vec::new());
            ids.insert(tuple.into_boxed_slice(), id);
            Ok(id)
        };

        let inits: Vec<Vec<StateId>> = self.components.iter().map(|c| c.initial().to_vec()).collect();
        for t in cartesian(&inits) {
            let id = intern(t.iter().map(|&q| q as u32).collect(), &mut out)?;
            if !out.initial.contains(&id) {
                out.initial.push(id);
            }
        }
        let mut next = 0;
        while next < out.edges.len() {
            let p = next;
            next += 1;
            let tuple: Vec<StateId> = out.tuple(p);
            let mut edges = Vec::new();
            for (g, own) in owners.iter().enumerate() {
                let options: Vec<Vec<StateId>> = own
                    .iter()
                    .map(|&(c, li)| self.components[c].successors(tuple[c], li).collect())
                    .collect();
                if options.iter().any(Vec::is_empty) {
                    continue;
                }
                for choice in cartesian(&options) {
                    let mut t: Vec<u32> = tuple.iter().map(|&q| q as u32).collect();
                    for (&(c, _), &q) in own.iter().zip(&choice) {
                        t[c] = q as u32;
                    }
                    let before = out.edges.len();
                    let id = intern(t, &mut out).map_err(|_| too_large(before, before - next))?;
                    edges.push((g, id));
                }
            }
            edges.sort_unstable();
            edges.dedup();
            out.edges[p] = edges;
        }
        assert!(
            (out.num_states() as u128) <= self.state_bound(),
            "product larger than the product of component sizes"
        );
        Ok(out)
    }

    /// An accepted word, or `None` when the language is empty, using the
    /// state cap from the environment.
    pub fn find_accepted_word(&self) -> Result<Option<Witness<L>>, ComposeError> {
        self.find_accepted_word_with(max_product_states_from_env())
    }

    /// As [`SyncProduct::find_accepted_word`] with an explicit state cap.
    ///
    /// A finite word is returned when one exists: the shortest path to a
    /// state where every component is finitary. Otherwise the reachable SCCs
    /// are scanned in order of their smallest state; an SCC is accepting when
    /// each component either moves inside it and meets one of its accepting
    /// states there, or never moves inside it and rests in a finitary state.
    pub fn find_accepted_word_with(&self, limit: usize) -> Result<Option<Witness<L>>, ComposeError> {
        Ok(self.explore(limit)?.witness)
    }

    /// Materializes the product and searches it, reporting its size.
    pub fn explore(&self, limit: usize) -> Result<Exploration<L>, ComposeError> {
        let g = self.materialize(limit)?;
        Ok(Exploration {
            witness: self.search(&g),
            states: g.num_states(),
            transitions: g.num_transitions(),
        })
    }

    fn search(&self, g: &ProductGraph) -> Option<Witness<L>> {
        let width = self.components.len();
        let all_finished = |p: usize| (0..width).all(|c| self.components[c].is_finitary(g.component(p, c)));
        if let Some((origin, path)) = graph::bfs_path(g, &g.initial, false, all_finished, |_| true) {
            return Some(self.witness(g, origin, &path, &[], vec![ComponentStatus::Finished; width]));
        }

        let mut sccs: Vec<Vec<usize>> = graph::tarjan(g, &g.initial)
            .into_iter()
            .filter(|s| graph::is_nontrivial(g, s))
            .collect();
        sccs.sort_by_key(|s| s[0]);
        let mut in_scc = vec![false; g.num_states()];
        for scc in sccs {
            for &p in &scc {
                in_scc[p] = true;
            }
            if let Some(w) = self.accepting_cycle(g, &scc, &in_scc) {
                return Some(w);
            }
            for &p in &scc {
                in_scc[p] = false;
            }
        }
        None
    }

    fn moves(&self, c: usize, letter: usize) -> bool {
        self.local[c][letter].is_some()
    }

    fn accepting_cycle(&self, g: &ProductGraph, scc: &[usize], in_scc: &[bool]) -> Option<Witness<L>> {
        let width = self.components.len();
        let mut moving = vec![false; width];
        for &p in scc {
            for &(l, t) in g.out_edges(p) {
                if in_scc[t] {
                    for (c, m) in moving.iter_mut().enumerate() {
                        *m |= self.moves(c, l);
                    }
                }
            }
        }
        for c in 0..width {
            let comp = &self.components[c];
            let ok = if moving[c] {
                scc.iter().any(|&p| comp.is_accepting(g.component(p, c)))
            } else {
                comp.is_finitary(g.component(scc[0], c))
            };
            if !ok {
                return None;
            }
        }

        let entry = scc[0];
        let (origin, prefix) = graph::bfs_path(g, &g.initial, false, |p| p == entry, |_| true)?;
        let mut cycle: Vec<Step> = Vec::new();
        let mut cur = entry;
        let extend = |cycle: &mut Vec<Step>, cur: &mut usize, path: Vec<Step>| {
            if let Some(&(_, last)) = path.last() {
                *cur = last;
            }
            cycle.extend(path);
        };
        for c in (0..width).filter(|&c| moving[c]) {
            let comp = &self.components[c];
            let seen_accepting = |cycle: &[Step]| {
                comp.is_accepting(g.component(entry, c))
                    || cycle.iter().any(|&(_, p)| comp.is_accepting(g.component(p, c)))
            };
            if !seen_accepting(&cycle) {
                let (_, path) = graph::bfs_path(
                    g,
                    &[cur],
                    false,
                    |p| comp.is_accepting(g.component(p, c)),
                    |p| in_scc[p],
                )?;
                extend(&mut cycle, &mut cur, path);
            }
            if !cycle.iter().any(|&(l, _)| self.moves(c, l)) {
                let has_move =
                    |p: usize| g.out_edges(p).iter().any(|&(l, t)| in_scc[t] && self.moves(c, l));
                let (_, mut path) = graph::bfs_path(g, &[cur], false, has_move, |p| in_scc[p])?;
                let from = path.last().map_or(cur, |&(_, p)| p);
                let step = *g
                    .out_edges(from)
                    .iter()
                    .find(|&&(l, t)| in_scc[t] && self.moves(c, l))
                    .expect("chosen for its moving edge");
                path.push(step);
                extend(&mut cycle, &mut cur, path);
            }
        }
        let (_, back) = graph::bfs_path(g, &[cur], cycle.is_empty(), |p| p == entry, |p| in_scc[p])?;
        cycle.extend(back);
        let statuses = moving
            .iter()
            .map(|&m| {
                if m {
                    ComponentStatus::Infinitary
                } else {
                    ComponentStatus::Finished
                }
            })
            .collect();
        Some(self.witness(g, origin, &prefix, &cycle, statuses))
    }

    fn witness(
        &self,
        g: &ProductGraph,
        origin: usize,
        prefix: &[Step],
        cycle: &[Step],
        statuses: Vec<ComponentStatus>,
    ) -> Witness<L> {
        let letters = |steps: &[Step]| steps.iter().map(|&(l, _)| self.alphabet[l].clone()).collect();
        let states = |steps: &[Step]| steps.iter().map(|&(_, p)| g.tuple(p)).collect();
        let word = LassoWord::new(letters(prefix), letters(cycle));
        let projections = (0..self.components.len())
            .map(|c| word.project(|l| self.components[c].letter_index(l).is_some()))
            .collect();
        Witness {
            word,
            initial: g.tuple(origin),
            entered: LassoWord::new(states(prefix), states(cycle)),
            projections,
            statuses,
            alphabets: self
                .components
                .iter()
                .map(|c| c.alphabet().iter().cloned().collect())
                .collect(),
        }
    }

    /// DOT text of the reachable product; nodes are labelled with their
    /// component tuples.
    pub fn to_dot(&self, limit: usize) -> Result<String, ComposeError> {
        let g = self.materialize(limit)?;
        let mut s = String::from("digraph product {\n  rankdir=LR;\n  node [shape=box];\n");
        for p in 0..g.num_states() {
            let tuple: Vec<String> = g.tuple(p).iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "  p{p} [label=\"({})\"];", tuple.join(","));
        }
        for (k, &p) in g.initial.iter().enumerate() {
            let _ = writeln!(s, "  init{k} [shape=point];\n  init{k} -> p{p};");
        }
        for p in 0..g.num_states() {
            for &(l, t) in g.out_edges(p) {
                let label = self.alphabet[l].to_string().replace('"', "\\\"");
                let _ = writeln!(s, "  p{p} -> p{t} [label=\"{label}\"];");
            }
        }
        s.push_str("}\n");
        Ok(s)
    }

    /// Initial product states as component tuples.
    pub fn initial_states(&self) -> BTreeSet<Vec<StateId>> {
        let inits: Vec<Vec<StateId>> = self.components.iter().map(|c| c.initial().to_vec()).collect();
        cartesian(&inits).into_iter().collect()
    }

    /// Product states reachable from `from` by reading `letter`; empty for a
    /// letter outside the product alphabet.
    pub fn post(&self, from: &BTreeSet<Vec<StateId>>, letter: &L) -> BTreeSet<Vec<StateId>> {
        let Ok(g) = self.alphabet.binary_search(letter) else {
            return BTreeSet::new();
        };
        let mut out = BTreeSet::new();
        for tuple in from {
            let owners: Vec<(usize, usize)> = (0..self.components.len())
                .filter_map(|c| self.local[c][g].map(|li| (c, li)))
                .collect();
            let options: Vec<Vec<StateId>> = owners
                .iter()
                .map(|&(c, li)| self.components[c].successors(tuple[c], li).collect())
                .collect();
            for choice in cartesian(&options) {
                let mut t = tuple.clone();
                for (&(c, _), &q) in owners.iter().zip(&choice) {
                    t[c] = q;
                }
                out.insert(t);
            }
        }
        out
    }

    pub fn is_empty(&self) -> Result<bool, ComposeError> {
        Ok(self.find_accepted_word()?.is_none())
    }

    /// Membership of `w`, decided by adding the automaton of `w` as one more
    /// component over the whole product alphabet.
    pub fn accepts(&self, w: &LassoWord<L>) -> Result<bool, ComposeError> {
        if w.letters().any(|l| self.alphabet.binary_search(l).is_err()) {
            return Ok(false);
        }
        let word = word_automaton(w, self.alphabet.iter().cloned()).expect("letters checked");
        let mut components = self.components.clone();
        components.push(word);
        let p = sync_product(components)?;
        Ok(p.find_accepted_word()?.is_some())
    }
}
