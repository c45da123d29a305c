//! Logical execution of cc-strategies.
//!
//! Each step a seeded scheduler picks one moving agent. An agent whose next
//! state carries an individual property enters it at once. An agent whose
//! next state carries a shared property broadcasts it and waits; when every
//! owner of that property is broadcasting it, all of them enter their states
//! in one event and the property is satisfied once.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automata::word_automaton;
use crate::closure::{AgentId, Distribution};
use crate::compose::sync_product;
use crate::formula::Property;
use crate::localize::TransitionSystem;
use crate::synthesize::CcStrategy;
use crate::word::LassoWord;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Phase {
    /// Free to take its next step.
    Moving,
    /// Broadcasting `property` until every other owner broadcasts it too.
    WaitingFor {
        property: Property,
        agents: BTreeSet<AgentId>,
    },
    /// Reached the end of a finite run.
    Done,
}

/// One agent under simulation; `cursor` counts the states entered so far.
#[derive(Clone, Debug)]
pub struct AgentProcess {
    pub agent: AgentId,
    pub cursor: usize,
    pub phase: Phase,
    states: Vec<String>,
    labels: Vec<Property>,
    prefix_len: usize,
}

impl AgentProcess {
    fn new(strategy: &CcStrategy, ts: &TransitionSystem) -> Self {
        let states: Vec<String> = strategy.run.letters().cloned().collect();
        let labels = states
            .iter()
            .map(|s| {
                let i = ts.state_index(s).expect("strategy names a state of its system");
                ts.label(i).clone()
            })
            .collect();
        let phase = if states.is_empty() { Phase::Done } else { Phase::Moving };
        AgentProcess {
            agent: strategy.agent.clone(),
            cursor: 0,
            phase,
            states,
            labels,
            prefix_len: strategy.run.prefix.len(),
        }
    }

    /// Folded index of the state entered next.
    fn position(&self) -> usize {
        let period = self.states.len() - self.prefix_len;
        if self.cursor < self.prefix_len || period == 0 {
            self.cursor
        } else {
            self.prefix_len + (self.cursor - self.prefix_len) % period
        }
    }

    fn next_state(&self) -> &str {
        &self.states[self.position()]
    }

    fn next_label(&self) -> &Property {
        &self.labels[self.position()]
    }

    fn advance(&mut self) {
        self.cursor += 1;
        let finite = self.states.len() == self.prefix_len;
        self.phase = if finite && self.cursor >= self.states.len() {
            Phase::Done
        } else {
            Phase::Moving
        };
    }
}

/// An agent entering a state. Agents released by one barrier share the
/// event index; a waiting agent announces its sync state without a property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub index: usize,
    pub agent: AgentId,
    pub state: String,
    pub property: Option<Property>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    RunningBoundReached,
    AllFinished,
    /// Every unfinished agent waits; each entry names a waiting agent, the
    /// property it broadcasts, and the owners it still waits for.
    Deadlock(Vec<(AgentId, Property, Vec<AgentId>)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimTrace {
    pub seed: u64,
    pub events: Vec<Event>,
    /// Properties satisfied, in order.
    pub word: Vec<Property>,
    pub outcome: Outcome,
}

impl SimTrace {
    /// Line-delimited records `event_index agent_id state property_or_dash`.
    pub fn to_lines(&self) -> String {
        let mut s = String::new();
        for e in &self.events {
            let p = e.property.as_ref().map_or("-", Property::as_str);
            let _ = writeln!(s, "{} {} {} {}", e.index, e.agent, e.state, p);
        }
        s
    }

    /// The satisfied word without the properties rejected by `keep`.
    pub fn filtered_word(&self, keep: impl Fn(&Property) -> bool) -> Vec<Property> {
        self.word.iter().filter(|p| keep(p)).cloned().collect()
    }

    pub fn is_deadlock(&self) -> bool {
        matches!(self.outcome, Outcome::Deadlock(_))
    }
}

/// Simulates until every agent finishes, a deadlock occurs, or `max_events`
/// properties have been satisfied.
///
/// `systems` follows the agent order of `d`; strategies are matched by agent
/// id.
pub fn run_simulation(
    strategies: &[CcStrategy],
    systems: &[TransitionSystem],
    d: &Distribution,
    seed: u64,
    max_events: usize,
) -> SimTrace {
    let mut procs: Vec<AgentProcess> = d
        .agents()
        .iter()
        .zip(systems)
        .map(|(id, ts)| {
            let s = strategies
                .iter()
                .find(|s| &s.agent == id)
                .expect("a strategy per agent");
            AgentProcess::new(s, ts)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = Vec::new();
    let mut word = Vec::new();

    let outcome = loop {
        if word.len() >= max_events {
            break Outcome::RunningBoundReached;
        }
        let moving: Vec<usize> = (0..procs.len())
            .filter(|&i| procs[i].phase == Phase::Moving)
            .collect();
        if moving.is_empty() {
            if procs.iter().all(|p| p.phase == Phase::Done) {
                break Outcome::AllFinished;
            }
            break Outcome::Deadlock(waiting_graph(&procs));
        }
        let i = moving[rng.gen_range(0..moving.len())];
        let index = word.len();
        let property = procs[i].next_label().clone();
        let owners = d.owners(&property);
        if owners.len() < 2 {
            events.push(Event {
                index,
                agent: procs[i].agent.clone(),
                state: procs[i].next_state().to_string(),
                property: Some(property.clone()),
            });
            word.push(property);
            procs[i].advance();
            continue;
        }
        let ready = |p: &AgentProcess| matches!(&p.phase, Phase::WaitingFor { property: q, .. } if *q == property);
        let others_ready = owners.iter().filter(|&&j| j != i).all(|&j| ready(&procs[j]));
        if others_ready {
            for &j in &owners {
                events.push(Event {
                    index,
                    agent: procs[j].agent.clone(),
                    state: procs[j].next_state().to_string(),
                    property: Some(property.clone()),
                });
                procs[j].advance();
            }
            word.push(property);
        } else {
            events.push(Event {
                index,
                agent: procs[i].agent.clone(),
                state: procs[i].next_state().to_string(),
                property: None,
            });
            procs[i].phase = Phase::WaitingFor {
                property,
                agents: BTreeSet::new(),
            };
        }
        refresh_waiting(&mut procs, d);
    };
    SimTrace {
        seed,
        events,
        word,
        outcome,
    }
}

/// Recomputes, for every waiting agent, the owners not yet broadcasting.
fn refresh_waiting(procs: &mut [AgentProcess], d: &Distribution) {
    let broadcasting: BTreeMap<usize, Property> = procs
        .iter()
        .enumerate()
        .filter_map(|(i, p)| match &p.phase {
            Phase::WaitingFor { property, .. } => Some((i, property.clone())),
            _ => None,
        })
        .collect();
    for (&i, property) in &broadcasting {
        let missing = d
            .owners(property)
            .into_iter()
            .filter(|j| *j != i && broadcasting.get(j) != Some(property))
            .map(|j| procs[j].agent.clone())
            .collect();
        procs[i].phase = Phase::WaitingFor {
            property: property.clone(),
            agents: missing,
        };
    }
}

fn waiting_graph(procs: &[AgentProcess]) -> Vec<(AgentId, Property, Vec<AgentId>)> {
    procs
        .iter()
        .filter_map(|p| match &p.phase {
            Phase::WaitingFor { property, agents } => {
                Some((p.agent.clone(), property.clone(), agents.iter().cloned().collect()))
            }
            _ => None,
        })
        .collect()
}

/// Whether the satisfied word of `trace` is a prefix of some word of the
/// product of `words`, the local word of each agent in the order of `d`.
pub fn check_prefix_consistency(trace: &SimTrace, words: &[LassoWord<Property>], d: &Distribution) -> bool {
    let components = words
        .iter()
        .enumerate()
        .map(|(i, w)| word_automaton(w, d.alphabet(i).iter().cloned()).expect("word over the agent alphabet"))
        .collect();
    let product = sync_product(components).expect("at least one agent");
    let mut current = product.initial_states();
    for letter in &trace.word {
        current = product.post(&current, letter);
        if current.is_empty() {
            return false;
        }
    }
    true
}
