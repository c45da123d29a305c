//! The synthesis pipeline and an independent check of its guarantees.
//!
//! Synthesis translates the specification and its negation, checks trace
//! closure, localizes the specification per agent, searches the product of
//! the local specifications with the global automaton for an accepted word,
//! and turns each projection of that word into a trajectory of the agent.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automata::{word_automaton, BuchiAutomaton, MixedBuchiAutomaton};
use crate::closure::{is_trace_closed, project, AgentId, ClosureError, ClosureVerdict, Distribution};
use crate::compose::{intersect_products, max_product_states_from_env, sync_product, ComposeError};
use crate::formula::{Ltl, Property};
use crate::localize::{extend_with_start, implementable_local, project_spec, LocalizeError, TransitionSystem};
use crate::model::{StrategiesFile, StrategyEntry, SyncPointEntry};
use crate::translate::{ltl_to_buchi, ltl_to_buchi_negated};
use crate::word::LassoWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("{systems} transition systems given for {agents} agents")]
    AgentCount { agents: usize, systems: usize },
    #[error("transition system of agent `{0}` uses a different alphabet than the distribution")]
    AlphabetMismatch(AgentId),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Localize(#[from] LocalizeError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisOptions {
    pub max_product_states: usize,
}

impl Default for SynthesisOptions {
    /// Reads the state cap from the environment.
    fn default() -> Self {
        SynthesisOptions {
            max_product_states: max_product_states_from_env(),
        }
    }
}

/// A position of a strategy whose property other agents also own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyncPoint {
    /// Folded position in the run.
    pub index: usize,
    pub property: Property,
    /// The other agents owning `property`.
    pub co_owners: Vec<AgentId>,
}

/// A control and communication strategy: a finite or lasso-shaped trajectory
/// of the agent's transition system, by state name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcStrategy {
    pub agent: AgentId,
    pub run: LassoWord<String>,
    pub sync_points: Vec<SyncPoint>,
}

impl CcStrategy {
    /// Annotates `run` with the shared properties it visits.
    pub fn new(agent: AgentId, run: LassoWord<String>, ts: &TransitionSystem, d: &Distribution) -> Self {
        let me = d.index_of(&agent);
        let mut sync_points = Vec::new();
        for (index, state) in run.letters().enumerate() {
            let Some(s) = ts.state_index(state) else { continue };
            let p = ts.label(s);
            let co_owners: Vec<AgentId> = d
                .owners(p)
                .into_iter()
                .filter(|&i| Some(i) != me)
                .map(|i| d.agents()[i].clone())
                .collect();
            if !co_owners.is_empty() {
                sync_points.push(SyncPoint {
                    index,
                    property: p.clone(),
                    co_owners,
                });
            }
        }
        CcStrategy {
            agent,
            run,
            sync_points,
        }
    }

    /// The word of properties the run generates; `None` if it names an
    /// unknown state.
    pub fn word(&self, ts: &TransitionSystem) -> Option<LassoWord<Property>> {
        let label = |s: &String| ts.state_index(s).map(|i| ts.label(i).clone());
        Some(LassoWord::new(
            self.run.prefix.iter().map(label).collect::<Option<_>>()?,
            self.run.period.iter().map(label).collect::<Option<_>>()?,
        ))
    }

    pub fn to_entry(&self) -> StrategyEntry {
        StrategyEntry {
            id: self.agent.to_string(),
            prefix: self.run.prefix.clone(),
            period: self.run.period.clone(),
            sync_points: self
                .sync_points
                .iter()
                .map(|sp| SyncPointEntry {
                    index: sp.index,
                    property: sp.property.to_string(),
                    co_owners: sp.co_owners.iter().map(ToString::to_string).collect(),
                })
                .collect(),
        }
    }

    /// Whether the run starts in the initial state of `ts` and follows its
    /// transitions, including the wrap from the end of the period.
    pub fn check(&self, ts: &TransitionSystem) -> Result<(), String> {
        check_trajectory(ts, &self.run)
    }

    /// Rebuilds a strategy from its file entry; sync points are recomputed.
    pub fn from_entry(entry: &StrategyEntry, ts: &TransitionSystem, d: &Distribution) -> Self {
        let run = LassoWord::new(entry.prefix.clone(), entry.period.clone());
        CcStrategy::new(AgentId::new(entry.id.as_str()), run, ts, d)
    }
}

/// Outcome of [`verify_strategies`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    /// Every run starts in its initial state and follows transitions.
    pub trajectories_valid: bool,
    /// The product of the local words accepts some word.
    pub team_nonempty: bool,
    /// No word of that product violates the specification.
    pub included: bool,
    /// A team word found while checking nonemptiness.
    pub team_word: Option<LassoWord<Property>>,
    pub problems: Vec<String>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.trajectories_valid && self.team_nonempty && self.included
    }
}

/// Sizes of the automata built along the way.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SynthesisStats {
    pub spec_states: usize,
    pub negated_spec_states: usize,
    /// Per agent: local specification states, then implementable local
    /// specification states.
    pub local_states: Vec<(usize, usize)>,
    pub product_states: usize,
    pub product_bound: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Success {
    pub global_word: LassoWord<Property>,
    pub local_words: Vec<LassoWord<Property>>,
    pub strategies: Vec<CcStrategy>,
    pub verification: Verification,
}

impl Success {
    pub fn to_file(&self) -> StrategiesFile {
        StrategiesFile {
            agents: self.strategies.iter().map(CcStrategy::to_entry).collect(),
            global_word: Some(self.global_word.map(ToString::to_string)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Success(Success),
    NotTraceClosed {
        inside: LassoWord<Property>,
        outside: LassoWord<Property>,
    },
    EmptyIntersection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisReport {
    pub verdict: Verdict,
    pub stats: SynthesisStats,
}

/// The specification automaton and the automaton of its negation, both
/// reduced.
pub fn spec_automata(spec: &Ltl, sigma: &BTreeSet<Property>) -> (BuchiAutomaton<Property>, BuchiAutomaton<Property>) {
    let reduce = |b: BuchiAutomaton<Property>| MixedBuchiAutomaton::from(b).reduce().into_buchi();
    (reduce(ltl_to_buchi(spec, sigma)), reduce(ltl_to_buchi_negated(spec, sigma)))
}

fn check_inputs(d: &Distribution, systems: &[TransitionSystem]) -> Result<(), SynthesisError> {
    if systems.len() != d.len() {
        return Err(SynthesisError::AgentCount {
            agents: d.len(),
            systems: systems.len(),
        });
    }
    for (i, ts) in systems.iter().enumerate() {
        if ts.alphabet() != d.alphabet(i) {
            return Err(SynthesisError::AlphabetMismatch(d.agents()[i].clone()));
        }
    }
    Ok(())
}

pub fn synthesize(
    spec: &Ltl,
    d: &Distribution,
    systems: &[TransitionSystem],
    options: &SynthesisOptions,
) -> Result<SynthesisReport, SynthesisError> {
    check_inputs(d, systems)?;
    let mut stats = SynthesisStats::default();
    let (b_phi, b_not_phi) = spec_automata(spec, d.global());
    stats.spec_states = b_phi.num_states();
    stats.negated_spec_states = b_not_phi.num_states();

    if let ClosureVerdict::NotClosed { inside, outside } = is_trace_closed(&b_phi, &b_not_phi, d)? {
        return Ok(SynthesisReport {
            verdict: Verdict::NotTraceClosed { inside, outside },
            stats,
        });
    }

    let mut components = Vec::with_capacity(d.len() + 1);
    for (i, ts) in systems.iter().enumerate() {
        let b_i = project_spec(&b_phi, d.alphabet(i)).reduce();
        let e_i = implementable_local(&extend_with_start(ts), &b_i)?.automaton.reduce();
        stats.local_states.push((b_i.num_states(), e_i.num_states()));
        components.push(e_i);
    }
    if components.iter().any(|e| e.num_states() == 0) {
        return Ok(SynthesisReport {
            verdict: Verdict::EmptyIntersection,
            stats,
        });
    }
    components.push(b_phi.into());
    let product = sync_product(components)?;
    stats.product_bound = product.state_bound();
    let search = product.explore(options.max_product_states)?;
    stats.product_states = search.states;
    let Some(witness) = search.witness else {
        return Ok(SynthesisReport {
            verdict: Verdict::EmptyIntersection,
            stats,
        });
    };

    let global_word = witness.word;
    let mut local_words = Vec::with_capacity(d.len());
    let mut strategies = Vec::with_capacity(d.len());
    for (i, ts) in systems.iter().enumerate() {
        let w_i = project(&global_word, d.alphabet(i));
        let run = realize(ts, &w_i, options.max_product_states)?
            .expect("the local word was accepted by the implementable local specification");
        strategies.push(CcStrategy::new(d.agents()[i].clone(), run, ts, d));
        local_words.push(w_i);
    }
    let verification = verify_strategies(&strategies, spec, d, systems, options)?;
    Ok(SynthesisReport {
        verdict: Verdict::Success(Success {
            global_word,
            local_words,
            strategies,
            verification,
        }),
        stats,
    })
}

/// A trajectory of `ts` generating exactly `w`, by state name.
pub fn realize(
    ts: &TransitionSystem,
    w: &LassoWord<Property>,
    max_states: usize,
) -> Result<Option<LassoWord<String>>, ComposeError> {
    let t_hat = extend_with_start(ts);
    let word = word_automaton(w, ts.alphabet().iter().cloned()).expect("local word over the agent alphabet");
    let local = implementable_local(&t_hat, &word).expect("same alphabet");
    let product = sync_product(vec![local.automaton.clone()])?;
    let Some(found) = product.explore(max_states)?.witness else {
        return Ok(None);
    };
    let run = found.component_run(0);
    let name = |&q: &usize| {
        let s = local.ts_state(&t_hat, q).expect("only the initial state is Start");
        ts.name(s).to_string()
    };
    Ok(Some(LassoWord::new(
        run.prefix.iter().map(name).collect(),
        run.period.iter().map(name).collect(),
    )))
}

fn check_trajectory(ts: &TransitionSystem, run: &LassoWord<String>) -> Result<(), String> {
    let ids: Vec<usize> = run
        .letters()
        .map(|s| ts.state_index(s).ok_or_else(|| format!("unknown state `{s}`")))
        .collect::<Result<_, _>>()?;
    let Some(&first) = ids.first() else {
        return Err("empty run".to_string());
    };
    if first != ts.initial() {
        return Err(format!(
            "run starts in `{}`, not in the initial state `{}`",
            ts.name(first),
            ts.name(ts.initial())
        ));
    }
    for k in 0..ids.len() {
        let Some(next) = run.successor(k) else { continue };
        if !ts.has_transition(ids[k], ids[next]) {
            return Err(format!(
                "no transition `{}` -> `{}` at position {k}",
                ts.name(ids[k]),
                ts.name(ids[next])
            ));
        }
    }
    Ok(())
}

/// Checks that the strategies realize the specification: each run is a
/// trajectory of its system, the product of the generated words accepts
/// some word, and none of its words satisfies the negated specification.
pub fn verify_strategies(
    strategies: &[CcStrategy],
    spec: &Ltl,
    d: &Distribution,
    systems: &[TransitionSystem],
    options: &SynthesisOptions,
) -> Result<Verification, SynthesisError> {
    check_inputs(d, systems)?;
    let mut problems = Vec::new();
    let mut words = Vec::with_capacity(strategies.len());
    for (i, ts) in systems.iter().enumerate() {
        let agent = &d.agents()[i];
        let Some(strategy) = strategies.iter().find(|s| &s.agent == agent) else {
            problems.push(format!("agent `{agent}`: no strategy"));
            continue;
        };
        if let Err(e) = strategy.check(ts) {
            problems.push(format!("agent `{agent}`: {e}"));
        }
        match strategy.word(ts) {
            Some(w) => words.push(w),
            None => problems.push(format!("agent `{agent}`: run names unknown states")),
        }
    }
    let trajectories_valid = problems.is_empty();
    if words.len() != d.len() {
        return Ok(Verification {
            trajectories_valid,
            team_nonempty: false,
            included: false,
            team_word: None,
            problems,
        });
    }

    let local: Vec<_> = words
        .iter()
        .enumerate()
        .map(|(i, w)| word_automaton(w, d.alphabet(i).iter().cloned()).expect("labels lie in the agent alphabet"))
        .collect();
    let team = sync_product(local)?;
    let witness = team.explore(options.max_product_states)?.witness;
    let team_nonempty = witness.is_some();
    if !team_nonempty {
        problems.push(format!(
            "the local words admit no common interleaving, so the agents deadlock: {}",
            words.iter().map(ToString::to_string).collect::<Vec<_>>().join(" | ")
        ));
    }

    let included = if words.iter().all(LassoWord::is_finite) {
        if team_nonempty {
            problems.push("every local word is finite, so team words are finite and cannot satisfy an LTL formula".into());
        }
        !team_nonempty
    } else {
        let b_not_phi = MixedBuchiAutomaton::from(ltl_to_buchi_negated(spec, d.global()));
        let negation = sync_product(vec![b_not_phi])?;
        let violation = intersect_products(&team, &negation)
            .explore(options.max_product_states)?
            .witness;
        if let Some(v) = &violation {
            problems.push(format!("team word {} violates the specification", v.word));
        }
        violation.is_none()
    };

    let team_word = witness.map(|w| w.word);
    Ok(Verification {
        trajectories_valid,
        team_nonempty,
        included,
        team_word,
        problems,
    })
}
