//! Synthesis of per-agent control and communication strategies from a global
//! LTL specification over a distributed property alphabet.

pub mod automata;
pub mod closure;
pub mod compose;
pub mod formula;
pub mod localize;
pub mod model;
pub mod simulate;
pub mod synthesize;
mod graph;
pub mod translate;
pub mod word;

pub use automata::{AutomatonError, BuchiAutomaton, MixedBuchiAutomaton, StateId};
pub use formula::{Ltl, Property};
pub use word::{LassoWord, Symbol};

/// A Büchi automaton over single properties.
pub type Buchi = BuchiAutomaton<Property>;
/// A mixed Büchi automaton over single properties.
pub type MixedBuchi = MixedBuchiAutomaton<Property>;
/// A finite or ultimately periodic word of properties.
pub type Word = LassoWord<Property>;
