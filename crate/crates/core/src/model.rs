//! JSON documents: the model file (alphabet, agents, specification) and the
//! strategies file written after synthesis.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closure::{AgentId, Distribution, DistributionError};
use crate::formula::{parse_ltl, Ltl, ParseError, Property};
use crate::localize::{ModelError, TransitionSystem};
use crate::word::LassoWord;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid distribution: {0}")]
    Distribution(#[from] DistributionError),
    #[error("agent `{agent}`: {source}")]
    Agent { agent: String, source: ModelError },
    #[error("the model has no specification and none was given")]
    MissingSpec,
    #[error("specification: {0}")]
    Spec(#[from] ParseError),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
}

pub(crate) fn read_file(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub alphabet: Vec<String>,
    pub agents: Vec<AgentFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentFile {
    pub id: String,
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: Vec<(String, String)>,
    pub labels: BTreeMap<String, String>,
}

/// A validated model: the distribution and one transition system per agent,
/// in the same order.
#[derive(Clone, Debug)]
pub struct Model {
    pub distribution: Distribution,
    pub systems: Vec<TransitionSystem>,
    pub spec: Option<String>,
}

fn properties(names: &[String]) -> BTreeSet<Property> {
    names.iter().map(|n| Property::new(n.as_str())).collect()
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, LoadError> {
        Self::from_json(&read_file(path)?)
    }

    pub fn validate(&self) -> Result<Model, LoadError> {
        let global = properties(&self.alphabet);
        let distribution = Distribution::with_global(
            self.agents
                .iter()
                .map(|a| (AgentId::new(a.id.as_str()), properties(&a.alphabet))),
            global,
        )?;
        let mut systems = Vec::with_capacity(self.agents.len());
        for a in &self.agents {
            let labels: BTreeMap<String, Property> = a
                .labels
                .iter()
                .map(|(s, p)| (s.clone(), Property::new(p.as_str())))
                .collect();
            let ts = TransitionSystem::new(
                a.states.iter().cloned(),
                &a.initial,
                a.transitions.iter().map(|(x, y)| (x.as_str(), y.as_str())),
                properties(&a.alphabet),
                &labels,
            )
            .map_err(|source| LoadError::Agent {
                agent: a.id.clone(),
                source,
            })?;
            systems.push(ts);
        }
        Ok(Model {
            distribution,
            systems,
            spec: self.spec.clone(),
        })
    }
}

impl Model {
    pub fn load(path: &Path) -> Result<Self, LoadError> {
        ModelFile::load(path)?.validate()
    }

    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        ModelFile::from_json(text)?.validate()
    }

    /// Parses `text`, or the model's own specification when `text` is `None`.
    pub fn parse_spec(&self, text: Option<&str>) -> Result<Ltl, LoadError> {
        let text = text.or(self.spec.as_deref()).ok_or(LoadError::MissingSpec)?;
        Ok(parse_ltl(text, self.distribution.global())?)
    }

    pub fn agent_index(&self, id: &str) -> Result<usize, LoadError> {
        self.distribution
            .index_of(&AgentId::new(id))
            .ok_or_else(|| LoadError::UnknownAgent(id.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategiesFile {
    pub agents: Vec<StrategyEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global_word: Option<LassoWord<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyEntry {
    pub id: String,
    pub prefix: Vec<String>,
    pub period: Vec<String>,
    #[serde(default)]
    pub sync_points: Vec<SyncPointEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncPointEntry {
    pub index: usize,
    pub property: String,
    pub co_owners: Vec<String>,
}

impl StrategiesFile {
    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, LoadError> {
        Self::from_json(&read_file(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}
