//! TOML scenario files for the interruption stepper.
//!
//! ```toml
//! [[proposition]]
//! id = "backup_takes_long"
//!
//! [[step]]
//! id = "take_backup"
//! obstacles = ["backup_takes_long"]
//!
//! [client.backup_takes_long]
//! stance = "believes_true"
//! relevant = true
//!
//! [[event]]
//! speaker = "expert"
//! proposition = "backup_takes_long"
//! stance = "believes_false"
//! proposes_step = "take_backup"
//! ```
//!
//! An event's `about_plan` defaults to its proposition's; proposing a step
//! implies it.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    step_scenario, AssertionEvent, Belief, BeliefStore, DialogueState, EngineError, Plan, PlanStep,
    Proposition, Stance, StepRecord,
};
use crate::transcript::Role;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid scenario: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("duplicate proposition `{0}`")]
    DuplicateProposition(String),
    #[error("duplicate plan step `{0}`")]
    DuplicateStep(String),
    #[error("step `{step}` lists unknown obstacle `{prop}`")]
    UnknownObstacle { step: String, prop: String },
    #[error("{role} beliefs mention unknown proposition `{prop}`")]
    UnknownBelief { role: Role, prop: String },
    #[error("event {index}: {source}")]
    Event { index: usize, source: EngineError },
    #[error("scenario has no events")]
    NoEvents,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    proposition: Vec<RawProposition>,
    #[serde(default)]
    step: Vec<RawStep>,
    #[serde(default)]
    expert: BTreeMap<String, RawBelief>,
    #[serde(default)]
    client: BTreeMap<String, RawBelief>,
    #[serde(default)]
    event: Vec<RawEvent>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProposition {
    id: String,
    #[serde(default)]
    about_plan: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStep {
    id: String,
    #[serde(default)]
    satisfied: bool,
    #[serde(default)]
    obstacles: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBelief {
    #[serde(default = "unknown")]
    stance: Stance,
    #[serde(default)]
    relevant: bool,
    speaker_model: Option<Stance>,
}

fn unknown() -> Stance {
    Stance::Unknown
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvent {
    speaker: Role,
    proposition: String,
    stance: Stance,
    #[serde(default)]
    relevant: bool,
    #[serde(default)]
    ambiguous: bool,
    about_plan: Option<bool>,
    proposes_step: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scenario {
    pub propositions: Vec<Proposition>,
    pub initial: DialogueState,
    pub script: Vec<AssertionEvent>,
}

impl Scenario {
    pub fn run(&self) -> Result<Vec<StepRecord>, EngineError> {
        step_scenario(&self.initial, &self.script)
    }
}

pub fn parse_scenario(input: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = toml::from_str(input)?;

    let mut ids = BTreeSet::new();
    for p in &raw.proposition {
        if !ids.insert(p.id.as_str()) {
            return Err(ScenarioError::DuplicateProposition(p.id.clone()));
        }
    }

    let mut steps: Vec<PlanStep> = Vec::new();
    for s in raw.step {
        if steps.iter().any(|x| x.id == s.id) {
            return Err(ScenarioError::DuplicateStep(s.id));
        }
        if let Some(prop) = s.obstacles.iter().find(|o| !ids.contains(o.as_str())) {
            return Err(ScenarioError::UnknownObstacle {
                step: s.id.clone(),
                prop: prop.clone(),
            });
        }
        steps.push(PlanStep {
            id: s.id,
            satisfied: s.satisfied,
            obstacle_props: s.obstacles.into_iter().collect(),
        });
    }

    let store = |role: Role, raw: &BTreeMap<String, RawBelief>| {
        let mut store = BeliefStore::new(ids.iter().copied());
        for (prop, b) in raw {
            let belief = Belief {
                stance: b.stance,
                relevant: b.relevant,
                perceived_ambiguous: false,
                speaker_model: b.speaker_model,
            };
            store
                .set(prop, belief)
                .map_err(|_| ScenarioError::UnknownBelief {
                    role,
                    prop: prop.clone(),
                })?;
        }
        Ok::<_, ScenarioError>(store)
    };
    let expert = store(Role::Expert, &raw.expert)?;
    let client = store(Role::Client, &raw.client)?;
    let plan = Plan { steps };

    if raw.event.is_empty() {
        return Err(ScenarioError::NoEvents);
    }
    let propositions: Vec<Proposition> = raw
        .proposition
        .into_iter()
        .map(|p| Proposition {
            id: p.id,
            about_plan: p.about_plan,
        })
        .collect();
    let mut script = Vec::with_capacity(raw.event.len());
    for (index, e) in raw.event.into_iter().enumerate() {
        let bad = |source| ScenarioError::Event { index, source };
        let prop = propositions
            .iter()
            .find(|p| p.id == e.proposition)
            .ok_or_else(|| bad(EngineError::UnknownProposition(e.proposition.clone())))?;
        if let Some(step) = &e.proposes_step {
            if plan.step(step).is_none() {
                return Err(bad(EngineError::UnknownStep(step.clone())));
            }
        }
        let about_plan = e
            .about_plan
            .unwrap_or(prop.about_plan || e.proposes_step.is_some());
        if !e.stance.is_definite() {
            return Err(bad(EngineError::IndefiniteAssertion(e.proposition)));
        }
        if let Some(step) = e.proposes_step.as_ref().filter(|_| !about_plan) {
            return Err(bad(EngineError::ProposalNotAboutPlan(step.clone())));
        }
        script.push(AssertionEvent {
            speaker: e.speaker,
            proposition: e.proposition,
            asserted_stance: e.stance,
            relevant: e.relevant,
            ambiguous: e.ambiguous,
            about_plan,
            proposes_step: e.proposes_step,
        });
    }

    Ok(Scenario {
        propositions,
        initial: DialogueState {
            expert,
            client,
            plan,
        },
        script,
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    parse_scenario(&std::fs::read_to_string(path)?)
}
