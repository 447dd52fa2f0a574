//! Belief-state rules that decide when a listener should interrupt.
//!
//! Information-quality rules (A1, A2) look at what the listener believes
//! about the asserted proposition. Plan-quality rules (B1, B2) look at the
//! plan under discussion. At most one rule fires per assertion, in the order
//! A1, A2, B1 obstacle, B1 already satisfied, B2.

mod scenario;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::transcript::Role;

pub use scenario::{load_scenario, parse_scenario, Scenario, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stance {
    BelievesTrue,
    BelievesFalse,
    Unknown,
}

impl Stance {
    pub const ALL: [Stance; 3] = [Stance::BelievesTrue, Stance::BelievesFalse, Stance::Unknown];

    pub fn is_definite(self) -> bool {
        self != Stance::Unknown
    }

    /// The contrary definite stance; `Unknown` has none.
    pub fn opposite(self) -> Option<Stance> {
        match self {
            Stance::BelievesTrue => Some(Stance::BelievesFalse),
            Stance::BelievesFalse => Some(Stance::BelievesTrue),
            Stance::Unknown => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Proposition {
    pub id: String,
    pub about_plan: bool,
}

/// What one agent holds about one proposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Belief {
    pub stance: Stance,
    pub relevant: bool,
    /// Whether the last assertion of this proposition came across as ambiguous.
    pub perceived_ambiguous: bool,
    /// The agent's view of the other party's stance, if it has one.
    pub speaker_model: Option<Stance>,
}

impl Default for Belief {
    fn default() -> Self {
        Belief {
            stance: Stance::Unknown,
            relevant: false,
            perceived_ambiguous: false,
            speaker_model: None,
        }
    }
}

/// Exactly one belief per proposition of the scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BeliefStore {
    beliefs: BTreeMap<String, Belief>,
}

impl BeliefStore {
    /// A store with the default belief for every proposition.
    pub fn new<'a, I: IntoIterator<Item = &'a str>>(ids: I) -> Self {
        BeliefStore {
            beliefs: ids
                .into_iter()
                .map(|id| (id.to_string(), Belief::default()))
                .collect(),
        }
    }

    pub fn get(&self, id: &str) -> Option<&Belief> {
        self.beliefs.get(id)
    }

    pub fn set(&mut self, id: &str, belief: Belief) -> Result<(), EngineError> {
        let slot = self
            .beliefs
            .get_mut(id)
            .ok_or_else(|| EngineError::UnknownProposition(id.to_string()))?;
        *slot = belief;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Belief)> {
        self.beliefs.iter().map(|(k, v)| (k.as_str(), v))
    }

    fn belief(&self, id: &str) -> Result<&Belief, EngineError> {
        self.get(id)
            .ok_or_else(|| EngineError::UnknownProposition(id.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanStep {
    pub id: String,
    pub satisfied: bool,
    pub obstacle_props: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
}

impl Plan {
    pub fn step(&self, id: &str) -> Option<&PlanStep> {
        self.steps.iter().find(|s| s.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssertionEvent {
    pub speaker: Role,
    pub proposition: String,
    pub asserted_stance: Stance,
    pub relevant: bool,
    pub ambiguous: bool,
    pub about_plan: bool,
    /// The plan step this assertion puts forward, if any.
    pub proposes_step: Option<String>,
}

impl AssertionEvent {
    pub fn listener(&self) -> Role {
        self.speaker.other()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    A1,
    A2,
    #[serde(rename = "B1_Obstacle")]
    B1Obstacle,
    #[serde(rename = "B1_AlreadySatisfied")]
    B1AlreadySatisfied,
    B2,
}

impl Rule {
    pub const ALL: [Rule; 5] = [
        Rule::A1,
        Rule::A2,
        Rule::B1Obstacle,
        Rule::B1AlreadySatisfied,
        Rule::B2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::A1 => "A1",
            Rule::A2 => "A2",
            Rule::B1Obstacle => "B1_Obstacle",
            Rule::B1AlreadySatisfied => "B1_AlreadySatisfied",
            Rule::B2 => "B2",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterruptTrigger {
    pub rule: Rule,
    pub proposition: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<String>,
    pub rationale: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
    #[error("unknown plan step `{0}`")]
    UnknownStep(String),
    #[error("an assertion must assert a definite stance on `{0}`")]
    IndefiniteAssertion(String),
    #[error("assertion proposes step `{0}` but is not marked about_plan")]
    ProposalNotAboutPlan(String),
}

fn check_event(ev: &AssertionEvent) -> Result<(), EngineError> {
    if !ev.asserted_stance.is_definite() {
        return Err(EngineError::IndefiniteAssertion(ev.proposition.clone()));
    }
    if let Some(step) = &ev.proposes_step {
        if !ev.about_plan {
            return Err(EngineError::ProposalNotAboutPlan(step.clone()));
        }
    }
    Ok(())
}

/// Rules A1 and A2.
pub fn evaluate_information_quality(
    listener: &BeliefStore,
    ev: &AssertionEvent,
) -> Result<Option<InterruptTrigger>, EngineError> {
    check_event(ev)?;
    let belief = listener.belief(&ev.proposition)?;
    if let Some(opposite) = belief.stance.opposite() {
        if belief.relevant {
            let reason = if ev.asserted_stance == opposite {
                Some("the assertion contradicts a relevant fact the listener holds")
            } else if belief.speaker_model == Some(opposite) {
                Some("the listener takes the speaker to believe the contrary of a relevant fact")
            } else if belief.speaker_model == Some(Stance::Unknown) {
                Some("the listener takes the speaker not to know a relevant fact")
            } else {
                None
            };
            if let Some(reason) = reason {
                return Ok(Some(InterruptTrigger {
                    rule: Rule::A1,
                    proposition: ev.proposition.clone(),
                    step: None,
                    rationale: reason.to_string(),
                }));
            }
        }
    }
    if ev.relevant && ev.ambiguous {
        return Ok(Some(InterruptTrigger {
            rule: Rule::A2,
            proposition: ev.proposition.clone(),
            step: None,
            rationale: "the assertion is relevant but ambiguous".to_string(),
        }));
    }
    Ok(None)
}

/// Rules B1 and B2. Only assertions about the plan are considered.
pub fn evaluate_plan_quality(
    listener: &BeliefStore,
    plan: &Plan,
    ev: &AssertionEvent,
) -> Result<Option<InterruptTrigger>, EngineError> {
    check_event(ev)?;
    listener.belief(&ev.proposition)?;
    let proposed = match &ev.proposes_step {
        Some(id) => Some(
            plan.step(id)
                .ok_or_else(|| EngineError::UnknownStep(id.clone()))?,
        ),
        None => None,
    };
    if !ev.about_plan {
        return Ok(None);
    }
    let candidates: Vec<&PlanStep> = match proposed {
        Some(step) => vec![step],
        None => plan.steps.iter().collect(),
    };
    for step in candidates {
        for prop in &step.obstacle_props {
            if listener.belief(prop)?.stance == Stance::BelievesTrue {
                return Ok(Some(InterruptTrigger {
                    rule: Rule::B1Obstacle,
                    proposition: prop.clone(),
                    step: Some(step.id.clone()),
                    rationale: format!("`{prop}` is an obstacle to step `{}`", step.id),
                }));
            }
        }
    }
    if let Some(step) = proposed.filter(|s| s.satisfied) {
        return Ok(Some(InterruptTrigger {
            rule: Rule::B1AlreadySatisfied,
            proposition: ev.proposition.clone(),
            step: Some(step.id.clone()),
            rationale: format!("step `{}` is already satisfied", step.id),
        }));
    }
    if ev.ambiguous {
        return Ok(Some(InterruptTrigger {
            rule: Rule::B2,
            proposition: ev.proposition.clone(),
            step: None,
            rationale: "the assertion about the plan is ambiguous".to_string(),
        }));
    }
    Ok(None)
}

/// Both rule families, information quality first.
pub fn evaluate(
    listener: &BeliefStore,
    plan: &Plan,
    ev: &AssertionEvent,
) -> Result<Option<InterruptTrigger>, EngineError> {
    match evaluate_information_quality(listener, ev)? {
        Some(t) => Ok(Some(t)),
        None => evaluate_plan_quality(listener, plan, ev),
    }
}

/// The listener takes the assertion at face value.
pub fn apply_assertion(listener: &mut BeliefStore, ev: &AssertionEvent) -> Result<(), EngineError> {
    check_event(ev)?;
    let mut b = *listener.belief(&ev.proposition)?;
    b.stance = ev.asserted_stance;
    b.speaker_model = Some(ev.asserted_stance);
    b.perceived_ambiguous = ev.ambiguous;
    listener.set(&ev.proposition, b)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DialogueState {
    pub expert: BeliefStore,
    pub client: BeliefStore,
    pub plan: Plan,
}

impl DialogueState {
    pub fn store(&self, role: Role) -> &BeliefStore {
        match role {
            Role::Expert => &self.expert,
            Role::Client => &self.client,
        }
    }

    pub fn store_mut(&mut self, role: Role) -> &mut BeliefStore {
        match role {
            Role::Expert => &mut self.expert,
            Role::Client => &mut self.client,
        }
    }

    /// Evaluates the event against its listener, then updates the listener.
    pub fn step(&mut self, ev: &AssertionEvent) -> Result<Option<InterruptTrigger>, EngineError> {
        let trigger = evaluate(self.store(ev.listener()), &self.plan, ev)?;
        apply_assertion(self.store_mut(ev.listener()), ev)?;
        Ok(trigger)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub index: usize,
    pub event: AssertionEvent,
    pub listener: Role,
    pub trigger: Option<InterruptTrigger>,
}

/// Runs a script from the given state and returns one record per event.
pub fn step_scenario(
    state: &DialogueState,
    script: &[AssertionEvent],
) -> Result<Vec<StepRecord>, EngineError> {
    let mut state = state.clone();
    script
        .iter()
        .enumerate()
        .map(|(index, ev)| {
            Ok(StepRecord {
                index,
                event: ev.clone(),
                listener: ev.listener(),
                trigger: state.step(ev)?,
            })
        })
        .collect()
}
