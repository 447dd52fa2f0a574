//! Turn-level control allocation and control phases.
//!
//! Control for a turn is decided by its final utterance:
//!
//! | final utterance | controller                                           |
//! |-----------------|------------------------------------------------------|
//! | question        | speaker, unless the previous turn ended in a question or command |
//! | assertion       | speaker, unless the previous turn ended in a question |
//! | command         | speaker                                              |
//! | prompt          | listener                                             |
//!
//! Phases are maximal runs of turns with one controller. Two views exist: the
//! mechanical one puts a prompt turn in the listener's phase, the display one
//! draws the boundary after the prompt so that the abdicating speaker's
//! phase ends with its own signal.

use serde::Serialize;

use crate::transcript::{Dialogue, Role, UtteranceType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlRule {
    QuestionDefault,
    QuestionAfterQorC,
    AssertionDefault,
    AssertionAnswer,
    Command,
    Prompt,
}

impl ControlRule {
    /// Which rule applies to a final utterance given the previous turn's
    /// final utterance (`None` at the start of the dialogue).
    pub fn select(kind: UtteranceType, prev: Option<UtteranceType>) -> ControlRule {
        use UtteranceType::*;
        match kind {
            Question if matches!(prev, Some(Question | Command)) => ControlRule::QuestionAfterQorC,
            Question => ControlRule::QuestionDefault,
            Assertion if prev == Some(Question) => ControlRule::AssertionAnswer,
            Assertion => ControlRule::AssertionDefault,
            Command => ControlRule::Command,
            Prompt => ControlRule::Prompt,
        }
    }

    /// True when the rule hands control to the speaker.
    pub fn speaker_controls(self) -> bool {
        !matches!(
            self,
            ControlRule::QuestionAfterQorC | ControlRule::AssertionAnswer | ControlRule::Prompt
        )
    }

    /// The utterance type this rule is defined for.
    pub fn utterance_type(self) -> UtteranceType {
        match self {
            ControlRule::QuestionDefault | ControlRule::QuestionAfterQorC => {
                UtteranceType::Question
            }
            ControlRule::AssertionDefault | ControlRule::AssertionAnswer => {
                UtteranceType::Assertion
            }
            ControlRule::Command => UtteranceType::Command,
            ControlRule::Prompt => UtteranceType::Prompt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ControlAssignment {
    pub turn_index: usize,
    pub speaker: Role,
    pub controller: Role,
    pub rule_fired: ControlRule,
}

/// Assigns a controller to every turn. Utterances without a resolved or gold
/// type count as assertions, the classifier's fallback.
pub fn allocate_control(d: &Dialogue) -> Vec<ControlAssignment> {
    let mut prev: Option<UtteranceType> = None;
    d.turns
        .iter()
        .map(|turn| {
            let kind = turn
                .final_utterance()
                .kind()
                .unwrap_or(UtteranceType::Assertion);
            let rule = ControlRule::select(kind, prev);
            prev = Some(kind);
            ControlAssignment {
                turn_index: turn.index,
                speaker: turn.speaker,
                controller: if rule.speaker_controls() {
                    turn.speaker
                } else {
                    turn.speaker.other()
                },
                rule_fired: rule,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Phase {
    pub controller: Role,
    pub start_turn: usize,
    /// Inclusive.
    pub end_turn: usize,
    /// Prompt turn with which the controller gave up this phase, if any.
    pub signal_turn: Option<usize>,
}

impl Phase {
    pub fn turn_count(&self) -> usize {
        self.end_turn + 1 - self.start_turn
    }

    pub fn contains(&self, turn: usize) -> bool {
        (self.start_turn..=self.end_turn).contains(&turn)
    }
}

/// A change of controller between two adjacent turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ControlChange {
    /// First turn controlled by the new controller.
    pub mechanical_turn: usize,
    pub from: Role,
    pub to: Role,
    /// The new controller got control through the other party's prompt.
    pub prompt_triggered: bool,
    /// Display boundary: the line is drawn after this turn.
    pub boundary_after: usize,
}

/// Every controller change, in dialogue order.
pub fn control_changes(assignments: &[ControlAssignment]) -> Vec<ControlChange> {
    assignments
        .windows(2)
        .filter(|w| w[0].controller != w[1].controller)
        .map(|w| {
            let prompt_triggered = w[1].rule_fired == ControlRule::Prompt;
            ControlChange {
                mechanical_turn: w[1].turn_index,
                from: w[0].controller,
                to: w[1].controller,
                prompt_triggered,
                boundary_after: if prompt_triggered {
                    w[1].turn_index
                } else {
                    w[0].turn_index
                },
            }
        })
        .collect()
}

/// Maximal runs of equal controller, boundaries where control changes hands.
pub fn mechanical_phases(assignments: &[ControlAssignment]) -> Vec<Phase> {
    let mut phases: Vec<Phase> = Vec::new();
    for a in assignments {
        match phases.last_mut() {
            Some(p) if p.controller == a.controller => p.end_turn = a.turn_index,
            Some(p) => {
                if a.rule_fired == ControlRule::Prompt {
                    p.signal_turn = Some(a.turn_index);
                }
                phases.push(Phase {
                    controller: a.controller,
                    start_turn: a.turn_index,
                    end_turn: a.turn_index,
                    signal_turn: None,
                });
            }
            None => phases.push(Phase {
                controller: a.controller,
                start_turn: a.turn_index,
                end_turn: a.turn_index,
                signal_turn: None,
            }),
        }
    }
    phases
}

/// Display phases: like [`mechanical_phases`], but a prompt that hands over
/// control stays in the phase of the speaker who produced it.
///
/// A prompt in the very last turn has no following turn to open a phase, so
/// it only shows up as the final phase's `signal_turn`.
pub fn segment_phases(assignments: &[ControlAssignment]) -> Vec<Phase> {
    let mut phases = mechanical_phases(assignments);
    let Some(last_turn) = assignments.last().map(|a| a.turn_index) else {
        return phases;
    };
    for i in 1..phases.len() {
        if phases[i - 1].signal_turn.is_some() {
            phases[i - 1].end_turn += 1;
            phases[i].start_turn += 1;
        }
    }
    if let Some(p) = phases.last() {
        if p.start_turn > last_turn {
            phases.pop();
        }
    }
    debug_assert!(phases.iter().all(|p| p.start_turn <= p.end_turn));
    phases
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseStats {
    pub dialogues: usize,
    pub turn_count: usize,
    pub shift_count: usize,
    /// Mechanical phases: shifts plus one per dialogue.
    pub phase_count: usize,
    /// Turns divided by shifts, two decimals; absent without shifts.
    pub mean_turns_per_shift: Option<f64>,
    /// Turns divided by phases, two decimals.
    pub mean_turns_per_phase: Option<f64>,
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| round2(num as f64 / den as f64))
}

/// Corpus-level phase statistics over the control assignments of each dialogue.
pub fn phase_stats<'a, I>(corpus: I) -> PhaseStats
where
    I: IntoIterator<Item = &'a [ControlAssignment]>,
{
    let (mut dialogues, mut turns, mut shifts) = (0, 0, 0);
    for assignments in corpus {
        if assignments.is_empty() {
            continue;
        }
        dialogues += 1;
        turns += assignments.len();
        shifts += control_changes(assignments).len();
    }
    PhaseStats {
        dialogues,
        turn_count: turns,
        shift_count: shifts,
        phase_count: shifts + dialogues,
        mean_turns_per_shift: ratio(turns, shifts),
        mean_turns_per_phase: ratio(turns, shifts + dialogues),
    }
}
