//! Classifies each control shift by the signal that preceded it and audits
//! how well cue words line up with shifts.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::classifier::{detect_cue_words, ClassifierConfig, CueOccurrence};
use crate::control::{control_changes, ControlAssignment, ControlChange, ControlRule};
use crate::text::{tokenize, Phrase};
use crate::transcript::{Dialogue, Flag, Role, Utterance, UtteranceType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Signal {
    Prompt,
    Repetition,
    Summary,
    Interruption,
}

impl Signal {
    pub const ALL: [Signal; 4] = [
        Signal::Prompt,
        Signal::Repetition,
        Signal::Summary,
        Signal::Interruption,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InterruptionKind {
    VitalFact,
    ResponseToVitalFact,
    Clarification,
    Unclassified,
}

impl InterruptionKind {
    pub const ALL: [InterruptionKind; 4] = [
        InterruptionKind::VitalFact,
        InterruptionKind::ResponseToVitalFact,
        InterruptionKind::Clarification,
        InterruptionKind::Unclassified,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControlShift {
    /// 0-based within the dialogue; judge files are keyed by it.
    pub ordinal: usize,
    /// The shift line is drawn after this turn.
    pub boundary_after: usize,
    /// First turn mechanically controlled by `to`.
    pub mechanical_turn: usize,
    pub from: Role,
    pub to: Role,
    pub signal: Signal,
    pub interruption_subtype: Option<InterruptionKind>,
    /// Where the signal sits: the abdicating prompt or repetition/summary of
    /// the outgoing controller, or the opening utterance of an interruption.
    pub signal_turn: usize,
    pub signal_utterance: usize,
    pub cue_words: Vec<CueOccurrence>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftConfig {
    /// Also treat short cue-initial assertions as summaries (off by default;
    /// annotated `sum` flags are always honoured).
    pub summary_heuristic: bool,
    /// A suggested summary is shorter than this fraction of the mean length
    /// of the phase's earlier assertions.
    pub summary_brevity_ratio: f64,
}

impl Default for ShiftConfig {
    fn default() -> Self {
        ShiftConfig {
            summary_heuristic: false,
            summary_brevity_ratio: 0.5,
        }
    }
}

const STOP_WORDS: &[&str] = &[
    "a", "about", "all", "am", "an", "are", "as", "at", "be", "been", "by", "can", "could", "did",
    "do", "does", "doing", "for", "from", "had", "has", "have", "he", "her", "here", "him", "his",
    "i", "i'd", "i'll", "i'm", "i've", "if", "in", "is", "it", "it's", "its", "just", "me", "my",
    "of", "on", "or", "our", "she", "that", "that's", "the", "their", "them", "then", "there",
    "there's", "these", "they", "they're", "they've", "this", "those", "to", "too", "up", "us",
    "was", "we", "were", "what", "which", "who", "will", "with", "would", "you", "you'll",
    "you're", "you've", "your", "er", "erm", "uh", "um", "mm", "uhu", "eh", "ah", "oh",
];

/// Markers of a contradiction or an added fact.
const VITAL_MARKERS: &[&str] = &["though", "well actually", "as well"];

const SUMMARY_OPENERS: &[&str] = &["and", "now", "but", "so"];

/// Lower-cased tokens minus stop words and single-word cue words.
pub fn content_words(text: &str, cfg: &ClassifierConfig) -> BTreeSet<String> {
    let cue_words: BTreeSet<&str> = cfg
        .cue_lexicon
        .iter()
        .filter(|p| p.len() == 1)
        .map(|p| p.tokens()[0].as_str())
        .collect();
    tokenize(text)
        .into_iter()
        .filter(|t| !STOP_WORDS.contains(&t.as_str()) && !cue_words.contains(t.as_str()))
        .collect()
}

/// True if `u` is an assertion whose content words all occurred in earlier
/// assertions. A `rep` flag decides on its own.
pub fn detect_repetition(u: &Utterance, prior: &[&Utterance], cfg: &ClassifierConfig) -> bool {
    if u.has_flag(Flag::Repetition) {
        return true;
    }
    if u.kind() != Some(UtteranceType::Assertion) {
        return false;
    }
    let own = content_words(&u.text, cfg);
    if own.is_empty() {
        return false;
    }
    let seen: BTreeSet<String> = prior
        .iter()
        .filter(|p| p.kind() == Some(UtteranceType::Assertion))
        .flat_map(|p| content_words(&p.text, cfg))
        .collect();
    own.is_subset(&seen)
}

/// Utterances strictly before `(turn, utterance)`.
fn utterances_before(d: &Dialogue, turn: usize, utterance: usize) -> Vec<&Utterance> {
    d.utterances()
        .take_while(|&(t, i, _)| (t, i) < (turn, utterance))
        .map(|(_, _, u)| u)
        .collect()
}

fn repetition_at(d: &Dialogue, turn: usize, utterance: usize, cfg: &ClassifierConfig) -> bool {
    let u = &d.turns[turn].utterances[utterance];
    detect_repetition(u, &utterances_before(d, turn, utterance), cfg)
}

fn has_vital_marker(text: &str) -> bool {
    let tokens = tokenize(text);
    VITAL_MARKERS.iter().any(|m| {
        let phrase = Phrase::parse(m).expect("marker has words");
        (0..tokens.len()).any(|i| phrase.matches_at(&tokens, i))
    })
}

/// Advisory summary test: a cue-initial assertion much shorter than the
/// assertions that came before it in the same phase.
pub fn suggests_summary(
    d: &Dialogue,
    assignments: &[ControlAssignment],
    turn: usize,
    utterance: usize,
    ratio: f64,
) -> bool {
    let u = &d.turns[turn].utterances[utterance];
    if u.kind() != Some(UtteranceType::Assertion) {
        return false;
    }
    let tokens = tokenize(&u.text);
    if !tokens
        .first()
        .is_some_and(|t| SUMMARY_OPENERS.contains(&t.as_str()))
    {
        return false;
    }
    let controller = assignments[turn].controller;
    let phase_start = (0..=turn)
        .rev()
        .take_while(|&t| assignments[t].controller == controller)
        .last()
        .unwrap_or(turn);
    let lengths: Vec<usize> = d.turns[phase_start..=turn]
        .iter()
        .flat_map(|t| {
            t.utterances
                .iter()
                .enumerate()
                .map(move |(i, u)| (t.index, i, u))
        })
        .filter(|&(t, i, p)| {
            (t, i) < (turn, utterance) && p.kind() == Some(UtteranceType::Assertion)
        })
        .map(|(_, _, p)| tokenize(&p.text).len())
        .collect();
    if lengths.is_empty() {
        return false;
    }
    let mean = lengths.iter().sum::<usize>() as f64 / lengths.len() as f64;
    (tokens.len() as f64) < ratio * mean
}

/// Latest turn at or before `turn` spoken by `who`.
fn last_turn_by(d: &Dialogue, who: Role, turn: usize) -> Option<usize> {
    (0..=turn.min(d.turns.len().saturating_sub(1)))
        .rev()
        .find(|&t| d.turns[t].speaker == who)
}

/// Signal class of one controller change, with the turn and utterance that
/// carry the signal.
pub fn classify_shift(
    change: &ControlChange,
    d: &Dialogue,
    assignments: &[ControlAssignment],
    cfg: &ClassifierConfig,
    shift_cfg: &ShiftConfig,
) -> (Signal, usize, usize) {
    if change.prompt_triggered {
        let t = change.mechanical_turn;
        return (Signal::Prompt, t, d.turns[t].utterances.len() - 1);
    }
    if let Some(t) = last_turn_by(d, change.from, change.boundary_after) {
        let last = d.turns[t].utterances.len() - 1;
        let u = &d.turns[t].utterances[last];
        if repetition_at(d, t, last, cfg) {
            return (Signal::Repetition, t, last);
        }
        if u.has_flag(Flag::Summary)
            || (shift_cfg.summary_heuristic
                && suggests_summary(d, assignments, t, last, shift_cfg.summary_brevity_ratio))
        {
            return (Signal::Summary, t, last);
        }
    }
    let taking =
        last_turn_by(d, change.to, change.mechanical_turn).unwrap_or(change.mechanical_turn);
    (Signal::Interruption, taking, 0)
}

/// Sub-type of an interruption whose opening turn is `taking_turn`.
pub fn classify_interruption(
    taking_turn: usize,
    from: Role,
    d: &Dialogue,
    prior: &[ControlShift],
) -> InterruptionKind {
    let turn = &d.turns[taking_turn];
    if turn.final_utterance().kind() == Some(UtteranceType::Question)
        || turn
            .utterances
            .iter()
            .any(|u| u.has_flag(Flag::Clarification))
    {
        return InterruptionKind::Clarification;
    }
    let after_vital_shift = prior
        .last()
        .is_some_and(|s| s.interruption_subtype == Some(InterruptionKind::VitalFact));
    let after_vital_turn = taking_turn > 0 && {
        let before = &d.turns[taking_turn - 1];
        before.speaker == from
            && before
                .utterances
                .iter()
                .any(|u| u.has_flag(Flag::VitalFact))
    };
    if after_vital_shift || after_vital_turn {
        return InterruptionKind::ResponseToVitalFact;
    }
    if turn
        .utterances
        .iter()
        .any(|u| u.has_flag(Flag::VitalFact) || has_vital_marker(&u.text))
    {
        return InterruptionKind::VitalFact;
    }
    InterruptionKind::Unclassified
}

fn shift_cues(u: &Utterance, cfg: &ClassifierConfig) -> Vec<CueOccurrence> {
    if u.has_flag(Flag::CuePrefix) {
        Vec::new()
    } else {
        detect_cue_words(u, cfg)
    }
}

/// All control shifts of a classified dialogue, classified in order.
pub fn analyze_shifts(
    d: &Dialogue,
    assignments: &[ControlAssignment],
    cfg: &ClassifierConfig,
    shift_cfg: &ShiftConfig,
) -> Vec<ControlShift> {
    let mut shifts: Vec<ControlShift> = Vec::new();
    for (ordinal, change) in control_changes(assignments).iter().enumerate() {
        let (signal, signal_turn, signal_utterance) =
            classify_shift(change, d, assignments, cfg, shift_cfg);
        let interruption_subtype = (signal == Signal::Interruption)
            .then(|| classify_interruption(signal_turn, change.from, d, &shifts));
        let cue_words = shift_cues(&d.turns[signal_turn].utterances[signal_utterance], cfg);
        shifts.push(ControlShift {
            ordinal,
            boundary_after: change.boundary_after,
            mechanical_turn: change.mechanical_turn,
            from: change.from,
            to: change.to,
            signal,
            interruption_subtype,
            signal_turn,
            signal_utterance,
            cue_words,
        });
    }
    shifts
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WordCounts {
    pub with_shift: usize,
    pub without_shift: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct UptakeFailures {
    pub prompt: usize,
    pub repetition: usize,
    pub summary: usize,
}

impl UptakeFailures {
    pub fn total(&self) -> usize {
        self.prompt + self.repetition + self.summary
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CueAudit {
    /// Cue occurrences in the signal utterance of a shift.
    pub cue_with_shift: usize,
    /// Cue occurrences in every other utterance.
    pub cue_without_shift: usize,
    /// Signal utterances flagged `cue` whose cue words were not counted.
    pub cue_prefix_excluded: usize,
    /// Abdication signals after which control came straight back.
    pub signal_without_uptake: usize,
    pub uptake_failures: UptakeFailures,
    /// Repetition, summary and interruption shifts.
    pub non_prompt_shifts: usize,
    /// ...of which carry at least one cue word.
    pub non_prompt_cue_marked: usize,
    pub per_word: BTreeMap<String, WordCounts>,
}

impl CueAudit {
    pub fn merge(&mut self, other: &CueAudit) {
        self.cue_with_shift += other.cue_with_shift;
        self.cue_without_shift += other.cue_without_shift;
        self.cue_prefix_excluded += other.cue_prefix_excluded;
        self.signal_without_uptake += other.signal_without_uptake;
        self.uptake_failures.prompt += other.uptake_failures.prompt;
        self.uptake_failures.repetition += other.uptake_failures.repetition;
        self.uptake_failures.summary += other.uptake_failures.summary;
        self.non_prompt_shifts += other.non_prompt_shifts;
        self.non_prompt_cue_marked += other.non_prompt_cue_marked;
        for (word, c) in &other.per_word {
            let e = self.per_word.entry(word.clone()).or_default();
            e.with_shift += c.with_shift;
            e.without_shift += c.without_shift;
        }
    }
}

/// Counts cue words with and without shifts and abdication signals that
/// failed to hand over control.
pub fn audit_cues(
    d: &Dialogue,
    assignments: &[ControlAssignment],
    shifts: &[ControlShift],
    cfg: &ClassifierConfig,
) -> CueAudit {
    let mut audit = CueAudit::default();
    let signal_sites: BTreeSet<(usize, usize)> = shifts
        .iter()
        .map(|s| (s.signal_turn, s.signal_utterance))
        .collect();

    for s in shifts.iter().filter(|s| s.signal != Signal::Prompt) {
        audit.non_prompt_shifts += 1;
        if !s.cue_words.is_empty() {
            audit.non_prompt_cue_marked += 1;
        }
    }

    for (t, i, u) in d.utterances() {
        let cues = detect_cue_words(u, cfg);
        if cues.is_empty() {
            continue;
        }
        let at_signal = signal_sites.contains(&(t, i));
        if at_signal && u.has_flag(Flag::CuePrefix) {
            audit.cue_prefix_excluded += 1;
            continue;
        }
        for c in cues {
            let e = audit.per_word.entry(c.word).or_default();
            if at_signal {
                audit.cue_with_shift += 1;
                e.with_shift += 1;
            } else {
                audit.cue_without_shift += 1;
                e.without_shift += 1;
            }
        }
    }

    for t in 0..d.turns.len().saturating_sub(1) {
        let turn = &d.turns[t];
        let speaker = turn.speaker;
        let last = turn.utterances.len() - 1;
        let u = turn.final_utterance();
        let kind = match assignments[t].rule_fired {
            ControlRule::Prompt if t > 0 && assignments[t - 1].controller == speaker => {
                Some(Signal::Prompt)
            }
            ControlRule::Prompt => None,
            _ if assignments[t].controller != speaker => None,
            _ if repetition_at(d, t, last, cfg) => Some(Signal::Repetition),
            _ if u.has_flag(Flag::Summary) => Some(Signal::Summary),
            _ => None,
        };
        if let Some(kind) = kind {
            if assignments[t + 1].controller == speaker {
                match kind {
                    Signal::Prompt => audit.uptake_failures.prompt += 1,
                    Signal::Repetition => audit.uptake_failures.repetition += 1,
                    _ => audit.uptake_failures.summary += 1,
                }
            }
        }
    }
    audit.signal_without_uptake = audit.uptake_failures.total();
    audit
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassCount {
    pub count: usize,
    /// Share of all shifts, rounded to a whole percent.
    pub percent: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftDistribution {
    pub total: usize,
    pub prompt: ClassCount,
    pub repetition: ClassCount,
    pub summary: ClassCount,
    pub repetition_or_summary: ClassCount,
    pub interruption: ClassCount,
    pub vital_fact: ClassCount,
    pub response_to_vital_fact: ClassCount,
    pub clarification: ClassCount,
    pub unclassified: ClassCount,
}

/// `100 * count / total` rounded half up, `None` when `total` is zero.
pub fn percent(count: usize, total: usize) -> Option<u32> {
    (total > 0).then(|| ((200 * count + total) / (2 * total)) as u32)
}

pub fn shift_distribution<'a, I>(shifts: I) -> ShiftDistribution
where
    I: IntoIterator<Item = &'a ControlShift>,
{
    let mut by_signal: BTreeMap<Signal, usize> = BTreeMap::new();
    let mut by_kind: BTreeMap<InterruptionKind, usize> = BTreeMap::new();
    let mut total = 0;
    for s in shifts {
        total += 1;
        *by_signal.entry(s.signal).or_default() += 1;
        if let Some(k) = s.interruption_subtype {
            *by_kind.entry(k).or_default() += 1;
        }
    }
    let class = |count: usize| ClassCount {
        count,
        percent: percent(count, total),
    };
    let sig = |s: Signal| by_signal.get(&s).copied().unwrap_or(0);
    let kind = |k: InterruptionKind| class(by_kind.get(&k).copied().unwrap_or(0));
    ShiftDistribution {
        total,
        prompt: class(sig(Signal::Prompt)),
        repetition: class(sig(Signal::Repetition)),
        summary: class(sig(Signal::Summary)),
        repetition_or_summary: class(sig(Signal::Repetition) + sig(Signal::Summary)),
        interruption: class(sig(Signal::Interruption)),
        vital_fact: kind(InterruptionKind::VitalFact),
        response_to_vital_fact: kind(InterruptionKind::ResponseToVitalFact),
        clarification: kind(InterruptionKind::Clarification),
        unclassified: kind(InterruptionKind::Unclassified),
    }
}
