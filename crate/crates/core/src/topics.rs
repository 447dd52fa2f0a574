//! Topic analysis over adjudicated judge votes: topic segmentation, shift
//! type against topic shift, initiation and the central shift.

use serde::Serialize;

use crate::control::ControlAssignment;
use crate::shifts::{percent, ControlShift, Signal};
use crate::transcript::{Dialogue, JudgeMatrix, Role};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopicError {
    #[error("judge file for `{dialogue}` has {rows} rows but the dialogue has {shifts} shifts")]
    RowMismatch {
        dialogue: String,
        rows: usize,
        shifts: usize,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AgreementSummary {
    pub shifts: usize,
    pub topic_shifts: usize,
    /// Rows on which every judge agreed.
    pub unanimous: usize,
    /// Rows with exactly one dissenting judge.
    pub one_dissent: usize,
}

impl AgreementSummary {
    pub fn merge(&mut self, other: &AgreementSummary) {
        self.shifts += other.shifts;
        self.topic_shifts += other.topic_shifts;
        self.unanimous += other.unanimous;
        self.one_dissent += other.one_dissent;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Adjudication {
    pub judges: usize,
    /// One entry per shift: was it a topic shift.
    pub decisions: Vec<bool>,
    pub summary: AgreementSummary,
}

/// Majority decision per row. A tie counts as no topic shift.
pub fn majority(row: &[bool]) -> bool {
    let yes = row.iter().filter(|&&v| v).count();
    2 * yes > row.len()
}

pub fn adjudicate(matrix: &JudgeMatrix, shift_count: usize) -> Result<Adjudication, TopicError> {
    if matrix.rows() != shift_count {
        return Err(TopicError::RowMismatch {
            dialogue: matrix.dialogue_id.clone(),
            rows: matrix.rows(),
            shifts: shift_count,
        });
    }
    let judges = matrix.judge_count();
    let mut summary = AgreementSummary {
        shifts: shift_count,
        ..AgreementSummary::default()
    };
    let mut decisions = Vec::with_capacity(shift_count);
    for row in &matrix.votes {
        let yes = row.iter().filter(|&&v| v).count();
        let agree = yes.max(row.len() - yes);
        if agree == judges {
            summary.unanimous += 1;
        } else if agree + 1 == judges {
            summary.one_dissent += 1;
        }
        let d = majority(row);
        summary.topic_shifts += usize::from(d);
        decisions.push(d);
    }
    Ok(Adjudication {
        judges,
        decisions,
        summary,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CrosstabRow {
    pub total: usize,
    pub within_topic: usize,
    pub topic_shift: usize,
    /// Share of the class that stays within topic, rounded to a whole percent.
    pub within_percent: Option<u32>,
}

impl CrosstabRow {
    fn add(&mut self, topic_shift: bool) {
        self.total += 1;
        if topic_shift {
            self.topic_shift += 1;
        } else {
            self.within_topic += 1;
        }
        self.within_percent = percent(self.within_topic, self.total);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Crosstab {
    pub prompt: CrosstabRow,
    pub repetition: CrosstabRow,
    pub summary: CrosstabRow,
    pub repetition_or_summary: CrosstabRow,
    pub interruption: CrosstabRow,
    pub all: CrosstabRow,
}

/// Signal class against topic shift, over `(shift, is_topic_shift)` pairs.
pub fn crosstab<'a, I>(pairs: I) -> Crosstab
where
    I: IntoIterator<Item = (&'a ControlShift, bool)>,
{
    let mut t = Crosstab::default();
    for (s, topic) in pairs {
        match s.signal {
            Signal::Prompt => t.prompt.add(topic),
            Signal::Repetition => {
                t.repetition.add(topic);
                t.repetition_or_summary.add(topic);
            }
            Signal::Summary => {
                t.summary.add(topic);
                t.repetition_or_summary.add(topic);
            }
            Signal::Interruption => t.interruption.add(topic),
        }
        t.all.add(topic);
    }
    t
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ControlCounts {
    pub client: usize,
    pub expert: usize,
}

impl ControlCounts {
    pub fn get(&self, role: Role) -> usize {
        match role {
            Role::Expert => self.expert,
            Role::Client => self.client,
        }
    }

    pub fn add(&mut self, role: Role) {
        match role {
            Role::Expert => self.expert += 1,
            Role::Client => self.client += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.client + self.expert
    }

    /// The participant with strictly more turns, if any.
    pub fn dominant(&self) -> Option<Role> {
        match self.client.cmp(&self.expert) {
            std::cmp::Ordering::Greater => Some(Role::Client),
            std::cmp::Ordering::Less => Some(Role::Expert),
            std::cmp::Ordering::Equal => None,
        }
    }
}

impl std::ops::AddAssign for ControlCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.client += rhs.client;
        self.expert += rhs.expert;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Topic {
    pub index: usize,
    pub start_turn: usize,
    /// Inclusive.
    pub end_turn: usize,
    pub initiator: Role,
    pub control_counts: ControlCounts,
    /// Ordinal of the shift that opened this topic; `None` for the first.
    pub opened_by_shift: Option<usize>,
}

/// Splits the dialogue at the boundaries of shifts adjudicated as topic
/// shifts.
pub fn segment_topics(
    d: &Dialogue,
    assignments: &[ControlAssignment],
    shifts: &[ControlShift],
    decisions: &[bool],
) -> Vec<Topic> {
    let n = d.turns.len();
    let mut starts: Vec<(usize, Option<usize>)> = vec![(0, None)];
    for (s, _) in shifts.iter().zip(decisions).filter(|(_, &d)| d) {
        let start = s.boundary_after + 1;
        if start < n && starts.last().is_some_and(|&(last, _)| start > last) {
            starts.push((start, Some(s.ordinal)));
        }
    }
    if n == 0 {
        return Vec::new();
    }
    starts
        .iter()
        .enumerate()
        .map(|(index, &(start, opened_by_shift))| {
            let end = starts.get(index + 1).map_or(n - 1, |&(next, _)| next - 1);
            let mut control_counts = ControlCounts::default();
            for a in &assignments[start..=end] {
                control_counts.add(a.controller);
            }
            Topic {
                index,
                start_turn: start,
                end_turn: end,
                initiator: d.turns[start].speaker,
                control_counts,
                opened_by_shift,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentralShiftReport {
    pub dialogue_id: String,
    /// Number of topics before the central shift.
    pub boundary: usize,
    /// First turn after the central shift, if the boundary is not at the end.
    pub boundary_turn: Option<usize>,
    /// Client-dominated topics before plus expert-dominated topics after.
    pub consistency: usize,
    pub topic_count: usize,
    pub before: ControlCounts,
    pub after: ControlCounts,
}

/// Consistency of placing the central shift before topic `b`.
pub fn consistency_at(topics: &[Topic], b: usize) -> usize {
    let before = topics[..b]
        .iter()
        .filter(|t| t.control_counts.dominant() == Some(Role::Client))
        .count();
    let after = topics[b..]
        .iter()
        .filter(|t| t.control_counts.dominant() == Some(Role::Expert))
        .count();
    before + after
}

/// The boundary that best separates client-led topics from expert-led ones.
/// Candidates run from before the first topic to after the last; the
/// earliest best boundary wins. Absent with fewer than two topics.
pub fn find_central_shift(dialogue_id: &str, topics: &[Topic]) -> Option<CentralShiftReport> {
    if topics.len() < 2 {
        return None;
    }
    let mut best = 0;
    let mut best_score = consistency_at(topics, 0);
    for b in 1..=topics.len() {
        let score = consistency_at(topics, b);
        if score > best_score {
            best = b;
            best_score = score;
        }
    }
    let sum = |ts: &[Topic]| {
        let mut c = ControlCounts::default();
        for t in ts {
            c += t.control_counts;
        }
        c
    };
    Some(CentralShiftReport {
        dialogue_id: dialogue_id.to_string(),
        boundary: best,
        boundary_turn: topics.get(best).map(|t| t.start_turn),
        consistency: best_score,
        topic_count: topics.len(),
        before: sum(&topics[..best]),
        after: sum(&topics[best..]),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct InitiationDominance {
    pub topics: usize,
    /// The initiator controlled strictly more turns.
    pub initiator_dominant: usize,
    /// The other participant controlled strictly more turns.
    pub other_dominant: usize,
    /// Equal control.
    pub ties: usize,
}

impl InitiationDominance {
    pub fn merge(&mut self, other: &InitiationDominance) {
        self.topics += other.topics;
        self.initiator_dominant += other.initiator_dominant;
        self.other_dominant += other.other_dominant;
        self.ties += other.ties;
    }

    pub fn fraction(&self) -> Option<f64> {
        (self.topics > 0).then(|| self.initiator_dominant as f64 / self.topics as f64)
    }
}

pub fn initiation_dominance(topics: &[Topic]) -> InitiationDominance {
    let mut r = InitiationDominance::default();
    for t in topics {
        r.topics += 1;
        match t.control_counts.dominant() {
            Some(role) if role == t.initiator => r.initiator_dominant += 1,
            Some(_) => r.other_dominant += 1,
            None => r.ties += 1,
        }
    }
    r
}
