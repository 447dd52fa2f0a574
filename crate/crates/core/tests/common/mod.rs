//! Dialogue builders with known ground truth, shared by the integration
//! tests and the acceptance runner.

#![allow(dead_code)]

pub mod corpus;

use dlgctl::shifts::{InterruptionKind, Signal};
use dlgctl::transcript::{
    Dialogue, Flag, JudgeMatrix, Participants, Role, Utterance, UtteranceType,
};

/// How the interrupting turn opens the next phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Taking {
    Plain,
    Vital,
    Response,
    Clarify,
}

/// How a phase hands control to the next one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    /// The controller abdicates with "Mm".
    Prompt,
    Repetition,
    Summary,
    /// The other party takes the next turn unprompted.
    Interrupt(Taking),
    /// The controller gives a command, the other party asks about it and the
    /// answer hands control over.
    ClarifyAfterCommand,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Entry {
    Normal,
    Taking(Taking),
    Answer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePlan {
    pub controller: Role,
    /// Display length in turns; 0 means "as short as allowed".
    pub len: usize,
    pub exit: Exit,
    /// Put a cue word on the signal of the exit shift.
    pub cue: bool,
    /// Plain assertions in this phase opened with "And".
    pub fillers: usize,
}

impl PhasePlan {
    pub fn new(controller: Role, exit: Exit) -> Self {
        PhasePlan {
            controller,
            len: 0,
            exit,
            cue: false,
            fillers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedShift {
    pub boundary_after: usize,
    pub signal: Signal,
    pub subtype: Option<InterruptionKind>,
    pub signal_turn: usize,
    pub cued: bool,
}

#[derive(Debug, Clone)]
pub struct Planned {
    pub dialogue: Dialogue,
    /// Controller of each turn under the mechanical rules.
    pub controllers: Vec<Role>,
    /// Controller of the display phase each turn belongs to.
    pub display: Vec<Role>,
    pub shifts: Vec<PlannedShift>,
    /// First turn of each display phase.
    pub phase_starts: Vec<usize>,
    pub fillers: usize,
}

fn entry_after(exit: Option<Exit>) -> Entry {
    match exit {
        Some(Exit::Interrupt(k)) => Entry::Taking(k),
        Some(Exit::ClarifyAfterCommand) => Entry::Answer,
        _ => Entry::Normal,
    }
}

/// Turns at the start of a phase reserved by its entry.
fn reserved(entry: Entry) -> usize {
    match entry {
        Entry::Normal => 0,
        Entry::Taking(Taking::Clarify) => 2,
        Entry::Taking(_) | Entry::Answer => 1,
    }
}

/// Whether the controller speaks at position `i` of the phase.
fn controller_at(entry: Entry, i: usize) -> bool {
    (entry == Entry::Answer) != i.is_multiple_of(2)
}

/// Positions used by the exit.
fn exit_positions(exit: Exit, len: usize) -> Vec<usize> {
    match exit {
        Exit::End => vec![],
        Exit::ClarifyAfterCommand => vec![len - 2, len - 1],
        _ => vec![len - 1],
    }
}

fn valid_len(entry: Entry, exit: Exit, len: usize, fillers: usize) -> bool {
    let r = reserved(entry);
    if len == 0 || len < r {
        return false;
    }
    let ok = match exit {
        Exit::Prompt => controller_at(entry, len - 1) && len > r.max(1),
        Exit::Repetition | Exit::Summary | Exit::Interrupt(_) => {
            controller_at(entry, len - 1) && len > r
        }
        Exit::ClarifyAfterCommand => len >= 2 && !controller_at(entry, len - 1) && len - 2 >= r,
        Exit::End => true,
    };
    ok && free_positions(entry, exit, len).len() >= fillers
}

/// Controller positions not used by the entry or the exit.
fn free_positions(entry: Entry, exit: Exit, len: usize) -> Vec<usize> {
    let used = exit_positions(exit, len);
    (reserved(entry)..len)
        .filter(|&i| controller_at(entry, i) && !used.contains(&i))
        .collect()
}

/// Shortest valid display length.
fn min_len(entry: Entry, exit: Exit, fillers: usize) -> usize {
    (1..).find(|&l| valid_len(entry, exit, l, fillers)).unwrap()
}

/// Turn counts each party controls in a phase of the given length.
pub fn phase_counts(exit: Exit, len: usize) -> (usize, usize) {
    match exit {
        Exit::Prompt => (len - 1, 1),
        _ => (len, 0),
    }
}

/// Fills in `len` for every phase so the dialogue has `total` turns. Phases
/// with `len` already set keep it; the rest grow two turns at a time.
pub fn fit_lengths(phases: &mut [PhasePlan], total: usize) {
    let mut prev = None;
    let mut growable = Vec::new();
    for (i, p) in phases.iter_mut().enumerate() {
        let entry = entry_after(prev);
        if p.len == 0 {
            p.len = min_len(entry, p.exit, p.fillers);
            growable.push(i);
        } else {
            assert!(
                valid_len(entry, p.exit, p.len, p.fillers),
                "phase {i}: bad length {}",
                p.len
            );
        }
        prev = Some(p.exit);
    }
    let used: usize = phases.iter().map(|p| p.len).sum();
    assert!(used <= total, "plan needs {used} turns, more than {total}");
    let spare = total - used;
    assert!(
        spare.is_multiple_of(2),
        "plan parity: {used} turns against {total}"
    );
    assert!(spare == 0 || !growable.is_empty(), "nothing to grow");
    for k in 0..spare / 2 {
        phases[growable[k % growable.len()]].len += 2;
    }
}

struct Writer {
    items: Vec<(Role, Utterance)>,
    next_item: usize,
    last_item: usize,
    prompt_cycle: usize,
}

const PROMPTS: [&str; 3] = ["Right", "Uhu", "OK"];

impl Writer {
    fn item(&mut self) -> usize {
        self.next_item += 1;
        self.last_item = self.next_item;
        self.next_item
    }

    fn push(&mut self, who: Role, kind: UtteranceType, text: String, flags: &[Flag]) {
        let mut u = Utterance::new(text, Some(kind));
        for f in flags {
            u.flags.insert(*f);
        }
        self.items.push((who, u));
    }

    fn assertion(&mut self, who: Role, filler: bool) {
        let n = self.item();
        let text = if filler {
            format!("And the item{n} reports a fault")
        } else {
            format!("The item{n} reports a fault")
        };
        self.push(who, UtteranceType::Assertion, text, &[]);
    }

    fn prompt(&mut self, who: Role) {
        let text = PROMPTS[self.prompt_cycle % PROMPTS.len()].to_string();
        self.prompt_cycle += 1;
        self.push(who, UtteranceType::Prompt, text, &[]);
    }
}

/// Builds a dialogue from display-phase plans. Controllers must alternate
/// and every length must already be valid (see [`fit_lengths`]).
pub fn build(id: &str, phases: &[PhasePlan]) -> Planned {
    use UtteranceType::*;
    let mut w = Writer {
        items: Vec::new(),
        next_item: 0,
        last_item: 0,
        prompt_cycle: 0,
    };
    let mut controllers = Vec::new();
    let mut display = Vec::new();
    let mut shifts: Vec<PlannedShift> = Vec::new();
    let mut phase_starts = Vec::new();
    let mut fillers = 0;
    let mut prev_exit: Option<Exit> = None;
    let mut pending: Option<PlannedShift> = None;

    for (k, p) in phases.iter().enumerate() {
        let x = p.controller;
        let y = x.other();
        if k > 0 {
            assert_eq!(
                phases[k - 1].controller,
                y,
                "phase {k}: controllers must alternate"
            );
        }
        assert_eq!(
            p.exit == Exit::End,
            k + 1 == phases.len(),
            "phase {k}: End only last"
        );
        let entry = entry_after(prev_exit);
        let len = p.len;
        assert!(
            valid_len(entry, p.exit, len, p.fillers),
            "phase {k}: bad length {len}"
        );
        let start = w.items.len();
        phase_starts.push(start);
        if let Some(s) = pending.take() {
            shifts.push(s);
        }
        let after_vital = shifts
            .last()
            .is_some_and(|s| s.subtype == Some(InterruptionKind::VitalFact));
        let filler_at: Vec<usize> = free_positions(entry, p.exit, len)
            .into_iter()
            .take(p.fillers)
            .collect();
        fillers += filler_at.len();
        let last_exit = exit_positions(p.exit, len);

        for i in 0..len {
            let who = if controller_at(entry, i) { x } else { y };
            let mut mech = x;
            match (entry, i) {
                (Entry::Taking(kind), 0) => {
                    let cue = phases[k - 1].cue;
                    let n = w.item();
                    let (text, kind_, flags): (String, _, &[Flag]) = match kind {
                        Taking::Plain => (
                            format!("{}the item{n} needs a check", if cue { "Now " } else { "" }),
                            Assertion,
                            &[],
                        ),
                        Taking::Vital if cue => (
                            format!("Well actually the item{n} was replaced"),
                            Assertion,
                            &[Flag::VitalFact],
                        ),
                        Taking::Vital => (
                            format!("The item{n} was replaced"),
                            Assertion,
                            &[Flag::VitalFact],
                        ),
                        Taking::Response => (
                            format!("{}the item{n} explains it", if cue { "But " } else { "" }),
                            Assertion,
                            &[],
                        ),
                        Taking::Clarify => (
                            format!("{}is the item{n} on?", if cue { "So " } else { "" }),
                            Question,
                            &[],
                        ),
                    };
                    let text = capitalize(&text);
                    w.push(who, kind_, text, flags);
                }
                (Entry::Taking(Taking::Clarify), 1) | (Entry::Answer, 0) => {
                    let n = w.last_item;
                    w.push(who, Assertion, format!("Yes the item{n} is on"), &[]);
                }
                _ if last_exit.contains(&i) => match p.exit {
                    Exit::Prompt => {
                        w.push(who, Prompt, "Mm".into(), &[]);
                        mech = y;
                    }
                    Exit::Repetition => {
                        let n = w.last_item;
                        let text = if p.cue {
                            format!("So item{n}")
                        } else {
                            format!("item{n}")
                        };
                        w.push(who, Assertion, text, &[Flag::Repetition]);
                    }
                    Exit::Summary => {
                        let n = w.item();
                        let text = if p.cue {
                            format!("And that covers the overview{n}")
                        } else {
                            format!("That covers the overview{n}")
                        };
                        w.push(who, Assertion, text, &[Flag::Summary]);
                    }
                    Exit::Interrupt(kind) => {
                        let n = w.item();
                        let vital = kind == Taking::Response && !after_vital;
                        let flags: &[Flag] = if vital { &[Flag::VitalFact] } else { &[] };
                        w.push(
                            who,
                            Assertion,
                            format!("The item{n} reports a fault"),
                            flags,
                        );
                    }
                    Exit::ClarifyAfterCommand if i == len - 2 => {
                        let n = w.item();
                        w.push(who, Command, format!("Reset the item{n}"), &[]);
                    }
                    Exit::ClarifyAfterCommand => {
                        let n = w.last_item;
                        let text = if p.cue {
                            format!("So which item{n}?")
                        } else {
                            format!("Which item{n}?")
                        };
                        w.push(who, Question, text, &[]);
                    }
                    Exit::End => unreachable!(),
                },
                _ if who == x => w.assertion(who, filler_at.contains(&i)),
                _ => w.prompt(who),
            }
            controllers.push(mech);
            display.push(x);
        }

        let end = start + len - 1;
        pending = match p.exit {
            Exit::End => None,
            Exit::Prompt => {
                shifts.push(PlannedShift {
                    boundary_after: end,
                    signal: Signal::Prompt,
                    subtype: None,
                    signal_turn: end,
                    cued: false,
                });
                None
            }
            Exit::Repetition | Exit::Summary => {
                shifts.push(PlannedShift {
                    boundary_after: end,
                    signal: if p.exit == Exit::Repetition {
                        Signal::Repetition
                    } else {
                        Signal::Summary
                    },
                    subtype: None,
                    signal_turn: end,
                    cued: p.cue,
                });
                None
            }
            Exit::ClarifyAfterCommand => {
                shifts.push(PlannedShift {
                    boundary_after: end,
                    signal: Signal::Interruption,
                    subtype: Some(InterruptionKind::Clarification),
                    signal_turn: end,
                    cued: p.cue,
                });
                None
            }
            Exit::Interrupt(kind) => {
                if after_vital {
                    assert!(
                        matches!(kind, Taking::Response | Taking::Clarify),
                        "phase {k}: an interruption right after a vital fact is a response"
                    );
                }
                let subtype = match kind {
                    Taking::Plain => InterruptionKind::Unclassified,
                    Taking::Vital => InterruptionKind::VitalFact,
                    Taking::Response => InterruptionKind::ResponseToVitalFact,
                    Taking::Clarify => InterruptionKind::Clarification,
                };
                Some(PlannedShift {
                    boundary_after: end,
                    signal: Signal::Interruption,
                    subtype: Some(subtype),
                    signal_turn: end + 1,
                    cued: p.cue,
                })
            }
        };
        prev_exit = Some(p.exit);
    }

    let dialogue = Dialogue::from_utterances(id, Participants::default(), w.items);
    assert_eq!(
        dialogue.turn_count(),
        controllers.len(),
        "turns must alternate"
    );
    Planned {
        dialogue,
        controllers,
        display,
        shifts,
        phase_starts,
        fillers,
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Phases for one topic: who opens it and the planned control counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopicTarget {
    pub initiator: Role,
    pub client: usize,
    pub expert: usize,
}

pub fn topic(initiator: Role, client: usize, expert: usize) -> TopicTarget {
    TopicTarget {
        initiator,
        client,
        expert,
    }
}

const TOPIC_EXITS: [Exit; 3] = [Exit::Repetition, Exit::Prompt, Exit::ClarifyAfterCommand];
const MAX_PHASE_LEN: usize = 19;
const MAX_PHASES_PER_TOPIC: usize = 6;

fn add(counts: (usize, usize), who: Role, (own, other): (usize, usize)) -> (usize, usize) {
    match who {
        Role::Client => (counts.0 + own, counts.1 + other),
        Role::Expert => (counts.0 + other, counts.1 + own),
    }
}

fn solve_topic(
    targets: &[TopicTarget],
    t: usize,
    controller: Role,
    entry: Entry,
    counts: (usize, usize),
    phases_in_topic: usize,
    out: &mut Vec<(PhasePlan, bool)>,
) -> bool {
    let target = targets[t];
    if phases_in_topic == 0 {
        let opener = if entry == Entry::Answer {
            controller.other()
        } else {
            controller
        };
        if opener != target.initiator {
            return false;
        }
    }
    if phases_in_topic >= MAX_PHASES_PER_TOPIC {
        return false;
    }
    let last_topic = t + 1 == targets.len();
    let mut exits: Vec<Exit> = TOPIC_EXITS.to_vec();
    if last_topic {
        exits.insert(0, Exit::End);
    }
    for exit in exits {
        for len in 1..=MAX_PHASE_LEN {
            if !valid_len(entry, exit, len, 0) {
                continue;
            }
            let c = add(counts, controller, phase_counts(exit, len));
            if c.0 > target.client || c.1 > target.expert {
                continue;
            }
            let done = c == (target.client, target.expert);
            let mut plan = PhasePlan::new(controller, exit);
            plan.len = len;
            if exit == Exit::End {
                if done {
                    out.push((plan, false));
                    return true;
                }
                continue;
            }
            let next_entry = entry_after(Some(exit));
            if done && !last_topic {
                out.push((plan.clone(), true));
                if solve_topic(
                    targets,
                    t + 1,
                    controller.other(),
                    next_entry,
                    (0, 0),
                    0,
                    out,
                ) {
                    return true;
                }
                out.pop();
            }
            out.push((plan, false));
            if solve_topic(
                targets,
                t,
                controller.other(),
                next_entry,
                c,
                phases_in_topic + 1,
                out,
            ) {
                return true;
            }
            out.pop();
        }
    }
    false
}

/// Finds display phases whose topics have exactly the target control counts
/// and openers. Returns each phase with whether its exit is a topic shift.
pub fn solve_topics(targets: &[TopicTarget]) -> Vec<(PhasePlan, bool)> {
    for first in Role::BOTH {
        let mut out = Vec::new();
        if solve_topic(targets, 0, first, Entry::Normal, (0, 0), 0, &mut out) {
            return out;
        }
    }
    panic!("no phase plan for topics {targets:?}");
}

/// Votes where `agree` of `judges` judges side with `decision`.
pub fn votes_row(decision: bool, agree: usize, judges: usize, rotate: usize) -> Vec<bool> {
    assert!(2 * agree > judges && agree <= judges);
    let mut row: Vec<bool> = (0..judges)
        .map(|j| if j < agree { decision } else { !decision })
        .collect();
    row.rotate_right(rotate % judges);
    row
}

pub fn matrix(id: &str, rows: Vec<Vec<bool>>) -> JudgeMatrix {
    JudgeMatrix::new(id, rows).expect("well-formed matrix")
}
