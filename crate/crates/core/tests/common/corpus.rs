//! Planted corpora with known shift, cue, topic and judge structure.

use std::path::{Path, PathBuf};

use dlgctl::shifts::Signal;
use dlgctl::transcript::{serialize_judges, serialize_transcript, JudgeMatrix, Role};

use super::{
    build, fit_lengths, matrix, solve_topics, topic, votes_row, Exit, PhasePlan, Planned, Taking,
    TopicTarget,
};

/// Exit sequences of the four dialogues. `P` prompt, `R` repetition, `S`
/// summary, `V` vital fact, `Re` response, `Cq` clarifying question, `Cc`
/// question about a command.
const SHIFT_PLAN: [&[&str]; 4] = [
    &[
        "P", "V", "Re", "P", "R", "S", "P", "Cq", "P", "S", "V", "Re", "P",
    ],
    &[
        "P", "S", "R", "P", "V", "Re", "Cc", "P", "S", "P", "Re", "P", "R",
    ],
    &[
        "P", "R", "S", "P", "Cq", "V", "Re", "P", "S", "P", "Cc", "S", "P", "R",
    ],
    &[
        "P", "S", "V", "Re", "P", "Cq", "R", "P", "Re", "S", "P", "V", "Re", "Cc", "P", "P",
    ],
];

pub const TURNS: [usize; 4] = [112, 112, 113, 113];
pub const FILLERS: usize = 19;

/// Signal classes used to spread cue words and topic shifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Prompt,
    Repetition,
    Summary,
    Vital,
    Response,
    Clarification,
}

impl Class {
    fn parse(code: &str) -> (Class, Exit) {
        match code {
            "P" => (Class::Prompt, Exit::Prompt),
            "R" => (Class::Repetition, Exit::Repetition),
            "S" => (Class::Summary, Exit::Summary),
            "V" => (Class::Vital, Exit::Interrupt(Taking::Vital)),
            "Re" => (Class::Response, Exit::Interrupt(Taking::Response)),
            "Cq" => (Class::Clarification, Exit::Interrupt(Taking::Clarify)),
            "Cc" => (Class::Clarification, Exit::ClarifyAfterCommand),
            other => panic!("unknown plan code {other}"),
        }
    }

    /// How many of the class carry a cue word.
    fn cued(self) -> usize {
        match self {
            Class::Prompt => 0,
            Class::Repetition => 3,
            Class::Summary => 6,
            Class::Vital => 3,
            Class::Response => 5,
            Class::Clarification => 4,
        }
    }

    pub fn signal(self) -> Signal {
        match self {
            Class::Prompt => Signal::Prompt,
            Class::Repetition => Signal::Repetition,
            Class::Summary => Signal::Summary,
            _ => Signal::Interruption,
        }
    }
}

/// Whether item `i` of `n` is among `k` spread evenly.
pub fn spread(i: usize, k: usize, n: usize) -> bool {
    (i + 1) * k / n > i * k / n
}

fn class_total(c: Class) -> usize {
    SHIFT_PLAN
        .iter()
        .flat_map(|d| d.iter())
        .filter(|code| Class::parse(code).0 == c)
        .count()
}

/// Topic shifts per signal: 9 of 21 prompts, 5 of 15 repetitions and
/// summaries, 2 of 20 interruptions.
fn topic_quota(signal: Signal) -> (usize, usize) {
    match signal {
        Signal::Prompt => (9, 21),
        Signal::Repetition | Signal::Summary => (5, 15),
        Signal::Interruption => (2, 20),
    }
}

pub struct PlantedCorpus {
    pub dialogues: Vec<Planned>,
    /// Per dialogue, per shift: planted topic-shift decision.
    pub topic_shift: Vec<Vec<bool>>,
    pub judges: Vec<JudgeMatrix>,
}

/// 450 turns, 56 shifts split 21/6/9/20, cue words on 21 of the 35
/// non-prompt shifts and 19 elsewhere; judge votes with 24 unanimous rows,
/// 22 rows with one dissent and 10 split 3-2.
pub fn planted_corpus() -> PlantedCorpus {
    let mut class_seen = [0usize; 6];
    let mut signal_seen = [0usize; 4];
    let total_phases: usize = SHIFT_PLAN.iter().map(|d| d.len() + 1).sum();
    let mut phase_no = 0;
    let mut dialogues = Vec::new();
    let mut topic_shift = Vec::new();
    for (d, codes) in SHIFT_PLAN.iter().enumerate() {
        let mut phases = Vec::new();
        let mut topics = Vec::new();
        let mut who = Role::Expert;
        for code in codes.iter() {
            let (class, exit) = Class::parse(code);
            let ci = class as usize;
            let mut p = PhasePlan::new(who, exit);
            p.cue = spread(class_seen[ci], class.cued(), class_total(class));
            class_seen[ci] += 1;
            let signal = class.signal();
            let si = Signal::ALL.iter().position(|s| *s == signal).unwrap();
            let (k, n) = topic_quota(signal);
            let si_seen = match signal {
                Signal::Repetition | Signal::Summary => {
                    let i = signal_seen[1];
                    signal_seen[1] += 1;
                    i
                }
                _ => {
                    let i = signal_seen[si];
                    signal_seen[si] += 1;
                    i
                }
            };
            topics.push(spread(si_seen, k, n));
            p.fillers = usize::from(spread(phase_no, FILLERS, total_phases));
            phase_no += 1;
            phases.push(p);
            who = who.other();
        }
        let mut last = PhasePlan::new(who, Exit::End);
        last.fillers = usize::from(spread(phase_no, FILLERS, total_phases));
        phase_no += 1;
        phases.push(last);
        fit_lengths(&mut phases, TURNS[d]);
        dialogues.push(build(&format!("planted-{}", d + 1), &phases));
        topic_shift.push(topics);
    }

    let levels: Vec<usize> = [vec![5; 24], vec![4; 22], vec![3; 10]].concat();
    let n = levels.len();
    let mut row = 0;
    let judges = dialogues
        .iter()
        .zip(&topic_shift)
        .map(|(p, decisions)| {
            let rows = decisions
                .iter()
                .map(|&decision| {
                    let agree = levels[(row * 17) % n];
                    row += 1;
                    votes_row(decision, agree, 5, row)
                })
                .collect();
            matrix(&p.dialogue.id, rows)
        })
        .collect();
    PlantedCorpus {
        dialogues,
        topic_shift,
        judges,
    }
}

/// Per-topic control counts of the four central-shift dialogues with the
/// planted split. Client-dominated topics come before the split and
/// expert-dominated ones after it, except the first topic of dialogues 1, 3
/// and 4. The initiator changes only after a topic of odd length. The first
/// topics of dialogues 2 and 4 are not dominated by their initiator.
pub fn topic_targets() -> Vec<(Vec<TopicTarget>, usize)> {
    use Role::{Client as C, Expert as E};
    vec![
        (
            vec![
                topic(E, 1, 4),
                topic(C, 6, 2),
                topic(C, 4, 1),
                topic(E, 5, 15),
                topic(E, 7, 18),
            ],
            3,
        ),
        (
            vec![
                topic(E, 10, 3),
                topic(C, 7, 3),
                topic(C, 5, 2),
                topic(E, 6, 8),
                topic(E, 5, 7),
                topic(E, 5, 8),
            ],
            3,
        ),
        (
            vec![
                topic(E, 1, 4),
                topic(C, 5, 1),
                topic(C, 6, 1),
                topic(E, 1, 5),
                topic(E, 1, 6),
            ],
            3,
        ),
        (
            vec![
                topic(C, 2, 4),
                topic(C, 7, 1),
                topic(C, 7, 1),
                topic(C, 5, 0),
                topic(E, 0, 5),
            ],
            4,
        ),
    ]
}

pub struct TopicCorpus {
    pub dialogues: Vec<Planned>,
    pub targets: Vec<Vec<TopicTarget>>,
    pub splits: Vec<usize>,
    pub judges: Vec<JudgeMatrix>,
}

pub fn topic_corpus() -> TopicCorpus {
    let mut out = TopicCorpus {
        dialogues: Vec::new(),
        targets: Vec::new(),
        splits: Vec::new(),
        judges: Vec::new(),
    };
    for (i, (targets, split)) in topic_targets().into_iter().enumerate() {
        let solved = solve_topics(&targets);
        let phases: Vec<PhasePlan> = solved.iter().map(|(p, _)| p.clone()).collect();
        let planned = build(&format!("topics-{}", i + 1), &phases);
        let rows = solved
            .iter()
            .filter(|(p, _)| p.exit != Exit::End)
            .enumerate()
            .map(|(j, &(_, shift))| votes_row(shift, 4 + j % 2, 5, j))
            .collect();
        out.judges.push(matrix(&planned.dialogue.id, rows));
        out.dialogues.push(planned);
        out.targets.push(targets);
        out.splits.push(split);
    }
    out
}

/// Writes transcripts and judge files; returns their paths in order.
pub fn write_corpus(
    dir: &Path,
    dialogues: &[Planned],
    judges: &[JudgeMatrix],
) -> (Vec<PathBuf>, Vec<PathBuf>) {
    let mut dlg = Vec::new();
    let mut tsv = Vec::new();
    for p in dialogues {
        let path = dir.join(format!("{}.dlg", p.dialogue.id));
        std::fs::write(&path, serialize_transcript(&p.dialogue)).unwrap();
        dlg.push(path);
    }
    for m in judges {
        let path = dir.join(format!("{}.tsv", m.dialogue_id));
        std::fs::write(&path, serialize_judges(m)).unwrap();
        tsv.push(path);
    }
    (dlg, tsv)
}
