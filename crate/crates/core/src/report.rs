//! Whole-corpus pipeline and report rendering.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::classifier::{classify_dialogue, ClassifierConfig};
use crate::control::{
    allocate_control, mechanical_phases, phase_stats, segment_phases, ControlAssignment, Phase,
    PhaseStats,
};
use crate::shifts::{
    analyze_shifts, audit_cues, shift_distribution, ControlShift, CueAudit, ShiftConfig,
    ShiftDistribution,
};
use crate::topics::{
    adjudicate, crosstab, find_central_shift, initiation_dominance, segment_topics, Adjudication,
    AgreementSummary, CentralShiftReport, Crosstab, InitiationDominance, Topic, TopicError,
};
use crate::transcript::{
    parse_judges_with, parse_transcript, Dialogue, JudgeError, JudgeMatrix, ParseError,
};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Default)]
pub struct PipelineConfig {
    pub classifier: ClassifierConfig,
    pub shifts: ShiftConfig,
    /// Report maximal same-controller runs instead of the display phases.
    pub mechanical: bool,
    /// Votes per row expected in judge files; taken from the file if unset.
    pub judge_count: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("no transcripts given")]
    NoInputs,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Judges { path: PathBuf, source: JudgeError },
    #[error("{path}: {source}")]
    Topics { path: PathBuf, source: TopicError },
    #[error("{judges} judge files for {transcripts} transcripts")]
    JudgeFileCount { judges: usize, transcripts: usize },
    #[error("dialogue id `{0}` appears more than once")]
    DuplicateId(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicSection {
    pub adjudication: Adjudication,
    pub topics: Vec<Topic>,
    pub crosstab: Crosstab,
    pub central_shift: Option<CentralShiftReport>,
    pub initiation_dominance: InitiationDominance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DialogueSection {
    pub id: String,
    pub turn_count: usize,
    pub assignments: Vec<ControlAssignment>,
    pub phases: Vec<Phase>,
    pub shifts: Vec<ControlShift>,
    pub distribution: ShiftDistribution,
    pub cue_audit: CueAudit,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topics: Option<TopicSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub phase_stats: PhaseStats,
    pub distribution: ShiftDistribution,
    pub cue_audit: CueAudit,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<AgreementSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crosstab: Option<Crosstab>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initiation_dominance: Option<InitiationDominance>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub schema_version: &'static str,
    pub dialogues: Vec<DialogueSection>,
    pub aggregate: Aggregate,
}

/// Runs one dialogue through every stage. `d` may be unclassified.
pub fn analyze_dialogue(
    d: Dialogue,
    judges: Option<&JudgeMatrix>,
    cfg: &PipelineConfig,
) -> Result<DialogueSection, TopicError> {
    let d = classify_dialogue(d, &cfg.classifier);
    let assignments = allocate_control(&d);
    let phases = if cfg.mechanical {
        mechanical_phases(&assignments)
    } else {
        segment_phases(&assignments)
    };
    let shifts = analyze_shifts(&d, &assignments, &cfg.classifier, &cfg.shifts);
    let distribution = shift_distribution(&shifts);
    let cue_audit = audit_cues(&d, &assignments, &shifts, &cfg.classifier);
    let mut section = DialogueSection {
        id: d.id.clone(),
        turn_count: d.turn_count(),
        assignments,
        phases,
        shifts,
        distribution,
        cue_audit,
        topics: None,
    };
    if let Some(m) = judges {
        section.topics = Some(topic_section(&d, &section, m)?);
    }
    Ok(section)
}

/// Topic analysis of an analyzed dialogue from its judge votes.
pub fn topic_section(
    d: &Dialogue,
    section: &DialogueSection,
    judges: &JudgeMatrix,
) -> Result<TopicSection, TopicError> {
    let adjudication = adjudicate(judges, section.shifts.len())?;
    let topics = segment_topics(
        d,
        &section.assignments,
        &section.shifts,
        &adjudication.decisions,
    );
    Ok(TopicSection {
        crosstab: crosstab(
            section
                .shifts
                .iter()
                .zip(adjudication.decisions.iter().copied()),
        ),
        central_shift: find_central_shift(&d.id, &topics),
        initiation_dominance: initiation_dominance(&topics),
        adjudication,
        topics,
    })
}

/// Orders sections by dialogue id and folds the corpus aggregates.
pub fn build_report(mut dialogues: Vec<DialogueSection>) -> CorpusReport {
    dialogues.sort_by(|a, b| a.id.cmp(&b.id));
    let phase_stats = phase_stats(dialogues.iter().map(|d| d.assignments.as_slice()));
    let distribution = shift_distribution(dialogues.iter().flat_map(|d| &d.shifts));
    let mut cue_audit = CueAudit::default();
    for d in &dialogues {
        cue_audit.merge(&d.cue_audit);
    }

    let with_topics: Vec<(&DialogueSection, &TopicSection)> = dialogues
        .iter()
        .filter_map(|d| d.topics.as_ref().map(|t| (d, t)))
        .collect();
    let (agreement, crosstab_all, dominance) = if with_topics.is_empty() {
        (None, None, None)
    } else {
        let mut agreement = AgreementSummary::default();
        let mut dominance = InitiationDominance::default();
        for (_, t) in &with_topics {
            agreement.merge(&t.adjudication.summary);
            dominance.merge(&t.initiation_dominance);
        }
        let pairs = with_topics.iter().flat_map(|(d, t)| {
            d.shifts
                .iter()
                .zip(t.adjudication.decisions.iter().copied())
        });
        (Some(agreement), Some(crosstab(pairs)), Some(dominance))
    };

    CorpusReport {
        schema_version: SCHEMA_VERSION,
        aggregate: Aggregate {
            phase_stats,
            distribution,
            cue_audit,
            agreement,
            crosstab: crosstab_all,
            initiation_dominance: dominance,
        },
        dialogues,
    }
}

fn read(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_transcript(path: &Path) -> Result<Dialogue, PipelineError> {
    parse_transcript(&read(path)?).map_err(|source| PipelineError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses every transcript, pairs the i-th judge file with the i-th
/// transcript and builds the corpus report.
pub fn run_pipeline(
    transcripts: &[PathBuf],
    judges: &[PathBuf],
    cfg: &PipelineConfig,
) -> Result<CorpusReport, PipelineError> {
    if transcripts.is_empty() {
        return Err(PipelineError::NoInputs);
    }
    if judges.len() > transcripts.len() {
        return Err(PipelineError::JudgeFileCount {
            judges: judges.len(),
            transcripts: transcripts.len(),
        });
    }
    let mut seen = BTreeSet::new();
    let mut sections = Vec::with_capacity(transcripts.len());
    for (i, path) in transcripts.iter().enumerate() {
        let d = load_transcript(path)?;
        if !seen.insert(d.id.clone()) {
            return Err(PipelineError::DuplicateId(d.id));
        }
        let mut section =
            analyze_dialogue(d.clone(), None, cfg).expect("no judges, no topic errors");
        if let Some(jpath) = judges.get(i) {
            let m = parse_judges_with(&read(jpath)?, &d.id, section.shifts.len(), cfg.judge_count)
                .map_err(|source| PipelineError::Judges {
                    path: jpath.clone(),
                    source,
                })?;
            section.topics =
                Some(
                    topic_section(&d, &section, &m).map_err(|source| PipelineError::Topics {
                        path: jpath.clone(),
                        source,
                    })?,
                );
        }
        sections.push(section);
    }
    Ok(build_report(sections))
}

pub fn to_json(report: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report types serialize");
    s.push('\n');
    s
}

fn pct(p: Option<u32>) -> String {
    p.map_or_else(|| "-".to_string(), |p| format!("{p}%"))
}

fn mean(m: Option<f64>) -> String {
    m.map_or_else(|| "-".to_string(), |m| format!("{m:.2}"))
}

pub fn render_phases(out: &mut String, d: &DialogueSection) {
    let _ = writeln!(out, "dialogue {} ({} turns)", d.id, d.turn_count);
    let _ = writeln!(
        out,
        "  {:<5} {:<10} {:>6} {:>6} {:>7}",
        "phase", "controller", "start", "end", "prompt"
    );
    for (i, p) in d.phases.iter().enumerate() {
        let signal = p
            .signal_turn
            .map_or_else(|| "-".to_string(), |t| t.to_string());
        let _ = writeln!(
            out,
            "  {:<5} {:<10} {:>6} {:>6} {:>7}",
            i, p.controller, p.start_turn, p.end_turn, signal
        );
    }
}

pub fn render_shifts(out: &mut String, d: &DialogueSection) {
    let _ = writeln!(out, "dialogue {}", d.id);
    let _ = writeln!(
        out,
        "  {:<3} {:>6} {:<16} {:<12} {:<24} cues",
        "#", "after", "from -> to", "signal", "subtype"
    );
    for s in &d.shifts {
        let subtype = s
            .interruption_subtype
            .map_or_else(|| "-".to_string(), |k| format!("{k:?}"));
        let cues: Vec<&str> = s.cue_words.iter().map(|c| c.word.as_str()).collect();
        let _ = writeln!(
            out,
            "  {:<3} {:>6} {:<16} {:<12} {:<24} {}",
            s.ordinal,
            s.boundary_after,
            format!("{} -> {}", s.from, s.to),
            format!("{:?}", s.signal),
            subtype,
            if cues.is_empty() {
                "-".to_string()
            } else {
                cues.join(",")
            }
        );
    }
}

pub fn render_distribution(out: &mut String, dist: &ShiftDistribution) {
    let _ = writeln!(out, "shifts: {}", dist.total);
    for (name, c) in [
        ("prompt", dist.prompt),
        ("repetition", dist.repetition),
        ("summary", dist.summary),
        ("repetition/summary", dist.repetition_or_summary),
        ("interruption", dist.interruption),
        ("  vital fact", dist.vital_fact),
        ("  response to vital fact", dist.response_to_vital_fact),
        ("  clarification", dist.clarification),
        ("  unclassified", dist.unclassified),
    ] {
        let _ = writeln!(out, "  {:<26} {:>4} {:>5}", name, c.count, pct(c.percent));
    }
}

pub fn render_audit(out: &mut String, a: &CueAudit) {
    let _ = writeln!(out, "cue words at a shift:       {}", a.cue_with_shift);
    let _ = writeln!(out, "cue words elsewhere:        {}", a.cue_without_shift);
    let _ = writeln!(
        out,
        "signals without uptake:     {}",
        a.signal_without_uptake
    );
    let _ = writeln!(
        out,
        "  prompt {} / repetition {} / summary {}",
        a.uptake_failures.prompt, a.uptake_failures.repetition, a.uptake_failures.summary
    );
    let _ = writeln!(
        out,
        "non-prompt shifts with cue: {} of {}",
        a.non_prompt_cue_marked, a.non_prompt_shifts
    );
    if a.cue_prefix_excluded > 0 {
        let _ = writeln!(
            out,
            "cue-prefixed signals skipped: {}",
            a.cue_prefix_excluded
        );
    }
    for (word, c) in &a.per_word {
        let _ = writeln!(
            out,
            "  {:<14} at shift {:>3}  elsewhere {:>3}",
            word, c.with_shift, c.without_shift
        );
    }
}

pub fn render_crosstab(out: &mut String, t: &Crosstab) {
    let _ = writeln!(
        out,
        "  {:<20} {:>6} {:>7} {:>7} {:>7}",
        "signal", "total", "within", "shift", "within%"
    );
    for (name, r) in [
        ("prompt", t.prompt),
        ("repetition", t.repetition),
        ("summary", t.summary),
        ("repetition/summary", t.repetition_or_summary),
        ("interruption", t.interruption),
        ("all", t.all),
    ] {
        let _ = writeln!(
            out,
            "  {:<20} {:>6} {:>7} {:>7} {:>7}",
            name,
            r.total,
            r.within_topic,
            r.topic_shift,
            pct(r.within_percent)
        );
    }
}

pub fn render_topics(out: &mut String, d: &DialogueSection) {
    let Some(t) = &d.topics else {
        return;
    };
    let _ = writeln!(out, "dialogue {}", d.id);
    let s = &t.adjudication.summary;
    let _ = writeln!(
        out,
        "  judges {}: {} topic shifts of {}; unanimous {}, one dissent {}",
        t.adjudication.judges, s.topic_shifts, s.shifts, s.unanimous, s.one_dissent
    );
    let _ = writeln!(
        out,
        "  {:<5} {:>6} {:>6} {:<10} {:>7} {:>7}",
        "topic", "start", "end", "initiator", "client", "expert"
    );
    for topic in &t.topics {
        let _ = writeln!(
            out,
            "  {:<5} {:>6} {:>6} {:<10} {:>7} {:>7}",
            topic.index,
            topic.start_turn,
            topic.end_turn,
            topic.initiator,
            topic.control_counts.client,
            topic.control_counts.expert
        );
    }
    match &t.central_shift {
        Some(c) => {
            let _ = writeln!(
                out,
                "  central shift before topic {} (consistency {}/{}): before {}-{}, after {}-{}",
                c.boundary,
                c.consistency,
                c.topic_count,
                c.before.client,
                c.before.expert,
                c.after.client,
                c.after.expert
            );
        }
        None => {
            let _ = writeln!(out, "  central shift: undefined");
        }
    }
    let i = &t.initiation_dominance;
    let _ = writeln!(
        out,
        "  initiator controls more turns in {} of {} topics ({} ties)",
        i.initiator_dominant, i.topics, i.ties
    );
    render_crosstab(out, &t.crosstab);
}

pub fn render_text(report: &CorpusReport) -> String {
    let mut out = String::new();
    for d in &report.dialogues {
        render_phases(&mut out, d);
        render_shifts(&mut out, d);
        render_topics(&mut out, d);
        out.push('\n');
    }
    let a = &report.aggregate;
    let p = &a.phase_stats;
    let _ = writeln!(
        out,
        "corpus: {} dialogues, {} turns, {} phases",
        p.dialogues, p.turn_count, p.phase_count
    );
    let _ = writeln!(
        out,
        "mean turns per shift {}, per phase {}",
        mean(p.mean_turns_per_shift),
        mean(p.mean_turns_per_phase)
    );
    render_distribution(&mut out, &a.distribution);
    render_audit(&mut out, &a.cue_audit);
    if let Some(t) = &a.crosstab {
        let _ = writeln!(out, "signal against topic shift:");
        render_crosstab(&mut out, t);
    }
    if let Some(i) = &a.initiation_dominance {
        let _ = writeln!(
            out,
            "initiator controls more turns in {} of {} topics ({} ties)",
            i.initiator_dominant, i.topics, i.ties
        );
    }
    out
}
