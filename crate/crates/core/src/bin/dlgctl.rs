use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dlgctl::classifier::ClassifierConfig;
use dlgctl::control::PhaseStats;
use dlgctl::interruption::{load_scenario, StepRecord};
use dlgctl::report::{
    render_audit, render_distribution, render_phases, render_shifts, render_text, render_topics,
    run_pipeline, to_json, CorpusReport, DialogueSection, PipelineConfig, SCHEMA_VERSION,
};
use dlgctl::shifts::{ControlShift, CueAudit, ShiftConfig, ShiftDistribution};
use dlgctl::topics::{AgreementSummary, Crosstab, InitiationDominance};
use dlgctl::transcript::DEFAULT_JUDGE_COUNT;

#[derive(Parser)]
#[command(
    name = "dlgctl",
    version,
    about = "Control-based segmentation of expert/client dialogues"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assign control to every turn and list the phases.
    Segment(CorpusArgs),
    /// List control shifts with their signal classes.
    Shifts(CorpusArgs),
    /// Count cue words with and without shifts.
    Audit(CorpusArgs),
    /// Topic analysis from judge votes.
    Topics(CorpusArgs),
    /// Run an interruption scenario.
    Simulate {
        scenario: PathBuf,
        /// Print a table instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// The full pipeline.
    Report(CorpusArgs),
}

#[derive(Args)]
struct CorpusArgs {
    /// Transcript files.
    #[arg(required = true)]
    transcripts: Vec<PathBuf>,
    /// Classifier lexicon overrides (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Judge vote file; repeat once per transcript, in the same order.
    #[arg(long = "judges")]
    judges: Vec<PathBuf>,
    /// Votes per row expected in judge files.
    #[arg(long, default_value_t = DEFAULT_JUDGE_COUNT)]
    judge_count: usize,
    /// Report maximal same-controller runs instead of display phases.
    #[arg(long)]
    mechanical: bool,
    /// Also treat short cue-initial assertions as summaries.
    #[arg(long)]
    summary_heuristic: bool,
    /// Print tables instead of JSON.
    #[arg(long)]
    text: bool,
}

impl CorpusArgs {
    fn run(&self) -> Result<CorpusReport> {
        let classifier = match &self.config {
            Some(p) => ClassifierConfig::load(p).with_context(|| format!("{}", p.display()))?,
            None => ClassifierConfig::default(),
        };
        let cfg = PipelineConfig {
            classifier,
            shifts: ShiftConfig {
                summary_heuristic: self.summary_heuristic,
                ..ShiftConfig::default()
            },
            mechanical: self.mechanical,
            judge_count: Some(self.judge_count),
        };
        Ok(run_pipeline(&self.transcripts, &self.judges, &cfg)?)
    }
}

#[derive(Serialize)]
struct Versioned<T: Serialize> {
    schema_version: &'static str,
    #[serde(flatten)]
    body: T,
}

fn json<T: Serialize>(body: T) -> String {
    to_json(&Versioned {
        schema_version: SCHEMA_VERSION,
        body,
    })
}

#[derive(Serialize)]
struct SegmentOut<'a> {
    dialogues: Vec<SegmentDialogue<'a>>,
    phase_stats: &'a PhaseStats,
}

#[derive(Serialize)]
struct SegmentDialogue<'a> {
    id: &'a str,
    turn_count: usize,
    assignments: &'a [dlgctl::control::ControlAssignment],
    phases: &'a [dlgctl::control::Phase],
}

#[derive(Serialize)]
struct ShiftsOut<'a> {
    dialogues: Vec<ShiftsDialogue<'a>>,
    distribution: &'a ShiftDistribution,
}

#[derive(Serialize)]
struct ShiftsDialogue<'a> {
    id: &'a str,
    shifts: &'a [ControlShift],
    distribution: &'a ShiftDistribution,
}

#[derive(Serialize)]
struct AuditOut<'a> {
    dialogues: Vec<AuditDialogue<'a>>,
    cue_audit: &'a CueAudit,
}

#[derive(Serialize)]
struct AuditDialogue<'a> {
    id: &'a str,
    cue_audit: &'a CueAudit,
}

#[derive(Serialize)]
struct TopicsOut<'a> {
    dialogues: Vec<TopicsDialogue<'a>>,
    agreement: Option<&'a AgreementSummary>,
    crosstab: Option<&'a Crosstab>,
    initiation_dominance: Option<&'a InitiationDominance>,
}

#[derive(Serialize)]
struct TopicsDialogue<'a> {
    id: &'a str,
    #[serde(flatten)]
    topics: &'a dlgctl::report::TopicSection,
}

#[derive(Serialize)]
struct SimulateOut<'a> {
    steps: &'a [StepRecord],
}

fn each(report: &CorpusReport, f: fn(&mut String, &DialogueSection)) -> String {
    let mut out = String::new();
    for d in &report.dialogues {
        f(&mut out, d);
    }
    out
}

fn simulate_text(steps: &[StepRecord]) -> String {
    let mut out = String::new();
    for s in steps {
        let e = &s.event;
        let trigger = s.trigger.as_ref().map_or_else(
            || "-".to_string(),
            |t| format!("{} on {}: {}", t.rule, t.proposition, t.rationale),
        );
        out.push_str(&format!(
            "{:<3} {:<7} {:<24} {:<15} {}\n",
            s.index,
            e.speaker,
            e.proposition,
            format!("{:?}", e.asserted_stance),
            trigger
        ));
    }
    out
}

fn run(cli: Cli) -> Result<String> {
    Ok(match cli.command {
        Command::Segment(args) => {
            let r = args.run()?;
            if args.text {
                each(&r, render_phases)
            } else {
                json(SegmentOut {
                    dialogues: r
                        .dialogues
                        .iter()
                        .map(|d| SegmentDialogue {
                            id: &d.id,
                            turn_count: d.turn_count,
                            assignments: &d.assignments,
                            phases: &d.phases,
                        })
                        .collect(),
                    phase_stats: &r.aggregate.phase_stats,
                })
            }
        }
        Command::Shifts(args) => {
            let r = args.run()?;
            if args.text {
                let mut out = each(&r, render_shifts);
                render_distribution(&mut out, &r.aggregate.distribution);
                out
            } else {
                json(ShiftsOut {
                    dialogues: r
                        .dialogues
                        .iter()
                        .map(|d| ShiftsDialogue {
                            id: &d.id,
                            shifts: &d.shifts,
                            distribution: &d.distribution,
                        })
                        .collect(),
                    distribution: &r.aggregate.distribution,
                })
            }
        }
        Command::Audit(args) => {
            let r = args.run()?;
            if args.text {
                let mut out = String::new();
                render_audit(&mut out, &r.aggregate.cue_audit);
                out
            } else {
                json(AuditOut {
                    dialogues: r
                        .dialogues
                        .iter()
                        .map(|d| AuditDialogue {
                            id: &d.id,
                            cue_audit: &d.cue_audit,
                        })
                        .collect(),
                    cue_audit: &r.aggregate.cue_audit,
                })
            }
        }
        Command::Topics(args) => {
            if args.judges.len() != args.transcripts.len() {
                anyhow::bail!(
                    "topics needs one --judges file per transcript ({} given for {})",
                    args.judges.len(),
                    args.transcripts.len()
                );
            }
            let r = args.run()?;
            if args.text {
                each(&r, render_topics)
            } else {
                json(TopicsOut {
                    dialogues: r
                        .dialogues
                        .iter()
                        .filter_map(|d| {
                            d.topics.as_ref().map(|t| TopicsDialogue {
                                id: &d.id,
                                topics: t,
                            })
                        })
                        .collect(),
                    agreement: r.aggregate.agreement.as_ref(),
                    crosstab: r.aggregate.crosstab.as_ref(),
                    initiation_dominance: r.aggregate.initiation_dominance.as_ref(),
                })
            }
        }
        Command::Simulate { scenario, text } => {
            let s = load_scenario(&scenario).with_context(|| format!("{}", scenario.display()))?;
            let steps = s.run().with_context(|| format!("{}", scenario.display()))?;
            if text {
                simulate_text(&steps)
            } else {
                json(SimulateOut { steps: &steps })
            }
        }
        Command::Report(args) => {
            let r = args.run()?;
            if args.text {
                render_text(&r)
            } else {
                to_json(&r)
            }
        }
    })
}

/// The error chain, skipping causes already spelled out by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut msg = e.to_string();
    for cause in e.chain().skip(1) {
        let c = cause.to_string();
        if !msg.contains(&c) {
            msg.push_str(": ");
            msg.push_str(&c);
        }
    }
    msg
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dlgctl: error: {}", describe(&e));
            ExitCode::FAILURE
        }
    }
}
