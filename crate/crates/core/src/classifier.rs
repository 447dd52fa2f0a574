//! Resolves every utterance to assertion, command, question or prompt.
//!
//! Gold labels always win. Unlabelled utterances go through four ordered
//! surface rules:
//!
//! 1. only prompt-lexicon material (`"OK um"`, `"That's right."`) is a
//!    prompt, unless it answers the other party's question with a yes/no
//!    token, in which case it is an assertion;
//! 2. a trailing `?` or a question marker makes a question;
//! 3. a command marker or a bare imperative makes a command;
//! 4. everything else is an assertion.
//!
//! The only context consulted is the final utterance of the previous turn.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::text::{tokenize, Phrase};
use crate::transcript::{Dialogue, Role, Utterance, UtteranceType};

const DEFAULT_PROMPTS: &[&str] = &[
    "yes",
    "yeah",
    "uhu",
    "uh-huh",
    "mm",
    "mhm",
    "ok",
    "okay",
    "right",
    "fine",
    "that's right",
    "er",
    "um",
    "well",
];

const DEFAULT_QUESTION_MARKERS: &[&str] = &[
    "so my question is",
    "my question is",
    "do you",
    "did you",
    "have you",
    "can you",
    "could you",
    "are you",
    "is it",
    "is there",
    "does it",
];

const DEFAULT_COMMAND_MARKERS: &[&str] = &[
    "what i would do",
    "i would",
    "you should",
    "you need to",
    "try",
    "please",
];

const DEFAULT_CUES: &[&str] = &[
    "now",
    "and",
    "so",
    "but",
    "well",
    "as well",
    "well actually",
    "in any case",
    "anyway",
];

/// Verbs that open a bare imperative ("Initialise the disc ...").
const IMPERATIVE_VERBS: &[&str] = &[
    "initialise",
    "initialize",
    "relink",
    "link",
    "run",
    "type",
    "check",
    "delete",
    "copy",
    "put",
    "take",
    "use",
    "press",
    "enter",
    "restore",
    "reboot",
    "install",
    "load",
    "edit",
    "rename",
    "set",
    "look",
    "go",
    "save",
];

/// Tokens that turn an all-prompt reply to a question into an answer.
const ANSWER_TOKENS: &[&str] = &["yes", "yeah", "yep", "no", "nope"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifierConfig {
    pub prompt_lexicon: BTreeSet<Phrase>,
    pub question_markers: BTreeSet<Phrase>,
    pub command_markers: BTreeSet<Phrase>,
    pub cue_lexicon: BTreeSet<Phrase>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("`{0}` must not be empty")]
    EmptyLexicon(&'static str),
    #[error("`{field}` entry {entry:?} has no word tokens")]
    EmptyEntry { field: &'static str, entry: String },
}

/// On-disk form; any list left out keeps its default.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    prompt_lexicon: Option<Vec<String>>,
    question_markers: Option<Vec<String>>,
    command_markers: Option<Vec<String>>,
    cue_lexicon: Option<Vec<String>>,
}

fn lexicon(
    field: &'static str,
    entries: &[impl AsRef<str>],
) -> Result<BTreeSet<Phrase>, ConfigError> {
    if entries.is_empty() {
        return Err(ConfigError::EmptyLexicon(field));
    }
    entries
        .iter()
        .map(|e| {
            Phrase::parse(e.as_ref()).ok_or_else(|| ConfigError::EmptyEntry {
                field,
                entry: e.as_ref().to_string(),
            })
        })
        .collect()
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        let build = |field, entries| lexicon(field, entries).expect("built-in lexicons are valid");
        ClassifierConfig {
            prompt_lexicon: build("prompt_lexicon", DEFAULT_PROMPTS),
            question_markers: build("question_markers", DEFAULT_QUESTION_MARKERS),
            command_markers: build("command_markers", DEFAULT_COMMAND_MARKERS),
            cue_lexicon: build("cue_lexicon", DEFAULT_CUES),
        }
    }
}

impl ClassifierConfig {
    /// Reads a TOML document with optional `prompt_lexicon`,
    /// `question_markers`, `command_markers` and `cue_lexicon` string lists.
    pub fn from_toml(src: &str) -> Result<Self, ConfigError> {
        let file: ConfigFile = toml::from_str(src)?;
        let mut cfg = ClassifierConfig::default();
        if let Some(v) = file.prompt_lexicon {
            cfg.prompt_lexicon = lexicon("prompt_lexicon", &v)?;
        }
        if let Some(v) = file.question_markers {
            cfg.question_markers = lexicon("question_markers", &v)?;
        }
        if let Some(v) = file.command_markers {
            cfg.command_markers = lexicon("command_markers", &v)?;
        }
        if let Some(v) = file.cue_lexicon {
            cfg.cue_lexicon = lexicon("cue_lexicon", &v)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// True if the tokens can be cut entirely into prompt-lexicon entries.
    pub fn is_prompt_only(&self, tokens: &[String]) -> bool {
        if tokens.is_empty() {
            return false;
        }
        // reachable[i]: tokens[..i] is covered
        let mut reachable = vec![false; tokens.len() + 1];
        reachable[0] = true;
        for i in 0..tokens.len() {
            if !reachable[i] {
                continue;
            }
            for entry in &self.prompt_lexicon {
                if entry.matches_at(tokens, i) {
                    reachable[i + entry.len()] = true;
                }
            }
        }
        reachable[tokens.len()]
    }

    fn is_single_filler(&self, token: &str) -> bool {
        let is_single = |p: &Phrase| p.len() == 1 && p.tokens()[0] == token;
        self.prompt_lexicon.iter().any(is_single) || self.cue_lexicon.iter().any(is_single)
    }

    /// Drops leading prompt and cue words: `"OK. Initialise ..."` → `initialise ...`.
    fn strip_fillers<'a>(&self, tokens: &'a [String]) -> &'a [String] {
        let skip = tokens
            .iter()
            .take_while(|t| self.is_single_filler(t))
            .count();
        &tokens[skip..]
    }
}

fn starts_with_any(tokens: &[String], markers: &BTreeSet<Phrase>) -> bool {
    markers.iter().any(|m| m.matches_at(tokens, 0))
}

/// The final utterance of the previous turn, as seen by the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrevUtterance {
    pub kind: UtteranceType,
    pub speaker: Role,
}

/// Heuristic type of one utterance spoken by `speaker`. Ignores any gold
/// label; see [`classify_dialogue`] for label handling.
pub fn classify_one(
    text: &str,
    speaker: Role,
    prev: Option<PrevUtterance>,
    cfg: &ClassifierConfig,
) -> UtteranceType {
    let tokens = tokenize(text);

    if cfg.is_prompt_only(&tokens) {
        let answers_question = matches!(
            prev,
            Some(p) if p.kind == UtteranceType::Question && p.speaker != speaker
        );
        let has_answer_token = tokens.iter().any(|t| ANSWER_TOKENS.contains(&t.as_str()));
        return if answers_question && has_answer_token {
            UtteranceType::Assertion
        } else {
            UtteranceType::Prompt
        };
    }

    let body = cfg.strip_fillers(&tokens);
    if text.trim_end().ends_with('?')
        || starts_with_any(&tokens, &cfg.question_markers)
        || starts_with_any(body, &cfg.question_markers)
    {
        return UtteranceType::Question;
    }

    if starts_with_any(&tokens, &cfg.command_markers)
        || starts_with_any(body, &cfg.command_markers)
        || body
            .first()
            .is_some_and(|t| IMPERATIVE_VERBS.contains(&t.as_str()))
    {
        return UtteranceType::Command;
    }

    UtteranceType::Assertion
}

/// Fills `resolved_type` on every utterance. Gold labels are copied; the
/// rest are classified with the previous turn's final utterance as context.
pub fn classify_dialogue(mut d: Dialogue, cfg: &ClassifierConfig) -> Dialogue {
    let mut prev: Option<PrevUtterance> = None;
    for turn in &mut d.turns {
        for u in &mut turn.utterances {
            let kind = u
                .gold_type
                .unwrap_or_else(|| classify_one(&u.text, turn.speaker, prev, cfg));
            u.resolved_type = Some(kind);
        }
        prev = Some(PrevUtterance {
            kind: turn.final_utterance().resolved_type.expect("just resolved"),
            speaker: turn.speaker,
        });
    }
    d
}

/// A cue word or phrase found in an utterance; `position` is a token index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CueOccurrence {
    pub word: String,
    pub position: usize,
}

/// Finds cue words: the longest cue-lexicon entry opening the utterance, plus
/// multi-word cue phrases anywhere after it.
pub fn detect_cue_words(u: &Utterance, cfg: &ClassifierConfig) -> Vec<CueOccurrence> {
    detect_cues_in(&u.text, cfg)
}

pub fn detect_cues_in(text: &str, cfg: &ClassifierConfig) -> Vec<CueOccurrence> {
    let tokens = tokenize(text);
    let mut found = Vec::new();
    let mut i = 0;
    if let Some(initial) = longest_match(&tokens, 0, cfg.cue_lexicon.iter()) {
        found.push(CueOccurrence {
            word: initial.to_string(),
            position: 0,
        });
        i = initial.len();
    }
    while i < tokens.len() {
        let phrases = cfg.cue_lexicon.iter().filter(|p| p.len() > 1);
        match longest_match(&tokens, i, phrases) {
            Some(p) => {
                found.push(CueOccurrence {
                    word: p.to_string(),
                    position: i,
                });
                i += p.len();
            }
            None => i += 1,
        }
    }
    found
}

fn longest_match<'a>(
    tokens: &[String],
    at: usize,
    entries: impl Iterator<Item = &'a Phrase>,
) -> Option<&'a Phrase> {
    entries
        .filter(|p| p.matches_at(tokens, at))
        .max_by_key(|p| p.len())
}
