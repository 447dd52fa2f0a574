use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The two parties of an advisory dialogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Expert,
    Client,
}

impl Role {
    pub const BOTH: [Role; 2] = [Role::Expert, Role::Client];

    pub fn other(self) -> Role {
        match self {
            Role::Expert => Role::Client,
            Role::Client => Role::Expert,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Expert => "expert",
            Role::Client => "client",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "expert" => Ok(Role::Expert),
            "client" => Ok(Role::Client),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtteranceType {
    Assertion,
    Command,
    Question,
    Prompt,
}

impl UtteranceType {
    pub const ALL: [UtteranceType; 4] = [
        UtteranceType::Assertion,
        UtteranceType::Command,
        UtteranceType::Question,
        UtteranceType::Prompt,
    ];

    /// Single-letter code used in `.dlg` files.
    pub fn code(self) -> char {
        match self {
            UtteranceType::Assertion => 'A',
            UtteranceType::Command => 'C',
            UtteranceType::Question => 'Q',
            UtteranceType::Prompt => 'P',
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "A" => Some(UtteranceType::Assertion),
            "C" => Some(UtteranceType::Command),
            "Q" => Some(UtteranceType::Question),
            "P" => Some(UtteranceType::Prompt),
            _ => None,
        }
    }
}

impl fmt::Display for UtteranceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            UtteranceType::Assertion => "assertion",
            UtteranceType::Command => "command",
            UtteranceType::Question => "question",
            UtteranceType::Prompt => "prompt",
        };
        f.write_str(name)
    }
}

/// Annotation flags an annotator may attach to an utterance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    Repetition,
    Summary,
    VitalFact,
    Clarification,
    /// The initial cue word is a prefix spoken in one breath with what follows,
    /// not a signal in its own right.
    CuePrefix,
}

impl Flag {
    pub const ALL: [Flag; 5] = [
        Flag::Repetition,
        Flag::Summary,
        Flag::VitalFact,
        Flag::Clarification,
        Flag::CuePrefix,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Flag::Repetition => "rep",
            Flag::Summary => "sum",
            Flag::VitalFact => "vital",
            Flag::Clarification => "clar",
            Flag::CuePrefix => "cue",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        Flag::ALL.into_iter().find(|f| f.code() == code)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub text: String,
    /// Annotator label; `None` means "classify heuristically".
    pub gold_type: Option<UtteranceType>,
    pub flags: BTreeSet<Flag>,
    /// Filled in by the classifier.
    pub resolved_type: Option<UtteranceType>,
}

impl Utterance {
    pub fn new(text: impl Into<String>, gold_type: Option<UtteranceType>) -> Self {
        Utterance {
            text: text.into(),
            gold_type,
            flags: BTreeSet::new(),
            resolved_type: None,
        }
    }

    pub fn with_flag(mut self, flag: Flag) -> Self {
        self.flags.insert(flag);
        self
    }

    pub fn has_flag(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }

    /// Resolved type if classified, else the gold label.
    pub fn kind(&self) -> Option<UtteranceType> {
        self.resolved_type.or(self.gold_type)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub index: usize,
    pub speaker: Role,
    pub utterances: Vec<Utterance>,
}

impl Turn {
    /// Control is decided by the last utterance of a turn.
    pub fn final_utterance(&self) -> &Utterance {
        self.utterances
            .last()
            .expect("turn invariant: utterances non-empty")
    }
}

/// Speaker tags as written in the transcript file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Participants {
    pub expert_tag: String,
    pub client_tag: String,
}

impl Participants {
    pub fn new(expert_tag: impl Into<String>, client_tag: impl Into<String>) -> Self {
        Participants {
            expert_tag: expert_tag.into(),
            client_tag: client_tag.into(),
        }
    }

    pub fn tag(&self, role: Role) -> &str {
        match role {
            Role::Expert => &self.expert_tag,
            Role::Client => &self.client_tag,
        }
    }

    pub fn role_of(&self, tag: &str) -> Option<Role> {
        if tag == self.expert_tag {
            Some(Role::Expert)
        } else if tag == self.client_tag {
            Some(Role::Client)
        } else {
            None
        }
    }
}

impl Default for Participants {
    fn default() -> Self {
        Participants::new("E", "C")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dialogue {
    pub id: String,
    pub participants: Participants,
    pub turns: Vec<Turn>,
}

/// Violations of the dialogue data model.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("dialogue id is empty or spans lines")]
    BadId,
    #[error("speaker tag `{0}` is not a single non-reserved token")]
    BadTag(String),
    #[error("expert and client share the tag `{0}`")]
    DuplicateTag(String),
    #[error("dialogue has no turns")]
    NoTurns,
    #[error("turn {0} has index {1}")]
    TurnIndex(usize, usize),
    #[error("turns {0} and {1} have the same speaker")]
    SameSpeaker(usize, usize),
    #[error("turn {0} has no utterances")]
    EmptyTurn(usize),
    #[error("turn {turn}, utterance {utterance}: {reason}")]
    BadUtterance {
        turn: usize,
        utterance: usize,
        reason: &'static str,
    },
}

pub(crate) fn valid_tag(tag: &str) -> bool {
    !tag.is_empty()
        && !tag.starts_with('#')
        && !tag.starts_with('!')
        && !tag.contains('=')
        && !tag.chars().any(char::is_whitespace)
}

impl Dialogue {
    /// Builds a dialogue from `(speaker, utterance)` pairs, merging runs of
    /// the same speaker into one turn.
    pub fn from_utterances<I>(id: impl Into<String>, participants: Participants, items: I) -> Self
    where
        I: IntoIterator<Item = (Role, Utterance)>,
    {
        let mut turns: Vec<Turn> = Vec::new();
        for (speaker, utterance) in items {
            match turns.last_mut() {
                Some(turn) if turn.speaker == speaker => turn.utterances.push(utterance),
                _ => turns.push(Turn {
                    index: turns.len(),
                    speaker,
                    utterances: vec![utterance],
                }),
            }
        }
        Dialogue {
            id: id.into(),
            participants,
            turns,
        }
    }

    pub fn turn_count(&self) -> usize {
        self.turns.len()
    }

    pub fn utterances(&self) -> impl Iterator<Item = (usize, usize, &Utterance)> {
        self.turns.iter().flat_map(|t| {
            t.utterances
                .iter()
                .enumerate()
                .map(move |(i, u)| (t.index, i, u))
        })
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.id.trim().is_empty() || self.id.trim() != self.id || self.id.contains(['\n', '\r'])
        {
            return Err(ModelError::BadId);
        }
        for tag in [&self.participants.expert_tag, &self.participants.client_tag] {
            if !valid_tag(tag) {
                return Err(ModelError::BadTag(tag.clone()));
            }
        }
        if self.participants.expert_tag == self.participants.client_tag {
            return Err(ModelError::DuplicateTag(
                self.participants.expert_tag.clone(),
            ));
        }
        if self.turns.is_empty() {
            return Err(ModelError::NoTurns);
        }
        for (i, turn) in self.turns.iter().enumerate() {
            if turn.index != i {
                return Err(ModelError::TurnIndex(i, turn.index));
            }
            if i > 0 && self.turns[i - 1].speaker == turn.speaker {
                return Err(ModelError::SameSpeaker(i - 1, i));
            }
            if turn.utterances.is_empty() {
                return Err(ModelError::EmptyTurn(i));
            }
            for (j, u) in turn.utterances.iter().enumerate() {
                let bad = |reason| ModelError::BadUtterance {
                    turn: i,
                    utterance: j,
                    reason,
                };
                if u.text.trim().is_empty() {
                    return Err(bad("text is empty"));
                }
                if u.text.trim() != u.text {
                    return Err(bad("text has surrounding whitespace"));
                }
                if u.text.contains(['\n', '\r']) {
                    return Err(bad("text spans lines"));
                }
                if u.has_flag(Flag::Repetition) && u.has_flag(Flag::Summary) {
                    return Err(bad("flagged both repetition and summary"));
                }
            }
        }
        Ok(())
    }
}
