//! Dialogue data model and the transcript / judge-vote file formats.

mod dlg;
mod judges;
mod model;

pub use dlg::{parse_transcript, serialize_transcript, ParseError, ParseErrorKind};
pub use judges::{
    parse_judges, parse_judges_with, serialize_judges, JudgeError, JudgeMatrix, DEFAULT_JUDGE_COUNT,
};
pub use model::{Dialogue, Flag, ModelError, Participants, Role, Turn, Utterance, UtteranceType};
