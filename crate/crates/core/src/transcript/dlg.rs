//! Reader and writer for the line-oriented `.dlg` transcript format.
//!
//! ```text
//! # comment
//! !dialogue backup-call
//! !roles E=expert C=client
//! C	A	-	I'll take a backup first as you say
//! E	P	-	OK
//! ```
//!
//! Utterance lines carry four tab-separated fields: speaker tag, type code
//! (`A`, `C`, `Q`, `P`, or `?` for "classify heuristically"), flags (`-` or
//! a comma list of `rep`, `sum`, `vital`, `clar`, `cue`) and the text.
//! Consecutive lines from the same speaker form one turn.

// The examples show the literal tab-separated layout.
#![allow(clippy::tabs_in_doc_comments)]

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::model::{valid_tag, Dialogue, Flag, Participants, Role, Utterance, UtteranceType};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based; errors found at end of input point at the last line.
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("file is empty")]
    Empty,
    #[error("expected 4 tab-separated fields, found {0}")]
    FieldCount(usize),
    #[error("unknown speaker tag `{0}`")]
    UnknownSpeaker(String),
    #[error("unknown type code `{0}`")]
    UnknownType(String),
    #[error("unknown flag `{0}`")]
    UnknownFlag(String),
    #[error("utterance text is empty")]
    EmptyText,
    #[error("flags `rep` and `sum` cannot both be set")]
    RepAndSum,
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("duplicate `{0}` directive")]
    DuplicateDirective(&'static str),
    #[error("`{0}` directive must precede utterance lines")]
    LateDirective(&'static str),
    #[error("missing `{0}` directive")]
    MissingDirective(&'static str),
    #[error("`!dialogue` needs a non-empty id")]
    EmptyId,
    #[error("malformed `!roles`: {0}")]
    BadRoles(String),
    #[error("no utterance lines")]
    NoUtterances,
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn parse_roles(rest: &str) -> Result<Participants, String> {
    let mut expert = None;
    let mut client = None;
    let entries: Vec<&str> = rest.split_whitespace().collect();
    if entries.len() != 2 {
        return Err(format!(
            "expected two `tag=role` entries, found {}",
            entries.len()
        ));
    }
    for entry in entries {
        let (tag, role) = entry
            .split_once('=')
            .ok_or_else(|| format!("`{entry}` is not `tag=role`"))?;
        if !valid_tag(tag) {
            return Err(format!("invalid tag `{tag}`"));
        }
        let slot = match role.parse::<Role>()? {
            Role::Expert => &mut expert,
            Role::Client => &mut client,
        };
        if slot.replace(tag.to_string()).is_some() {
            return Err(format!("role `{role}` given twice"));
        }
    }
    match (expert, client) {
        (Some(e), Some(c)) if e != c => Ok(Participants::new(e, c)),
        (Some(e), Some(_)) => Err(format!("tag `{e}` used for both roles")),
        _ => Err("need one expert and one client".into()),
    }
}

fn parse_flags(field: &str) -> Result<BTreeSet<Flag>, ParseErrorKind> {
    let mut flags = BTreeSet::new();
    if field == "-" {
        return Ok(flags);
    }
    for code in field.split(',').map(str::trim) {
        let flag = Flag::from_code(code).ok_or_else(|| ParseErrorKind::UnknownFlag(code.into()))?;
        flags.insert(flag);
    }
    if flags.contains(&Flag::Repetition) && flags.contains(&Flag::Summary) {
        return Err(ParseErrorKind::RepAndSum);
    }
    Ok(flags)
}

/// Parses a `.dlg` document into a [`Dialogue`].
pub fn parse_transcript(input: &str) -> Result<Dialogue, ParseError> {
    let mut id: Option<String> = None;
    let mut participants: Option<Participants> = None;
    let mut items: Vec<(Role, Utterance)> = Vec::new();
    let mut last_line = 0;
    let mut saw_content = false;

    for (n, raw) in input.lines().enumerate() {
        let line_no = n + 1;
        last_line = line_no;
        let line = raw.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        saw_content = true;

        if let Some(directive) = line.trim().strip_prefix('!') {
            let (name, rest) = directive
                .split_once(char::is_whitespace)
                .map(|(n, r)| (n, r.trim()))
                .unwrap_or((directive, ""));
            match name {
                "dialogue" => {
                    if id.is_some() {
                        return Err(err(
                            line_no,
                            ParseErrorKind::DuplicateDirective("!dialogue"),
                        ));
                    }
                    if !items.is_empty() {
                        return Err(err(line_no, ParseErrorKind::LateDirective("!dialogue")));
                    }
                    if rest.is_empty() {
                        return Err(err(line_no, ParseErrorKind::EmptyId));
                    }
                    id = Some(rest.to_string());
                }
                "roles" => {
                    if participants.is_some() {
                        return Err(err(line_no, ParseErrorKind::DuplicateDirective("!roles")));
                    }
                    if !items.is_empty() {
                        return Err(err(line_no, ParseErrorKind::LateDirective("!roles")));
                    }
                    participants = Some(
                        parse_roles(rest).map_err(|m| err(line_no, ParseErrorKind::BadRoles(m)))?,
                    );
                }
                other => {
                    return Err(err(line_no, ParseErrorKind::UnknownDirective(other.into())));
                }
            }
            continue;
        }

        let fields: Vec<&str> = line.splitn(4, '\t').collect();
        if fields.len() != 4 {
            return Err(err(line_no, ParseErrorKind::FieldCount(fields.len())));
        }
        if id.is_none() {
            return Err(err(line_no, ParseErrorKind::MissingDirective("!dialogue")));
        }
        let Some(parts) = participants.as_ref() else {
            return Err(err(line_no, ParseErrorKind::MissingDirective("!roles")));
        };
        let tag = fields[0].trim();
        let speaker = parts
            .role_of(tag)
            .ok_or_else(|| err(line_no, ParseErrorKind::UnknownSpeaker(tag.into())))?;
        let code = fields[1].trim();
        let gold_type = match code {
            "?" => None,
            c => Some(
                UtteranceType::from_code(c)
                    .ok_or_else(|| err(line_no, ParseErrorKind::UnknownType(c.into())))?,
            ),
        };
        let flags = parse_flags(fields[2].trim()).map_err(|k| err(line_no, k))?;
        let text = fields[3].trim();
        if text.is_empty() {
            return Err(err(line_no, ParseErrorKind::EmptyText));
        }
        items.push((
            speaker,
            Utterance {
                text: text.to_string(),
                gold_type,
                flags,
                resolved_type: None,
            },
        ));
    }

    let at_end = last_line.max(1);
    if !saw_content {
        return Err(err(at_end, ParseErrorKind::Empty));
    }
    let id = id.ok_or_else(|| err(at_end, ParseErrorKind::MissingDirective("!dialogue")))?;
    let participants =
        participants.ok_or_else(|| err(at_end, ParseErrorKind::MissingDirective("!roles")))?;
    if items.is_empty() {
        return Err(err(at_end, ParseErrorKind::NoUtterances));
    }
    let dialogue = Dialogue::from_utterances(id, participants, items);
    debug_assert!(dialogue.validate().is_ok());
    Ok(dialogue)
}

/// Writes the canonical `.dlg` form of a dialogue.
pub fn serialize_transcript(d: &Dialogue) -> String {
    let mut out = String::new();
    let p = &d.participants;
    // Writing to a String cannot fail.
    let _ = writeln!(out, "!dialogue {}", d.id);
    let _ = writeln!(
        out,
        "!roles {}=expert {}=client",
        p.expert_tag, p.client_tag
    );
    for turn in &d.turns {
        let tag = p.tag(turn.speaker);
        for u in &turn.utterances {
            let code = u.gold_type.map_or('?', UtteranceType::code);
            let flags = if u.flags.is_empty() {
                "-".to_string()
            } else {
                u.flags
                    .iter()
                    .map(|f| f.code())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let _ = writeln!(out, "{tag}\t{code}\t{flags}\t{}", u.text);
        }
    }
    out
}
