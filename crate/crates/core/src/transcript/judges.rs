//! Judge vote files: one row per control shift, one `y`/`n` column per judge.
//!
//! ```text
//! 0	y	y	n	y	y
//! 1	n	n	n	n	n
//! ```

// The examples show the literal tab-separated layout.
#![allow(clippy::tabs_in_doc_comments)]

use serde::Serialize;

pub const DEFAULT_JUDGE_COUNT: usize = 5;

/// Topic-shift votes, rows indexed by the per-dialogue shift ordinal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JudgeMatrix {
    pub dialogue_id: String,
    pub votes: Vec<Vec<bool>>,
}

impl JudgeMatrix {
    pub fn new(dialogue_id: impl Into<String>, votes: Vec<Vec<bool>>) -> Result<Self, JudgeError> {
        let width = votes.first().map_or(0, Vec::len);
        if votes.iter().any(|r| r.len() != width) {
            return Err(JudgeError::Ragged);
        }
        if !votes.is_empty() && width == 0 {
            return Err(JudgeError::NoJudges);
        }
        Ok(JudgeMatrix {
            dialogue_id: dialogue_id.into(),
            votes,
        })
    }

    pub fn judge_count(&self) -> usize {
        self.votes.first().map_or(0, Vec::len)
    }

    pub fn rows(&self) -> usize {
        self.votes.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JudgeError {
    #[error("line {line}: expected an ordinal followed by votes")]
    MissingVotes { line: usize },
    #[error("line {line}: bad shift ordinal `{text}`")]
    BadOrdinal { line: usize, text: String },
    #[error("line {line}: ordinal {ordinal} does not follow {previous}")]
    NotIncreasing {
        line: usize,
        ordinal: usize,
        previous: usize,
    },
    #[error("line {line}: ordinal {ordinal} is out of range for {expected} shifts")]
    OrdinalOutOfRange {
        line: usize,
        ordinal: usize,
        expected: usize,
    },
    #[error("line {line}: invalid vote `{text}` (expected y or n)")]
    BadVote { line: usize, text: String },
    #[error("line {line}: {found} votes, expected {expected}")]
    RaggedRow {
        line: usize,
        found: usize,
        expected: usize,
    },
    #[error("{found} rows of votes, expected one per shift ({expected})")]
    RowCount { found: usize, expected: usize },
    #[error("rows have different lengths")]
    Ragged,
    #[error("matrix has no judges")]
    NoJudges,
}

/// Parses a judge file. Every row must carry the same number of votes; when
/// `judge_count` is given that number is enforced too.
pub fn parse_judges_with(
    input: &str,
    dialogue_id: &str,
    expected_shifts: usize,
    judge_count: Option<usize>,
) -> Result<JudgeMatrix, JudgeError> {
    let mut votes: Vec<Vec<bool>> = Vec::new();
    let mut previous: Option<usize> = None;
    let mut width = judge_count;

    for (n, raw) in input.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let ord_text = fields.next().unwrap_or_default();
        let ordinal: usize = ord_text.parse().map_err(|_| JudgeError::BadOrdinal {
            line,
            text: ord_text.to_string(),
        })?;
        if let Some(prev) = previous {
            if ordinal <= prev {
                return Err(JudgeError::NotIncreasing {
                    line,
                    ordinal,
                    previous: prev,
                });
            }
        }
        if ordinal >= expected_shifts {
            return Err(JudgeError::OrdinalOutOfRange {
                line,
                ordinal,
                expected: expected_shifts,
            });
        }
        previous = Some(ordinal);

        let row = fields
            .map(|v| match v {
                "y" | "Y" => Ok(true),
                "n" | "N" => Ok(false),
                other => Err(JudgeError::BadVote {
                    line,
                    text: other.to_string(),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if row.is_empty() {
            return Err(JudgeError::MissingVotes { line });
        }
        match width {
            Some(w) if w != row.len() => {
                return Err(JudgeError::RaggedRow {
                    line,
                    found: row.len(),
                    expected: w,
                })
            }
            _ => width = Some(row.len()),
        }
        votes.push(row);
    }

    if votes.len() != expected_shifts {
        return Err(JudgeError::RowCount {
            found: votes.len(),
            expected: expected_shifts,
        });
    }
    JudgeMatrix::new(dialogue_id, votes)
}

/// Parses a judge file whose judge count is taken from its first row.
pub fn parse_judges(input: &str, expected_shifts: usize) -> Result<JudgeMatrix, JudgeError> {
    parse_judges_with(input, "", expected_shifts, None)
}

/// Renders a matrix back to the TSV layout.
pub fn serialize_judges(matrix: &JudgeMatrix) -> String {
    let mut out = String::new();
    for (i, row) in matrix.votes.iter().enumerate() {
        out.push_str(&i.to_string());
        for &v in row {
            out.push('\t');
            out.push(if v { 'y' } else { 'n' });
        }
        out.push('\n');
    }
    out
}
