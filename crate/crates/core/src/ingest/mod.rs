//! Parsing of bug-tracker change-history exports into normalized event
//! streams, plus the corpus filters applied before any analysis.
//!
//! The input schema is one change per row with columns
//! `who,when,what,removed,added,bug_id`. Rows belonging to a multi-field
//! change leave `who`/`when` (and `bug_id`) blank and inherit them from the
//! preceding row. A JSON-lines file with the same field names is accepted
//! as an equivalent encoding.

mod events;
mod filter;
mod parse;
mod time;

pub use events::{extract_events, processing_times, ExtractDiagnostics};
pub use filter::{filter_corpus, FilterSummary};
pub use parse::{parse_history, parse_history_jsonl};
pub use time::{format_gmt, normalize_time, parse_local_datetime};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Source time zone tag attached to a raw timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceZone {
    /// Eastern Standard Time, GMT-5.
    Est,
    /// Eastern Daylight Time, GMT-4.
    Edt,
    /// Already GMT.
    Gmt,
}

impl SourceZone {
    /// Offset to add to a local reading to obtain GMT, in seconds.
    pub fn offset_to_gmt_secs(self) -> i64 {
        match self {
            SourceZone::Est => 5 * 3600,
            SourceZone::Edt => 4 * 3600,
            SourceZone::Gmt => 0,
        }
    }

    pub fn parse(tag: &str) -> Result<Self, IngestError> {
        match tag {
            "EST" => Ok(SourceZone::Est),
            "EDT" => Ok(SourceZone::Edt),
            "GMT" | "UTC" => Ok(SourceZone::Gmt),
            other => Err(IngestError::UnknownZone(other.to_string())),
        }
    }
}

/// One parsed history row: a single field change on a bug.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeRecord {
    pub bug_id: u64,
    /// Developer id recorded as the actor of the row.
    pub who: String,
    /// GMT seconds since the Unix epoch.
    pub when: i64,
    /// Zone tag the timestamp was read in before normalization.
    pub zone: SourceZone,
    /// Changed field name, e.g. "Assignee", "Status", "Resolution".
    pub what: String,
    pub removed: String,
    pub added: String,
}

/// Semantic event kind extracted from the history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Receive,
    Fix,
    Toss,
}

/// One semantic event: a developer receiving, fixing, or tossing a bug.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BugEvent {
    pub bug_id: u64,
    pub developer: String,
    pub kind: EventKind,
    /// GMT seconds since the Unix epoch.
    pub at: i64,
    /// Receiving developer, present on TOSS events only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub toss_target: Option<String>,
}

impl BugEvent {
    pub fn receive(bug_id: u64, developer: impl Into<String>, at: i64) -> Self {
        BugEvent { bug_id, developer: developer.into(), kind: EventKind::Receive, at, toss_target: None }
    }

    pub fn fix(bug_id: u64, developer: impl Into<String>, at: i64) -> Self {
        BugEvent { bug_id, developer: developer.into(), kind: EventKind::Fix, at, toss_target: None }
    }

    pub fn toss(bug_id: u64, developer: impl Into<String>, target: impl Into<String>, at: i64) -> Self {
        BugEvent {
            bug_id,
            developer: developer.into(),
            kind: EventKind::Toss,
            at,
            toss_target: Some(target.into()),
        }
    }
}

/// The duration a bug spent with one developer, from receive to fix or toss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessingTime {
    pub bug_id: u64,
    pub developer: String,
    /// `Fix` or `Toss`; never `Receive`.
    pub kind: EventKind,
    /// Hours, strictly positive.
    pub tau: f64,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("unknown time zone tag {0:?} (expected EST, EDT, or GMT)")]
    UnknownZone(String),
    #[error("missing required column {0:?}")]
    MissingColumn(&'static str),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
