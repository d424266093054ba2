//! History-file parsing: flat CSV with continuation rows, or JSON lines
//! with the same field names.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read};

use serde::Deserialize;

use super::time::{normalize_time, parse_local_datetime};
use super::{ChangeRecord, IngestError, SourceZone};

/// Split a raw `when` cell like `2006-06-14 14:37:38 EDT` into the naive
/// timestamp and its zone tag. A missing tag is read as GMT.
fn parse_when(raw: &str, line: u64) -> Result<(i64, SourceZone), IngestError> {
    let raw = raw.trim();
    let (stamp, zone) = match raw.rsplit_once(' ') {
        Some((head, tag)) if tag.chars().all(|c| c.is_ascii_alphabetic()) => {
            (head, SourceZone::parse(tag)?)
        }
        _ => (raw, SourceZone::Gmt),
    };
    let local = parse_local_datetime(stamp).map_err(|e| match e {
        IngestError::Parse { message, .. } => IngestError::Parse { line, message },
        other => other,
    })?;
    Ok((normalize_time(local, zone), zone))
}

/// Parse the CSV history schema into change records, in input order.
///
/// The header must declare `who,when,what,removed,added,bug_id` (any column
/// order). Rows with blank `who`/`when` are continuations of the preceding
/// row's change group and inherit `who`, `when`, and `bug_id` from it.
pub fn parse_history<R: Read>(stream: R) -> Result<Vec<ChangeRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(stream);

    let headers = reader.headers()?.clone();
    let mut col: HashMap<&str, usize> = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        col.insert(h.trim(), i);
    }
    let idx = |name: &'static str| col.get(name).copied().ok_or(IngestError::MissingColumn(name));
    let (i_who, i_when, i_what, i_removed, i_added, i_bug) = (
        idx("who")?,
        idx("when")?,
        idx("what")?,
        idx("removed")?,
        idx("added")?,
        idx("bug_id")?,
    );

    let mut out: Vec<ChangeRecord> = Vec::new();
    let mut carry: Option<(String, i64, SourceZone, u64)> = None;

    for result in reader.records() {
        let record = result?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or("").trim().to_string();

        let who_raw = field(i_who);
        let when_raw = field(i_when);
        let what = field(i_what);
        if what.is_empty() {
            return Err(IngestError::Parse { line, message: "empty `what` field".into() });
        }

        let (who, when, zone, bug_id) = if who_raw.is_empty() && when_raw.is_empty() {
            match &carry {
                Some((who, when, zone, bug)) => (who.clone(), *when, *zone, *bug),
                None => {
                    return Err(IngestError::Parse {
                        line,
                        message: "continuation row with no preceding full row".into(),
                    })
                }
            }
        } else {
            let (when, zone) = parse_when(&when_raw, line)?;
            let bug_raw = field(i_bug);
            let bug_id = if bug_raw.is_empty() {
                carry.as_ref().map(|(_, _, _, b)| *b).ok_or_else(|| IngestError::Parse {
                    line,
                    message: "row missing bug_id".into(),
                })?
            } else {
                bug_raw.parse::<u64>().map_err(|_| IngestError::Parse {
                    line,
                    message: format!("bad bug_id {bug_raw:?}"),
                })?
            };
            (who_raw, when, zone, bug_id)
        };

        carry = Some((who.clone(), when, zone, bug_id));
        out.push(ChangeRecord {
            bug_id,
            who,
            when,
            zone,
            what,
            removed: field(i_removed),
            added: field(i_added),
        });
    }
    Ok(out)
}

#[derive(Deserialize)]
struct JsonRow {
    bug_id: Option<u64>,
    who: Option<String>,
    when: Option<String>,
    what: String,
    #[serde(default)]
    removed: String,
    #[serde(default)]
    added: String,
}

/// JSON-lines equivalent of [`parse_history`]: one object per line with the
/// same field names; missing `who`/`when` inherit from the previous line.
pub fn parse_history_jsonl<R: Read>(stream: R) -> Result<Vec<ChangeRecord>, IngestError> {
    let mut out: Vec<ChangeRecord> = Vec::new();
    let mut carry: Option<(String, i64, SourceZone, u64)> = None;

    for (i, line) in BufReader::new(stream).lines().enumerate() {
        let line_no = (i + 1) as u64;
        let text = line?;
        if text.trim().is_empty() {
            continue;
        }
        let row: JsonRow = serde_json::from_str(&text).map_err(|e| IngestError::Parse {
            line: line_no,
            message: format!("bad json: {e}"),
        })?;
        if row.what.trim().is_empty() {
            return Err(IngestError::Parse { line: line_no, message: "empty `what` field".into() });
        }

        let (who, when, zone, bug_id) = match (row.who.filter(|w| !w.is_empty()), row.when.filter(|w| !w.is_empty())) {
            (Some(who), Some(when_raw)) => {
                let (when, zone) = parse_when(&when_raw, line_no)?;
                let bug_id = row
                    .bug_id
                    .or_else(|| carry.as_ref().map(|(_, _, _, b)| *b))
                    .ok_or_else(|| IngestError::Parse { line: line_no, message: "row missing bug_id".into() })?;
                (who, when, zone, bug_id)
            }
            _ => carry.clone().ok_or_else(|| IngestError::Parse {
                line: line_no,
                message: "continuation row with no preceding full row".into(),
            })?,
        };

        carry = Some((who.clone(), when, zone, bug_id));
        out.push(ChangeRecord {
            bug_id,
            who,
            when,
            zone,
            what: row.what,
            removed: row.removed,
            added: row.added,
        });
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub const HEADER: &str = "who,when,what,removed,added,bug_id\n";

    /// The worked example history (bug 146309), transcribed to the flat schema.
    pub fn sample_history() -> String {
        let mut s = String::from(HEADER);
        s.push_str("karla.callaghan,2006-06-14 14:37:38 EDT,Assignee,karla.callaghan,suwanda,146309\n");
        s.push_str(",,Priority,P3,P1,\n");
        s.push_str(",,Target Milestone,---,4.3,\n");
        s.push_str("srinivas.p.doddapaneni,2006-06-28 11:04:29 EDT,Version,4.2.1,4.2,146309\n");
        s.push_str("suwanda,2006-06-29 09:46:32 EDT,Assignee,suwanda,samwai,146309\n");
        s.push_str("samwai,2006-09-11 12:28:44 EDT,Priority,P1,P3,146309\n");
        s.push_str("samwai,2006-10-30 10:28:32 EST,Target Milestone,4.3,4.4,146309\n");
        s.push_str("samwai,2007-01-31 12:08:45 EST,Target Milestone,4.4,future,146309\n");
        s.push_str("nmehrega,2007-04-02 18:38:48 EDT,Assignee,samwai,nmehrega,146309\n");
        s.push_str(",,Summary,old summary,new summary,\n");
        s.push_str(",,Target Milestone,future,4.4i3,\n");
        s.push_str("nmehrega,2007-04-03 11:28:32 EDT,Keywords,,plan,146309\n");
        s.push_str("nmehrega,2007-04-03 13:40:00 EDT,Keywords,plan,,146309\n");
        s.push_str("jkubasta,2007-04-18 07:39:56 EDT,Priority,P3,P1,146309\n");
        s.push_str("nmehrega,2007-04-30 16:04:53 EDT,Status,NEW,RESOLVED,146309\n");
        s.push_str(",,Resolution,---,FIXED,\n");
        s.push_str("suwanda,2007-05-08 09:49:58 EDT,Status,RESOLVED,CLOSED,146309\n");
        s
    }

    #[test]
    fn parses_sample_in_order_with_inheritance() {
        let records = parse_history(sample_history().as_bytes()).unwrap();
        assert_eq!(records.len(), 17);

        let first = &records[0];
        assert_eq!(first.who, "karla.callaghan");
        assert_eq!(first.what, "Assignee");
        assert_eq!(first.removed, "karla.callaghan");
        assert_eq!(first.added, "suwanda");
        assert_eq!(first.bug_id, 146309);

        // Continuation rows inherit who/when/bug_id.
        let cont = &records[1];
        assert_eq!(cont.who, "karla.callaghan");
        assert_eq!(cont.when, first.when);
        assert_eq!(cont.bug_id, 146309);
        assert_eq!(cont.what, "Priority");
    }

    #[test]
    fn header_only_yields_empty_list() {
        let records = parse_history(HEADER.as_bytes()).unwrap();
        assert!(records.is_empty());
    }

    #[test]
    fn malformed_timestamp_names_line() {
        let data = format!("{HEADER}alice,2006-13-45 99:00:00 EDT,Status,NEW,RESOLVED,1\n");
        let err = parse_history(data.as_bytes()).unwrap_err();
        match err {
            IngestError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn missing_column_is_rejected() {
        let err = parse_history("who,when,what,removed,added\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::MissingColumn("bug_id")));
    }

    #[test]
    fn jsonl_matches_csv_semantics() {
        let jsonl = concat!(
            r#"{"who":"a","when":"2006-06-14 14:37:38 EDT","what":"Assignee","removed":"a","added":"b","bug_id":7}"#,
            "\n",
            r#"{"what":"Priority","removed":"P3","added":"P1"}"#,
            "\n",
        );
        let records = parse_history_jsonl(jsonl.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[1].who, "a");
        assert_eq!(records[1].bug_id, 7);
        assert_eq!(records[0].when, records[1].when);
    }
}
