//! Timestamp normalization. The tracker server clock reads EST or EDT
//! depending on the season; everything downstream works in GMT seconds.

use chrono::{DateTime, NaiveDateTime, Utc};

use super::{IngestError, SourceZone};

/// Parse `YYYY-MM-DD HH:MM:SS` to a naive local reading.
pub fn parse_local_datetime(text: &str) -> Result<NaiveDateTime, IngestError> {
    NaiveDateTime::parse_from_str(text.trim(), "%Y-%m-%d %H:%M:%S").map_err(|e| IngestError::Parse {
        line: 0,
        message: format!("malformed timestamp {text:?}: {e}"),
    })
}

/// Convert a local reading in the given zone to GMT seconds since epoch.
///
/// EST adds 5 hours, EDT adds 4, GMT is unchanged.
pub fn normalize_time(local: NaiveDateTime, zone: SourceZone) -> i64 {
    local.and_utc().timestamp() + zone.offset_to_gmt_secs()
}

/// ISO-8601 GMT rendering of an epoch-seconds timestamp.
pub fn format_gmt(at: i64) -> String {
    DateTime::<Utc>::from_timestamp(at, 0)
        .map(|dt| dt.format("%Y-%m-%dT%H:%M:%SZ").to_string())
        .unwrap_or_else(|| format!("@{at}s"))
}
