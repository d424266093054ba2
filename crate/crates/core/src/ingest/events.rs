//! Semantic event extraction: assignee changes become toss/receive pairs,
//! resolution rows become fixes, and each bug's original assignee gets a
//! synthetic receive at the bug's first history record.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{BugEvent, ChangeRecord, EventKind, ProcessingTime};

/// Tallies of everything dropped or merely noted during extraction. None of
/// these are fatal; they exist so a corpus run can be audited.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExtractDiagnostics {
    pub records: usize,
    pub bugs: usize,
    pub receives: usize,
    pub fixes: usize,
    pub tosses: usize,
    /// Fix rows whose developer had no open receive for the bug.
    pub dropped_fix_no_receive: usize,
    /// Assignee changes whose `removed` side was not the current holder.
    pub dropped_toss_no_receive: usize,
    /// Assignee changes with `removed == added`.
    pub self_assignments_skipped: usize,
    /// Fixes detected from a lone Resolution→FIXED row without the
    /// Status→RESOLVED sibling.
    pub lone_resolution_fixes: usize,
    /// Receives by a developer who had already held the bug earlier
    /// (re-toss back after a detour); counted independently.
    pub re_receives: usize,
    /// Events ignored because the bug had already produced its first fix
    /// (reopened bugs contribute only their first full trace).
    pub suppressed_after_fix: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowAction {
    Toss,
    Fix { lone: bool },
    None,
}

fn classify(rec: &ChangeRecord, group: &[&ChangeRecord]) -> RowAction {
    match rec.what.as_str() {
        "Assignee" => {
            if rec.removed == rec.added {
                RowAction::None
            } else {
                RowAction::Toss
            }
        }
        "Status" if rec.added == "RESOLVED" => {
            let has_fixed_sibling = group
                .iter()
                .any(|r| r.what == "Resolution" && r.added == "FIXED" && r.who == rec.who && r.when == rec.when);
            if has_fixed_sibling {
                RowAction::Fix { lone: false }
            } else {
                RowAction::None
            }
        }
        "Resolution" if rec.added == "FIXED" => {
            let has_status_sibling = group
                .iter()
                .any(|r| r.what == "Status" && r.added == "RESOLVED" && r.who == rec.who && r.when == rec.when);
            if has_status_sibling {
                // The Status row carries the fix; avoid double counting.
                RowAction::None
            } else {
                RowAction::Fix { lone: true }
            }
        }
        _ => RowAction::None,
    }
}

/// Extract receive/fix/toss events from parsed history records.
///
/// Records are grouped per bug and walked in time order. Within one bug:
/// the original assignee (the `removed` side of the earliest real assignee
/// change, or the fixer when the bug was never tossed) receives the bug at
/// the first record's timestamp; every assignee change is a toss by the
/// current holder plus a receive by the new one; a Status→RESOLVED row with
/// a Resolution→FIXED sibling is a fix by the row's actor. Everything after
/// the bug's first fix is ignored.
pub fn extract_events(records: &[ChangeRecord]) -> (Vec<BugEvent>, ExtractDiagnostics) {
    let mut diag = ExtractDiagnostics { records: records.len(), ..Default::default() };

    let mut per_bug: BTreeMap<u64, Vec<&ChangeRecord>> = BTreeMap::new();
    for rec in records {
        per_bug.entry(rec.bug_id).or_default().push(rec);
    }
    diag.bugs = per_bug.len();

    let mut events: Vec<BugEvent> = Vec::new();

    for (bug_id, mut rows) in per_bug {
        rows.sort_by_key(|r| r.when);

        let first_when = match rows.first() {
            Some(r) => r.when,
            None => continue,
        };

        // Original assignee: `removed` of the earliest real assignee change,
        // else the actor of the earliest fix row.
        let mut original: Option<&str> = None;
        for r in &rows {
            match classify(r, &rows) {
                RowAction::Toss => {
                    original = Some(&r.removed);
                    break;
                }
                RowAction::Fix { .. } => {
                    original = Some(&r.who);
                    break;
                }
                RowAction::None => {}
            }
        }
        let Some(original) = original else { continue };

        let mut holder: String = original.to_string();
        let mut ever_held: Vec<String> = vec![holder.clone()];
        let mut fixed = false;
        events.push(BugEvent::receive(bug_id, holder.clone(), first_when));
        diag.receives += 1;

        for r in &rows {
            let action = classify(r, &rows);
            if matches!(action, RowAction::None) {
                if r.what == "Assignee" && r.removed == r.added {
                    diag.self_assignments_skipped += 1;
                }
                continue;
            }
            if fixed {
                diag.suppressed_after_fix += 1;
                continue;
            }
            match action {
                RowAction::Toss => {
                    if r.removed != holder {
                        diag.dropped_toss_no_receive += 1;
                        continue;
                    }
                    events.push(BugEvent::toss(bug_id, r.removed.clone(), r.added.clone(), r.when));
                    diag.tosses += 1;
                    holder = r.added.clone();
                    if ever_held.iter().any(|h| h == &holder) {
                        diag.re_receives += 1;
                    } else {
                        ever_held.push(holder.clone());
                    }
                    events.push(BugEvent::receive(bug_id, holder.clone(), r.when));
                    diag.receives += 1;
                }
                RowAction::Fix { lone } => {
                    if r.who != holder {
                        diag.dropped_fix_no_receive += 1;
                        continue;
                    }
                    if lone {
                        diag.lone_resolution_fixes += 1;
                    }
                    events.push(BugEvent::fix(bug_id, r.who.clone(), r.when));
                    diag.fixes += 1;
                    fixed = true;
                }
                RowAction::None => unreachable!(),
            }
        }
    }

    (events, diag)
}

/// Pair each fix/toss with the developer's receive of that bug and emit the
/// holding duration in hours. Same-instant pairs (tau = 0) are dropped; the
/// returned count says how many.
pub fn processing_times_detailed(events: &[BugEvent]) -> (Vec<ProcessingTime>, usize) {
    // Open receive per (bug, developer), replaced on re-receive.
    let mut open: BTreeMap<(u64, &str), i64> = BTreeMap::new();
    let mut out = Vec::new();
    let mut dropped_nonpositive = 0usize;

    let mut ordered: Vec<&BugEvent> = events.iter().collect();
    ordered.sort_by_key(|e| (e.bug_id, e.at, kind_rank(e.kind)));

    for ev in ordered {
        match ev.kind {
            EventKind::Receive => {
                open.insert((ev.bug_id, ev.developer.as_str()), ev.at);
            }
            EventKind::Fix | EventKind::Toss => {
                if let Some(received_at) = open.remove(&(ev.bug_id, ev.developer.as_str())) {
                    let tau = (ev.at - received_at) as f64 / 3600.0;
                    if tau > 0.0 {
                        out.push(ProcessingTime {
                            bug_id: ev.bug_id,
                            developer: ev.developer.clone(),
                            kind: ev.kind,
                            tau,
                        });
                    } else {
                        dropped_nonpositive += 1;
                    }
                }
            }
        }
    }
    (out, dropped_nonpositive)
}

/// [`processing_times_detailed`] without the drop count.
pub fn processing_times(events: &[BugEvent]) -> Vec<ProcessingTime> {
    processing_times_detailed(events).0
}

/// Receives sort ahead of the fixes/tosses they enable at equal timestamps.
fn kind_rank(kind: EventKind) -> u8 {
    match kind {
        EventKind::Receive => 0,
        EventKind::Toss => 1,
        EventKind::Fix => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::tests::{sample_history, HEADER};
    use super::super::parse_history;
    use super::*;
    use approx::assert_relative_eq;

    fn sample_events() -> (Vec<BugEvent>, ExtractDiagnostics) {
        let records = parse_history(sample_history().as_bytes()).unwrap();
        extract_events(&records)
    }

    #[test]
    fn sample_yields_toss_chain_then_fix() {
        let (events, diag) = sample_events();
        assert_eq!(diag.tosses, 3);
        assert_eq!(diag.fixes, 1);
        assert_eq!(diag.receives, 4);
        assert_eq!(diag.dropped_fix_no_receive, 0);
        assert_eq!(diag.dropped_toss_no_receive, 0);

        let tosses: Vec<(&str, &str)> = events
            .iter()
            .filter(|e| e.kind == EventKind::Toss)
            .map(|e| (e.developer.as_str(), e.toss_target.as_deref().unwrap()))
            .collect();
        assert_eq!(
            tosses,
            vec![
                ("karla.callaghan", "suwanda"),
                ("suwanda", "samwai"),
                ("samwai", "nmehrega"),
            ]
        );

        let fix = events.iter().find(|e| e.kind == EventKind::Fix).unwrap();
        assert_eq!(fix.developer, "nmehrega");
        // 2007-04-30 16:04:53 EDT == 20:04:53 GMT.
        assert_eq!(super::super::format_gmt(fix.at), "2007-04-30T20:04:53Z");
    }

    #[test]
    fn single_resolved_fixed_pair_yields_one_fix() {
        let data = format!(
            "{HEADER}dev,2006-01-01 00:00:00 GMT,Status,NEW,RESOLVED,1\n,,Resolution,---,FIXED,\n"
        );
        let records = parse_history(data.as_bytes()).unwrap();
        let (events, diag) = extract_events(&records);
        assert_eq!(diag.fixes, 1);
        assert_eq!(diag.lone_resolution_fixes, 0);
        // Synthetic receive for the original assignee plus the fix.
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].kind, EventKind::Receive);
        assert_eq!(events[0].developer, "dev");
    }

    #[test]
    fn lone_resolution_fixed_accepted_with_note() {
        let data = format!("{HEADER}dev,2006-01-01 00:00:00 GMT,Resolution,---,FIXED,1\n");
        let records = parse_history(data.as_bytes()).unwrap();
        let (events, diag) = extract_events(&records);
        assert_eq!(diag.fixes, 1);
        assert_eq!(diag.lone_resolution_fixes, 1);
        assert_eq!(events.len(), 2);
    }

    #[test]
    fn self_assignment_yields_no_event() {
        let data = format!("{HEADER}dev,2006-01-01 00:00:00 GMT,Assignee,dev,dev,1\n");
        let records = parse_history(data.as_bytes()).unwrap();
        let (events, diag) = extract_events(&records);
        assert!(events.is_empty());
        assert_eq!(diag.self_assignments_skipped, 1);
    }

    #[test]
    fn fix_by_nonholder_is_dropped_not_fatal() {
        let data = format!(
            "{HEADER}a,2006-01-01 00:00:00 GMT,Assignee,a,b,1\nzz,2006-01-02 00:00:00 GMT,Status,NEW,RESOLVED,1\n,,Resolution,---,FIXED,\n"
        );
        let records = parse_history(data.as_bytes()).unwrap();
        let (events, diag) = extract_events(&records);
        assert_eq!(diag.dropped_fix_no_receive, 1);
        assert_eq!(diag.fixes, 0);
        assert_eq!(events.iter().filter(|e| e.kind == EventKind::Toss).count(), 1);
    }

    #[test]
    fn events_after_first_fix_are_suppressed() {
        let data = format!(
            "{HEADER}dev,2006-01-01 00:00:00 GMT,Status,NEW,RESOLVED,1\n,,Resolution,---,FIXED,\ndev,2006-02-01 00:00:00 GMT,Assignee,dev,other,1\ndev,2006-03-01 00:00:00 GMT,Status,REOPENED,RESOLVED,1\n,,Resolution,---,FIXED,\n"
        );
        let records = parse_history(data.as_bytes()).unwrap();
        let (events, diag) = extract_events(&records);
        assert_eq!(diag.fixes, 1);
        assert_eq!(diag.suppressed_after_fix, 2);
        assert_eq!(events.len(), 2);
    }

    #[test]
    fn sample_processing_times_match_hand_subtraction() {
        let (events, _) = sample_events();
        let (times, dropped) = processing_times_detailed(&events);
        // karla's receive and toss share a timestamp, so only three episodes
        // survive: suwanda's toss, samwai's toss, nmehrega's fix.
        assert_eq!(dropped, 1);
        assert_eq!(times.len(), 3);

        let by_dev = |d: &str| times.iter().find(|t| t.developer == d).unwrap();
        assert_relative_eq!(by_dev("suwanda").tau, 355.148333333, max_relative = 1e-9);
        assert_relative_eq!(by_dev("samwai").tau, 6656.871111111, max_relative = 1e-9);
        assert_relative_eq!(by_dev("nmehrega").tau, 669.434722222, max_relative = 1e-9);
        assert_eq!(by_dev("suwanda").kind, EventKind::Toss);
        assert_eq!(by_dev("nmehrega").kind, EventKind::Fix);
    }

    #[test]
    fn one_hour_apart_gives_tau_one() {
        let events = vec![
            BugEvent::receive(1, "d", 0),
            BugEvent::fix(1, "d", 3600),
        ];
        let times = processing_times(&events);
        assert_eq!(times.len(), 1);
        assert_relative_eq!(times[0].tau, 1.0);
    }

    #[test]
    fn fix_count_matches_matched_receives() {
        let (events, _) = sample_events();
        let (times, dropped) = processing_times_detailed(&events);
        let fix_times = times.iter().filter(|t| t.kind == EventKind::Fix).count();
        let fix_events = events.iter().filter(|e| e.kind == EventKind::Fix).count();
        assert_eq!(fix_times, fix_events);
        assert!(times.iter().all(|t| t.tau > 0.0));
        let toss_times = times.iter().filter(|t| t.kind == EventKind::Toss).count();
        let toss_events = events.iter().filter(|e| e.kind == EventKind::Toss).count();
        assert_eq!(toss_times + dropped, toss_events);
    }

    #[test]
    fn replay_has_single_holder_at_every_instant() {
        let (events, _) = sample_events();
        let mut holder: Option<&str> = None;
        for ev in &events {
            match ev.kind {
                EventKind::Receive => {
                    // A receive either starts the bug or matches the pending
                    // toss target recorded below.
                    if let Some(expected) = holder {
                        assert_eq!(ev.developer, expected);
                    }
                    holder = Some(&ev.developer);
                }
                EventKind::Toss => {
                    assert_eq!(Some(ev.developer.as_str()), holder);
                    holder = ev.toss_target.as_deref();
                }
                EventKind::Fix => {
                    assert_eq!(Some(ev.developer.as_str()), holder);
                }
            }
        }
    }
}
