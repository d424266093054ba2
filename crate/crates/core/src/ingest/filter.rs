//! Corpus refinement: keep the skilled-fixer cohort and, optionally, only
//! bugs that ran a complete receive→fix life cycle.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{BugEvent, EventKind};

/// What a filter pass kept, for auditing.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FilterSummary {
    pub developers_total: usize,
    pub developers_retained: usize,
    pub bugs_total: usize,
    pub bugs_retained: usize,
    pub events_total: usize,
    pub events_retained: usize,
    pub retained_fraction: f64,
    /// Fix count of the last developer inside the top-fraction rank, when
    /// the fraction rule was active.
    pub rank_cutoff: Option<usize>,
}

/// Keep developers who fixed at least `min_fixed` bugs AND sit within the
/// top `top_fraction` of fixers ranked by fixed-bug count (ties at the
/// cutoff are kept). With `top_fraction = 1` the rank rule is vacuous, so
/// `min_fixed = 0, top_fraction = 1` is the identity.
///
/// With `require_full_lifecycle`, bugs lacking a fix among the surviving
/// events are dropped entirely.
///
/// Note the rank cutoff is computed from this call's input. Because a
/// fraction of a smaller population is smaller, re-running with
/// `top_fraction < 1` on already-filtered output can cut deeper; re-running
/// is stable whenever the `min_fixed` threshold dominates the cutoff (as in
/// the standard ≥ 50 bugs cohort) or `top_fraction = 1`.
pub fn filter_corpus(
    events: &[BugEvent],
    min_fixed: usize,
    top_fraction: f64,
    require_full_lifecycle: bool,
) -> (Vec<BugEvent>, FilterSummary) {
    assert!(top_fraction > 0.0 && top_fraction <= 1.0, "top_fraction must be in (0, 1]");

    let mut fix_counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut all_devs: BTreeSet<&str> = BTreeSet::new();
    let mut all_bugs: BTreeSet<u64> = BTreeSet::new();
    for ev in events {
        all_devs.insert(&ev.developer);
        all_bugs.insert(ev.bug_id);
        if ev.kind == EventKind::Fix {
            *fix_counts.entry(&ev.developer).or_default() += 1;
        }
    }

    let mut rank_cutoff = None;
    if top_fraction < 1.0 && !fix_counts.is_empty() {
        let mut counts: Vec<usize> = fix_counts.values().copied().collect();
        counts.sort_unstable_by(|a, b| b.cmp(a));
        let keep = ((counts.len() as f64) * top_fraction).ceil().max(1.0) as usize;
        rank_cutoff = Some(counts[keep.min(counts.len()) - 1]);
    }

    let retained = |dev: &str| {
        let fixes = fix_counts.get(dev).copied().unwrap_or(0);
        fixes >= min_fixed && rank_cutoff.map_or(true, |c| fixes >= c)
    };

    let mut kept: Vec<BugEvent> = events.iter().filter(|e| retained(&e.developer)).cloned().collect();

    if require_full_lifecycle {
        let fixed_bugs: BTreeSet<u64> =
            kept.iter().filter(|e| e.kind == EventKind::Fix).map(|e| e.bug_id).collect();
        kept.retain(|e| fixed_bugs.contains(&e.bug_id));
    }

    let kept_devs: BTreeSet<&str> = kept.iter().map(|e| e.developer.as_str()).collect();
    let kept_bugs: BTreeSet<u64> = kept.iter().map(|e| e.bug_id).collect();
    let summary = FilterSummary {
        developers_total: all_devs.len(),
        developers_retained: kept_devs.len(),
        bugs_total: all_bugs.len(),
        bugs_retained: kept_bugs.len(),
        events_total: events.len(),
        events_retained: kept.len(),
        retained_fraction: if events.is_empty() { 1.0 } else { kept.len() as f64 / events.len() as f64 },
        rank_cutoff,
    };
    (kept, summary)
}
