//! Developer workload and performance: window the event stream into fixed
//! intervals per developer and aggregate fixing/tossing rates by workload.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ingest::{BugEvent, EventKind};

pub const SECS_PER_DAY: i64 = 86_400;

/// Default window length. "Three months" is calendar-ambiguous; 91 days is
/// the quarter-year convention used throughout.
pub const DEFAULT_WINDOW_DAYS: f64 = 91.0;

/// One (developer, window) observation: workload and outcome counts.
///
/// `n` counts bugs received in the window. `k_fixed` / `k_tossed` count how
/// many of *those receipts* the developer went on to fix or toss, no matter
/// when the outcome happened.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeveloperWindow {
    pub developer: String,
    pub window_index: i64,
    pub n: usize,
    pub k_fixed: usize,
    pub k_tossed: usize,
}

/// Mean rates over the developer-window samples sharing a workload value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePoint {
    /// Workload (receipts per window).
    pub n: usize,
    /// Number of samples at this workload.
    pub m: usize,
    /// Mean fixing rate.
    pub p_fix: f64,
    /// Mean tossing rate.
    pub p_toss: f64,
}

/// Outcome attached to one receipt episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Fixed,
    Tossed,
    Pending,
}

/// One receipt with its eventual outcome; the unit that both the rate
/// curves and the receiving-queue metrics are built from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiptEpisode {
    pub developer: String,
    pub bug_id: u64,
    pub received_at: i64,
    pub window_index: i64,
    pub outcome: Outcome,
    pub outcome_at: Option<i64>,
}

/// Pair every receive with the same developer's next fix/toss of that bug
/// (before any re-receive), tagging each receipt with its window.
pub fn receipt_episodes(events: &[BugEvent], window_days: f64, origin: i64) -> Vec<ReceiptEpisode> {
    let window_secs = (window_days * SECS_PER_DAY as f64).round() as i64;
    assert!(window_secs > 0, "window_days must be positive");

    let mut ordered: Vec<&BugEvent> = events.iter().collect();
    ordered.sort_by(|a, b| {
        (a.bug_id, a.at, kind_rank(a.kind), &a.developer).cmp(&(b.bug_id, b.at, kind_rank(b.kind), &b.developer))
    });

    let mut episodes: Vec<ReceiptEpisode> = Vec::new();
    // Open episode index per (bug, developer).
    let mut open: BTreeMap<(u64, String), usize> = BTreeMap::new();

    for ev in ordered {
        let key = (ev.bug_id, ev.developer.clone());
        match ev.kind {
            EventKind::Receive => {
                let idx = episodes.len();
                episodes.push(ReceiptEpisode {
                    developer: ev.developer.clone(),
                    bug_id: ev.bug_id,
                    received_at: ev.at,
                    window_index: (ev.at - origin).div_euclid(window_secs),
                    outcome: Outcome::Pending,
                    outcome_at: None,
                });
                open.insert(key, idx);
            }
            EventKind::Fix | EventKind::Toss => {
                if let Some(idx) = open.remove(&key) {
                    episodes[idx].outcome =
                        if ev.kind == EventKind::Fix { Outcome::Fixed } else { Outcome::Tossed };
                    episodes[idx].outcome_at = Some(ev.at);
                }
            }
        }
    }
    episodes
}

/// Window events into per-developer workload samples.
///
/// Windows are consecutive `window_days` intervals starting at `origin`
/// (normally the earliest event timestamp). A developer appears once per
/// window in which they received at least one bug.
pub fn window_events(events: &[BugEvent], window_days: f64, origin: i64) -> Vec<DeveloperWindow> {
    let episodes = receipt_episodes(events, window_days, origin);

    let mut acc: BTreeMap<(String, i64), (usize, usize, usize)> = BTreeMap::new();
    for ep in &episodes {
        let slot = acc.entry((ep.developer.clone(), ep.window_index)).or_default();
        slot.0 += 1;
        match ep.outcome {
            Outcome::Fixed => slot.1 += 1,
            Outcome::Tossed => slot.2 += 1,
            Outcome::Pending => {}
        }
    }

    acc.into_iter()
        .map(|((developer, window_index), (n, k_fixed, k_tossed))| DeveloperWindow {
            developer,
            window_index,
            n,
            k_fixed,
            k_tossed,
        })
        .collect()
}

/// Aggregate developer-window samples into mean rate points per workload.
///
/// For each integer workload value, the fixing rate is the mean of
/// `k_fixed / n` over the samples with that workload, and likewise for
/// tossing. Points come back sorted by workload.
pub fn rate_curve(samples: &[DeveloperWindow]) -> Vec<RatePoint> {
    let mut acc: BTreeMap<usize, (usize, f64, f64)> = BTreeMap::new();
    for s in samples {
        debug_assert!(s.n >= 1 && s.k_fixed + s.k_tossed <= s.n);
        let slot = acc.entry(s.n).or_default();
        slot.0 += 1;
        slot.1 += s.k_fixed as f64 / s.n as f64;
        slot.2 += s.k_tossed as f64 / s.n as f64;
    }
    acc.into_iter()
        .map(|(n, (m, fsum, tsum))| RatePoint { n, m, p_fix: fsum / m as f64, p_toss: tsum / m as f64 })
        .collect()
}

/// Earliest event timestamp; the default windowing origin.
pub fn default_origin(events: &[BugEvent]) -> i64 {
    events.iter().map(|e| e.at).min().unwrap_or(0)
}

fn kind_rank(kind: EventKind) -> u8 {
    match kind {
        EventKind::Receive => 0,
        EventKind::Toss => 1,
        EventKind::Fix => 2,
    }
}
