//! Receiving queues and spatial behavior metrics: where in the queue a
//! developer's first fix and first toss land, per working state.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ingest::BugEvent;
use crate::metrics::{receipt_episodes, Outcome};

/// One queue entry: a received bug and what eventually happened to it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueueEntry {
    pub bug_id: u64,
    pub received_at: i64,
    pub outcome: Outcome,
    pub outcome_at: Option<i64>,
}

/// A developer's receiving queue for one window: entries in receive order,
/// positions 1-based. Pending entries occupy positions but never supply
/// first-fix/first-toss values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceivingQueue {
    pub developer: String,
    pub window_index: i64,
    pub entries: Vec<QueueEntry>,
}

/// First fixing and tossing positions for one queue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QueueMetrics {
    /// 1-based position of the chronologically first fix, if any.
    pub first_fix_pos: Option<usize>,
    /// 1-based position of the chronologically first toss, if any.
    pub first_toss_pos: Option<usize>,
    /// Queue length (workload of the window).
    pub n: usize,
}

/// Mean first positions over a set of queues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AveragePositions {
    /// Mean first fixing position, absent when no queue had a fix.
    pub affp: Option<f64>,
    /// Mean first tossing position, absent when no queue had a toss.
    pub aftp: Option<f64>,
    pub fix_samples: usize,
    pub toss_samples: usize,
}

/// Build one receiving queue per developer-window from the event stream,
/// entries ordered by receive time.
pub fn build_queues(events: &[BugEvent], window_days: f64, origin: i64) -> Vec<ReceivingQueue> {
    let mut episodes = receipt_episodes(events, window_days, origin);
    episodes.sort_by(|a, b| {
        (&a.developer, a.window_index, a.received_at, a.bug_id)
            .cmp(&(&b.developer, b.window_index, b.received_at, b.bug_id))
    });

    let mut queues: Vec<ReceivingQueue> = Vec::new();
    for ep in episodes {
        let entry = QueueEntry {
            bug_id: ep.bug_id,
            received_at: ep.received_at,
            outcome: ep.outcome,
            outcome_at: ep.outcome_at,
        };
        match queues.last_mut() {
            Some(q) if q.developer == ep.developer && q.window_index == ep.window_index => {
                q.entries.push(entry)
            }
            _ => queues.push(ReceivingQueue {
                developer: ep.developer,
                window_index: ep.window_index,
                entries: vec![entry],
            }),
        }
    }
    queues
}

/// First fixing position = queue position of the entry whose fix happened
/// earliest in time (not the smallest fixed position); ties resolve to the
/// earlier queue position. Tossing analogous.
pub fn first_positions(queue: &ReceivingQueue) -> QueueMetrics {
    debug_assert!(queue.entries.windows(2).all(|w| w[0].received_at <= w[1].received_at));

    let earliest = |want: Outcome| {
        queue
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.outcome == want)
            .filter_map(|(i, e)| e.outcome_at.map(|t| (t, i + 1)))
            .min()
            .map(|(_, pos)| pos)
    };

    QueueMetrics {
        first_fix_pos: earliest(Outcome::Fixed),
        first_toss_pos: earliest(Outcome::Tossed),
        n: queue.entries.len(),
    }
}

/// Average first fixing/tossing positions over the samples that have them.
pub fn affp_aftp(metrics: &[QueueMetrics]) -> AveragePositions {
    assert!(!metrics.is_empty(), "affp_aftp needs at least one sample");
    let mean_of = |extract: fn(&QueueMetrics) -> Option<usize>| {
        let values: Vec<usize> = metrics.iter().filter_map(extract).collect();
        let mean = if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<usize>() as f64 / values.len() as f64)
        };
        (mean, values.len())
    };
    let (affp, fix_samples) = mean_of(|m| m.first_fix_pos);
    let (aftp, toss_samples) = mean_of(|m| m.first_toss_pos);
    AveragePositions { affp, aftp, fix_samples, toss_samples }
}

/// Working-state split of workload-tagged samples: workloads up to
/// `floor(threshold)` are normal, everything above is overload.
pub fn group_by_state<T: Clone>(samples: &[(usize, T)], threshold: f64) -> (Vec<T>, Vec<T>) {
    assert!(threshold > 0.0, "threshold must be positive");
    let cut = threshold.floor() as usize;
    let mut normal = Vec::new();
    let mut overload = Vec::new();
    for (n, value) in samples {
        if *n <= cut {
            normal.push(value.clone());
        } else {
            overload.push(value.clone());
        }
    }
    (normal, overload)
}

/// Per-workload scatter of mean first positions, for plotting.
pub fn positions_by_workload(metrics: &[QueueMetrics]) -> Vec<(usize, AveragePositions)> {
    let mut by_n: BTreeMap<usize, Vec<QueueMetrics>> = BTreeMap::new();
    for m in metrics {
        by_n.entry(m.n).or_default().push(*m);
    }
    by_n.into_iter().map(|(n, group)| (n, affp_aftp(&group))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::BugEvent;
    use crate::metrics::Outcome;

    /// The illustrated seven-bug queue: fixes at positions 1, 2, 5, 7 and
    /// tosses at 3, 4, 6, with the position-1 bug fixed first and the
    /// position-3 bug tossed first.
    fn seven_bug_queue() -> ReceivingQueue {
        let outcomes = [
            (Outcome::Fixed, 100),
            (Outcome::Fixed, 200),
            (Outcome::Tossed, 150),
            (Outcome::Tossed, 250),
            (Outcome::Fixed, 300),
            (Outcome::Tossed, 350),
            (Outcome::Fixed, 400),
        ];
        ReceivingQueue {
            developer: "dev".into(),
            window_index: 0,
            entries: outcomes
                .iter()
                .enumerate()
                .map(|(i, &(outcome, at))| QueueEntry {
                    bug_id: i as u64 + 1,
                    received_at: i as i64 * 10,
                    outcome,
                    outcome_at: Some(at),
                })
                .collect(),
        }
    }

    #[test]
    fn illustrated_queue_has_sf_one_st_three() {
        let m = first_positions(&seven_bug_queue());
        assert_eq!(m.first_fix_pos, Some(1));
        assert_eq!(m.first_toss_pos, Some(3));
        assert_eq!(m.n, 7);
    }

    #[test]
    fn single_fixed_bug_queue() {
        let q = ReceivingQueue {
            developer: "dev".into(),
            window_index: 0,
            entries: vec![QueueEntry {
                bug_id: 1,
                received_at: 0,
                outcome: Outcome::Fixed,
                outcome_at: Some(50),
            }],
        };
        let m = first_positions(&q);
        assert_eq!(m.first_fix_pos, Some(1));
        assert_eq!(m.first_toss_pos, None);
    }

    #[test]
    fn chronologically_first_fix_beats_lower_position() {
        // Position 4 fixed before position 1.
        let mut q = seven_bug_queue();
        q.entries[3].outcome = Outcome::Fixed;
        q.entries[3].outcome_at = Some(5);
        let m = first_positions(&q);
        assert_eq!(m.first_fix_pos, Some(4));
    }

    #[test]
    fn pending_entries_occupy_positions_without_supplying_firsts() {
        let q = ReceivingQueue {
            developer: "dev".into(),
            window_index: 0,
            entries: vec![
                QueueEntry { bug_id: 1, received_at: 0, outcome: Outcome::Pending, outcome_at: None },
                QueueEntry { bug_id: 2, received_at: 5, outcome: Outcome::Fixed, outcome_at: Some(60) },
            ],
        };
        let m = first_positions(&q);
        assert_eq!(m.first_fix_pos, Some(2));
        assert_eq!(m.n, 2);
    }

    #[test]
    fn build_queues_sorts_receipts_out_of_input_order() {
        let events = vec![
            BugEvent::receive(2, "d", 500),
            BugEvent::receive(1, "d", 100),
            BugEvent::fix(2, "d", 900),
        ];
        let queues = build_queues(&events, 91.0, 0);
        assert_eq!(queues.len(), 1);
        let bugs: Vec<u64> = queues[0].entries.iter().map(|e| e.bug_id).collect();
        assert_eq!(bugs, vec![1, 2]);
        assert_eq!(queues[0].entries[1].outcome, Outcome::Fixed);
        assert_eq!(queues[0].entries[0].outcome, Outcome::Pending);
    }

    #[test]
    fn affp_aftp_hand_means() {
        let mk = |f: Option<usize>, t: Option<usize>| QueueMetrics { first_fix_pos: f, first_toss_pos: t, n: 9 };
        let all_ones = [mk(Some(1), None), mk(Some(1), None), mk(Some(1), None)];
        assert_eq!(affp_aftp(&all_ones).affp, Some(1.0));

        let mixed = [mk(Some(1), Some(3)), mk(Some(3), Some(5))];
        let avg = affp_aftp(&mixed);
        assert_eq!(avg.affp, Some(2.0));
        assert_eq!(avg.aftp, Some(4.0));

        let no_toss = [mk(Some(2), None)];
        assert_eq!(affp_aftp(&no_toss).aftp, None);
    }

    #[test]
    fn state_grouping_uses_floor_of_threshold() {
        let tagged: Vec<(usize, usize)> = vec![(21, 21), (22, 22), (1, 1)];
        let (normal, overload) = group_by_state(&tagged, 21.07);
        assert_eq!(normal, vec![21, 1]);
        assert_eq!(overload, vec![22]);

        let tagged2: Vec<(usize, usize)> = vec![(27, 27), (28, 28)];
        let (normal2, overload2) = group_by_state(&tagged2, 27.26);
        assert_eq!(normal2, vec![27]);
        assert_eq!(overload2, vec![28]);

        let ones: Vec<(usize, usize)> = vec![(1, 1); 5];
        let (n3, o3) = group_by_state(&ones, 21.07);
        assert_eq!(n3.len() + o3.len(), ones.len());
        assert!(o3.is_empty());
    }
}
