//! Overload-threshold selection.
//!
//! Candidate thresholds are the inflection points of the two fitted rate
//! curves. A candidate qualifies when, on the scan grid past it, both
//! second derivatives (1) never change sign relative to their value just
//! past the candidate and (2) settle into the `eps` band around their
//! steadiness constants and stay there through `grid_max`. The magnitude
//! condition is a settling condition: the curves must end up steady, not
//! be inside the band from the first step — a curve can leave the band on
//! its way down as long as it has converged by the end of the grid.

use serde::Serialize;
use thiserror::Error;

use super::{find_inflections, FitModel, ThresholdCriteria};

/// Per-candidate audit of the four steady-state conditions.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateCheck {
    pub candidate: f64,
    /// Which curve produced the candidate ("fix" or "toss").
    pub source: &'static str,
    pub sign_constant_fix: bool,
    pub sign_constant_toss: bool,
    /// Grid point from which the fixing curve stays inside the band.
    pub settles_fix_at: Option<f64>,
    pub settles_toss_at: Option<f64>,
    pub max_abs_fix_after: f64,
    pub max_abs_toss_after: f64,
    pub qualifies: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub threshold: f64,
    pub criteria: ThresholdCriteria,
    pub candidates: Vec<CandidateCheck>,
}

#[derive(Debug, Error)]
pub enum ThresholdError {
    #[error("no inflection point in [1, {grid_max}] for either curve")]
    NoInflection { grid_max: f64 },
    #[error("no candidate satisfies the steady-state conditions: {}",
        .candidates.iter().map(describe).collect::<Vec<_>>().join("; "))]
    NoSteadyCandidate { candidates: Vec<CandidateCheck> },
}

fn describe(c: &CandidateCheck) -> String {
    let mut problems = Vec::new();
    if !c.sign_constant_fix {
        problems.push("fix-curve sign flips");
    }
    if !c.sign_constant_toss {
        problems.push("toss-curve sign flips");
    }
    if c.settles_fix_at.is_none() {
        problems.push("fix curve never settles");
    }
    if c.settles_toss_at.is_none() {
        problems.push("toss curve never settles");
    }
    format!("{:.2}: {}", c.candidate, problems.join(", "))
}

struct CurveScan {
    sign_constant: bool,
    settles_at: Option<f64>,
    max_abs_after: f64,
}

fn scan_curve(model: &FitModel, candidate: f64, steady: f64, crit: &ThresholdCriteria) -> CurveScan {
    let reference = model.second_derivative(candidate + crit.eps).signum();
    let mut sign_constant = true;
    let mut last_violation: Option<f64> = None;
    let mut max_abs_after = 0.0f64;

    let mut n = candidate + crit.grid_step;
    let mut first = f64::NAN;
    while n <= crit.grid_max + 1e-12 {
        let v = model.second_derivative(n);
        if first.is_nan() {
            first = n;
        }
        if v != 0.0 && reference != 0.0 && v.signum() != reference {
            sign_constant = false;
        }
        let dev = (v - steady).abs();
        max_abs_after = max_abs_after.max(dev);
        if dev > crit.eps {
            last_violation = Some(n);
        }
        n += crit.grid_step;
    }

    let settles_at = match last_violation {
        None => Some(first),
        // The band must be reached strictly before the grid runs out.
        Some(v) if v + crit.grid_step <= crit.grid_max + 1e-12 => Some(v + crit.grid_step),
        Some(_) => None,
    };
    CurveScan { sign_constant, settles_at, max_abs_after }
}

/// Pick the workload threshold from the fitted fixing and tossing curves.
/// The smallest qualifying inflection point wins; every candidate's
/// condition audit is returned either way.
pub fn select_threshold(
    fix_model: &FitModel,
    toss_model: &FitModel,
    crit: &ThresholdCriteria,
) -> Result<ThresholdReport, ThresholdError> {
    assert!(crit.eps > 0.0, "eps must be positive");

    let mut candidates: Vec<(f64, &'static str)> = Vec::new();
    for r in find_inflections(fix_model, 1.0, crit.grid_max) {
        candidates.push((r, "fix"));
    }
    for r in find_inflections(toss_model, 1.0, crit.grid_max) {
        candidates.push((r, "toss"));
    }
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    if candidates.is_empty() {
        return Err(ThresholdError::NoInflection { grid_max: crit.grid_max });
    }

    let mut checks = Vec::with_capacity(candidates.len());
    for (candidate, source) in candidates {
        let fix = scan_curve(fix_model, candidate, crit.c1, crit);
        let toss = scan_curve(toss_model, candidate, crit.c2, crit);
        let qualifies = fix.sign_constant
            && toss.sign_constant
            && fix.settles_at.is_some()
            && toss.settles_at.is_some();
        checks.push(CandidateCheck {
            candidate,
            source,
            sign_constant_fix: fix.sign_constant,
            sign_constant_toss: toss.sign_constant,
            settles_fix_at: fix.settles_at,
            settles_toss_at: toss.settles_at,
            max_abs_fix_after: fix.max_abs_after,
            max_abs_toss_after: toss.max_abs_after,
            qualifies,
        });
    }

    match checks.iter().find(|c| c.qualifies) {
        Some(chosen) => Ok(ThresholdReport {
            threshold: chosen.candidate,
            criteria: crit.clone(),
            candidates: checks.clone(),
        }),
        None => Err(ThresholdError::NoSteadyCandidate { candidates: checks }),
    }
}
