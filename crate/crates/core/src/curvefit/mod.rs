//! Two-term power-curve fitting over rate points, analytic derivative
//! machinery, inflection location, and overload-threshold selection.
//!
//! Every fitted curve is stored in the sum form `y(N) = a·N^b + c·N^d`;
//! the [`FitForm`] only constrains coefficient signs during fitting (a
//! difference of powers carries `c < 0`, a power plus a power-law decay
//! carries `d < 0`).

mod lm;
mod threshold;

pub use lm::{fit_two_term_power, FitError};
pub use threshold::{select_threshold, CandidateCheck, ThresholdError, ThresholdReport};

use serde::{Deserialize, Serialize};

/// Shape family requested from the fitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitForm {
    /// Unconstrained `a·N^b + c·N^d`.
    Sum,
    /// Rising-minus-rising difference: `a > 0`, `c < 0`.
    Diff,
    /// Growth plus power-law decay: `a > 0`, `c > 0`, `d < 0`.
    PowDecay,
}

/// A fitted two-term power curve `y(N) = a·N^b + c·N^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitModel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub form: FitForm,
    /// Sum of squared residuals at the solution.
    pub residual_sse: f64,
    /// Confidence-interval level the fit was requested at. Recorded for
    /// provenance; point fits carry no band.
    pub confidence: f64,
}

impl FitModel {
    pub fn new(a: f64, b: f64, c: f64, d: f64, form: FitForm) -> Self {
        FitModel { a, b, c, d, form, residual_sse: 0.0, confidence: 0.99 }
    }

    /// Curve value at workload `n`.
    pub fn value(&self, n: f64) -> f64 {
        self.a * n.powf(self.b) + self.c * n.powf(self.d)
    }

    /// Analytic first derivative: `a·b·N^(b−1) + c·d·N^(d−1)`.
    pub fn first_derivative(&self, n: f64) -> f64 {
        self.a * self.b * n.powf(self.b - 1.0) + self.c * self.d * n.powf(self.d - 1.0)
    }

    /// Analytic second derivative:
    /// `a·b(b−1)·N^(b−2) + c·d(d−1)·N^(d−2)`.
    pub fn second_derivative(&self, n: f64) -> f64 {
        self.a * self.b * (self.b - 1.0) * n.powf(self.b - 2.0)
            + self.c * self.d * (self.d - 1.0) * n.powf(self.d - 2.0)
    }
}

/// Steady-state conditions for the overload threshold: past the chosen
/// inflection point both second derivatives must keep a constant sign and
/// settle into the `eps` band around the steadiness constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCriteria {
    /// Steadiness constant for the fixing curve's second derivative.
    pub c1: f64,
    /// Steadiness constant for the tossing curve's second derivative.
    pub c2: f64,
    /// Band half-width.
    pub eps: f64,
    /// Largest workload checked.
    pub grid_max: f64,
    /// Grid step used for the steady-state scan.
    pub grid_step: f64,
}

impl Default for ThresholdCriteria {
    fn default() -> Self {
        ThresholdCriteria { c1: 0.0, c2: 0.0, eps: 0.5e-5, grid_max: 500.0, grid_step: 0.01 }
    }
}

/// All sign-change roots of the model's second derivative inside
/// `[lo, hi]`, located by grid bracketing plus bisection to absolute
/// tolerance 1e-4, in ascending order. No sign change, no roots.
pub fn find_inflections(model: &FitModel, lo: f64, hi: f64) -> Vec<f64> {
    const SCAN_STEPS: usize = 4096;
    const TOL: f64 = 1e-4;
    assert!(lo >= 1.0 && hi > lo, "inflection range must satisfy 1 <= lo < hi");

    let g = |n: f64| model.second_derivative(n);
    let step = (hi - lo) / SCAN_STEPS as f64;

    let mut roots = Vec::new();
    let mut prev_n = lo;
    let mut prev_v = g(prev_n);
    for i in 1..=SCAN_STEPS {
        let n = lo + step * i as f64;
        let v = g(n);
        if prev_v == 0.0 {
            // Grid point landed exactly on a root.
            if roots.last().map_or(true, |r| (r - prev_n as f64).abs() > TOL) {
                roots.push(prev_n);
            }
        } else if prev_v * v < 0.0 {
            let (mut left, mut right) = (prev_n, n);
            while right - left > TOL {
                let mid = 0.5 * (left + right);
                let vm = g(mid);
                if vm == 0.0 {
                    left = mid;
                    right = mid;
                } else if vm * prev_v < 0.0 {
                    right = mid;
                } else {
                    left = mid;
                }
            }
            roots.push(0.5 * (left + right));
        }
        prev_n = n;
        prev_v = v;
    }
    roots
}
