//! Damped Gauss–Newton (Levenberg–Marquardt style) least squares for the
//! two-term power family, with multi-start over a fixed exponent grid.

use rayon::prelude::*;
use thiserror::Error;

use super::{FitForm, FitModel};

/// Initial exponent grid. Exponent pairs are seeded from every ordered
/// combination with `b0 != d0`; amplitudes come from a linear solve at the
/// fixed exponents.
const EXPONENT_GRID: [f64; 6] = [-1.0, -0.5, -0.1, 0.1, 0.5, 1.0];

const MAX_ITERS: usize = 400;
const EXPONENT_LIMIT: f64 = 8.0;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least 8 points, got {0}")]
    TooFewPoints(usize),
    #[error("workloads must satisfy N >= 1 (found {0})")]
    DomainViolation(f64),
    #[error("no start converged; best partial fit kept sse {sse:.3e}")]
    NonConvergence { best: Box<FitModel>, sse: f64 },
}

struct StartResult {
    model: FitModel,
    converged: bool,
    start_index: usize,
}

/// Fit `y = a·N^b + c·N^d` to the points under the sign conventions of
/// `form`. Returns the lowest-SSE converged start whose signs satisfy the
/// form; if no converged start satisfies them, the lowest-SSE converged
/// start wins outright (the curve, not the coefficients, is the contract).
pub fn fit_two_term_power(points: &[(f64, f64)], form: FitForm) -> Result<FitModel, FitError> {
    if points.len() < 8 {
        return Err(FitError::TooFewPoints(points.len()));
    }
    if let Some(&(n, _)) = points.iter().find(|(n, _)| *n < 1.0 || !n.is_finite()) {
        return Err(FitError::DomainViolation(n));
    }

    // Constant data degenerates to a single flat term.
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / points.len() as f64;
    let spread = points.iter().map(|(_, y)| (y - mean_y).abs()).fold(0.0, f64::max);
    if spread <= 1e-12 * mean_y.abs().max(1.0) {
        let mut model = FitModel::new(mean_y, 0.0, 0.0, 0.0, form);
        model.residual_sse = points.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
        return Ok(model);
    }

    let mut starts: Vec<(f64, f64)> = Vec::new();
    for &b0 in &EXPONENT_GRID {
        for &d0 in &EXPONENT_GRID {
            if b0 != d0 {
                starts.push((b0, d0));
            }
        }
    }

    let results: Vec<StartResult> = starts
        .par_iter()
        .enumerate()
        .filter_map(|(idx, &(b0, d0))| {
            let (a0, c0) = seed_amplitudes(points, b0, d0)?;
            let (params, sse, converged) = levenberg_marquardt(points, [a0, b0, c0, d0]);
            let mut model = FitModel::new(params[0], params[1], params[2], params[3], form);
            model.residual_sse = sse;
            if sse.is_finite() {
                Some(StartResult { model, converged, start_index: idx })
            } else {
                None
            }
        })
        .collect();

    let pick = |candidates: &[&StartResult]| -> Option<FitModel> {
        candidates
            .iter()
            .min_by(|x, y| {
                (x.model.residual_sse, x.start_index)
                    .partial_cmp(&(y.model.residual_sse, y.start_index))
                    .unwrap()
            })
            .map(|r| r.model.clone())
    };

    let converged: Vec<&StartResult> = results.iter().filter(|r| r.converged).collect();
    let shaped: Vec<&StartResult> =
        converged.iter().copied().filter(|r| satisfies_form(&r.model, form)).collect();

    if let Some(model) = pick(&shaped).or_else(|| pick(&converged)) {
        return Ok(model);
    }

    let best = results
        .iter()
        .min_by(|x, y| x.model.residual_sse.partial_cmp(&y.model.residual_sse).unwrap())
        .map(|r| r.model.clone())
        .unwrap_or_else(|| FitModel::new(mean_y, 0.0, 0.0, 0.0, form));
    let sse = best.residual_sse;
    Err(FitError::NonConvergence { best: Box::new(best), sse })
}

fn satisfies_form(model: &FitModel, form: FitForm) -> bool {
    match form {
        FitForm::Sum => true,
        FitForm::Diff => model.a > 0.0 && model.c < 0.0,
        FitForm::PowDecay => model.a > 0.0 && model.c > 0.0 && model.d < 0.0,
    }
}

/// Linear least squares for the amplitudes at fixed exponents.
fn seed_amplitudes(points: &[(f64, f64)], b0: f64, d0: f64) -> Option<(f64, f64)> {
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(n, y) in points {
        let u = n.powf(b0);
        let v = n.powf(d0);
        s11 += u * u;
        s12 += u * v;
        s22 += v * v;
        r1 += u * y;
        r2 += v * y;
    }
    let det = s11 * s22 - s12 * s12;
    if !det.is_finite() || det.abs() < 1e-12 * (s11 * s22).abs().max(1e-300) {
        return None;
    }
    let a = (r1 * s22 - r2 * s12) / det;
    let c = (r2 * s11 - r1 * s12) / det;
    if a.is_finite() && c.is_finite() {
        Some((a, c))
    } else {
        None
    }
}

fn sse_of(points: &[(f64, f64)], p: &[f64; 4]) -> f64 {
    let mut sse = 0.0;
    for &(n, y) in points {
        let r = p[0] * n.powf(p[1]) + p[2] * n.powf(p[3]) - y;
        sse += r * r;
        if !sse.is_finite() {
            return f64::INFINITY;
        }
    }
    sse
}

fn levenberg_marquardt(points: &[(f64, f64)], start: [f64; 4]) -> ([f64; 4], f64, bool) {
    let mut p = start;
    let mut sse = sse_of(points, &p);
    let mut lambda = 1e-3;
    let mut converged = false;

    for _ in 0..MAX_ITERS {
        // Normal equations JᵀJ δ = −Jᵀr with Marquardt damping on the diagonal.
        let mut jtj = [[0.0f64; 4]; 4];
        let mut jtr = [0.0f64; 4];
        for &(n, y) in points {
            let ln_n = n.ln();
            let nb = n.powf(p[1]);
            let nd = n.powf(p[3]);
            let r = p[0] * nb + p[2] * nd - y;
            let j = [nb, p[0] * ln_n * nb, nd, p[2] * ln_n * nd];
            for i in 0..4 {
                jtr[i] += j[i] * r;
                for k in 0..4 {
                    jtj[i][k] += j[i] * j[k];
                }
            }
        }
        if jtr.iter().any(|v| !v.is_finite()) {
            break;
        }

        let mut improved = false;
        for _ in 0..14 {
            let mut damped = jtj;
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(1e-12);
            }
            let rhs = [-jtr[0], -jtr[1], -jtr[2], -jtr[3]];
            let Some(step) = solve4(damped, rhs) else {
                lambda *= 4.0;
                continue;
            };
            let mut trial = [
                p[0] + step[0],
                (p[1] + step[1]).clamp(-EXPONENT_LIMIT, EXPONENT_LIMIT),
                p[2] + step[2],
                (p[3] + step[3]).clamp(-EXPONENT_LIMIT, EXPONENT_LIMIT),
            ];
            if trial.iter().any(|v| !v.is_finite()) {
                lambda *= 4.0;
                continue;
            }
            let trial_sse = sse_of(points, &trial);
            if trial_sse < sse {
                let delta = sse - trial_sse;
                p = std::mem::take(&mut trial);
                sse = trial_sse;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if delta <= 1e-15 * (1.0 + sse) {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }

        if !improved {
            // Damping exhausted: a stationary point within float resolution.
            converged = true;
            break;
        }
        if converged {
            break;
        }
    }
    (p, sse, converged)
}

/// Gaussian elimination with partial pivoting for the 4×4 damped system.
fn solve4(mut m: [[f64; 4]; 4], mut rhs: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let pivot = (col..4).max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0f64; 4];
    for col in (0..4).rev() {
        let mut acc = rhs[col];
        for k in col + 1..4 {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
        if !x[col].is_finite() {
            return None;
        }
    }
    Some(x)
}
