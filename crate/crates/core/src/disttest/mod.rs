//! Temporal-pattern statistics: empirical CCDFs, Kruskal–Wallis tests, and
//! maximum-likelihood fitting of five candidate service-time families with
//! Vuong closeness selection.

mod ccdf;
mod families;
mod gamma;
mod kruskal;
mod vuong;
mod xmin;

pub use ccdf::{bug_ccdf, ccdf, developer_ccdf, Ccdf, Population};
pub use families::{fit_family, DistributionFit, Family, FamilyParams};
pub use kruskal::{kruskal_wallis, KwMethod, KwResult};
pub use vuong::{select_best, vuong_compare, winner_from_matrix, SelectionReport, VuongMatrix, VuongOutcome};
pub use xmin::{xmin_select, XminSelection};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DistError {
    #[error("empty sample")]
    EmptySample,
    #[error("need at least {need} samples above xmin={xmin}, got {got}")]
    TooFewTail { need: usize, got: usize, xmin: f64 },
    #[error("samples must be positive and finite (found {0})")]
    BadSample(f64),
    #[error("need at least two non-empty groups")]
    BadGroups,
    #[error("{family:?} fit needs xmin > 0")]
    NeedsPositiveXmin { family: Family },
    #[error("{family:?} fit failed: {reason}")]
    FitFailed { family: Family, reason: String },
    #[error("fits were made against different xmin values ({0} vs {1})")]
    MismatchedXmin(f64, f64),
}
