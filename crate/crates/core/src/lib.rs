//! Workload/performance dynamics of bug-triage work, reconstructed from
//! bug-tracker change histories.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! 1. [`ingest`] — parse change-history exports (CSV or JSON lines) into
//!    normalized receive/fix/toss event streams, with the standard corpus
//!    filters (top-fixer cohort, full-lifecycle bugs, GMT normalization).
//! 2. [`metrics`] — window events per developer and compute fixing/tossing
//!    rate curves over workload.
//! 3. [`curvefit`] — fit two-term power curves to the rate points, take
//!    analytic derivatives, locate inflection points, and select the
//!    normal→overload workload threshold.
//! 4. [`queues`] — rebuild per-developer receiving queues and measure first
//!    fixing/tossing positions, grouped by working state.
//! 5. [`disttest`] — empirical CCDFs, Kruskal–Wallis tests, and five-family
//!    service-time distribution fitting with Vuong closeness selection.
//! 6. [`simkit`] — a seeded discrete-event generator of developer queueing
//!    behavior that emits logs in the ingest schema, for round-trip
//!    validation of everything above.

pub mod curvefit;
pub mod disttest;
pub mod ingest;
pub mod metrics;
pub mod queues;
pub mod simkit;

pub use curvefit::{FitForm, FitModel, ThresholdCriteria};
pub use ingest::{BugEvent, ChangeRecord, EventKind, ProcessingTime, SourceZone};
pub use metrics::{DeveloperWindow, RatePoint};
pub use queues::{QueueMetrics, ReceivingQueue};
