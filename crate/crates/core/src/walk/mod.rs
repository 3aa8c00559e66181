//! Random walks on the free group spanned by the generators.

pub mod diagnostics;
pub mod itinerary;
pub mod report;
pub mod state;

pub use diagnostics::{
    boundary_compare, cauchy_diagnostic, degree_crosscheck, gram_check, lemma45_diagnostics, BoundaryComparison,
    CauchySeries, DegreeCheck, GramCheck, Lemma45Report,
};
pub use itinerary::Itinerary;
pub use state::{StepOutcome, WalkConfig, WalkCounters, WalkState, DEFAULT_WALK_TOLERANCE};
pub use report::{
    run_walk, run_walk_in, AbortKind, AbortRecord, ArithMode, Checkpoint, RunOptions, StepRecord, WalkReport,
    WalkSummary,
};
