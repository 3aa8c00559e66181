//! Curve pullbacks by words: strict transforms, multiplicities at base
//! points, and the class-level equidistribution diagnostic.

pub mod curve;
pub mod diagnostic;
pub mod pullback;

pub use curve::PlaneCurve;
pub use diagnostic::{equidist_diagnostic, EquidistOptions, EquidistRow, EquidistSeries};
pub use pullback::{
    guedj_bound_check, lelong_crosscheck, pullback_curve, BasePointMultiplicity, CurveWorkspace, LelongRow,
    LelongTable, PullbackCurveReport, RemovedFactor,
};
