//! Canonical-basis calculus: registered points, Weil classes, the
//! intersection form and generator pullbacks.

pub mod class;
pub mod operator;
pub mod registry;

pub use class::{ClassDump, ClassEntry, WeilClassVector};
pub use operator::{Direction, GeneratorOperator, OperatorSet, Transported};
pub use registry::{PointId, PointRegistry};
