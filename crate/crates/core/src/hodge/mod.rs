//! Discrete Hodge decomposition with mixed tangential/normal boundary parts.

mod solver;
mod split;

pub use solver::{DegreeData, HodgeSolver, KERNEL_THRESHOLD};
pub use split::{CoexactPart, ExactPart, HarmonicSpace, HodgeSplit, SplitDiagnostics};
