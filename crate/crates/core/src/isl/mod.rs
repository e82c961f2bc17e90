//! Incremental structural learning: approximate recompilation of a state
//! preparation circuit by a short ladder of dressed CNOT layers.

mod entanglement;
mod optimize;
mod recompile;
mod sinusoid;

pub use entanglement::{concurrence, entanglement_of_formation};
pub use optimize::{isl_cost, rotoselect, rotosolve, CostEvaluator, DressedLayer, Optimized};
pub use recompile::{incremental_chain, isl_recompile, select_pair, IslConfig, IslResult, ENTANGLEMENT_EPS};
pub use sinusoid::sinusoid_minimum;
pub(crate) use sinusoid::{canonical_angle, PROBES};
