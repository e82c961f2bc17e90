//! Circuit intermediate representation and exact transpilation passes.
//!
//! Qubit 0 is the least-significant bit of the computational-basis index.
//! Two-qubit gate matrices use the local index `b(q0) + 2·b(q1)`, where
//! `q0` is the first listed qubit (the control, for CNOT).

mod circuit;
mod dense;
mod gate;
mod text;
mod transpile;

pub use circuit::{Circuit, Op};
pub use dense::{dense_unitary, embed, equal_up_to_phase, kron};
pub use gate::{Axis, Basis, Gate};
pub(crate) use gate::wrap_angle;
pub use text::{parse_circuit, write_circuit};
pub use transpile::{cleanup_transpile, fuse_single_qubit, gate_counts, inverse, lower_to_basis, GateCounts, DEFAULT_ANGLE_EPS};
