//! Execution engines.
//!
//! [`StateVector`] runs ideal circuits gate by gate; [`DensityMatrix`] runs
//! lowered circuits with a Kraus channel attached after every op
//! (gate-then-channel). The density engine is capped at 10 qubits.

mod density;
mod kraus;
mod pauli;
mod shots;
mod statevector;

pub(crate) use density::evolve_density;
pub use density::{run_density, DensityMatrix, MAX_DENSITY_QUBITS};
pub use kraus::{KrausChannel, Superop};
pub use pauli::{Pauli, PauliString};
pub use shots::{sample_expectation, sample_from_expectation, QubitExpectation};
pub use statevector::{run_statevector, StateVector};
