//! Half-filled two-site Anderson impurity model.
//!
//! Work qubits 0..3 hold (impurity↑, bath↑, impurity↓, bath↓).

mod exact;
mod hamiltonian;
mod prep;
mod trotter;
mod vqe;

pub use exact::{exact_correlator, exact_evolution, exact_ground_state, exact_greens_series, exact_retarded_greens, GroundState};
pub use hamiltonian::{dense_hamiltonian, jw_hamiltonian, PauliHamiltonian, SiamParams, N_WORK};
pub use prep::{state_prep_circuit, uniformly_controlled};
pub use trotter::{trotter_evolution, trotter_step_circuit};
pub use vqe::{vqe_ansatz, vqe_ground_state, VqeResult};
