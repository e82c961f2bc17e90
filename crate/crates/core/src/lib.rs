//! Emulation of hybrid quantum-classical two-site DMFT on noisy devices.
//!
//! The crate is split along the pipeline:
//!
//! - [`qcore`]: circuit IR, gate matrices and exact transpilation passes.
//! - [`sim`]: statevector and density-matrix engines, Kraus channels, shot sampling.
//! - [`noise`]: thermal relaxation / depolarizing channels, gate fidelities, device presets.
//! - [`model`]: the half-filled single-impurity Anderson model, Trotter circuits,
//!   state preparation and the exact-diagonalization oracle.
//! - [`greens`]: ancilla interferometry circuits, iG(τ) series and the two-cosine fit.
//! - [`dmft`]: the self-consistency loop.
//! - [`isl`]: incremental structural learning (approximate recompilation).
//!
//! Qubit 0 is the least-significant bit of every computational-basis index.
//! Global phases are never tracked.

pub mod dmft;
pub mod error;
pub mod greens;
pub mod isl;
pub mod model;
pub mod noise;
pub mod par;
pub mod qcore;
pub mod sim;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
