//! Ancilla interferometry for iG(τ) and the two-cosine fit.

mod circuit;
mod fit;
mod measure;
mod series;

pub use circuit::{greens_circuit, greens_circuit_basis, greens_prefix, greens_tail, ANCILLA, N_GREENS};
pub use fit::{fit_series, fit_series_with, FitOptions, GreensFit, MIN_POINTS};
pub use measure::{ground_state_circuit, measure_prefixes, measure_series, Backend, GroundStatePrep, MeasureConfig};
pub use series::GreensSeries;
