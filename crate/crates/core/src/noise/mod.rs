//! Thermal-relaxation and depolarizing noise, gate fidelities and device presets.

mod channels;
mod fidelity;
mod model;
mod params;
mod presets;

pub use channels::{depolarizing_channel, op_channel, thermal_channel, thermal_channel_with};
pub use fidelity::{fidelity_report, gate_fidelity, infidelity_map, write_map_csv, FidelityReport, GateFidelity, MapPoint};
pub(crate) use model::NoiseModel;
pub use params::{Durations, NoiseParams};
pub use presets::{preset, Preset, TableRow};
