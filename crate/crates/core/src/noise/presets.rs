use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::channels::op_channel;
use super::fidelity::{gate_fidelity, noise_fidelity};
use super::params::NoiseParams;
use crate::qcore::{Basis, Gate};
use crate::{Error, Result};

/// Named device parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    A,
    B,
    C,
    D,
    E,
}

/// Published device row: lifetime, λ and the listed fidelities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub tau_s: f64,
    pub lambda: f64,
    pub f_u1: f64,
    pub f_u2: f64,
    pub f_u3: f64,
    pub f_cnot: f64,
    pub f_measure: f64,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::A, Preset::B, Preset::C, Preset::D, Preset::E];

    /// Row as printed. Row D repeats row B's (τ, λ) but not its fidelities.
    pub fn table(self) -> TableRow {
        let row = |tau_ms: f64, lambda, f_u1, f_u2, f_u3, f_cnot, f_measure| TableRow {
            tau_s: tau_ms * 1e-3,
            lambda,
            f_u1,
            f_u2,
            f_u3,
            f_cnot,
            f_measure,
        };
        match self {
            Preset::A => row(10.0, 4e-5, 0.99997, 0.99997, 0.99996, 0.9999, 0.9999),
            Preset::B => row(100.0, 4e-6, 0.999997, 0.999997, 0.999996, 0.99999, 0.99999),
            Preset::C => row(0.04, 5e-3, 0.996, 0.995, 0.994, 0.980, 0.975),
            Preset::D => row(100.0, 4e-6, 0.997, 0.997, 0.996, 0.990, 0.991),
            Preset::E => row(1.1, 4e-4, 0.9997, 0.99974, 0.9996, 0.999, 0.999),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Preset::A),
            "B" => Ok(Preset::B),
            "C" => Ok(Preset::C),
            "D" => Ok(Preset::D),
            "E" => Ok(Preset::E),
            _ => Err(Error::InvalidParameter(format!("unknown noise preset '{s}'"))),
        }
    }
}

fn bisect(mut lo: f64, mut hi: f64, increasing: bool, target: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Row D rebuilt from its fidelity columns: the lifetime reproduces F(Measurement)
/// with no readout flip, then λ reproduces F(CNOT).
fn reconstruct_d(row: &TableRow) -> Result<NoiseParams> {
    let f = |g: Gate, p: &NoiseParams| noise_fidelity(&g, p).map(|f| f.process).unwrap_or(0.0);
    let base = NoiseParams::ideal();
    let ln_tau = bisect(1e-9f64.ln(), 1e3f64.ln(), true, row.f_measure, |lt| {
        f(Gate::Measure(Basis::Z), &NoiseParams { t_relax: lt.exp(), ..base })
    });
    let tau = ln_tau.exp();
    let thermal_only = f(Gate::Cnot, &NoiseParams { t_relax: tau, ..base });
    if thermal_only < row.f_cnot {
        return Err(Error::InvalidParameter("row D fidelities are not jointly reachable".into()));
    }
    let lambda = bisect(0.0, 1.0, false, row.f_cnot, |l| f(Gate::Cnot, &NoiseParams::new(tau, l).expect("valid")));
    NoiseParams::new(tau, lambda)
}

/// Flip probability making the measurement process fidelity equal `target`.
fn solve_readout(p: &NoiseParams, target: f64) -> Result<f64> {
    let f_at = |flip: f64| -> Result<f64> {
        let ch = op_channel(&Gate::Measure(Basis::Z), &NoiseParams { readout_flip: flip, ..*p })?;
        Ok(gate_fidelity(&ch, &nalgebra::DMatrix::identity(2, 2))?.process)
    };
    // Fidelity is affine in the flip probability.
    let (f0, f1) = (f_at(0.0)?, f_at(1.0)?);
    Ok(((f0 - target) / (f0 - f1)).clamp(0.0, 1.0))
}

/// Parameters for a named device; λ₁ = λ₂ and the readout flip reproduces the
/// listed measurement fidelity.
pub fn preset(name: Preset) -> Result<NoiseParams> {
    let row = name.table();
    let mut p = match name {
        Preset::D => reconstruct_d(&row)?,
        _ => NoiseParams::new(row.tau_s, row.lambda)?,
    };
    p.readout_flip = solve_readout(&p, row.f_measure)?;
    Ok(p)
}
