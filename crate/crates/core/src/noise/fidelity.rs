use std::io::Write;

use nalgebra::DMatrix;
use serde::Serialize;

use super::channels::op_channel;
use super::params::NoiseParams;
use crate::par::{self, Exec};
use crate::qcore::{Basis, Gate};
use crate::sim::KrausChannel;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateFidelity {
    pub process: f64,
    pub average: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityReport {
    pub u1: GateFidelity,
    pub u2: GateFidelity,
    pub u3: GateFidelity,
    pub cnot: GateFidelity,
    pub measure: GateFidelity,
}

/// Process fidelity Σ|Tr(U†K)|²/d² and average fidelity (dF + 1)/(d + 1).
pub fn gate_fidelity(channel: &KrausChannel, ideal: &DMatrix<C64>) -> Result<GateFidelity> {
    let d = channel.dim();
    if ideal.nrows() != d || ideal.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: ideal.nrows() });
    }
    let ud = ideal.adjoint();
    let s: f64 = channel.ops().iter().map(|k| (&ud * k).trace().norm_sqr()).sum();
    let process = (s / (d * d) as f64).clamp(0.0, 1.0);
    let df = d as f64;
    Ok(GateFidelity { process, average: (df * process + 1.0) / (df + 1.0) })
}

/// Fidelity of the noise attached to `gate` (the ideal part cancels).
pub(crate) fn noise_fidelity(gate: &Gate, params: &NoiseParams) -> Result<GateFidelity> {
    let ch = op_channel(gate, params)?;
    gate_fidelity(&ch, &DMatrix::identity(ch.dim(), ch.dim()))
}

pub fn fidelity_report(params: &NoiseParams) -> Result<FidelityReport> {
    Ok(FidelityReport {
        u1: noise_fidelity(&Gate::U1(0.0), params)?,
        u2: noise_fidelity(&Gate::U2(0.0, 0.0), params)?,
        u3: noise_fidelity(&Gate::U3(0.0, 0.0, 0.0), params)?,
        cnot: noise_fidelity(&Gate::Cnot, params)?,
        measure: noise_fidelity(&Gate::Measure(Basis::Z), params)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapPoint {
    pub t_relax_s: f64,
    pub lambda: f64,
    pub infidelity: f64,
}

/// CNOT process infidelity over a (λ, T_relax) grid; λ-major, T_relax-minor order.
pub fn infidelity_map(taus: &[f64], lambdas: &[f64], template: &NoiseParams, exec: Exec) -> Result<Vec<MapPoint>> {
    if taus.is_empty() || lambdas.is_empty() {
        return Err(Error::InvalidParameter("empty fidelity-map grid".into()));
    }
    let grid: Vec<(f64, f64)> = lambdas.iter().flat_map(|&l| taus.iter().map(move |&t| (t, l))).collect();
    par::map(exec, &grid, |&(t, l)| {
        let p = NoiseParams { t_relax: t, lambda1: l, lambda2: l, ..*template };
        let f = noise_fidelity(&Gate::Cnot, &p)?;
        Ok(MapPoint { t_relax_s: t, lambda: l, infidelity: 1.0 - f.process })
    })
    .into_iter()
    .collect()
}

pub fn write_map_csv<W: Write>(points: &[MapPoint], mut w: W) -> std::io::Result<()> {
    writeln!(w, "t_relax_s,lambda,infidelity")?;
    for p in points {
        writeln!(w, "{:e},{:e},{:e}", p.t_relax_s, p.lambda, p.infidelity)?;
    }
    Ok(())
}
