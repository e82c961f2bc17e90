use nalgebra::DMatrix;

use super::channels::op_channel;
use super::params::NoiseParams;
use crate::qcore::{Basis, Gate};
use crate::sim::{KrausChannel, Pauli, Superop};
use crate::{Result, C64};

/// Noise superoperators for every basis operation, built once per parameter set.
#[derive(Debug, Clone)]
pub(crate) struct NoiseModel {
    u1: Option<Superop>,
    u2: Option<Superop>,
    u3: Option<Superop>,
    cx: Option<Superop>,
    meas_z: Superop,
    meas_y: Superop,
}

fn noise_only(g: Gate, p: &NoiseParams) -> Result<Option<Superop>> {
    let s = op_channel(&g, p)?.superop();
    Ok(if s.is_identity(0.0) { None } else { Some(s) })
}

fn full_dephasing(axis: Pauli) -> KrausChannel {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    KrausChannel::new(vec![DMatrix::identity(2, 2) * h, axis.matrix() * h]).expect("2x2 Kraus set")
}

impl NoiseModel {
    pub(crate) fn new(p: &NoiseParams) -> Result<Self> {
        p.validate()?;
        let meas = |b: Basis, axis: Pauli| -> Result<Superop> {
            Ok(op_channel(&Gate::Measure(b), p)?.then(&full_dephasing(axis))?.superop())
        };
        Ok(NoiseModel {
            u1: noise_only(Gate::U1(0.0), p)?,
            u2: noise_only(Gate::U2(0.0, 0.0), p)?,
            u3: noise_only(Gate::U3(0.0, 0.0, 0.0), p)?,
            cx: noise_only(Gate::Cnot, p)?,
            meas_z: meas(Basis::Z, Pauli::Z)?,
            meas_y: meas(Basis::Y, Pauli::Y)?,
        })
    }

    /// Ideal conjugation by `g` followed by its noise.
    pub(crate) fn gate_superop(&self, g: &Gate) -> Superop {
        let ideal = Superop::unitary(&g.matrix());
        let noise = match g {
            Gate::U1(_) => &self.u1,
            Gate::U2(..) => &self.u2,
            Gate::U3(..) => &self.u3,
            Gate::Cnot => &self.cx,
            _ => &None,
        };
        match noise {
            Some(n) => ideal.then(n),
            None => ideal,
        }
    }

    pub(crate) fn measure_superop(&self, b: Basis) -> &Superop {
        match b {
            Basis::Z => &self.meas_z,
            Basis::Y => &self.meas_y,
        }
    }
}
