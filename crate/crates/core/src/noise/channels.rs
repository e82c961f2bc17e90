use nalgebra::DMatrix;

use super::params::NoiseParams;
use crate::qcore::{Basis, Gate};
use crate::sim::{KrausChannel, Pauli};
use crate::{Error, Result, C64};

fn m2(a: f64, b: f64, c: f64, d: f64) -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0), C64::new(d, 0.0)])
}

/// Thermal relaxation with the default dephasing time (equal to `t_relax`).
pub fn thermal_channel(duration: f64, t_relax: f64) -> Result<KrausChannel> {
    thermal_channel_with(duration, t_relax, 1.0)
}

/// Amplitude damping with γ = 1 − exp(−t/T) followed by pure dephasing with
/// time constant `dephasing_ratio·T`.
pub fn thermal_channel_with(duration: f64, t_relax: f64, dephasing_ratio: f64) -> Result<KrausChannel> {
    if !(t_relax > 0.0) || !(dephasing_ratio > 0.0) {
        return Err(Error::InvalidParameter(format!("t_relax must be positive, got {t_relax}")));
    }
    if !(duration >= 0.0) {
        return Err(Error::InvalidParameter(format!("duration must be nonnegative, got {duration}")));
    }
    let gamma = -(-duration / t_relax).exp_m1();
    let p_z = -(-duration / (dephasing_ratio * t_relax)).exp_m1() / 2.0;
    let damp = KrausChannel::new(vec![m2(1.0, 0.0, 0.0, (1.0 - gamma).sqrt()), m2(0.0, gamma.sqrt(), 0.0, 0.0)])?;
    let deph = KrausChannel::new(vec![m2((1.0 - p_z).sqrt(), 0.0, 0.0, (1.0 - p_z).sqrt()), m2(p_z.sqrt(), 0.0, 0.0, -p_z.sqrt())])?;
    damp.then(&deph)
}

/// (1−λ)ρ + λ/(4^m − 1) Σ PρP over the non-identity Paulis on `arity` qubits.
pub fn depolarizing_channel(lambda: f64, arity: usize) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidProbability(lambda));
    }
    if !(1..=2).contains(&arity) {
        return Err(Error::InvalidParameter(format!("depolarizing arity {arity}")));
    }
    let d = 1usize << arity;
    let n_pauli = d * d - 1;
    let w = C64::new((lambda / n_pauli as f64).sqrt(), 0.0);
    let mut ops = vec![DMatrix::<C64>::identity(d, d) * C64::new((1.0 - lambda).sqrt(), 0.0)];
    let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    for idx in 1..(d * d) {
        let m = if arity == 1 {
            paulis[idx].matrix()
        } else {
            paulis[idx / 4].matrix().kronecker(&paulis[idx % 4].matrix())
        };
        ops.push(m * w);
    }
    KrausChannel::new(ops)
}

fn readout_flip(basis: Basis, p: f64) -> Result<KrausChannel> {
    let flip = match basis {
        Basis::Z => Pauli::X,
        Basis::Y => Pauli::Z,
    };
    KrausChannel::new(vec![
        DMatrix::<C64>::identity(2, 2) * C64::new((1.0 - p).sqrt(), 0.0),
        flip.matrix() * C64::new(p.sqrt(), 0.0),
    ])
}

/// Noise attached after an ideal basis operation.
///
/// Gates: thermal relaxation on each participating qubit (tensored for CNOT),
/// then depolarizing. Measurement: thermal relaxation over the readout time,
/// then a classical flip of the outcome with probability `readout_flip`.
pub fn op_channel(gate: &Gate, params: &NoiseParams) -> Result<KrausChannel> {
    params.validate()?;
    let th = |t: f64| thermal_channel_with(t, params.t_relax, params.dephasing_ratio);
    let t = params.durations.of(gate);
    match gate {
        Gate::U1(_) | Gate::U2(..) | Gate::U3(..) => th(t)?.then(&depolarizing_channel(params.lambda1, 1)?),
        Gate::Cnot => {
            let one = th(t)?;
            KrausChannel::tensor(&one, &one).then(&depolarizing_channel(params.lambda2, 2)?)
        }
        Gate::Measure(b) => th(t)?.then(&readout_flip(*b, params.readout_flip)?),
        g => Err(Error::NonBasisGate(g.name().to_string())),
    }
}
