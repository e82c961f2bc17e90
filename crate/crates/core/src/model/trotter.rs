use std::f64::consts::FRAC_PI_2;

use super::hamiltonian::{SiamParams, N_WORK};
use crate::qcore::Circuit;
use crate::{Error, Result};

/// exp(−i(θ/2)Z_aZ_b).
fn zz_rotation(c: &mut Circuit, a: usize, b: usize, theta: f64) {
    c.cx(a, b).rz(b, theta).cx(a, b);
}

/// exp(−i(θ/2)(X_aX_b + Y_aY_b)).
///
/// RX(π/2) on both qubits maps YY to ZZ; the CNOT then maps XX → X_a and
/// ZZ → Z_b, which commute.
fn hop_rotation(c: &mut Circuit, a: usize, b: usize, theta: f64) {
    c.rx(a, FRAC_PI_2).rx(b, FRAC_PI_2).cx(a, b);
    c.rx(a, theta).rz(b, theta);
    c.cx(a, b).rx(a, -FRAC_PI_2).rx(b, -FRAC_PI_2);
}

/// One first-order Trotter step: ZZ term, then the ↑ hop (0,1), then the ↓ hop (2,3).
/// 6 CNOTs and 13 single-qubit rotations.
pub fn trotter_step_circuit(p: &SiamParams, dt: f64) -> Result<Circuit> {
    p.validate()?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let mut c = Circuit::new(N_WORK);
    zz_rotation(&mut c, 0, 2, p.u * dt / 2.0);
    hop_rotation(&mut c, 0, 1, p.v * dt);
    hop_rotation(&mut c, 2, 3, p.v * dt);
    Ok(c)
}

pub fn trotter_evolution(p: &SiamParams, dt: f64, n_steps: usize) -> Result<Circuit> {
    let step = trotter_step_circuit(p, dt)?;
    let mut c = Circuit::new(N_WORK);
    for _ in 0..n_steps {
        c.extend(&step)?;
    }
    Ok(c)
}
