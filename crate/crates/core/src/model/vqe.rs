use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hamiltonian::{dense_hamiltonian, jw_hamiltonian, SiamParams, N_WORK};
use crate::isl::{canonical_angle, sinusoid_minimum, PROBES};
use crate::par::derive_seed;
use crate::qcore::Circuit;
use crate::sim::{run_statevector, StateVector};
use crate::{Error, Result, C64};

const RESTARTS: u64 = 4;
const MAX_SWEEPS: usize = 2000;
const REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct VqeResult {
    pub circuit: Circuit,
    pub energy: f64,
    pub angles: Vec<f64>,
    pub sweeps: usize,
}

/// Per layer: RY on every work qubit, then CNOT(1→2), CNOT(0→1), CNOT(2→3).
/// A closing RY layer follows the last entangler. `4·(layers + 1)` angles.
pub fn vqe_ansatz(layers: usize, angles: &[f64]) -> Circuit {
    assert_eq!(angles.len(), N_WORK * (layers + 1), "angle count");
    let mut c = Circuit::new(N_WORK);
    for l in 0..=layers {
        for q in 0..N_WORK {
            c.ry(q, angles[l * N_WORK + q]);
        }
        if l < layers {
            c.cx(1, 2).cx(0, 1).cx(2, 3);
        }
    }
    c
}

fn energy(h: &DMatrix<C64>, layers: usize, angles: &[f64]) -> f64 {
    let psi = run_statevector(&vqe_ansatz(layers, angles), &StateVector::zero(N_WORK)).expect("ansatz width");
    let v = DVector::from_column_slice(psi.amplitudes());
    (v.adjoint() * h * &v)[(0, 0)].re
}

fn rotosolve_run(h: &DMatrix<C64>, layers: usize, mut angles: Vec<f64>) -> (Vec<f64>, f64, usize) {
    let mut e = energy(h, layers, &angles);
    for sweep in 1..=MAX_SWEEPS {
        let start = e;
        for i in 0..angles.len() {
            let probe = |shift: f64| {
                let mut a = angles.clone();
                a[i] += shift;
                energy(h, layers, &a)
            };
            let (delta, _) = sinusoid_minimum(e, probe(PROBES[0]), probe(PROBES[1]));
            angles[i] = canonical_angle(angles[i] + delta);
            e = energy(h, layers, &angles);
        }
        if start - e <= REL_TOL * start.abs().max(1e-12) {
            return (angles, e, sweep);
        }
    }
    (angles, e, MAX_SWEEPS)
}

/// Rotosolve minimization of ⟨H⟩ over the RY ansatz; best of a few seeded starts.
pub fn vqe_ground_state(p: &SiamParams, layers: usize, seed: u64) -> Result<VqeResult> {
    if layers == 0 {
        return Err(Error::InvalidParameter("VQE needs at least one layer".into()));
    }
    let h = dense_hamiltonian(&jw_hamiltonian(p)?);
    let n = N_WORK * (layers + 1);
    let best = (0..RESTARTS)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[r]));
            let init: Vec<f64> = (0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
            rotosolve_run(&h, layers, init)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one restart");
    let (angles, energy, sweeps) = best;
    Ok(VqeResult { circuit: vqe_ansatz(layers, &angles), energy, angles, sweeps })
}
