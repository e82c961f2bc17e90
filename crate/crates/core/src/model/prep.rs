use std::f64::consts::PI;

use crate::qcore::{cleanup_transpile, Axis, Circuit};
use crate::{Error, Result, C64};

const ZERO_ANGLE: f64 = 1e-12;

/// Rotation about `axis` on `target` by `angles[c]`, where `c` is the value of
/// the control register (bit i of c ↔ `controls[i]`). Gray-code CNOT ladder,
/// which needs a rotation axis anticommuting with X on the target (Y or Z).
pub fn uniformly_controlled(c: &mut Circuit, axis: Axis, target: usize, controls: &[usize], angles: &[f64]) {
    assert!(axis != Axis::X, "CNOT ladder cannot multiplex X rotations");
    let m = controls.len();
    let k = 1usize << m;
    assert_eq!(angles.len(), k, "one angle per control pattern");
    let gray = |i: usize| i ^ (i >> 1);
    let theta: Vec<f64> = (0..k)
        .map(|i| (0..k).map(|j| if (j & gray(i)).count_ones() % 2 == 0 { angles[j] } else { -angles[j] }).sum::<f64>() / k as f64)
        .collect();
    if theta[1..].iter().all(|t| t.abs() < ZERO_ANGLE) {
        if theta[0].abs() >= ZERO_ANGLE {
            c.rot(axis, target, theta[0]);
        }
        return;
    }
    for (i, t) in theta.iter().enumerate() {
        c.rot(axis, target, *t);
        let flip = gray(i) ^ gray((i + 1) % k);
        c.cx(controls[flip.trailing_zeros() as usize], target);
    }
}

/// Circuit mapping |0…0⟩ to `amplitudes` up to global phase.
///
/// Magnitudes are loaded top qubit first with uniformly controlled RY; real
/// inputs keep their signs in the last RY level, complex inputs get a
/// uniformly controlled RZ phase stage.
pub fn state_prep_circuit(amplitudes: &[C64]) -> Result<Circuit> {
    let d = amplitudes.len();
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("{d} amplitudes do not form a qubit register")));
    }
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let n = d.trailing_zeros() as usize;
    let real = amplitudes.iter().all(|a| a.im.abs() < 1e-14);

    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut v: Vec<f64> = if real { amplitudes.iter().map(|a| a.re).collect() } else { amplitudes.iter().map(|a| a.norm()).collect() };
    for _ in 0..n {
        levels.push(v.chunks(2).map(|p| 2.0 * p[1].atan2(p[0])).collect());
        v = v.chunks(2).map(|p| p[0].hypot(p[1])).collect();
    }

    let mut c = Circuit::new(n);
    for k in (0..n).rev() {
        let angles = &levels[k];
        let controls: Vec<usize> = (k + 1..n).collect();
        if angles.iter().all(|a| a.abs() < ZERO_ANGLE) {
            continue;
        }
        // The target is still |0⟩ here, so a rotation by π controlled on one qubit is a CNOT.
        if controls.len() == 1 && angles[0].abs() < ZERO_ANGLE && (angles[1] - PI).abs() < ZERO_ANGLE {
            c.cx(controls[0], k);
            continue;
        }
        uniformly_controlled(&mut c, Axis::Y, k, &controls, angles);
    }

    if !real {
        let mut ph: Vec<f64> = amplitudes.iter().map(|a| a.arg()).collect();
        for k in 0..n {
            let angles: Vec<f64> = ph.chunks(2).map(|p| p[1] - p[0]).collect();
            let controls: Vec<usize> = (k + 1..n).collect();
            if angles.iter().any(|a| a.abs() >= ZERO_ANGLE) {
                uniformly_controlled(&mut c, Axis::Z, k, &controls, &angles);
            }
            ph = ph.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        }
    }
    Ok(cleanup_transpile(&c, ZERO_ANGLE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{exact_ground_state, SiamParams};
    use crate::qcore::{gate_counts, Gate};
    use crate::sim::{run_statevector, StateVector};
    use proptest::prelude::*;

    /// Whether the circuit uses only rotations and CNOTs.
    fn only_rotations_and_cnots(c: &Circuit) -> bool {
        c.ops().iter().all(|op| matches!(op.gate, Gate::Rx(_) | Gate::Ry(_) | Gate::Rz(_) | Gate::Cnot))
    }

    fn overlap(c: &Circuit, target: &[C64]) -> f64 {
        let out = run_statevector(c, &StateVector::zero(c.n_qubits())).unwrap();
        out.fidelity(&StateVector::from_amplitudes(target.to_vec()).unwrap())
    }

    #[test]
    fn zero_state_needs_no_gates() {
        let mut t = vec![C64::new(0.0, 0.0); 16];
        t[0] = C64::new(1.0, 0.0);
        assert!(state_prep_circuit(&t).unwrap().is_empty());
    }

    #[test]
    fn bell_like_target_uses_two_gates() {
        let mut t = vec![C64::new(0.0, 0.0); 16];
        t[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        t[12] = t[0];
        let c = state_prep_circuit(&t).unwrap();
        assert_eq!(c.len(), 2);
        assert!(overlap(&c, &t) >= 1.0 - 1e-10);
    }

    #[test]
    fn siam_ground_state() {
        let gs = exact_ground_state(&SiamParams::half_filled(4.0, 1.0)).unwrap();
        let c = state_prep_circuit(gs.state.amplitudes()).unwrap();
        assert!(only_rotations_and_cnots(&c));
        assert!(overlap(&c, gs.state.amplitudes()) >= 1.0 - 1e-8);
        assert!(gate_counts(&c).depth > 0);
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(matches!(state_prep_circuit(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]), Err(Error::NotNormalized(_))));
    }

    proptest! {
        #[test]
        fn random_complex_states(re in prop::collection::vec(-1.0f64..1.0, 8), im in prop::collection::vec(-1.0f64..1.0, 8)) {
            let raw: Vec<C64> = re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b)).collect();
            let n = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assume!(n > 1e-3);
            let t: Vec<C64> = raw.iter().map(|z| z / n).collect();
            let c = state_prep_circuit(&t).unwrap();
            prop_assert!(overlap(&c, &t) >= 1.0 - 1e-10);
        }

        #[test]
        fn uniformly_controlled_matches_definition(angles in prop::collection::vec(-3.0f64..3.0, 4), axis in 1usize..3) {
            let axis = Axis::ALL[axis];
            let mut c = Circuit::new(3);
            uniformly_controlled(&mut c, axis, 0, &[1, 2], &angles);
            let u = crate::qcore::dense_unitary(&c).unwrap();
            for ctrl in 0..4usize {
                let r = Gate::rotation(axis, angles[ctrl]).matrix();
                for a in 0..2 {
                    for b in 0..2 {
                        let got = u[((ctrl << 1) | a, (ctrl << 1) | b)];
                        prop_assert!((got - r[(a, b)]).norm() < 1e-10);
                    }
                }
            }
        }
    }
}
