//! Dense-matrix construction by explicit Kronecker products.
//!
//! This is the test oracle for every engine: it shares no code with the
//! bit-indexed gate application in `sim`.

use nalgebra::DMatrix;

use super::circuit::Circuit;
use crate::{Error, Result, C64};

const MAX_DENSE_QUBITS: usize = 10;

/// Kronecker product `a ⊗ b` (`a` acts on the more significant qubits).
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Embed a 1- or 2-qubit matrix (local ordering `b(q0) + 2·b(q1)`) into an
/// `n`-qubit operator.
pub fn embed(m: &DMatrix<C64>, qubits: &[usize], n: usize) -> DMatrix<C64> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let unit = |r: usize, c: usize| {
        let mut e = DMatrix::from_element(2, 2, zero);
        e[(r, c)] = one;
        e
    };
    let eye = DMatrix::<C64>::identity(2, 2);
    let k = qubits.len();
    let local = 1usize << k;
    let mut out = DMatrix::from_element(1 << n, 1 << n, zero);
    for a in 0..local {
        for b in 0..local {
            let coeff = m[(a, b)];
            if coeff == zero {
                continue;
            }
            // tensor factors from the most significant qubit down
            let mut term = DMatrix::from_element(1, 1, coeff);
            for q in (0..n).rev() {
                let f = match qubits.iter().position(|&x| x == q) {
                    Some(slot) => unit((a >> slot) & 1, (b >> slot) & 1),
                    None => eye.clone(),
                };
                term = kron(&term, &f);
            }
            out += term;
        }
    }
    out
}

/// Full `2^n × 2^n` unitary of a measurement-free circuit, ops applied in order.
pub fn dense_unitary(c: &Circuit) -> Result<DMatrix<C64>> {
    if c.has_measurements() {
        return Err(Error::ContainsMeasurement);
    }
    let n = c.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::InvalidParameter(format!("dense unitary limited to {MAX_DENSE_QUBITS} qubits")));
    }
    let mut u = DMatrix::<C64>::identity(1 << n, 1 << n);
    for op in c.ops() {
        u = embed(&op.gate.matrix(), &op.qubits, n) * u;
    }
    Ok(u)
}

/// Max-norm distance after removing the relative global phase.
pub fn equal_up_to_phase(a: &DMatrix<C64>, b: &DMatrix<C64>, tol: f64) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    let (idx, _) = a.iter().enumerate().fold((0, 0.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc });
    let (ra, rb) = (a.as_slice()[idx], b.as_slice()[idx]);
    if rb.norm() < 1e-14 {
        return false;
    }
    let phase = ra / rb;
    let phase = phase / phase.norm();
    a.iter().zip(b.iter()).all(|(x, y)| (x - phase * y).norm() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Gate;

    #[test]
    fn empty_circuit_is_identity() {
        let u = dense_unitary(&Circuit::new(2)).unwrap();
        assert_eq!(u, DMatrix::identity(4, 4));
    }

    #[test]
    fn cnot_permutes_control_set_states() {
        let mut c = Circuit::new(2);
        c.cx(0, 1);
        let u = dense_unitary(&c).unwrap();
        // qubit 0 set: index 1 <-> 3
        let one = C64::new(1.0, 0.0);
        assert_eq!(u[(0, 0)], one);
        assert_eq!(u[(2, 2)], one);
        assert_eq!(u[(3, 1)], one);
        assert_eq!(u[(1, 3)], one);
        assert_eq!(u[(1, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn x_on_qubit_k_flips_bit_k() {
        for n in 1..=4 {
            for k in 0..n {
                let mut c = Circuit::new(n);
                c.x(k);
                let u = dense_unitary(&c).unwrap();
                for basis in 0..(1usize << n) {
                    let out = (0..(1 << n)).find(|&r| u[(r, basis)].norm() > 0.5).unwrap();
                    assert_eq!(out, basis ^ (1 << k));
                }
            }
        }
    }

    #[test]
    fn rejects_measurements() {
        let mut c = Circuit::new(1);
        c.measure(0, crate::qcore::Basis::Z);
        assert!(matches!(dense_unitary(&c), Err(Error::ContainsMeasurement)));
    }

    #[test]
    fn phase_insensitive_comparison() {
        let a = Gate::Rz(0.4).matrix();
        let b = Gate::U1(0.4).matrix();
        assert!(equal_up_to_phase(&a, &b, 1e-12));
        assert!(!equal_up_to_phase(&a, &Gate::U1(0.5).matrix(), 1e-6));
    }
}
