use nalgebra::DMatrix;

use super::pauli::PauliString;
use crate::qcore::{Circuit, Gate};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// |0…0⟩.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = C64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut s = Self::zero(n_qubits);
        s.amps[0] = C64::new(0.0, 0.0);
        s.amps[index] = C64::new(1.0, 0.0);
        s
    }

    /// Wrap amplitudes; rejects non-power-of-two lengths and norms off by > 1e-10.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(Error::InvalidParameter(format!("{} amplitudes is not a qubit register", amps.len())));
        }
        let s = StateVector { n_qubits: amps.len().trailing_zeros() as usize, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn apply_1q(&mut self, m: &DMatrix<C64>, q: usize) {
        let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit != 0 {
                continue;
            }
            let (a, b) = (self.amps[i], self.amps[i | bit]);
            self.amps[i] = m00 * a + m01 * b;
            self.amps[i | bit] = m10 * a + m11 * b;
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    /// General two-qubit matrix in local ordering `b(q0) + 2·b(q1)`.
    pub fn apply_2q(&mut self, m: &DMatrix<C64>, q0: usize, q1: usize) {
        let (b0, b1) = (1usize << q0, 1usize << q1);
        let off = [0, b0, b1, b0 | b1];
        for i in 0..self.amps.len() {
            if i & (b0 | b1) != 0 {
                continue;
            }
            let v = off.map(|o| self.amps[i | o]);
            for (r, &o) in off.iter().enumerate() {
                self.amps[i | o] = (0..4).map(|c| m[(r, c)] * v[c]).sum();
            }
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate, qubits: &[usize]) -> Result<()> {
        match gate {
            Gate::Measure(_) => Err(Error::ContainsMeasurement),
            Gate::Cnot => {
                self.apply_cnot(qubits[0], qubits[1]);
                Ok(())
            }
            g => {
                self.apply_1q(&g.matrix(), qubits[0]);
                Ok(())
            }
        }
    }

    /// ⟨ψ|P|ψ⟩ (real part; the imaginary part vanishes for Hermitian P).
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.len() != self.n_qubits {
            return Err(Error::MalformedPauli(format!("{p} on {} qubits", self.n_qubits)));
        }
        Ok(self.expectation_complex(p).re)
    }

    pub(crate) fn expectation_complex(&self, p: &PauliString) -> C64 {
        (0..self.amps.len())
            .map(|j| {
                let (i, ph) = p.apply_to_basis(j);
                self.amps[i].conj() * ph * self.amps[j]
            })
            .sum()
    }

    /// Reduced two-qubit density matrix; local index `b(a) + 2·b(b)`.
    pub fn reduced_pair(&self, a: usize, b: usize) -> DMatrix<C64> {
        let (ba, bb) = (1usize << a, 1usize << b);
        let off = [0, ba, bb, ba | bb];
        let mut rho = DMatrix::zeros(4, 4);
        for rest in 0..self.amps.len() {
            if rest & (ba | bb) != 0 {
                continue;
            }
            for r in 0..4 {
                let x = self.amps[rest | off[r]];
                for c in 0..4 {
                    rho[(r, c)] += x * self.amps[rest | off[c]].conj();
                }
            }
        }
        rho
    }
}

/// Ideal gate-by-gate evolution of `initial`.
pub fn run_statevector(c: &Circuit, initial: &StateVector) -> Result<StateVector> {
    if c.n_qubits() != initial.n_qubits() {
        return Err(Error::DimensionMismatch { expected: c.n_qubits(), actual: initial.n_qubits() });
    }
    let mut s = initial.clone();
    for op in c.ops() {
        s.apply_gate(&op.gate, &op.qubits)?;
    }
    Ok(s)
}
