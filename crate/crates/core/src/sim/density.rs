use nalgebra::DMatrix;

use super::kraus::Superop;
use super::pauli::PauliString;
use super::statevector::StateVector;
use crate::noise::{NoiseModel, NoiseParams};
use crate::qcore::{Circuit, Gate};
use crate::{Error, Result, C64};

pub const MAX_DENSITY_QUBITS: usize = 10;

/// Row-major `2^n × 2^n` density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn zero(n_qubits: usize) -> Self {
        Self::from_pure(&StateVector::zero(n_qubits))
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        let data = a.iter().flat_map(|x| a.iter().map(move |y| x * y.conj())).collect();
        DensityMatrix { n_qubits: psi.n_qubits(), data }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            data[i * d + i] = C64::new(1.0 / d as f64, 0.0);
        }
        DensityMatrix { n_qubits, data }
    }

    /// Validate and wrap a matrix (Hermitian, unit trace, PSD within tolerance).
    pub fn from_matrix(m: &DMatrix<C64>) -> Result<Self> {
        let d = m.nrows();
        if d != m.ncols() || !d.is_power_of_two() || d < 2 {
            return Err(Error::InvalidParameter(format!("{}×{} is not a qubit density matrix", m.nrows(), m.ncols())));
        }
        let rho = DensityMatrix { n_qubits: d.trailing_zeros() as usize, data: m.transpose().as_slice().to_vec() };
        if rho.hermiticity_error() > 1e-10 || (rho.trace() - 1.0).abs() > 1e-10 || rho.min_eigenvalue() < -1e-9 {
            return Err(Error::InvalidParameter("not a valid density matrix".into()));
        }
        Ok(rho)
    }

    #[cfg(test)]
    pub(crate) fn from_matrix_unchecked(m: &DMatrix<C64>) -> Self {
        DensityMatrix { n_qubits: m.nrows().trailing_zeros() as usize, data: m.transpose().as_slice().to_vec() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim() + c]
    }

    pub fn to_matrix(&self) -> DMatrix<C64> {
        let d = self.dim();
        DMatrix::from_row_slice(d, d, &self.data)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i).re).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.to_matrix();
        let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Tr(ρP).
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.len() != self.n_qubits {
            return Err(Error::MalformedPauli(format!("{p} on {} qubits", self.n_qubits)));
        }
        // Tr(ρP) = Σ_j ⟨j|ρ P|j⟩ = Σ_j phase_j ρ[j][P(j)]
        let s: C64 = (0..self.dim())
            .map(|j| {
                let (i, ph) = p.apply_to_basis(j);
                ph * self.get(j, i)
            })
            .sum();
        Ok(s.re)
    }

    /// Apply a superoperator to the listed qubits (local ordering by list position).
    pub fn apply_superop(&mut self, s: &Superop, qubits: &[usize]) {
        let k = qubits.len();
        debug_assert_eq!(s.arity(), k);
        let local = 1usize << k;
        let mask: usize = qubits.iter().map(|q| 1usize << q).sum();
        let off: Vec<usize> = (0..local)
            .map(|a| qubits.iter().enumerate().map(|(slot, q)| ((a >> slot) & 1) << q).sum())
            .collect();
        let m = s.matrix();
        let ll = local * local;
        let sm: Vec<C64> = (0..ll).flat_map(|r| (0..ll).map(move |c| (r, c))).map(|(r, c)| m[(r, c)]).collect();
        let d = self.dim();
        let mut v = vec![C64::new(0.0, 0.0); ll];
        for r in (0..d).filter(|r| r & mask == 0) {
            for c in (0..d).filter(|c| c & mask == 0) {
                for a in 0..local {
                    let row = (r | off[a]) * d;
                    for b in 0..local {
                        v[a * local + b] = self.data[row + (c | off[b])];
                    }
                }
                for a in 0..local {
                    let row = (r | off[a]) * d;
                    for b in 0..local {
                        let srow = &sm[(a * local + b) * ll..(a * local + b + 1) * ll];
                        self.data[row + (c | off[b])] = srow.iter().zip(&v).map(|(x, y)| x * y).sum();
                    }
                }
            }
        }
    }

    /// Reduced state of qubits `(a, b)`; `a` becomes local qubit 0.
    pub fn partial_trace(&self, a: usize, b: usize) -> Result<DensityMatrix> {
        if a == b || a >= self.n_qubits || b >= self.n_qubits {
            return Err(Error::InvalidParameter(format!("cannot keep qubits ({a}, {b}) of {}", self.n_qubits)));
        }
        let (ba, bb) = (1usize << a, 1usize << b);
        let off = [0, ba, bb, ba | bb];
        let mut out = vec![C64::new(0.0, 0.0); 16];
        for rest in (0..self.dim()).filter(|i| i & (ba | bb) == 0) {
            for r in 0..4 {
                for c in 0..4 {
                    out[r * 4 + c] += self.get(rest | off[r], rest | off[c]);
                }
            }
        }
        Ok(DensityMatrix { n_qubits: 2, data: out })
    }
}

/// Noisy execution of a lowered circuit.
///
/// Each gate is applied ideally and then followed by its noise channel.
/// A measurement applies the readout channel and dephases the qubit in the
/// measurement basis; the state is never collapsed.
pub fn run_density(c: &Circuit, initial: &DensityMatrix, noise: &NoiseParams) -> Result<DensityMatrix> {
    let model = NoiseModel::new(noise)?;
    run_density_with(c, initial, &model)
}

pub(crate) fn run_density_with(c: &Circuit, initial: &DensityMatrix, model: &NoiseModel) -> Result<DensityMatrix> {
    let mut rho = initial.clone();
    evolve_density(&mut rho, c, model)?;
    Ok(rho)
}

/// In-place noisy evolution; see [`run_density`].
pub(crate) fn evolve_density(rho: &mut DensityMatrix, c: &Circuit, model: &NoiseModel) -> Result<()> {
    if c.n_qubits() != rho.n_qubits() {
        return Err(Error::DimensionMismatch { expected: c.n_qubits(), actual: rho.n_qubits() });
    }
    if c.n_qubits() > MAX_DENSITY_QUBITS {
        return Err(Error::InvalidParameter(format!("density engine limited to {MAX_DENSITY_QUBITS} qubits")));
    }
    for op in c.ops() {
        match op.gate {
            Gate::Measure(b) => rho.apply_superop(model.measure_superop(b), &op.qubits),
            g if g.is_basis() => rho.apply_superop(&model.gate_superop(&g), &op.qubits),
            g => return Err(Error::NonBasisGate(g.name().to_string())),
        }
    }
    Ok(())
}
