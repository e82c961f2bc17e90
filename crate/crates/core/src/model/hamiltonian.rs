use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::sim::{Pauli, PauliString};
use crate::{Error, Result, C64};

pub const N_WORK: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiamParams {
    pub u: f64,
    pub v: f64,
    pub mu: f64,
    pub eps_c: f64,
    pub t_star: f64,
}

impl SiamParams {
    /// μ = U/2, ε_c = 0, t* = 1.
    pub fn half_filled(u: f64, v: f64) -> Self {
        SiamParams { u, v, mu: u / 2.0, eps_c: 0.0, t_star: 1.0 }
    }

    pub fn with_v(self, v: f64) -> Self {
        SiamParams { v, ..self }
    }

    pub fn is_half_filled(&self) -> bool {
        (self.mu - self.u / 2.0).abs() < 1e-12 && self.eps_c == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_star > 0.0) {
            return Err(Error::InvalidParameter(format!("t_star must be positive, got {}", self.t_star)));
        }
        if !self.u.is_finite() || !self.v.is_finite() {
            return Err(Error::InvalidParameter("U and V must be finite".into()));
        }
        if !self.is_half_filled() {
            return Err(Error::InvalidParameter("only the half-filled model is supported".into()));
        }
        Ok(())
    }
}

/// Σ cᵢ Pᵢ with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliHamiltonian {
    pub fn new(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if let Some((_, p)) = terms.iter().find(|(_, p)| p.len() != n_qubits) {
            return Err(Error::MalformedPauli(format!("{p} on {n_qubits} qubits")));
        }
        Ok(PauliHamiltonian { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }
}

/// (U/4)Z₀Z₂ + (V/2)(X₀X₁ + Y₀Y₁ + X₂X₃ + Y₂Y₃), constant −U/4 dropped.
pub fn jw_hamiltonian(p: &SiamParams) -> Result<PauliHamiltonian> {
    p.validate()?;
    let s = |a: usize, pa: Pauli, b: usize, pb: Pauli| PauliString::sparse(N_WORK, &[(a, pa), (b, pb)]);
    let (zz, hop) = (p.u / 4.0, p.v / 2.0);
    PauliHamiltonian::new(
        N_WORK,
        vec![
            (zz, s(0, Pauli::Z, 2, Pauli::Z)),
            (hop, s(0, Pauli::X, 1, Pauli::X)),
            (hop, s(0, Pauli::Y, 1, Pauli::Y)),
            (hop, s(2, Pauli::X, 3, Pauli::X)),
            (hop, s(2, Pauli::Y, 3, Pauli::Y)),
        ],
    )
}

pub fn dense_hamiltonian(h: &PauliHamiltonian) -> DMatrix<C64> {
    let d = 1usize << h.n_qubits;
    let mut m = DMatrix::<C64>::zeros(d, d);
    for (c, p) in &h.terms {
        for j in 0..d {
            let (i, ph) = p.apply_to_basis(j);
            m[(i, j)] += ph * *c;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::kron;

    #[test]
    fn coefficients_by_substitution() {
        let h = jw_hamiltonian(&SiamParams::half_filled(2.0, 1.0)).unwrap();
        assert!(h.terms().iter().all(|(c, _)| (*c - 0.5).abs() < 1e-15));
        let names: Vec<String> = h.terms().iter().map(|(_, p)| p.to_string()).collect();
        assert_eq!(names, ["ZIZI", "XXII", "YYII", "IIXX", "IIYY"]);
        let h = jw_hamiltonian(&SiamParams::half_filled(4.0, 0.0)).unwrap();
        assert_eq!(h.terms()[0].0, 1.0);
        assert!(h.terms()[1..].iter().all(|(c, _)| *c == 0.0));
        assert_eq!(jw_hamiltonian(&SiamParams::half_filled(0.0, 1.0)).unwrap().terms()[0].0, 0.0);
    }

    #[test]
    fn rejects_away_from_half_filling() {
        let p = SiamParams { mu: 0.3, ..SiamParams::half_filled(2.0, 1.0) };
        assert!(jw_hamiltonian(&p).is_err());
    }

    #[test]
    fn dense_matches_tensor_products() {
        let h = jw_hamiltonian(&SiamParams::half_filled(4.0, 1.0)).unwrap();
        let d = dense_hamiltonian(&h);
        let m = |p: Pauli| p.matrix();
        let id = || m(Pauli::I);
        // kron(a, b) puts `a` on the higher qubit.
        let k4 = |q3, q2, q1, q0| kron(&kron(&kron(&q3, &q2), &q1), &q0);
        let oracle = k4(id(), m(Pauli::Z), id(), m(Pauli::Z)) * C64::new(1.0, 0.0)
            + (k4(id(), id(), m(Pauli::X), m(Pauli::X)) + k4(id(), id(), m(Pauli::Y), m(Pauli::Y))) * C64::new(0.5, 0.0)
            + (k4(m(Pauli::X), m(Pauli::X), id(), id()) + k4(m(Pauli::Y), m(Pauli::Y), id(), id())) * C64::new(0.5, 0.0);
        assert!((&d - &oracle).norm() < 1e-12);
        assert!((&d - d.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn empty_hamiltonian_is_zero() {
        let h = PauliHamiltonian::new(2, vec![]).unwrap();
        assert_eq!(dense_hamiltonian(&h), DMatrix::zeros(4, 4));
    }
}
