use nalgebra::DMatrix;

use crate::sim::{DensityMatrix, Pauli};
use crate::{Error, Result, C64};

const PSD_TOL: f64 = 1e-9;

fn check_two_qubit(rho: &DensityMatrix) -> Result<DMatrix<C64>> {
    if rho.n_qubits() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: rho.n_qubits() });
    }
    let min = rho.min_eigenvalue();
    if min < -PSD_TOL {
        return Err(Error::InvalidParameter(format!("state is not positive semidefinite (eigenvalue {min:.3e})")));
    }
    if (rho.trace() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!("state has trace {}", rho.trace())));
    }
    Ok(rho.to_matrix())
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let m = check_two_qubit(rho)?;
    let y = Pauli::Y.matrix();
    let yy = y.kronecker(&y);
    let tilde = &yy * m.conjugate() * &yy;

    let eig = m.clone().symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|v| C64::new(v.max(0.0).sqrt(), 0.0));
    let sqrt_rho = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();

    let r = &sqrt_rho * tilde * &sqrt_rho;
    let r = (&r + r.adjoint()) * C64::new(0.5, 0.0);
    let mut lam: Vec<f64> = r.symmetric_eigen().eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).clamp(0.0, 1.0))
}

fn binary_entropy(x: f64) -> f64 {
    [x, 1.0 - x].iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Entanglement of formation in ebits, in [0, 1].
pub fn entanglement_of_formation(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence(rho)?;
    if c == 0.0 {
        return Ok(0.0);
    }
    let x = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    Ok(binary_entropy(x).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Circuit;
    use crate::sim::{run_statevector, StateVector};

    fn bell() -> DensityMatrix {
        let mut c = Circuit::new(2);
        c.h(0).cx(0, 1);
        DensityMatrix::from_pure(&run_statevector(&c, &StateVector::zero(2)).unwrap())
    }

    fn werner(p: f64) -> DensityMatrix {
        let b = bell().to_matrix();
        let id = DMatrix::<C64>::identity(4, 4);
        DensityMatrix::from_matrix(&(b * C64::new(p, 0.0) + id * C64::new((1.0 - p) / 4.0, 0.0))).unwrap()
    }

    #[test]
    fn bell_is_maximal() {
        assert!((concurrence(&bell()).unwrap() - 1.0).abs() < 1e-10);
        assert!((entanglement_of_formation(&bell()).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn product_states_are_unentangled() {
        let mut c = Circuit::new(2);
        c.ry(0, 0.7).rx(1, -1.3).rz(1, 0.4);
        let rho = DensityMatrix::from_pure(&run_statevector(&c, &StateVector::zero(2)).unwrap());
        assert!(concurrence(&rho).unwrap() < 1e-7);
        assert!(entanglement_of_formation(&rho).unwrap() < 1e-6);
        assert_eq!(concurrence(&DensityMatrix::maximally_mixed(2)).unwrap(), 0.0);
    }

    #[test]
    fn werner_matches_eigen_oracle() {
        let p = 0.9;
        let rho = werner(p);
        // ρ and ρ̃ are real for this state: eigenvalues of ρρ̃ from a general real solver
        let m = rho.to_matrix().map(|z| z.re);
        let y = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let yy = y.kronecker(&y);
        let r = &m * (&yy * &m * &yy);
        let mut lam: Vec<f64> = r.complex_eigenvalues().iter().map(|z| z.re.max(0.0).sqrt()).collect();
        lam.sort_by(|a, b| b.total_cmp(a));
        let oracle = (lam[0] - lam[1] - lam[2] - lam[3]).max(0.0);
        let c = concurrence(&rho).unwrap();
        assert!((oracle - 0.85).abs() < 1e-9);
        assert!((c - 0.85).abs() < 1e-9, "{c}");
        let x: f64 = 0.5 * (1.0 + (1.0 - 0.85f64 * 0.85).sqrt());
        let e = -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
        assert!((entanglement_of_formation(&rho).unwrap() - e).abs() < 1e-9);
        // separable below p = 1/3
        assert_eq!(concurrence(&werner(0.3)).unwrap(), 0.0);
    }

    #[test]
    fn rejects_invalid_states() {
        let mut m = DMatrix::<C64>::zeros(4, 4);
        m[(0, 0)] = C64::new(1.5, 0.0);
        m[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(DensityMatrix::from_matrix(&m).is_err());
        let rho = DensityMatrix::from_matrix_unchecked(&m);
        assert!(matches!(concurrence(&rho), Err(Error::InvalidParameter(_))));
        assert!(entanglement_of_formation(&rho).is_err());
        assert!(concurrence(&DensityMatrix::zero(3)).is_err());
    }
}
