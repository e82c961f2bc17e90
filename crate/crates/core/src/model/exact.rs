use nalgebra::{DMatrix, DVector};

use super::hamiltonian::{dense_hamiltonian, jw_hamiltonian, SiamParams};
use crate::greens::GreensSeries;
use crate::sim::{Pauli, PauliString, StateVector};
use crate::{Error, Result, C64};

const DEGENERACY_TOL: f64 = 1e-9;

/// Ground state of the qubit Hamiltonian together with its full spectrum.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl GroundState {
    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> &[f64] {
        &self.energies
    }

    /// Weights |⟨n|X₀|gs⟩|² and excitation energies Eₙ − E₀ of the X₀-excited state.
    pub fn x0_poles(&self) -> Vec<(f64, f64)> {
        let x0 = PauliString::sparse(4, &[(0, Pauli::X)]).matrix();
        let psi = DVector::from_column_slice(self.state.amplitudes());
        let kicked = x0 * psi;
        let overlaps = self.vectors.adjoint() * kicked;
        self.energies.iter().zip(overlaps.iter()).map(|(e, c)| (c.norm_sqr(), e - self.energy)).collect()
    }
}

fn sorted_eigen(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    (energies, vectors)
}

/// Lowest eigenvector; a degenerate ground space is resolved by projecting the
/// lowest-index basis state with nonzero weight onto it. The largest amplitude
/// is made real positive.
pub fn exact_ground_state(p: &SiamParams) -> Result<GroundState> {
    let h = dense_hamiltonian(&jw_hamiltonian(p)?);
    let (energies, vectors) = sorted_eigen(&h);
    let e0 = energies[0];
    let ground: Vec<usize> = (0..energies.len()).take_while(|&i| energies[i] - e0 < DEGENERACY_TOL).collect();
    let d = h.nrows();
    let projected = (0..d)
        .find_map(|j| {
            let v: DVector<C64> = ground.iter().map(|&k| vectors.column(k) * vectors[(j, k)].conj()).sum();
            (v.norm() > 1e-6).then_some(v)
        })
        .ok_or_else(|| Error::InvalidParameter("empty ground space".into()))?;
    let mut v = projected.normalize();
    let (imax, _) = v.iter().enumerate().fold((0, 0.0), |(bi, bm), (i, z)| if z.norm() > bm + 1e-12 { (i, z.norm()) } else { (bi, bm) });
    let phase = v[imax].conj() / v[imax].norm();
    v *= phase;
    v[imax] = C64::new(v[imax].re, 0.0);
    Ok(GroundState { energy: e0, state: StateVector::from_amplitudes(v.as_slice().to_vec())?, energies, vectors })
}

/// exp(−iHτ) for the qubit Hamiltonian.
pub fn exact_evolution(p: &SiamParams, tau: f64) -> Result<DMatrix<C64>> {
    let (energies, vectors) = sorted_eigen(&dense_hamiltonian(&jw_hamiltonian(p)?));
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(energies.len(), energies.iter().map(|e| C64::from_polar(1.0, -e * tau))));
    Ok(&vectors * phases * vectors.adjoint())
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::InvalidParameter("times must be nonnegative".into()));
    }
    Ok(())
}

/// ⟨gs|U†(τ) X₀ U(τ) X₀|gs⟩ evaluated spectrally.
pub fn exact_correlator(p: &SiamParams, times: &[f64]) -> Result<Vec<C64>> {
    check_times(times)?;
    let poles = exact_ground_state(p)?.x0_poles();
    Ok(times.iter().map(|t| poles.iter().map(|(w, om)| C64::from_polar(*w, -om * t)).sum()).collect())
}

/// iG(τ) = Re⟨gs|U†X₀UX₀|gs⟩ from exact time evolution.
pub fn exact_greens_series(p: &SiamParams, times: &[f64]) -> Result<GreensSeries> {
    let c = exact_correlator(p, times)?;
    let n = times.len();
    GreensSeries::new(times.to_vec(), c.iter().map(|z| z.re).collect(), vec![0.0; n])
}

/// ⟨{c(τ), c†(0)}⟩ for the impurity-↑ fermion, built from dense operators.
pub fn exact_retarded_greens(p: &SiamParams, times: &[f64]) -> Result<Vec<C64>> {
    check_times(times)?;
    let gs = exact_ground_state(p)?;
    let psi = DVector::from_column_slice(gs.state.amplitudes());
    // Qubit 0 carries no Jordan-Wigner string: c = |0⟩⟨1| = (X + iY)/2.
    let x = PauliString::sparse(4, &[(0, Pauli::X)]).matrix();
    let y = PauliString::sparse(4, &[(0, Pauli::Y)]).matrix();
    let c = (x + y * C64::new(0.0, 1.0)) * C64::new(0.5, 0.0);
    let cd = c.adjoint();
    times
        .iter()
        .map(|&t| {
            let u = exact_evolution(p, t)?;
            let ct = u.adjoint() * &c * &u;
            let anti = &ct * &cd + &cd * &ct;
            Ok((psi.adjoint() * anti * &psi)[(0, 0)])
        })
        .collect()
}
