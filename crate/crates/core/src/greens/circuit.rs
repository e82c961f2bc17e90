use crate::model::N_WORK;
use crate::qcore::{Basis, Circuit};
use crate::{Error, Result};

pub const ANCILLA: usize = 0;
pub const N_GREENS: usize = N_WORK + 1;

fn check_work(c: &Circuit, what: &str) -> Result<()> {
    if c.n_qubits() != N_WORK {
        return Err(Error::InvalidCircuit(format!("{what} acts on {} qubits, expected {N_WORK}", c.n_qubits())));
    }
    if c.has_measurements() {
        return Err(Error::ContainsMeasurement);
    }
    Ok(())
}

/// Ground-state preparation, ancilla H, CX(0→1) and the evolution, on 5 qubits.
///
/// Its output is (|0⟩U|gs⟩ + |1⟩UX₁|gs⟩)/√2.
pub fn greens_prefix(gs: &Circuit, evolution: &Circuit) -> Result<Circuit> {
    check_work(gs, "ground-state circuit")?;
    check_work(evolution, "evolution")?;
    let mut c = gs.embed(N_GREENS, 1)?;
    c.h(ANCILLA).cx(ANCILLA, 1);
    c.extend(&evolution.embed(N_GREENS, 1)?)?;
    Ok(c)
}

/// Closing ancilla operations.
///
/// Z: CX(0→1), H, measure σz, giving Re⟨U†X₁UX₁⟩.
/// Y: CX(0→1), measure σy, giving Im⟨U†X₁UX₁⟩ (the final H would map σy to −σy).
pub fn greens_tail(basis: Basis) -> Circuit {
    let mut c = Circuit::new(N_GREENS);
    c.cx(ANCILLA, 1);
    if basis == Basis::Z {
        c.h(ANCILLA);
    }
    c.measure(ANCILLA, basis);
    c
}

/// Full interferometry circuit for Re⟨gs|U†X₁UX₁|gs⟩.
pub fn greens_circuit(gs: &Circuit, evolution: &Circuit) -> Result<Circuit> {
    greens_circuit_basis(gs, evolution, Basis::Z)
}

pub fn greens_circuit_basis(gs: &Circuit, evolution: &Circuit, basis: Basis) -> Result<Circuit> {
    greens_prefix(gs, evolution)?.then(&greens_tail(basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{exact_correlator, exact_ground_state, state_prep_circuit, trotter_step_circuit, SiamParams};
    use crate::sim::{run_statevector, Pauli, PauliString, StateVector};

    fn ancilla_expectation(c: &Circuit) -> f64 {
        let (u, meas) = c.split_measurements();
        let psi = run_statevector(&u, &StateVector::zero(N_GREENS)).unwrap();
        let p = match meas[0].1 {
            Basis::Z => Pauli::Z,
            Basis::Y => Pauli::Y,
        };
        psi.expectation(&PauliString::sparse(N_GREENS, &[(ANCILLA, p)])).unwrap()
    }

    fn gs_circuit(p: &SiamParams) -> Circuit {
        state_prep_circuit(exact_ground_state(p).unwrap().state.amplitudes()).unwrap()
    }

    #[test]
    fn identity_evolution_gives_one() {
        let p = SiamParams::half_filled(4.0, 1.0);
        let c = greens_circuit(&gs_circuit(&p), &Circuit::new(N_WORK)).unwrap();
        assert!((ancilla_expectation(&c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_step_against_exact_correlator() {
        let p = SiamParams::half_filled(4.0, 1.0);
        let dt = 0.1;
        let step = trotter_step_circuit(&p, dt).unwrap();
        let exact = exact_correlator(&p, &[dt]).unwrap()[0];
        let re = ancilla_expectation(&greens_circuit(&gs_circuit(&p), &step).unwrap());
        let im = ancilla_expectation(&greens_circuit_basis(&gs_circuit(&p), &step, Basis::Y).unwrap());
        assert!((re - exact.re).abs() < 1e-2);
        assert!((im - exact.im).abs() < 1e-2);
    }

    #[test]
    fn matches_dense_correlator_of_the_same_evolution() {
        use nalgebra::DVector;
        let p = SiamParams::half_filled(3.0, 0.8);
        let evo = crate::model::trotter_evolution(&p, 0.5, 3).unwrap();
        let u = crate::qcore::dense_unitary(&evo).unwrap();
        let x = PauliString::sparse(N_WORK, &[(0, Pauli::X)]).matrix();
        let gs = exact_ground_state(&p).unwrap();
        let v = DVector::from_column_slice(gs.state.amplitudes());
        let corr = (v.adjoint() * u.adjoint() * &x * &u * &x * &v)[(0, 0)];
        let prep = gs_circuit(&p);
        assert!((ancilla_expectation(&greens_circuit(&prep, &evo).unwrap()) - corr.re).abs() < 1e-10);
        assert!((ancilla_expectation(&greens_circuit_basis(&prep, &evo, Basis::Y).unwrap()) - corr.im).abs() < 1e-10);
    }

    #[test]
    fn rejects_wrong_register() {
        assert!(greens_circuit(&Circuit::new(3), &Circuit::new(N_WORK)).is_err());
    }
}
