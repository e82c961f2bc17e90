use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::density::DensityMatrix;
use super::pauli::{Pauli, PauliString};
use super::statevector::StateVector;
use crate::qcore::Basis;

/// Single-qubit Pauli expectation of a simulation state.
pub trait QubitExpectation {
    fn qubit_expectation(&self, qubit: usize, basis: Basis) -> f64;
}

fn single(n: usize, qubit: usize, basis: Basis) -> PauliString {
    let p = match basis {
        Basis::Z => Pauli::Z,
        Basis::Y => Pauli::Y,
    };
    PauliString::sparse(n, &[(qubit, p)])
}

impl QubitExpectation for StateVector {
    fn qubit_expectation(&self, qubit: usize, basis: Basis) -> f64 {
        self.expectation(&single(self.n_qubits(), qubit, basis)).expect("well-formed")
    }
}

impl QubitExpectation for DensityMatrix {
    fn qubit_expectation(&self, qubit: usize, basis: Basis) -> f64 {
        self.expectation(&single(self.n_qubits(), qubit, basis)).expect("well-formed")
    }
}

/// Empirical ±1 mean of `n_shots` measurements with exact mean `value`.
///
/// The number of +1 outcomes is drawn as Binomial(n_shots, (1+value)/2),
/// which is the distribution of `n_shots` independent Bernoulli draws.
pub fn sample_from_expectation(value: f64, n_shots: u64, seed: u64) -> f64 {
    assert!(n_shots >= 1, "at least one shot");
    let p = ((1.0 + value) / 2.0).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = Binomial::new(n_shots, p).expect("p in [0,1]").sample(&mut rng);
    2.0 * k as f64 / n_shots as f64 - 1.0
}

pub fn sample_expectation<S: QubitExpectation>(state: &S, qubit: usize, basis: Basis, n_shots: u64, seed: u64) -> f64 {
    sample_from_expectation(state.qubit_expectation(qubit, basis), n_shots, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_outcome_is_exact() {
        let s = StateVector::zero(2);
        for seed in 0..10 {
            assert_eq!(sample_expectation(&s, 1, Basis::Z, 1000, seed), 1.0);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(sample_from_expectation(0.3, 75_000, 9), sample_from_expectation(0.3, 75_000, 9));
        assert_ne!(sample_from_expectation(0.3, 75_000, 9), sample_from_expectation(0.3, 75_000, 10));
    }
}
