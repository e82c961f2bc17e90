use dmftq::noise::{depolarizing_channel, infidelity_map, thermal_channel, NoiseParams};
use dmftq::par::Exec;
use dmftq::qcore::{cleanup_transpile, dense_unitary, equal_up_to_phase, lower_to_basis, Circuit, Gate, DEFAULT_ANGLE_EPS};
use dmftq::sim::{run_density, run_statevector, sample_from_expectation, DensityMatrix, StateVector};
use dmftq::C64;
use nalgebra::DMatrix;
use proptest::prelude::*;

const N: usize = 3;

fn gate_strategy() -> impl Strategy<Value = (Gate, Vec<usize>)> {
    let angle = -4.0f64..4.0;
    let q = 0..N;
    prop_oneof![
        (angle.clone(), q.clone()).prop_map(|(a, q)| (Gate::Rx(a), vec![q])),
        (angle.clone(), q.clone()).prop_map(|(a, q)| (Gate::Ry(a), vec![q])),
        (angle.clone(), q.clone()).prop_map(|(a, q)| (Gate::Rz(a), vec![q])),
        (angle.clone(), angle.clone(), angle, q.clone()).prop_map(|(a, b, c, q)| (Gate::U3(a, b, c), vec![q])),
        q.clone().prop_map(|q| (Gate::H, vec![q])),
        q.clone().prop_map(|q| (Gate::Sdg, vec![q])),
        (q.clone(), 1..N).prop_map(|(c, d)| (Gate::Cnot, vec![c, (c + d) % N])),
    ]
}

fn circuit_strategy(max_len: usize) -> impl Strategy<Value = Circuit> {
    prop::collection::vec(gate_strategy(), 0..max_len).prop_map(|ops| {
        let mut c = Circuit::new(N);
        for (g, q) in ops {
            c.add(g, &q);
        }
        c
    })
}

fn noise_strategy() -> impl Strategy<Value = NoiseParams> {
    (-6.0f64..-2.0, 0.0f64..0.05, 0.0f64..0.1).prop_map(|(log_t, l1, l2)| NoiseParams {
        t_relax: 10f64.powf(log_t),
        lambda1: l1,
        lambda2: l2,
        ..NoiseParams::ideal()
    })
}

fn outer(psi: &StateVector) -> DMatrix<C64> {
    let v = DMatrix::from_column_slice(psi.amplitudes().len(), 1, psi.amplitudes());
    &v * v.adjoint()
}

fn max_dev(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn noisy_evolution_stays_a_density_matrix(c in circuit_strategy(30), noise in noise_strategy()) {
        let rho = run_density(&lower_to_basis(&c), &DensityMatrix::zero(N), &noise).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-10);
        prop_assert!(rho.hermiticity_error() < 1e-10);
        prop_assert!(rho.min_eigenvalue() > -1e-10);
        prop_assert!(rho.purity() <= 1.0 + 1e-10);
    }

    #[test]
    fn noiseless_density_is_the_projector_of_the_statevector(c in circuit_strategy(30)) {
        let rho = run_density(&lower_to_basis(&c), &DensityMatrix::zero(N), &NoiseParams::ideal()).unwrap();
        let psi = run_statevector(&c, &StateVector::zero(N)).unwrap();
        prop_assert!(max_dev(&(rho.to_matrix() - outer(&psi))) < 1e-10);
    }

    #[test]
    fn cleanup_preserves_the_unitary_and_is_idempotent(c in circuit_strategy(40)) {
        let once = cleanup_transpile(&lower_to_basis(&c), DEFAULT_ANGLE_EPS);
        let twice = cleanup_transpile(&once, DEFAULT_ANGLE_EPS);
        prop_assert_eq!(once.ops(), twice.ops());
        prop_assert!(equal_up_to_phase(&dense_unitary(&c).unwrap(), &dense_unitary(&once).unwrap(), 1e-8));
    }

    #[test]
    fn maximally_mixed_state_is_a_depolarizing_fixpoint(lambda in 0.0f64..=1.0, arity in 1usize..=2) {
        let ch = depolarizing_channel(lambda, arity).unwrap();
        let d = 1usize << arity;
        let mixed = DMatrix::<C64>::identity(d, d) / C64::from(d as f64);
        prop_assert!(max_dev(&(ch.apply_dense(&mixed) - &mixed)) < 1e-12);
    }

    #[test]
    fn full_depolarization_forgets_the_input(c in circuit_strategy(12), arity in 1usize..=2) {
        // λ = 1 − 1/4^m is the completely depolarizing point.
        let lambda = 1.0 - 1.0 / 4f64.powi(arity as i32);
        let ch = depolarizing_channel(lambda, arity).unwrap();
        let psi = run_statevector(&c, &StateVector::zero(N)).unwrap();
        let pair = DensityMatrix::from_pure(&psi).partial_trace(0, 1).unwrap().to_matrix();
        let input = if arity == 2 {
            pair
        } else {
            // Trace out qubit 1 as well (index = q0 + 2·q1).
            DMatrix::from_fn(2, 2, |i, j| pair[(i, j)] + pair[(i + 2, j + 2)])
        };
        let d = input.nrows();
        let mixed = DMatrix::<C64>::identity(d, d) / C64::from(d as f64);
        prop_assert!(max_dev(&(ch.apply_dense(&input) - mixed)) < 1e-12);
    }

    #[test]
    fn long_relaxation_ends_in_the_ground_state(ratio in 30.0f64..100.0, theta in 0.0f64..3.2) {
        let ch = thermal_channel(ratio, 1.0).unwrap();
        let psi = run_statevector(Circuit::new(1).ry(0, theta), &StateVector::zero(1)).unwrap();
        let out = ch.apply_dense(&outer(&psi));
        prop_assert!((out[(0, 0)].re - 1.0).abs() < 1e-12);
        prop_assert!(out[(1, 1)].norm() < 1e-12 && out[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn infidelity_grows_with_lambda_and_shrinks_with_t_relax(
        log_t in -5.0f64..0.0, dlog_t in 0.2f64..2.0, log_l in -6.0f64..-2.5, dlog_l in 0.2f64..1.0,
    ) {
        let taus = [10f64.powf(log_t), 10f64.powf(log_t + dlog_t)];
        let lambdas = [10f64.powf(log_l), 10f64.powf(log_l + dlog_l)];
        let map = infidelity_map(&taus, &lambdas, &NoiseParams::ideal(), Exec::Sequential).unwrap();
        let at = |t: f64, l: f64| map.iter().find(|p| p.t_relax_s == t && p.lambda == l).unwrap().infidelity;
        for l in lambdas {
            prop_assert!(at(taus[0], l) > at(taus[1], l));
        }
        for t in taus {
            prop_assert!(at(t, lambdas[1]) > at(t, lambdas[0]));
        }
    }
}

#[test]
fn shot_estimator_is_unbiased() {
    let shots = 1000u64;
    let seeds = 4000u64;
    for value in [-0.9, -0.3, 0.0, 0.42, 0.97] {
        let mean = (0..seeds).map(|s| sample_from_expectation(value, shots, s)).sum::<f64>() / seeds as f64;
        let sigma = ((1.0 - value * value) / (shots * seeds) as f64).sqrt();
        assert!((mean - value).abs() < 5.0 * sigma + 1e-12, "value {value}: mean {mean}, σ {sigma}");
    }
}

#[test]
fn shot_estimator_variance_is_binomial() {
    let (value, shots, seeds) = (0.3, 500u64, 4000u64);
    let draws: Vec<f64> = (0..seeds).map(|s| sample_from_expectation(value, shots, s)).collect();
    let mean = draws.iter().sum::<f64>() / seeds as f64;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (seeds - 1) as f64;
    let expected = (1.0 - value * value) / shots as f64;
    assert!((var / expected - 1.0).abs() < 0.1, "variance ratio {}", var / expected);
}

#[test]
fn sequential_and_parallel_runs_agree_bitwise() {
    use dmftq::greens::{fit_series_with, measure_series, FitOptions, MeasureConfig};
    use dmftq::model::SiamParams;

    let p = SiamParams::half_filled(3.0, 0.8);
    let noise = NoiseParams::new(1.1e-3, 4e-4).unwrap();
    let run = |exec: Exec| {
        let cfg = MeasureConfig { exec, ..MeasureConfig::density(noise, 2000, 7) };
        let s = measure_series(&p, 0.5, 24, &cfg).unwrap();
        let fit = fit_series_with(&s, &FitOptions { exec, ..FitOptions::default() }).unwrap();
        (s.values().to_vec(), fit.alpha.to_bits(), fit.omega1.to_bits(), fit.omega2.to_bits())
    };
    assert_eq!(run(Exec::Sequential), run(Exec::Parallel));
}
