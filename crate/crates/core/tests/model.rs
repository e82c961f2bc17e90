use dmftq::model::{
    dense_hamiltonian, exact_greens_series, exact_retarded_greens, jw_hamiltonian, SiamParams,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Annihilation operator for mode `m` in the 16-dim Fock basis (bit m = occupation),
/// with the usual sign (−1)^(number of occupied modes below m).
fn annihilate(m: usize) -> DMatrix<f64> {
    let mut c = DMatrix::zeros(16, 16);
    for n in 0..16usize {
        if n >> m & 1 == 1 {
            let sign = if (n & ((1 << m) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            c[(n ^ (1 << m), n)] = sign;
        }
    }
    c
}

/// Half-filled two-site Hamiltonian with modes (imp↑, bath↑, imp↓, bath↓).
fn fock_hamiltonian(u: f64, v: f64) -> DMatrix<f64> {
    let c: Vec<DMatrix<f64>> = (0..4).map(annihilate).collect();
    let n = |m: usize| c[m].transpose() * &c[m];
    let hop = |a: usize, b: usize| c[a].transpose() * &c[b] + c[b].transpose() * &c[a];
    (n(0) * n(2)) * u - (n(0) + n(2)) * (u / 2.0) + (hop(0, 1) + hop(2, 3)) * v
}

fn sorted(mut e: Vec<f64>) -> Vec<f64> {
    e.sort_by(f64::total_cmp);
    e
}

proptest! {
    #[test]
    fn qubit_spectrum_matches_fermionic_spectrum(u in 0.0f64..8.0, v in 0.0f64..2.0) {
        let jw = dense_hamiltonian(&jw_hamiltonian(&SiamParams::half_filled(u, v)).unwrap());
        let jw_e = sorted(jw.symmetric_eigen().eigenvalues.iter().cloned().collect());
        let f_e = sorted(fock_hamiltonian(u, v).symmetric_eigen().eigenvalues.iter().cloned().collect());
        for (a, b) in jw_e.iter().zip(&f_e) {
            // The qubit form drops the constant −U/4.
            prop_assert!((a - u / 4.0 - b).abs() < 1e-10);
        }
    }

    #[test]
    fn greens_function_bounded(u in 0.0f64..8.0, v in 0.05f64..2.0) {
        let times: Vec<f64> = (0..40).map(|n| 0.37 * n as f64).collect();
        let s = exact_greens_series(&SiamParams::half_filled(u, v), &times).unwrap();
        prop_assert_eq!(s.values()[0], 1.0);
        prop_assert!(s.values().iter().all(|g| g.abs() <= 1.0 + 1e-12));
    }
}

#[test]
fn retarded_function_is_real_and_matches_interferometric_form() {
    for (u, v) in [(0.0, 1.0), (2.0, 0.9), (4.0, 1.0), (5.5, 0.4)] {
        let p = SiamParams::half_filled(u, v);
        let times: Vec<f64> = (0..25).map(|n| 0.5 * n as f64).collect();
        let gr = exact_retarded_greens(&p, &times).unwrap();
        let ig = exact_greens_series(&p, &times).unwrap();
        for (z, g) in gr.iter().zip(ig.values()) {
            assert!(z.im.abs() < 1e-10, "imaginary part {}", z.im);
            assert!((z.re - g).abs() < 1e-10);
        }
    }
}

#[test]
fn two_pole_structure_at_half_filling() {
    use dmftq::model::exact_ground_state;
    let gs = exact_ground_state(&SiamParams::half_filled(4.0, 1.0)).unwrap();
    let mut freqs: Vec<f64> = gs.x0_poles().into_iter().filter(|(w, _)| *w > 1e-12).map(|(_, om)| om).collect();
    freqs.sort_by(f64::total_cmp);
    freqs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    assert_eq!(freqs.len(), 2);
}
