use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::circuit::{greens_prefix, greens_tail, ANCILLA, N_GREENS};
use super::series::GreensSeries;
use crate::model::{exact_ground_state, state_prep_circuit, trotter_step_circuit, vqe_ground_state, SiamParams, N_WORK};
use crate::noise::{NoiseModel, NoiseParams};
use crate::par::{self, derive_seed, Exec};
use crate::qcore::{lower_to_basis, Basis, Circuit};
use crate::sim::{evolve_density, run_statevector, sample_from_expectation, DensityMatrix, QubitExpectation, StateVector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Statevector,
    Density,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "statevector" => Ok(Backend::Statevector),
            "density" => Ok(Backend::Density),
            _ => Err(Error::InvalidParameter(format!("unknown backend '{s}'"))),
        }
    }
}

/// How the work register is brought into the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundStatePrep {
    /// Multiplexed-rotation preparation of the exact eigenvector.
    Exact,
    /// Rotosolve-optimized RY ansatz with the given number of layers.
    Vqe { layers: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureConfig {
    pub backend: Backend,
    pub noise: NoiseParams,
    /// Shots per τ point; density backend only.
    pub shots: u64,
    pub seed: u64,
    pub basis: Basis,
    pub prep: GroundStatePrep,
    pub exec: Exec,
}

impl MeasureConfig {
    pub fn statevector() -> Self {
        MeasureConfig {
            backend: Backend::Statevector,
            noise: NoiseParams::ideal(),
            shots: 0,
            seed: 0,
            basis: Basis::Z,
            prep: GroundStatePrep::Exact,
            exec: Exec::default(),
        }
    }

    pub fn density(noise: NoiseParams, shots: u64, seed: u64) -> Self {
        MeasureConfig { backend: Backend::Density, noise, shots, seed, ..Self::statevector() }
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        match self.backend {
            Backend::Statevector if !self.noise.is_ideal() => {
                Err(Error::InvalidParameter("statevector backend cannot apply noise; use the density backend".into()))
            }
            Backend::Density if self.shots == 0 => Err(Error::InvalidParameter("density backend needs shots ≥ 1".into())),
            _ => Ok(()),
        }
    }
}

/// Work-register ground-state circuit for `p`.
pub fn ground_state_circuit(p: &SiamParams, prep: GroundStatePrep, seed: u64) -> Result<Circuit> {
    match prep {
        GroundStatePrep::Exact => state_prep_circuit(exact_ground_state(p)?.state.amplitudes()),
        GroundStatePrep::Vqe { layers } => Ok(vqe_ground_state(p, layers, seed)?.circuit),
    }
}

/// Simulation state after a shared prefix.
#[derive(Clone)]
enum Prepared {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

struct Runner<'a> {
    cfg: &'a MeasureConfig,
    model: Option<NoiseModel>,
    tail: Circuit,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a MeasureConfig) -> Result<Self> {
        cfg.validate()?;
        let model = match cfg.backend {
            Backend::Density => Some(NoiseModel::new(&cfg.noise)?),
            Backend::Statevector => None,
        };
        let tail = match cfg.backend {
            Backend::Density => lower_to_basis(&greens_tail(cfg.basis)),
            Backend::Statevector => greens_tail(cfg.basis).split_measurements().0,
        };
        Ok(Runner { cfg, model, tail })
    }

    fn initial(&self) -> Prepared {
        match self.model {
            Some(_) => Prepared::Mixed(DensityMatrix::zero(N_GREENS)),
            None => Prepared::Pure(StateVector::zero(N_GREENS)),
        }
    }

    fn advance(&self, state: &mut Prepared, c: &Circuit) -> Result<()> {
        match (state, &self.model) {
            (Prepared::Pure(psi), _) => *psi = run_statevector(c, psi)?,
            (Prepared::Mixed(rho), Some(m)) => evolve_density(rho, &lower_to_basis(c), m)?,
            (Prepared::Mixed(_), None) => unreachable!("density state without noise model"),
        }
        Ok(())
    }

    /// Ancilla estimate and its standard error for one τ point.
    fn finish(&self, state: &Prepared, point: u64) -> Result<(f64, f64)> {
        match (state, &self.model) {
            (Prepared::Pure(psi), _) => Ok((run_statevector(&self.tail, psi)?.qubit_expectation(ANCILLA, self.cfg.basis), 0.0)),
            (Prepared::Mixed(rho), Some(m)) => {
                let mut out = DensityMatrix::clone(rho);
                evolve_density(&mut out, &self.tail, m)?;
                let exact = out.qubit_expectation(ANCILLA, self.cfg.basis);
                let est = sample_from_expectation(exact, self.cfg.shots, derive_seed(self.cfg.seed, &[point]));
                Ok((est, ((1.0 - est * est).max(0.0) / self.cfg.shots as f64).sqrt()))
            }
            (Prepared::Mixed(_), None) => unreachable!("density state without noise model"),
        }
    }
}

fn collect(dt: f64, points: Vec<(f64, f64)>) -> Result<GreensSeries> {
    let n = points.len();
    let (values, stderr) = points.into_iter().unzip();
    GreensSeries::new((0..n).map(|i| i as f64 * dt).collect(), values, stderr)
}

fn check_grid(dt: f64, n_steps: usize) -> Result<()> {
    if n_steps == 0 || !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("need n_steps ≥ 1 and dt > 0, got {n_steps}, {dt}")));
    }
    Ok(())
}

/// iG(τₙ) for τₙ = n·dt, n = 0..=n_steps, from Green's circuits with n Trotter steps.
///
/// Circuit n is circuit n−1's prefix plus one Trotter step, so the prefix state
/// is advanced once per step and each point only runs the closing ancilla
/// operations. The τ = 0 point is 1 by normalization.
pub fn measure_series(p: &SiamParams, dt: f64, n_steps: usize, cfg: &MeasureConfig) -> Result<GreensSeries> {
    check_grid(dt, n_steps)?;
    let runner = Runner::new(cfg)?;
    let gs = ground_state_circuit(p, cfg.prep, cfg.seed)?;
    let step = trotter_step_circuit(p, dt)?.embed(N_GREENS, 1)?;

    let mut state = runner.initial();
    runner.advance(&mut state, &greens_prefix(&gs, &Circuit::new(N_WORK))?)?;
    let mut prepared = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        runner.advance(&mut state, &step)?;
        prepared.push(state.clone());
    }
    let mut points = vec![(1.0, 0.0)];
    let rest: Result<Vec<_>> = par::map_range(cfg.exec, n_steps, |i| runner.finish(&prepared[i], i as u64 + 1)).into_iter().collect();
    points.extend(rest?);
    collect(dt, points)
}

/// iG(τₙ) from externally supplied 5-qubit prefixes (e.g. recompiled circuits),
/// `prefixes[n−1]` preparing the state for τₙ = n·dt.
pub fn measure_prefixes(prefixes: &[Circuit], dt: f64, cfg: &MeasureConfig) -> Result<GreensSeries> {
    check_grid(dt, prefixes.len())?;
    let runner = Runner::new(cfg)?;
    if let Some(c) = prefixes.iter().find(|c| c.n_qubits() != N_GREENS || c.has_measurements()) {
        return Err(Error::InvalidCircuit(format!("prefix must be an unmeasured {N_GREENS}-qubit circuit, got {} qubits", c.n_qubits())));
    }
    let rest: Result<Vec<_>> = par::map_range(cfg.exec, prefixes.len(), |i| {
        let mut state = runner.initial();
        runner.advance(&mut state, &prefixes[i])?;
        runner.finish(&state, i as u64 + 1)
    })
    .into_iter()
    .collect();
    let mut points = vec![(1.0, 0.0)];
    points.extend(rest?);
    collect(dt, points)
}
