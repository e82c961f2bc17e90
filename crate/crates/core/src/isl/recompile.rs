use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::entanglement::entanglement_of_formation;
use super::optimize::{rotoselect, rotosolve, CostEvaluator, DressedLayer};
use crate::greens::{ground_state_circuit, greens_prefix, GroundStatePrep, N_GREENS};
use crate::model::{trotter_step_circuit, SiamParams};
use crate::par::derive_seed;
use crate::qcore::{cleanup_transpile, fuse_single_qubit, gate_counts, inverse, Axis, Basis, Circuit, GateCounts, DEFAULT_ANGLE_EPS};
use crate::sim::{DensityMatrix, QubitExpectation, StateVector};
use crate::{Error, Result};

/// Pairwise entanglement below this counts as none.
pub const ENTANGLEMENT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IslConfig {
    pub cost_threshold: f64,
    pub sweep_improvement_tol: f64,
    pub angle_eps: f64,
    pub max_layers: usize,
    /// Cap on rotoselect cycles and rotosolve sweeps per layer.
    pub max_sweeps: usize,
    /// Fresh attempts after `max_layers` is exhausted.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for IslConfig {
    fn default() -> Self {
        IslConfig {
            cost_threshold: 1e-3,
            sweep_improvement_tol: 0.01,
            angle_eps: DEFAULT_ANGLE_EPS,
            max_layers: 50,
            max_sweeps: 200,
            restarts: 3,
            seed: 0,
        }
    }
}

impl IslConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cost_threshold > 0.0 && self.cost_threshold < 1.0) {
            return Err(Error::InvalidParameter(format!("cost_threshold {} not in (0, 1)", self.cost_threshold)));
        }
        if !(self.sweep_improvement_tol >= 0.0) || !(self.angle_eps >= 0.0) {
            return Err(Error::InvalidParameter("tolerances must be nonnegative".into()));
        }
        if self.max_layers == 0 || self.max_sweeps == 0 {
            return Err(Error::InvalidParameter("max_layers and max_sweeps must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// Recompiled circuit B with |⟨ψ_A|ψ_B⟩|² = 1 − cost.
#[derive(Debug, Clone)]
pub struct IslResult {
    pub circuit: Circuit,
    /// B† as optimized, before inversion and single-qubit fusion.
    pub b_dag: Circuit,
    pub layers: usize,
    pub cost: f64,
    /// Cost after each accepted layer.
    pub layer_costs: Vec<f64>,
    /// Gate counts of the input circuit A.
    pub input_counts: GateCounts,
}

impl IslResult {
    pub fn counts(&self) -> GateCounts {
        gate_counts(&self.circuit)
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Control and target for the next layer.
///
/// The pair with the largest entanglement of formation wins; without any
/// pairwise entanglement, or when that pair was used by the previous layer,
/// the two qubits with the largest ⟨σz⟩ are taken, skipping the previous
/// pair. Ties go to the lowest indices; the lower index is the control.
pub fn select_pair(state: &StateVector, previous: Option<(usize, usize)>) -> (usize, usize) {
    rank_pairs(state, previous)[0]
}

/// Every pair except `previous`, in preference order; the head is [`select_pair`].
pub(crate) fn rank_pairs(state: &StateVector, previous: Option<(usize, usize)>) -> Vec<(usize, usize)> {
    let n = state.n_qubits();
    assert!(n >= 2, "pair selection needs at least two qubits");
    let previous = previous.map(|(a, b)| ordered(a, b));
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();

    let mut best: Option<((usize, usize), f64)> = None;
    for &(a, b) in &pairs {
        let rho = DensityMatrix::from_matrix(&state.reduced_pair(a, b));
        let e = rho.and_then(|r| entanglement_of_formation(&r)).unwrap_or(0.0);
        if e >= ENTANGLEMENT_EPS && best.is_none_or(|(_, be)| e > be) {
            best = Some(((a, b), e));
        }
    }
    let head = best.map(|(p, _)| p).filter(|&p| Some(p) != previous);

    let z: Vec<f64> = (0..n).map(|q| state.qubit_expectation(q, Basis::Z)).collect();
    let mut rest: Vec<(usize, usize)> = pairs.into_iter().filter(|&p| Some(p) != previous && Some(p) != head).collect();
    // stable sort keeps index order among ties
    rest.sort_by(|&(a, b), &(c, d)| {
        let (s, t) = (z[a] + z[b], z[c] + z[d]);
        if (s - t).abs() <= 1e-12 {
            std::cmp::Ordering::Equal
        } else {
            t.total_cmp(&s)
        }
    });
    head.into_iter().chain(rest).collect()
}

fn random_layer(control: usize, target: usize, rng: &mut ChaCha8Rng) -> DressedLayer {
    let mut layer = DressedLayer::new(control, target);
    for r in &mut layer.rotations {
        *r = (Axis::ALL[rng.random_range(0..3)], rng.random_range(-std::f64::consts::PI..std::f64::consts::PI));
    }
    layer
}

/// Grows, optimizes and cleans one layer; returns B† and its cost.
fn grow(b_dag: &Circuit, layer: DressedLayer, eval: &CostEvaluator, cfg: &IslConfig) -> Result<(Circuit, f64)> {
    let (_, sel) = rotoselect(b_dag, layer, eval, cfg.sweep_improvement_tol, cfg.max_sweeps)?;
    let solved = rotosolve(&sel.circuit, eval, cfg.sweep_improvement_tol, cfg.max_sweeps)?;
    let cleaned = cleanup_transpile(&solved.circuit, cfg.angle_eps);
    let cost = eval.cost(&cleaned)?;
    Ok((cleaned, cost))
}

/// Attempts at a layer that makes no progress from its zero-angle start.
const STALL_RETRIES: u64 = 3;

/// Incremental structural learning: approximate A|0…0⟩ by a short circuit B.
///
/// Layers of dressed CNOTs are added to B† until 1 − |⟨0|B†A|0⟩|² falls below
/// the threshold; B is the inverse of B† with single-qubit runs fused. If
/// `max_layers` runs out, up to `restarts` further attempts start every layer
/// from seeded random angles instead of zero.
pub fn isl_recompile(a: &Circuit, cfg: &IslConfig) -> Result<IslResult> {
    cfg.validate()?;
    let eval = CostEvaluator::new(a)?;
    let mut best_cost = f64::INFINITY;
    let mut layers = 0;
    for attempt in 0..=cfg.restarts {
        match learn(&eval, cfg, attempt as u64) {
            Ok((b_dag, layer_costs)) => {
                let circuit = fuse_single_qubit(&inverse(&b_dag)?);
                let cost = eval.cost(&inverse(&circuit)?)?;
                return Ok(IslResult { circuit, b_dag, layers: layer_costs.len(), cost, layer_costs, input_counts: gate_counts(a) });
            }
            Err(Error::Recompile { layers: l, best_cost: c }) => {
                if c < best_cost {
                    (best_cost, layers) = (c, l);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Recompile { layers, best_cost })
}

/// One layer-growing pass; returns B† and the cost after each layer.
fn learn(eval: &CostEvaluator, cfg: &IslConfig, attempt: u64) -> Result<(Circuit, Vec<f64>)> {
    let n = eval.n_qubits();
    let mut b_dag = Circuit::new(n);
    let mut cost = eval.cost(&b_dag)?;
    let mut layer_costs = Vec::new();
    let mut previous = None;
    let mut best_cost = cost;

    while cost > cfg.cost_threshold {
        let layer_index = layer_costs.len();
        if layer_index == cfg.max_layers || n < 2 {
            return Err(Error::Recompile { layers: layer_index, best_cost });
        }
        let ranked = rank_pairs(&eval.state_after(&b_dag)?, previous);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[attempt, layer_index as u64]));
        let (c, t) = ranked[0];
        let first = if attempt == 0 { DressedLayer::new(c, t) } else { random_layer(c, t, &mut rng) };
        let (mut next, mut next_cost) = grow(&b_dag, first, eval, cfg)?;
        let mut pair = (c, t);
        // A stalled layer (typically on the cost = 1 plateau, where every
        // single-angle probe is flat) is retried from random angles, then on
        // the next-ranked pairs.
        'search: for (i, &(c, t)) in ranked.iter().enumerate() {
            for retry in 0..=STALL_RETRIES {
                if next_cost < cost * (1.0 - cfg.sweep_improvement_tol) {
                    break 'search;
                }
                if i == 0 && retry == 0 {
                    continue;
                }
                let layer = if retry == 0 { DressedLayer::new(c, t) } else { random_layer(c, t, &mut rng) };
                let (cand, cand_cost) = grow(&b_dag, layer, eval, cfg)?;
                if cand_cost < next_cost {
                    (next, next_cost, pair) = (cand, cand_cost, (c, t));
                }
            }
        }
        // layers are kept even without progress: the CNOT alone moves the state
        b_dag = next;
        cost = next_cost;
        best_cost = best_cost.min(cost);
        layer_costs.push(cost);
        previous = Some(pair);
    }
    Ok((b_dag, layer_costs))
}

/// Chained recompilation of the ancilla-dressed Green's-function prefix.
///
/// RC₁ recompiles ground-state preparation, the ancilla H and CX and one
/// Trotter step on all five qubits; RCₙ₊₁ recompiles RCₙ followed by one
/// exact Trotter step. Element n−1 prepares the state for τ = n·dt.
pub fn incremental_chain(p: &SiamParams, dt: f64, n_steps: usize, cfg: &IslConfig) -> Result<Vec<IslResult>> {
    if n_steps == 0 {
        return Err(Error::InvalidParameter("chain needs at least one step".into()));
    }
    let gs = ground_state_circuit(p, GroundStatePrep::Exact, cfg.seed)?;
    let step = trotter_step_circuit(p, dt)?;
    let step5 = step.embed(N_GREENS, 1)?;
    let mut out: Vec<IslResult> = Vec::with_capacity(n_steps);
    for n in 1..=n_steps {
        let a = match out.last() {
            None => greens_prefix(&gs, &step)?,
            Some(prev) => prev.circuit.then(&step5)?,
        };
        let rc = isl_recompile(&a, cfg).map_err(|e| Error::Chain { step: n, source: Box::new(e) })?;
        out.push(rc);
    }
    Ok(out)
}
