use std::f64::consts::FRAC_PI_2;

use super::sinusoid::{canonical_angle, sinusoid_minimum, PROBES};
use crate::qcore::{Axis, Circuit, Gate, Op};
use crate::sim::{run_statevector, Pauli, StateVector};
use crate::{Error, Result, C64};

/// Cost 1 − |⟨0|B†|ψ_A⟩|² against a fixed target state ψ_A = A|0…0⟩.
#[derive(Debug, Clone)]
pub struct CostEvaluator {
    target: StateVector,
}

impl CostEvaluator {
    pub fn new(a: &Circuit) -> Result<Self> {
        if a.has_measurements() {
            return Err(Error::ContainsMeasurement);
        }
        Ok(CostEvaluator { target: run_statevector(a, &StateVector::zero(a.n_qubits()))? })
    }

    pub fn from_state(target: StateVector) -> Self {
        CostEvaluator { target }
    }

    pub fn n_qubits(&self) -> usize {
        self.target.n_qubits()
    }

    pub fn target(&self) -> &StateVector {
        &self.target
    }

    /// B†|ψ_A⟩.
    pub fn state_after(&self, b_dag: &Circuit) -> Result<StateVector> {
        if b_dag.n_qubits() != self.n_qubits() {
            return Err(Error::DimensionMismatch { expected: self.n_qubits(), actual: b_dag.n_qubits() });
        }
        run_statevector(b_dag, &self.target)
    }

    pub fn cost(&self, b_dag: &Circuit) -> Result<f64> {
        Ok(zero_cost(&self.state_after(b_dag)?))
    }
}

fn zero_cost(s: &StateVector) -> f64 {
    (1.0 - s.amplitudes()[0].norm_sqr()).clamp(0.0, 1.0)
}

/// 1 − |⟨0…0|B†A|0…0⟩|².
pub fn isl_cost(a: &Circuit, b_dag: &Circuit) -> Result<f64> {
    if a.n_qubits() != b_dag.n_qubits() {
        return Err(Error::DimensionMismatch { expected: a.n_qubits(), actual: b_dag.n_qubits() });
    }
    if b_dag.has_measurements() {
        return Err(Error::ContainsMeasurement);
    }
    CostEvaluator::new(a)?.cost(b_dag)
}

/// Result of an optimization pass: the circuit, its final cost and the cost
/// after every accepted single-gate update.
#[derive(Debug, Clone)]
pub struct Optimized {
    pub circuit: Circuit,
    pub cost: f64,
    pub trace: Vec<f64>,
}

/// Cost of rotating qubit `q` by `θ` between the forward state χ and the
/// backward state φ: 1 − |cos(θ/2)⟨φ|χ⟩ − i sin(θ/2)⟨φ|P|χ⟩|².
struct Slot {
    a0: C64,
    a1: [C64; 3],
}

impl Slot {
    fn new(phi: &StateVector, chi: &StateVector, q: usize) -> Self {
        let a1 = Axis::ALL.map(|axis| {
            let mut p = chi.clone();
            p.apply_1q(&pauli(axis).matrix(), q);
            phi.inner(&p)
        });
        Slot { a0: phi.inner(chi), a1 }
    }

    fn cost(&self, axis: Axis, theta: f64) -> f64 {
        let (s, c) = (theta / 2.0).sin_cos();
        let amp = self.a0 * c - C64::i() * self.a1[axis as usize] * s;
        (1.0 - amp.norm_sqr()).clamp(0.0, 1.0)
    }

    /// Closed-form best angle for `axis` from the cost at θ₀ and θ₀ ± π/2.
    fn best(&self, axis: Axis, theta0: f64) -> (f64, f64) {
        let c0 = self.cost(axis, theta0);
        let (d, _) = sinusoid_minimum(c0, self.cost(axis, theta0 + PROBES[0]), self.cost(axis, theta0 + PROBES[1]));
        let theta = canonical_angle(theta0 + d);
        let c = self.cost(axis, theta);
        if c <= c0 {
            (theta, c)
        } else {
            (theta0, c0)
        }
    }
}

fn pauli(axis: Axis) -> Pauli {
    match axis {
        Axis::X => Pauli::X,
        Axis::Y => Pauli::Y,
        Axis::Z => Pauli::Z,
    }
}

/// φ_k = (g_{k+1} ⋯ g_m)†|0⟩ for every k in `positions`.
fn backward_states(ops: &[Op], n: usize, positions: &[usize]) -> Result<Vec<Option<StateVector>>> {
    let mut out = vec![None; ops.len()];
    let Some(&first) = positions.iter().min() else { return Ok(out) };
    let mut state = StateVector::zero(n);
    for k in (first..ops.len()).rev() {
        if positions.contains(&k) {
            out[k] = Some(state.clone());
        }
        let inv = ops[k].gate.inverse().ok_or(Error::ContainsMeasurement)?;
        state.apply_gate(&inv, &ops[k].qubits)?;
    }
    Ok(out)
}

fn relative_gain(before: f64, after: f64) -> f64 {
    if before <= 0.0 {
        0.0
    } else {
        (before - after) / before
    }
}

/// One forward pass over `positions`, choosing a new gate at each via `update`.
fn sweep<F>(eval: &CostEvaluator, c: &Circuit, positions: &[usize], trace: &mut Vec<f64>, mut update: F) -> Result<Circuit>
where
    F: FnMut(&Slot, Gate) -> (Gate, f64),
{
    let n = eval.n_qubits();
    let phis = backward_states(c.ops(), n, positions)?;
    let mut ops = c.ops().to_vec();
    let mut chi = eval.target().clone();
    for (k, op) in ops.iter_mut().enumerate() {
        if let Some(phi) = &phis[k] {
            let slot = Slot::new(phi, &chi, op.qubits[0]);
            let (g, cost) = update(&slot, op.gate);
            op.gate = g;
            trace.push(cost);
        }
        chi.apply_gate(&op.gate, &op.qubits)?;
    }
    Circuit::from_ops(n, ops)
}

fn rotation_positions(c: &Circuit) -> Vec<usize> {
    c.ops().iter().enumerate().filter(|(_, op)| op.gate.as_rotation().is_some()).map(|(k, _)| k).collect()
}

/// Rotosolve: closed-form angle updates over every rotation gate of `b_dag`,
/// axes fixed, sweeping until the relative gain of a sweep drops below `tol`.
pub fn rotosolve(b_dag: &Circuit, eval: &CostEvaluator, tol: f64, max_sweeps: usize) -> Result<Optimized> {
    let positions = rotation_positions(b_dag);
    let mut circuit = b_dag.clone();
    let mut cost = eval.cost(&circuit)?;
    let mut trace = Vec::new();
    for _ in 0..max_sweeps {
        if positions.is_empty() || cost <= 0.0 {
            break;
        }
        circuit = sweep(eval, &circuit, &positions, &mut trace, |slot, g| {
            let (axis, theta0) = g.as_rotation().expect("rotation position");
            let (theta, c) = slot.best(axis, theta0);
            (Gate::rotation(axis, theta), c)
        })?;
        let after = eval.cost(&circuit)?;
        let gain = relative_gain(cost, after);
        cost = after;
        if gain < tol {
            break;
        }
    }
    Ok(Optimized { circuit, cost, trace })
}

/// A CNOT with one rotation on each qubit before and after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedLayer {
    pub control: usize,
    pub target: usize,
    /// Before-control, before-target, after-control, after-target.
    pub rotations: [(Axis, f64); 4],
}

impl DressedLayer {
    /// Identity layer: zero-angle z rotations.
    pub fn new(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "dressed CNOT needs distinct qubits");
        DressedLayer { control, target, rotations: [(Axis::Z, 0.0); 4] }
    }

    pub fn append_to(&self, c: &mut Circuit) {
        let [r0, r1, r2, r3] = self.rotations;
        c.rot(r0.0, self.control, r0.1).rot(r1.0, self.target, r1.1);
        c.cx(self.control, self.target);
        c.rot(r2.0, self.control, r2.1).rot(r3.0, self.target, r3.1);
    }

    /// Offsets of the four rotations within [`append_to`](Self::append_to)'s output.
    const SLOTS: [usize; 4] = [0, 1, 3, 4];
}

/// Rotoselect on a layer appended after `context`: each of the four rotations
/// takes the best (axis, angle) over x, y, z, cycling until the relative gain
/// of a cycle drops below `tol`.
pub fn rotoselect(
    context: &Circuit,
    layer: DressedLayer,
    eval: &CostEvaluator,
    tol: f64,
    max_cycles: usize,
) -> Result<(DressedLayer, Optimized)> {
    let base = context.len();
    let positions = DressedLayer::SLOTS.map(|s| base + s);
    let build = |l: &DressedLayer| {
        let mut c = context.clone();
        l.append_to(&mut c);
        c
    };
    let mut layer = layer;
    let mut circuit = build(&layer);
    let mut cost = eval.cost(&circuit)?;
    let mut trace = Vec::new();
    for _ in 0..max_cycles {
        if cost <= 0.0 {
            break;
        }
        circuit = sweep(eval, &circuit, &positions, &mut trace, |slot, g| {
            let (axis0, theta0) = g.as_rotation().expect("rotation position");
            let mut best = (axis0, theta0, slot.cost(axis0, theta0));
            for axis in Axis::ALL {
                let c0 = slot.cost(axis, 0.0);
                let (d, _) = sinusoid_minimum(c0, slot.cost(axis, FRAC_PI_2), slot.cost(axis, -FRAC_PI_2));
                let theta = canonical_angle(d);
                let c = slot.cost(axis, theta);
                if c < best.2 {
                    best = (axis, theta, c);
                }
            }
            (Gate::rotation(best.0, best.1), best.2)
        })?;
        for (i, &k) in positions.iter().enumerate() {
            layer.rotations[i] = circuit.ops()[k].gate.as_rotation().expect("rotation position");
        }
        let after = eval.cost(&circuit)?;
        let gain = relative_gain(cost, after);
        cost = after;
        if gain < tol {
            break;
        }
    }
    Ok((layer, Optimized { circuit, cost, trace }))
}
