use std::f64::consts::{FRAC_PI_2, PI};

use super::circuit::{Circuit, Op};
use super::gate::{wrap_angle, Gate};
use crate::{Error, Result};

/// Default small-angle cutoff for [`cleanup_transpile`], radians.
pub const DEFAULT_ANGLE_EPS: f64 = 1e-4;

/// Rewrite into {U1, U2, U3, CNOT, Measure}; unitary preserved up to global phase.
pub fn lower_to_basis(c: &Circuit) -> Circuit {
    let ops = c
        .ops()
        .iter()
        .map(|op| {
            let gate = match op.gate {
                Gate::Rx(t) => Gate::U3(t, -FRAC_PI_2, FRAC_PI_2),
                Gate::Ry(t) => Gate::U3(t, 0.0, 0.0),
                Gate::Rz(t) => Gate::U1(t),
                Gate::H => Gate::U2(0.0, PI),
                Gate::X => Gate::U3(PI, 0.0, PI),
                Gate::Sdg => Gate::U1(-FRAC_PI_2),
                g => g,
            };
            Op::new(gate, op.qubits.clone())
        })
        .collect();
    Circuit::from_ops(c.n_qubits(), ops).expect("lowering preserves validity")
}

/// Reverse the op order and invert every gate.
pub fn inverse(c: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(c.n_qubits());
    for op in c.ops().iter().rev() {
        let g = op.gate.inverse().ok_or(Error::ContainsMeasurement)?;
        out.push(Op::new(g, op.qubits.clone()))?;
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    X,
    Y,
    Z,
    Phase,
}

fn family(g: &Gate) -> Option<(Family, f64)> {
    match *g {
        Gate::Rx(a) => Some((Family::X, a)),
        Gate::Ry(a) => Some((Family::Y, a)),
        Gate::Rz(a) => Some((Family::Z, a)),
        Gate::U1(a) => Some((Family::Phase, a)),
        _ => None,
    }
}

fn with_angle(f: Family, a: f64) -> Gate {
    match f {
        Family::X => Gate::Rx(a),
        Family::Y => Gate::Ry(a),
        Family::Z => Gate::Rz(a),
        Family::Phase => Gate::U1(a),
    }
}

fn self_inverse_pair(a: &Op, b: &Op) -> bool {
    a.qubits == b.qubits && matches!((a.gate, b.gate), (Gate::Cnot, Gate::Cnot) | (Gate::X, Gate::X) | (Gate::H, Gate::H))
}

/// Non-approximate cleanup, iterated to a fixpoint:
///
/// - rotations with |angle| < `angle_eps` (mod 2π) are dropped,
/// - consecutive same-axis rotations on one qubit are merged,
/// - consecutive identical CNOT/X/H pairs cancel.
///
/// "Consecutive" means no other op touches the involved qubits in between.
pub fn cleanup_transpile(c: &Circuit, angle_eps: f64) -> Circuit {
    let mut ops: Vec<Option<Op>> = c.ops().iter().cloned().map(Some).collect();
    loop {
        let mut changed = false;
        for slot in ops.iter_mut() {
            if let Some(op) = slot {
                if let Some((_, a)) = family(&op.gate) {
                    if wrap_angle(a).abs() < angle_eps {
                        *slot = None;
                        changed = true;
                    }
                }
            }
        }
        for i in 0..ops.len() {
            let Some(cur) = ops[i].clone() else { continue };
            let next = (i + 1..ops.len()).find(|&j| ops[j].as_ref().is_some_and(|o| o.shares_qubit(&cur)));
            let Some(j) = next else { continue };
            let nxt = ops[j].clone().unwrap();
            if self_inverse_pair(&cur, &nxt) {
                ops[i] = None;
                ops[j] = None;
                changed = true;
                continue;
            }
            if let (Some((fa, a)), Some((fb, b))) = (family(&cur.gate), family(&nxt.gate)) {
                if fa == fb && cur.qubits == nxt.qubits {
                    ops[i] = Some(Op::new(with_angle(fa, wrap_angle(a + b)), cur.qubits.clone()));
                    ops[j] = None;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Circuit::from_ops(c.n_qubits(), ops.into_iter().flatten().collect()).expect("cleanup preserves validity")
}

/// Single-qubit unitary as U1 or U3 up to global phase; `None` for the identity.
fn as_u3(m: &nalgebra::DMatrix<crate::C64>) -> Option<Gate> {
    const EPS: f64 = 1e-12;
    let theta = 2.0 * m[(1, 0)].norm().atan2(m[(0, 0)].norm());
    let (phi, lam) = if m[(0, 0)].norm() > EPS {
        let g = m[(0, 0)].arg();
        if m[(1, 0)].norm() > EPS {
            (m[(1, 0)].arg() - g, (-m[(0, 1)]).arg() - g)
        } else {
            (0.0, m[(1, 1)].arg() - g)
        }
    } else {
        let g = (-m[(0, 1)]).arg();
        (m[(1, 0)].arg() - g, 0.0)
    };
    if theta.abs() < EPS {
        let a = wrap_angle(phi + lam);
        return (a.abs() >= EPS).then_some(Gate::U1(a));
    }
    Some(Gate::U3(theta, wrap_angle(phi), wrap_angle(lam)))
}

/// Merge every maximal run of single-qubit gates on a qubit into one U1/U3
/// (exact up to global phase). Runs that multiply to the identity vanish.
pub fn fuse_single_qubit(c: &Circuit) -> Circuit {
    use nalgebra::DMatrix;
    let n = c.n_qubits();
    let mut pending: Vec<Option<DMatrix<crate::C64>>> = vec![None; n];
    let mut out = Circuit::new(n);
    let flush = |q: usize, pending: &mut Vec<Option<DMatrix<crate::C64>>>, out: &mut Circuit| {
        if let Some(g) = pending[q].take().and_then(|m| as_u3(&m)) {
            out.add(g, &[q]);
        }
    };
    for op in c.ops() {
        if op.qubits.len() == 1 && !op.gate.is_measure() {
            let q = op.qubits[0];
            let m = op.gate.matrix();
            pending[q] = Some(match pending[q].take() {
                Some(acc) => m * acc,
                None => m,
            });
        } else {
            for &q in &op.qubits {
                flush(q, &mut pending, &mut out);
            }
            out.add(op.gate, &op.qubits);
        }
    }
    for q in 0..n {
        flush(q, &mut pending, &mut out);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct GateCounts {
    pub n_single: usize,
    pub n_two: usize,
    pub depth: usize,
}

/// Gate counts by arity after lowering, plus the longest dependency chain.
/// Measurements are not counted.
pub fn gate_counts(c: &Circuit) -> GateCounts {
    let lowered = lower_to_basis(c);
    let mut level = vec![0usize; c.n_qubits()];
    let (mut n_single, mut n_two) = (0, 0);
    for op in lowered.ops() {
        if op.gate.is_measure() {
            continue;
        }
        match op.qubits.len() {
            1 => n_single += 1,
            _ => n_two += 1,
        }
        let d = op.qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for &q in &op.qubits {
            level[q] = d;
        }
    }
    GateCounts { n_single, n_two, depth: level.into_iter().max().unwrap_or(0) }
}
