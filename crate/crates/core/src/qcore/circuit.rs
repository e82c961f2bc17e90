use super::gate::{Axis, Basis, Gate};
use crate::{Error, Result};

/// One gate application.
#[derive(Debug, Clone, PartialEq)]
pub struct Op {
    pub gate: Gate,
    pub qubits: Vec<usize>,
}

impl Op {
    pub fn new(gate: Gate, qubits: Vec<usize>) -> Self {
        Op { gate, qubits }
    }

    pub fn touches(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }

    pub fn shares_qubit(&self, other: &Op) -> bool {
        self.qubits.iter().any(|q| other.qubits.contains(q))
    }
}

/// Ordered gate sequence over `n_qubits` qubits.
///
/// Construction validates that indices are in range, CNOT control and target
/// differ, and no gate follows a measurement on the same qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        assert!(n_qubits > 0, "a circuit needs at least one qubit");
        Circuit { n_qubits, ops: Vec::new() }
    }

    pub fn from_ops(n_qubits: usize, ops: Vec<Op>) -> Result<Self> {
        let mut c = Circuit::new(n_qubits);
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: Op) -> Result<()> {
        if op.qubits.len() != op.gate.arity() {
            return Err(Error::InvalidCircuit(format!(
                "{} expects {} qubit(s), got {}",
                op.gate.name(),
                op.gate.arity(),
                op.qubits.len()
            )));
        }
        if let Some(&q) = op.qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::InvalidCircuit(format!("qubit {q} out of range for {} qubits", self.n_qubits)));
        }
        if op.qubits.len() == 2 && op.qubits[0] == op.qubits[1] {
            return Err(Error::InvalidCircuit("CNOT control equals target".into()));
        }
        for a in op.gate.angles() {
            if !a.is_finite() {
                return Err(Error::InvalidCircuit(format!("non-finite angle in {}", op.gate.name())));
            }
        }
        if self.ops.iter().any(|o| o.gate.is_measure() && o.shares_qubit(&op)) {
            return Err(Error::InvalidCircuit(format!(
                "{} on qubit(s) {:?} after measurement",
                op.gate.name(),
                op.qubits
            )));
        }
        self.ops.push(op);
        Ok(())
    }

    /// Append a gate; panics on an invalid op (builder convenience).
    pub fn add(&mut self, gate: Gate, qubits: &[usize]) -> &mut Self {
        self.push(Op::new(gate, qubits.to_vec())).expect("invalid op");
        self
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.add(Gate::H, &[q])
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.add(Gate::X, &[q])
    }

    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        self.add(Gate::Cnot, &[control, target])
    }

    pub fn rx(&mut self, q: usize, angle: f64) -> &mut Self {
        self.add(Gate::Rx(angle), &[q])
    }

    pub fn ry(&mut self, q: usize, angle: f64) -> &mut Self {
        self.add(Gate::Ry(angle), &[q])
    }

    pub fn rz(&mut self, q: usize, angle: f64) -> &mut Self {
        self.add(Gate::Rz(angle), &[q])
    }

    pub fn rot(&mut self, axis: Axis, q: usize, angle: f64) -> &mut Self {
        self.add(Gate::rotation(axis, angle), &[q])
    }

    pub fn measure(&mut self, q: usize, basis: Basis) -> &mut Self {
        self.add(Gate::Measure(basis), &[q])
    }

    /// Append all ops of `other` (same width).
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, actual: other.n_qubits });
        }
        for op in &other.ops {
            self.push(op.clone())?;
        }
        Ok(())
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        let mut c = self.clone();
        c.extend(other)?;
        Ok(c)
    }

    /// Re-index onto a wider register: qubit `q` becomes `q + offset`.
    pub fn embed(&self, n_qubits: usize, offset: usize) -> Result<Circuit> {
        let ops = self
            .ops
            .iter()
            .map(|op| Op::new(op.gate, op.qubits.iter().map(|q| q + offset).collect()))
            .collect();
        Circuit::from_ops(n_qubits, ops)
    }

    pub fn has_measurements(&self) -> bool {
        self.ops.iter().any(|o| o.gate.is_measure())
    }

    /// Split off measurement ops; returns the unitary part and the measured
    /// `(qubit, basis)` pairs in order.
    pub fn split_measurements(&self) -> (Circuit, Vec<(usize, Basis)>) {
        let mut unitary = Circuit::new(self.n_qubits);
        let mut meas = Vec::new();
        for op in &self.ops {
            match op.gate {
                Gate::Measure(b) => meas.push((op.qubits[0], b)),
                _ => unitary.ops.push(op.clone()),
            }
        }
        (unitary, meas)
    }
}
