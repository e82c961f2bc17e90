//! Line-oriented circuit text format.
//!
//! ```text
//! # qubits 5
//! H 0
//! CNOT 0,1
//! U3 2 1.5707963267948966 0 3.141592653589793
//! MEASURE 0 Z
//! ```
//!
//! One op per line: `GATE q0[,q1] [angles...]`, angles in decimal radians.
//! `#` starts a comment; a `# qubits N` comment fixes the register width,
//! otherwise it is inferred from the largest index.

use std::fmt::Write as _;

use super::circuit::{Circuit, Op};
use super::gate::{Basis, Gate};
use crate::{Error, Result};

pub fn write_circuit(c: &Circuit) -> String {
    let mut s = String::new();
    writeln!(s, "# qubits {}", c.n_qubits()).unwrap();
    for op in c.ops() {
        let qs: Vec<String> = op.qubits.iter().map(|q| q.to_string()).collect();
        write!(s, "{} {}", op.gate.name(), qs.join(",")).unwrap();
        match op.gate {
            Gate::Measure(b) => write!(s, " {b}").unwrap(),
            g => {
                for a in g.angles() {
                    // `{:?}` on f64 round-trips exactly
                    write!(s, " {a:?}").unwrap();
                }
            }
        }
        s.push('\n');
    }
    s
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut declared: Option<usize> = None;
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            let mut parts = comment.split_whitespace();
            if parts.next() == Some("qubits") {
                let n = parts
                    .next()
                    .and_then(|v| v.parse::<usize>().ok())
                    .filter(|&n| n > 0)
                    .ok_or_else(|| err("bad qubit count".into()))?;
                declared = Some(n);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let name = parts.next().unwrap().to_ascii_uppercase();
        let qubits: Vec<usize> = parts
            .next()
            .ok_or_else(|| err("missing qubit list".into()))?
            .split(',')
            .map(|q| q.parse::<usize>().map_err(|e| err(format!("bad qubit index {q:?}: {e}"))))
            .collect::<Result<_>>()?;
        let rest: Vec<&str> = parts.collect();
        let angles = || -> Result<Vec<f64>> {
            rest.iter().map(|a| a.parse::<f64>().map_err(|e| err(format!("bad angle {a:?}: {e}")))).collect()
        };
        let want = |k: usize, v: Vec<f64>| -> Result<Vec<f64>> {
            if v.len() == k {
                Ok(v)
            } else {
                Err(err(format!("{name} takes {k} angle(s), got {}", v.len())))
            }
        };
        let gate = match name.as_str() {
            "U1" => Gate::U1(want(1, angles()?)?[0]),
            "U2" => {
                let a = want(2, angles()?)?;
                Gate::U2(a[0], a[1])
            }
            "U3" => {
                let a = want(3, angles()?)?;
                Gate::U3(a[0], a[1], a[2])
            }
            "RX" => Gate::Rx(want(1, angles()?)?[0]),
            "RY" => Gate::Ry(want(1, angles()?)?[0]),
            "RZ" => Gate::Rz(want(1, angles()?)?[0]),
            "CNOT" | "CX" => {
                want(0, angles()?)?;
                Gate::Cnot
            }
            "H" | "X" | "SDG" => {
                want(0, angles()?)?;
                match name.as_str() {
                    "H" => Gate::H,
                    "X" => Gate::X,
                    _ => Gate::Sdg,
                }
            }
            "MEASURE" => match rest.as_slice() {
                [] | ["Z"] | ["z"] => Gate::Measure(Basis::Z),
                ["Y"] | ["y"] => Gate::Measure(Basis::Y),
                _ => return Err(err(format!("bad measurement basis {rest:?}"))),
            },
            other => return Err(err(format!("unknown gate {other}"))),
        };
        ops.push((line_no, Op::new(gate, qubits)));
    }
    let inferred = ops.iter().flat_map(|(_, o)| o.qubits.iter().copied()).max().map_or(1, |m| m + 1);
    let mut c = Circuit::new(declared.unwrap_or(inferred));
    for (line, op) in ops {
        c.push(op).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
    }
    Ok(c)
}
