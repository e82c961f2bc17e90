use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;

use nalgebra::DMatrix;

use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Basis {
    Z,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Gate alphabet. `Rx`/`Ry`/`Rz`/`H`/`X`/`Sdg` are convenience gates that
/// [`lower_to_basis`](super::lower_to_basis) rewrites into `U1`/`U2`/`U3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    U1(f64),
    U2(f64, f64),
    U3(f64, f64, f64),
    Cnot,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    H,
    X,
    Sdg,
    Measure(Basis),
}

impl Gate {
    pub fn rotation(axis: Axis, angle: f64) -> Gate {
        match axis {
            Axis::X => Gate::Rx(angle),
            Axis::Y => Gate::Ry(angle),
            Axis::Z => Gate::Rz(angle),
        }
    }

    pub fn as_rotation(&self) -> Option<(Axis, f64)> {
        match *self {
            Gate::Rx(a) => Some((Axis::X, a)),
            Gate::Ry(a) => Some((Axis::Y, a)),
            Gate::Rz(a) => Some((Axis::Z, a)),
            _ => None,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot => 2,
            _ => 1,
        }
    }

    pub fn is_basis(&self) -> bool {
        matches!(self, Gate::U1(_) | Gate::U2(..) | Gate::U3(..) | Gate::Cnot | Gate::Measure(_))
    }

    pub fn is_measure(&self) -> bool {
        matches!(self, Gate::Measure(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::U1(_) => "U1",
            Gate::U2(..) => "U2",
            Gate::U3(..) => "U3",
            Gate::Cnot => "CNOT",
            Gate::Rx(_) => "RX",
            Gate::Ry(_) => "RY",
            Gate::Rz(_) => "RZ",
            Gate::H => "H",
            Gate::X => "X",
            Gate::Sdg => "SDG",
            Gate::Measure(_) => "MEASURE",
        }
    }

    pub fn angles(&self) -> Vec<f64> {
        match *self {
            Gate::U1(l) => vec![l],
            Gate::U2(p, l) => vec![p, l],
            Gate::U3(t, p, l) => vec![t, p, l],
            Gate::Rx(a) | Gate::Ry(a) | Gate::Rz(a) => vec![a],
            _ => vec![],
        }
    }

    /// Unitary matrix (2×2, or 4×4 in local ordering for CNOT).
    ///
    /// Panics for `Measure`, which has no unitary.
    pub fn matrix(&self) -> DMatrix<C64> {
        let c = |re: f64, im: f64| C64::new(re, im);
        let e = |phi: f64| C64::from_polar(1.0, phi);
        match *self {
            Gate::U3(t, p, l) => u3(t, p, l),
            Gate::U2(p, l) => u3(FRAC_PI_2, p, l),
            Gate::U1(l) => DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), e(l)]),
            Gate::Rx(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                DMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
            }
            Gate::Ry(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                DMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
            }
            Gate::Rz(t) => DMatrix::from_row_slice(2, 2, &[e(-t / 2.0), c(0.0, 0.0), c(0.0, 0.0), e(t / 2.0)]),
            Gate::H => {
                let h = FRAC_1_SQRT_2;
                DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
            }
            Gate::X => DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
            Gate::Sdg => DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]),
            Gate::Cnot => {
                let mut m = DMatrix::zeros(4, 4);
                m[(0, 0)] = c(1.0, 0.0);
                m[(2, 2)] = c(1.0, 0.0);
                m[(3, 1)] = c(1.0, 0.0);
                m[(1, 3)] = c(1.0, 0.0);
                m
            }
            Gate::Measure(_) => panic!("measurement has no unitary matrix"),
        }
    }

    /// Inverse gate (up to global phase). `None` for measurements.
    pub fn inverse(&self) -> Option<Gate> {
        Some(match *self {
            Gate::U1(l) => Gate::U1(-l),
            Gate::U2(p, l) => Gate::U3(-FRAC_PI_2, -l, -p),
            Gate::U3(t, p, l) => Gate::U3(-t, -l, -p),
            Gate::Rx(a) => Gate::Rx(-a),
            Gate::Ry(a) => Gate::Ry(-a),
            Gate::Rz(a) => Gate::Rz(-a),
            Gate::Sdg => Gate::U1(FRAC_PI_2),
            g @ (Gate::Cnot | Gate::H | Gate::X) => g,
            Gate::Measure(_) => return None,
        })
    }
}

fn u3(theta: f64, phi: f64, lambda: f64) -> DMatrix<C64> {
    let (s, c) = (theta / 2.0).sin_cos();
    DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(c, 0.0),
            -C64::from_polar(s, lambda),
            C64::from_polar(s, phi),
            C64::from_polar(c, phi + lambda),
        ],
    )
}

/// Wrap an angle into (−π, π].
pub(crate) fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Z => "Z",
            Basis::Y => "Y",
        })
    }
}
