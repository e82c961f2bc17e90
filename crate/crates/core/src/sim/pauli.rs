use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> DMatrix<C64> {
        let o = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let v = match self {
            Pauli::I => [one, o, o, one],
            Pauli::X => [o, one, one, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [one, o, o, -one],
        };
        DMatrix::from_row_slice(2, 2, &v)
    }

    /// Action on a single bit: `P|b⟩ = phase·|b'⟩`.
    #[inline]
    pub(crate) fn act(self, bit: usize) -> (usize, C64) {
        match (self, bit) {
            (Pauli::I, b) => (b, C64::new(1.0, 0.0)),
            (Pauli::X, b) => (b ^ 1, C64::new(1.0, 0.0)),
            (Pauli::Y, 0) => (1, C64::new(0.0, 1.0)),
            (Pauli::Y, _) => (0, C64::new(0.0, -1.0)),
            (Pauli::Z, 0) => (0, C64::new(1.0, 0.0)),
            (Pauli::Z, _) => (1, C64::new(-1.0, 0.0)),
        }
    }

    fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of Paulis; entry `k` acts on qubit `k`.
///
/// The textual form lists qubit 0 first: `"XIZ"` is X on qubit 0, Z on qubit 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString(vec![Pauli::I; n])
    }

    /// Identity except for the listed `(qubit, pauli)` factors.
    pub fn sparse(n: usize, factors: &[(usize, Pauli)]) -> Self {
        let mut p = Self::identity(n);
        for &(q, f) in factors {
            p.0[q] = f;
        }
        p
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `P|j⟩ = phase·|j'⟩`.
    #[inline]
    pub fn apply_to_basis(&self, j: usize) -> (usize, C64) {
        let mut out = j;
        let mut phase = C64::new(1.0, 0.0);
        for (q, p) in self.0.iter().enumerate() {
            if *p == Pauli::I {
                continue;
            }
            let (b, ph) = p.act((j >> q) & 1);
            out = (out & !(1 << q)) | (b << q);
            phase *= ph;
        }
        (out, phase)
    }

    /// Dense `2^n × 2^n` matrix, built from the per-basis action.
    pub fn matrix(&self) -> DMatrix<C64> {
        let d = 1usize << self.len();
        let mut m = DMatrix::zeros(d, d);
        for j in 0..d {
            let (i, ph) = self.apply_to_basis(j);
            m[(i, j)] = ph;
        }
        m
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::MalformedPauli(s.to_string())))
            .collect::<Result<Vec<_>>>()
            .and_then(|v| if v.is_empty() { Err(Error::MalformedPauli(s.to_string())) } else { Ok(PauliString(v)) })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            f.write_str(match p {
                Pauli::I => "I",
                Pauli::X => "X",
                Pauli::Y => "Y",
                Pauli::Z => "Z",
            })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::embed;

    #[test]
    fn parse_and_display() {
        let p: PauliString = "xIzY".parse().unwrap();
        assert_eq!(p.0, vec![Pauli::X, Pauli::I, Pauli::Z, Pauli::Y]);
        assert_eq!(p.to_string(), "XIZY");
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }

    #[test]
    fn matrix_matches_kron_embedding() {
        let p: PauliString = "YXZ".parse().unwrap();
        let mut expect = DMatrix::<C64>::identity(8, 8);
        for (q, f) in p.0.iter().enumerate() {
            expect = embed(&f.matrix(), &[q], 3) * expect;
        }
        assert!((p.matrix() - expect).iter().all(|z| z.norm() < 1e-15));
    }
}
