use nalgebra::DMatrix;

use crate::{Error, Result, C64};

/// Completely-positive map given by Kraus operators of dimension `2^arity`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    arity: usize,
    ops: Vec<DMatrix<C64>>,
}

/// Row-major-vectorized channel: `vec(E(ρ)) = S·vec(ρ)` with `vec(ρ)[r·d + c] = ρ[r][c]`.
#[derive(Debug, Clone)]
pub struct Superop {
    arity: usize,
    m: DMatrix<C64>,
}

const PRUNE: f64 = 1e-300;

impl KrausChannel {
    pub fn new(ops: Vec<DMatrix<C64>>) -> Result<Self> {
        let d = ops.first().map(|k| k.nrows()).ok_or_else(|| Error::InvalidParameter("empty Kraus set".into()))?;
        if !d.is_power_of_two() || d < 2 {
            return Err(Error::InvalidParameter(format!("Kraus dimension {d} is not a qubit register")));
        }
        if let Some(k) = ops.iter().find(|k| k.nrows() != d || k.ncols() != d) {
            return Err(Error::DimensionMismatch { expected: d, actual: k.nrows().max(k.ncols()) });
        }
        Ok(KrausChannel { arity: d.trailing_zeros() as usize, ops })
    }

    pub fn identity(arity: usize) -> Self {
        KrausChannel { arity, ops: vec![DMatrix::identity(1 << arity, 1 << arity)] }
    }

    pub fn unitary(u: DMatrix<C64>) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn ops(&self) -> &[DMatrix<C64>] {
        &self.ops
    }

    /// Max-entry deviation of `Σ K†K` from the identity.
    pub fn completeness_error(&self) -> f64 {
        let d = self.dim();
        let sum = self.ops.iter().fold(DMatrix::<C64>::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        (sum - DMatrix::<C64>::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.completeness_error() <= tol
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel> {
        if next.arity != self.arity {
            return Err(Error::DimensionMismatch { expected: self.arity, actual: next.arity });
        }
        let ops = next
            .ops
            .iter()
            .flat_map(|n| self.ops.iter().map(move |k| n * k))
            .filter(|m| m.norm_squared() > PRUNE)
            .collect();
        Ok(KrausChannel { arity: self.arity, ops })
    }

    /// Ideal unitary `u` followed by this channel.
    pub fn after_unitary(&self, u: &DMatrix<C64>) -> Result<KrausChannel> {
        if u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: u.nrows() });
        }
        Ok(KrausChannel { arity: self.arity, ops: self.ops.iter().map(|k| k * u).collect() })
    }

    /// `low ⊗ high`: `low` acts on local qubit 0, `high` on the qubits above it.
    pub fn tensor(low: &KrausChannel, high: &KrausChannel) -> KrausChannel {
        let ops = high
            .ops
            .iter()
            .flat_map(|h| low.ops.iter().map(move |l| h.kronecker(l)))
            .filter(|m| m.norm_squared() > PRUNE)
            .collect();
        KrausChannel { arity: low.arity + high.arity, ops }
    }

    /// Dense reference application `Σ K ρ K†`.
    pub fn apply_dense(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        self.ops.iter().fold(DMatrix::zeros(rho.nrows(), rho.ncols()), |acc, k| acc + k * rho * k.adjoint())
    }

    pub fn superop(&self) -> Superop {
        let d = self.dim();
        let m = self.ops.iter().fold(DMatrix::<C64>::zeros(d * d, d * d), |acc, k| acc + k.kronecker(&k.conjugate()));
        Superop { arity: self.arity, m }
    }
}

impl Superop {
    pub fn identity(arity: usize) -> Self {
        let d = 1usize << (2 * arity);
        Superop { arity, m: DMatrix::identity(d, d) }
    }

    pub fn unitary(u: &DMatrix<C64>) -> Self {
        Superop { arity: u.nrows().trailing_zeros() as usize, m: u.kronecker(&u.conjugate()) }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Superop) -> Superop {
        Superop { arity: self.arity, m: &next.m * &self.m }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let d = self.m.nrows();
        (&self.m - DMatrix::<C64>::identity(d, d)).iter().all(|z| z.norm() <= tol)
    }
}
