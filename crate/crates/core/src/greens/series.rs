use std::io::Write;

use serde::Serialize;

use crate::{Error, Result};

/// Time-sampled iG(τ). `times[0] = 0` and `values[0] = 1` by normalization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreensSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    stderr: Vec<f64>,
}

impl GreensSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, stderr: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.len() != stderr.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), actual: values.len().max(stderr.len()) });
        }
        if times.first() != Some(&0.0) {
            return Err(Error::InvalidParameter("series must start at τ = 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("times must be strictly increasing".into()));
        }
        if values.iter().chain(&stderr).any(|x| !x.is_finite()) || stderr.iter().any(|s| *s < 0.0) {
            return Err(Error::InvalidParameter("non-finite value or negative stderr".into()));
        }
        let mut s = GreensSeries { times, values, stderr };
        s.values[0] = 1.0;
        s.stderr[0] = 0.0;
        Ok(s)
    }

    /// Series on the uniform grid τₙ = n·dt without error bars.
    pub fn uniform(dt: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new((0..n).map(|i| i as f64 * dt).collect(), values, vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn stderr(&self) -> &[f64] {
        &self.stderr
    }

    pub fn has_errors(&self) -> bool {
        self.stderr.iter().any(|s| *s > 0.0)
    }

    pub fn max_abs_diff(&self, other: &GreensSeries) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "tau,iG,stderr")?;
        for i in 0..self.len() {
            writeln!(w, "{},{},{}", self.times[i], self.values[i], self.stderr[i])?;
        }
        Ok(())
    }
}
