use serde::{Deserialize, Serialize};

use crate::qcore::Gate;
use crate::{Error, Result};

/// Operation durations in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Durations {
    /// One X90 pulse; U2 takes one, U3 two, U1 none.
    pub t_x90: f64,
    pub t_cx: f64,
    pub t_meas: f64,
}

impl Default for Durations {
    fn default() -> Self {
        Durations { t_x90: 50e-9, t_cx: 300e-9, t_meas: 1e-6 }
    }
}

impl Durations {
    pub fn of(&self, gate: &Gate) -> f64 {
        match gate {
            Gate::U1(_) => 0.0,
            Gate::U2(..) => self.t_x90,
            Gate::U3(..) => 2.0 * self.t_x90,
            Gate::Cnot => self.t_cx,
            Gate::Measure(_) => self.t_meas,
            _ => 0.0,
        }
    }
}

/// Physical noise parameters. `t_relax = ∞` disables thermal relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    #[serde(with = "inf_as_null")]
    pub t_relax: f64,
    /// Pure-dephasing time in units of `t_relax`.
    #[serde(default = "one")]
    pub dephasing_ratio: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(default)]
    pub durations: Durations,
    #[serde(default)]
    pub readout_flip: f64,
}

fn one() -> f64 {
    1.0
}

impl NoiseParams {
    pub fn ideal() -> Self {
        NoiseParams {
            t_relax: f64::INFINITY,
            dephasing_ratio: 1.0,
            lambda1: 0.0,
            lambda2: 0.0,
            durations: Durations::default(),
            readout_flip: 0.0,
        }
    }

    /// Single-λ parameter set with default durations.
    pub fn new(t_relax: f64, lambda: f64) -> Result<Self> {
        let p = NoiseParams { t_relax, lambda1: lambda, lambda2: lambda, ..Self::ideal() };
        p.validate()?;
        Ok(p)
    }

    pub fn is_ideal(&self) -> bool {
        self.t_relax.is_infinite() && self.lambda1 == 0.0 && self.lambda2 == 0.0 && self.readout_flip == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_relax > 0.0) {
            return Err(Error::InvalidParameter(format!("t_relax must be positive, got {}", self.t_relax)));
        }
        if !(self.dephasing_ratio > 0.0) {
            return Err(Error::InvalidParameter(format!("dephasing_ratio must be positive, got {}", self.dephasing_ratio)));
        }
        for p in [self.lambda1, self.lambda2, self.readout_flip] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
        }
        let d = &self.durations;
        if [d.t_x90, d.t_cx, d.t_meas].iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(Error::InvalidParameter("durations must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(NoiseParams::new(0.0, 0.1).is_err());
        assert!(NoiseParams::new(1.0, 1.5).is_err());
        assert!(NoiseParams::new(f64::INFINITY, 0.0).unwrap().is_ideal());
    }

    #[test]
    fn default_durations_follow_pulse_counts() {
        let d = Durations::default();
        assert_eq!(d.of(&Gate::U1(0.3)), 0.0);
        assert_eq!(d.of(&Gate::U2(0.0, 0.0)), 50e-9);
        assert_eq!(d.of(&Gate::U3(0.0, 0.0, 0.0)), 100e-9);
        assert_eq!(d.of(&Gate::Cnot), 300e-9);
    }
}
