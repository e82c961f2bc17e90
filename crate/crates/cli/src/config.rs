//! Parameter records for each command and their layering.
//!
//! Every record starts from its defaults (or a `--figure` preset), then the
//! keys of the `--config` file are applied, then explicit flags. Unknown keys
//! are rejected at every stage.

use std::fmt;
use std::fs;
use std::path::Path;

use dmftq::dmft::{DmftConfig, Solver};
use dmftq::greens::{Backend, MeasureConfig};
use dmftq::isl::IslConfig;
use dmftq::noise::{preset, NoiseParams, Preset};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Bad flags, config files or parameter combinations (exit code 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_err<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(ConfigError(msg.into()).into())
}

/// Reads a JSON object from `path`.
pub fn load_file(path: Option<&Path>) -> anyhow::Result<Option<Map<String, Value>>> {
    let Some(path) = path else { return Ok(None) };
    let text = fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(Some(m)),
        Ok(_) => config_err(format!("config {} must hold a JSON object", path.display())),
        Err(e) => config_err(format!("config {}: {e}", path.display())),
    }
}

fn object<T: Serialize>(v: &T) -> Map<String, Value> {
    match serde_json::to_value(v).expect("parameter records serialize") {
        Value::Object(m) => m,
        _ => unreachable!("parameter records are structs"),
    }
}

fn decode<T: DeserializeOwned>(m: Map<String, Value>, what: &str) -> anyhow::Result<T> {
    serde_json::from_value(Value::Object(m)).map_err(|e| ConfigError(format!("{what}: {e}")).into())
}

/// Applies `layers` in order over `base`.
pub fn layer<T: Serialize + DeserializeOwned>(base: &T, layers: &[&Map<String, Value>]) -> anyhow::Result<T> {
    let mut m = object(base);
    for l in layers {
        m.extend(l.iter().map(|(k, v)| (k.clone(), v.clone())));
    }
    decode(m, "configuration")
}

/// Like [`layer`] for a record split in two flat halves; keys belonging to
/// `a` are routed there and everything else must fit `b`.
pub fn layer_split<A, B>(a: &A, b: &B, layers: &[&Map<String, Value>]) -> anyhow::Result<(A, B)>
where
    A: Serialize + DeserializeOwned,
    B: Serialize + DeserializeOwned,
{
    let (mut ma, mut mb) = (object(a), object(b));
    for l in layers {
        for (k, v) in l.iter() {
            let side = if ma.contains_key(k) { &mut ma } else { &mut mb };
            side.insert(k.clone(), v.clone());
        }
    }
    Ok((decode(ma, "configuration")?, decode(mb, "configuration")?))
}

/// Serializes both halves into one flat object for echoing.
pub fn merged<A: Serialize, B: Serialize>(a: &A, b: &B) -> Value {
    let mut m = object(a);
    m.extend(object(b));
    Value::Object(m)
}

pub fn flags<T: Serialize>(f: &T) -> Map<String, Value> {
    object(f)
}

fn noise_for(preset_name: Option<Preset>) -> anyhow::Result<NoiseParams> {
    Ok(match preset_name {
        Some(p) => preset(p)?,
        None => NoiseParams::ideal(),
    })
}

fn measure_for(backend: Backend, noise_preset: Option<Preset>, shots: u64, seed: Option<u64>) -> anyhow::Result<MeasureConfig> {
    match backend {
        Backend::Statevector => {
            if noise_preset.is_some() {
                return config_err("--noise-preset needs --backend density");
            }
            Ok(MeasureConfig::statevector())
        }
        Backend::Density => {
            let Some(seed) = seed else {
                return config_err("the density backend needs an explicit --seed");
            };
            Ok(MeasureConfig::density(noise_for(noise_preset)?, shots, seed))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FidelityMapParams {
    pub t_relax_min: f64,
    pub t_relax_max: f64,
    pub t_relax_points: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    /// Add every preset's (T_relax, λ) to the grid axes.
    pub include_presets: bool,
    pub dephasing_ratio: f64,
}

impl Default for FidelityMapParams {
    fn default() -> Self {
        FidelityMapParams {
            t_relax_min: 1e-5,
            t_relax_max: 1.0,
            t_relax_points: 21,
            lambda_min: 1e-6,
            lambda_max: 1e-2,
            lambda_points: 17,
            include_presets: true,
            dephasing_ratio: 1.0,
        }
    }
}

impl FidelityMapParams {
    pub fn figure(n: u8) -> anyhow::Result<Self> {
        match n {
            3 => Ok(Self::default()),
            _ => config_err(format!("fidelity-map reproduces figure 3 only, not {n}")),
        }
    }
}

/// Shared DMFT loop parameters for `dmft-run` and `dmft-sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DmftParams {
    pub t_star: f64,
    pub v_init: f64,
    pub dt: f64,
    pub steps: usize,
    pub backend: Backend,
    pub noise_preset: Option<Preset>,
    pub shots: u64,
    pub seed: Option<u64>,
    pub sc_tol: f64,
    pub max_iters: usize,
    pub avg_window: usize,
    pub damping: f64,
    /// Replace every Green's circuit by its ISL recompilation.
    pub isl: bool,
    pub isl_threshold: f64,
    /// Use exact time evolution instead of circuits.
    pub exact: bool,
}

impl Default for DmftParams {
    fn default() -> Self {
        let d = DmftConfig::new(0.0);
        DmftParams {
            t_star: d.t_star,
            v_init: d.v_init,
            dt: d.dt,
            steps: d.n_steps,
            backend: Backend::Statevector,
            noise_preset: None,
            shots: 75_000,
            seed: None,
            sc_tol: d.sc_tol,
            max_iters: d.max_iters,
            avg_window: d.avg_window,
            damping: d.damping,
            isl: false,
            isl_threshold: IslConfig::default().cost_threshold,
            exact: false,
        }
    }
}

impl DmftParams {
    pub fn to_config(&self, u: f64) -> anyhow::Result<DmftConfig> {
        if self.isl && self.exact {
            return config_err("--isl and --exact are mutually exclusive");
        }
        let seed = self.seed.unwrap_or(0);
        let solver = if self.exact {
            Solver::ExactDiagonalization
        } else if self.isl {
            Solver::Isl(IslConfig { cost_threshold: self.isl_threshold, seed, ..IslConfig::default() })
        } else {
            Solver::Circuit
        };
        let cfg = DmftConfig {
            t_star: self.t_star,
            v_init: self.v_init,
            dt: self.dt,
            n_steps: self.steps,
            measure: measure_for(self.backend, self.noise_preset, self.shots, self.seed)?,
            sc_tol: self.sc_tol,
            max_iters: self.max_iters,
            avg_window: self.avg_window,
            damping: self.damping,
            solver,
            ..DmftConfig::new(u)
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunPoint {
    pub u: f64,
}

impl Default for RunPoint {
    fn default() -> Self {
        RunPoint { u: 4.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepRange {
    pub u_min: f64,
    pub u_max: f64,
    pub u_step: f64,
    /// Explicit U list; overrides the range when set.
    pub us: Option<Vec<f64>>,
}

impl Default for SweepRange {
    fn default() -> Self {
        SweepRange { u_min: 1.0, u_max: 6.0, u_step: 1.0, us: None }
    }
}

impl SweepRange {
    pub fn values(&self) -> anyhow::Result<Vec<f64>> {
        if let Some(us) = &self.us {
            if us.is_empty() {
                return config_err("U list is empty");
            }
            return Ok(us.clone());
        }
        let (a, b, s) = (self.u_min, self.u_max, self.u_step);
        if !(a.is_finite() && b.is_finite() && s > 0.0 && b >= a) {
            return config_err(format!("bad U range [{a}, {b}] step {s}"));
        }
        let n = ((b - a) / s + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| ((a + i as f64 * s) * 1e9).round() / 1e9).collect())
    }
}

/// `--figure` presets for `dmft-sweep`, at desk-scale grids.
pub fn sweep_figure(n: u8) -> anyhow::Result<(SweepRange, DmftParams)> {
    let d = DmftParams::default();
    let noisy = |p: Preset, isl: bool| DmftParams {
        backend: Backend::Density,
        noise_preset: Some(p),
        seed: Some(1),
        isl,
        ..DmftParams::default()
    };
    let few = SweepRange { us: Some(vec![2.0, 3.0, 4.0]), ..SweepRange::default() };
    match n {
        4 => Ok((SweepRange { u_min: 1.0, u_max: 7.0, u_step: 0.5, us: None }, DmftParams { steps: 48, dt: 0.25, ..d })),
        6 => Ok((few, noisy(Preset::A, false))),
        7 => Ok((few, noisy(Preset::D, true))),
        _ => config_err(format!("dmft-sweep has figure presets 4, 6 and 7, not {n}")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GreensParams {
    pub u: f64,
    pub v: f64,
    pub t_star: f64,
    pub dt: f64,
    pub steps: usize,
    pub backend: Backend,
    pub noise_preset: Option<Preset>,
    pub shots: u64,
    pub seed: Option<u64>,
}

impl Default for GreensParams {
    fn default() -> Self {
        GreensParams {
            u: 4.0,
            v: 1.0,
            t_star: 1.0,
            dt: 0.5,
            steps: 24,
            backend: Backend::Statevector,
            noise_preset: None,
            shots: 75_000,
            seed: None,
        }
    }
}

impl GreensParams {
    pub fn measure(&self) -> anyhow::Result<MeasureConfig> {
        let m = measure_for(self.backend, self.noise_preset, self.shots, self.seed)?;
        m.validate()?;
        Ok(m)
    }
}
