//! Two-site DMFT self-consistency: measure iG(τ), fit two poles, compute the
//! quasiparticle weight and update the hybridization until it stops moving.

use std::io::Write;

use serde::Serialize;

use crate::greens::{fit_series_with, measure_prefixes, measure_series, Backend, FitOptions, GreensFit, GreensSeries, MeasureConfig};
use crate::isl::{incremental_chain, IslConfig};
use crate::model::{exact_greens_series, SiamParams};
use crate::par::{self, derive_seed, Exec};
use crate::{Error, Result};

/// Quasiparticle weights below this are treated as the insulating fixpoint Z = 0.
pub const Z_FLOOR: f64 = 1e-8;

/// Z = [V⁴(α/ω₁⁴ + (1−α)/ω₂⁴)]⁻¹.
pub fn quasiparticle_weight(fit: &GreensFit, v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::InvalidParameter(format!("hybridization must be positive, got {v}")));
    }
    if !(fit.omega1 > 0.0 && fit.omega2 > 0.0) {
        return Err(Error::Pole(format!("fitted frequencies ({}, {})", fit.omega1, fit.omega2)));
    }
    let s = fit.alpha / fit.omega1.powi(4) + (1.0 - fit.alpha) / fit.omega2.powi(4);
    let z = 1.0 / (v.powi(4) * s);
    if !z.is_finite() {
        return Err(Error::Pole(format!("Z = {z}")));
    }
    Ok(z)
}

/// Self-consistent hybridization V = √Z·t*.
pub fn update_hybridization(z: f64, t_star: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::InvalidParameter(format!("quasiparticle weight must be positive, got {z}")));
    }
    Ok(z.sqrt() * t_star)
}

/// Source of iG(τ) inside the loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Solver {
    /// Trotterized Green's circuits on the configured backend.
    Circuit,
    /// Exact time evolution (oracle).
    ExactDiagonalization,
    /// Chained ISL recompilations, executed on the configured backend.
    Isl(IslConfig),
}

#[derive(Debug, Clone)]
pub struct DmftConfig {
    pub u: f64,
    pub t_star: f64,
    pub v_init: f64,
    pub dt: f64,
    pub n_steps: usize,
    /// Backend, noise, shots, seed and ground-state preparation.
    pub measure: MeasureConfig,
    pub sc_tol: f64,
    /// Iterations allowed before the first convergence hit.
    pub max_iters: usize,
    /// Extra iterations averaged after the first hit (noisy backends and ISL).
    pub avg_window: usize,
    /// Update V ← (1−η)V + η·V_new.
    pub damping: f64,
    pub solver: Solver,
    pub fit: FitOptions,
}

impl DmftConfig {
    pub fn new(u: f64) -> Self {
        DmftConfig {
            u,
            t_star: 1.0,
            v_init: 1.0,
            dt: 0.5,
            n_steps: 24,
            measure: MeasureConfig::statevector(),
            sc_tol: 0.01,
            max_iters: 100,
            avg_window: 50,
            damping: 1.0,
            solver: Solver::Circuit,
            fit: FitOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.sc_tol > 0.0) {
            return bad(format!("sc_tol must be positive, got {}", self.sc_tol));
        }
        if self.n_steps < crate::greens::MIN_POINTS {
            return bad(format!("n_steps must be at least {}, got {}", crate::greens::MIN_POINTS, self.n_steps));
        }
        if self.avg_window == 0 || self.max_iters == 0 {
            return bad("avg_window and max_iters must be ≥ 1".into());
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad(format!("damping must be in (0, 1], got {}", self.damping));
        }
        if !(self.v_init > 0.0) || !(self.dt > 0.0) {
            return bad("v_init and dt must be positive".into());
        }
        if let Solver::Isl(isl) = &self.solver {
            isl.validate()?;
        }
        self.params(self.v_init).validate()?;
        self.measure.validate()
    }

    fn params(&self, v: f64) -> SiamParams {
        SiamParams { t_star: self.t_star, ..SiamParams::half_filled(self.u, v) }
    }

    /// Whether iterates scatter around the fixpoint: shot noise, or seeded
    /// recompilations that differ from one iteration to the next.
    fn is_noisy(&self) -> bool {
        match self.solver {
            Solver::ExactDiagonalization => false,
            Solver::Isl(_) => true,
            Solver::Circuit => self.measure.backend == Backend::Density,
        }
    }

    /// iG(τₙ), n = 0..=n_steps, at hybridization `v`.
    pub fn series(&self, v: f64, iter: usize) -> Result<GreensSeries> {
        let p = self.params(v);
        let measure = MeasureConfig { seed: derive_seed(self.measure.seed, &[iter as u64]), ..self.measure };
        match &self.solver {
            Solver::Circuit => measure_series(&p, self.dt, self.n_steps, &measure),
            Solver::ExactDiagonalization => {
                let times: Vec<f64> = (0..=self.n_steps).map(|n| n as f64 * self.dt).collect();
                exact_greens_series(&p, &times)
            }
            Solver::Isl(isl) => {
                let isl = IslConfig { seed: derive_seed(isl.seed, &[iter as u64]), ..*isl };
                let chain = incremental_chain(&p, self.dt, self.n_steps, &isl)?;
                let prefixes: Vec<_> = chain.into_iter().map(|r| r.circuit).collect();
                measure_prefixes(&prefixes, self.dt, &measure)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Iteration {
    pub iter: usize,
    #[serde(rename = "V")]
    pub v: f64,
    pub alpha: f64,
    pub omega1: f64,
    pub omega2: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    pub v_new: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DmftResult {
    pub u: f64,
    pub v_final: f64,
    pub z_mean: f64,
    pub z_std: f64,
    /// Two standard deviations of Z over the averaging window.
    pub z_err: f64,
    pub converged: bool,
    /// Z fell to zero (or the fit found a zero-frequency pole).
    pub insulating: bool,
    /// Z jumped by more than half relative to the previous iterate at convergence.
    pub spurious: bool,
    /// Iteration of the first |V_new − V| ≤ sc_tol hit.
    pub first_hit: Option<usize>,
    pub iterations: usize,
    #[serde(skip)]
    pub trace: Vec<Iteration>,
}

impl DmftResult {
    /// `iter,V,alpha,omega1,omega2,Z`.
    pub fn write_trace_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iter,V,alpha,omega1,omega2,Z")?;
        for r in &self.trace {
            writeln!(w, "{},{},{},{},{},{}", r.iter, r.v, r.alpha, r.omega1, r.omega2, r.z)?;
        }
        Ok(())
    }
}

/// One loop iteration at hybridization `v`; Z = 0 and V_new = 0 mark the insulator.
pub fn iterate(cfg: &DmftConfig, v: f64, iter: usize) -> Result<Iteration> {
    let series = cfg.series(v, iter)?;
    let fit = fit_series_with(&series, &cfg.fit)?;
    let z = match quasiparticle_weight(&fit, v) {
        Ok(z) if z >= Z_FLOOR => z,
        Ok(_) | Err(Error::Pole(_)) => 0.0,
        Err(e) => return Err(e),
    };
    let v_new = if z > 0.0 { update_hybridization(z, cfg.t_star)? } else { 0.0 };
    Ok(Iteration { iter, v, alpha: fit.alpha, omega1: fit.omega1, omega2: fit.omega2, z, v_new })
}

const SPURIOUS_JUMP: f64 = 0.5;

pub fn run_dmft(cfg: &DmftConfig) -> Result<DmftResult> {
    cfg.validate()?;
    let noisy = cfg.is_noisy();
    let mut v = cfg.v_init;
    let mut trace: Vec<Iteration> = Vec::new();
    let mut first_hit = None;
    let mut insulating = false;
    for iter in 0.. {
        match first_hit {
            None if iter >= cfg.max_iters => break,
            Some(h) if iter > h + cfg.avg_window => break,
            _ => {}
        }
        let rec = iterate(cfg, v, iter)?;
        trace.push(rec);
        if rec.z == 0.0 {
            insulating = true;
            first_hit.get_or_insert(iter);
            break;
        }
        if first_hit.is_none() && (rec.v_new - v).abs() <= cfg.sc_tol {
            first_hit = Some(iter);
            if !noisy {
                break;
            }
        }
        v = (1.0 - cfg.damping) * v + cfg.damping * rec.v_new;
    }

    let last = *trace.last().expect("at least one iteration");
    let (z_mean, z_std, v_final) = match first_hit {
        Some(h) if noisy && trace.len() > h + 1 && !insulating => {
            let w = &trace[h + 1..];
            let n = w.len() as f64;
            let mean = w.iter().map(|r| r.z).sum::<f64>() / n;
            let var = if w.len() > 1 { w.iter().map(|r| (r.z - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
            (mean, var.sqrt(), w.iter().map(|r| r.v_new).sum::<f64>() / n)
        }
        Some(h) => (trace[h].z, 0.0, trace[h].v_new),
        None => (last.z, 0.0, last.v_new),
    };
    let spurious = match first_hit {
        Some(h) if h > 0 => {
            let prev = trace[h - 1].z;
            prev > 0.0 && (trace[h].z - prev).abs() > SPURIOUS_JUMP * prev
        }
        _ => false,
    };
    Ok(DmftResult {
        u: cfg.u,
        v_final,
        z_mean,
        z_std,
        z_err: 2.0 * z_std,
        converged: first_hit.is_some(),
        insulating,
        spurious,
        first_hit,
        iterations: trace.len(),
        trace,
    })
}

/// Independent runs over `us`; point i uses seed derive_seed(seed, [i]).
pub fn sweep(us: &[f64], base: &DmftConfig, exec: Exec) -> Vec<Result<DmftResult>> {
    let idx: Vec<usize> = (0..us.len()).collect();
    par::map(exec, &idx, |&i| {
        let mut cfg = base.clone();
        cfg.u = us[i];
        cfg.measure.seed = derive_seed(base.measure.seed, &[i as u64]);
        if let Solver::Isl(isl) = &mut cfg.solver {
            isl.seed = derive_seed(isl.seed, &[i as u64]);
        }
        run_dmft(&cfg)
    })
}

/// Metallic points with Z above this anchor the onset extrapolation.
pub const METALLIC_Z: f64 = 0.1;

/// Insulator onset on an ascending U grid.
///
/// Near the transition Z vanishes linearly, so the onset is the zero of the
/// line through the last two points with Z > [`METALLIC_Z`], provided some
/// later point falls below it. `None` if the grid never leaves the metal or
/// has fewer than two metallic points.
pub fn insulator_onset(us: &[f64], zs: &[f64]) -> Option<f64> {
    let first_low = zs.iter().position(|&z| z <= METALLIC_Z)?;
    if first_low < 2 {
        return None;
    }
    let (u0, u1) = (us[first_low - 2], us[first_low - 1]);
    let (z0, z1) = (zs[first_low - 2], zs[first_low - 1]);
    if z1 >= z0 {
        return Some(us[first_low]);
    }
    Some(u1 + z1 * (u1 - u0) / (z0 - z1))
}
