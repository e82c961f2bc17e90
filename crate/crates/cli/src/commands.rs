use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use dmftq::dmft::{insulator_onset, run_dmft, sweep, DmftResult};
use dmftq::greens::{fit_series, measure_series};
use dmftq::isl::{self, IslConfig};
use dmftq::model::SiamParams;
use dmftq::noise::{infidelity_map, preset, write_map_csv, NoiseParams, Preset};
use dmftq::par::Exec;
use dmftq::qcore::{parse_circuit, write_circuit};
use serde_json::{json, Map, Value};

use crate::config::{
    config_err, flags, layer, ConfigError, layer_split, merged, sweep_figure, DmftParams, FidelityMapParams, GreensParams, RunPoint,
    SweepRange,
};
use crate::{FidelityMapArgs, GreensArgs, IslArgs, NotConverged, RunArgs, SweepArgs};

type Layer = Option<Map<String, Value>>;

fn stack<'a>(file: &'a Layer, flags: &'a Map<String, Value>) -> Vec<&'a Map<String, Value>> {
    file.iter().chain(std::iter::once(flags)).collect()
}

/// Writes to `path`, or to stdout when it is `None`.
fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut out = io::stdout().lock();
            f(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn emit_json(path: Option<&Path>, v: &Value) -> anyhow::Result<()> {
    emit(path, |w| {
        serde_json::to_writer_pretty(&mut *w, v)?;
        writeln!(w)
    })
}

/// `dir/run.json` → `dir/run.<suffix>`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn log_grid(min: f64, max: f64, n: usize, what: &str) -> anyhow::Result<Vec<f64>> {
    if !(min > 0.0 && max.is_finite() && max >= min) || n == 0 {
        return config_err(format!("bad {what} grid: [{min}, {max}] with {n} points"));
    }
    if n == 1 {
        return Ok(vec![min]);
    }
    let (a, b) = (min.ln(), max.ln());
    Ok((0..n).map(|i| if i + 1 == n { max } else { (a + (b - a) * i as f64 / (n - 1) as f64).exp() }).collect())
}

/// Adds `x` to a sorted axis; a grid value within rounding of `x` is replaced by it.
fn insert_sorted(axis: &mut Vec<f64>, x: f64) {
    match axis.iter_mut().find(|y| (**y - x).abs() <= 1e-9 * x.abs()) {
        Some(y) => *y = x,
        None => {
            axis.push(x);
            axis.sort_by(f64::total_cmp);
        }
    }
}

pub fn fidelity_map(a: FidelityMapArgs, file: Layer) -> anyhow::Result<()> {
    let base = match a.figure {
        Some(n) => FidelityMapParams::figure(n)?,
        None => FidelityMapParams::default(),
    };
    let mut f = flags(&a);
    if a.no_presets {
        f.insert("include_presets".into(), Value::Bool(false));
    }
    let p: FidelityMapParams = layer(&base, &stack(&file, &f))?;
    if p.lambda_max > 1.0 {
        return config_err(format!("lambda_max {} exceeds 1", p.lambda_max));
    }
    let mut taus = log_grid(p.t_relax_min, p.t_relax_max, p.t_relax_points, "t_relax")?;
    let mut lambdas = log_grid(p.lambda_min, p.lambda_max, p.lambda_points, "lambda")?;
    if p.include_presets {
        for name in Preset::ALL {
            let q = preset(name)?;
            insert_sorted(&mut taus, q.t_relax);
            insert_sorted(&mut lambdas, q.lambda1);
        }
    }
    let template = NoiseParams { dephasing_ratio: p.dephasing_ratio, ..NoiseParams::ideal() };
    template.validate()?;
    let points = infidelity_map(&taus, &lambdas, &template, Exec::Parallel)?;
    emit(a.out.as_deref(), |w| write_map_csv(&points, w))
}

fn write_result(out: Option<&Path>, trace: Option<&Path>, config: Value, r: &DmftResult) -> anyhow::Result<()> {
    emit_json(out, &json!({ "config": config, "result": r }))?;
    let trace = trace.map(Path::to_path_buf).or_else(|| out.map(|o| sibling(o, "trace.csv")));
    if let Some(t) = trace {
        emit(Some(&t), |w| r.write_trace_csv(w))?;
    }
    Ok(())
}

pub fn dmft_run(a: RunArgs, file: Layer) -> anyhow::Result<()> {
    let mut f = flags(&a.dmft);
    if let Some(u) = a.u {
        f.insert("u".into(), json!(u));
    }
    let (point, params): (RunPoint, DmftParams) = layer_split(&RunPoint::default(), &DmftParams::default(), &stack(&file, &f))?;
    let cfg = params.to_config(point.u)?;
    let r = run_dmft(&cfg)?;
    write_result(a.out.as_deref(), a.trace.as_deref(), merged(&point, &params), &r)?;
    if !r.converged {
        return Err(NotConverged(format!("no self-consistent V after {} iterations", r.iterations)).into());
    }
    Ok(())
}

/// `U` and `Z_mean` columns of an earlier sweep.
fn read_baseline(path: &Path) -> anyhow::Result<Vec<(f64, f64)>> {
    let mut rd = csv::Reader::from_path(path).with_context(|| format!("cannot read baseline {}", path.display()))?;
    let headers = rd.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(iu), Some(iz)) = (col("U"), col("Z_mean")) else {
        return config_err(format!("baseline {} lacks U and Z_mean columns", path.display()));
    };
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let num = |i: usize| -> anyhow::Result<f64> {
            rec.get(i).unwrap_or("").trim().parse().map_err(|_| ConfigError(format!("bad number in baseline row {}", rows.len() + 1)).into())
        };
        rows.push((num(iu)?, num(iz)?));
    }
    Ok(rows)
}

pub fn dmft_sweep(a: SweepArgs, file: Layer) -> anyhow::Result<()> {
    let (range0, params0) = match a.figure {
        Some(n) => sweep_figure(n)?,
        None => (SweepRange::default(), DmftParams::default()),
    };
    let mut f = flags(&a.dmft);
    for (k, v) in [("u_min", a.u_min), ("u_max", a.u_max), ("u_step", a.u_step)] {
        if let Some(v) = v {
            f.insert(k.into(), json!(v));
        }
    }
    if let Some(us) = &a.us {
        f.insert("us".into(), json!(us));
    }
    let (range, params): (SweepRange, DmftParams) = layer_split(&range0, &params0, &stack(&file, &f))?;
    let us = range.values()?;
    let base = params.to_config(us[0])?;
    let baseline = match &a.relative_to {
        Some(p) => {
            let b = read_baseline(p)?;
            if b.len() != us.len() {
                return config_err(format!("baseline has {} rows, sweep has {} points", b.len(), us.len()));
            }
            if let Some(i) = b.iter().zip(&us).position(|((bu, _), u)| (bu - u).abs() > 1e-9) {
                return config_err(format!("baseline U = {} does not match sweep U = {}", b[i].0, us[i]));
            }
            Some(b.into_iter().map(|(_, z)| z).collect::<Vec<_>>())
        }
        None => None,
    };

    let results: Vec<DmftResult> = sweep(&us, &base, Exec::Parallel).into_iter().collect::<dmftq::Result<_>>()?;
    emit(a.out.as_deref(), |w| {
        write!(w, "U,Z_mean,Z_err,converged,iters")?;
        writeln!(w, "{}", if baseline.is_some() { ",Z0,Z_rel,Z_rel_err" } else { "" })?;
        for (i, r) in results.iter().enumerate() {
            write!(w, "{},{},{},{},{}", us[i], r.z_mean, r.z_err, r.converged, r.iterations)?;
            if let Some(z0) = &baseline {
                write!(w, ",{},{},{}", z0[i], r.z_mean / z0[i], r.z_err / z0[i])?;
            }
            writeln!(w)?;
        }
        Ok(())
    })?;
    if let Some(j) = &a.json {
        let zs: Vec<f64> = results.iter().map(|r| r.z_mean).collect();
        let summary = json!({
            "config": merged(&range, &params),
            "us": us,
            "points": results,
            "onset": insulator_onset(&us, &zs),
        });
        emit_json(Some(j), &summary)?;
    }
    let stuck: Vec<String> = results.iter().filter(|r| !r.converged).map(|r| r.u.to_string()).collect();
    if !stuck.is_empty() {
        return Err(NotConverged(format!("no self-consistent V at U = {}", stuck.join(", "))).into());
    }
    Ok(())
}

pub fn greens(a: GreensArgs, file: Layer) -> anyhow::Result<()> {
    let p: GreensParams = layer(&GreensParams::default(), &stack(&file, &flags(&a)))?;
    let measure = p.measure()?;
    let model = SiamParams { t_star: p.t_star, ..SiamParams::half_filled(p.u, p.v) };
    let series = measure_series(&model, p.dt, p.steps, &measure)?;
    emit(a.out.as_deref(), |w| series.write_csv(w))?;
    let fit = fit_series(&series)?;
    let v = json!({ "alpha": fit.alpha, "omega1": fit.omega1, "omega2": fit.omega2, "residual": fit.residual });
    match a.fit.clone().or_else(|| a.out.as_deref().map(|o| sibling(o, "fit.json"))) {
        Some(path) => emit_json(Some(&path), &v),
        None => {
            eprintln!("{}", serde_json::to_string_pretty(&v)?);
            Ok(())
        }
    }
}

pub fn isl_recompile(a: IslArgs, file: Layer) -> anyhow::Result<()> {
    let cfg: IslConfig = layer(&IslConfig::default(), &stack(&file, &flags(&a)))?;
    cfg.validate()?;
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("cannot read {}", a.input.display()))?;
    let circuit = parse_circuit(&text)?;
    let r = isl::isl_recompile(&circuit, &cfg)?;
    let body = write_circuit(&r.circuit);
    emit(Some(&a.out), |w| w.write_all(body.as_bytes()))?;
    let c = r.counts();
    let stats = json!({
        "layers": r.layers,
        "final_cost": r.cost,
        "n_single": c.n_single,
        "n_two": c.n_two,
        "depth": c.depth,
    });
    emit_json(a.stats.as_deref(), &stats)
}
