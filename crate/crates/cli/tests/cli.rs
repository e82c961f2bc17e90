use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dmftq::qcore::parse_circuit;
use dmftq::sim::{run_statevector, StateVector};
use serde_json::Value;
use tempfile::TempDir;

fn dmftq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmftq")).args(args).env_remove("DMFTQ_JOBS").output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = dmftq(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn code(args: &[&str]) -> i32 {
    dmftq(args).status.code().expect("exited normally")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn csv_rows(p: impl AsRef<Path>) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    (header, lines.map(|l| l.split(',').map(str::to_owned).collect()).collect())
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn dmft_run_noninteracting_fixpoint() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "run.json");
    ok(&["dmft-run", "--u", "0", "--backend", "statevector", "--out", &out]);
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let r = &v["result"];
    assert_eq!(r["converged"], Value::Bool(true));
    assert!((r["z_mean"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((r["v_final"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["config"]["u"].as_f64(), Some(0.0));
    let (header, rows) = csv_rows(dir.path().join("run.trace.csv"));
    assert_eq!(header, ["iter", "V", "alpha", "omega1", "omega2", "Z"]);
    assert!(!rows.is_empty());
}

#[test]
fn greens_noninteracting_is_cosine() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "g.csv");
    ok(&["greens", "--u", "0", "--v", "1", "--out", &out]);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["tau", "iG", "stderr"]);
    assert_eq!(rows.len(), 25);
    assert_eq!(num(&rows[0][0]), 0.0);
    assert_eq!(num(&rows[0][1]), 1.0);
    for r in &rows {
        assert!((num(&r[1]) - num(&r[0]).cos()).abs() < 1e-6, "{r:?}");
    }
    let fit: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("g.fit.json")).unwrap()).unwrap();
    for k in ["alpha", "omega1", "omega2", "residual"] {
        assert!(fit[k].is_number(), "{k}");
    }
    assert!((fit["omega1"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn density_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, seed: &str, jobs: &str| {
        let out = path(&dir, name);
        let fit = path(&dir, &format!("{name}.json"));
        let args = ["--jobs", jobs, "greens", "--backend", "density", "--seed", seed, "--steps", "8", "--shots", "2000"];
        ok(&[&args[..], &["--out", &out, "--fit", &fit]].concat());
        (fs::read(out).unwrap(), fs::read(fit).unwrap())
    };
    let a = run("a", "7", "1");
    assert_eq!(a, run("b", "7", "1"));
    assert_eq!(a, run("c", "7", "3"));
    assert_ne!(a.0, run("d", "8", "1").0);
}

#[test]
fn fidelity_map_single_point() {
    let out = ok(&[
        "fidelity-map",
        "--t-relax-min=1e-3",
        "--t-relax-max=1e-3",
        "--t-relax-points=1",
        "--lambda-min=1e-3",
        "--lambda-max=1e-3",
        "--lambda-points=1",
        "--no-presets",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t_relax_s,lambda,infidelity");
    assert_eq!(lines.len(), 2);
}

#[test]
fn fidelity_map_default_grid() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "fm.csv");
    ok(&["fidelity-map", "--figure", "3", "--out", &out]);
    let (_, rows) = csv_rows(&out);
    let rows: Vec<[f64; 3]> = rows.iter().map(|r| [num(&r[0]), num(&r[1]), num(&r[2])]).collect();

    // nonincreasing in T_relax within each λ block
    for w in rows.windows(2) {
        if w[0][1] == w[1][1] {
            assert!(w[1][0] > w[0][0]);
            assert!(w[1][2] <= w[0][2] + 1e-15, "{w:?}");
        }
    }
    // preset points with their listed CNOT fidelities, to one unit of the last digit
    for (tau, lambda, f, unit) in [(1e-2, 4e-5, 0.9999, 1e-4), (1e-1, 4e-6, 0.99999, 1e-5), (4e-5, 5e-3, 0.980, 1e-3), (1.1e-3, 4e-4, 0.999, 1e-3)] {
        let row = rows.iter().find(|r| r[0] == tau && r[1] == lambda).unwrap_or_else(|| panic!("missing ({tau}, {lambda})"));
        assert!((1.0 - row[2] - f).abs() <= unit, "{row:?}");
    }
}

#[test]
fn configuration_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&["fidelity-map", "--t-relax-min", "-1"]), 2);
    assert_eq!(code(&["fidelity-map", "--lambda-points", "0"]), 2);
    assert_eq!(code(&["fidelity-map", "--figure", "4"]), 2);
    assert_eq!(code(&["dmft-run", "--backend", "density"]), 2);
    assert_eq!(code(&["dmft-run", "--noise-preset", "A"]), 2);
    assert_eq!(code(&["dmft-run", "--isl", "--exact"]), 2);
    assert_eq!(code(&["--jobs", "0", "dmft-run"]), 2);
    let cfg = path(&dir, "bad.json");
    fs::write(&cfg, r#"{"u": 1, "not_a_key": 3}"#).unwrap();
    assert_eq!(code(&["--config", &cfg, "dmft-run"]), 2);
    fs::write(&cfg, "[1, 2]").unwrap();
    assert_eq!(code(&["--config", &cfg, "dmft-run"]), 2);
}

#[test]
fn non_convergence_exits_3() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "r.json");
    assert_eq!(code(&["dmft-run", "--u", "4", "--max-iters", "1", "--sc-tol", "1e-12", "--out", &out]), 3);
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["converged"], Value::Bool(false));
}

#[test]
fn config_file_then_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "c.json");
    fs::write(&cfg, r#"{"u": 2.0, "sc_tol": 0.001, "steps": 30}"#).unwrap();
    let out = ok(&["--config", &cfg, "dmft-run", "--u", "3", "--steps", "20"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["u"].as_f64(), Some(3.0));
    assert_eq!(v["config"]["sc_tol"].as_f64(), Some(0.001));
    assert_eq!(v["config"]["steps"].as_u64(), Some(20));
    assert_eq!(v["config"]["dt"].as_f64(), Some(0.5));
}

#[test]
fn sweep_rows_and_baseline() {
    let dir = TempDir::new().unwrap();
    let base = path(&dir, "base.csv");
    let json = path(&dir, "s.json");
    ok(&["dmft-sweep", "--us", "1,2,3", "--out", &base, "--json", &json]);
    let (header, rows) = csv_rows(&base);
    assert_eq!(header, ["U", "Z_mean", "Z_err", "converged", "iters"]);
    assert_eq!(rows.iter().map(|r| num(&r[0])).collect::<Vec<_>>(), [1.0, 2.0, 3.0]);
    assert!(rows.iter().all(|r| r[3] == "true"));
    let zs: Vec<f64> = rows.iter().map(|r| num(&r[1])).collect();
    assert!(zs[0] > zs[1] && zs[1] > zs[2]);
    let summary: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(summary["points"].as_array().unwrap().len(), 3);

    let out = ok(&["dmft-sweep", "--us", "1,2,3", "--relative-to", &base]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "U,Z_mean,Z_err,converged,iters,Z0,Z_rel,Z_rel_err");
    for l in lines {
        assert_eq!(num(l.split(',').nth(6).unwrap()), 1.0);
    }
    assert_eq!(code(&["dmft-sweep", "--us", "1,2", "--relative-to", &base]), 2);
    assert_eq!(code(&["dmft-sweep", "--us", "1,2,4", "--relative-to", &base]), 2);
    assert_eq!(code(&["dmft-sweep", "--figure", "5"]), 2);
}

#[test]
fn noiseless_density_sweep_at_zero_interaction() {
    let out = ok(&["dmft-sweep", "--us", "0", "--backend", "density", "--seed", "3", "--avg-window", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let (z, err) = (num(row[1]), num(row[2]));
    assert!((z - 1.0).abs() <= (2.0 * err).max(0.02), "Z = {z} ± {err}");
}

#[test]
fn isl_recompile_roundtrip() {
    let dir = TempDir::new().unwrap();
    let (input, output, stats) = (path(&dir, "a.txt"), path(&dir, "b.txt"), path(&dir, "s.json"));
    fs::write(&input, "# qubits 3\nH 0\nCNOT 0,1\nRY 2 0.7\nCNOT 1,2\nRZ 2 0.3\nRX 0 1.1\n").unwrap();
    ok(&["isl-recompile", "--in", &input, "--threshold", "1e-3", "--seed", "2", "--out", &output, "--stats", &stats]);
    let s: Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    for k in ["layers", "final_cost", "n_single", "n_two", "depth"] {
        assert!(s[k].is_number(), "{k}");
    }
    let a = parse_circuit(&fs::read_to_string(&input).unwrap()).unwrap();
    let b = parse_circuit(&fs::read_to_string(&output).unwrap()).unwrap();
    let (pa, pb) = (run_statevector(&a, &StateVector::zero(3)).unwrap(), run_statevector(&b, &StateVector::zero(3)).unwrap());
    let overlap = pa.amplitudes().iter().zip(pb.amplitudes()).map(|(x, y)| x.conj() * y).sum::<dmftq::C64>().norm_sqr();
    assert!(overlap >= 1.0 - 1e-3, "{overlap}");
    assert!((1.0 - overlap - s["final_cost"].as_f64().unwrap()).abs() < 1e-9);

    // same seed, same bytes
    let again = path(&dir, "c.txt");
    ok(&["isl-recompile", "--in", &input, "--threshold", "1e-3", "--seed", "2", "--out", &again, "--stats", &path(&dir, "t.json")]);
    assert_eq!(fs::read(&output).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn isl_failures_exit_4_and_parse_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let (input, output) = (path(&dir, "a.txt"), path(&dir, "b.txt"));
    fs::write(&input, "H 0\nCNOT 0,1\nRY 2 0.7\nCNOT 1,2\n").unwrap();
    let args = ["isl-recompile", "--in", &input, "--out", &output, "--threshold", "1e-9", "--max-layers", "1", "--restarts", "0"];
    assert_eq!(code(&args), 4);
    fs::write(&input, "FROB 0\n").unwrap();
    assert_eq!(code(&["isl-recompile", "--in", &input, "--out", &output]), 2);
}
