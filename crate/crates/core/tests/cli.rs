//! End-to-end runs of the `nffd` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

struct Run {
    dir: tempfile::TempDir,
}

impl Run {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn config(&self, name: &str, cfg: &Value) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, cfg.to_string()).unwrap();
        p
    }

    fn nffd(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_nffd")).args(args).output().unwrap()
    }

    fn run(&self, cmd: &str, cfg: &Value, out: &str, extra: &[&str]) -> Output {
        let c = self.config(&format!("{out}.config.json"), cfg);
        let o = self.path(out);
        let mut args = vec![cmd, "--config", c.to_str().unwrap(), "--out", o.to_str().unwrap()];
        args.extend_from_slice(extra);
        self.nffd(&args)
    }
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn csv(text: &str) -> (String, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn assert_status(o: &Output, code: i32) {
    assert_eq!(
        o.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    );
}

fn pair_protocol(t_hold: f64, pre_hadamard: bool) -> Value {
    json!({
        "protocol": {
            "array": {"layout": {"kind": "SQUARE", "pitch": 1.0, "rows": 1, "cols": 3}},
            "qubits": [0, 2],
            "pairs": [[0, 1]],
            "collision": {"u_int": 1.0, "t_hold": t_hold},
            "pre_hadamard": pre_hadamard,
        }
    })
}

#[test]
fn trap_scan_rows_and_determinism() {
    let r = Run::new();
    let cfg = json!({"trap_scan": {"radii": [1.0, 1.5, 2.0]}});
    assert_status(&r.run("trap-scan", &cfg, "a.csv", &[]), 0);
    assert_status(&r.run("trap-scan", &cfg, "b.csv", &[]), 0);
    let text = read(&r.path("a.csv"));
    assert_eq!(text, read(&r.path("b.csv")));
    let (header, rows) = csv(&text);
    assert_eq!(header, "a,z_min,depth_over_u0");
    assert_eq!(rows.len(), 3);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
    assert!(rows.iter().all(|row| row[2] < 0.0));
}

#[test]
fn trap_scan_json_has_schema_version() {
    let r = Run::new();
    let cfg = json!({"trap_scan": {"radii": [1.0]}});
    assert_status(&r.run("trap-scan", &cfg, "a.json", &["--format", "json"]), 0);
    let v: Value = serde_json::from_str(&read(&r.path("a.json"))).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn config_errors_exit_2() {
    let r = Run::new();
    assert_status(&r.run("trap-scan", &json!({"trap_scan": {"radii": []}}), "a.csv", &[]), 2);
    assert_status(&r.run("trap-scan", &json!({"trap_scan": {"radii": [1.0]}, "extra": 1}), "b.csv", &[]), 2);
    assert_status(&r.run("trap-scan", &json!({"trap_scan": {"radii": [1.0]}}), "c.csv", &["--tol", "2"]), 2);
    assert_status(&r.run("trap-scan", &json!({"experiment": "schedule"}), "d.csv", &[]), 2);
    assert_status(&r.nffd(&["trap-scan", "--config", "/nonexistent/config.json"]), 2);
    assert_status(&r.nffd(&["no-such-command"]), 2);
    assert!(!r.path("a.csv").exists());
}

#[test]
fn potential_map_single_point_and_symmetry() {
    let r = Run::new();
    let one = json!({"potential_map": {"aperture_radius": 1.0, "r": [0.3], "z": [0.9]}});
    assert_status(&r.run("potential-map", &one, "one.csv", &[]), 0);
    let (header, rows) = csv(&read(&r.path("one.csv")));
    assert_eq!(header, "r,z,u_over_u0");
    assert_eq!(rows.len(), 1);

    let sym = json!({"potential_map": {
        "aperture_radius": 1.0,
        "r": {"lo": -0.6, "hi": 0.6, "n": 5},
        "z": [0.5, 1.0, 2.0],
    }});
    assert_status(&r.run("potential-map", &sym, "sym.csv", &[]), 0);
    let (_, rows) = csv(&read(&r.path("sym.csv")));
    assert_eq!(rows.len(), 15);
    for i in 0..15 {
        let mirror = &rows[(4 - i / 3) * 3 + i % 3];
        assert_eq!(rows[i][1], mirror[1]);
        assert!((rows[i][2] - mirror[2]).abs() <= 1e-10);
    }
}

#[test]
fn potential_map_axis_minimum_near_one_wavelength() {
    let r = Run::new();
    let cfg = json!({"potential_map": {"aperture_radius": 1.0, "r": [0.0], "z": {"lo": 0.3, "hi": 3.0, "n": 28}}});
    assert_status(&r.run("potential-map", &cfg, "axis.csv", &[]), 0);
    let (_, rows) = csv(&read(&r.path("axis.csv")));
    let best = rows.iter().min_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert!((best[1] - 1.0).abs() <= 0.2, "minimum at z = {}", best[1]);
}

#[test]
fn transport_raman_columns_mirror() {
    let r = Run::new();
    let cfg = json!({"transport": {
        "lattice": {"depth": 1.0, "k_lat": std::f64::consts::TAU, "scheme": "RAMAN_BASIS"},
        "ramp": {"t0": 0.0, "t1": 1.0, "theta0": 0.0, "theta1": 0.7},
    }});
    assert_status(&r.run("transport", &cfg, "t.csv", &[]), 0);
    let (header, rows) = csv(&read(&r.path("t.csv")));
    assert_eq!(header, "t,theta,x0,x1");
    assert!(rows.len() >= 2);
    for row in &rows {
        assert!((row[2] + row[3]).abs() <= 1e-12);
    }
    assert!(rows.last().unwrap()[2] < 0.0, "|0> moves towards -x");
}

#[test]
fn transport_zero_length_ramp_is_constant() {
    let r = Run::new();
    let cfg = json!({"transport": {"x_start": 1.5, "ramp": {"samples": [[0.0, 0.0]]}}});
    assert_status(&r.run("transport", &cfg, "t.csv", &[]), 0);
    let (_, rows) = csv(&read(&r.path("t.csv")));
    assert_eq!(rows, vec![vec![0.0, 0.0, 1.5, 1.5]]);

    let flat = json!({"transport": {"ramp": {"t0": 0.0, "t1": 2.0, "theta0": 0.0, "theta1": 0.0}}});
    assert_status(&r.run("transport", &flat, "flat.csv", &[]), 0);
    let (_, rows) = csv(&read(&r.path("flat.csv")));
    assert!(rows.iter().all(|row| row[2] == 0.0 && row[3] == 0.0));
}

#[test]
fn transport_mandel_one_follows_v_minus() {
    let r = Run::new();
    let k = std::f64::consts::TAU;
    let cfg = json!({"transport": {
        "lattice": {"depth": 1.0, "k_lat": k, "scheme": "MANDEL"},
        "ramp": {"t0": 0.0, "t1": 1.0, "theta0": 0.0, "theta1": 1.0},
    }});
    assert_status(&r.run("transport", &cfg, "t.csv", &[]), 0);
    let (_, rows) = csv(&read(&r.path("t.csv")));
    // V- = -V cos²(kx + θ) is deepest at x = -θ/k
    for row in &rows {
        assert!((row[3] + row[1] / k).abs() <= 1e-12);
    }
}

#[test]
fn transport_off_lattice_start_exits_3() {
    let r = Run::new();
    let cfg = json!({"transport": {"x_start": 0.1, "ramp": {"t0": 0.0, "t1": 1.0, "theta0": 0.0, "theta1": 0.5}}});
    assert_status(&r.run("transport", &cfg, "t.csv", &[]), 3);
    assert!(!r.path("t.csv").exists());
}

#[test]
fn protocol_run_maximal_entanglement() {
    let r = Run::new();
    let o = r.run("protocol-run", &pair_protocol(std::f64::consts::PI, true), "trace.json", &["--format", "json"]);
    assert_status(&o, 0);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("concurrence q0-q1 = 1.000000"), "{stdout}");
    let trace: Value = serde_json::from_str(&read(&r.path("trace.json"))).unwrap();
    assert_eq!(trace["schema_version"], 1);
    let steps: Vec<u64> = trace["traces"][0]["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["step"].as_u64().unwrap())
        .collect();
    assert_eq!(steps, [1, 2, 3, 4, 5, 6]);
    let state: Value = serde_json::from_str(&read(&r.path("trace.state.json"))).unwrap();
    assert!((state["pairs"][0]["concurrence"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
}

#[test]
fn protocol_run_zero_hold_is_identity() {
    let r = Run::new();
    let mut cfg = pair_protocol(0.0, false);
    cfg["protocol"]["initial"] = json!([0, 1]);
    assert_status(&r.run("protocol-run", &cfg, "trace.csv", &[]), 0);
    let trace = read(&r.path("trace.csv"));
    assert!(trace.starts_with("qubit_i,qubit_j,step,description,validation\n"));
    assert_eq!(trace.lines().count(), 7);
    let state = read(&r.path("trace.state.csv"));
    let amps: Vec<(f64, f64)> = state
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[3].parse().unwrap(), f[4].parse().unwrap())
        })
        .collect();
    assert_eq!(amps, vec![(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
}

#[test]
fn protocol_run_radial_simultaneous_exits_4() {
    let r = Run::new();
    let cfg = json!({"protocol": {
        "array": {"layout": {"kind": "RADIAL", "arms": 4, "sites_per_arm": 2, "center": [0.0, 0.0], "pitch": 1.0}},
        "qubits": [0, 2, 4, 6],
        "pairs": [[0, 1], [2, 3]],
        "collision": {"u_int": 1.0, "t_hold": std::f64::consts::PI},
    }});
    let o = r.run("protocol-run", &cfg, "trace.json", &[]);
    assert_status(&o, 4);
    assert!(!r.path("trace.json").exists());
}

#[test]
fn protocol_run_is_byte_identical() {
    let r = Run::new();
    let cfg = pair_protocol(1.3, true);
    assert_status(&r.run("protocol-run", &cfg, "a.json", &["--format", "json"]), 0);
    assert_status(&r.run("protocol-run", &cfg, "b.json", &["--format", "json"]), 0);
    assert_eq!(read(&r.path("a.json")), read(&r.path("b.json")));
    assert_eq!(read(&r.path("a.state.json")), read(&r.path("b.state.json")));
}

#[test]
fn schedule_batches_csv() {
    let r = Run::new();
    let cfg = json!({"schedule": {
        "array": {"layout": {"kind": "SQUARE", "pitch": 1.0, "rows": 3, "cols": 3}},
        "pairs": [[0, 1], [3, 4], [6, 7], [0, 2]],
    }});
    assert_status(&r.run("schedule", &cfg, "s.csv", &[]), 0);
    let (header, rows) = csv(&read(&r.path("s.csv")));
    assert_eq!(header, "batch,site_i,site_j");
    assert_eq!(rows.len(), 4);
    // pairs on separate rows still share columns 0 and 1, so each needs its own batch
    let batches: Vec<f64> = rows.iter().map(|row| row[0]).collect();
    assert_eq!(batches, [0.0, 1.0, 2.0, 3.0]);
}

#[test]
fn selftest_passes_and_reports() {
    let r = Run::new();
    let o = r.nffd(&["selftest", "--seed", "7"]);
    assert_status(&o, 0);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("0 failed"), "{stdout}");
    let out = r.path("report.json");
    assert_status(&r.nffd(&["selftest", "--format", "json", "--out", out.to_str().unwrap()]), 0);
    let v: Value = serde_json::from_str(&read(&out)).unwrap();
    assert!(v.is_object());
}
