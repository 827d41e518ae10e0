//! Randomized invariant checks against the reference implementations in
//! [`crate::oracles`]. Deterministic for a given seed.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::analysis::TwoQubitPureState;
use crate::fields::{rs_amplitude_with, ApertureSpec, QuadratureOptions};
use crate::gates::{
    effective_hamiltonian, evolve, kron, mandel_output, phase_insensitive_overlap, rx, rz, synthesize_zxz,
    unitarity_deviation, CollisionParams, PulseSettings, RamanParams, TwoLevelUnitary,
};
use crate::machine::{
    default_lattice, run_two_qubit_gate, schedule_parallel, Layout, ProtocolSettings, Register, TrapArray,
};
use crate::oracles;
use crate::statedep::{
    collision_schedule, component_minimum, component_potential, transport_trajectory, Component, ComponentWeights,
    StateDepConfig, WeightScheme,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn summary(&self) -> String {
        format!("selftest: {} passed, {} failed", self.passed(), self.failed())
    }

    pub fn lines(&self) -> String {
        self.checks
            .iter()
            .map(|c| format!("{} {} ({})\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("check,passed,detail\n");
        for c in &self.checks {
            s.push_str(&format!("{},{},{}\n", c.name, c.passed, c.detail.replace(',', ";")));
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema_version": 1,
            "seed": self.seed,
            "passed": self.passed(),
            "failed": self.failed(),
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
        })
    }
}

type Check = fn(&mut ChaCha8Rng, f64) -> Result<String, String>;

const CHECKS: &[(&str, Check)] = &[
    ("on_axis_closed_form", on_axis_closed_form),
    ("well_positions_vs_scan", well_positions_vs_scan),
    ("raman_rabi_probability", raman_rabi_probability),
    ("pulse_synthesis", pulse_synthesis),
    ("concurrence_local_invariance", concurrence_local_invariance),
    ("concurrence_of_gate_output", concurrence_of_gate_output),
    ("register_norm", register_norm),
    ("protocol_integrity", protocol_integrity),
    ("collision_round_trip", collision_round_trip),
    ("schedule_conflict_free", schedule_conflict_free),
];

/// Runs every check with its own stream derived from `seed`.
pub fn run_selftest(seed: u64, tol: f64) -> SelftestReport {
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let (passed, detail) = match f(&mut rng, tol) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult { name, passed, detail }
        })
        .collect();
    SelftestReport { seed, checks }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_unitary(rng: &mut ChaCha8Rng) -> TwoLevelUnitary {
    let u = rz(rng.random_range(-PI..PI)) * rx(rng.random_range(0.0..PI)) * rz(rng.random_range(-PI..PI));
    let phase = Complex64::from_polar(1.0, rng.random_range(-PI..PI));
    TwoLevelUnitary::new(u.matrix() * phase).expect("product of unitaries")
}

fn random_state(rng: &mut ChaCha8Rng) -> TwoQubitPureState {
    let mut amps = [Complex64::new(0.0, 0.0); 4];
    for a in amps.iter_mut() {
        *a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    TwoQubitPureState::new(amps.map(|a| a / n)).expect("normalized")
}

fn on_axis_closed_form(rng: &mut ChaCha8Rng, tol: f64) -> Result<String, String> {
    let opts = QuadratureOptions::with_tol(tol);
    let mut worst: f64 = 0.0;
    for a in [1.0, 1.5, 2.0] {
        let ap = ApertureSpec::new(a).map_err(|e| e.to_string())?;
        for _ in 0..8 {
            let z = rng.random_range(0.2..8.0);
            let got = rs_amplitude_with(&Vector3::new(0.0, 0.0, z), &ap, &opts).map_err(|e| e.to_string())?;
            let want = oracles::on_axis_amplitude(z, a);
            worst = worst.max((got.value - want).norm() / want.norm().max(1e-12));
        }
    }
    ensure(worst <= 1e-6, || format!("relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:e}"))
}

fn well_positions_vs_scan(rng: &mut ChaCha8Rng, _tol: f64) -> Result<String, String> {
    let cfg = StateDepConfig::new(1.0, 2.0 * PI, WeightScheme::RamanBasis).map_err(|e| e.to_string())?;
    let period = cfg.period();
    let n = 20_000;
    let step = period / n as f64;
    for _ in 0..20 {
        let theta = rng.random_range(-PI..PI);
        let w = ComponentWeights::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let x = match component_minimum(theta, w, cfg.k_lat, 0.0) {
            Ok(x) => x,
            Err(_) => continue,
        };
        let scan = oracles::dense_scan_argmin(|x| component_potential(x, theta, w, &cfg), 0.0, period, n);
        let d = oracles::periodic_distance(x, scan, period);
        ensure(d <= 2.0 * step, || format!("θ = {theta}: closed form {x} vs scan {scan}"))?;
    }
    Ok("20 draws within 2 scan steps".into())
}

fn raman_rabi_probability(rng: &mut ChaCha8Rng, _tol: f64) -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let omega0 = rng.random_range(0.2..2.0);
        let delta = rng.random_range(5.0..40.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let e_split = rng.random_range(-0.05..0.05);
        // Ω1 chosen so that ε = 0
        let omega1_sq = omega0 * omega0 - 4.0 * delta * e_split;
        if omega1_sq <= 0.0 {
            continue;
        }
        let rp = RamanParams::new(omega0, omega1_sq.sqrt(), delta, e_split).map_err(|e| e.to_string())?;
        let t = rng.random_range(0.0..200.0);
        let u = evolve(&effective_hamiltonian(&rp).map_err(|e| e.to_string())?, t);
        let p = u.matrix()[(1, 0)].norm_sqr();
        let want = oracles::rabi_probability(rp.omega0, rp.omega1, rp.delta, t);
        worst = worst.max((p - want).abs());
        ensure(unitarity_deviation(u.matrix()) <= 1e-12, || "non-unitary propagator".into())?;
    }
    ensure(worst <= 1e-9, || format!("probability error {worst:e}"))?;
    Ok(format!("max error {worst:e}"))
}

fn pulse_synthesis(rng: &mut ChaCha8Rng, _tol: f64) -> Result<String, String> {
    let settings = PulseSettings::default();
    for _ in 0..20 {
        let target = random_unitary(rng);
        let recipe = synthesize_zxz(&target, &settings).map_err(|e| e.to_string())?;
        let got = recipe.unitary();
        ensure(unitarity_deviation(got.matrix()) <= 1e-12, || "non-unitary recipe".into())?;
        let overlap = phase_insensitive_overlap(got.matrix(), target.matrix());
        ensure((overlap - 1.0).abs() <= 1e-10, || format!("overlap {overlap}"))?;
    }
    Ok("20 random targets reproduced".into())
}

fn concurrence_local_invariance(rng: &mut ChaCha8Rng, _tol: f64) -> Result<String, String> {
    for _ in 0..20 {
        let s = random_state(rng);
        let m = kron(&random_unitary(rng), &random_unitary(rng));
        let moved = TwoQubitPureState::new(oracles::apply4(&m, s.amplitudes())).map_err(|e| e.to_string())?;
        let (a, b) = (s.concurrence(), moved.concurrence());
        ensure((a - b).abs() <= 1e-10, || format!("{a} vs {b}"))?;
        let c = oracles::concurrence_from_purity(s.amplitudes());
        ensure((a - c).abs() <= 1e-9, || format!("determinant {a} vs purity {c}"))?;
    }
    Ok("20 random states".into())
}

fn concurrence_of_gate_output(_rng: &mut ChaCha8Rng, _tol: f64) -> Result<String, String> {
    for x in oracles::phase_grid(50) {
        let cp = CollisionParams::new(1.0, x).map_err(|e| e.to_string())?;
        let c = mandel_output(&cp).concurrence();
        let want = oracles::expected_concurrence(x);
        ensure((c - want).abs() <= 1e-9, || format!("x = {x}: {c} vs {want}"))?;
    }
    Ok("50 phases".into())
}

fn register_norm(rng: &mut ChaCha8Rng, _tol: f64) -> Result<String, String> {
    let mut reg = Register::new((0..5).collect()).map_err(|e| e.to_string())?;
    for _ in 0..40 {
        let q = rng.random_range(0..5);
        reg.apply_one_qubit(q, &random_unitary(rng)).map_err(|e| e.to_string())?;
    }
    let dev = (reg.norm_sqr() - 1.0).abs();
    ensure(dev <= 1e-10, || format!("norm drift {dev:e}"))?;
    Ok(format!("norm drift {dev:e}"))
}

fn protocol_integrity(rng: &mut ChaCha8Rng, _tol: f64) -> Result<String, String> {
    let layout = Layout::Square {
        pitch: 1.0,
        rows: 2,
        cols: 3,
    };
    let ap = ApertureSpec::new(1.0).map_err(|e| e.to_string())?;
    let mut array = TrapArray::new(layout, ap, default_lattice()).map_err(|e| e.to_string())?;
    let mut reg = Register::new(vec![0, 4, 2]).map_err(|e| e.to_string())?;
    reg.apply_one_qubit(1, &random_unitary(rng)).map_err(|e| e.to_string())?;
    let before = reg.reduced_density(&[1]).map_err(|e| e.to_string())?;
    let cp = CollisionParams::new(1.0, rng.random_range(0.0..2.0 * PI)).map_err(|e| e.to_string())?;
    let trace = run_two_qubit_gate(&mut reg, &mut array, 0, 2, &cp, true, &ProtocolSettings::default())
        .map_err(|e| e.to_string())?;
    let ids: Vec<u8> = trace.steps.iter().map(|s| s.step).collect();
    ensure(ids == [1, 2, 3, 4, 5, 6], || format!("steps {ids:?}"))?;
    let after = reg.reduced_density(&[1]).map_err(|e| e.to_string())?;
    let diff = (after - before).iter().map(|d| d.norm()).fold(0.0, f64::max);
    ensure(diff <= 1e-10, || format!("spectator changed by {diff:e}"))?;
    Ok("six ordered steps, spectator untouched".into())
}

fn collision_round_trip(rng: &mut ChaCha8Rng, _tol: f64) -> Result<String, String> {
    let cfg = default_lattice();
    let period = cfg.period();
    for _ in 0..5 {
        let i = rng.random_range(-4..4i64);
        let j = i + rng.random_range(1..5i64);
        let ramp = collision_schedule(i, j, period, cfg.k_lat, &cfg).map_err(|e| e.to_string())?;
        let full = ramp.full();
        for (comp, site) in [(Component::Zero, i), (Component::One, j)] {
            let x = site as f64 * period;
            let traj = transport_trajectory(&full, cfg.scheme.weights(comp), cfg.k_lat, x).map_err(|e| e.to_string())?;
            let end = traj.last().expect("non-empty").1;
            ensure((end - x).abs() <= 1e-9, || format!("{comp:?} returns to {end}, not {x}"))?;
        }
    }
    Ok("5 random pairs returned".into())
}

/// Shared site, row or column between two pairs of a `cols`-wide grid.
fn square_conflict(cols: usize, p: (usize, usize), q: (usize, usize)) -> bool {
    let a = [p.0, p.1];
    let b = [q.0, q.1];
    a.iter().any(|x| {
        b.iter()
            .any(|y| x == y || x / cols == y / cols || x % cols == y % cols)
    })
}

fn schedule_conflict_free(rng: &mut ChaCha8Rng, _tol: f64) -> Result<String, String> {
    let layout = Layout::Square {
        pitch: 1.0,
        rows: 6,
        cols: 6,
    };
    let ap = ApertureSpec::new(1.0).map_err(|e| e.to_string())?;
    let array = TrapArray::new(layout, ap, default_lattice()).map_err(|e| e.to_string())?;
    for _ in 0..10 {
        let n = rng.random_range(1..8);
        let pairs: Vec<(usize, usize)> = (0..n)
            .map(|_| {
                let i = rng.random_range(0..36);
                let j = (i + rng.random_range(1..36)) % 36;
                (i, j)
            })
            .collect();
        let batches = schedule_parallel(&array, &pairs).map_err(|e| e.to_string())?;
        let count: usize = batches.iter().map(Vec::len).sum();
        ensure(count == pairs.len(), || "pairs lost".into())?;
        for b in &batches {
            for (x, p) in b.iter().enumerate() {
                for q in &b[x + 1..] {
                    ensure(!square_conflict(6, *p, *q), || format!("{p:?} and {q:?} conflict"))?;
                }
            }
        }
    }
    Ok("10 random pair sets".into())
}
