use serde_json::json;

use super::config::Format;
use super::output::{require_out, sibling, write_atomic};
use super::{CliError, Resolved};
use crate::fields::{locate_trap_minimum_with, potential_map_with, QuadratureOptions};
use crate::machine::{run_simultaneous, run_two_qubit_gate, schedule_parallel, ProtocolTrace, Register, TrapArray};
use crate::statedep::{transport_trajectory, Component};

const SCHEMA_VERSION: u32 = 1;

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref()
        .ok_or_else(|| CliError::Config(format!("config has no \"{name}\" section")))
}

fn to_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}

pub fn trap_scan(r: &Resolved) -> Result<String, CliError> {
    let cfg = section(&r.config.trap_scan, "trap_scan")?;
    let out = require_out(&r.out)?;
    let opts = QuadratureOptions::with_tol(r.tol);
    let rows = cfg
        .apertures()?
        .iter()
        .map(|ap| Ok((ap.radius(), locate_trap_minimum_with(ap, &opts)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let text = match r.format {
        Format::Csv => {
            let mut s = String::from("a,z_min,depth_over_u0\n");
            for (a, m) in &rows {
                s.push_str(&format!("{a},{},{}\n", m.z_min, m.depth));
            }
            s
        }
        Format::Json => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "rows": rows.iter().map(|(a, m)| json!({"a": a, "z_min": m.z_min, "depth_over_u0": m.depth})).collect::<Vec<_>>(),
        })),
    };
    write_atomic(out, &text)?;
    Ok(format!("trap-scan: {} radii written to {}", rows.len(), out.display()))
}

pub fn potential_map(r: &Resolved) -> Result<String, CliError> {
    let cfg = section(&r.config.potential_map, "potential_map")?;
    let out = require_out(&r.out)?;
    let map = potential_map_with(&cfg.aperture()?, &cfg.laser, &cfg.grid()?, &QuadratureOptions::with_tol(r.tol))?;
    let text = match r.format {
        Format::Csv => map.to_csv(),
        Format::Json => {
            let rows: Vec<Vec<f64>> = (0..map.r.len())
                .map(|i| map.row(i).iter().map(|u| u / map.u0).collect())
                .collect();
            to_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "aperture_radius": cfg.aperture_radius,
                "r": map.r,
                "z": map.z,
                "u_over_u0": rows,
            }))
        }
    };
    write_atomic(out, &text)?;
    Ok(format!("potential-map: {}x{} grid written to {}", map.r.len(), map.z.len(), out.display()))
}

pub fn transport(r: &Resolved) -> Result<String, CliError> {
    let cfg = section(&r.config.transport, "transport")?;
    let out = require_out(&r.out)?;
    let ramp = cfg.ramp()?;
    let lat = &cfg.lattice;
    let x0 = transport_trajectory(&ramp, lat.scheme.weights(Component::Zero), lat.k_lat, cfg.x_start)?;
    let x1 = transport_trajectory(&ramp, lat.scheme.weights(Component::One), lat.k_lat, cfg.x_start)?;
    let rows: Vec<(f64, f64, f64, f64)> = ramp
        .samples()
        .iter()
        .zip(x0.iter().zip(&x1))
        .map(|(&(t, th), (a, b))| (t, th, a.1, b.1))
        .collect();
    let text = match r.format {
        Format::Csv => {
            let mut s = String::from("t,theta,x0,x1\n");
            for (t, th, a, b) in &rows {
                s.push_str(&format!("{t},{th},{a},{b}\n"));
            }
            s
        }
        Format::Json => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "scheme": lat.scheme.name(),
            "samples": rows.iter().map(|(t, th, a, b)| json!({"t": t, "theta": th, "x0": a, "x1": b})).collect::<Vec<_>>(),
        })),
    };
    write_atomic(out, &text)?;
    Ok(format!("transport: {} samples written to {}", rows.len(), out.display()))
}

pub fn protocol_run(r: &Resolved) -> Result<String, CliError> {
    let cfg = section(&r.config.protocol, "protocol")?;
    let out = require_out(&r.out)?;
    let mut array = TrapArray::from_config(&cfg.array)?;
    let mut reg = Register::from_bits(&cfg.initial_bits(), cfg.qubits.clone())?;
    for &site in &cfg.qubits {
        array.site(site)?;
    }
    let traces: Vec<ProtocolTrace> = if let [[i, j]] = cfg.pairs[..] {
        vec![run_two_qubit_gate(
            &mut reg,
            &mut array,
            i,
            j,
            &cfg.collision,
            cfg.pre_hadamard,
            &cfg.settings,
        )?]
    } else {
        let pairs: Vec<(usize, usize)> = cfg.pairs.iter().map(|p| (p[0], p[1])).collect();
        run_simultaneous(&mut reg, &mut array, &pairs, &cfg.collision, cfg.pre_hadamard, &cfg.settings)?
    };
    let mut states = Vec::with_capacity(traces.len());
    for t in &traces {
        let [i, j] = t.qubits;
        states.push(([i, j], reg.pair_state(i, j)?));
    }

    let (trace_text, state_text) = match r.format {
        Format::Json => {
            let trace = to_json(&json!({"schema_version": SCHEMA_VERSION, "traces": traces}));
            let pairs: Vec<_> = states
                .iter()
                .map(|(q, s)| {
                    json!({
                        "qubits": q,
                        "amplitudes": s.amplitudes().iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
                        "concurrence": s.concurrence(),
                    })
                })
                .collect();
            let state = to_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "pairs": pairs,
                "register": {
                    "n": reg.n(),
                    "amplitudes": reg.amplitudes().iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
                },
            }));
            (trace, state)
        }
        Format::Csv => {
            let mut trace = String::from(ProtocolTrace::CSV_HEADER);
            for t in &traces {
                trace.push_str(&t.csv_rows());
            }
            let mut state = String::from("qubit_i,qubit_j,basis,re,im\n");
            for ([i, j], s) in &states {
                for (b, a) in ["00", "01", "10", "11"].iter().zip(s.amplitudes()) {
                    state.push_str(&format!("{i},{j},{b},{},{}\n", a.re, a.im));
                }
            }
            (trace, state)
        }
    };
    let state_path = sibling(out, "state");
    write_atomic(out, &trace_text)?;
    write_atomic(&state_path, &state_text)?;
    let lines: Vec<String> = states
        .iter()
        .map(|([i, j], s)| format!("concurrence q{i}-q{j} = {:.6}", s.concurrence()))
        .collect();
    Ok(format!(
        "{}\ntrace written to {}, final state to {}",
        lines.join("\n"),
        out.display(),
        state_path.display()
    ))
}

pub fn schedule(r: &Resolved) -> Result<String, CliError> {
    let cfg = section(&r.config.schedule, "schedule")?;
    let out = require_out(&r.out)?;
    let array = TrapArray::from_config(&cfg.array)?;
    let pairs: Vec<(usize, usize)> = cfg.pairs.iter().map(|p| (p[0], p[1])).collect();
    let batches = schedule_parallel(&array, &pairs)?;
    let text = match r.format {
        Format::Csv => {
            let mut s = String::from("batch,site_i,site_j\n");
            for (b, batch) in batches.iter().enumerate() {
                for (i, j) in batch {
                    s.push_str(&format!("{b},{i},{j}\n"));
                }
            }
            s
        }
        Format::Json => to_json(&json!({"schema_version": SCHEMA_VERSION, "batches": batches})),
    };
    write_atomic(out, &text)?;
    Ok(format!("schedule: {} pairs in {} batches written to {}", pairs.len(), batches.len(), out.display()))
}

pub fn selftest(r: &Resolved) -> Result<String, CliError> {
    let report = super::run_selftest(r.seed, r.tol);
    let summary = report.summary();
    if let Some(out) = &r.out {
        let text = match r.format {
            Format::Csv => report.to_csv(),
            Format::Json => to_json(&report.to_json()),
        };
        write_atomic(out, &text)?;
    }
    if report.failed() > 0 {
        eprintln!("{}", report.lines());
        return Err(CliError::Numerical(summary));
    }
    Ok(format!("{}{summary}", report.lines()))
}
