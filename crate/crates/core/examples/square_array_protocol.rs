//! Run the six-step collisional gate on two atoms in the same row of a square
//! array and dump the trace.

use std::f64::consts::PI;

use nffd::fields::ApertureSpec;
use nffd::gates::CollisionParams;
use nffd::machine::{default_lattice, run_two_qubit_gate, Layout, ProtocolSettings, Register, TrapArray};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let layout = Layout::Square { pitch: 1.0, rows: 3, cols: 3 };
    let mut array = TrapArray::new(layout, ApertureSpec::new(1.0)?, default_lattice())?;
    // qubits 0 and 1 on sites 0 and 2 (same row); qubit 2 is a spectator
    let mut reg = Register::new(vec![0, 2, 4])?;
    let cp = CollisionParams::new(1.0, PI)?;

    let trace = run_two_qubit_gate(&mut reg, &mut array, 0, 1, &cp, true, &ProtocolSettings::default())?;
    for s in &trace.steps {
        println!("STEP {}: {} [{}]", s.step, s.description, s.validation);
    }
    let pair = reg.pair_state(0, 1)?;
    println!("pair amplitudes: {:?}", pair.amplitudes());
    println!("concurrence = {:.6}", pair.concurrence());

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, trace.to_json())?;
        println!("trace written to {path}");
    }
    Ok(())
}
