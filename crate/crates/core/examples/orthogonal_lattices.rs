//! Gate between atoms in general position: each component rides its own
//! lattice line to where the row of one atom crosses the column of the other.

use std::f64::consts::PI;

use nffd::fields::ApertureSpec;
use nffd::gates::CollisionParams;
use nffd::machine::{default_lattice, run_two_qubit_gate, Layout, ProtocolSettings, Register, StepParams, TrapArray};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let layout = Layout::Square { pitch: 1.0, rows: 4, cols: 4 };
    let mut array = TrapArray::new(layout, ApertureSpec::new(1.0)?, default_lattice())?;
    let geometry = array.validate_pair(1, 14)?;
    println!("sites 1 and 14: {:?}, collide at {:?}", geometry.requirement, geometry.collision_point);

    let mut reg = Register::new(vec![1, 14])?;
    let cp = CollisionParams::new(1.0, PI / 2.0)?;
    let trace = run_two_qubit_gate(&mut reg, &mut array, 0, 1, &cp, true, &ProtocolSettings::default())?;
    if let Some(StepParams::Collide { legs, theta_meet, .. }) = trace.step(4).map(|s| &s.params) {
        for (leg, th) in legs.iter().zip(theta_meet) {
            println!(
                "qubit {} {:?}: {:.3} → {:.3} along {:?} (θ_meet = {th:.4})",
                leg.qubit, leg.component, leg.start, leg.end, leg.axis
            );
        }
    }
    println!("concurrence = {:.6}", reg.pair_state(0, 1)?.concurrence());
    Ok(())
}
