//! Radial array: atoms on different arms meet at the centre, so only one
//! pair can interact at a time.

use std::f64::consts::PI;

use nffd::fields::ApertureSpec;
use nffd::gates::CollisionParams;
use nffd::machine::{
    default_lattice, run_simultaneous, run_two_qubit_gate, Layout, ProtocolSettings, Register, TrapArray,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let layout = Layout::Radial { arms: 6, sites_per_arm: 2, center: [0.0, 0.0], pitch: 1.0 };
    let mut array = TrapArray::new(layout, ApertureSpec::new(1.0)?, default_lattice())?;
    // one qubit at the inner site of arms 0, 2, 3 and 5
    let mut reg = Register::new(vec![0, 4, 6, 10])?;
    let cp = CollisionParams::new(1.0, PI)?;
    let settings = ProtocolSettings::default();

    let g = array.validate_pair(0, 6)?;
    println!("arms 0 and 3: {:?} at {:?}", g.requirement, g.collision_point);
    run_two_qubit_gate(&mut reg, &mut array, 0, 2, &cp, true, &settings)?;
    println!("concurrence(q0, q2) = {:.6}", reg.pair_state(0, 2)?.concurrence());

    match run_simultaneous(&mut reg, &mut array, &[(0, 2), (1, 3)], &cp, true, &settings) {
        Ok(_) => println!("unexpected: both pairs ran together"),
        Err(e) => println!("simultaneous request rejected: {e}"),
    }
    Ok(())
}
