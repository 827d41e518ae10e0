//! The collisional phase gate and the entanglement it produces.

use std::f64::consts::PI;

use nffd::gates::{collision_phase_gate, mandel_output, CollisionParams, GateJson};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cz_like = CollisionParams::new(1.0, PI)?;
    let json = serde_json::to_string(&GateJson::from_matrix(&collision_phase_gate(&cz_like)))?;
    println!("U t_hold = π gate: {json}");

    println!("\n{:>8} {:>12}", "U t", "concurrence");
    for i in 0..=8 {
        let x = i as f64 * PI / 4.0;
        let out = mandel_output(&CollisionParams::new(1.0, x)?);
        println!("{x:>8.4} {:>12.6}", out.concurrence());
    }
    Ok(())
}
