//! Light shifts: the AC Stark shift of a two-level atom and a scalar
//! standing-wave lattice.

use nalgebra::Vector3;
use nffd::fields::{lattice_potential, stark_shift, LatticeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for delta in [-50.0, -10.0, 10.0, 50.0] {
        let s = stark_shift(2.0, delta)?;
        let kind = if s < 0.0 { "attractive" } else { "repulsive" };
        println!("Ω = 2, Δ = {delta:>5}: shift {s:>8.4} ({kind})");
    }

    // one active axis; atoms collect at the nodes where V vanishes
    let lattice = LatticeConfig::new(2.0 * std::f64::consts::PI, [Some(1.0), None, None])?;
    println!("\nperiod = {}", lattice.period());
    for i in 0..=8 {
        let x = i as f64 * lattice.period() / 8.0;
        let v = lattice_potential(&Vector3::new(x, 0.0, 0.0), &lattice);
        println!("x = {x:.4}  V = {v:+.4}");
    }
    Ok(())
}
