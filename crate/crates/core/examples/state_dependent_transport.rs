//! Drag the two qubit components of neighbouring atoms together by rotating
//! the lattice polarization, then bring them back.

use nffd::machine::default_lattice;
use nffd::statedep::{collision_schedule, transport_trajectory, Component};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = default_lattice();
    let period = cfg.period();
    // |0⟩ of the atom at site 0 and |1⟩ of the atom two periods away
    let ramp = collision_schedule(0, 2, period, cfg.k_lat, &cfg)?;
    println!(
        "{} scheme: wells meet at x = {:.6} when θ = {:.6}",
        cfg.scheme.name(),
        ramp.meeting_point,
        ramp.theta_meet
    );

    let full = ramp.full();
    let x0 = transport_trajectory(&full, cfg.scheme.weights(Component::Zero), cfg.k_lat, 0.0)?;
    let x1 = transport_trajectory(&full, cfg.scheme.weights(Component::One), cfg.k_lat, 2.0 * period)?;
    println!("{:>6} {:>9} {:>9} {:>9}", "t", "θ", "x|0⟩", "x|1⟩");
    for ((s, a), b) in full.samples().iter().zip(&x0).zip(&x1).step_by(16) {
        println!("{:>6.3} {:>9.5} {:>9.5} {:>9.5}", s.0, s.1, a.1, b.1);
    }
    let (end0, end1) = (x0.last().unwrap().1, x1.last().unwrap().1);
    println!("after the reverse ramp: x|0⟩ = {end0:.2e}, x|1⟩ = {end1:.6}");
    Ok(())
}
