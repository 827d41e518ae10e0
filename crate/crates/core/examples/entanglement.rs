//! Entanglement diagnostics on the gate output and on locally rotated copies.

use std::f64::consts::PI;

use nffd::analysis::{state_fidelity, TwoQubitPureState};
use nffd::gates::{kron, mandel_output, rx, rz, CollisionParams};
use nffd::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = mandel_output(&CollisionParams::new(1.0, PI)?);
    let h = Complex64::new(0.5, 0.0);
    let target = [h, -h, h, h];
    println!("fidelity with ½(1, -1, 1, 1) = {:.12}", state_fidelity(out.amplitudes(), &target)?);
    println!("concurrence = {:.12}", out.concurrence());

    // local unitaries leave the concurrence alone
    let m = kron(&rz(0.7), &(rx(1.3) * rz(-0.4)));
    let a = out.amplitudes();
    let moved: [Complex64; 4] = std::array::from_fn(|r| (0..4).map(|c| m[(r, c)] * a[c]).sum());
    let moved = TwoQubitPureState::new(moved)?;
    println!("after local rotations: concurrence = {:.12}", moved.concurrence());
    Ok(())
}
