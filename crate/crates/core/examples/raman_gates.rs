//! One-qubit gates from a two-photon Raman drive: Rabi flopping and a
//! Hadamard built from three pulses.

use nffd::gates::{
    effective_hamiltonian, evolve, hadamard, hadamard_recipe, phase_insensitive_overlap, PulseSettings, RamanParams,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // resonant drive: Ω1 chosen so the light shifts cancel the splitting
    let (omega0, delta, e_split): (f64, f64, f64) = (1.0, -20.0, 0.01);
    let omega1 = (omega0 * omega0 - 4.0 * delta * e_split).sqrt();
    let rp = RamanParams::new(omega0, omega1, delta, e_split)?;
    println!("ε = {:.2e}, coupling = {:.5}", rp.epsilon(), rp.coupling());
    let h = effective_hamiltonian(&rp)?;
    for t in [0.0, 20.0, 40.0, 60.0, 80.0] {
        let p = evolve(&h, t).matrix()[(1, 0)].norm_sqr();
        println!("t = {t:>4}: P(|0⟩ → |1⟩) = {p:.4}");
    }

    let recipe = hadamard_recipe(&PulseSettings::default())?;
    for p in &recipe.pulses {
        println!("{:?} pulse: Ω0 = {:.3}, Ω1 = {:.3}, duration {:.3}", p.axis, p.params.omega0, p.params.omega1, p.duration);
    }
    let overlap = phase_insensitive_overlap(recipe.unitary().matrix(), hadamard().matrix());
    println!("overlap with H (up to phase) = {overlap:.15}");
    Ok(())
}
