//! Locate the NFFD trap minimum behind apertures of increasing radius.
//!
//! Run with `cargo run --example trap_minimum`.

use nffd::fields::{axial_profile, locate_trap_minimum, ApertureSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>10} {:>12}", "a/λ", "z_min/λ", "U_min/U0");
    for a in [1.0, 1.25, 1.5, 1.75, 2.0] {
        let ap = ApertureSpec::new(a)?;
        let m = locate_trap_minimum(&ap)?;
        println!("{a:>6.2} {:>10.4} {:>12.5}", m.z_min, m.depth);
    }

    // coarse axial cut through the a = λ trap
    let profile = axial_profile(&ApertureSpec::new(1.0)?, 0.1, 4.0, 40)?;
    println!("\naxial profile, a = 1λ");
    for (z, u) in profile.samples.iter().step_by(4) {
        let bar = "#".repeat((-u * 15.0).round() as usize);
        println!("{z:5.2} {u:8.4} {bar}");
    }
    Ok(())
}
