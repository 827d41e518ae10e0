//! Sample the trap potential on an (r, z) grid and write it as CSV, ready for
//! a contour plot.
//!
//! `cargo run --example potential_map -- map.csv`

use nffd::fields::{potential_map, ApertureSpec, GridSpec, TrapLaserParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ap = ApertureSpec::new(1.0)?;
    let laser = TrapLaserParams::default();
    let grid = GridSpec::uniform((-1.5, 1.5, 31), (0.2, 3.0, 29));
    let map = potential_map(&ap, &laser, &grid)?;

    // deepest point of the map
    let (idx, u) = map
        .values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let nz = map.z.len();
    println!(
        "minimum U/U0 = {:.4} at r = {:.2}, z = {:.2}",
        u / map.u0,
        map.r[idx / nz],
        map.z[idx % nz]
    );

    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, map.to_csv())?;
            println!("wrote {} points to {path}", map.values.len());
        }
        None => println!("pass a file name to save the CSV"),
    }
    Ok(())
}
