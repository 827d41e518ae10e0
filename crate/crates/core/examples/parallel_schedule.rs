//! Group gate pairs on a square array into batches that share no atom and
//! no lattice line.

use nffd::fields::ApertureSpec;
use nffd::machine::{default_lattice, schedule_parallel, Layout, TrapArray};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let layout = Layout::Square { pitch: 1.0, rows: 6, cols: 6 };
    let array = TrapArray::new(layout, ApertureSpec::new(1.0)?, default_lattice())?;
    // neighbours along each row of the left half, plus a few vertical pairs
    let mut pairs: Vec<(usize, usize)> = (0..6).map(|r| (6 * r, 6 * r + 1)).collect();
    pairs.extend([(3, 9), (16, 22), (29, 35)]);

    let batches = schedule_parallel(&array, &pairs)?;
    for (i, b) in batches.iter().enumerate() {
        println!("batch {i}: {b:?}");
    }
    println!("{} pairs in {} batches", pairs.len(), batches.len());
    Ok(())
}
