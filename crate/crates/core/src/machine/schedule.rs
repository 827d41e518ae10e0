use std::collections::BTreeSet;

use super::array::{LatticeLine, TrapArray};
use super::Result;

/// Lattice lines touched by a pair: every line through either site.
fn pair_lines(array: &TrapArray, (i, j): (usize, usize)) -> Result<BTreeSet<LatticeLine>> {
    let mut lines: BTreeSet<_> = array.lines_through(i)?.into_iter().collect();
    lines.extend(array.lines_through(j)?);
    Ok(lines)
}

/// Whether two validated pairs may not run in the same batch.
pub fn conflicts(array: &TrapArray, p: (usize, usize), q: (usize, usize)) -> Result<bool> {
    if p.0 == q.0 || p.0 == q.1 || p.1 == q.0 || p.1 == q.1 {
        return Ok(true);
    }
    // every radial pair collides at or passes through the shared centre
    if array.is_radial() {
        return Ok(true);
    }
    let a = pair_lines(array, p)?;
    let b = pair_lines(array, q)?;
    Ok(!a.is_disjoint(&b))
}

/// Splits site pairs into batches with no shared site or lattice line, by
/// greedy colouring in the given order.
pub fn schedule_parallel(array: &TrapArray, pairs: &[(usize, usize)]) -> Result<Vec<Vec<(usize, usize)>>> {
    for &(i, j) in pairs {
        array.validate_pair(i, j)?;
    }
    let mut batches: Vec<Vec<(usize, usize)>> = Vec::new();
    'pairs: for &p in pairs {
        for batch in batches.iter_mut() {
            let mut free = true;
            for &q in batch.iter() {
                if conflicts(array, p, q)? {
                    free = false;
                    break;
                }
            }
            if free {
                batch.push(p);
                continue 'pairs;
            }
        }
        batches.push(vec![p]);
    }
    Ok(batches)
}
