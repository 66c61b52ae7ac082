//! Sliding-window maximum and minimum in logarithmic space.
//!
//! One linear scan finds the extremum of the window in the middle of the
//! pending output range. If it sits in the left part of that window it is
//! shared by every window starting at or before the middle, so those outputs
//! fall out of a single slide that only inspects each newly exposed symbol;
//! the remaining outputs recurse on the right region. The mirrored case
//! slides right. The recursion is a loop over region endpoints, so tracked
//! state is a handful of cells and the output range halves every level.

use crate::error::Error;
use crate::meter::Meter;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremaOutputs {
    pub n: usize,
    pub direction: Direction,
    /// values[i] is the extremum of the window starting at position i+1.
    pub values: Vec<u32>,
}

/// Exact per-window extremum of every window of length `n` of a `2n-1` input
/// using at most `4n(ceil(log2 n)+1)` comparisons and a constant number of
/// tracked cells.
pub fn max_window_all(
    x: &[u32],
    n: usize,
    direction: Direction,
    meter: &mut Meter,
) -> Result<ExtremaOutputs> {
    if n == 0 || x.len() != 2 * n - 1 {
        return Err(Error::Input(format!(
            "input length {} does not match 2n-1 for n={n}",
            x.len()
        )));
    }
    if n == 1 {
        meter.track_cells(2);
        return Ok(ExtremaOutputs { n, direction, values: vec![x[0]] });
    }
    // Region endpoints, the scan extremum and its position, the running
    // extremum and a loop cursor: seven live cells.
    meter.track_cells(7);
    let better = |meter: &mut Meter, a: u32, b: u32| -> bool {
        meter.count_comparison();
        match direction {
            Direction::Max => a > b,
            Direction::Min => a < b,
        }
    };

    let mut values = vec![0u32; n];
    let mut lo = 1usize; // pending output range [lo, hi], 1-indexed starts
    let mut hi = n;
    while lo <= hi {
        let c = (lo + hi) / 2;
        // Scan the window starting at c.
        let mut best = x[c - 1];
        let mut best_pos = c;
        for p in c + 1..c + n {
            if better(meter, x[p - 1], best) {
                best = x[p - 1];
                best_pos = p;
            }
        }
        values[c - 1] = best;
        if best_pos <= lo + n - 1 {
            // The extremum is inside every window starting in [lo, c]:
            // slide left, folding in one newly exposed symbol per start.
            let mut running = best;
            for s in (lo..c).rev() {
                if better(meter, x[s - 1], running) {
                    running = x[s - 1];
                }
                values[s - 1] = running;
            }
            lo = c + 1;
        } else {
            // Mirrored: the extremum covers every start in [c, hi].
            let mut running = best;
            for s in c + 1..=hi {
                if better(meter, x[s + n - 2], running) {
                    running = x[s + n - 2];
                }
                values[s - 1] = running;
            }
            hi = c - 1;
        }
    }
    Ok(ExtremaOutputs { n, direction, values })
}
