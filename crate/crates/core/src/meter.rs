//! Operation counters and the tracked-cell space measure.

use serde::{Deserialize, Serialize};

/// Counts the operations an algorithm performs and the high-water mark of its
/// tracked memory.
///
/// Conventions:
/// - `fn_evals` counts applications of the iterated function `f` (table reads
///   or hash-chain evaluations).
/// - `comparisons` counts three-way symbol comparisons. Index arithmetic and
///   cursor/position checks are not symbol comparisons and are not counted.
/// - `dict_ops` counts dictionary operations (lookup, insert, update, scan) on
///   the ordered structures the algorithms maintain.
/// - `peak_cells` is the high-water mark of tracked cells, where one cell is
///   one stored index, counter or symbol. Read-only input and write-only
///   output are excluded.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meter {
    pub fn_evals: u64,
    pub comparisons: u64,
    pub dict_ops: u64,
    pub peak_cells: u64,
}

impl Meter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn count_eval(&mut self) {
        self.fn_evals += 1;
    }

    #[inline]
    pub fn count_comparison(&mut self) {
        self.comparisons += 1;
    }

    #[inline]
    pub fn count_comparisons(&mut self, n: u64) {
        self.comparisons += n;
    }

    #[inline]
    pub fn count_dict_op(&mut self) {
        self.dict_ops += 1;
    }

    /// Records that `current` cells are live right now; keeps the high-water mark.
    #[inline]
    pub fn track_cells(&mut self, current: u64) {
        if current > self.peak_cells {
            self.peak_cells = current;
        }
    }

    /// Folds the counters of a sub-computation into this meter.
    ///
    /// Counters add; the space high-water mark takes the maximum, matching
    /// sequential phases that reuse the same working memory.
    pub fn absorb(&mut self, other: &Meter) {
        self.fn_evals += other.fn_evals;
        self.comparisons += other.comparisons;
        self.dict_ops += other.dict_ops;
        self.peak_cells = self.peak_cells.max(other.peak_cells);
    }
}
