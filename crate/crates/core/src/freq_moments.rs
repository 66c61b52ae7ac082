//! Exact frequency moments over sliding windows in bounded space.
//!
//! The first window is evaluated by multi-pass enumeration of its distinct
//! values in ascending order through a bounded buffer. The remaining n-1
//! outputs are produced in blocks of consecutive windows: a block keeps an
//! ordered structure over the few boundary elements that enter or leave some
//! window of the block, scans the common region once to count how often each
//! boundary value appears there, and then steps output-to-output with the
//! update `y' = y - ((f+1)^k - f^k) + ((g+1)^k - g^k)` (indicator form for
//! k = 0), where f and g are the frequencies of the leaving and entering
//! symbol in the shared middle of the two windows.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::collide::ceil_log2;
use crate::error::Error;
use crate::meter::Meter;
use crate::Result;

/// Minimum space budget is `max(MIN_BUDGET_LOG_FACTOR * ceil(log2 n),
/// MIN_BUDGET_FLOOR)` cells; the floor covers the constant-size machinery on
/// tiny windows.
pub const MIN_BUDGET_LOG_FACTOR: u64 = 4;
pub const MIN_BUDGET_FLOOR: u64 = 18;

/// Outputs of a sliding-window moment computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentOutputs {
    pub n: usize,
    pub k: u32,
    pub mod2: bool,
    pub values: MomentValues,
}

/// Output values: machine words while `k * log2(n)` fits in 62 bits (and
/// always for mod-2 outputs, which are single bits), big integers otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MomentValues {
    U64(Vec<u64>),
    Big(Vec<BigUint>),
}

impl MomentOutputs {
    /// Values as decimal strings, for printing and digesting.
    pub fn to_decimal_strings(&self) -> Vec<String> {
        match &self.values {
            MomentValues::U64(v) => v.iter().map(|x| x.to_string()).collect(),
            MomentValues::Big(v) => v.iter().map(|x| x.to_string()).collect(),
        }
    }

    pub fn as_big(&self) -> Vec<BigUint> {
        match &self.values {
            MomentValues::U64(v) => v.iter().map(|&x| BigUint::from(x)).collect(),
            MomentValues::Big(v) => v.clone(),
        }
    }
}

/// Accumulator abstraction shared by the three arithmetic paths.
pub(crate) trait MomentAcc: Clone {
    fn zero() -> Self;
    /// self += count^k
    fn add_power(&mut self, count: u64, k: u32);
    /// One window step with leaving-symbol frequency `old_freq` and entering
    /// frequency `new_freq`, both counted in the shared middle.
    fn shift(&mut self, old_freq: u64, new_freq: u64, k: u32);
}

#[derive(Clone)]
pub(crate) struct U64Acc(pub u64);

impl MomentAcc for U64Acc {
    fn zero() -> Self {
        U64Acc(0)
    }
    fn add_power(&mut self, count: u64, k: u32) {
        self.0 += count.pow(k);
    }
    fn shift(&mut self, old_freq: u64, new_freq: u64, k: u32) {
        self.0 = fk_update(self.0, old_freq, new_freq, k);
    }
}

#[derive(Clone)]
pub(crate) struct BigAcc(pub BigUint);

impl MomentAcc for BigAcc {
    fn zero() -> Self {
        BigAcc(BigUint::zero())
    }
    fn add_power(&mut self, count: u64, k: u32) {
        self.0 += BigUint::from(count).pow(k);
    }
    fn shift(&mut self, old_freq: u64, new_freq: u64, k: u32) {
        let sub;
        let add;
        if k == 0 {
            sub = BigUint::from(u64::from(old_freq == 0));
            add = BigUint::from(u64::from(new_freq == 0));
        } else {
            sub = BigUint::from(old_freq + 1).pow(k) - BigUint::from(old_freq).pow(k);
            add = BigUint::from(new_freq + 1).pow(k) - BigUint::from(new_freq).pow(k);
        }
        self.0 = &self.0 + add - sub;
    }
}

/// Single-bit arithmetic for mod-2 outputs.
#[derive(Clone)]
pub(crate) struct ParityAcc(pub u64);

impl MomentAcc for ParityAcc {
    fn zero() -> Self {
        ParityAcc(0)
    }
    fn add_power(&mut self, count: u64, k: u32) {
        let parity = if k == 0 { 1 } else { count & 1 };
        self.0 ^= parity;
    }
    fn shift(&mut self, old_freq: u64, new_freq: u64, k: u32) {
        if k == 0 {
            self.0 ^= u64::from(old_freq == 0) ^ u64::from(new_freq == 0);
        }
        // For k >= 1 both deltas are odd, so the parity never moves.
    }
}

/// One output step: `y - ((old+1)^k - old^k) + ((new+1)^k - new^k)`, with the
/// k = 0 form `y - [old == 0] + [new == 0]`. When the leaving and entering
/// symbols coincide the frequencies agree and the value is unchanged.
pub fn fk_update(y: u64, old_freq: u64, new_freq: u64, k: u32) -> u64 {
    if k == 0 {
        y + u64::from(new_freq == 0) - u64::from(old_freq == 0)
    } else {
        let sub = (old_freq + 1).pow(k) - old_freq.pow(k);
        let add = (new_freq + 1).pow(k) - new_freq.pow(k);
        y + add - sub
    }
}

/// First-window moment via batched ascending enumeration of distinct values.
///
/// Each pass scans the window once, collecting in an ordered buffer the up to
/// `buf_cap` smallest distinct values above the previous threshold together
/// with their exact counts; values that overflow the buffer are picked up by
/// a later pass.
pub(crate) fn first_window_impl<A: MomentAcc>(
    window: &[u32],
    k: u32,
    buf_cap: usize,
    meter: &mut Meter,
) -> A {
    debug_assert!(buf_cap >= 1);
    let mut acc = A::zero();
    let mut threshold: Option<u32> = None;
    let mut buf: Vec<(u32, u64)> = Vec::with_capacity(buf_cap);
    loop {
        buf.clear();
        let mut overflowed = false;
        for &v in window {
            if let Some(t) = threshold {
                meter.count_comparison();
                if v <= t {
                    continue;
                }
            }
            match buf_search(&buf, v, meter) {
                Ok(pos) => buf[pos].1 += 1,
                Err(pos) => {
                    if buf.len() < buf_cap {
                        buf.insert(pos, (v, 1));
                    } else if pos < buf.len() {
                        // Largest buffered value spills to a later pass; the
                        // buffer maximum only ever decreases once full, so a
                        // spilled value can never re-enter with a stale count.
                        buf.pop();
                        buf.insert(pos, (v, 1));
                        overflowed = true;
                    } else {
                        overflowed = true;
                    }
                }
            }
        }
        meter.track_cells(2 * buf_cap as u64 + 4);
        if buf.is_empty() {
            break;
        }
        for &(_, count) in &buf {
            acc.add_power(count, k);
        }
        threshold = Some(buf.last().unwrap().0);
        if !overflowed {
            break;
        }
    }
    acc
}

fn buf_search(buf: &[(u32, u64)], v: u32, meter: &mut Meter) -> std::result::Result<usize, usize> {
    let mut lo = 0usize;
    let mut hi = buf.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        meter.count_comparison();
        match buf[mid].0.cmp(&v) {
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => hi = mid,
            std::cmp::Ordering::Equal => return Ok(mid),
        }
    }
    Err(lo)
}

/// First-window moment in machine words. `space_budget` sizes the buffer as
/// `budget / ceil(log2 n)` entries.
pub fn fk_first_window(window: &[u32], k: u32, space_budget: u64, meter: &mut Meter) -> Result<u64> {
    let n = window.len();
    if n == 0 {
        return Err(Error::Input("window must be non-empty".into()));
    }
    let log = ceil_log2(n as u64).max(1);
    let min_budget = (MIN_BUDGET_LOG_FACTOR * log).max(MIN_BUDGET_FLOOR);
    if space_budget < min_budget {
        return Err(Error::Config(format!(
            "space budget {space_budget} below minimum {min_budget} for n={n}"
        )));
    }
    if (k as u64) * log > 62 {
        return Err(Error::Config(format!(
            "k={k} overflows 64-bit outputs for n={n}; use fk_window_all"
        )));
    }
    let buf_cap = (space_budget / log).max(1).min(((space_budget - 4) / 2).max(1)) as usize;
    Ok(first_window_impl::<U64Acc>(window, k, buf_cap, meter).0)
}

struct BoundaryEntry {
    value: u32,
    /// Ascending 1-indexed positions among the old (leaving) elements.
    old_positions: Vec<u32>,
    /// Ascending 1-indexed positions among the new (entering) elements.
    new_positions: Vec<u32>,
    /// Count of old positions <= current j; never retreats.
    old_cursor: usize,
    /// Count of new positions <= current n+j-1; never retreats.
    new_cursor: usize,
    /// Occurrences of the value in the block's common region.
    common_count: u64,
}

/// Per-block state: ordered structure keyed by symbol value over the block's
/// old elements `x[i..i+width-1]` and new elements `x[i+n..i+n+width-1]`,
/// with per-value occurrence lists, monotone head cursors and common-region
/// counts. Tracked cells are linear in the block width.
pub struct BlockState<'a> {
    x: &'a [u32],
    n: usize,
    block_start: usize,
    width: usize,
    k: u32,
    entries: Vec<BoundaryEntry>,
}

impl<'a> BlockState<'a> {
    /// Builds the boundary structure for outputs `y_{i+1} ..= y_{i+width}`
    /// (`i = block_start`, 1-indexed) and counts boundary values over the
    /// common region `x[i+width ..= i+n-1]` in one scan.
    pub fn build(
        x: &'a [u32],
        n: usize,
        block_start: usize,
        width: usize,
        k: u32,
        meter: &mut Meter,
    ) -> Result<Self> {
        if width == 0 || block_start + width - 1 + n > x.len() || block_start == 0 {
            return Err(Error::Argument(format!(
                "block [{block_start}, +{width}) with n={n} outside input of length {}",
                x.len()
            )));
        }
        let mut state = Self { x, n, block_start, width, k, entries: Vec::new() };
        for off in 0..width {
            let pos = (block_start + off) as u32;
            state.insert_position(pos, true, meter);
        }
        for off in 0..width {
            let pos = (block_start + n + off) as u32;
            state.insert_position(pos, false, meter);
        }
        for pos in block_start + width..block_start + n {
            let v = x[pos - 1];
            if let Ok(idx) = state.find(v, meter) {
                state.entries[idx].common_count += 1;
            }
        }
        let cells: u64 = state
            .entries
            .iter()
            .map(|e| 4 + e.old_positions.len() as u64 + e.new_positions.len() as u64)
            .sum();
        meter.track_cells(cells + 8);
        Ok(state)
    }

    fn find(&mut self, v: u32, meter: &mut Meter) -> std::result::Result<usize, usize> {
        let mut lo = 0usize;
        let mut hi = self.entries.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            meter.count_comparison();
            match self.entries[mid].value.cmp(&v) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Ok(mid),
            }
        }
        Err(lo)
    }

    fn insert_position(&mut self, pos: u32, old: bool, meter: &mut Meter) {
        let v = self.x[(pos - 1) as usize];
        let idx = match self.find(v, meter) {
            Ok(idx) => idx,
            Err(idx) => {
                self.entries.insert(
                    idx,
                    BoundaryEntry {
                        value: v,
                        old_positions: Vec::new(),
                        new_positions: Vec::new(),
                        old_cursor: 0,
                        new_cursor: 0,
                        common_count: 0,
                    },
                );
                idx
            }
        };
        if old {
            self.entries[idx].old_positions.push(pos);
        } else {
            self.entries[idx].new_positions.push(pos);
        }
    }

    /// Frequency of the leaving symbol `x_j` in the shared middle
    /// `x_{j+1} ..= x_{j+n-1}`.
    fn leaving_freq(&mut self, j: usize, meter: &mut Meter) -> u64 {
        let v = self.x[j - 1];
        let idx = self.find(v, meter).expect("old boundary value must be present");
        let e = &mut self.entries[idx];
        while e.old_cursor < e.old_positions.len() && e.old_positions[e.old_cursor] as usize <= j {
            e.old_cursor += 1;
        }
        let in_old = (e.old_positions.len() - e.old_cursor) as u64;
        let bound = (j + self.n - 1) as u32;
        while e.new_cursor < e.new_positions.len() && e.new_positions[e.new_cursor] <= bound {
            e.new_cursor += 1;
        }
        in_old + e.new_cursor as u64 + e.common_count
    }

    /// Frequency of the entering symbol `x_{j+n}` in the same shared middle.
    fn entering_freq(&mut self, j: usize, meter: &mut Meter) -> u64 {
        let v = self.x[j + self.n - 1];
        let idx = self.find(v, meter).expect("new boundary value must be present");
        let e = &mut self.entries[idx];
        while e.old_cursor < e.old_positions.len() && e.old_positions[e.old_cursor] as usize <= j {
            e.old_cursor += 1;
        }
        let in_old = (e.old_positions.len() - e.old_cursor) as u64;
        let bound = (j + self.n - 1) as u32;
        while e.new_cursor < e.new_positions.len() && e.new_positions[e.new_cursor] <= bound {
            e.new_cursor += 1;
        }
        in_old + e.new_cursor as u64 + e.common_count
    }

    pub(crate) fn advance_impl<A: MomentAcc>(&mut self, y_entry: A, meter: &mut Meter) -> Vec<A> {
        let mut y = y_entry;
        let mut out = Vec::with_capacity(self.width);
        for j in self.block_start..self.block_start + self.width {
            meter.count_comparison();
            if self.x[j - 1] == self.x[j + self.n - 1] {
                out.push(y.clone());
                continue;
            }
            let old_freq = self.leaving_freq(j, meter);
            let new_freq = self.entering_freq(j, meter);
            y.shift(old_freq, new_freq, self.k);
            out.push(y.clone());
        }
        out
    }

    /// Emits the block's outputs given the output just before the block.
    pub fn advance(&mut self, y_entry: u64, meter: &mut Meter) -> Vec<u64> {
        self.advance_impl(U64Acc(y_entry), meter).into_iter().map(|a| a.0).collect()
    }
}

fn run_moments<A: MomentAcc>(
    x: &[u32],
    n: usize,
    k: u32,
    width: usize,
    buf_cap: usize,
    meter: &mut Meter,
) -> Result<Vec<A>> {
    let mut outs: Vec<A> = Vec::with_capacity(n);
    let y1 = first_window_impl::<A>(&x[0..n], k, buf_cap, meter);
    outs.push(y1.clone());
    let mut y = y1;
    let mut i = 1usize;
    while i < n {
        let w = width.min(n - i);
        let mut state = BlockState::build(x, n, i, w, k, meter)?;
        let block = state.advance_impl(y, meter);
        y = block.last().expect("block is non-empty").clone();
        outs.extend(block);
        i += w;
    }
    Ok(outs)
}

/// Exact `F_k` (or `F_k mod 2`) of every window of length `n` of a `2n-1`
/// input, deterministic and comparison-metered, in `space_budget` tracked
/// cells.
pub fn fk_window_all(
    x: &[u32],
    n: usize,
    k: u32,
    space_budget: u64,
    mod2: bool,
    meter: &mut Meter,
) -> Result<MomentOutputs> {
    if n == 0 || x.len() != 2 * n - 1 {
        return Err(Error::Input(format!(
            "input length {} does not match 2n-1 for n={n}",
            x.len()
        )));
    }
    let log = ceil_log2(n as u64).max(1);
    let min_budget = (MIN_BUDGET_LOG_FACTOR * log).max(MIN_BUDGET_FLOOR);
    if space_budget < min_budget {
        return Err(Error::Config(format!(
            "space budget {space_budget} below minimum {min_budget} for n={n}"
        )));
    }
    // Block width is the per-block output count. The boundary structure
    // costs at most 10 cells per slot plus constant overhead, so the width
    // that fills the budget is (S - 8) / 10 slots; that keeps tracked cells
    // within the budget at every n and stays within a constant factor of the
    // S / log2(n) sizing of the analysis.
    let sprime = (space_budget / log).max(1) as usize;
    let width = n
        .saturating_sub(1)
        .max(1)
        .min((((space_budget - 8) / 10).max(1)) as usize);
    let buf_cap = sprime.min(((space_budget - 4) / 2).max(1) as usize);

    let values = if mod2 {
        let outs = run_moments::<ParityAcc>(x, n, k, width, buf_cap, meter)?;
        MomentValues::U64(outs.into_iter().map(|a| a.0).collect())
    } else if (k as u64) * log <= 62 {
        let outs = run_moments::<U64Acc>(x, n, k, width, buf_cap, meter)?;
        MomentValues::U64(outs.into_iter().map(|a| a.0).collect())
    } else {
        let outs = run_moments::<BigAcc>(x, n, k, width, buf_cap, meter)?;
        MomentValues::Big(outs.into_iter().map(|a| a.0).collect())
    };
    Ok(MomentOutputs { n, k, mod2, values })
}
