//! Element distinctness over sliding windows: a length-`2n-1` input yields
//! one ED bit per length-`n` window.
//!
//! `ed_window_all` reduces the n outputs to single-instance ED calls: per
//! group of m consecutive windows, one call on the shared middle section
//! either settles the whole group or two binary searches locate where
//! left- and right-extended windows stop being distinct, leaving a recursive
//! subproblem of half the size on the group's boundary elements.
//! `ed_window_average` is the errorless scan that is fast on random inputs.

use crate::error::Error;
use crate::meter::Meter;
use crate::Result;

/// Per-window answers: `bits[i]` is the ED value of the window starting at
/// position i+1, true meaning all-distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowOutputs {
    pub n: usize,
    pub bits: Vec<bool>,
}

impl WindowOutputs {
    /// Renders as a 0/1 string, window 1 first.
    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Result of the two binary searches inside a group of m windows with a
/// distinct middle section: windows 1..=i_l contain a duplicate spanning the
/// left boundary and the middle, windows i_r+1..=m one spanning the middle
/// and the right boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupBounds {
    pub i_l: usize,
    pub i_r: usize,
}

/// A single-instance ED solver usable on arbitrary subranges.
pub trait EdBackend {
    /// Returns true when all symbols of `seg` are distinct.
    fn decide(&mut self, seg: &[u32]) -> Result<bool>;
}

/// Deterministic exact backend: sorts a copy and scans for adjacent equality.
pub struct ExactBackend<'a> {
    meter: &'a mut Meter,
}

impl<'a> ExactBackend<'a> {
    pub fn new(meter: &'a mut Meter) -> Self {
        Self { meter }
    }
}

impl EdBackend for ExactBackend<'_> {
    fn decide(&mut self, seg: &[u32]) -> Result<bool> {
        let mut copy = seg.to_vec();
        self.meter.track_cells(copy.len() as u64 + 2);
        copy.sort_by(|a, b| {
            self.meter.count_comparison();
            a.cmp(b)
        });
        for pair in copy.windows(2) {
            self.meter.count_comparison();
            if pair[0] == pair[1] {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Randomized backend: the small-space ED decision procedure with a fresh
/// derived seed per call. Its error is one-sided (duplicates may be missed).
pub struct RandomizedBackend {
    pub m: u32,
    pub space_budget: u64,
    pub epsilon_per_call: f64,
    pub base_seed: u64,
    calls: u64,
    pub meter: Meter,
}

impl RandomizedBackend {
    pub fn new(m: u32, space_budget: u64, epsilon_per_call: f64, base_seed: u64) -> Self {
        Self { m, space_budget, epsilon_per_call, base_seed, calls: 0, meter: Meter::new() }
    }
}

impl EdBackend for RandomizedBackend {
    fn decide(&mut self, seg: &[u32]) -> Result<bool> {
        use crate::element_distinctness::{ed_decide, EDOutcome, EDParams};
        self.calls += 1;
        let params = EDParams {
            m: self.m,
            space_budget: self.space_budget,
            epsilon: self.epsilon_per_call,
            seed: crate::rng::derive_seed(self.base_seed, self.calls),
            k: None,
        };
        let verdict = ed_decide(seg, &params, &mut self.meter)?;
        Ok(matches!(verdict.outcome, EDOutcome::Distinct))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdWindowMode {
    Exact,
    Randomized,
}

#[derive(Debug, Clone)]
pub struct EdWindowReport {
    pub outputs: WindowOutputs,
    /// Single-instance ED calls issued (majority repetitions included).
    pub backend_calls: u64,
}

/// Majority repetitions per query in randomized mode: `3 * ceil(log2 n)`,
/// rounded up to odd. Enough to push each query's error below 1/n^1.2, so n
/// outputs stay correct with probability 1 - o(1).
pub fn majority_reps(n: usize) -> u64 {
    let c = 3 * crate::collide::ceil_log2(n as u64).max(1);
    if c % 2 == 0 {
        c + 1
    } else {
        c
    }
}

/// Majority vote over `reps` independent backend calls; `reps` must be odd.
pub fn noisy_query(backend: &mut dyn EdBackend, seg: &[u32], reps: u64) -> Result<bool> {
    if reps % 2 == 0 {
        return Err(Error::Argument(format!("repetition count {reps} must be odd")));
    }
    let mut yes = 0u64;
    for _ in 0..reps {
        if backend.decide(seg)? {
            yes += 1;
        }
    }
    Ok(yes > reps / 2)
}

struct Driver<'a> {
    backend: &'a mut dyn EdBackend,
    reps: u64,
    calls: u64,
}

impl Driver<'_> {
    fn query(&mut self, seg: &[u32]) -> Result<bool> {
        self.calls += self.reps;
        if self.reps == 1 {
            self.backend.decide(seg)
        } else {
            noisy_query(self.backend, seg, self.reps)
        }
    }
}

/// Window length at and below which groups are not worth forming: each
/// window goes straight to the backend.
const DIRECT_SOLVE_WINDOW: usize = 8;

/// Computes ED for every window of length `n` of a `2n-1` input.
///
/// With an exact backend in exact mode the output equals the per-window
/// definition exactly. In randomized mode every query is a majority over
/// [`majority_reps`] calls; the one-sided error of the backend is inherited
/// (a distinct window is never reported as having a duplicate falsely in the
/// direction the backend cannot err).
pub fn ed_window_all(
    x: &[u32],
    n: usize,
    backend: &mut dyn EdBackend,
    mode: EdWindowMode,
) -> Result<EdWindowReport> {
    if n == 0 || x.len() != 2 * n - 1 {
        return Err(Error::Input(format!(
            "input length {} does not match 2n-1 for n={n}",
            x.len()
        )));
    }
    let reps = match mode {
        EdWindowMode::Exact => 1,
        EdWindowMode::Randomized => majority_reps(n),
    };
    let mut driver = Driver { backend, reps, calls: 0 };
    let mut bits = Vec::with_capacity(n);
    solve(&mut driver, x, n, n, &mut bits)?;
    Ok(EdWindowReport { outputs: WindowOutputs { n, bits }, backend_calls: driver.calls })
}

/// Solves the m-output sliding problem with windows of length `win` over
/// `seg` (of length win + m - 1), appending m bits to `out`.
fn solve(driver: &mut Driver, seg: &[u32], win: usize, m: usize, out: &mut Vec<bool>) -> Result<()> {
    debug_assert_eq!(seg.len(), win + m - 1);
    if win <= DIRECT_SOLVE_WINDOW {
        for i in 0..m {
            let b = driver.query(&seg[i..i + win])?;
            out.push(b);
        }
        return Ok(());
    }
    let group = win.div_ceil(2);
    let mut start = 0;
    while start < m {
        let gs = group.min(m - start);
        let gseg = &seg[start..start + win + gs - 1];
        reduce_group_inner(driver, gseg, win, gs, out)?;
        start += gs;
    }
    Ok(())
}

/// One group of `m` windows of length `win` (`0 < m < win` unless m = 1):
/// either the shared middle has a duplicate and the group is all-zero, or two
/// binary searches and a half-size recursion on the boundary settle it.
fn reduce_group_inner(
    driver: &mut Driver,
    seg: &[u32],
    win: usize,
    m: usize,
    out: &mut Vec<bool>,
) -> Result<()> {
    debug_assert_eq!(seg.len(), win + m - 1);
    if m == 1 {
        let b = driver.query(&seg[0..win])?;
        out.push(b);
        return Ok(());
    }
    // Middle section shared by all m windows.
    if !driver.query(&seg[m - 1..win])? {
        out.extend(std::iter::repeat_n(false, m));
        return Ok(());
    }
    let bounds = group_bounds_inner(driver, seg, win, m)?;

    // Recursive subproblem over the boundary elements: m windows of length
    // m-1 drawn from the m-1 left and m-1 right boundary symbols.
    let mut rec_input = Vec::with_capacity(2 * (m - 1));
    rec_input.extend_from_slice(&seg[0..m - 1]);
    rec_input.extend_from_slice(&seg[win..win + m - 1]);
    let mut rec_bits = Vec::with_capacity(m);
    solve(driver, &rec_input, m - 1, m, &mut rec_bits)?;

    for (idx, &rec) in rec_bits.iter().enumerate() {
        let w = idx + 1;
        out.push(w > bounds.i_l && w <= bounds.i_r && rec);
    }
    Ok(())
}

/// Binary searches for the group bounds, assuming the middle section is
/// distinct. The left predicate (window extended to start j has a duplicate)
/// is monotone decreasing in j, the right one monotone increasing, so each
/// search maintains a has-duplicate side and a distinct side with no ties.
fn group_bounds_inner(
    driver: &mut Driver,
    seg: &[u32],
    win: usize,
    m: usize,
) -> Result<GroupBounds> {
    // i_l = largest j in [1, m-1] with seg[j..=win] non-distinct, else 0.
    let mut lo = 0usize; // virtual: extending to j=0 would be non-distinct
    let mut hi = m; // known distinct (the middle itself)
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if !driver.query(&seg[mid - 1..win])? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let i_l = lo;

    // i_r = smallest j in [1, m-1] with seg[m-1..win+j] non-distinct, else m.
    let mut lo = 0usize; // known distinct (the middle itself)
    let mut hi = m; // virtual: extending to j=m would be non-distinct
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if !driver.query(&seg[m - 1..win + mid])? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let i_r = hi;
    Ok(GroupBounds { i_l, i_r })
}

/// Public form of the group reduction with plain single-call queries.
pub fn reduce_group(
    seg: &[u32],
    win: usize,
    m: usize,
    backend: &mut dyn EdBackend,
) -> Result<Vec<bool>> {
    if m == 0 || m >= win {
        return Err(Error::Argument(format!("group size {m} must satisfy 0 < m < win={win}")));
    }
    if seg.len() != win + m - 1 {
        return Err(Error::Input(format!(
            "segment length {} does not match win + m - 1 = {}",
            seg.len(),
            win + m - 1
        )));
    }
    let mut driver = Driver { backend, reps: 1, calls: 0 };
    let mut out = Vec::with_capacity(m);
    reduce_group_inner(&mut driver, seg, win, m, &mut out)?;
    Ok(out)
}

/// Group bounds with plain single-call queries (the middle must be distinct).
pub fn group_bounds(
    seg: &[u32],
    win: usize,
    m: usize,
    backend: &mut dyn EdBackend,
) -> Result<GroupBounds> {
    let mut driver = Driver { backend, reps: 1, calls: 0 };
    group_bounds_inner(&mut driver, seg, win, m)
}

/// Errorless per-window ED that is fast on random inputs.
///
/// Scans the current window right to left for its first duplicate pair; all
/// windows still containing that pair are zero, and the scan resumes just
/// past the pair's left element. Windows without any duplicate emit 1 and
/// slide by one.
pub fn ed_window_average(x: &[u32], n: usize, meter: &mut Meter) -> Result<WindowOutputs> {
    if n == 0 || x.len() != 2 * n - 1 {
        return Err(Error::Input(format!(
            "input length {} does not match 2n-1 for n={n}",
            x.len()
        )));
    }
    meter.track_cells(6);
    let mut bits = vec![false; n];
    let mut p = 1usize;
    while p <= n {
        let end = p + n - 1;
        let mut found: Option<(usize, usize)> = None;
        'scan: for j in (p..end).rev() {
            for t in j + 1..=end {
                meter.count_comparison();
                if x[j - 1] == x[t - 1] {
                    found = Some((j, t));
                    break 'scan;
                }
            }
        }
        match found {
            Some((j, t)) => {
                for s in p..=j.min(n) {
                    // Every window zeroed by the skip rule contains the pair.
                    debug_assert!(s <= j && t <= s + n - 1);
                    bits[s - 1] = false;
                }
                p = j + 1;
            }
            None => {
                bits[p - 1] = true;
                p += 1;
            }
        }
    }
    Ok(WindowOutputs { n, bits })
}
