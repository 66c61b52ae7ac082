//! Brute-force reference implementations: ground truth for every output the
//! library produces. Correctness is definitional, performance is not a goal.

use num_bigint::BigUint;

use crate::error::Error;
use crate::functional_graph::{FunctionView, Vertex};
use crate::Result;

/// Which per-window statistic to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    Ed,
    Fk(u32),
    F0Mod2,
    Max,
    Min,
    /// t-th smallest symbol, 1-indexed.
    OrderStat(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleSpec {
    pub statistic: Statistic,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutputs {
    Bits(Vec<bool>),
    Counts(Vec<BigUint>),
    Symbols(Vec<u32>),
}

/// Evaluates the statistic on every window of length `n` of a `2n-1` input by
/// building a frequency table per window with a full scan.
pub fn brute_window_stats(x: &[u32], spec: OracleSpec) -> Result<OracleOutputs> {
    let n = spec.n;
    if n == 0 || x.len() != 2 * n - 1 {
        return Err(Error::Input(format!(
            "input length {} does not match 2n-1 for n={n}",
            x.len()
        )));
    }
    if let Statistic::OrderStat(t) = spec.statistic {
        if t == 0 || t as usize > n {
            return Err(Error::Argument(format!("order statistic t={t} outside [1, {n}]")));
        }
    }
    let mut scratch: Vec<u32> = Vec::with_capacity(n);
    let windows = (0..n).map(|i| &x[i..i + n]);
    Ok(match spec.statistic {
        Statistic::Ed => OracleOutputs::Bits(
            windows.map(|w| sorted_window(w, &mut scratch).windows(2).all(|p| p[0] != p[1])).collect(),
        ),
        Statistic::Fk(k) => OracleOutputs::Counts(
            windows
                .map(|w| {
                    run_lengths(sorted_window(w, &mut scratch))
                        .map(|len| BigUint::from(len).pow(k))
                        .sum()
                })
                .collect(),
        ),
        Statistic::F0Mod2 => OracleOutputs::Counts(
            windows
                .map(|w| {
                    BigUint::from(run_lengths(sorted_window(w, &mut scratch)).count() as u64 % 2)
                })
                .collect(),
        ),
        Statistic::Max => {
            OracleOutputs::Symbols(windows.map(|w| *w.iter().max().unwrap()).collect())
        }
        Statistic::Min => {
            OracleOutputs::Symbols(windows.map(|w| *w.iter().min().unwrap()).collect())
        }
        Statistic::OrderStat(t) => OracleOutputs::Symbols(
            windows.map(|w| sorted_window(w, &mut scratch)[(t - 1) as usize]).collect(),
        ),
    })
}

fn sorted_window<'a>(w: &[u32], scratch: &'a mut Vec<u32>) -> &'a [u32] {
    scratch.clear();
    scratch.extend_from_slice(w);
    scratch.sort_unstable();
    scratch
}

fn run_lengths(sorted: &[u32]) -> impl Iterator<Item = u64> + '_ {
    sorted.chunk_by(|a, b| a == b).map(|run| run.len() as u64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteCollisions {
    /// (collision vertex, preimages within the reachable set), sorted.
    pub records: Vec<(Vertex, Vec<Vertex>)>,
    /// Size of the reachable set, the starts included.
    pub reachable_count: u64,
}

/// Marks everything reachable from the starts by iterating the function, then
/// reads off every vertex with at least two preimages inside that set.
pub fn brute_collisions(fv: &FunctionView, starts: &[Vertex]) -> Result<BruteCollisions> {
    if starts.is_empty() {
        return Err(Error::Argument("start set must be non-empty".into()));
    }
    let n = fv.n();
    let mut reachable = vec![false; n as usize + 1];
    for &s in starts {
        if s == 0 || s > n {
            return Err(Error::Domain(format!("start vertex {s} outside [1, {n}]")));
        }
        let mut cur = s;
        while !reachable[cur as usize] {
            reachable[cur as usize] = true;
            cur = fv.eval_raw(cur);
        }
    }
    let mut preds: Vec<Vec<Vertex>> = vec![Vec::new(); n as usize + 1];
    for v in 1..=n {
        if reachable[v as usize] {
            preds[fv.eval_raw(v) as usize].push(v);
        }
    }
    let records = (1..=n)
        .filter(|&v| reachable[v as usize] && preds[v as usize].len() >= 2)
        .map(|v| (v, preds[v as usize].clone()))
        .collect();
    let reachable_count = reachable.iter().filter(|&&r| r).count() as u64;
    Ok(BruteCollisions { records, reachable_count })
}
