//! Evaluation access to a function `f: [n] -> [n]` and Floyd's cycle finding.
//!
//! Vertices are 1-indexed. A [`FunctionView`] owns its meter, so distinct
//! views never share mutable state and can be moved between threads.

use crate::error::Error;
use crate::meter::Meter;
use crate::rng::splitmix64;
use crate::Result;

/// 1-indexed vertex of a functional graph (also used for sequence indices).
pub type Vertex = u32;

/// Iterated-hash function over an input sequence: `f(i) = h(x_i)` where `h`
/// is a seeded pseudorandom map from the alphabet `[m]` to `[n]`.
///
/// `h` substitutes for a truly random hash: it is a fixed SplitMix64 mix of
/// `(seed, symbol)` reduced into `[1, n]`. Fixed `(x, seed)` gives a fixed
/// function, so runs are reproducible; the statistical checks in the harness
/// validate that the substitute behaves closely enough to random.
#[derive(Debug, Clone)]
pub struct HashChain {
    x: Vec<u32>,
    m: u32,
    seed: u64,
}

impl HashChain {
    pub fn new(x: Vec<u32>, m: u32, seed: u64) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Argument("hash chain needs a non-empty sequence".into()));
        }
        if let Some(&bad) = x.iter().find(|&&s| s == 0 || s > m) {
            return Err(Error::Input(format!("symbol {bad} outside alphabet [1, {m}]")));
        }
        Ok(Self { x, m, seed })
    }

    pub fn len(&self) -> u32 {
        self.x.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn alphabet(&self) -> u32 {
        self.m
    }

    /// The hash `h(symbol)` in `[1, n]` with `n = |x|`.
    #[inline]
    pub fn hash_symbol(&self, symbol: u32) -> Vertex {
        let n = self.x.len() as u64;
        let z = splitmix64(self.seed ^ (symbol as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        (((z as u128 * n as u128) >> 64) as u32) + 1
    }

    #[inline]
    fn eval(&self, i: Vertex) -> Vertex {
        self.hash_symbol(self.x[(i - 1) as usize])
    }
}

#[derive(Debug, Clone)]
enum Backing {
    Table(Vec<u32>),
    Chain(HashChain),
}

/// Metered evaluation access to a function `f: [n] -> [n]`.
#[derive(Debug, Clone)]
pub struct FunctionView {
    n: u32,
    backing: Backing,
    meter: Meter,
}

impl FunctionView {
    /// Wraps an explicit table `f(1..=n)`; every entry must lie in `[1, n]`.
    pub fn from_table(table: Vec<u32>) -> Result<Self> {
        let n = table.len() as u32;
        if n == 0 {
            return Err(Error::Argument("function table must be non-empty".into()));
        }
        if let Some(&bad) = table.iter().find(|&&v| v == 0 || v > n) {
            return Err(Error::Input(format!("table value {bad} outside [1, {n}]")));
        }
        Ok(Self { n, backing: Backing::Table(table), meter: Meter::new() })
    }

    /// Wraps the iterated-hash function of a sequence.
    pub fn from_chain(chain: HashChain) -> Self {
        let n = chain.len();
        Self { n, backing: Backing::Chain(chain), meter: Meter::new() }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn meter(&self) -> &Meter {
        &self.meter
    }

    pub fn meter_mut(&mut self) -> &mut Meter {
        &mut self.meter
    }

    /// Evaluates `f(i)`, counting one function evaluation.
    #[inline]
    pub fn evaluate(&mut self, i: Vertex) -> Result<Vertex> {
        if i == 0 || i > self.n {
            return Err(Error::Domain(format!("vertex {i} outside [1, {}]", self.n)));
        }
        self.meter.count_eval();
        Ok(match &self.backing {
            Backing::Table(t) => t[(i - 1) as usize],
            Backing::Chain(c) => c.eval(i),
        })
    }

    /// Unmetered evaluation for oracles and debug verification only.
    /// Not exported outside the crate, so algorithm code cannot bypass the meter.
    #[inline]
    pub(crate) fn eval_raw(&self, i: Vertex) -> Vertex {
        debug_assert!(i >= 1 && i <= self.n);
        match &self.backing {
            Backing::Table(t) => t[(i - 1) as usize],
            Backing::Chain(c) => c.eval(i),
        }
    }
}

/// Parses the function-table file format: first token `n`, then `n`
/// whitespace-separated integers in `[1, n]` giving `f(1..=n)`.
pub fn parse_table(text: &str) -> Result<Vec<u32>> {
    let mut tokens = text.split_whitespace();
    let n: usize = tokens
        .next()
        .ok_or_else(|| Error::Input("empty function-table file".into()))?
        .parse()
        .map_err(|_| Error::Input("first token must be the domain size".into()))?;
    let mut table = Vec::with_capacity(n);
    for tok in tokens.by_ref().take(n) {
        let v: u32 = tok
            .parse()
            .map_err(|_| Error::Input(format!("bad table entry {tok:?}")))?;
        table.push(v);
    }
    if table.len() != n {
        return Err(Error::Input(format!("expected {n} entries, got {}", table.len())));
    }
    if tokens.next().is_some() {
        return Err(Error::Input("trailing tokens after table".into()));
    }
    Ok(table)
}

/// Result of cycle finding from a start vertex: iterating `f` from `start`
/// reaches vertex `w` after `s` steps and returns to it every `ell` steps.
///
/// `tail_pred` is the vertex before `w` on the tail (absent when `s = 0`) and
/// `cycle_pred` the vertex before `w` on the cycle; when `s > 0` these are two
/// distinct preimages of `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleInfo {
    pub s: u64,
    pub ell: u64,
    pub w: Vertex,
    pub tail_pred: Option<Vertex>,
    pub cycle_pred: Vertex,
}

/// Floyd's tortoise-and-hare cycle finding with predecessor tracking.
///
/// Finds the minimal `s` and `ell > 0` with `f^s(start) = f^{s+ell}(start)`,
/// storing a constant number of vertices and calling `eval` at most
/// `5(s + ell)` times. `step_budget`, when given, caps the number of `eval`
/// calls; exceeding it returns [`Error::BudgetExhausted`].
///
/// No separate lap is needed for the cycle length or the entry's
/// predecessor: the pointer walking from the phase-1 meeting point returns
/// to it after exactly `ell` steps, and when the entry search ends before
/// any return the phase-1 iteration count is itself the smallest multiple of
/// `ell` at or above `s`, hence equal to `ell`. The predecessor tracked by
/// the meeting-point pointer (seeded with the hare's last intermediate
/// position) is always the entry's predecessor on the cycle.
pub fn floyd_find<F>(mut eval: F, start: Vertex, step_budget: Option<u64>) -> Result<CycleInfo>
where
    F: FnMut(Vertex) -> Result<Vertex>,
{
    let mut steps: u64 = 0;
    let budget = step_budget.unwrap_or(u64::MAX);
    let mut step = |ptr: Vertex, eval: &mut F| -> Result<Vertex> {
        if steps == budget {
            return Err(Error::BudgetExhausted { steps });
        }
        steps += 1;
        eval(ptr)
    };

    // Phase 1: meet inside the cycle. After t iterations the tortoise is at
    // f^t and the hare at f^{2t}; they first meet at the smallest t >= 1 with
    // t >= s and ell | t. The hare's first position reuses the tortoise's
    // first evaluation.
    let mut tortoise = step(start, &mut eval)?;
    let mut hare_pred = tortoise;
    let mut hare = step(tortoise, &mut eval)?;
    let mut t: u64 = 1;
    while tortoise != hare {
        tortoise = step(tortoise, &mut eval)?;
        hare_pred = step(hare, &mut eval)?;
        hare = step(hare_pred, &mut eval)?;
        t += 1;
    }
    let meeting = hare;

    // Phase 2: advance one pointer from the start and one from the meeting
    // point in lockstep; they first coincide at the cycle entry, s steps in.
    let mut a = start;
    let mut b = meeting;
    let mut a_pred = None;
    let mut b_pred = hare_pred;
    let mut s: u64 = 0;
    let mut first_return: Option<u64> = None;
    while a != b {
        a_pred = Some(a);
        a = step(a, &mut eval)?;
        b_pred = b;
        b = step(b, &mut eval)?;
        s += 1;
        if first_return.is_none() && b == meeting {
            first_return = Some(s);
        }
    }
    let ell = if s == 0 { t } else { first_return.unwrap_or(t) };
    Ok(CycleInfo { s, ell, w: a, tail_pred: a_pred, cycle_pred: b_pred })
}
