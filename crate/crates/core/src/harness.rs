//! Input generation, experiment sweeps over space grids, and statistical
//! checks of the probability bounds the randomized algorithms rely on.

pub use crate::meter::Meter;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::element_distinctness::{ed_decide, round_cutoff, EDOutcome, EDParams};
use crate::error::Error;
use crate::freq_moments::fk_window_all;
use crate::functional_graph::{FunctionView, HashChain};
use crate::oracle::{brute_window_stats, OracleOutputs, OracleSpec, Statistic};
use crate::order_stats::{max_window_all, Direction};
use crate::rng::{derive_seed, SplitMix64};
use crate::sliding_ed::{ed_window_all, ed_window_average, EdWindowMode, ExactBackend, RandomizedBackend};
use crate::{collide, Result};

/// Families of generated inputs. All are deterministic in (kind, len, m, seed).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    /// Independent uniform symbols from [1, m].
    Uniform,
    /// len distinct symbols from [1, m] (requires m >= len).
    AllDistinct,
    /// Distinct symbols except one value planted at two positions the given
    /// distance apart; a random feasible distance when absent.
    PlantedPair { distance: Option<u32> },
    /// One seed-derived symbol repeated.
    Constant,
    /// A function table: len values uniform in [1, len].
    FunctionTable,
}

pub fn generate_input(kind: InputKind, len: usize, m: u32, seed: u64) -> Result<Vec<u32>> {
    if len == 0 {
        return Err(Error::Argument("input length must be positive".into()));
    }
    if m == 0 {
        return Err(Error::Argument("alphabet bound must be positive".into()));
    }
    let mut rng = SplitMix64::new(seed);
    match kind {
        InputKind::Uniform => {
            Ok((0..len).map(|_| rng.next_in_domain(m as u64) as u32).collect())
        }
        InputKind::AllDistinct => sample_distinct(len, m, &mut rng),
        InputKind::PlantedPair { distance } => {
            if len < 2 {
                return Err(Error::Argument("planted pair needs length >= 2".into()));
            }
            let d = match distance {
                Some(d) => {
                    if d == 0 || d as usize >= len {
                        return Err(Error::Argument(format!(
                            "planted distance {d} infeasible for length {len}"
                        )));
                    }
                    d as usize
                }
                None => 1 + rng.next_below(len as u64 - 1) as usize,
            };
            let mut x = sample_distinct(len, m, &mut rng)?;
            let p = rng.next_below((len - d) as u64) as usize;
            x[p + d] = x[p];
            Ok(x)
        }
        InputKind::Constant => {
            let c = rng.next_in_domain(m as u64) as u32;
            Ok(vec![c; len])
        }
        InputKind::FunctionTable => {
            Ok((0..len).map(|_| rng.next_in_domain(len as u64) as u32).collect())
        }
    }
}

fn sample_distinct(len: usize, m: u32, rng: &mut SplitMix64) -> Result<Vec<u32>> {
    if (m as usize) < len {
        return Err(Error::Argument(format!(
            "cannot draw {len} distinct symbols from alphabet of size {m}"
        )));
    }
    if (m as usize) <= 2 * len {
        let mut pool: Vec<u32> = (1..=m).collect();
        rng.shuffle(&mut pool);
        pool.truncate(len);
        Ok(pool)
    } else {
        let mut seen = std::collections::HashSet::with_capacity(len * 2);
        let mut out = Vec::with_capacity(len);
        while out.len() < len {
            let v = rng.next_in_domain(m as u64) as u32;
            if seen.insert(v) {
                out.push(v);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmId {
    Ed,
    Fk,
    F0Mod2,
    OrderMax,
    OrderMin,
    SlidingEdExact,
    SlidingEdRandomized,
    SlidingEdAverage,
}

impl AlgorithmId {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmId::Ed => "ed",
            AlgorithmId::Fk => "fk",
            AlgorithmId::F0Mod2 => "f0mod2",
            AlgorithmId::OrderMax => "order-max",
            AlgorithmId::OrderMin => "order-min",
            AlgorithmId::SlidingEdExact => "sliding-ed-exact",
            AlgorithmId::SlidingEdRandomized => "sliding-ed-randomized",
            AlgorithmId::SlidingEdAverage => "sliding-ed-average",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "ed" => AlgorithmId::Ed,
            "fk" => AlgorithmId::Fk,
            "f0mod2" => AlgorithmId::F0Mod2,
            "order-max" => AlgorithmId::OrderMax,
            "order-min" => AlgorithmId::OrderMin,
            "sliding-ed-exact" => AlgorithmId::SlidingEdExact,
            "sliding-ed-randomized" => AlgorithmId::SlidingEdRandomized,
            "sliding-ed-average" => AlgorithmId::SlidingEdAverage,
            other => return Err(Error::Argument(format!("unknown algorithm {other:?}"))),
        })
    }

    /// Exact algorithms turn an oracle mismatch into a hard error instead of
    /// a row with correct=false.
    fn is_exact(&self) -> bool {
        !matches!(self, AlgorithmId::Ed | AlgorithmId::SlidingEdRandomized)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub alg: AlgorithmId,
    pub n: usize,
    pub m: u32,
    /// Moment order for fk, ignored elsewhere.
    pub k_stat: u32,
    pub space_grid: Vec<u64>,
    pub epsilon: f64,
    pub trials: u64,
    pub base_seed: u64,
    pub input_kind: InputKind,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RunRow {
    pub alg: String,
    pub n: usize,
    pub space_budget: u64,
    pub k: u64,
    pub trial: u64,
    pub fn_evals: u64,
    pub comparisons: u64,
    pub dict_ops: u64,
    pub peak_cells: u64,
    pub correct: bool,
    pub wall_ns: u64,
}

pub const CSV_HEADER: &str =
    "alg,n,space_budget,k,trial,fn_evals,comparisons,dict_ops,peak_cells,correct,wall_ns";

pub fn rows_to_csv(rows: &[RunRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.alg,
            r.n,
            r.space_budget,
            r.k,
            r.trial,
            r.fn_evals,
            r.comparisons,
            r.dict_ops,
            r.peak_cells,
            r.correct,
            r.wall_ns
        ));
    }
    out
}

/// Runs the configured algorithm over the whole space grid, `trials` times
/// per grid point, one row per (space, trial). Trials run concurrently with
/// derived seeds; rows are sorted by (space, trial) so output is stable.
pub fn run_experiment(config: &RunConfig) -> Result<Vec<RunRow>> {
    if config.space_grid.is_empty() {
        return Err(Error::Config("space grid must be non-empty".into()));
    }
    if config.trials == 0 {
        return Err(Error::Config("trials must be positive".into()));
    }
    let cases: Vec<(u64, u64)> = config
        .space_grid
        .iter()
        .flat_map(|&s| (0..config.trials).map(move |t| (s, t)))
        .collect();
    let mut rows = cases
        .par_iter()
        .map(|&(space, trial)| run_one(config, space, trial))
        .collect::<Result<Vec<RunRow>>>()?;
    rows.sort_by(|a, b| (a.space_budget, a.trial).cmp(&(b.space_budget, b.trial)));
    Ok(rows)
}

fn input_length(alg: AlgorithmId, n: usize) -> usize {
    match alg {
        AlgorithmId::Ed => n,
        _ => 2 * n - 1,
    }
}

fn run_one(config: &RunConfig, space: u64, trial: u64) -> Result<RunRow> {
    let input_seed = derive_seed(config.base_seed, trial);
    let alg_seed = derive_seed(config.base_seed ^ 0x00A1_6000, trial);
    let len = input_length(config.alg, config.n);
    let x = generate_input(config.input_kind, len, config.m, input_seed)?;
    let mut meter = Meter::new();
    let start = Instant::now();
    let (correct, k_used) = match config.alg {
        AlgorithmId::Ed => {
            let params = EDParams {
                m: config.m,
                space_budget: space,
                epsilon: config.epsilon,
                seed: alg_seed,
                k: None,
            };
            let verdict = ed_decide(&x, &params, &mut meter)?;
            let truly_distinct = {
                let mut copy = x.clone();
                copy.sort_unstable();
                copy.windows(2).all(|p| p[0] != p[1])
            };
            let correct = match verdict.outcome {
                EDOutcome::Distinct => truly_distinct,
                EDOutcome::Duplicate(_, _) => !truly_distinct,
            };
            let k = crate::element_distinctness::choose_k(space, len as u32).unwrap_or(2);
            (correct, k as u64)
        }
        AlgorithmId::Fk | AlgorithmId::F0Mod2 => {
            let mod2 = config.alg == AlgorithmId::F0Mod2;
            let k = if mod2 { 0 } else { config.k_stat };
            let out = fk_window_all(&x, config.n, k, space, mod2, &mut meter)?;
            let stat = if mod2 { Statistic::F0Mod2 } else { Statistic::Fk(k) };
            let expect = brute_window_stats(&x, OracleSpec { statistic: stat, n: config.n })?;
            let correct = match expect {
                OracleOutputs::Counts(c) => out.as_big() == c,
                _ => unreachable!(),
            };
            (correct, k as u64)
        }
        AlgorithmId::OrderMax | AlgorithmId::OrderMin => {
            let direction = if config.alg == AlgorithmId::OrderMax {
                Direction::Max
            } else {
                Direction::Min
            };
            let out = max_window_all(&x, config.n, direction, &mut meter)?;
            let stat = match direction {
                Direction::Max => Statistic::Max,
                Direction::Min => Statistic::Min,
            };
            let expect = brute_window_stats(&x, OracleSpec { statistic: stat, n: config.n })?;
            let correct = match expect {
                OracleOutputs::Symbols(s) => out.values == s,
                _ => unreachable!(),
            };
            let t = if direction == Direction::Max { config.n as u64 } else { 1 };
            (correct, t)
        }
        AlgorithmId::SlidingEdExact | AlgorithmId::SlidingEdRandomized | AlgorithmId::SlidingEdAverage => {
            let bits = match config.alg {
                AlgorithmId::SlidingEdExact => {
                    let mut backend = ExactBackend::new(&mut meter);
                    ed_window_all(&x, config.n, &mut backend, EdWindowMode::Exact)?.outputs.bits
                }
                AlgorithmId::SlidingEdRandomized => {
                    let mut backend =
                        RandomizedBackend::new(config.m, space, config.epsilon, alg_seed);
                    let report =
                        ed_window_all(&x, config.n, &mut backend, EdWindowMode::Randomized)?;
                    meter.absorb(&backend.meter);
                    report.outputs.bits
                }
                _ => ed_window_average(&x, config.n, &mut meter)?.bits,
            };
            let expect =
                brute_window_stats(&x, OracleSpec { statistic: Statistic::Ed, n: config.n })?;
            let correct = match expect {
                OracleOutputs::Bits(b) => bits == b,
                _ => unreachable!(),
            };
            (correct, 0)
        }
    };
    let wall_ns = start.elapsed().as_nanos() as u64;
    if !correct && config.alg.is_exact() {
        return Err(Error::Input(format!(
            "oracle mismatch for exact algorithm {} at space {space} trial {trial}",
            config.alg.name()
        )));
    }
    // Soft space budget: the space-budgeted algorithms must keep their
    // tracked cells within the budget. The element-distinctness small-input
    // fallback sorts an index array and is exempt below its cutoff.
    let budgeted = match config.alg {
        AlgorithmId::Fk | AlgorithmId::F0Mod2 => true,
        AlgorithmId::Ed => len >= crate::element_distinctness::SMALL_N_CUTOFF,
        _ => false,
    };
    if budgeted && meter.peak_cells > space {
        return Err(Error::Config(format!(
            "algorithm {} exceeded its space budget: {} > {space}",
            config.alg.name(),
            meter.peak_cells
        )));
    }
    Ok(RunRow {
        alg: config.alg.name().to_string(),
        n: config.n,
        space_budget: space,
        k: k_used,
        trial,
        fn_evals: meter.fn_evals,
        comparisons: meter.comparisons,
        dict_ops: meter.dict_ops,
        peak_cells: meter.peak_cells,
        correct,
        wall_ns,
    })
}

/// Statistical checks of the probability facts behind the randomized
/// algorithms. Margins are fixed and documented so false alarms stay rare at
/// the mandated trial counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaId {
    /// Reachable set of a random hash chain stays within the round cutoff
    /// with probability at least 8/9.
    Closure,
    /// A round on a once-duplicated input finds the duplicate with
    /// probability at least k/(18n).
    FoundDuplicate,
    /// First duplicate among uniform samples appears before n/2 draws except
    /// with probability e^{-n/16}.
    BirthdayTail,
    /// Squared first-duplicate index has mean at most 4n.
    BirthdaySecondMoment,
}

impl LemmaId {
    pub fn name(&self) -> &'static str {
        match self {
            LemmaId::Closure => "closure",
            LemmaId::FoundDuplicate => "found-duplicate",
            LemmaId::BirthdayTail => "birthday-tail",
            LemmaId::BirthdaySecondMoment => "birthday-second-moment",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StatReport {
    pub lemma: String,
    pub n: u32,
    pub k: u32,
    pub trials: u64,
    pub empirical: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct StatParams {
    pub n: u32,
    pub k: u32,
    pub trials: u64,
    pub seed: u64,
}

/// Absolute slack under the 8/9 closure bound accepted by the check.
pub const CLOSURE_SLACK: f64 = 0.035;
/// The found-duplicate frequency must reach this fraction of k/(18n).
pub const FOUND_DUPLICATE_FACTOR: f64 = 0.8;
/// The birthday tail may exceed its bound by at most this factor.
pub const BIRTHDAY_TAIL_FACTOR: f64 = 2.0;

pub fn stat_check(lemma: LemmaId, params: StatParams) -> Result<StatReport> {
    if params.trials < 500 {
        return Err(Error::Argument("statistical checks need at least 500 trials".into()));
    }
    let n = params.n;
    let k = params.k;
    let report = |empirical: f64, bound: f64, pass: bool| StatReport {
        lemma: lemma.name().to_string(),
        n,
        k,
        trials: params.trials,
        empirical,
        bound,
        pass,
    };
    match lemma {
        LemmaId::Closure => {
            let x = generate_input(InputKind::AllDistinct, n as usize, n, params.seed)?;
            let within: u64 = (0..params.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = derive_seed(params.seed, t);
                    u64::from(round_within_cutoff(&x, n, k, seed))
                })
                .sum();
            let empirical = within as f64 / params.trials as f64;
            let bound = 8.0 / 9.0;
            Ok(report(empirical, bound, empirical >= bound - CLOSURE_SLACK))
        }
        LemmaId::FoundDuplicate => {
            let x = {
                let mut x = generate_input(InputKind::AllDistinct, n as usize, n, params.seed)?;
                // One duplicated value; positions fixed by the seed.
                let mut rng = SplitMix64::new(derive_seed(params.seed, u64::MAX));
                let a = rng.next_below(n as u64 / 2) as usize;
                let b = n as usize / 2 + rng.next_below(n as u64 / 2) as usize;
                x[b] = x[a];
                x
            };
            let found: u64 = (0..params.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = derive_seed(params.seed, t);
                    let mut meter = Meter::new();
                    let hit = crate::element_distinctness::single_round(&x, n, k, seed, &mut meter)
                        .map(|w| w.is_some())
                        .unwrap_or(false);
                    u64::from(hit)
                })
                .sum();
            let empirical = found as f64 / params.trials as f64;
            let bound = k as f64 / (18.0 * n as f64);
            Ok(report(empirical, bound, empirical >= FOUND_DUPLICATE_FACTOR * bound))
        }
        LemmaId::BirthdayTail => {
            let half = (n as u64).div_ceil(2);
            let hits: u64 = (0..params.trials)
                .into_par_iter()
                .map(|t| u64::from(first_duplicate_index(n, derive_seed(params.seed, t)) >= half))
                .sum();
            let empirical = hits as f64 / params.trials as f64;
            let bound = (-(n as f64) / 16.0).exp();
            Ok(report(empirical, bound, empirical <= BIRTHDAY_TAIL_FACTOR * bound))
        }
        LemmaId::BirthdaySecondMoment => {
            let total: f64 = (0..params.trials)
                .into_par_iter()
                .map(|t| {
                    let x = first_duplicate_index(n, derive_seed(params.seed, t)) as f64;
                    x * x
                })
                .sum();
            let empirical = total / params.trials as f64;
            let bound = 4.0 * n as f64;
            Ok(report(empirical, bound, empirical <= bound))
        }
    }
}

/// One bounded collision-finding round; reports whether the whole reachable
/// set fit under the explored-vertex cutoff.
fn round_within_cutoff(x: &[u32], n: u32, k: u32, seed: u64) -> bool {
    let chain = HashChain::new(x.to_vec(), n, seed).expect("valid chain input");
    let mut fv = FunctionView::from_chain(chain);
    let mut rng = SplitMix64::new(seed ^ 0xA5A5_5A5A_0F0F_F0F0);
    let starts: Vec<u32> = (0..k).map(|_| rng.next_in_domain(n as u64) as u32).collect();
    let budget = round_cutoff(k, n);
    let res = collide::collide_k(&mut fv, &starts, Some(budget)).expect("collide runs");
    res.complete
}

/// Number of i.u.d. samples from [1, n] drawn when the first repeat appears.
fn first_duplicate_index(n: u32, seed: u64) -> u64 {
    let mut rng = SplitMix64::new(seed);
    let mut seen = vec![false; n as usize + 1];
    let mut count = 0u64;
    loop {
        let v = rng.next_in_domain(n as u64) as usize;
        count += 1;
        if seen[v] {
            return count;
        }
        seen[v] = true;
    }
}

/// 64-bit FNV-1a digest of a value sequence: for each value, the UTF-8 bytes
/// of its decimal representation followed by one b'\n' are folded in with
/// `h = (h ^ byte) * 0x100000001b3`, starting from 0xcbf29ce484222325.
pub fn digest_values<I, S>(values: I) -> u64
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut fold = |b: u8| {
        h = (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3);
    };
    for v in values {
        for &b in v.as_ref().as_bytes() {
            fold(b);
        }
        fold(b'\n');
    }
    h
}
