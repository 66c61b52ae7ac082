use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use swstat_core::collide::collide_k;
use swstat_core::element_distinctness::{ed_decide, EDOutcome, EDParams};
use swstat_core::freq_moments::fk_window_all;
use swstat_core::functional_graph::{parse_table, FunctionView};
use swstat_core::harness::{
    digest_values, generate_input, rows_to_csv, run_experiment, stat_check, AlgorithmId, InputKind,
    LemmaId, RunConfig, StatParams,
};
use swstat_core::meter::Meter;
use swstat_core::oracle::{brute_window_stats, OracleOutputs, OracleSpec, Statistic};
use swstat_core::order_stats::{max_window_all, Direction};
use swstat_core::sliding_ed::{
    ed_window_all, ed_window_average, EdWindowMode, ExactBackend, RandomizedBackend,
};

const DEFAULT_SEED: u64 = 0x5357_5354;

/// Sliding-window statistics with a metered cost model.
#[derive(Parser)]
#[command(name = "swstat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find all collisions reachable from a set of start vertices.
    Collide {
        /// Function-table file: first token n, then f(1..=n).
        #[arg(long)]
        fn_file: PathBuf,
        /// Comma-separated 1-indexed start vertices.
        #[arg(long)]
        starts: String,
        /// Cap on distinct explored vertices.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Decide element distinctness of an input sequence.
    Ed {
        /// Input file of whitespace-separated integers.
        #[arg(long)]
        input: PathBuf,
        /// Tracked-cell budget.
        #[arg(long)]
        space: u64,
        /// Miss probability bound in (0, 1).
        #[arg(long, default_value_t = 0.125)]
        epsilon: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Element distinctness of every window of length N.
    SlidingEd {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        window: usize,
        #[arg(long, value_enum, default_value_t = SlidingMode::Exact)]
        mode: SlidingMode,
        #[arg(long, default_value_t = 256)]
        space: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Frequency moment F_k of every window of length N.
    Fk {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        window: usize,
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long)]
        space: u64,
        /// Reduce every output mod 2.
        #[arg(long)]
        mod2: bool,
        /// Print a 64-bit digest instead of the values.
        #[arg(long)]
        digest: bool,
        #[arg(long)]
        json: bool,
    },
    /// Sliding-window maximum or minimum.
    Order {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        window: usize,
        #[arg(long, value_enum)]
        stat: OrderStat,
    },
    /// Brute-force reference outputs, mirroring the main subcommands.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        window: usize,
        /// ed | fk | f0mod2 | max | min | ot
        #[arg(long)]
        stat: String,
        #[arg(long, default_value_t = 0)]
        k: u32,
        /// Order-statistic index for --stat ot.
        #[arg(long, default_value_t = 1)]
        t: u32,
        #[arg(long)]
        digest: bool,
    },
    /// Sweep an algorithm over a space grid and emit per-trial meter rows.
    Bench {
        /// ed | fk | f0mod2 | order-max | order-min | sliding-ed-exact |
        /// sliding-ed-randomized | sliding-ed-average
        #[arg(long)]
        alg: String,
        #[arg(long)]
        n: usize,
        /// Alphabet bound (defaults to n).
        #[arg(long)]
        m: Option<u32>,
        /// Moment order for fk.
        #[arg(long, default_value_t = 0)]
        k: u32,
        /// Space grid "LO..HI", doubling from LO, HI always included.
        #[arg(long)]
        sweep_space: String,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long, default_value_t = 0.125)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = KindArg::Uniform)]
        kind: KindArg,
        /// Planted-pair distance (seed-derived when omitted).
        #[arg(long)]
        distance: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV output path ("-" for stdout).
        #[arg(long)]
        csv: String,
        /// Optional JSON-lines mirror path.
        #[arg(long)]
        jsonl: Option<PathBuf>,
    },
    /// Statistical checks of the probability bounds.
    Check {
        /// closure | found-duplicate | birthday
        #[arg(long)]
        lemma: String,
        #[arg(long, default_value_t = 1024)]
        n: u32,
        #[arg(long, default_value_t = 8)]
        k: u32,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a generated input sequence to stdout.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        len: usize,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        distance: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SlidingMode {
    Exact,
    Randomized,
    AverageCase,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderStat {
    Max,
    Min,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Uniform,
    AllDistinct,
    PlantedPair,
    Constant,
    FunctionTable,
}

impl KindArg {
    fn to_kind(self, distance: Option<u32>) -> InputKind {
        match self {
            KindArg::Uniform => InputKind::Uniform,
            KindArg::AllDistinct => InputKind::AllDistinct,
            KindArg::PlantedPair => InputKind::PlantedPair { distance },
            KindArg::Constant => InputKind::Constant,
            KindArg::FunctionTable => InputKind::FunctionTable,
        }
    }
}

fn base_seed(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| std::env::var("SWSTAT_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(DEFAULT_SEED)
}

fn read_sequence(path: &PathBuf) -> Result<Vec<u32>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading input file {}", path.display()))?;
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        out.push(tok.parse::<u32>().with_context(|| format!("bad symbol {tok:?}"))?);
    }
    if out.is_empty() {
        bail!("input file {} holds no symbols", path.display());
    }
    Ok(out)
}

fn meter_json(meter: &Meter) -> serde_json::Value {
    json!({
        "fn_evals": meter.fn_evals,
        "comparisons": meter.comparisons,
        "dict_ops": meter.dict_ops,
        "peak_cells": meter.peak_cells,
    })
}

/// "LO..HI" -> doubling grid from LO, with HI always the last point.
fn parse_grid(s: &str) -> Result<Vec<u64>> {
    let (lo, hi) = s
        .split_once("..")
        .with_context(|| format!("grid {s:?} must look like LO..HI"))?;
    let lo: u64 = lo.trim().parse().context("bad grid lower bound")?;
    let hi: u64 = hi.trim().parse().context("bad grid upper bound")?;
    if lo == 0 || hi < lo {
        bail!("grid bounds must satisfy 0 < LO <= HI");
    }
    let mut grid = Vec::new();
    let mut v = lo;
    while v < hi {
        grid.push(v);
        v = v.saturating_mul(2);
    }
    grid.push(hi);
    Ok(grid)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Collide { fn_file, starts, budget, json } => {
            let text = fs::read_to_string(&fn_file)
                .with_context(|| format!("reading function table {}", fn_file.display()))?;
            let table = parse_table(&text)?;
            let mut fv = FunctionView::from_table(table)?;
            let starts: Vec<u32> = starts
                .split(',')
                .map(|s| s.trim().parse::<u32>().with_context(|| format!("bad start {s:?}")))
                .collect::<Result<_>>()?;
            let res = collide_k(&mut fv, &starts, budget)?;
            if json {
                println!(
                    "{}",
                    json!({
                        "records": res.records,
                        "explored_count": res.explored_count,
                        "complete": res.complete,
                        "meter": meter_json(fv.meter()),
                    })
                );
            } else {
                for rec in &res.records {
                    let preds: Vec<String> = rec.preds.iter().map(|p| p.to_string()).collect();
                    println!("{} <- {{{}}}", rec.v, preds.join(", "));
                }
                println!("explored {} vertices, complete: {}", res.explored_count, res.complete);
            }
        }
        Command::Ed { input, space, epsilon, seed, json } => {
            let x = read_sequence(&input)?;
            let m = *x.iter().max().expect("non-empty");
            let params =
                EDParams { m, space_budget: space, epsilon, seed: base_seed(seed), k: None };
            let mut meter = Meter::new();
            let verdict = ed_decide(&x, &params, &mut meter)?;
            if json {
                let outcome = match verdict.outcome {
                    EDOutcome::Distinct => json!({"outcome": "distinct"}),
                    EDOutcome::Duplicate(i, j) => json!({"outcome": "duplicate", "i": i, "j": j}),
                };
                println!(
                    "{}",
                    json!({
                        "verdict": outcome,
                        "rounds_used": verdict.rounds_used,
                        "meter": meter_json(&meter),
                    })
                );
            } else {
                match verdict.outcome {
                    EDOutcome::Distinct => println!("distinct"),
                    EDOutcome::Duplicate(i, j) => println!("duplicate at ({i}, {j})"),
                }
            }
        }
        Command::SlidingEd { input, window, mode, space, seed } => {
            let x = read_sequence(&input)?;
            let mut meter = Meter::new();
            let (bits, backend_calls, mode_name) = match mode {
                SlidingMode::Exact => {
                    let mut backend = ExactBackend::new(&mut meter);
                    let rep = ed_window_all(&x, window, &mut backend, EdWindowMode::Exact)?;
                    (rep.outputs, rep.backend_calls, "exact")
                }
                SlidingMode::Randomized => {
                    let m = *x.iter().max().expect("non-empty");
                    let mut backend = RandomizedBackend::new(m, space, 0.125, base_seed(seed));
                    let rep = ed_window_all(&x, window, &mut backend, EdWindowMode::Randomized)?;
                    meter.absorb(&backend.meter);
                    (rep.outputs, rep.backend_calls, "randomized")
                }
                SlidingMode::AverageCase => {
                    let out = ed_window_average(&x, window, &mut meter)?;
                    (out, 0, "average-case")
                }
            };
            println!("{}", bits.bit_string());
            println!(
                "{}",
                json!({
                    "n": window,
                    "mode": mode_name,
                    "backend_calls": backend_calls,
                    "meter": meter_json(&meter),
                })
            );
        }
        Command::Fk { input, window, k, space, mod2, digest, json } => {
            let x = read_sequence(&input)?;
            let mut meter = Meter::new();
            let out = fk_window_all(&x, window, k, space, mod2, &mut meter)?;
            let values = out.to_decimal_strings();
            if json {
                let mut body = json!({
                    "n": window,
                    "k": k,
                    "mod2": mod2,
                    "meter": meter_json(&meter),
                });
                if digest {
                    body["digest"] = json!(format!("{:016x}", digest_values(values.iter())));
                } else {
                    body["values"] = json!(values);
                }
                println!("{body}");
            } else if digest {
                println!("{:016x}", digest_values(values.iter()));
            } else {
                println!("{}", values.join(" "));
            }
        }
        Command::Order { input, window, stat } => {
            let x = read_sequence(&input)?;
            let direction = match stat {
                OrderStat::Max => Direction::Max,
                OrderStat::Min => Direction::Min,
            };
            let mut meter = Meter::new();
            let out = max_window_all(&x, window, direction, &mut meter)?;
            let values: Vec<String> = out.values.iter().map(|v| v.to_string()).collect();
            println!("{}", values.join(" "));
        }
        Command::Oracle { input, window, stat, k, t, digest } => {
            let x = read_sequence(&input)?;
            let statistic = match stat.as_str() {
                "ed" => Statistic::Ed,
                "fk" => Statistic::Fk(k),
                "f0mod2" => Statistic::F0Mod2,
                "max" => Statistic::Max,
                "min" => Statistic::Min,
                "ot" => Statistic::OrderStat(t),
                other => bail!("unknown statistic {other:?}"),
            };
            let out = brute_window_stats(&x, OracleSpec { statistic, n: window })?;
            match out {
                OracleOutputs::Bits(bits) => {
                    let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
                    println!("{s}");
                }
                OracleOutputs::Counts(counts) => {
                    let values: Vec<String> = counts.iter().map(|v| v.to_string()).collect();
                    if digest {
                        println!("{:016x}", digest_values(values.iter()));
                    } else {
                        println!("{}", values.join(" "));
                    }
                }
                OracleOutputs::Symbols(values) => {
                    let values: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                    println!("{}", values.join(" "));
                }
            }
        }
        Command::Bench {
            alg,
            n,
            m,
            k,
            sweep_space,
            trials,
            epsilon,
            kind,
            distance,
            seed,
            csv,
            jsonl,
        } => {
            let config = RunConfig {
                alg: AlgorithmId::parse(&alg)?,
                n,
                m: m.unwrap_or(n as u32).max(1),
                k_stat: k,
                space_grid: parse_grid(&sweep_space)?,
                epsilon,
                trials,
                base_seed: base_seed(seed),
                input_kind: kind.to_kind(distance),
            };
            let rows = run_experiment(&config)?;
            let csv_text = rows_to_csv(&rows);
            if csv == "-" {
                print!("{csv_text}");
            } else {
                fs::write(&csv, csv_text).with_context(|| format!("writing {csv}"))?;
                eprintln!("wrote {} rows to {csv}", rows.len());
            }
            if let Some(path) = jsonl {
                let mut text = String::new();
                for row in &rows {
                    text.push_str(&serde_json::to_string(row)?);
                    text.push('\n');
                }
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Check { lemma, n, k, trials, seed } => {
            let params = StatParams { n, k, trials, seed: base_seed(seed) };
            let lemmas: Vec<LemmaId> = match lemma.as_str() {
                "closure" => vec![LemmaId::Closure],
                "found-duplicate" => vec![LemmaId::FoundDuplicate],
                "birthday" => vec![LemmaId::BirthdayTail, LemmaId::BirthdaySecondMoment],
                other => bail!("unknown lemma {other:?}"),
            };
            let mut all_pass = true;
            for lemma in lemmas {
                let report = stat_check(lemma, params)?;
                all_pass &= report.pass;
                println!("{}", serde_json::to_string(&report)?);
            }
            if !all_pass {
                bail!("statistical check failed");
            }
        }
        Command::Gen { kind, len, m, distance, seed } => {
            let x = generate_input(kind.to_kind(distance), len, m, base_seed(seed))?;
            let values: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            println!("{}", values.join(" "));
        }
    }
    Ok(())
}
