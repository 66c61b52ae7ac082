//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantity next to its threshold. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use swstat_core::collide::{ceil_log2, collide_k};
use swstat_core::element_distinctness::{
    choose_k, ed_decide, round_cutoff, EDOutcome, EDParams,
};
use swstat_core::freq_moments::fk_window_all;
use swstat_core::functional_graph::FunctionView;
use swstat_core::harness::{
    generate_input, rows_to_csv, run_experiment, stat_check, AlgorithmId, InputKind, LemmaId,
    RunConfig, RunRow, StatParams,
};
use swstat_core::meter::Meter;
use swstat_core::oracle::{
    brute_collisions, brute_window_stats, OracleOutputs, OracleSpec, Statistic,
};
use swstat_core::order_stats::{max_window_all, Direction};
use swstat_core::rng::{derive_seed, SplitMix64};
use swstat_core::sliding_ed::{ed_window_all, ed_window_average, EdWindowMode, ExactBackend};

fn regress(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    (sxy / sxx, (sxy * sxy) / (sxx * syy))
}

/// Applies `f` to every sequence of the given length over alphabet
/// `{1..=alpha}`, in parallel; returns the number of inputs where `f` is
/// false.
fn count_exhaustive_failures<F>(len: usize, alpha: u32, f: F) -> u64
where
    F: Fn(&[u32]) -> bool + Sync,
{
    let total: u64 = (alpha as u64).pow(len as u32);
    let failures = AtomicU64::new(0);
    (0..total).into_par_iter().for_each(|index| {
        let mut x = vec![0u32; len];
        let mut rem = index;
        for slot in x.iter_mut() {
            *slot = (rem % alpha as u64) as u32 + 1;
            rem /= alpha as u64;
        }
        if !f(&x) {
            failures.fetch_add(1, Ordering::Relaxed);
        }
    });
    failures.load(Ordering::Relaxed)
}

fn oracle_bits(x: &[u32], n: usize) -> Vec<bool> {
    match brute_window_stats(x, OracleSpec { statistic: Statistic::Ed, n }).unwrap() {
        OracleOutputs::Bits(b) => b,
        _ => unreachable!(),
    }
}

fn exact_sliding_bits(x: &[u32], n: usize) -> Vec<bool> {
    let mut meter = Meter::new();
    let mut backend = ExactBackend::new(&mut meter);
    ed_window_all(x, n, &mut backend, EdWindowMode::Exact).unwrap().outputs.bits
}

fn average_sliding_bits(x: &[u32], n: usize) -> Vec<bool> {
    let mut meter = Meter::new();
    ed_window_average(x, n, &mut meter).unwrap().bits
}

#[test]
fn criterion_01_collide_oracle_equivalence() {
    let started = Instant::now();
    let random_mismatches = AtomicU64::new(0);
    (0..10_000u64).into_par_iter().for_each(|i| {
        let mut rng = SplitMix64::new(derive_seed(0xAC01, i));
        let n = 16 + rng.next_below(241) as u32; // 16..=256
        let f: Vec<u32> = (0..n).map(|_| rng.next_in_domain(n as u64) as u32).collect();
        let k = 1 + rng.next_below(16) as usize;
        let starts: Vec<u32> = (0..k).map(|_| rng.next_in_domain(n as u64) as u32).collect();
        if !collide_matches_oracle(&f, &starts) {
            random_mismatches.fetch_add(1, Ordering::Relaxed);
        }
    });

    let adversarial_mismatches = AtomicU64::new(0);
    (0..200u64).into_par_iter().for_each(|i| {
        let mut rng = SplitMix64::new(derive_seed(0xAC02, i));
        let n = [16u32, 32, 64, 128, 256][(i % 5) as usize];
        let f: Vec<u32> = match i % 4 {
            // Constant function.
            0 => vec![rng.next_in_domain(n as u64) as u32; n as usize],
            // Involution: random pairing with fixed points.
            1 => {
                let mut perm: Vec<u32> = (1..=n).collect();
                rng.shuffle(&mut perm);
                let mut f = vec![0u32; n as usize];
                let mut iter = perm.chunks_exact(2);
                for pair in &mut iter {
                    f[(pair[0] - 1) as usize] = pair[1];
                    f[(pair[1] - 1) as usize] = pair[0];
                }
                for &rest in iter.remainder() {
                    f[(rest - 1) as usize] = rest;
                }
                f
            }
            // One long cycle through all vertices.
            2 => {
                let mut order: Vec<u32> = (1..=n).collect();
                rng.shuffle(&mut order);
                let mut f = vec![0u32; n as usize];
                for w in 0..n as usize {
                    f[(order[w] - 1) as usize] = order[(w + 1) % n as usize];
                }
                f
            }
            // Star into a short cycle: most vertices point at the hub.
            _ => {
                let r = 2 + rng.next_below(6) as u32;
                let mut f: Vec<u32> = (0..n).map(|_| 1u32).collect();
                for c in 1..=r {
                    f[(c - 1) as usize] = c % r + 1;
                }
                f
            }
        };
        let k = 1 + rng.next_below(16) as usize;
        let starts: Vec<u32> = (0..k).map(|_| rng.next_in_domain(n as u64) as u32).collect();
        if !collide_matches_oracle(&f, &starts) {
            adversarial_mismatches.fetch_add(1, Ordering::Relaxed);
        }
    });

    let mism = random_mismatches.load(Ordering::Relaxed)
        + adversarial_mismatches.load(Ordering::Relaxed);
    let secs = started.elapsed().as_secs_f64();
    println!(
        "criterion 01 collide-oracle-equivalence: {} — 0 of 10200 mismatches required, got {mism}; {secs:.1}s (target 60s)",
        if mism == 0 && secs < 60.0 { "PASS" } else { "FAIL" }
    );
    assert_eq!(mism, 0);
    assert!(secs < 60.0, "runtime {secs:.1}s exceeded the 60s target");
}

fn collide_matches_oracle(f: &[u32], starts: &[u32]) -> bool {
    let mut fv = FunctionView::from_table(f.to_vec()).unwrap();
    let res = collide_k(&mut fv, starts, None).unwrap();
    let oracle_fv = FunctionView::from_table(f.to_vec()).unwrap();
    let expect = brute_collisions(&oracle_fv, starts).unwrap();
    let got: Vec<(u32, Vec<u32>)> = res.records.iter().map(|r| (r.v, r.preds.clone())).collect();
    got == expect.records && res.explored_count == expect.reachable_count && res.complete
}

#[test]
fn criterion_02_ed_soundness() {
    // No Duplicate verdict on a distinct input, for any size, seed or budget.
    // (Witness validity of every Duplicate is a hard assertion inside
    // ed_decide itself, so any experiment anywhere enforces it.)
    let cases: Vec<(usize, u64, u64)> = [16usize, 63, 64, 100, 256, 1024, 4096]
        .iter()
        .flat_map(|&n| {
            (0..12u64).flat_map(move |seed| [64u64, 256, 1024].map(|space| (n, seed, space)))
        })
        .collect();
    let violations: u64 = cases
        .par_iter()
        .map(|&(n, seed, space)| {
            let x = generate_input(InputKind::AllDistinct, n, (4 * n) as u32, seed).unwrap();
            let params = EDParams {
                m: (4 * n) as u32,
                space_budget: space,
                epsilon: 0.125,
                seed: derive_seed(0x50, seed),
                k: None,
            };
            let mut meter = Meter::new();
            let v = ed_decide(&x, &params, &mut meter).unwrap();
            u64::from(!matches!(v.outcome, EDOutcome::Distinct))
        })
        .sum();
    println!(
        "criterion 02 ed-soundness: {} — 0 false duplicates required over {} distinct-input runs, got {violations}",
        if violations == 0 { "PASS" } else { "FAIL" },
        cases.len()
    );
    assert_eq!(violations, 0);
}

#[test]
fn criterion_03_ed_completeness() {
    let started = Instant::now();
    let n: usize = 4096;
    let space = 64 * ceil_log2(n as u64); // 768 cells
    assert_eq!(choose_k(space, n as u32).unwrap(), 24);
    let trials = 500u64;
    let misses: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let x = generate_input(
                InputKind::PlantedPair { distance: None },
                n,
                n as u32,
                derive_seed(0xC3, t),
            )
            .unwrap();
            let params = EDParams {
                m: n as u32,
                space_budget: space,
                epsilon: 0.125,
                seed: derive_seed(0xC3A6, t),
                k: None,
            };
            let mut meter = Meter::new();
            let v = ed_decide(&x, &params, &mut meter).unwrap();
            u64::from(matches!(v.outcome, EDOutcome::Distinct))
        })
        .sum();
    let rate = misses as f64 / trials as f64;
    let secs = started.elapsed().as_secs_f64();
    println!(
        "criterion 03 ed-completeness: {} — miss rate {rate:.4} <= 0.15 required ({misses}/{trials} misses); {secs:.1}s (target 300s)",
        if rate <= 0.15 && secs < 300.0 { "PASS" } else { "FAIL" }
    );
    assert!(rate <= 0.15);
    assert!(secs < 300.0, "runtime {secs:.1}s exceeded the 300s target");
}

#[test]
fn criterion_04_closure_lemma() {
    assert_eq!(round_cutoff(8, 1024), 182);
    let report = stat_check(
        LemmaId::Closure,
        StatParams { n: 1024, k: 8, trials: 2000, seed: 0xC4 },
    )
    .unwrap();
    println!(
        "criterion 04 closure-lemma: {} — fraction within cutoff {:.4} >= 0.85 required (paper bound {:.4})",
        if report.empirical >= 0.85 { "PASS" } else { "FAIL" },
        report.empirical,
        report.bound
    );
    assert!(report.empirical >= 0.85);
    assert!(report.pass);
}

#[test]
fn criterion_05_found_duplicate_lemma() {
    let report = stat_check(
        LemmaId::FoundDuplicate,
        StatParams { n: 1024, k: 8, trials: 5000, seed: 0xC5 },
    )
    .unwrap();
    let threshold = 0.8 * report.bound;
    println!(
        "criterion 05 found-duplicate-lemma: {} — per-round success {:.5} >= {:.5} required",
        if report.empirical >= threshold { "PASS" } else { "FAIL" },
        report.empirical,
        threshold
    );
    assert!(report.empirical >= threshold);
    assert!(report.pass);
}

#[test]
fn criterion_06_sliding_ed_exactness() {
    // Exhaustive over alphabet {1,2,3} for every n <= 6.
    let mut exhaustive_failures = 0u64;
    let mut exhaustive_total = 0u64;
    for n in 1usize..=6 {
        let len = 2 * n - 1;
        exhaustive_total += 3u64.pow(len as u32);
        exhaustive_failures += count_exhaustive_failures(len, 3, |x| {
            let expect = oracle_bits(x, n);
            exact_sliding_bits(x, n) == expect && average_sliding_bits(x, n) == expect
        });
    }
    // 10^3 random inputs split over n in {128, 512, 2048}.
    let random_failures = AtomicU64::new(0);
    let sizes = [128usize, 512, 2048];
    (0..1002u64).into_par_iter().for_each(|i| {
        let n = sizes[(i % 3) as usize];
        let alpha = match (i / 3) % 3 {
            0 => n / 2,
            1 => n,
            _ => 2 * n,
        } as u32;
        let x =
            generate_input(InputKind::Uniform, 2 * n - 1, alpha.max(1), derive_seed(0xC6, i))
                .unwrap();
        let expect = oracle_bits(&x, n);
        if exact_sliding_bits(&x, n) != expect || average_sliding_bits(&x, n) != expect {
            random_failures.fetch_add(1, Ordering::Relaxed);
        }
    });
    let rf = random_failures.load(Ordering::Relaxed);
    println!(
        "criterion 06 sliding-ed-exactness: {} — 0 mismatches required over {exhaustive_total} exhaustive + 1002 random inputs, got {}",
        if exhaustive_failures == 0 && rf == 0 { "PASS" } else { "FAIL" },
        exhaustive_failures + rf
    );
    assert_eq!(exhaustive_failures, 0);
    assert_eq!(rf, 0);
}

#[test]
fn criterion_07_average_case_cost() {
    let n = 1024usize;
    let trials = 100u64;
    let total: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let x =
                generate_input(InputKind::Uniform, 2 * n - 1, n as u32, derive_seed(0xC7, t))
                    .unwrap();
            let mut meter = Meter::new();
            ed_window_average(&x, n, &mut meter).unwrap();
            meter.comparisons
        })
        .sum();
    let mean = total as f64 / trials as f64;
    let bound = 20.0 * n as f64;
    println!(
        "criterion 07 average-case-cost: {} — mean comparisons {mean:.0} <= {bound:.0} required",
        if mean <= bound { "PASS" } else { "FAIL" }
    );
    assert!(mean <= bound);
}

#[test]
fn criterion_08_fk_exactness() {
    // Exhaustive over alphabet {1..4} for every n <= 6, all k and mod2.
    let mut exhaustive_failures = 0u64;
    let mut exhaustive_total = 0u64;
    for n in 1usize..=6 {
        let len = 2 * n - 1;
        exhaustive_total += 4u64.pow(len as u32);
        exhaustive_failures += count_exhaustive_failures(len, 4, |x| {
            (0..=3u32).all(|k| {
                let expect =
                    match brute_window_stats(x, OracleSpec { statistic: Statistic::Fk(k), n })
                        .unwrap()
                    {
                        OracleOutputs::Counts(c) => c,
                        _ => unreachable!(),
                    };
                [false, true].iter().all(|&mod2| {
                    let mut meter = Meter::new();
                    let out = fk_window_all(x, n, k, 64, mod2, &mut meter).unwrap();
                    let want: Vec<_> = if mod2 {
                        expect.iter().map(|v| v % 2u32).collect()
                    } else {
                        expect.clone()
                    };
                    out.as_big() == want && meter.peak_cells <= 64
                })
            })
        });
    }
    // 10^3 random inputs up to n = 2048 across the space grid 2^6..2^12.
    let random_failures = AtomicU64::new(0);
    let sizes = [16usize, 64, 256, 1024, 2048];
    (0..1000u64).into_par_iter().for_each(|i| {
        let n = sizes[(i % 5) as usize];
        let space = 1u64 << (6 + (i / 5) % 7);
        let k = (i % 4) as u32;
        let mod2 = (i / 20) % 2 == 1;
        let alpha = if i % 2 == 0 { n } else { 2 * n } as u32;
        let x = generate_input(InputKind::Uniform, 2 * n - 1, alpha, derive_seed(0xC8, i))
            .unwrap();
        let mut meter = Meter::new();
        let out = fk_window_all(&x, n, k, space, mod2, &mut meter).unwrap();
        let stat = if mod2 && k == 0 { Statistic::F0Mod2 } else { Statistic::Fk(k) };
        let expect = match brute_window_stats(&x, OracleSpec { statistic: stat, n }).unwrap() {
            OracleOutputs::Counts(c) => {
                if mod2 && k != 0 {
                    c.into_iter().map(|v| v % 2u32).collect()
                } else {
                    c
                }
            }
            _ => unreachable!(),
        };
        if out.as_big() != expect || meter.peak_cells > space {
            random_failures.fetch_add(1, Ordering::Relaxed);
        }
    });
    let rf = random_failures.load(Ordering::Relaxed);
    println!(
        "criterion 08 fk-exactness: {} — 0 mismatches required over {exhaustive_total} exhaustive inputs (8 configs each) + 1000 random runs, got {}",
        if exhaustive_failures == 0 && rf == 0 { "PASS" } else { "FAIL" },
        exhaustive_failures + rf
    );
    assert_eq!(exhaustive_failures, 0);
    assert_eq!(rf, 0);
}

#[test]
fn criterion_09_fk_scaling() {
    let n = 4096usize;
    let seeds = [1u64, 2, 3];
    let points: Vec<(f64, f64)> = (6..=12u32)
        .into_par_iter()
        .map(|exp| {
            let s = 1u64 << exp;
            let total: u64 = seeds
                .iter()
                .map(|&seed| {
                    let x =
                        generate_input(InputKind::Uniform, 2 * n - 1, n as u32, seed).unwrap();
                    let mut meter = Meter::new();
                    fk_window_all(&x, n, 0, s, false, &mut meter).unwrap();
                    meter.comparisons
                })
                .sum();
            let mean = total as f64 / seeds.len() as f64;
            ((s as f64).ln(), mean.ln())
        })
        .collect();
    let (slope, r2) = regress(&points);
    let ok = (-1.25..=-0.75).contains(&slope) && r2 >= 0.9;
    println!(
        "criterion 09 fk-scaling: {} — slope {slope:.3} in [-1.25, -0.75] and R^2 {r2:.4} >= 0.9 required",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!((-1.25..=-0.75).contains(&slope), "slope {slope}");
    assert!(r2 >= 0.9, "r2 {r2}");
}

/// Known red: the measured slope sits at about -0.33, outside the required
/// band. The per-success cost is e(k)/p(k) for per-round evaluation cost e
/// and per-round success probability p, and two effects flatten it below the
/// ideal -0.5: evaluations per round grow faster than sqrt(kn) because
/// revisited cycles are re-walked up to min(k, log n) times as they halve
/// (measured e/sqrt(kn): 5.9 at k=2 up to 10.8 at k=128, a +0.145 slope
/// contribution), and the explored-vertex cutoff truncates a larger share of
/// successes at k=128 (p*n/k drops from ~2.0 to 1.8, +0.04). Both effects
/// follow from the mandated per-iteration cycle walks and the
/// distinct-explored budget semantics, so the band is not reachable without
/// removing mandated work or mis-counting evaluations. The test measures and
/// asserts the criterion exactly as stated.
#[test]
fn criterion_10_ed_scaling() {
    let n: usize = 1 << 14;
    let trials = 256u64;
    let ks = [2u32, 8, 32, 128];
    let points: Vec<(f64, f64)> = ks
        .iter()
        .map(|&k| {
            let total: u64 = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let x = generate_input(
                        InputKind::PlantedPair { distance: None },
                        n,
                        n as u32,
                        derive_seed(0xC10, t),
                    )
                    .unwrap();
                    let params = EDParams {
                        m: n as u32,
                        space_budget: 0, // unused: k is forced directly
                        epsilon: 0.125,
                        seed: derive_seed(0xC10A + k as u64, t),
                        k: Some(k),
                    };
                    let mut meter = Meter::new();
                    ed_decide(&x, &params, &mut meter).unwrap();
                    meter.fn_evals
                })
                .sum();
            ((k as f64).ln(), (total as f64 / trials as f64).ln())
        })
        .collect();
    let (slope, r2) = regress(&points);
    let ok = (-0.65..=-0.35).contains(&slope) && r2 >= 0.85;
    println!(
        "criterion 10 ed-scaling: {} — slope {slope:.3} in [-0.65, -0.35] and R^2 {r2:.4} >= 0.85 required",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!((-0.65..=-0.35).contains(&slope), "slope {slope}");
    assert!(r2 >= 0.85, "r2 {r2}");
}

#[test]
fn criterion_11_extrema() {
    // Exhaustive plus bounds.
    let mut exhaustive_failures = 0u64;
    for n in 1usize..=6 {
        let len = 2 * n - 1;
        exhaustive_failures += count_exhaustive_failures(len, 4, |x| {
            [Direction::Max, Direction::Min].iter().all(|&d| extrema_ok(x, n, d))
        });
    }
    // Random inputs up to n = 2^15.
    let random_failures = AtomicU64::new(0);
    let sizes = [64usize, 1024, 4096, 1 << 15];
    (0..200u64).into_par_iter().for_each(|i| {
        let n = sizes[(i % 4) as usize];
        let x = generate_input(InputKind::Uniform, 2 * n - 1, n as u32, derive_seed(0xC11, i))
            .unwrap();
        let d = if i % 2 == 0 { Direction::Max } else { Direction::Min };
        if !extrema_ok(&x, n, d) {
            random_failures.fetch_add(1, Ordering::Relaxed);
        }
    });
    let rf = random_failures.load(Ordering::Relaxed);
    println!(
        "criterion 11 extrema: {} — oracle equality with comparisons <= 4n(log n + 1) and cells <= 4(log n + 1), 0 failures required, got {}",
        if exhaustive_failures == 0 && rf == 0 { "PASS" } else { "FAIL" },
        exhaustive_failures + rf
    );
    assert_eq!(exhaustive_failures, 0);
    assert_eq!(rf, 0);
}

fn extrema_ok(x: &[u32], n: usize, direction: Direction) -> bool {
    let stat = match direction {
        Direction::Max => Statistic::Max,
        Direction::Min => Statistic::Min,
    };
    let expect = match brute_window_stats(x, OracleSpec { statistic: stat, n }).unwrap() {
        OracleOutputs::Symbols(s) => s,
        _ => unreachable!(),
    };
    let mut meter = Meter::new();
    let out = max_window_all(x, n, direction, &mut meter).unwrap();
    out.values == expect
        && meter.comparisons <= 4 * n as u64 * (ceil_log2(n as u64) + 1)
        && meter.peak_cells <= 4 * (ceil_log2(n as u64) + 1)
}

#[test]
fn criterion_12_birthday_lemma() {
    let mut all_ok = true;
    let mut detail = String::new();
    for n in [64u32, 256] {
        let params = StatParams { n, k: 0, trials: 10_000, seed: 0xC12 };
        let tail = stat_check(LemmaId::BirthdayTail, params).unwrap();
        let tail_ok = tail.empirical <= 2.0 * tail.bound;
        let sq = stat_check(LemmaId::BirthdaySecondMoment, params).unwrap();
        let sq_ok = sq.empirical <= sq.bound;
        all_ok &= tail_ok && sq_ok;
        detail.push_str(&format!(
            " [n={n}: tail {:.2e} <= {:.2e}, E(X^2) {:.0} <= {:.0}]",
            tail.empirical,
            2.0 * tail.bound,
            sq.empirical,
            sq.bound
        ));
        assert!(tail_ok, "tail bound violated at n={n}: {tail:?}");
        assert!(sq_ok, "second moment violated at n={n}: {sq:?}");
    }
    println!(
        "criterion 12 birthday-lemma: {} —{detail}",
        if all_ok { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_13_reproducibility() {
    let configs = [
        RunConfig {
            alg: AlgorithmId::Fk,
            n: 256,
            m: 256,
            k_stat: 2,
            space_grid: vec![64, 128, 256, 512, 1024],
            epsilon: 0.125,
            trials: 3,
            base_seed: 0xC13,
            input_kind: InputKind::Uniform,
        },
        RunConfig {
            alg: AlgorithmId::Ed,
            n: 512,
            m: 512,
            k_stat: 0,
            space_grid: vec![128, 512],
            epsilon: 0.125,
            trials: 4,
            base_seed: 0xC13B,
            input_kind: InputKind::PlantedPair { distance: None },
        },
    ];
    let mut ok = true;
    for config in &configs {
        let a = run_experiment(config).unwrap();
        let b = run_experiment(config).unwrap();
        let strip = |rows: &[RunRow]| -> String {
            let stripped: Vec<RunRow> =
                rows.iter().map(|r| RunRow { wall_ns: 0, ..r.clone() }).collect();
            rows_to_csv(&stripped)
        };
        ok &= strip(&a) == strip(&b);
    }
    println!(
        "criterion 13 reproducibility: {} — identical CSV modulo wall_ns over {} configs",
        if ok { "PASS" } else { "FAIL" },
        configs.len()
    );
    assert!(ok);
}
