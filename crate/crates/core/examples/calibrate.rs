//! Measurement runs behind the frozen constants in the crate and the
//! acceptance suite. Run with:
//!
//!   cargo run --example calibrate [section]
//!
//! Sections: collide, ed, fk, sliding, all (default).

use swstat_core::collide::{ceil_log2, collide_k, collide_k_with, CollideOptions};
use swstat_core::element_distinctness::{round_cutoff, single_round};
use swstat_core::freq_moments::fk_window_all;
use swstat_core::functional_graph::{FunctionView, HashChain};
use swstat_core::harness::{generate_input, InputKind};
use swstat_core::meter::Meter;
use swstat_core::rng::{derive_seed, SplitMix64};
use swstat_core::sliding_ed::{ed_window_all, ed_window_average, EdWindowMode, ExactBackend};

fn main() {
    let section = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    match section.as_str() {
        "collide" => collide_section(),
        "ed" => ed_section(),
        "fk" => fk_section(),
        "sliding" => sliding_section(),
        _ => {
            collide_section();
            ed_section();
            fk_section();
            sliding_section();
        }
    }
}

/// Max of eval_steps / (explored * (min(k, log n)+1) * (log k + 1)) over a
/// corpus of random tables, plus peak-cells-per-start.
fn collide_section() {
    let mut rng = SplitMix64::new(0xCA1B);
    let mut worst_ratio = 0.0f64;
    let mut worst_cells_per_k = 0.0f64;
    for _ in 0..20000 {
        let n = 8 + rng.next_below(248) as u32;
        let f: Vec<u32> = (0..n).map(|_| rng.next_in_domain(n as u64) as u32).collect();
        let k = 1 + rng.next_below(16) as usize;
        let starts: Vec<u32> = (0..k).map(|_| rng.next_in_domain(n as u64) as u32).collect();
        let mut fv = FunctionView::from_table(f).unwrap();
        let res = collide_k(&mut fv, &starts, None).unwrap();
        let denom = res.explored_count as f64
            * ((k as u64).min(ceil_log2(n as u64)) + 1) as f64
            * (ceil_log2(k as u64) + 1) as f64;
        worst_ratio = worst_ratio.max(res.eval_steps as f64 / denom);
        worst_cells_per_k = worst_cells_per_k.max(fv.meter().peak_cells as f64 / k as f64);
    }
    // Adversarial shapes: constants, involutions, one long cycle, star-into-cycle.
    for shape in 0..4 {
        for n in [16u32, 64, 256] {
            let f: Vec<u32> = match shape {
                0 => vec![1; n as usize],
                1 => (1..=n).map(|i| if i % 2 == 0 { i - 1 } else { (i % n) + 1 }).collect(),
                2 => (1..=n).map(|i| i % n + 1).collect(),
                _ => (1..=n).map(|i| if i <= n / 2 { n / 2 + 1 } else { i % n + 1 }).collect(),
            };
            let starts: Vec<u32> = (1..=16.min(n)).collect();
            let mut fv = FunctionView::from_table(f).unwrap();
            let res = collide_k(&mut fv, &starts, None).unwrap();
            let k = starts.len() as u64;
            let denom = res.explored_count as f64
                * (k.min(ceil_log2(n as u64)) + 1) as f64
                * (ceil_log2(k) + 1) as f64;
            worst_ratio = worst_ratio.max(res.eval_steps as f64 / denom);
            worst_cells_per_k = worst_cells_per_k.max(fv.meter().peak_cells as f64 / k as f64);
        }
    }
    println!("collide: worst eval_steps ratio = {worst_ratio:.3} (frozen C must exceed this)");
    println!("collide: worst peak_cells per start = {worst_cells_per_k:.2}");
}

/// Checks that budgeted runs whose reachable set fits the cutoff are never
/// stopped by the raw step cap, and measures ED round costs per k.
fn ed_section() {
    let n: u32 = 1024;
    let k: u32 = 8;
    let x = generate_input(InputKind::AllDistinct, n as usize, n, 7).unwrap();
    let mut raw_cap_trips = 0u64;
    let mut complete = 0u64;
    let trials = 4000;
    for t in 0..trials {
        let seed = derive_seed(0xE0, t);
        let chain = HashChain::new(x.clone(), n, seed).unwrap();
        let mut fv = FunctionView::from_chain(chain);
        let mut rng = SplitMix64::new(seed ^ 0xA5A5_5A5A_0F0F_F0F0);
        let starts: Vec<u32> = (0..k).map(|_| rng.next_in_domain(n as u64) as u32).collect();
        let budget = round_cutoff(k, n);
        // Reference: does the true reachable set fit the budget?
        let brute = swstat_core::oracle::brute_collisions(&fv, &starts).unwrap();
        let res = collide_k(&mut fv, &starts, Some(budget)).unwrap();
        if brute.reachable_count <= budget {
            if !res.complete {
                raw_cap_trips += 1;
            }
        }
        if res.complete {
            complete += 1;
            assert_eq!(res.explored_count, brute.reachable_count);
        }
    }
    println!(
        "ed: lemma-2 regime n={n} k={k}: complete fraction {:.4}, false truncations {raw_cap_trips}",
        complete as f64 / trials as f64
    );

    // Round success frequency on a once-duplicated input (lemma-3 regime).
    let x = {
        let mut x = generate_input(InputKind::AllDistinct, n as usize, n, 9).unwrap();
        x[700] = x[100];
        x
    };
    let mut found = 0u64;
    let trials = 20000u64;
    for t in 0..trials {
        let mut meter = Meter::new();
        if single_round(&x, n, k, derive_seed(0xE1, t), &mut meter).unwrap().is_some() {
            found += 1;
        }
    }
    let bound = k as f64 / (18.0 * n as f64);
    println!(
        "ed: lemma-3 regime: success frequency {:.5} vs bound {:.5} (ratio {:.1})",
        found as f64 / trials as f64,
        bound,
        (found as f64 / trials as f64) / bound
    );
}

/// Comparison scaling of the moment computation across the space grid, and
/// the per-block comparison constant.
fn fk_section() {
    let n = 4096usize;
    let x = generate_input(InputKind::Uniform, 2 * n - 1, n as u32, 0xF0).unwrap();
    let mut points = Vec::new();
    for exp in 6..=12u32 {
        let s = 1u64 << exp;
        let mut meter = Meter::new();
        fk_window_all(&x, n, 0, s, false, &mut meter).unwrap();
        let sprime = s / 12;
        let per_block = meter.comparisons as f64 / ((n as f64 - 1.0) / sprime as f64);
        let norm = per_block / (n as f64 * ((sprime + 1) as f64).log2());
        println!(
            "fk: S=2^{exp} comparisons={} peak_cells={} per-block-norm={norm:.3}",
            meter.comparisons, meter.peak_cells
        );
        points.push(((s as f64).ln(), (meter.comparisons as f64).ln()));
    }
    let (slope, r2) = regress(&points);
    println!("fk: comparisons vs S log-log slope {slope:.3}, R^2 {r2:.4}");
}

fn sliding_section() {
    // Backend-call growth of the recursive window driver. All-distinct
    // inputs force the full recursion; uniform ones short-circuit early.
    for kind in [InputKind::AllDistinct, InputKind::Uniform] {
        for n in [64usize, 256, 1024, 4096] {
            let x = generate_input(kind, 2 * n - 1, 2 * n as u32, 0x51).unwrap();
            let mut meter = Meter::new();
            let mut backend = ExactBackend::new(&mut meter);
            let rep = ed_window_all(&x, n, &mut backend, EdWindowMode::Exact).unwrap();
            let per_out = rep.backend_calls as f64 / n as f64;
            println!(
                "sliding: {kind:?} n={n} backend_calls={} ({per_out:.2} per output)",
                rep.backend_calls
            );
        }
    }
    // Average-case comparison cost per input symbol.
    for n in [256usize, 1024, 4096] {
        let mut total = 0u64;
        let trials = 50;
        for t in 0..trials {
            let x = generate_input(InputKind::Uniform, 2 * n - 1, n as u32, 0x600 + t).unwrap();
            let mut meter = Meter::new();
            ed_window_average(&x, n, &mut meter).unwrap();
            total += meter.comparisons;
        }
        println!(
            "sliding: average-case n={n} mean comparisons/n = {:.2}",
            total as f64 / trials as f64 / n as f64
        );
    }
    // Collide invariant check cost sanity on one verified run.
    let f = generate_input(InputKind::FunctionTable, 512, 512, 3).unwrap();
    let mut fv = FunctionView::from_table(f).unwrap();
    let res = collide_k_with(
        &mut fv,
        &[1, 2, 3, 4, 5],
        &CollideOptions { vertex_budget: None, verify_invariants: true },
    )
    .unwrap();
    println!("sliding: verified collide run explored {}", res.explored_count);
}

fn regress(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, r2)
}
