//! Quick measurement of the element-distinctness time scaling in k:
//! mean total function evaluations on planted-pair inputs at n = 2^14.

use rayon::prelude::*;
use swstat_core::element_distinctness::{ed_decide, EDOutcome, EDParams};
use swstat_core::harness::{generate_input, InputKind};
use swstat_core::meter::Meter;
use swstat_core::rng::derive_seed;

fn main() {
    let n: usize = 1 << 14;
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let mut points = Vec::new();
    for k in [2u32, 8, 32, 128] {
        let evals: Vec<u64> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let x = generate_input(
                    InputKind::PlantedPair { distance: None },
                    n,
                    n as u32,
                    derive_seed(0xED5C, t),
                )
                .unwrap();
                let params = EDParams {
                    m: n as u32,
                    space_budget: 0,
                    epsilon: 0.125,
                    seed: derive_seed(0xA11, t),
                    k: Some(k),
                };
                let mut meter = Meter::new();
                let v = ed_decide(&x, &params, &mut meter).unwrap();
                assert!(matches!(v.outcome, EDOutcome::Duplicate(_, _)) || v.rounds_used > 0);
                meter.fn_evals
            })
            .collect();
        let mean = evals.iter().sum::<u64>() as f64 / trials as f64;
        println!("k={k}: mean fn_evals {mean:.0}");
        points.push(((k as f64).ln(), mean.ln()));
    }
    let (slope, r2) = regress(&points);
    println!("slope {slope:.3} r2 {r2:.4}");
}

fn regress(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    (sxy / sxx, (sxy * sxy) / (sxx * syy))
}
