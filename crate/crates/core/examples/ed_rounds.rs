//! Direct per-round statistics for the element-distinctness scaling: success
//! probability and evaluation cost of a single bounded round as k varies.

use rayon::prelude::*;
use swstat_core::element_distinctness::single_round;
use swstat_core::harness::{generate_input, InputKind};
use swstat_core::meter::Meter;
use swstat_core::rng::derive_seed;

fn main() {
    let n: usize = 1 << 14;
    let scale: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20000);
    let x = {
        let mut x =
            generate_input(InputKind::AllDistinct, n, n as u32, 0xBEE).unwrap();
        x[12000] = x[3000];
        x
    };
    let mut pts = Vec::new();
    for (k, mult) in [(2u32, 16u64), (8, 4), (32, 2), (128, 1)] {
        let rounds = scale * mult;
        let (hits, evals): (u64, u64) = (0..rounds)
            .into_par_iter()
            .map(|r| {
                let mut meter = Meter::new();
                let hit = single_round(&x, n as u32, k, derive_seed(0x60D, r), &mut meter)
                    .unwrap()
                    .is_some();
                (u64::from(hit), meter.fn_evals)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        let p = hits as f64 / rounds as f64;
        let e = evals as f64 / rounds as f64;
        println!(
            "k={k}: rounds={rounds} hits={hits} p={p:.6} (k-normalized {:.2}) evals/round={e:.0} (sqrt(kn)-normalized {:.2}) expected-total={:.3e}",
            p * n as f64 / k as f64,
            e / ((k as f64) * n as f64).sqrt(),
            e / p
        );
        pts.push(((k as f64).ln(), (e / p).ln()));
    }
    let n_pts = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n_pts;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n_pts;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    println!("asymptotic slope of expected totals: {:.4}", sxy / sxx);
}
