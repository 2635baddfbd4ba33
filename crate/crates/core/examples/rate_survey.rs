//! Prints `I_k(α)` for ±1 entries next to the Gaussian rate, and the
//! strategy crossing points `α*_k`.

use std::time::Instant;

use eigenrate::rate::{phase_transition_alpha_star_k, rate_k, rate_wishart, RateOptions};
use eigenrate::EntryDistribution;

fn main() {
    let opts = RateOptions::default();
    for &alpha in &[0.5, 0.75, 1.5, 2.0] {
        for k in 2..=10 {
            let start = Instant::now();
            let r = rate_k(EntryDistribution::Rademacher, k, alpha, &opts).unwrap();
            println!(
                "alpha={alpha:<5} k={k:<3} I_k={:<22} wishart={:<22} x*={:?} ({:.2?})",
                r.rate.to_string(),
                rate_wishart(alpha).unwrap(),
                r.x_star.coords().iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>(),
                start.elapsed()
            );
        }
    }
    for k in 3..=8 {
        let p = phase_transition_alpha_star_k(k, None).unwrap();
        println!("k={k} alpha*={:.6}", p.alpha_star);
    }
}
