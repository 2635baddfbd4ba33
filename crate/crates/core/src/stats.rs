//! Binomial confidence intervals.

use statrs::function::beta::beta_reg;

/// Solves `I_p(a, b) = target` for `p` by bisection. `I_p` is increasing in
/// `p`; `statrs`' own inverse stalls when `b` is in the millions.
fn inv_beta_reg(a: f64, b: f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sided Clopper–Pearson interval for `hits` successes in `trials`
/// Bernoulli draws at confidence `1 − level`.
pub fn clopper_pearson(hits: u64, trials: u64, level: f64) -> (f64, f64) {
    assert!(trials > 0 && hits <= trials);
    let (x, n) = (hits as f64, trials as f64);
    let lo = if hits == 0 {
        0.0
    } else {
        inv_beta_reg(x, n - x + 1.0, level / 2.0)
    };
    let hi = if hits == trials {
        1.0
    } else {
        inv_beta_reg(x + 1.0, n - x, 1.0 - level / 2.0)
    };
    (lo, hi)
}

/// 95% Clopper–Pearson interval.
pub fn clopper_pearson_95(hits: u64, trials: u64) -> (f64, f64) {
    clopper_pearson(hits, trials, 0.05)
}

/// `−(1/n) log p`, or `None` when `p = 0`.
pub fn empirical_rate(p: f64, n: usize) -> Option<f64> {
    if p > 0.0 {
        Some((-p.ln() / n as f64).max(0.0))
    } else {
        None
    }
}
