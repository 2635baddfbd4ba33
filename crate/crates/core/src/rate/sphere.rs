//! Infimum of the Legendre transform over the unit sphere.
//!
//! `I_k(α) = inf_{‖x‖=1} sup_t (tα − Λ_x(t))` is approximated by multi-start
//! projected gradient descent. The structured starts `(1,…,1,0,…,0)/√j`
//! include both candidate optima, the all-equal direction `j = k` and the
//! two-sparse direction `j = 2`; random directions are added on top.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::transform::{CgfSpec, RateValue, Tilt, MAX_ENUMERATION_K};
use crate::dist::EntryDistribution;
use crate::error::{domain, Result};
use crate::linalg::UnitVector;
use crate::rng::stream_rng;

/// Settings for the sphere search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateOptions {
    pub random_restarts: usize,
    pub seed: u64,
    /// Stop a descent once one step improves the objective by less than this.
    pub tol: f64,
    /// Central-difference step for the numerical gradient.
    pub grad_step: f64,
    pub max_iters: usize,
    pub parallel: bool,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            random_restarts: 32,
            seed: 0x5eed,
            tol: 1e-9,
            grad_step: 1e-6,
            max_iters: 500,
            parallel: true,
        }
    }
}

/// A computed `I_k(α)` with its optimizing direction.
#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub alpha: f64,
    pub rate: RateValue,
    pub t_star: Tilt,
    /// Canonical optimizer: non-negative coordinates in decreasing order.
    pub x_star: UnitVector,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Rate at one direction, `+∞` where the transform is infinite.
fn objective(dist: EntryDistribution, x: &UnitVector, alpha: f64) -> Result<(f64, Tilt, bool)> {
    let tr = CgfSpec::new(dist, x.clone())?.legendre(alpha)?;
    Ok((tr.rate.as_f64(), tr.tilt, tr.converged))
}

fn eval_raw(dist: EntryDistribution, y: &[f64], alpha: f64) -> Result<f64> {
    match UnitVector::normalize(y.to_vec()) {
        Ok(x) => Ok(objective(dist, &x.canonical(), alpha)?.0),
        Err(_) => Ok(f64::INFINITY),
    }
}

struct Descent {
    x: UnitVector,
    value: f64,
    converged: bool,
}

fn descend(
    dist: EntryDistribution,
    start: UnitVector,
    alpha: f64,
    opts: &RateOptions,
) -> Result<Descent> {
    let mut x = start.canonical();
    let mut value = objective(dist, &x, alpha)?.0;
    if !value.is_finite() {
        return Ok(Descent {
            x,
            value,
            converged: true,
        });
    }
    let k = x.dim();
    let h = opts.grad_step;
    let mut step = 0.1;
    for _ in 0..opts.max_iters {
        // Gradient of y ↦ f(y/‖y‖); tangent to the sphere by homogeneity.
        let mut grad = vec![0.0; k];
        for m in 0..k {
            let mut yp = x.coords().to_vec();
            let mut ym = yp.clone();
            yp[m] += h;
            ym[m] -= h;
            let fp = eval_raw(dist, &yp, alpha)?;
            let fm = eval_raw(dist, &ym, alpha)?;
            grad[m] = match (fp.is_finite(), fm.is_finite()) {
                (true, true) => (fp - fm) / (2.0 * h),
                (true, false) => (fp - value) / h,
                (false, true) => (value - fm) / h,
                (false, false) => 0.0,
            };
        }
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if g2 < 1e-24 {
            return Ok(Descent {
                x,
                value,
                converged: true,
            });
        }
        // Backtracking line search along the projected direction.
        step *= 4.0;
        let mut accepted = None;
        while step > 1e-14 {
            let y: Vec<f64> = x
                .coords()
                .iter()
                .zip(&grad)
                .map(|(xi, gi)| xi - step * gi)
                .collect();
            if let Ok(cand) = UnitVector::normalize(y) {
                let cand = cand.canonical();
                let fc = objective(dist, &cand, alpha)?.0;
                if fc.is_finite() && fc <= value - 1e-4 * step * g2 {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((cand, fc)) => {
                let improvement = value - fc;
                x = cand;
                value = fc;
                if improvement < opts.tol {
                    return Ok(Descent {
                        x,
                        value,
                        converged: true,
                    });
                }
            }
            None => {
                return Ok(Descent {
                    x,
                    value,
                    converged: true,
                })
            }
        }
    }
    Ok(Descent {
        x,
        value,
        converged: false,
    })
}

fn check_rate_domain(dist: EntryDistribution, k: usize, alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(domain(format!("alpha must be positive, got {alpha}")));
    }
    match dist {
        EntryDistribution::Rademacher => {
            if !(2..=MAX_ENUMERATION_K).contains(&k) {
                return Err(domain(format!(
                    "Rademacher rates need 2 <= k <= {MAX_ENUMERATION_K}, got {k}"
                )));
            }
        }
        EntryDistribution::Uniform => {
            if k == 0 {
                return Err(domain("k must be positive"));
            }
            if alpha < 1.0 {
                return Err(domain(format!(
                    "uniform entries support only alpha >= 1 (t >= 0), got {alpha}"
                )));
            }
        }
        EntryDistribution::Normal => {
            if k == 0 {
                return Err(domain("k must be positive"));
            }
        }
    }
    Ok(())
}

/// Lexicographic order on coordinates, used to break exact ties.
fn lex_less(a: &UnitVector, b: &UnitVector) -> bool {
    for (x, y) in a.coords().iter().zip(b.coords()) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// Starting directions: `(1,…,1,0,…)/√j` for `j = k, 2, then the rest`,
/// followed by `random_restarts` uniform directions.
pub fn starting_directions(k: usize, opts: &RateOptions) -> Vec<UnitVector> {
    let mut order = vec![k];
    if k >= 2 {
        order.push(2);
    }
    order.extend((1..k).filter(|&j| j != 2));
    let mut starts: Vec<UnitVector> = order
        .into_iter()
        .map(|j| UnitVector::leading_ones(k, j))
        .collect();
    let mut rng = stream_rng(opts.seed, k as u64);
    starts.extend((0..opts.random_restarts).map(|_| UnitVector::random(k, &mut rng)));
    starts
}

/// `I_k(α)` for entries drawn from `dist`.
pub fn rate_k(
    dist: EntryDistribution,
    k: usize,
    alpha: f64,
    opts: &RateOptions,
) -> Result<RateResult> {
    check_rate_domain(dist, k, alpha)?;
    if dist == EntryDistribution::Normal {
        // Λ_x does not depend on x.
        let x = UnitVector::leading_ones(k, k);
        let (value, tilt, converged) = objective(dist, &x, alpha)?;
        return Ok(RateResult {
            alpha,
            rate: RateValue::from_f64(value),
            t_star: tilt,
            x_star: x.canonical(),
            restarts_used: 1,
            converged,
        });
    }

    let starts = starting_directions(k, opts);
    let run = |s: &UnitVector| descend(dist, s.clone(), alpha, opts);
    let outcomes: Vec<Result<Descent>> = if opts.parallel {
        starts.par_iter().map(run).collect()
    } else {
        starts.iter().map(run).collect()
    };

    let mut best: Option<Descent> = None;
    for d in outcomes {
        let d = d?;
        let better = match &best {
            None => true,
            Some(b) => d.value < b.value || (d.value == b.value && lex_less(&d.x, &b.x)),
        };
        if better {
            best = Some(d);
        }
    }
    let best = best.expect("at least one start");
    let (_, tilt, tilt_ok) = objective(dist, &best.x, alpha)?;
    Ok(RateResult {
        alpha,
        rate: RateValue::from_f64(best.value),
        t_star: tilt,
        x_star: best.x,
        restarts_used: starts.len(),
        converged: best.converged && tilt_ok,
    })
}
