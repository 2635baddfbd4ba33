//! Crossing point between the all-equal and the two-sparse strategies for
//! small eigenvalues of ±1 matrices.

use serde::Serialize;

use super::closed::{rate_two_sparse, rate_wishart};
use super::sphere::{rate_k, RateOptions};
use super::transform::CgfSpec;
use crate::dist::EntryDistribution;
use crate::error::{domain, Result};
use crate::linalg::UnitVector;

const BISECT_TOL: f64 = 1e-10;

/// Positive root in `(0, 1)` of `½(α − 1 − log α) = (α/2) log α + ((2−α)/2) log(2−α)`,
/// the `k → ∞` crossing point.
pub fn phase_transition_alpha_star() -> f64 {
    let gap = |a: f64| rate_wishart(a).unwrap() - rate_two_sparse(a).unwrap();
    // gap > 0 near 0 (the Gaussian rate blows up), gap < 0 just below 1.
    let (mut lo, mut hi) = (0.01, 0.9);
    debug_assert!(gap(lo) > 0.0 && gap(hi) < 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Result of the finite-`k` crossing search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseTransition {
    pub k: usize,
    /// Crossing point; `1.0` when the two strategies coincide (`k = 2`).
    pub alpha_star: f64,
    pub coincident: bool,
    /// Two-sparse rate at the crossing.
    pub two_sparse_rate: f64,
    /// Sphere-optimized `I_k(α*)`, when computed.
    pub sphere_rate: Option<f64>,
}

impl PhaseTransition {
    /// Whether the sphere infimum equals the two-sparse rate at `α*`.
    pub fn sphere_matches(&self, tol: f64) -> Option<bool> {
        self.sphere_rate
            .map(|r| (r - self.two_sparse_rate).abs() <= tol)
    }
}

/// `L(x^(k), α) − L(x^(2), α)` for ±1 entries, `+∞` where only the
/// all-equal transform is infinite.
pub fn strategy_gap(k: usize, alpha: f64) -> Result<f64> {
    let all = CgfSpec::new(EntryDistribution::Rademacher, UnitVector::leading_ones(k, k))?;
    let two = CgfSpec::new(EntryDistribution::Rademacher, UnitVector::leading_ones(k, 2))?;
    let a = all.legendre(alpha)?.rate.as_f64();
    let b = two.legendre(alpha)?.rate.as_f64();
    Ok(if a.is_infinite() && b.is_infinite() {
        0.0
    } else {
        a - b
    })
}

/// Largest `α ∈ (0, 1)` where the two strategies give the same rate, found
/// by scanning downward from 1 on a grid of step `0.005` and bisecting the
/// first sign change of [`strategy_gap`]. When `sphere` is given, the
/// sphere-optimized rate at the crossing is computed as well.
pub fn phase_transition_alpha_star_k(
    k: usize,
    sphere: Option<&RateOptions>,
) -> Result<PhaseTransition> {
    if !(2..=12).contains(&k) {
        return Err(domain(format!("need 2 <= k <= 12, got {k}")));
    }
    if k == 2 {
        return Ok(PhaseTransition {
            k,
            alpha_star: 1.0,
            coincident: true,
            two_sparse_rate: 0.0,
            sphere_rate: sphere.map(|_| 0.0),
        });
    }
    let step = 0.005;
    let mut hi = 1.0 - step;
    let mut gap_hi = strategy_gap(k, hi)?;
    let mut bracket = None;
    let mut a = hi - step;
    while a > step / 2.0 {
        let g = strategy_gap(k, a)?;
        if (g >= 0.0) != (gap_hi >= 0.0) {
            bracket = Some((a, hi));
            break;
        }
        hi = a;
        gap_hi = g;
        a -= step;
    }
    let (mut lo, mut hi) =
        bracket.ok_or_else(|| domain(format!("no strategy crossing found for k = {k}")))?;
    let sign_hi = strategy_gap(k, hi)? >= 0.0;
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if (strategy_gap(k, mid)? >= 0.0) == sign_hi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let alpha_star = 0.5 * (lo + hi);
    let sphere_rate = match sphere {
        Some(opts) => Some(
            rate_k(EntryDistribution::Rademacher, k, alpha_star, opts)?
                .rate
                .as_f64(),
        ),
        None => None,
    };
    Ok(PhaseTransition {
        k,
        alpha_star,
        coincident: false,
        two_sparse_rate: rate_two_sparse(alpha_star)?,
        sphere_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_crossing() {
        let a = phase_transition_alpha_star();
        assert!((a - 0.253).abs() <= 0.005, "{a}");
        let resid = rate_wishart(a).unwrap() - rate_two_sparse(a).unwrap();
        assert!(resid.abs() <= 1e-8);
        assert!(rate_wishart(a - 0.01).unwrap() > rate_two_sparse(a - 0.01).unwrap());
        assert!(rate_wishart(a + 0.01).unwrap() < rate_two_sparse(a + 0.01).unwrap());
    }

    #[test]
    fn k3_crossing() {
        let p = phase_transition_alpha_star_k(3, None).unwrap();
        assert!((p.alpha_star - 0.425).abs() <= 0.015, "{p:?}");
        assert!(!p.coincident);
    }

    #[test]
    fn k2_coincident() {
        let p = phase_transition_alpha_star_k(2, None).unwrap();
        assert!(p.coincident);
        assert_eq!(p.alpha_star, 1.0);
        assert!(phase_transition_alpha_star_k(13, None).is_err());
        assert!(phase_transition_alpha_star_k(1, None).is_err());
    }
}
