//! Closed-form rates, lower bounds and covering-number formulas.

use super::law::squared_entry_law;
use super::transform::{legendre_law, RateValue};
use crate::dist::EntryDistribution;
use crate::error::{domain, Result};

fn positive(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("alpha must be positive and finite, got {alpha}")))
    }
}

/// Gaussian (Wishart) rate `½(α − 1 − log α)`; also the `k → ∞` limit for
/// bounded symmetric entries.
pub fn rate_wishart(alpha: f64) -> Result<f64> {
    positive(alpha)?;
    Ok(0.5 * (alpha - 1.0 - alpha.ln()))
}

/// Optimal tilt of the Wishart transform, `½ − 1/(2α)`.
pub fn tilt_wishart(alpha: f64) -> Result<f64> {
    positive(alpha)?;
    Ok(0.5 - 0.5 / alpha)
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Rate of the two-sparse direction `(1, 1, 0, …)/√2` for ±1 entries:
/// `(α/2) log α + ((2 − α)/2) log(2 − α)` on `[0, 2]`.
pub fn rate_two_sparse(alpha: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&alpha) {
        return Err(domain(format!("alpha must lie in [0, 2], got {alpha}")));
    }
    Ok(0.5 * (xlogx(alpha) + xlogx(2.0 - alpha)))
}

/// Joint rate of `{λ_max ≥ α, λ_min ≤ β}` for Wishart matrices, the sum of
/// the two marginal rates.
pub fn rate_joint_wishart(alpha: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0 && alpha >= 1.0 && alpha.is_finite()) {
        return Err(domain(format!(
            "need 0 < beta <= 1 <= alpha, got alpha = {alpha}, beta = {beta}"
        )));
    }
    Ok(rate_wishart(alpha)? + rate_wishart(beta)?)
}

/// `J(α) = ½(α/M² − 1 − log(α/M²))` for entries bounded by `M`, valid for
/// `α ≥ M²` and every `k`.
pub fn rate_lower_bound_bounded(alpha: f64, bound: f64) -> Result<f64> {
    if !(bound >= 1.0) || !bound.is_finite() {
        return Err(domain(format!("entry bound must satisfy 1 <= M < inf, got {bound}")));
    }
    let m2 = bound * bound;
    if !(alpha >= m2 * (1.0 - 1e-15)) || !alpha.is_finite() {
        return Err(domain(format!("need alpha >= M^2 = {m2}, got {alpha}")));
    }
    let r = (alpha / m2).max(1.0);
    Ok(0.5 * (r - 1.0 - r.ln()))
}

/// Lower bound on the ±1 rate: `½(α − 1 − log α)` for `α ≥ ½` and
/// `½(log 2 − α)` below. The pieces agree at `α = ½`.
pub fn rate_lower_bound_rademacher(alpha: f64) -> Result<f64> {
    positive(alpha)?;
    if alpha >= 0.5 {
        rate_wishart(alpha)
    } else {
        Ok(0.5 * (std::f64::consts::LN_2 - alpha))
    }
}

/// `sup_t (ta − log E[e^{t C_11²}])`.
pub fn chernoff_squared_entry(dist: EntryDistribution, a: f64) -> Result<RateValue> {
    positive(a)?;
    match dist {
        EntryDistribution::Normal => Ok(RateValue::Finite(rate_wishart(a)?)),
        _ => Ok(legendre_law(&squared_entry_law(dist), a)?.rate),
    }
}

/// Grid covering of the unit sphere: a grid of mesh `1/L` on `[-1, 1]^k`,
/// centres projected to the sphere. Returns `(3√k/L, L^k)`, the distance and
/// count bounds, valid when `√k/L ≤ ½`.
pub fn grid_covering(k: usize, grid: usize) -> Result<(f64, f64)> {
    if k == 0 || grid == 0 {
        return Err(domain("k and L must be positive"));
    }
    let ratio = (k as f64).sqrt() / grid as f64;
    if ratio > 0.5 {
        return Err(domain(format!("grid too coarse: sqrt(k)/L = {ratio} > 1/2")));
    }
    Ok((3.0 * ratio, (grid as f64).powi(k as i32)))
}

/// Natural log of the leading term of Rogers' covering number for balls of
/// radius `1/R` on the unit sphere in `R^k`:
/// `log(4k√k (log k + log log k + log R)) + k log R`.
///
/// The `(1 + O(1/log k))` correction is dropped, so for small `k` this is a
/// formula evaluation rather than a certified bound.
pub fn rogers_covering(k: usize, radius: f64) -> Result<f64> {
    if k < 2 {
        return Err(domain(format!("need k >= 2, got {k}")));
    }
    let kf = k as f64;
    let min_r = (kf / (kf - 1.0)).sqrt();
    if !(radius > min_r) || !radius.is_finite() {
        return Err(domain(format!("need R > sqrt(k/(k-1)) = {min_r}, got {radius}")));
    }
    let bracket = kf.ln() + kf.ln().ln() + radius.ln();
    if bracket <= 0.0 {
        return Err(domain(format!(
            "log k + log log k + log R = {bracket} is not positive"
        )));
    }
    Ok((4.0 * kf * kf.sqrt() * bracket).ln() + kf * radius.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    const HALF_ONE_MINUS_LN2: f64 = 0.153_426_409_720_027_35;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn wishart_values() {
        close(rate_wishart(1.0).unwrap(), 0.0, 0.0);
        close(rate_wishart(2.0).unwrap(), HALF_ONE_MINUS_LN2, 1e-15);
        close(rate_wishart(0.253).unwrap(), 0.3136, 1e-4);
        assert!(rate_wishart(0.0).is_err());
        assert!(rate_wishart(-1.0).is_err());
        close(tilt_wishart(2.0).unwrap(), 0.25, 0.0);
    }

    #[test]
    fn two_sparse_values() {
        close(rate_two_sparse(1.0).unwrap(), 0.0, 0.0);
        close(rate_two_sparse(0.0).unwrap(), LN_2, 1e-15);
        close(rate_two_sparse(2.0).unwrap(), LN_2, 1e-15);
        close(rate_two_sparse(0.253).unwrap(), 0.3134, 1e-4);
        close(rate_two_sparse(0.5).unwrap(), 0.130_812_035_941_137_4, 1e-12);
        assert!(rate_two_sparse(2.1).is_err());
        assert!(rate_two_sparse(-0.1).is_err());
    }

    #[test]
    fn joint_wishart() {
        close(rate_joint_wishart(1.0, 1.0).unwrap(), 0.0, 0.0);
        close(rate_joint_wishart(2.0, 0.5).unwrap(), 0.25, 1e-15);
        close(
            rate_joint_wishart(3.0, 1.0).unwrap(),
            rate_wishart(3.0).unwrap(),
            0.0,
        );
        assert!(rate_joint_wishart(0.5, 0.5).is_err());
        assert!(rate_joint_wishart(2.0, 1.5).is_err());
    }

    #[test]
    fn bounded_entry_bound() {
        let s3 = 3f64.sqrt();
        close(rate_lower_bound_bounded(2.0, 1.0).unwrap(), HALF_ONE_MINUS_LN2, 1e-15);
        close(rate_lower_bound_bounded(3.0, s3).unwrap(), 0.0, 1e-15);
        close(rate_lower_bound_bounded(6.0, s3).unwrap(), HALF_ONE_MINUS_LN2, 1e-14);
        assert!(rate_lower_bound_bounded(2.0, s3).is_err());
    }

    #[test]
    fn rademacher_bound_pieces() {
        close(rate_lower_bound_rademacher(2.0).unwrap(), HALF_ONE_MINUS_LN2, 1e-15);
        let at_half = 0.5 * (LN_2 - 0.5);
        close(rate_lower_bound_rademacher(0.5).unwrap(), at_half, 1e-15);
        close(rate_wishart(0.5).unwrap(), at_half, 1e-15);
        close(rate_lower_bound_rademacher(0.1).unwrap(), 0.5 * (LN_2 - 0.1), 1e-15);
        assert!(rate_lower_bound_rademacher(0.0).is_err());
    }

    #[test]
    fn squared_entry_transforms() {
        use EntryDistribution::*;
        assert_eq!(chernoff_squared_entry(Rademacher, 1.0).unwrap(), RateValue::Finite(0.0));
        assert!(chernoff_squared_entry(Rademacher, 1.5).unwrap().is_infinite());
        assert!(chernoff_squared_entry(Rademacher, 0.5).unwrap().is_infinite());
        close(
            chernoff_squared_entry(Normal, 2.0).unwrap().as_f64(),
            HALF_ONE_MINUS_LN2,
            1e-15,
        );
        assert_eq!(chernoff_squared_entry(Normal, 1.0).unwrap(), RateValue::Finite(0.0));
        // Uniform: positive off the mean, infinite at or beyond the edge 3.
        let u = chernoff_squared_entry(Uniform, 2.0).unwrap().as_f64();
        assert!(u > 0.0 && u.is_finite());
        assert!(chernoff_squared_entry(Uniform, 3.5).unwrap().is_infinite());
        assert!(chernoff_squared_entry(Uniform, 0.0).is_err());
    }

    #[test]
    fn uniform_square_transform_matches_independent_quadrature() {
        // Oracle: maximize ta - log ∫_0^1 e^{3tu²} du on a fine t-grid using
        // the midpoint rule, independent of the Simpson/Newton path.
        let a = 2.0;
        let log_mgf = |t: f64| {
            let n = 20_000;
            let h = 1.0 / n as f64;
            let s: f64 = (0..n)
                .map(|i| {
                    let u = (i as f64 + 0.5) * h;
                    (3.0 * t * (u * u - 1.0)).exp()
                })
                .sum();
            3.0 * t + (s * h).ln()
        };
        let best = (0..=4000)
            .map(|i| i as f64 * 0.001)
            .map(|t| t * a - log_mgf(t))
            .fold(f64::NEG_INFINITY, f64::max);
        let got = chernoff_squared_entry(EntryDistribution::Uniform, a).unwrap().as_f64();
        close(got, best, 1e-6);
    }

    #[test]
    fn grid_covering_values() {
        let (d, c) = grid_covering(4, 8).unwrap();
        close(d, 0.75, 1e-15);
        assert_eq!(c, 4096.0);
        assert_eq!(grid_covering(1, 2).unwrap(), (1.5, 2.0));
        assert!(grid_covering(4, 3).is_err());
    }

    #[test]
    fn rogers_values() {
        let l3 = 3f64.ln();
        let expect = (12.0 * 3f64.sqrt() * (l3 + l3.ln() + l3)).ln() + 3.0 * l3;
        close(rogers_covering(3, 3.0).unwrap(), expect, 1e-13);
        let v = rogers_covering(2, 10.0).unwrap();
        assert!(v.is_finite() && v > 0.0);
        assert!(rogers_covering(2, 2f64.sqrt()).is_err());
        assert!(rogers_covering(1, 5.0).is_err());
    }
}
