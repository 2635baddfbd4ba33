//! Rate functions for extreme eigenvalues of sample covariance matrices.

pub mod closed;
pub mod law;
pub mod phase;
pub mod sphere;
pub mod transform;

pub use closed::{
    chernoff_squared_entry, grid_covering, rate_joint_wishart, rate_lower_bound_bounded,
    rate_lower_bound_rademacher, rate_two_sparse, rate_wishart, rogers_covering, tilt_wishart,
};
pub use phase::{
    phase_transition_alpha_star, phase_transition_alpha_star_k, strategy_gap, PhaseTransition,
};
pub use sphere::{rate_k, RateOptions, RateResult};
pub use transform::{cgf, legendre, CgfMethod, CgfSpec, RateValue, Tilt, Transform};

use crate::dist::EntryDistribution;
use crate::error::{domain, Result};
use crate::linalg::UnitVector;

/// Checks `Λ_x(t) ≤ −½ log(1 − 2M²t) + 10⁻¹⁰`.
///
/// ±1 entries use `M = 1` on `t ∈ [-1, ½)`. Uniform entries use `M = √3`
/// on `t ∈ [0, 1/(2M²))`. Normal entries attain the bound with equality for
/// `M = 1` on `t < ½`.
pub fn mgf_bound_check(dist: EntryDistribution, x: &UnitVector, t: f64) -> Result<bool> {
    let (m, lo, hi) = match dist {
        EntryDistribution::Rademacher => (1.0, -1.0, 0.5),
        EntryDistribution::Uniform => {
            let m = dist.bound();
            (m, 0.0, 0.5 / (m * m))
        }
        EntryDistribution::Normal => (1.0, f64::NEG_INFINITY, 0.5),
    };
    if !(t >= lo && t < hi) {
        return Err(domain(format!(
            "t = {t} is outside the checkable range [{lo}, {hi}) for {dist}"
        )));
    }
    let spec = CgfSpec::new(dist, x.clone())?;
    let lhs = spec.cgf(t)?;
    let rhs = -0.5 * (-2.0 * m * m * t).ln_1p();
    Ok(lhs <= rhs + 1e-10)
}
