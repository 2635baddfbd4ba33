//! `Λ_x(t)` for a direction `x` and its Legendre–Fenchel transform.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::law::{DiscreteLaw, Law, EDGE_TOL};
use crate::dist::EntryDistribution;
use crate::error::{domain, Result};
use crate::linalg::UnitVector;

/// Largest `k` for which `S_x²` is enumerated exactly (`2^{k-1}` atoms).
pub const MAX_ENUMERATION_K: usize = 24;

/// Largest `|t|` the tilt search will explore.
pub const TILT_EDGE: f64 = 50.0;

/// A rate value, possibly `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RateValue {
    Finite(f64),
    Infinite,
}

impl RateValue {
    pub fn is_infinite(self) -> bool {
        matches!(self, RateValue::Infinite)
    }

    /// Value as `f64`, mapping `Infinite` to `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        match self {
            RateValue::Finite(v) => v,
            RateValue::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            RateValue::Finite(v) => Some(v),
            RateValue::Infinite => None,
        }
    }

    pub(crate) fn from_f64(v: f64) -> Self {
        if v.is_finite() {
            RateValue::Finite(v)
        } else {
            RateValue::Infinite
        }
    }
}

impl fmt::Display for RateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateValue::Finite(v) => write!(f, "{v}"),
            RateValue::Infinite => f.write_str("inf"),
        }
    }
}

/// Optimal tilt `t*`; the supremum may only be approached as `t → ±∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Tilt {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl Tilt {
    pub fn finite(self) -> Option<f64> {
        match self {
            Tilt::Finite(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_boundary(self) -> bool {
        !matches!(self, Tilt::Finite(_))
    }
}

impl fmt::Display for Tilt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tilt::Finite(t) => write!(f, "{t}"),
            Tilt::PlusInfinity => f.write_str("+inf"),
            Tilt::MinusInfinity => f.write_str("-inf"),
        }
    }
}

/// Outcome of `sup_t (tα − Λ(t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform {
    pub rate: RateValue,
    pub tilt: Tilt,
    /// False when the tilt search stopped at `±TILT_EDGE` inside the support;
    /// the rate is then a lower bound.
    pub converged: bool,
}

/// How `Λ_x` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CgfMethod {
    /// All `2^k` sign patterns (Rademacher only).
    ExactEnumeration,
    /// `−½ log(1 − 2t)` (normal entries, any direction).
    ClosedFormNormal,
    /// Gaussian-mixture quadrature (uniform entries, `t ≥ 0`).
    GaussianMixtureQuadrature,
}

/// The cumulant generating function of `S_x²` for a fixed law and direction.
/// Enumerated atoms are built once and reused across evaluations.
#[derive(Debug, Clone)]
pub struct CgfSpec {
    dist: EntryDistribution,
    x: UnitVector,
    method: CgfMethod,
    law: Law,
}

impl CgfSpec {
    pub fn new(dist: EntryDistribution, x: UnitVector) -> Result<Self> {
        let (method, law) = match dist {
            EntryDistribution::Rademacher => {
                if x.dim() > MAX_ENUMERATION_K {
                    return Err(domain(format!(
                        "exact enumeration supports k <= {MAX_ENUMERATION_K}, got k = {}",
                        x.dim()
                    )));
                }
                (
                    CgfMethod::ExactEnumeration,
                    Law::Discrete(DiscreteLaw::rademacher_square(x.coords())),
                )
            }
            EntryDistribution::Normal => (CgfMethod::ClosedFormNormal, Law::ChiSquare1),
            EntryDistribution::Uniform => (
                CgfMethod::GaussianMixtureQuadrature,
                Law::UniformMixture {
                    x: x.coords().to_vec(),
                },
            ),
        };
        Ok(Self {
            dist,
            x,
            method,
            law,
        })
    }

    pub fn dist(&self) -> EntryDistribution {
        self.dist
    }

    pub fn direction(&self) -> &UnitVector {
        &self.x
    }

    pub fn method(&self) -> CgfMethod {
        self.method
    }

    pub fn law(&self) -> &Law {
        &self.law
    }

    /// Admissible `t` as `(lo, hi, hi_open)`.
    pub fn domain(&self) -> (f64, f64, bool) {
        self.law.domain()
    }

    /// `log E[e^{t S_x²}]`.
    pub fn cgf(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.law.cgf(t))
    }

    /// `Λ_x'(t)`.
    pub fn slope(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.law.slope(t))
    }

    fn check(&self, t: f64) -> Result<()> {
        if self.law.in_domain(t) {
            Ok(())
        } else {
            Err(domain(format!(
                "t = {t} is outside the domain of the {:?} CGF",
                self.method
            )))
        }
    }

    /// `sup_t (tα − Λ_x(t))`.
    pub fn legendre(&self, alpha: f64) -> Result<Transform> {
        legendre_law(&self.law, alpha)
    }
}

/// `sup_t (tα − Λ(t))` for a scalar law with mean 1.
///
/// The optimal tilt solves `Λ'(t) = α`, with `t ≥ 0` when `α ≥ 1` and
/// `t ≤ 0` otherwise. The root is bracketed and then refined by Newton steps
/// that fall back to bisection whenever they leave the bracket. When `α`
/// reaches an endpoint of the support the supremum is `−log P(X = endpoint)`,
/// attained only as `t → ±∞`.
pub fn legendre_law(law: &Law, alpha: f64) -> Result<Transform> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(domain(format!("alpha must be positive and finite, got {alpha}")));
    }
    if alpha == 1.0 {
        // Every law here has mean one.
        return Ok(Transform {
            rate: RateValue::Finite(0.0),
            tilt: Tilt::Finite(0.0),
            converged: true,
        });
    }
    let sup = law.support();
    let tol = EDGE_TOL * alpha.max(1.0);
    let upper = alpha >= 1.0;
    let edge = |mass: f64, tilt: Tilt| Transform {
        rate: RateValue::from_f64(-mass.ln()),
        tilt,
        converged: true,
    };
    if upper {
        if alpha > sup.hi + tol {
            return Ok(edge(0.0, Tilt::PlusInfinity));
        }
        if alpha >= sup.hi - tol && sup.hi.is_finite() {
            return Ok(edge(sup.mass_hi, Tilt::PlusInfinity));
        }
    } else {
        if alpha < sup.lo - tol {
            return Ok(edge(0.0, Tilt::MinusInfinity));
        }
        if alpha <= sup.lo + tol {
            return Ok(edge(sup.mass_lo, Tilt::MinusInfinity));
        }
    }

    let (dlo, dhi, open) = law.domain();
    if !upper && dlo >= 0.0 {
        return Err(domain(format!(
            "alpha = {alpha} < 1 needs t < 0, which this CGF does not support"
        )));
    }
    let f = |t: f64| law.slope(t) - alpha;

    // Bracket [a, b] with f(a) ≤ 0 ≤ f(b).
    let (mut a, mut b);
    let mut converged = true;
    if upper {
        a = 0.0;
        b = 1.0f64.min(dhi);
        let mut j = 0;
        loop {
            if open && b >= dhi {
                b = 0.5 * (a + dhi);
            }
            if f(b) >= 0.0 {
                break;
            }
            a = b;
            j += 1;
            if b >= TILT_EDGE || j > 1100 {
                converged = false;
                break;
            }
            b = if dhi.is_finite() {
                0.5 * (b + dhi)
            } else {
                (2.0 * b).min(TILT_EDGE)
            };
            if !open && b > dhi {
                b = dhi;
            }
        }
    } else {
        b = 0.0;
        a = -1.0f64.max(dlo);
        loop {
            if f(a) <= 0.0 {
                break;
            }
            b = a;
            if a <= -TILT_EDGE {
                converged = false;
                break;
            }
            a = (2.0 * a).max(-TILT_EDGE);
        }
    }

    let t = if converged { solve_bracketed(law, alpha, a, b) } else if upper { a } else { b };
    let rate = (t * alpha - law.cgf(t)).max(0.0);
    Ok(Transform {
        rate: RateValue::Finite(rate),
        tilt: Tilt::Finite(t),
        converged,
    })
}

fn solve_bracketed(law: &Law, alpha: f64, mut a: f64, mut b: f64) -> f64 {
    let f = |t: f64| law.slope(t) - alpha;
    let fa = f(a);
    if fa == 0.0 {
        return a;
    }
    let fb = f(b);
    if fb == 0.0 {
        return b;
    }
    let mut t = 0.5 * (a + b);
    for _ in 0..300 {
        let ft = f(t);
        if ft == 0.0 {
            return t;
        }
        if ft < 0.0 {
            a = t;
        } else {
            b = t;
        }
        if b - a <= 4.0 * f64::EPSILON * t.abs().max(1e-300) {
            break;
        }
        let next = match law.curvature(t) {
            Some(c) if c > 0.0 => t - ft / c,
            _ => f64::NAN,
        };
        t = if next > a && next < b && next.is_finite() {
            next
        } else {
            0.5 * (a + b)
        };
        if t == a || t == b {
            break;
        }
    }
    t
}

/// `cgf(spec, t)`.
pub fn cgf(spec: &CgfSpec, t: f64) -> Result<f64> {
    spec.cgf(t)
}

/// `legendre(spec, α)`, returning the rate and optimal tilt.
pub fn legendre(spec: &CgfSpec, alpha: f64) -> Result<(RateValue, Tilt)> {
    let tr = spec.legendre(alpha)?;
    Ok((tr.rate, tr.tilt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use EntryDistribution::*;

    fn spec(dist: EntryDistribution, x: Vec<f64>) -> CgfSpec {
        CgfSpec::new(dist, UnitVector::normalize(x).unwrap()).unwrap()
    }

    #[test]
    fn two_sparse_rademacher_cgf() {
        let s = spec(Rademacher, vec![1.0, 1.0]);
        for &t in &[-1.0f64, -0.3, 0.2, 0.7] {
            let expect = (0.5 * ((2.0 * t).exp() + 1.0)).ln();
            assert!((s.cgf(t).unwrap() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn normal_cgf_and_zero() {
        let s = spec(Normal, vec![0.3, 0.4, 0.5]);
        assert!((s.cgf(0.25).unwrap() - 0.346_573_590_279_972_6).abs() < 1e-15);
        assert!(s.cgf(0.5).is_err());
        for dist in EntryDistribution::ALL {
            assert_eq!(spec(dist, vec![1.0, 2.0]).cgf(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn uniform_rejects_negative_tilt() {
        let s = spec(Uniform, vec![1.0, 2.0]);
        assert!(s.cgf(-0.1).is_err());
        assert!(s.legendre(0.5).is_err());
    }

    #[test]
    fn enumeration_cap() {
        let x = UnitVector::leading_ones(25, 25);
        assert!(CgfSpec::new(Rademacher, x).is_err());
    }

    #[test]
    fn wishart_transform() {
        let s = spec(Normal, vec![1.0]);
        let tr = s.legendre(2.0).unwrap();
        let rate = tr.rate.finite().unwrap();
        assert!((rate - 0.5 * (1.0 - 2f64.ln())).abs() < 1e-12);
        assert!((tr.tilt.finite().unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn mean_gives_zero() {
        for dist in EntryDistribution::ALL {
            let tr = spec(dist, vec![0.3, -0.2, 0.9]).legendre(1.0).unwrap();
            assert_eq!(tr.rate, RateValue::Finite(0.0));
            assert_eq!(tr.tilt, Tilt::Finite(0.0));
        }
    }

    #[test]
    fn two_atom_boundary() {
        let s = spec(Rademacher, vec![1.0, 1.0]);
        let tr = s.legendre(2.0).unwrap();
        assert!((tr.rate.finite().unwrap() - 2f64.ln()).abs() < 1e-12);
        assert_eq!(tr.tilt, Tilt::PlusInfinity);
        assert!(s.legendre(2.01).unwrap().rate.is_infinite());
        // Interior values follow the binary KL divergence from ½.
        let q: f64 = 0.9;
        let kl = q * (2.0 * q).ln() + (1.0 - q) * (2.0 * (1.0 - q)).ln();
        assert!((s.legendre(1.8).unwrap().rate.finite().unwrap() - kl).abs() < 1e-12);
        assert!(s.legendre(0.0).is_err());
    }
}
