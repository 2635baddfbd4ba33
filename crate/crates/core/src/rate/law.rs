//! Cumulant generating functions of the scalar laws that feed the Legendre
//! transform: `S_x²` for the three entry distributions, and `C_11²`.

use crate::dist::{log_sinhc, EntryDistribution};

/// Relative tolerance for deciding that a value sits on the support edge.
pub(crate) const EDGE_TOL: f64 = 1e-12;

/// Essential range of a scalar law together with the probability mass
/// carried by each endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
    pub mass_lo: f64,
    pub mass_hi: f64,
}

/// Finitely supported law with equal-weight atoms (sign enumeration).
#[derive(Debug, Clone)]
pub struct DiscreteLaw {
    values: Vec<f64>,
    support: Support,
}

impl DiscreteLaw {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(!values.is_empty());
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tol = EDGE_TOL * hi.abs().max(1.0);
        let len = values.len() as f64;
        let mass_lo = values.iter().filter(|&&v| v - lo <= tol).count() as f64 / len;
        let mass_hi = values.iter().filter(|&&v| hi - v <= tol).count() as f64 / len;
        Self {
            values,
            support: Support {
                lo,
                hi,
                mass_lo,
                mass_hi,
            },
        }
    }

    /// Law of `S_x² = (Σ_m x_m c_m)²` over all sign patterns `c ∈ {±1}^k`.
    /// The first sign is fixed to `+1` since `S_x²` is invariant under a
    /// global flip, so `2^{k-1}` atoms are produced.
    pub fn rademacher_square(x: &[f64]) -> Self {
        let mut sums = Vec::with_capacity(1 << (x.len() - 1));
        sums.push(x[0]);
        for &xj in &x[1..] {
            let prev = std::mem::take(&mut sums);
            sums.reserve(prev.len() * 2);
            for s in prev {
                sums.push(s + xj);
                sums.push(s - xj);
            }
        }
        for s in &mut sums {
            *s *= *s;
        }
        Self::new(sums)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn tilted(&self, t: f64) -> (f64, f64, f64, f64) {
        // Shift by the dominant endpoint so exponents stay ≤ 0.
        let shift = if t >= 0.0 { self.support.hi } else { self.support.lo };
        let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for &v in &self.values {
            let w = (t * (v - shift)).exp();
            z += w;
            m1 += w * v;
            m2 += w * v * v;
        }
        (shift, z, m1 / z, m2 / z)
    }
}

/// The scalar laws used by the transforms.
#[derive(Debug, Clone)]
pub enum Law {
    Discrete(DiscreteLaw),
    /// `χ²₁`, the square of a standard normal.
    ChiSquare1,
    /// `S_x²` for uniform entries on `[-√3, √3]`, evaluated through the
    /// identity `E[e^{t S²}] = E_Z[Π_j φ_U(√(2t) Z x_j)]`, `Z ~ N(0,1)`,
    /// valid for `t ≥ 0`.
    UniformMixture { x: Vec<f64> },
    /// `C²` for a single uniform entry on `[-√3, √3]`.
    UniformSquare,
}

/// Trapezoid step for the Gaussian-mixture integral over `z`.
const MIX_STEP: f64 = 0.05;
/// Composite Simpson intervals for the uniform-square integral.
const SIMPSON_INTERVALS: usize = 4000;

impl Law {
    /// Admissible `t` as `(lo, hi, hi_open)`.
    pub fn domain(&self) -> (f64, f64, bool) {
        match self {
            Law::Discrete(_) | Law::UniformSquare => (f64::NEG_INFINITY, f64::INFINITY, false),
            Law::ChiSquare1 => (f64::NEG_INFINITY, 0.5, true),
            Law::UniformMixture { .. } => (0.0, f64::INFINITY, false),
        }
    }

    pub fn in_domain(&self, t: f64) -> bool {
        let (lo, hi, open) = self.domain();
        t.is_finite() && t >= lo && if open { t < hi } else { t <= hi }
    }

    pub fn support(&self) -> Support {
        match self {
            Law::Discrete(d) => d.support,
            Law::ChiSquare1 => Support {
                lo: 0.0,
                hi: f64::INFINITY,
                mass_lo: 0.0,
                mass_hi: 0.0,
            },
            Law::UniformMixture { x } => {
                let l1: f64 = x.iter().map(|v| v.abs()).sum();
                Support {
                    lo: 0.0,
                    hi: 3.0 * l1 * l1,
                    mass_lo: 0.0,
                    mass_hi: 0.0,
                }
            }
            Law::UniformSquare => Support {
                lo: 0.0,
                hi: 3.0,
                mass_lo: 0.0,
                mass_hi: 0.0,
            },
        }
    }

    /// `Λ(t) = log E[e^{tX}]`. Callers check the domain.
    pub fn cgf(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match self {
            Law::Discrete(d) => {
                let (shift, z, _, _) = d.tilted(t);
                t * shift + (z / d.values.len() as f64).ln()
            }
            Law::ChiSquare1 => -0.5 * (-2.0 * t).ln_1p(),
            Law::UniformMixture { x } => mixture(x, t).0,
            Law::UniformSquare => uniform_square(t).0,
        }
    }

    /// `Λ'(t)`, the mean of the exponentially tilted law.
    pub fn slope(&self, t: f64) -> f64 {
        match self {
            Law::Discrete(d) => d.tilted(t).2,
            Law::ChiSquare1 => 1.0 / (1.0 - 2.0 * t),
            Law::UniformMixture { x } => mixture(x, t).1,
            Law::UniformSquare => uniform_square(t).1,
        }
    }

    /// `Λ''(t)` where an exact expression is available.
    pub fn curvature(&self, t: f64) -> Option<f64> {
        match self {
            Law::Discrete(d) => {
                let (_, _, m1, m2) = d.tilted(t);
                Some((m2 - m1 * m1).max(0.0))
            }
            Law::ChiSquare1 => Some(2.0 / (1.0 - 2.0 * t).powi(2)),
            Law::UniformSquare => Some(uniform_square(t).2),
            Law::UniformMixture { .. } => None,
        }
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + terms.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// `(a coth a − 1) / a²`.
fn coth_ratio(a: f64) -> f64 {
    let a = a.abs();
    if a < 1e-3 {
        let a2 = a * a;
        1.0 / 3.0 - a2 / 45.0 + 2.0 * a2 * a2 / 945.0
    } else if a > 20.0 {
        (a - 1.0) / (a * a)
    } else {
        (a / a.tanh() - 1.0) / (a * a)
    }
}

/// `(Λ(t), Λ'(t))` for the uniform Gaussian-mixture representation.
///
/// With `b_j = √(6t)·x_j` and `a_j = b_j z`, the integrand over `z ≥ 0` is
/// `Π_j sinhc(a_j)·φ(z)` and the slope is the weighted mean of
/// `Σ_j 3 x_j² z² (a_j coth a_j − 1)/a_j²`.
fn mixture(x: &[f64], t: f64) -> (f64, f64) {
    debug_assert!(t >= 0.0);
    let root = (6.0 * t).sqrt();
    let b: Vec<f64> = x.iter().map(|v| root * v).collect();
    let reach: f64 = b.iter().map(|v| v.abs()).sum::<f64>() + 40.0;
    let nodes = (reach / MIX_STEP).ceil() as usize;
    let log_norm = -0.5 * (2.0 * std::f64::consts::PI).ln();
    let mut logw = Vec::with_capacity(nodes + 1);
    let mut inner = Vec::with_capacity(nodes + 1);
    for i in 0..=nodes {
        let z = i as f64 * MIX_STEP;
        let mut lw = log_norm - 0.5 * z * z;
        let mut g = 0.0;
        for (bj, xj) in b.iter().zip(x) {
            let a = bj * z;
            lw += log_sinhc(a);
            g += 3.0 * xj * xj * z * z * coth_ratio(a);
        }
        // Trapezoid end weight at z = 0; the tail end is negligible.
        if i == 0 {
            lw += 0.5f64.ln();
        }
        logw.push(lw);
        inner.push(g);
    }
    // Integral over R is twice the half-line integral.
    let lse = log_sum_exp(&logw);
    let log_mgf = lse + (2.0 * MIX_STEP).ln();
    let slope = logw
        .iter()
        .zip(&inner)
        .map(|(lw, g)| (lw - lse).exp() * g)
        .sum();
    (log_mgf, slope)
}

/// `(Λ, Λ', Λ'')` for `C² = 3U²`, `U ~ U[0,1]`, by composite Simpson in `u`.
fn uniform_square(t: f64) -> (f64, f64, f64) {
    let n = SIMPSON_INTERVALS;
    let h = 1.0 / n as f64;
    let shift = if t >= 0.0 { 3.0 } else { 0.0 };
    let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for i in 0..=n {
        let u = i as f64 * h;
        let v = 3.0 * u * u;
        let coef = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let w = coef * (t * (v - shift)).exp();
        z += w;
        m1 += w * v;
        m2 += w * v * v;
    }
    let (m1, m2) = (m1 / z, m2 / z);
    (t * shift + (z * h / 3.0).ln(), m1, (m2 - m1 * m1).max(0.0))
}

/// Law of `C_11²` for the given entry distribution.
pub fn squared_entry_law(dist: EntryDistribution) -> Law {
    match dist {
        EntryDistribution::Rademacher => Law::Discrete(DiscreteLaw::new(vec![1.0])),
        EntryDistribution::Normal => Law::ChiSquare1,
        EntryDistribution::Uniform => Law::UniformSquare,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_slope(law: &Law, t: f64) -> f64 {
        let h = 1e-5;
        (law.cgf(t + h) - law.cgf(t - h)) / (2.0 * h)
    }

    #[test]
    fn rademacher_enumeration_atoms() {
        let r = 0.5f64.sqrt();
        let d = DiscreteLaw::rademacher_square(&[r, r]);
        let mut v = d.values().to_vec();
        v.sort_by(f64::total_cmp);
        assert!(v[0].abs() < 1e-15 && (v[1] - 2.0).abs() < 1e-15);
        assert_eq!(d.support.mass_hi, 0.5);
        assert_eq!(d.support.mass_lo, 0.5);
    }

    #[test]
    fn slopes_match_finite_differences() {
        let x = vec![0.6, 0.48, 0.64];
        let laws = [
            Law::Discrete(DiscreteLaw::rademacher_square(&x)),
            Law::ChiSquare1,
            Law::UniformMixture { x: x.clone() },
            Law::UniformSquare,
        ];
        for law in &laws {
            for &t in &[0.05, 0.2, 0.4] {
                let a = law.slope(t);
                let b = fd_slope(law, t);
                assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()), "{law:?} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn unit_mean_at_zero() {
        let x = vec![0.8, 0.6];
        let laws = [
            Law::Discrete(DiscreteLaw::rademacher_square(&x)),
            Law::ChiSquare1,
            Law::UniformMixture { x: x.clone() },
            Law::UniformSquare,
        ];
        for law in &laws {
            assert!((law.slope(0.0) - 1.0).abs() < 1e-12, "{law:?}");
            assert_eq!(law.cgf(0.0), 0.0);
        }
        // The quadrature itself (not the t = 0 shortcut) integrates to one.
        assert!(mixture(&x, 0.0).0.abs() < 1e-13);
    }

    #[test]
    fn uniform_mixture_single_coordinate_matches_direct_integral() {
        // With x = e_1, S² = C² and both representations must agree.
        let law = Law::UniformMixture { x: vec![1.0] };
        for &t in &[0.01, 0.1, 0.3, 1.0, 3.0] {
            let a = law.cgf(t);
            let b = Law::UniformSquare.cgf(t);
            assert!((a - b).abs() < 1e-9, "t={t}: {a} vs {b}");
        }
    }
}
