//! Laws of the i.i.d. matrix entries.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Distribution of a single entry `C_ij`. Every variant has mean 0 and
/// variance 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryDistribution {
    /// ±1 with probability ½ each.
    Rademacher,
    /// Uniform on `[-√3, √3]`.
    Uniform,
    /// Standard normal.
    Normal,
}

impl EntryDistribution {
    pub const ALL: [EntryDistribution; 3] = [Self::Rademacher, Self::Uniform, Self::Normal];

    /// Essential supremum `M` of `|C_ij|` (infinite for the normal law).
    pub fn bound(self) -> f64 {
        match self {
            Self::Rademacher => 1.0,
            Self::Uniform => SQRT3,
            Self::Normal => f64::INFINITY,
        }
    }

    /// Whether the law is symmetric with bounded support.
    pub fn is_bounded(self) -> bool {
        self.bound().is_finite()
    }

    /// Scalar moment generating function `φ_C(t) = E[e^{t C}]`.
    pub fn mgf(self, t: f64) -> f64 {
        match self {
            Self::Rademacher => t.cosh(),
            Self::Uniform => {
                let a = SQRT3 * t;
                if a.abs() < 1e-4 {
                    1.0 + a * a / 6.0 + a.powi(4) / 120.0
                } else {
                    a.sinh() / a
                }
            }
            Self::Normal => (0.5 * t * t).exp(),
        }
    }

    /// `log φ_C(t)`, stable for large `|t|`.
    pub fn log_mgf(self, t: f64) -> f64 {
        match self {
            Self::Rademacher => log_cosh(t),
            Self::Uniform => log_sinhc(SQRT3 * t),
            Self::Normal => 0.5 * t * t,
        }
    }

    /// Draw a single entry.
    pub fn sample<R: RngCore + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Self::Rademacher => {
                if rng.next_u32() & 1 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            Self::Uniform => SQRT3 * (2.0 * rng.random::<f64>() - 1.0),
            Self::Normal => rng.sample(StandardNormal),
        }
    }

    /// Fill `out` with i.i.d. draws. Rademacher entries consume one bit each.
    pub fn fill<R: RngCore + ?Sized>(self, rng: &mut R, out: &mut [f64]) {
        match self {
            Self::Rademacher => {
                for chunk in out.chunks_mut(64) {
                    let mut bits = rng.next_u64();
                    for v in chunk {
                        *v = if bits & 1 == 0 { 1.0 } else { -1.0 };
                        bits >>= 1;
                    }
                }
            }
            _ => {
                for v in out {
                    *v = self.sample(rng);
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Rademacher => "rademacher",
            Self::Uniform => "uniform",
            Self::Normal => "normal",
        }
    }
}

impl fmt::Display for EntryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntryDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rademacher" | "pm1" | "bernoulli" | "sign" => Ok(Self::Rademacher),
            "uniform" | "uniformsym" | "unif" => Ok(Self::Uniform),
            "normal" | "gaussian" | "stdnormal" | "wishart" => Ok(Self::Normal),
            other => Err(Error::Parse(format!("unknown distribution '{other}'"))),
        }
    }
}

/// `log cosh(t)` without overflow.
pub fn log_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `log(sinh(a)/a)` without overflow.
pub fn log_sinhc(a: f64) -> f64 {
    let a = a.abs();
    if a < 1e-4 {
        a * a / 6.0 - a.powi(4) / 180.0
    } else if a < 20.0 {
        (a.sinh() / a).ln()
    } else {
        a - a.ln() - std::f64::consts::LN_2 + (-(2.0 * a)).exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn moments_match_normalization() {
        for dist in EntryDistribution::ALL {
            let mut rng = stream_rng(11, 0);
            let mut buf = vec![0.0; 1_000_000];
            dist.fill(&mut rng, &mut buf);
            let n = buf.len() as f64;
            let mean = buf.iter().sum::<f64>() / n;
            let var = buf.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            assert!(mean.abs() < 5e-3, "{dist}: mean {mean}");
            assert!((var - 1.0).abs() < 5e-3, "{dist}: var {var}");
        }
    }

    #[test]
    fn support_constraints() {
        let mut rng = stream_rng(3, 1);
        for _ in 0..10_000 {
            let r = EntryDistribution::Rademacher.sample(&mut rng);
            assert!(r == 1.0 || r == -1.0);
            let u = EntryDistribution::Uniform.sample(&mut rng);
            assert!(u.abs() <= SQRT3);
        }
    }

    #[test]
    fn mgf_dominated_by_gaussian() {
        for dist in EntryDistribution::ALL {
            for i in -400..=400 {
                let t = i as f64 * 0.05;
                assert!(dist.log_mgf(t) <= 0.5 * t * t + 1e-12, "{dist} t={t}");
                let direct = dist.mgf(t).ln();
                assert!((direct - dist.log_mgf(t)).abs() < 1e-9 * (1.0 + direct.abs()));
            }
        }
    }

    #[test]
    fn parse_round_trip() {
        for dist in EntryDistribution::ALL {
            assert_eq!(dist.name().parse::<EntryDistribution>().unwrap(), dist);
        }
        assert!("cauchy".parse::<EntryDistribution>().is_err());
    }
}
