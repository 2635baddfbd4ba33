//! Monte Carlo and exact-enumeration estimates of extreme-eigenvalue tail
//! probabilities and their empirical exponential rates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::EntryDistribution;
use crate::error::{dimension, domain, Result};
use crate::linalg::{mp_edges, SampleMatrix, Spectrum, UnitVector};
use crate::rng::TrialRngs;
use crate::stats::{clopper_pearson_95, empirical_rate};

/// Eigenvalues below this multiple of `‖W‖_F` count as zero. ±1 spectra are
/// rational with denominator `n`, so any threshold below `1/(2n)` is exact.
pub const ZERO_EIGEN_TOL: f64 = 1e-9;

/// Largest `k·n` handled by exhaustive enumeration.
pub const MAX_ENUMERATION_CELLS: usize = 24;

/// Which extreme-eigenvalue tail is being measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// `λ_min ≤ α`.
    MinBelow,
    /// `λ_max ≥ α`.
    MaxAbove,
}

impl std::str::FromStr for Side {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" | "minbelow" | "min-below" | "lower" => Ok(Side::MinBelow),
            "max" | "maxabove" | "max-above" | "upper" => Ok(Side::MaxAbove),
            other => Err(crate::Error::Parse(format!("unknown side '{other}'"))),
        }
    }
}

/// A predicate on the spectrum of `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpectralEvent {
    MinBelow(f64),
    MaxAbove(f64),
    /// At least `l` eigenvalues are zero.
    ZeroEigenvalues(usize),
    /// `λ_min ≤ β` and `λ_max ≥ α`.
    Joint { alpha: f64, beta: f64 },
}

impl SpectralEvent {
    pub fn tail(side: Side, alpha: f64) -> Self {
        match side {
            Side::MinBelow => SpectralEvent::MinBelow(alpha),
            Side::MaxAbove => SpectralEvent::MaxAbove(alpha),
        }
    }

    pub fn holds(&self, spec: &Spectrum) -> bool {
        match *self {
            SpectralEvent::MinBelow(a) => spec.min() <= a,
            SpectralEvent::MaxAbove(a) => spec.max() >= a,
            SpectralEvent::ZeroEigenvalues(l) => {
                let norm = spec.eigenvalues().iter().map(|v| v * v).sum::<f64>().sqrt();
                spec.count_below(ZERO_EIGEN_TOL * norm) >= l
            }
            SpectralEvent::Joint { alpha, beta } => spec.min() <= beta && spec.max() >= alpha,
        }
    }
}

/// Estimated tail probability `P(λ_min ≤ α)` or `P(λ_max ≥ α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub dist: EntryDistribution,
    pub k: usize,
    pub n: usize,
    pub alpha: f64,
    pub side: Side,
    pub trials: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `−(1/n) log p̂`; `None` when there were no hits.
    pub empirical_rate: Option<f64>,
    pub seed: u64,
}

impl TailEstimate {
    /// Empirical rates implied by the CI endpoints, `(from ci_high, from ci_low)`.
    pub fn rate_interval(&self) -> (f64, f64) {
        let r = |p: f64| empirical_rate(p, self.n).unwrap_or(f64::INFINITY);
        (r(self.ci_high), r(self.ci_low))
    }
}

/// Number of trials whose spectrum satisfies `event`. Trial `i` draws its
/// matrix from stream `i` of `seed`, so the count does not depend on
/// scheduling.
pub fn count_events(
    dist: EntryDistribution,
    k: usize,
    n: usize,
    trials: u64,
    seed: u64,
    event: &(dyn Fn(&Spectrum) -> bool + Sync),
) -> Result<u64> {
    if k == 0 || n == 0 {
        return Err(dimension(format!("k and n must be positive (k={k}, n={n})")));
    }
    let rngs = TrialRngs::new(seed);
    let hits = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<u64> {
            let mut rng = rngs.trial(i);
            let c = SampleMatrix::sample_with(dist, k, n, seed, &mut rng);
            let spec = c.covariance().spectrum()?;
            Ok(u64::from(event(&spec)))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(hits)
}

fn summarize(
    dist: EntryDistribution,
    k: usize,
    n: usize,
    alpha: f64,
    side: Side,
    trials: u64,
    hits: u64,
    seed: u64,
) -> TailEstimate {
    let p_hat = hits as f64 / trials as f64;
    let (ci_low, ci_high) = clopper_pearson_95(hits, trials);
    TailEstimate {
        dist,
        k,
        n,
        alpha,
        side,
        trials,
        hits,
        p_hat,
        ci_low,
        ci_high,
        empirical_rate: empirical_rate(p_hat, n),
        seed,
    }
}

/// Monte Carlo estimate of an extreme-eigenvalue tail.
pub fn estimate_tail(
    dist: EntryDistribution,
    k: usize,
    n: usize,
    alpha: f64,
    side: Side,
    trials: u64,
    seed: u64,
) -> Result<TailEstimate> {
    if trials == 0 {
        return Err(domain("trials must be at least 1"));
    }
    let event = SpectralEvent::tail(side, alpha);
    let hits = count_events(dist, k, n, trials, seed, &|s| event.holds(s))?;
    Ok(summarize(dist, k, n, alpha, side, trials, hits, seed))
}

/// Monte Carlo estimate of `P(⟨x, W x⟩ ≤ α)` (or `≥ α`) for a fixed
/// direction, the one-vector projection of the eigenvalue event.
pub fn estimate_quadratic_tail(
    dist: EntryDistribution,
    x: &UnitVector,
    n: usize,
    alpha: f64,
    side: Side,
    trials: u64,
    seed: u64,
) -> Result<TailEstimate> {
    let k = x.dim();
    if trials == 0 || n == 0 {
        return Err(domain("trials and n must be at least 1"));
    }
    let rngs = TrialRngs::new(seed);
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rngs.trial(i);
            let c = SampleMatrix::sample_with(dist, k, n, seed, &mut rng);
            let q = c.quadratic_form(x).expect("dimensions agree");
            let hit = match side {
                Side::MinBelow => q <= alpha,
                Side::MaxAbove => q >= alpha,
            };
            u64::from(hit)
        })
        .sum();
    Ok(summarize(dist, k, n, alpha, side, trials, hits, seed))
}

/// Exact probability as a ratio of counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactProbability {
    pub hits: u64,
    pub total: u64,
}

impl ExactProbability {
    pub fn value(&self) -> f64 {
        self.hits as f64 / self.total as f64
    }
}

/// Exact probability that a `k × n` ±1 matrix satisfies a spectral
/// predicate, by enumerating sign matrices. Flipping the sign of a row
/// leaves `W`'s spectrum unchanged, so the first column is fixed to `+1`
/// and each pattern is counted `2^k` times.
pub fn enumerate_exact(
    k: usize,
    n: usize,
    event: &(dyn Fn(&Spectrum) -> bool + Sync),
) -> Result<ExactProbability> {
    if k == 0 || n == 0 {
        return Err(dimension(format!("k and n must be positive (k={k}, n={n})")));
    }
    if k * n > MAX_ENUMERATION_CELLS {
        return Err(domain(format!(
            "exhaustive enumeration needs k*n <= {MAX_ENUMERATION_CELLS}, got {}",
            k * n
        )));
    }
    let free = k * (n - 1);
    let patterns = 1u64 << free;
    let hits = (0..patterns)
        .into_par_iter()
        .map(|bits| -> Result<u64> {
            let mut entries = vec![1.0; k * n];
            let mut b = bits;
            for m in 0..k {
                for i in 1..n {
                    entries[m * n + i] = if b & 1 == 0 { 1.0 } else { -1.0 };
                    b >>= 1;
                }
            }
            let c = SampleMatrix::from_rows(EntryDistribution::Rademacher, k, n, entries)?;
            Ok(u64::from(event(&c.covariance().spectrum()?)))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(ExactProbability {
        hits: hits << k,
        total: 1u64 << (k * n),
    })
}

/// How a zero-eigenvalue probability was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Exact,
    MonteCarlo,
}

/// One point of the zero-eigenvalue rate sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRatePoint {
    pub k: usize,
    pub l: usize,
    pub n: usize,
    pub method: Method,
    pub hits: u64,
    pub trials: u64,
    pub p: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub empirical_rate: Option<f64>,
}

/// `−(1/n) log P(λ_1 = … = λ_l = 0)` for ±1 entries over a list of `n`.
/// Exact enumeration is used when `k·n ≤ 24`, Monte Carlo otherwise.
pub fn zero_eigen_rate(
    k: usize,
    l: usize,
    n_list: &[usize],
    trials: u64,
    seed: u64,
) -> Result<Vec<ZeroRatePoint>> {
    if l == 0 || l >= k {
        return Err(domain(format!("need 1 <= l <= k-1, got l = {l}, k = {k}")));
    }
    let event = SpectralEvent::ZeroEigenvalues(l);
    let pred = |s: &Spectrum| event.holds(s);
    n_list
        .iter()
        .map(|&n| {
            if k * n <= MAX_ENUMERATION_CELLS {
                let exact = enumerate_exact(k, n, &pred)?;
                let p = exact.value();
                Ok(ZeroRatePoint {
                    k,
                    l,
                    n,
                    method: Method::Exact,
                    hits: exact.hits,
                    trials: exact.total,
                    p,
                    ci_low: p,
                    ci_high: p,
                    empirical_rate: empirical_rate(p, n),
                })
            } else {
                if trials == 0 {
                    return Err(domain("trials must be at least 1"));
                }
                let hits = count_events(EntryDistribution::Rademacher, k, n, trials, seed, &pred)?;
                let p = hits as f64 / trials as f64;
                let (ci_low, ci_high) = clopper_pearson_95(hits, trials);
                Ok(ZeroRatePoint {
                    k,
                    l,
                    n,
                    method: Method::MonteCarlo,
                    hits,
                    trials,
                    p,
                    ci_low,
                    ci_high,
                    empirical_rate: empirical_rate(p, n),
                })
            }
        })
        .collect()
}

/// Pooled eigenvalue histogram normalized to unit mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_left: Vec<f64>,
    pub bin_right: Vec<f64>,
    pub mass: Vec<f64>,
    /// Marchenko–Pastur support for `β = k/n`.
    pub mp_lower: f64,
    pub mp_upper: f64,
    /// Fraction of eigenvalues outside `[mp_lower − 0.05, mp_upper + 0.05]`.
    pub outside_fraction: f64,
}

/// Histogram of all eigenvalues pooled over `trials` matrices.
pub fn spectrum_histogram(
    dist: EntryDistribution,
    k: usize,
    n: usize,
    trials: u64,
    bins: usize,
    seed: u64,
) -> Result<Histogram> {
    if k == 0 || n == 0 {
        return Err(dimension(format!("k and n must be positive (k={k}, n={n})")));
    }
    if bins == 0 || trials * (k as u64) < 10 * bins as u64 {
        return Err(domain(format!(
            "{trials} trials x {k} eigenvalues is too few for {bins} bins"
        )));
    }
    let rngs = TrialRngs::new(seed);
    let eigen: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let mut rng = rngs.trial(i);
            let c = SampleMatrix::sample_with(dist, k, n, seed, &mut rng);
            Ok(c.covariance().spectrum()?.eigenvalues().to_vec())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let (mp_lower, mp_upper) = mp_edges(k as f64 / n as f64)?;
    let lo = eigen.iter().copied().fold(f64::INFINITY, f64::min).min(mp_lower - 0.05).max(0.0);
    let hi = eigen.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(mp_upper + 0.05);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut outside = 0u64;
    for &v in &eigen {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
        if v < mp_lower - 0.05 || v > mp_upper + 0.05 {
            outside += 1;
        }
    }
    let total = eigen.len() as f64;
    Ok(Histogram {
        bin_left: (0..bins).map(|b| lo + b as f64 * width).collect(),
        bin_right: (0..bins).map(|b| lo + (b + 1) as f64 * width).collect(),
        mass: counts.iter().map(|&c| c as f64 / total).collect(),
        mp_lower,
        mp_upper,
        outside_fraction: outside as f64 / total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use EntryDistribution::*;

    /// Brute-force oracle for k = 2: `λ_min = 0` iff the rows are equal or
    /// opposite; `W` has eigenvalues `1 ± |ρ|` with `ρ = r₁·r₂/n`.
    fn two_row_oracle(n: usize) -> (f64, f64) {
        let total = 1u64 << (2 * n);
        let (mut zero, mut top) = (0u64, 0u64);
        for bits in 0..total {
            let r1 = bits & ((1 << n) - 1);
            let r2 = bits >> n;
            let agree = n as i64 - 2 * (r1 ^ r2).count_ones() as i64;
            let rho = agree as f64 / n as f64;
            if rho.abs() == 1.0 {
                zero += 1;
            }
            if 1.0 + rho.abs() >= 2.0 {
                top += 1;
            }
        }
        (zero as f64 / total as f64, top as f64 / total as f64)
    }

    #[test]
    fn exact_two_by_two() {
        let (zero, top) = two_row_oracle(2);
        assert_eq!(zero, 0.5);
        assert_eq!(top, 0.5);
        let z = enumerate_exact(2, 2, &|s| SpectralEvent::ZeroEigenvalues(1).holds(s)).unwrap();
        assert_eq!((z.hits, z.total), (8, 16));
        let z = enumerate_exact(2, 4, &|s| SpectralEvent::ZeroEigenvalues(1).holds(s)).unwrap();
        assert_eq!(z.value(), 0.125);
        assert_eq!(z.value(), two_row_oracle(4).0);
        let one = enumerate_exact(1, 7, &|s| (s.max() - 1.0).abs() < 1e-12).unwrap();
        assert_eq!(one.value(), 1.0);
        assert!(enumerate_exact(5, 5, &|_| true).is_err());
    }

    #[test]
    fn mc_two_by_two_matches_oracle() {
        let t = 200_000;
        for (side, alpha, p) in [(Side::MinBelow, 1e-9, 0.5), (Side::MaxAbove, 2.0 - 1e-9, 0.5)] {
            let est = estimate_tail(Rademacher, 2, 2, alpha, side, t, 9).unwrap();
            let (lo, hi) = crate::stats::clopper_pearson(est.hits, est.trials, 1e-3);
            assert!(lo <= p && p <= hi, "{est:?}");
        }
    }

    #[test]
    fn max_above_zero_is_certain() {
        for dist in EntryDistribution::ALL {
            let est = estimate_tail(dist, 3, 5, 0.0, Side::MaxAbove, 500, 1).unwrap();
            assert_eq!(est.p_hat, 1.0);
            assert_eq!(est.empirical_rate, Some(0.0));
        }
    }

    #[test]
    fn rademacher_never_exceeds_k() {
        let est = estimate_tail(Rademacher, 3, 2, 3.0 + 1e-9, Side::MaxAbove, 20_000, 5).unwrap();
        assert_eq!(est.hits, 0);
        assert!(est.empirical_rate.is_none());
    }

    #[test]
    fn nested_events_are_monotone() {
        let mut prev_min = 0;
        let mut prev_max = u64::MAX;
        for i in 0..12 {
            let alpha = 0.2 + 0.15 * i as f64;
            let lo = estimate_tail(Uniform, 3, 8, alpha, Side::MinBelow, 3000, 21).unwrap();
            let hi = estimate_tail(Uniform, 3, 8, alpha, Side::MaxAbove, 3000, 21).unwrap();
            assert!(lo.hits >= prev_min && hi.hits <= prev_max);
            prev_min = lo.hits;
            prev_max = hi.hits;
        }
    }

    #[test]
    fn zero_rate_exact_points() {
        let pts = zero_eigen_rate(2, 1, &[10], 0, 0).unwrap();
        assert_eq!(pts[0].method, Method::Exact);
        assert_eq!(pts[0].p, 2f64.powi(-9));
        let expect = 0.9 * std::f64::consts::LN_2;
        assert!((pts[0].empirical_rate.unwrap() - expect).abs() < 1e-12);
        assert!(zero_eigen_rate(2, 2, &[4], 10, 0).is_err());
        assert!(zero_eigen_rate(2, 0, &[4], 10, 0).is_err());
    }

    #[test]
    fn three_equal_rows_force_two_zero_eigenvalues() {
        // Three equal (or opposite) rows have probability 4·2^{-2n} and give
        // two zero eigenvalues; the exact probability is at least that.
        for n in [3, 5, 7] {
            let p = enumerate_exact(3, n, &|s| SpectralEvent::ZeroEigenvalues(2).holds(s)).unwrap();
            assert!(p.value() >= 4.0 * 2f64.powi(-2 * n as i32) - 1e-15, "n={n}");
        }
    }

    #[test]
    fn histogram_single_row() {
        let h = spectrum_histogram(Normal, 1, 4000, 200, 10, 3).unwrap();
        let total: f64 = h.mass.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(h.outside_fraction < 0.01);
        assert!(spectrum_histogram(Normal, 1, 10, 5, 10, 3).is_err());
    }

    #[test]
    fn side_parses() {
        assert_eq!("max".parse::<Side>().unwrap(), Side::MaxAbove);
        assert_eq!("min".parse::<Side>().unwrap(), Side::MinBelow);
        assert!("mid".parse::<Side>().is_err());
    }
}
