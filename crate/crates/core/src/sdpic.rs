//! Noise-free synchronous CDMA uplink with random ±1 codes: matched-filter
//! decoding, multistage soft-decision parallel interference cancellation
//! (SD-PIC), its weighted variant, and bit-error experiments.
//!
//! With `W = (1/n) C Cᵀ` the matched filter returns `Ẑ⁽¹⁾ = W Z` and stage
//! `s` of SD-PIC returns
//!
//! ```text
//! Ẑ⁽ˢ⁾ = Ẑ⁽¹⁾ − (W − I) Ẑ⁽ˢ⁻¹⁾ = Σ_{ς<s} (I − W)^ς W Z = [I − (I − W)^s] Z,
//! ```
//!
//! so the error after `s` stages is `−(I − W)^s Z` and is controlled by
//! `ε = max{1 − λ_min, λ_max − 1}`.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::EntryDistribution;
use crate::error::{dimension, domain, Result};
use crate::linalg::{CovMatrix, SampleMatrix, Spectrum};
use crate::rng::{derive_seed, TrialRngs};
use crate::stats::{clopper_pearson_95, empirical_rate};

/// Fixed-point tolerance `‖Ẑ⁽ˢ⁾ − Ẑ⁽ˢ⁻¹⁾‖_∞` for the `s = ∞` mode.
pub const FIXED_POINT_TOL: f64 = 1e-10;
/// Stage cap for the `s = ∞` mode.
pub const STAGE_CAP: usize = 1000;
/// Iterates larger than this are treated as diverged.
const DIVERGENCE_BOUND: f64 = 1e100;
/// Relative tolerance for the spectral classification of non-convergence.
const SPECTRAL_TOL: f64 = 1e-9;

const COIN_DOMAIN: u64 = 0xC01F_5EED_0000_0001;

/// Bits, powers and the transmitted amplitudes `Z_m = √P_m · b_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transmission {
    bits: Vec<i8>,
    powers: Vec<f64>,
    signal: Vec<f64>,
}

impl Transmission {
    pub fn new(bits: Vec<i8>, powers: Vec<f64>) -> Result<Self> {
        if bits.len() != powers.len() {
            return Err(dimension(format!(
                "{} bits but {} powers",
                bits.len(),
                powers.len()
            )));
        }
        if bits.iter().any(|&b| b != 1 && b != -1) {
            return Err(domain("bits must be +1 or -1"));
        }
        if powers.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(domain("powers must be positive and finite"));
        }
        let signal = bits
            .iter()
            .zip(&powers)
            .map(|(&b, &p)| p.sqrt() * f64::from(b))
            .collect();
        Ok(Self {
            bits,
            powers,
            signal,
        })
    }

    /// Unit powers, so `Z = b`.
    pub fn equal_power(bits: Vec<i8>) -> Result<Self> {
        let k = bits.len();
        Self::new(bits, vec![1.0; k])
    }

    /// `k` fair random bits at unit power.
    pub fn random<R: RngCore + ?Sized>(k: usize, rng: &mut R) -> Self {
        let mut bits = Vec::with_capacity(k);
        while bits.len() < k {
            let mut word = rng.next_u64();
            for _ in 0..64.min(k - bits.len()) {
                bits.push(if word & 1 == 0 { 1 } else { -1 });
                word >>= 1;
            }
        }
        Self::equal_power(bits).expect("valid by construction")
    }

    pub fn k(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[i8] {
        &self.bits
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn signal(&self) -> &[f64] {
        &self.signal
    }

    pub fn is_equal_power(&self) -> bool {
        self.powers.windows(2).all(|p| p[0] == p[1])
    }
}

/// Estimate and hard decisions after a given stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeState {
    pub stage: usize,
    pub estimate: Vec<f64>,
    pub decided: Vec<i8>,
    pub coin_seed: u64,
}

impl DecodeState {
    pub fn new(stage: usize, estimate: Vec<f64>, coin_seed: u64) -> Self {
        let decided = decide_bits(&estimate, coin_seed);
        Self {
            stage,
            estimate,
            decided,
            coin_seed,
        }
    }

    /// Users whose decision differs from the transmitted bit.
    pub fn errors(&self, tx: &Transmission) -> Vec<bool> {
        self.decided
            .iter()
            .zip(tx.bits())
            .map(|(a, b)| a != b)
            .collect()
    }
}

fn check_signal(c: &SampleMatrix, z: &[f64]) -> Result<()> {
    if z.len() != c.k() {
        return Err(dimension(format!(
            "signal has {} entries, {} users",
            z.len(),
            c.k()
        )));
    }
    Ok(())
}

fn check_stage(s: usize) -> Result<()> {
    if s == 0 {
        return Err(domain("stage count must be at least 1"));
    }
    Ok(())
}

/// Matched filter: spread `Z` into the chip sequence `Cᵀ Z` and correlate it
/// with every code, giving `W Z`.
pub fn mf_decode(c: &SampleMatrix, z: &[f64]) -> Result<Vec<f64>> {
    check_signal(c, z)?;
    c.correlate(&c.transmit(z)?)
}

/// Stage `s` of SD-PIC, run as the receiver would: every stage re-spreads
/// the current estimate and subtracts the resulting interference.
pub fn sdpic_stage(c: &SampleMatrix, z: &[f64], s: usize) -> Result<Vec<f64>> {
    check_stage(s)?;
    let first = mf_decode(c, z)?;
    let mut est = first.clone();
    for _ in 1..s {
        let wz = c.correlate(&c.transmit(&est)?)?;
        for m in 0..est.len() {
            est[m] = first[m] - (wz[m] - est[m]);
        }
    }
    Ok(est)
}

/// `M⁻¹ Σ_{ς<s} (I − W/M)^ς W Z`, accumulated term by term.
fn neumann_sum(w: &CovMatrix, z: &[f64], s: usize, weight: f64) -> Vec<f64> {
    let mut term: Vec<f64> = w.matvec(z).into_iter().map(|v| v / weight).collect();
    let mut acc = term.clone();
    for _ in 1..s {
        let wt = w.matvec(&term);
        for m in 0..term.len() {
            term[m] -= wt[m] / weight;
            acc[m] += term[m];
        }
    }
    acc
}

/// Stage `s` of SD-PIC from the partial Neumann sum `Σ_{ς<s} (I − W)^ς W Z`.
pub fn sdpic_closed(c: &SampleMatrix, z: &[f64], s: usize) -> Result<Vec<f64>> {
    check_stage(s)?;
    check_signal(c, z)?;
    Ok(neumann_sum(&c.covariance(), z, s, 1.0))
}

/// Weighted SD-PIC `M⁻¹ Σ_{ς<s} (I − W/M)^ς W Z`. Converges to `Z` when
/// `0 < λ_min` and `λ_max < M`; `M = 1` is plain SD-PIC.
pub fn weighted_sdpic(c: &SampleMatrix, z: &[f64], s: usize, weight: f64) -> Result<Vec<f64>> {
    check_stage(s)?;
    check_signal(c, z)?;
    check_weight(weight)?;
    Ok(neumann_sum(&c.covariance(), z, s, weight))
}

fn check_weight(weight: f64) -> Result<()> {
    if !(weight > 0.0 && weight.is_finite()) {
        return Err(domain(format!("weight M must be positive, got {weight}")));
    }
    Ok(())
}

/// Hard decisions `sign(Ẑ_m)`; an exact zero is settled by a fair coin
/// drawn from `(coin_seed, m)`.
pub fn decide_bits(estimate: &[f64], coin_seed: u64) -> Vec<i8> {
    estimate
        .iter()
        .enumerate()
        .map(|(m, &v)| {
            if v > 0.0 {
                1
            } else if v < 0.0 {
                -1
            } else if derive_seed(coin_seed, m as u64) & 1 == 0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// `ε_k = max{1 − λ_min, λ_max − 1}`.
pub fn mai_factor(spec: &Spectrum) -> f64 {
    (1.0 - spec.min()).max(spec.max() - 1.0)
}

/// Sufficient condition `ε_k^s · √k < 1` for stage `s` to decode every
/// user correctly at equal powers.
pub fn error_free_condition(spec: &Spectrum, s: usize, k: usize) -> bool {
    mai_factor(spec).powi(s as i32) * (k as f64).sqrt() < 1.0
}

/// How many stages the decoder runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stages {
    Finite(usize),
    /// Iterate to a fixed point (tolerance [`FIXED_POINT_TOL`], cap [`STAGE_CAP`]).
    Infinite,
}

impl std::fmt::Display for Stages {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stages::Finite(s) => write!(f, "{s}"),
            Stages::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Stages {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "oo" => Ok(Stages::Infinite),
            t => match t.parse::<usize>() {
                Ok(0) => Err(domain("stage count must be at least 1")),
                Ok(v) => Ok(Stages::Finite(v)),
                Err(_) => Err(crate::Error::Parse(format!("invalid stage count '{s}'"))),
            },
        }
    }
}

/// Outcome of decoding one transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub state: DecodeState,
    pub user_errors: Vec<bool>,
    /// `s = ∞` only: the fixed point was not reached.
    pub unconverged: bool,
    /// Finite `s`, equal powers: value of [`error_free_condition`].
    pub condition: Option<bool>,
}

impl TrialOutcome {
    pub fn any_error(&self) -> bool {
        self.user_errors.iter().any(|&e| e)
    }
}

/// Decode one transmission through `W`.
///
/// In the `s = ∞` mode a run that neither settles nor stays bounded within
/// the stage cap is classified by the spectrum: with `λ_max ≥ M` (the
/// ping-pong regime) or `λ_min = 0` the trial is an error, charged to every
/// user whose coordinate had not settled. Otherwise the last iterate is
/// decided as usual.
pub fn decode(
    w: &CovMatrix,
    tx: &Transmission,
    stages: Stages,
    weight: f64,
    coin_seed: u64,
) -> Result<TrialOutcome> {
    check_weight(weight)?;
    if w.k() != tx.k() {
        return Err(dimension(format!(
            "covariance is {0}x{0} but {1} users transmit",
            w.k(),
            tx.k()
        )));
    }
    let z = tx.signal();
    let first: Vec<f64> = w.matvec(z).into_iter().map(|v| v / weight).collect();
    let step = |est: &[f64]| -> Vec<f64> {
        let we = w.matvec(est);
        (0..est.len())
            .map(|m| first[m] + est[m] - we[m] / weight)
            .collect()
    };
    match stages {
        Stages::Finite(s) => {
            check_stage(s)?;
            let mut est = first.clone();
            for _ in 1..s {
                est = step(&est);
            }
            let state = DecodeState::new(s, est, coin_seed);
            let user_errors = state.errors(tx);
            let condition = if tx.is_equal_power() && weight == 1.0 {
                Some(error_free_condition(&w.spectrum()?, s, tx.k()))
            } else {
                None
            };
            Ok(TrialOutcome {
                state,
                user_errors,
                unconverged: false,
                condition,
            })
        }
        Stages::Infinite => {
            let mut est = first.clone();
            let mut delta = vec![f64::INFINITY; est.len()];
            let mut stage = 1;
            let mut converged = false;
            while stage < STAGE_CAP {
                let next = step(&est);
                for m in 0..est.len() {
                    delta[m] = (next[m] - est[m]).abs();
                }
                est = next;
                stage += 1;
                if delta.iter().all(|&d| d < FIXED_POINT_TOL) {
                    converged = true;
                    break;
                }
                if est.iter().any(|v| !(v.abs() < DIVERGENCE_BOUND)) {
                    break;
                }
            }
            let state = DecodeState::new(stage, est, coin_seed);
            let mut user_errors = state.errors(tx);
            if !converged {
                let spec = w.spectrum()?;
                let scale = w.frobenius().max(f64::MIN_POSITIVE);
                let singular = spec.min() <= SPECTRAL_TOL * scale;
                let ping_pong = spec.max() >= weight * (1.0 - SPECTRAL_TOL);
                if singular || ping_pong {
                    for (e, d) in user_errors.iter_mut().zip(&delta) {
                        if !(*d < FIXED_POINT_TOL) {
                            *e = true;
                        }
                    }
                }
            }
            Ok(TrialOutcome {
                state,
                user_errors,
                unconverged: !converged,
                condition: None,
            })
        }
    }
}

/// Bit-error counts for one decoder configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerEstimate {
    pub k: usize,
    pub n: usize,
    pub stages: Stages,
    pub weight: Option<f64>,
    pub trials: u64,
    /// Trials in which at least one user was decoded wrongly.
    pub any_user_errors: u64,
    pub per_user_errors: Vec<u64>,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `−(1/n) log p̂`; `None` without errors.
    pub empirical_rate: Option<f64>,
    /// `s = ∞` trials that hit the stage cap or diverged.
    pub unconverged: u64,
    /// Finite `s`: trials where the error-free condition held.
    pub condition_true: u64,
    /// Finite `s`: trials where the condition held yet a bit was wrong.
    pub violations: u64,
    pub seed: u64,
}

#[derive(Default, Clone)]
struct Tally {
    any: u64,
    per_user: Vec<u64>,
    unconverged: u64,
    condition_true: u64,
    violations: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        if self.per_user.len() < other.per_user.len() {
            self.per_user.resize(other.per_user.len(), 0);
        }
        for (a, b) in self.per_user.iter_mut().zip(&other.per_user) {
            *a += b;
        }
        self.any += other.any;
        self.unconverged += other.unconverged;
        self.condition_true += other.condition_true;
        self.violations += other.violations;
        self
    }
}

/// Monte Carlo bit-error experiment with ±1 codes and fair random bits at
/// unit power. `weight = None` is plain SD-PIC. Trial `i` draws its codes
/// and bits from stream `i` of `seed`; zero-estimate coins use a seed
/// derived from `(seed, i)`.
pub fn ber_experiment(
    k: usize,
    n: usize,
    stages: Stages,
    weight: Option<f64>,
    trials: u64,
    seed: u64,
) -> Result<BerEstimate> {
    if k == 0 || n == 0 {
        return Err(dimension(format!("k and n must be positive (k={k}, n={n})")));
    }
    if trials == 0 {
        return Err(domain("trials must be at least 1"));
    }
    if let Stages::Finite(s) = stages {
        check_stage(s)?;
    }
    let m = weight.unwrap_or(1.0);
    check_weight(m)?;
    let rngs = TrialRngs::new(seed);
    let coin_base = derive_seed(seed, COIN_DOMAIN);
    let tally = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Tally> {
            let mut rng = rngs.trial(i);
            let c = SampleMatrix::sample_with(EntryDistribution::Rademacher, k, n, seed, &mut rng);
            let tx = Transmission::random(k, &mut rng);
            let out = decode(&c.covariance(), &tx, stages, m, derive_seed(coin_base, i))?;
            let any = out.any_error();
            let holds = out.condition == Some(true);
            Ok(Tally {
                any: u64::from(any),
                per_user: out.user_errors.iter().map(|&e| u64::from(e)).collect(),
                unconverged: u64::from(out.unconverged),
                condition_true: u64::from(holds),
                violations: u64::from(holds && any),
            })
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    let p_hat = tally.any as f64 / trials as f64;
    let (ci_low, ci_high) = clopper_pearson_95(tally.any, trials);
    let mut per_user_errors = tally.per_user;
    per_user_errors.resize(k, 0);
    Ok(BerEstimate {
        k,
        n,
        stages,
        weight,
        trials,
        any_user_errors: tally.any,
        per_user_errors,
        p_hat,
        ci_low,
        ci_high,
        empirical_rate: empirical_rate(p_hat, n),
        unconverged: tally.unconverged,
        condition_true: tally.condition_true,
        violations: tally.violations,
        seed,
    })
}

/// One row of a per-stage convergence trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub stage: usize,
    /// `‖Ẑ⁽ˢ⁾ − Z‖_∞`.
    pub max_abs_error: f64,
    pub bit_errors: usize,
}

/// Stages `1..=stages` of (weighted) SD-PIC for one transmission.
pub fn stage_trace(
    c: &SampleMatrix,
    tx: &Transmission,
    stages: usize,
    weight: f64,
    coin_seed: u64,
) -> Result<Vec<TraceRow>> {
    check_stage(stages)?;
    check_weight(weight)?;
    check_signal(c, tx.signal())?;
    let w = c.covariance();
    let z = tx.signal();
    let first: Vec<f64> = w.matvec(z).into_iter().map(|v| v / weight).collect();
    let mut est = first.clone();
    let mut rows = Vec::with_capacity(stages);
    for stage in 1..=stages {
        if stage > 1 {
            let we = w.matvec(&est);
            for m in 0..est.len() {
                est[m] = first[m] + est[m] - we[m] / weight;
            }
        }
        let max_abs_error = est
            .iter()
            .zip(z)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let bit_errors = decide_bits(&est, coin_seed)
            .iter()
            .zip(tx.bits())
            .filter(|(a, b)| a != b)
            .count();
        rows.push(TraceRow {
            stage,
            max_abs_error,
            bit_errors,
        });
    }
    Ok(rows)
}

/// CSV rendering of a trace with a `stage,max_abs_error,bit_errors` header.
pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from("stage,max_abs_error,bit_errors\n");
    for r in rows {
        out.push_str(&format!("{},{:e},{}\n", r.stage, r.max_abs_error, r.bit_errors));
    }
    out
}
