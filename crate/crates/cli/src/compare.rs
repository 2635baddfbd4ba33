//! Joins a rate curve with Monte Carlo tail estimates.
//!
//! The tail bounds only pin the empirical rate between `I_k(α − ε)` and
//! `I_k(α + ε)`, so each estimate is compared against that bracket: the
//! verdict is `contained` when the rate interval implied by the
//! Clopper–Pearson bounds meets the bracket, `below` or `above` otherwise,
//! and `no-hits` when the estimate saw no events.

use std::path::Path;

use serde_json::Value;

use crate::error::CliError;
use crate::output::{num, opt_num, parse_num, value_num, Table};

const KEY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RatePoint {
    pub dist: String,
    pub k: usize,
    pub alpha: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailPoint {
    pub dist: String,
    pub k: usize,
    pub n: usize,
    pub alpha: f64,
    pub side: String,
    pub hits: u64,
    pub ci: (f64, f64),
    pub empirical_rate: Option<f64>,
}

pub fn read_rates(text: &str) -> Result<Vec<RatePoint>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Usage(format!("rate file lacks a '{name}' column")))
    };
    let (d, k, a, r) = (col("dist")?, col("k")?, col("alpha")?, col("rate")?);
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let bad = || CliError::Usage(format!("malformed rate row: {record:?}"));
        out.push(RatePoint {
            dist: record[d].to_string(),
            k: record[k].parse().map_err(|_| bad())?,
            alpha: parse_num(&record[a]).ok_or_else(bad)?,
            rate: parse_num(&record[r]).ok_or_else(bad)?,
        });
    }
    Ok(out)
}

pub fn read_tails(text: &str) -> Result<Vec<TailPoint>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v: Value = serde_json::from_str(line)
            .map_err(|e| CliError::Usage(format!("line {}: {e}", i + 1)))?;
        if v.get("experiment").and_then(Value::as_str) != Some("mc") {
            continue;
        }
        let bad = || CliError::Usage(format!("line {}: malformed mc record", i + 1));
        let ci = v["ci"].as_array().ok_or_else(bad)?;
        out.push(TailPoint {
            dist: v["dist"].as_str().ok_or_else(bad)?.to_string(),
            k: v["k"].as_u64().ok_or_else(bad)? as usize,
            n: v["n"].as_u64().ok_or_else(bad)? as usize,
            alpha: value_num(&v["alpha"]).ok_or_else(bad)?,
            side: v["side"].as_str().ok_or_else(bad)?.to_string(),
            hits: v["hits"].as_u64().ok_or_else(bad)?,
            ci: (
                ci.first().and_then(value_num).ok_or_else(bad)?,
                ci.get(1).and_then(value_num).ok_or_else(bad)?,
            ),
            empirical_rate: value_num(&v["empirical_rate"]),
        });
    }
    Ok(out)
}

/// Smallest positive gap between distinct α values of one curve.
fn grid_spacing(alphas: &[f64]) -> f64 {
    let mut sorted = alphas.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > KEY_TOL)
        .fold(f64::INFINITY, f64::min)
}

fn rate_from_p(p: f64, n: usize) -> f64 {
    if p > 0.0 {
        (-p.ln() / n as f64).max(0.0)
    } else {
        f64::INFINITY
    }
}

/// Builds the comparison table. `epsilon = None` uses the grid spacing of
/// the rate curve.
pub fn compare(rates: &[RatePoint], tails: &[TailPoint], epsilon: Option<f64>) -> Result<Table, CliError> {
    if let Some(e) = epsilon {
        if !(e >= 0.0) {
            return Err(CliError::Domain(format!("epsilon must be non-negative, got {e}")));
        }
    }
    let mut table = Table::new(&[
        "dist",
        "k",
        "n",
        "alpha",
        "side",
        "rate",
        "bracket_low",
        "bracket_high",
        "empirical_rate",
        "rate_ci_low",
        "rate_ci_high",
        "verdict",
    ]);
    for t in tails {
        let curve: Vec<&RatePoint> = rates
            .iter()
            .filter(|r| r.dist == t.dist && r.k == t.k)
            .collect();
        let Some(centre) = curve.iter().find(|r| (r.alpha - t.alpha).abs() <= KEY_TOL) else {
            continue;
        };
        let eps = epsilon.unwrap_or_else(|| {
            let s = grid_spacing(&curve.iter().map(|r| r.alpha).collect::<Vec<_>>());
            if s.is_finite() {
                s
            } else {
                0.0
            }
        });
        let (lo, hi) = curve
            .iter()
            .filter(|r| (r.alpha - t.alpha).abs() <= eps + KEY_TOL)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r.rate), hi.max(r.rate))
            });
        let (rate_lo, rate_hi) = (rate_from_p(t.ci.1, t.n), rate_from_p(t.ci.0, t.n));
        let verdict = if t.hits == 0 {
            "no-hits"
        } else if rate_hi < lo {
            "below"
        } else if rate_lo > hi {
            "above"
        } else {
            "contained"
        };
        table.push(vec![
            t.dist.clone().into(),
            t.k.into(),
            t.n.into(),
            num(t.alpha),
            t.side.clone().into(),
            num(centre.rate),
            num(lo),
            num(hi),
            opt_num(t.empirical_rate),
            num(rate_lo),
            num(rate_hi),
            verdict.into(),
        ]);
    }
    if table.rows.is_empty() {
        return Err(CliError::Domain(
            "no (dist, k, alpha) key is shared by the rate and Monte Carlo files".into(),
        ));
    }
    Ok(table)
}

pub fn compare_files(rate_file: &Path, mc_file: &Path, epsilon: Option<f64>) -> Result<Table, CliError> {
    let rates = read_rates(&std::fs::read_to_string(rate_file)?)?;
    let tails = read_tails(&std::fs::read_to_string(mc_file)?)?;
    let mut table = compare(&rates, &tails, epsilon)?;
    table.meta("rate_file", rate_file.display().to_string());
    table.meta("mc_file", mc_file.display().to_string());
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> Vec<RatePoint> {
        [(0.9, 0.01), (1.0, 0.0), (1.1, 0.02), (1.2, 0.05)]
            .iter()
            .map(|&(alpha, rate)| RatePoint {
                dist: "normal".into(),
                k: 2,
                alpha,
                rate,
            })
            .collect()
    }

    fn tail(alpha: f64, hits: u64, ci: (f64, f64)) -> TailPoint {
        TailPoint {
            dist: "normal".into(),
            k: 2,
            n: 100,
            alpha,
            side: "max".into(),
            hits,
            ci,
            empirical_rate: None,
        }
    }

    #[test]
    fn verdicts() {
        // Rates 0.01..0.05 around 1.1 correspond to p between e^-5 and e^-1.
        let t = compare(&curve(), &[tail(1.1, 10, ((-3.0f64).exp(), (-2.0f64).exp()))], None).unwrap();
        assert_eq!(t.rows[0][11], "contained");
        let t = compare(&curve(), &[tail(1.1, 10, (1e-6, 2e-6))], None).unwrap();
        assert_eq!(t.rows[0][11], "above");
        // The bracket at 1.1 reaches down to I(1.0) = 0; at 1.2 it is [0.02, 0.05].
        let t = compare(&curve(), &[tail(1.1, 10, (0.9, 0.95))], None).unwrap();
        assert_eq!(t.rows[0][11], "contained");
        let t = compare(&curve(), &[tail(1.2, 10, (0.9, 0.95))], None).unwrap();
        assert_eq!(t.rows[0][11], "below");
        let t = compare(&curve(), &[tail(1.1, 0, (0.0, 1e-3))], None).unwrap();
        assert_eq!(t.rows[0][11], "no-hits");
        let t = compare(&curve(), &[tail(1.0, 500, (0.45, 0.55))], None).unwrap();
        assert_eq!(t.rows[0][5], 0.0);
        assert_eq!(t.rows[0][11], "contained");
    }

    #[test]
    fn empty_join_is_an_error() {
        assert!(compare(&curve(), &[tail(3.0, 1, (0.1, 0.2))], None).is_err());
        assert!(compare(&curve(), &[], None).is_err());
    }

    #[test]
    fn epsilon_zero_is_a_point_bracket() {
        let t = compare(&curve(), &[tail(1.1, 10, (0.1, 0.2))], Some(0.0)).unwrap();
        assert_eq!(t.rows[0][6], 0.02);
        assert_eq!(t.rows[0][7], 0.02);
    }
}
